#!/usr/bin/env python3
"""Run the full positivity certificate and save the JSON report.

Usage:
    python scripts/run_certificates.py [--out report.json] [--no-timing] [--threads N]

Prints the human-readable table to stdout; the JSON goes to --out (default
certificate.json next to this script's working directory).
"""
import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lyness.certifier import run_full_certificate, summary_to_json, summary_to_text


@dataclass(frozen=True)
class CertificateRunConfig:
    out: Path = Path("certificate.json")
    include_timing: bool = True
    threads: int | None = None


def run(config: CertificateRunConfig) -> bool:
    t0 = time.perf_counter()
    summary = run_full_certificate(threads=config.threads)
    elapsed = time.perf_counter() - t0
    config.out.write_text(
        summary_to_json(summary, include_timing=config.include_timing) + "\n",
        encoding="utf-8")
    print(summary_to_text(summary))
    print(f"wrote {config.out} ({elapsed:.2f}s)")
    return summary.overall_pass


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=CertificateRunConfig.out)
    parser.add_argument("--no-timing", action="store_true",
                        help="omit elapsedMs so reruns are byte-identical")
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args(argv)
    config = CertificateRunConfig(out=args.out,
                                  include_timing=not args.no_timing,
                                  threads=args.threads)
    return 0 if run(config) else 1


if __name__ == "__main__":
    sys.exit(main())
