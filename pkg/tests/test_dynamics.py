"""Tests for orbit simulation, descent monitoring, stability, regions, grids."""

import io
import math
import random
from fractions import Fraction

import pytest

from lyness.dynamics import (
    g_grid,
    grid_to_csv,
    classify_regions,
    local_stability,
    lyapunov_descent_check,
    random_instances,
    simulate,
    stability_from_ua,
    trace_to_csv,
    transformed_orbit,
)
from lyness.model import ParamsPQ, equilibrium


def small_height_instances(rng, count):
    """Random instances with q < p and small rational height, so the exact
    orbit's integer sizes stay manageable."""
    out = []
    while len(out) < count:
        p = Fraction(rng.randint(1, 1000), rng.randint(1, 10))
        q = Fraction(rng.randint(1, 1000), rng.randint(1, 10))
        if not q < p:
            continue
        seed = (Fraction(rng.randint(1, 200), rng.randint(1, 10)),
                Fraction(rng.randint(1, 200), rng.randint(1, 10)))
        out.append((ParamsPQ(p, q), seed))
    return out


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def test_simulate_converges_to_reference_equilibrium():
    trace = simulate(ParamsPQ(20, 4), (1.0, 2.0))
    assert trace.converged
    assert trace.verdict == "converged"
    _, _, final = trace.states[-1]
    assert abs(final - 6.216990566028302) < 1e-8
    assert trace.iters_to_tol == trace.states[-1][0]


def test_simulate_square_root_two_case():
    # p = 2, q = 1: the equilibrium is sqrt(2)
    trace = simulate(ParamsPQ(2, 1), (3.0, 0.5))
    assert trace.converged
    assert abs(trace.states[-1][2] - math.sqrt(2.0)) < 1e-8


def test_simulate_equilibrium_seed_stops_immediately():
    xbar = equilibrium(ParamsPQ(20, 4)).xbar
    trace = simulate(ParamsPQ(20, 4), (xbar, xbar))
    assert trace.converged
    assert trace.iters_to_tol == 0
    assert len(trace.states) == 1


def test_simulate_detects_float_overflow():
    # q * x[0] overflows on the first step while the equilibrium itself is
    # still representable
    trace = simulate(ParamsPQ(1.0, 1e4), (1e-30, 1e305), max_iters=50)
    assert trace.verdict == "diverged-nonfinite"
    assert not trace.converged
    assert len(trace.states) == 1


def test_simulate_validation():
    with pytest.raises(ValueError, match="mode"):
        simulate(ParamsPQ(2, 1), (1.0, 1.0), mode="symbolic")
    with pytest.raises(ValueError, match="tolerance"):
        simulate(ParamsPQ(2, 1), (1.0, 1.0), tol=0.0)
    with pytest.raises(ValueError, match="max_iters"):
        simulate(ParamsPQ(2, 1), (1.0, 1.0), max_iters=-1)
    with pytest.raises(ValueError, match="seed"):
        simulate(ParamsPQ(2, 1), (0.0, 1.0))


def test_simulate_without_recording_keeps_final_state():
    full = simulate(ParamsPQ(20, 4), (1.0, 2.0), record_states=True)
    thin = simulate(ParamsPQ(20, 4), (1.0, 2.0), record_states=False)
    assert len(thin.states) == 1
    assert thin.states[0] == full.states[-1]
    assert thin.verdict == full.verdict
    assert thin.iters_to_tol == full.iters_to_tol


def test_exact_mode_accepts_rational_alias():
    a = simulate(ParamsPQ(Fraction(7, 2), Fraction(3, 2)),
                 (Fraction(1), Fraction(2)), mode="exact", max_iters=5, tol=1e-300)
    b = simulate(ParamsPQ(Fraction(7, 2), Fraction(3, 2)),
                 (Fraction(1), Fraction(2)), mode="exact-rational", max_iters=5, tol=1e-300)
    assert a == b


def test_float_and_exact_orbits_agree():
    # exact integer growth is roughly Fibonacci-exponential in the step
    # count, so the cross-check runs at a depth where it is still fast
    rng = random.Random(909)
    for params, seed in small_height_instances(rng, 50):
        tf = simulate(params, seed, mode="float", tol=1e-300, max_iters=30)
        te = simulate(params, seed, mode="exact", tol=1e-300, max_iters=30)
        assert len(tf.states) == len(te.states) == 31
        for (_, _, xf), (_, _, xe) in zip(tf.states, te.states):
            assert abs(xf - xe) <= 1e-9 * max(1.0, abs(xe))


def test_float_and_exact_orbits_agree_deeper_single_instance():
    params, seed = small_height_instances(random.Random(77), 1)[0]
    tf = simulate(params, seed, mode="float", tol=1e-300, max_iters=40)
    te = simulate(params, seed, mode="exact", tol=1e-300, max_iters=40)
    assert len(tf.states) == len(te.states) == 41
    for (_, _, xf), (_, _, xe) in zip(tf.states, te.states):
        assert abs(xf - xe) <= 1e-9 * max(1.0, abs(xe))


def test_exact_orbit_matches_transformed_orbit_exactly():
    p, q = Fraction(7, 2), Fraction(3, 2)
    x_prev, x_cur = Fraction(2), Fraction(1)
    xs = [x_prev, x_cur]
    for _ in range(25):
        x_prev, x_cur = x_cur, (p + q * x_cur) / (1 + x_prev)
        xs.append(x_cur)
    alpha, cap_a = p / q ** 2, 1 / q
    ys = transformed_orbit(alpha, cap_a, (xs[0] / q, xs[1] / q), 25)
    assert all(x == q * y for x, y in zip(xs, ys))


def test_exact_orbit_stays_positive():
    params, seed = small_height_instances(random.Random(5), 1)[0]
    trace = simulate(params, seed, mode="exact", tol=1e-300, max_iters=25)
    assert all(xp > 0 and xc > 0 for _, xp, xc in trace.states)


def test_transformed_orbit_validation():
    with pytest.raises(ValueError, match="positive"):
        transformed_orbit(Fraction(1), Fraction(1), (Fraction(0), Fraction(1)), 3)


def test_g_values_descend_along_float_trace():
    trace = simulate(ParamsPQ(20, 4), (1.0, 2.0))
    g = trace.g_values
    assert len(g) == len(trace.states)
    # two-step descent: every value is beaten within two steps, away from
    # the equilibrium tail of the orbit
    for n in range(0, min(len(g) - 2, 50)):
        assert min(g[n + 1], g[n + 2]) < g[n] + 1e-12


def test_trace_csv_format():
    trace = simulate(ParamsPQ(20, 4), (1.0, 2.0), max_iters=10, tol=1e-300)
    buf = io.StringIO()
    trace_to_csv(trace, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "n,x_prev,x_curr,g"
    assert len(lines) == len(trace.states) + 1
    first = lines[1].split(",")
    assert first[0] == "0"
    assert float(first[1]) == 1.0 and float(first[2]) == 2.0
    ns = [int(row.split(",")[0]) for row in lines[1:]]
    assert ns == list(range(len(trace.states)))


# ---------------------------------------------------------------------------
# Lyapunov descent monitoring
# ---------------------------------------------------------------------------


def test_descent_reference_orbit():
    result = lyapunov_descent_check(ParamsPQ(20, 4), (1.0, 2.0), 500)
    assert result.ok
    assert result.violation is None
    assert result.checked > 0


def test_descent_skips_equilibrium_seed():
    xbar = equilibrium(ParamsPQ(20, 4)).xbar
    result = lyapunov_descent_check(ParamsPQ(20, 4), (xbar, xbar), 100)
    assert result.ok
    assert result.checked == 0
    assert result.skipped_near_equilibrium == 101


def test_descent_many_seeds_one_instance():
    rng = random.Random(2024)
    for _ in range(100):
        seed = (math.exp(rng.uniform(math.log(1e-2), math.log(1e2))),
                math.exp(rng.uniform(math.log(1e-2), math.log(1e2))))
        result = lyapunov_descent_check(ParamsPQ(2, 1), seed, 100)
        assert result.ok, (seed, result.violation)


def test_descent_batch_over_many_instances():
    rng = random.Random(515)
    instances = random_instances(rng, 50, 3)
    total_checked = total_obs = 0
    for params, seed in instances:
        result = lyapunov_descent_check(params, seed, 100)
        assert result.ok, (params, seed, result.violation)
        total_checked += result.checked
        total_obs += result.checked + result.skipped_near_equilibrium
    assert total_obs == len(instances) * 101
    assert total_obs >= 10**4
    assert total_checked >= 10**4


def test_descent_requires_q_below_p():
    with pytest.raises(ValueError, match="q < p"):
        lyapunov_descent_check(ParamsPQ(1, 2), (1.0, 1.0), 10)
    with pytest.raises(ValueError, match="q < p"):
        lyapunov_descent_check(ParamsPQ(2, 2), (1.0, 1.0), 10)
    with pytest.raises(ValueError, match="steps"):
        lyapunov_descent_check(ParamsPQ(2, 1), (1.0, 1.0), -1)


# ---------------------------------------------------------------------------
# local stability
# ---------------------------------------------------------------------------


def test_spectral_radius_reference_point():
    info = stability_from_ua(2.0, 1.0)
    assert abs(info.spectral_radius - math.sqrt(2.0 / 3.0)) < 1e-15
    assert info.stable


def test_spectral_radius_real_root_branch():
    # below the fixed-point regime the discriminant turns positive; the
    # radius is then the larger positive real root
    info = stability_from_ua(0.1, 0.1)
    assert abs(info.spectral_radius - (5.0 + math.sqrt(23.0)) / 2.0) < 1e-12
    assert not info.stable


def test_local_stability_reference_instance():
    info = local_stability(ParamsPQ(20, 4))
    assert info.stable
    u = equilibrium(ParamsPQ(20, 4)).ybar
    assert abs(info.spectral_radius - math.sqrt(u / (0.25 + u))) < 1e-14


def test_fixed_point_always_linearly_stable_in_regime():
    rng = random.Random(88)
    for params, _ in random_instances(rng, 200, 1):
        info = local_stability(params)
        assert info.stable
        assert 0.0 < info.spectral_radius < 1.0


def test_spectral_radius_approaches_one_at_regime_boundary():
    radii = [stability_from_ua(1.0 + 10.0 ** -k, 10.0 ** -k).spectral_radius
             for k in range(1, 7)]
    assert all(r < 1.0 for r in radii)
    assert radii == sorted(radii)
    assert radii[-1] > 0.999


# ---------------------------------------------------------------------------
# parameter-region classification
# ---------------------------------------------------------------------------


def regions_direct(p, q):
    """Independent re-implementation of the five membership tests."""
    flags = set()
    if q >= p:
        flags.add("a")
    if 2 * (q + 1) >= p:
        flags.add("b")
    if q > 1:
        if 2 * (q**3 - q**2 + q + math.sqrt(q**4 - 1) - 1) / (q - 1) ** 2 >= p:
            flags.add("c")
        xbar = 0.5 * (q - 1 + math.sqrt((q - 1) ** 2 + 4 * p))
        if xbar <= (q * q + 1) / (q - 1):
            flags.add("d")
    if 4 * p * (q - 1) ** 2 <= 25:
        flags.add("e")
    return frozenset(flags)


def test_showcase_point_lies_outside_every_region():
    cover = classify_regions(ParamsPQ(20, 4))
    assert cover.flags == frozenset()
    assert all(not c.satisfied for c in cover.checks)
    assert all(c.applicable for c in cover.checks)


def test_region_membership_small_points():
    assert classify_regions(ParamsPQ(1, 2)).flags == frozenset("abcde")
    assert classify_regions(ParamsPQ(3, 3)).flags == frozenset("abcd")


def test_regions_c_d_not_applicable_at_q_one():
    cover = classify_regions(ParamsPQ(2, 1))
    flags_cd = {c.flag: c for c in cover.checks}
    assert not flags_cd["c"].applicable
    assert not flags_cd["d"].applicable
    assert "c" not in cover.flags and "d" not in cover.flags
    assert math.isnan(flags_cd["c"].lhs)
    assert math.isnan(flags_cd["d"].rhs)


def test_region_classifier_matches_direct_reimplementation():
    rng = random.Random(63)
    for _ in range(50):
        p = math.exp(rng.uniform(math.log(1e-2), math.log(1e3)))
        q = math.exp(rng.uniform(math.log(1e-2), math.log(1e3)))
        assert classify_regions(ParamsPQ(p, q)).flags == regions_direct(p, q)


def test_region_e_boundary_behavior():
    # on the curve 4p(q-1)^2 = 25 membership flips
    q = 6.0
    p_on = 25.0 / (4.0 * (q - 1.0) ** 2)
    assert "e" in classify_regions(ParamsPQ(p_on * 0.999, q)).flags
    assert "e" not in classify_regions(ParamsPQ(p_on * 1.001, q)).flags


# ---------------------------------------------------------------------------
# invariant-surface grid
# ---------------------------------------------------------------------------


def test_g_grid_minimum_near_benchmark_equilibrium():
    res = 201
    rows = g_grid(2.0, (0.5, 5.0, 0.5, 5.0), res)
    assert len(rows) == res * res
    x_min, y_min, g_min = min(rows, key=lambda r: r[2])
    # the benchmark equilibrium (2, 2) has g = 13.5; the grid minimum sits
    # at the nearest lattice point
    assert abs(x_min - 2.0) <= 4.5 / (res - 1)
    assert x_min == y_min
    assert 13.5 < g_min < 13.5 + 1e-2
    assert all(g > 13.5 for _, _, g in rows)


def test_g_grid_symmetry():
    res = 41
    rows = g_grid(2.0, (0.5, 5.0, 0.5, 5.0), res)
    value = {(x, y): g for x, y, g in rows}
    for (x, y), g in value.items():
        # symmetric up to the non-associativity of float addition
        assert abs(value[(y, x)] - g) <= 1e-14 * abs(g)


def test_g_grid_validation():
    with pytest.raises(ValueError, match="strictly positive"):
        g_grid(2.0, (0.0, 1.0, 0.5, 1.0), 11)
    with pytest.raises(ValueError, match="xmin < xmax"):
        g_grid(2.0, (1.0, 1.0, 0.5, 1.0), 11)
    with pytest.raises(ValueError, match="resolution"):
        g_grid(2.0, (0.5, 1.0, 0.5, 1.0), 1)
    with pytest.raises(ValueError, match="alpha_tilde"):
        g_grid(0.0, (0.5, 1.0, 0.5, 1.0), 11)


def test_grid_csv_format():
    rows = g_grid(2.0, (1.0, 2.0, 1.0, 2.0), 3)
    buf = io.StringIO()
    grid_to_csv(rows, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "x,y,g"
    assert len(lines) == 10
    x, y, g = (float(tok) for tok in lines[1].split(","))
    assert (x, y) == (1.0, 1.0)
    assert abs(g - 16.0) < 1e-12


# ---------------------------------------------------------------------------
# sampling helper
# ---------------------------------------------------------------------------


def test_random_instances_respect_constraints():
    rng = random.Random(7)
    inst = random_instances(rng, 100, 2)
    assert len(inst) == 200
    for params, seed in inst:
        assert params.q < params.p
        assert 1e-2 <= params.p <= 1e3 and 1e-2 <= params.q <= 1e3
        assert 1e-2 <= seed[0] <= 1e2 and 1e-2 <= seed[1] <= 1e2


def test_random_instances_deterministic_per_seed():
    a = random_instances(random.Random(3), 5, 2)
    b = random_instances(random.Random(3), 5, 2)
    assert a == b
