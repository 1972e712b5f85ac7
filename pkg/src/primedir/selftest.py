"""Fast self-contained oracle checks, one per derived identity in the package.

Each check recomputes an expected value by an independent route (brute force,
direct summation, enumeration, an alternative algorithm) and compares.  The
CLI ``selftest`` command runs them all and reports PASS/FAIL per check; the
pytest suite covers the same ground at larger sizes.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from . import arith, bumps, directions, incidence, maximal, multiplier


def _check_arith_identities():
    for q in range(1, 2001):
        divisors = [d for d in range(1, q + 1) if q % d == 0]
        assert sum(arith.mobius(d) for d in divisors) == (1 if q == 1 else 0), q
        assert sum(arith.totient(d) for d in divisors) == q, q


def _check_ramanujan_cross_validation():
    for q in range(1, 61):
        for n in range(-30, 31):
            closed = arith.ramanujan_sum(q, n)
            brute = arith.ramanujan_sum_bruteforce(q, n)
            assert abs(closed - brute) < 1e-9, (q, n, closed, brute)


def _check_full_exponential_sum():
    for q in range(1, 51):
        for n in range(-20, 21):
            direct = sum(cmath.exp(2j * cmath.pi * n * a / q) for a in range(1, q + 1))
            sym = arith.full_exponential_sum(q, n)
            assert abs(direct - sym) < 1e-9, (q, n)


def _check_farey_cardinalities():
    for s in range(0, 7):
        level = arith.farey_level(s)
        if s == 0:
            assert level.fractions == [arith.ReducedFraction(0, 1)]
        else:
            expect = sum(arith.totient(q) for q in range(1 << s, 1 << (s + 1)))
            assert len(level.fractions) == expect, s


def _check_bumps():
    c = bumps.DEFAULT_BUMP.normalization
    assert bumps.eval_phi(0.5) == 0.0
    assert abs(bumps.eval_phi(1.5) - c * math.exp(-1)) < 1e-14
    assert bumps.eval_chi(0.0) == 1.0 and bumps.eval_chi(0.6) == 0.0
    assert abs(bumps.eval_chi(0.375) - 0.5) < 1e-14
    assert bumps.chi_s(0, 0.0) == 1.0
    assert bumps.chi_s(0, 2.0**-42) == 1.0  # plateau boundary
    assert bumps.chi_s(2, 1.0) == 0.0
    assert abs(bumps.v_k(12, 0.0) - 1.0) < 1e-12
    a = bumps.v_k(10, 2.0**-5)
    b = bumps.v_k(10, -(2.0**-5))
    assert abs(a - b.conjugate()) < 1e-13


def _check_vk_decay():
    l1_d1, _ = bumps.phi_deriv_l1()
    C = l1_d1 / (2 * math.pi) + 0.5
    for X in (1.0, 10.0, 100.0, 1000.0):
        val = abs(bumps.v_k(0, X))
        assert val <= C / X + 1e-12, (X, val)


def _check_multiplier_pnt(table):
    m0 = multiplier.m_k(12, Fraction(0), table)
    assert abs(m0 - 1) < 0.1, m0
    mh = multiplier.m_k(12, Fraction(1, 2), table)
    assert abs(mh + m0) < 1e-12, mh  # exactly -m_k(0) once p = 2 has left the window
    mt = multiplier.m_k(12, Fraction(1, 3), table)
    assert abs(mt + 0.5) < 0.1, mt
    assert abs(multiplier.L_k(12, Fraction(1, 3)) + 0.5) < 1e-10


def _check_folded_grid(table):
    g = multiplier.m_k_grid(12, 256, table)
    n = multiplier.m_k_naive_grid(12, 256, table)
    assert np.abs(g - n).max() < 1e-9


def _check_downsampled():
    cs = multiplier.downsampled_coefficients(6, 0, 4, range(-512, 129), chi_scale_log2=6)
    assert abs(cs.sum() - 1.0) < 2e-2, cs.sum()
    assert np.abs(cs).sum() < 10.0


def _check_construction():
    for N in (4, 8):
        spec = directions.DirectionSpec(N=N, eps=0.5, seed=7)
        ds = directions.rescale_to_integers(directions.construct_directions(spec))
        directions.validate_direction_set(ds)
        blob = directions.serialize(ds)
        again = directions.rescale_to_integers(directions.construct_directions(spec))
        assert directions.serialize(again) == blob, "determinism"
        assert directions.serialize(directions.deserialize(blob)) == blob, "round trip"


def _check_incidence():
    F = Fraction
    f1 = incidence.TubeFamily(v=(F(1), F(0)), r=2, s=1, C1=8, torus_side=1)
    f2 = incidence.TubeFamily(v=(F(0), F(1)), r=3, s=1, C1=8, torus_side=1)
    win = incidence.default_window("k")
    pts = incidence.candidate_intersections(f1, f2, win)
    assert (F(0), F(0)) in pts and all(
        incidence.tube_membership(p, f1) and incidence.tube_membership(p, f2) for p in pts
    )
    rep = incidence.max_overlap_scan([f1, f2], win)
    assert rep.max_overlap == 2 and incidence.replay_witness(rep, [f1, f2]) == 2
    spec = directions.DirectionSpec(N=4, eps=1.0, seed=7)
    ds = directions.rescale_to_integers(directions.construct_directions(spec))
    fams = incidence.families_from_direction_set(ds, s=2)
    win2 = incidence.default_window("ktilde")
    rep2 = incidence.max_overlap_scan(fams, win2)
    base = incidence.parallel_baseline(
        (ds.vectors[0].v.x, ds.vectors[0].v.y), 4, s=2, C1=fams[0].C1
    )
    repb = incidence.max_overlap_scan(base, win2)
    assert 1 <= rep2.max_overlap < repb.max_overlap == 4


def _check_operator(table):
    cfg = maximal.OperatorConfig(
        directions=((1, 0), (0, 1), (1, 1), (2, 1)), k_min=5, k_max=6, table=table
    )
    rng = np.random.default_rng(0)
    f = maximal.GridFunction.random(64, rng)
    for v in cfg.directions:
        a = maximal.average_along(f, v, 6, cfg)
        b = maximal.spectral_average(f, v, 6, cfg)
        rel = np.linalg.norm(a.values - b.values) / np.linalg.norm(a.values)
        assert rel < 1e-8, rel
    L = 512
    assert maximal.delta_spread_disjoint(cfg, L)
    measured = maximal.maximal_op(maximal.GridFunction.delta(L), cfg, method="spatial").norm2()
    closed = maximal.delta_spread_value(cfg)
    assert abs(measured - closed) <= 1e-10 * closed, (measured, closed)
    rep = maximal.transference_check(cfg, L=16, trials=10, seed=1)
    assert rep.max_off_line_leak == 0.0
    assert rep.max_norm_rel_err <= 1e-10


def run_all(verbose: bool = True) -> bool:
    """Run every oracle; print one PASS/FAIL line each; True when all pass."""
    table = arith.sieve_primes(2**13)
    checks = [
        ("mobius/totient divisor sums", _check_arith_identities),
        ("ramanujan closed form vs brute force", _check_ramanujan_cross_validation),
        ("full exponential sum vs direct summation", _check_full_exponential_sum),
        ("farey level cardinalities", _check_farey_cardinalities),
        ("bump and cutoff exact values", _check_bumps),
        ("oscillatory profile decay bound", _check_vk_decay),
        ("multiplier PNT consistency", lambda: _check_multiplier_pnt(table)),
        ("folded DFT vs naive grid", lambda: _check_folded_grid(table)),
        ("downsampled coefficient mass", _check_downsampled),
        ("direction construction, determinism, round trip", _check_construction),
        ("tube membership and overlap scans", _check_incidence),
        ("operator identities and transference", lambda: _check_operator(table)),
    ]
    ok = True
    for name, fn in checks:
        try:
            fn()
            status = "PASS"
        except Exception as exc:  # noqa: BLE001 - report and continue
            status = f"FAIL ({exc})"
            ok = False
        if verbose:
            print(f"[{status.split()[0]:4}] {name}" + ("" if status == "PASS" else f": {status}"))
    return ok
