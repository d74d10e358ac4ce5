"""Acceptance gate: one pass/fail line per criterion, tolerances pinned.

Criterion 2's bound-state count (and its smallest-level bracket at omega=40)
is asserted exactly as stated and is expected RED: the stated count uses the
whole-line quantization, while the half-line Dirichlet operator binds only
the odd-parity levels (about half as many).  The analysis lives in the
decisions ledger; the same run prints the semiclassical reproduction that
does hold.
"""
import math
import time

import mpmath as mp
import numpy as np
import pytest

from slspec import (SolverOptions, calogero_bounds, characteristic_values,
                    coercivity_check, convergence_report, eigenvalues,
                    forward, jost_identity_check, lax_levermore, logdet_d2,
                    phi_diag_derivative, reconstruct_gl0, reconstruct_glm,
                    solve_kernel, squarewell_oracle, vitushkin_c_inf,
                    vitushkin_c_l1, wkb_spectrum)
from slspec.forward import SpectralData
from slspec.reconstruct import build_W


def _report(name: str, ok: bool, detail: str = ""):
    tag = "PASS" if ok else "FAIL"
    print(f"[criterion {name}] {tag} {detail}")
    return ok


@pytest.fixture(scope="module")
def q1_sweep(q1):
    out = {}
    for om in (10.0, 20.0, 40.0, 80.0):
        t0 = time.time()
        out[om] = forward(q1, om)
        print(f"  forward(q1, {om:g}): N={out[om].count} [{time.time()-t0:.1f}s]")
    return out


def test_criterion_1_squarewell_oracle_equivalence(sw):
    t0 = time.time()
    ok = True
    detail = []
    for om in (5.0, 10.0, 20.0):
        # phase guard |omega - pi/2 + pi Z| >= 1/5 holds at these omegas
        guard = abs((om - math.pi / 2) % math.pi)
        guard = min(guard, math.pi - guard)
        assert guard >= 0.2
        orc = squarewell_oracle(om)
        xi = eigenvalues(sw, om)
        counts = len(xi) == orc.count
        dxi = float(np.max(np.abs(xi - orc.xi))) if counts else math.inf
        C = characteristic_values(sw, om, xi)
        dC = float(np.max(np.abs(C - orc.C) / orc.C)) if counts else math.inf
        ok &= counts and dxi < 1e-8 and dC < 1e-6
        detail.append(f"om={om:g}: N={orc.count} |dxi|={dxi:.1e} relC={dC:.1e}")
    elapsed = time.time() - t0
    _report("1 square-well oracle", ok, "; ".join(detail) + f" [{elapsed:.1f}s]")
    assert ok
    assert elapsed <= 10.0


def test_criterion_2a_count_as_stated(q1, q1_sweep):
    # N(omega) = [omega] within +-1 -- asserted exactly as stated.
    counts = {om: q1_sweep[om].count for om in (10.0, 20.0, 40.0)}
    stated_ok = all(abs(counts[om] - int(om)) <= 1 for om in counts)
    wkb_pred = {om: wkb_spectrum(q1, om).predicted_count for om in counts}
    _report(
        "2a count = [omega] +- 1 (as stated)", stated_ok,
        f"true counts {counts} vs stated {[int(o) for o in counts]}; the "
        f"whole-line semiclassical count {wkb_pred} does reproduce [omega] "
        "(see decisions ledger: only odd-parity levels are Dirichlet states)")
    assert stated_ok, (
        "the operator's count is about [omega/2]: the stated [omega] counts "
        "both parities of the even extension (ledger entry: example-1 count)")


def test_criterion_2b_eta_bracket_as_stated(q1_sweep):
    ok = True
    detail = []
    for om in (10.0, 20.0, 40.0):
        eta_n = q1_sweep[om].xi[0] / om
        lo = math.pi**2 / (256 * om * om)
        hi = math.pi**2 / (16 * om * om)
        inside = lo <= eta_n <= hi
        ok &= inside
        detail.append(f"om={om:g}: eta_N={eta_n:.3e} in [{lo:.3e},{hi:.3e}]={inside}")
    _report("2b eta_N bracket (as stated)", ok, "; ".join(detail))
    assert ok, (
        "the weakest true level leaves the omega^-2 bracket as omega grows "
        "(measured eta_N ~ omega^-3; ledger entry: example-1 bracket)")


def test_criterion_2c_gaps_and_characteristic_bracket(q1_sweep):
    t0 = time.time()
    ok = True
    detail = []
    for om in (10.0, 20.0, 40.0):
        sd = q1_sweep[om]
        gap_ok = bool(np.min(np.diff(sd.xi)) >= 1.0 / (5.0 * om))
        r = 4.0 * sd.xi**2 / sd.C
        lo = -math.log(45.0) - 9 * math.log(om) - 26.0 * om * om
        hi = math.log(22.0) + 2 * math.log(om) + 15.0 * om * om
        br_ok = bool(np.all((np.log(r) >= lo) & (np.log(r) <= hi)))
        ok &= gap_ok and br_ok
        detail.append(f"om={om:g}: gap>=1/(5om)={gap_ok} ratio-bracket={br_ok}")
    _report("2c gap floor + characteristic bracket", ok,
            "; ".join(detail) + f" [{time.time()-t0:.1f}s]")
    assert ok


def test_criterion_3_jost_identity(q1, q1_sweep):
    t0 = time.time()
    sd = q1_sweep[10.0]
    median = (sd.count + 1) // 2           # the middle state (j = 3 of 5)
    mids = [median, min(median + 1, sd.count)]
    res = []
    for j in mids:
        rep = jost_identity_check(q1, 10.0, j, sd=sd)
        res.append(rep.residual)
    ok = all(r <= 1e-3 for r in res)
    elapsed = time.time() - t0
    _report("3 Jost identity", ok,
            f"residuals at j={mids}: {['%.2e' % r for r in res]} [{elapsed:.1f}s]")
    assert ok
    assert elapsed <= 60.0


def test_criterion_4_kernel_correctness():
    t0 = time.time()
    ok = True
    detail = []
    for w in (1.0, 4.0, 1 + 5j):
        kf = solve_kernel(2.0, w, n=128)
        r_ok = kf.residual <= 1e-6
        d_ok = abs(phi_diag_derivative(0.0, w) - w / 2.0) <= 1e-8 * max(1.0, abs(w))
        ok &= r_ok and d_ok
        detail.append(f"w={w}: residual={kf.residual:.1e}")
    c1 = coercivity_check(2.0, 1.0, trials=100)
    c2 = coercivity_check(2.0, 1 + 5j, trials=100)
    ok &= c1 >= 0.999 and c2 >= 0.999
    d = 1e-3
    w0 = 1 + 1j

    def sample(w):
        return solve_kernel(1.0, w, n=32).A[20][10]

    du = (sample(w0 + d) - sample(w0 - d)) / (2 * d)
    dv = (sample(w0 + 1j * d) - sample(w0 - 1j * d)) / (2 * d)
    cr = abs(du + 1j * dv)
    ok &= cr <= 1e-4
    elapsed = time.time() - t0
    _report("4 kernel correctness", ok,
            "; ".join(detail) + f"; coercivity=({c1:.4f},{c2:.4f}) CR={cr:.1e} "
            f"[{elapsed:.1f}s]")
    assert ok
    assert elapsed <= 120.0


def test_criterion_5_gl0_round_trip_rate(q1, q1_sweep):
    t0 = time.time()
    grid = np.linspace(0.0, 2.0, 81)
    errs = []
    for om in (10.0, 20.0, 40.0, 80.0):
        res = reconstruct_gl0(q1_sweep[om], grid, ref=q1)
        errs.append((om, res.sup_error_int))
    decreasing = all(b[1] < a[1] for a, b in zip(errs[:-1], errs[1:]))
    rep = convergence_report(errs, "gl0_rate")
    conj = convergence_report(errs, "glm_rate")  # pure power, informational
    ok = decreasing and rep.fitted_exponent >= 0.5
    elapsed = time.time() - t0
    _report("5 gl0 round-trip rate", ok,
            f"sup|dInt| {['%.4f' % e for _, e in errs]} decreasing={decreasing} "
            f"exponent(log removed)={rep.fitted_exponent:.2f} (>=0.5); "
            f"pure-power exponent {conj.fitted_exponent:.2f} vs conjectured 3 "
            f"(reported, not asserted) [{elapsed:.1f}s]")
    assert ok
    assert elapsed <= 600.0


def test_criterion_6_glm_beats_gl0_on_class_member(q4):
    t0 = time.time()
    sd = forward(q4, 20.0)
    grid = np.linspace(0.0, 2.0, 81)
    r0 = reconstruct_gl0(sd, grid, ref=q4)
    rm = reconstruct_glm(sd, grid, ref=q4)
    ordering = (rm.sup_error < r0.sup_error) and (rm.sup_error_int < r0.sup_error_int)
    origin = abs(rm.Q_rec[0] - sd.q0) <= 1e-4
    ok = ordering and origin
    elapsed = time.time() - t0
    _report("6 glm beats gl0 + origin identity", ok,
            f"glm supQ={rm.sup_error:.2e} < gl0 supQ={r0.sup_error:.2e}; "
            f"glm supInt={rm.sup_error_int:.2e} < gl0 supInt={r0.sup_error_int:.2e}; "
            f"|Q(0)-q0|={abs(rm.Q_rec[0]-sd.q0):.1e} [{elapsed:.1f}s]")
    assert ok
    assert elapsed <= 600.0


def test_criterion_7_determinant_machinery():
    t0 = time.time()
    # scaled log-determinant against 60-digit direct evaluation, xi x <= 20
    xi = [0.7, 1.9, 4.0]
    C = [2.0, 5.0, 9.0]
    sd = SpectralData(omega=5.0, xi=np.array(xi), C=np.array(C), q0=1.0)
    worst = 0.0
    for x in (1.0, 3.0, 5.0):
        sign, ld = build_W(x, sd).slogdet()
        with mp.workdps(60):
            W = mp.zeros(3)
            for s in range(3):
                for r in range(3):
                    a = mp.mpf(xi[s]) + xi[r]
                    v = 2 * mp.sinh(a * x) / a
                    if s != r:
                        d = mp.mpf(xi[s]) - xi[r]
                        v -= 2 * mp.sinh(d * x) / d
                    else:
                        v -= 2 * x - 4 * mp.mpf(xi[r]) ** 2 / C[r]
                    W[s, r] = v
            ref = float(mp.log(abs(mp.det(W))))
        worst = max(worst, abs(ld - ref) / abs(ref))
    scaled_ok = worst <= 1e-9

    rng = np.random.default_rng(3)
    fd_worst = 0.0
    for _ in range(4):
        B = rng.standard_normal((4, 4))
        S = B @ B.T + 4 * np.eye(4)
        D = rng.standard_normal((4, 4))
        D = 0.5 * (D + D.T)
        E = rng.standard_normal((4, 4))
        E = 0.5 * (E + E.T)
        h = 1e-3
        with mp.workdps(40):
            lds = [float(mp.log(abs(mp.det(mp.matrix((S + t * D + 0.5 * t * t * E).tolist())))))
                   for t in (-h, 0.0, h)]
        fd2 = (lds[2] - 2 * lds[1] + lds[0]) / (h * h)
        fd_worst = max(fd_worst, abs(logdet_d2(S, D, E) - fd2))
    trace_ok = fd_worst <= 1e-5

    eta, c, eps = 1.3, 0.8, 0.25
    g = np.linspace(0.0, 3.0, 61)
    res = lax_levermore([eta], [c], eps, g)

    def scal(x):
        return math.log(1 + eps * c * c * math.exp(-2 * eta * x / eps) / (2 * eta))

    h = 1e-4
    ll_worst = max(abs(-q - (-2 * eps * eps
                             * (scal(x + h) - 2 * scal(x) + scal(x - h)) / h**2))
                   for x, q in zip(g, res.Q_rec))
    ll_ok = ll_worst <= 1e-6
    ok = scaled_ok and trace_ok and ll_ok
    elapsed = time.time() - t0
    _report("7 determinant machinery", ok,
            f"scaled-det rel={worst:.1e} (<=1e-9); trace-vs-FD={fd_worst:.1e} "
            f"(<=1e-5); one-soliton={ll_worst:.1e} (<=1e-6) [{elapsed:.1f}s]")
    assert ok
    assert elapsed <= 30.0


def test_criterion_8_constants():
    t0 = time.time()
    worst = 0.0
    for (l, s) in ((2.0, 1), (2.0, 2), (1.5, 1), (3.0, 2), (4.0, 1)):
        with mp.workdps(50):
            m1 = int(mp.ceil(l))
            ref_inf = 1 / (mp.sqrt(s) * mp.mpf(2) ** (l + 1)
                           * mp.mpf(8) ** (mp.mpf(l) / s) * mp.mpf(m1) ** m1
                           * (4 * (1 + mp.e)) ** (s * m1))
            m = m1 - 1
            ref_l1 = (mp.factorial(m1) ** (2 * s)
                      / (5 * mp.sqrt(s) * mp.mpf(2) ** (l + 2)
                         * mp.mpf(18) ** (mp.mpf(l) / s) * mp.mpf(m1) ** m1
                         * mp.factorial(2 * m + 3) ** s * (1 + mp.e) ** (s * m1)))
        worst = max(worst,
                    abs(vitushkin_c_inf(l, s) - float(ref_inf)) / float(ref_inf),
                    abs(vitushkin_c_l1(l, s) - float(ref_l1)) / float(ref_l1))
    quarter = all(2.0 ** l * vitushkin_c_inf(float(l), 1) <= 0.25
                  for l in np.arange(1.0, 6.0 + 1e-9, 0.1))
    ok = worst <= 1e-12 and quarter
    elapsed = time.time() - t0
    _report("8 constants", ok,
            f"worst rel dev={worst:.1e} (<=1e-12); 2^l C_inf <= 1/4: {quarter} "
            f"[{elapsed:.2f}s]")
    assert ok
    assert elapsed <= 1.0
