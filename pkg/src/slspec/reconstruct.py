"""Inverse maps: determinant and kernel-plus-determinant reconstructions.

Both reconstruction formulas difference exponentially large sinh-family
matrices, so every matrix family is built with the symmetric row/column
factor exp(xi_j x) removed analytically.  Because the same factor scales a
matrix and its analytic x-derivatives, the trace identities

    d/dx  ln|det M| = tr(M^-1 M'),
    d2/dx2 ln|det M| = tr(M^-1 M'') - tr((M^-1 M')^2)

hold verbatim on the scaled entries (the extracted log-scale is linear in x
and drops out of the second derivative; for the primitive the baseline at
x = 0 cancels it exactly since M'(0) = 0 for these families).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .forward import SpectralData
from .glkernel import KernelField
from .potentials import Potential, eval_potential
from .quadrature import gauss_rule


class ReconstructError(RuntimeError):
    pass


class SingularFamilyError(ReconstructError):
    """det crossed zero (or the solve is hopelessly conditioned) at a node."""


@dataclass
class ScaledMatrix:
    """Matrix with per-entry factor exp((xi_row + xi_col) x) removed.

    log|det original| = log|det entries| + log_scale.
    """
    entries: np.ndarray
    log_scale: float

    def slogdet(self) -> tuple:
        sign, ld = np.linalg.slogdet(self.entries)
        return sign, ld + self.log_scale


@dataclass
class ReconstructionResult:
    grid: np.ndarray
    Q_rec: np.ndarray
    Q_int: np.ndarray
    method: str
    sup_error: Optional[float] = None
    L1_error: Optional[float] = None
    sup_error_int: Optional[float] = None
    L1_error_int: Optional[float] = None
    flags: np.ndarray = field(default=None)
    Q_ref: np.ndarray = field(default=None)
    Q_int_ref: np.ndarray = field(default=None)


def _check_spectral(sd: SpectralData) -> None:
    if sd.count and np.any(np.diff(sd.xi) <= 0):
        raise ReconstructError("xi must be strictly increasing (repeated "
                               "values make the difference term singular)")
    if sd.count and np.any(sd.C <= 0):
        raise ReconstructError("characteristic values must be positive")


def _exp_diff(xi: np.ndarray, x: float) -> np.ndarray:
    """(exp(-2 xi_r x) - exp(-2 xi_s x)) / (xi_s - xi_r), entrywise,
    with the analytic diagonal limit 2x exp(-2 xi x)."""
    n = len(xi)
    d = xi[:, None] - xi[None, :]          # d[s, r] = xi_s - xi_r
    er = np.exp(-2.0 * xi * x)             # e^{-2 xi_r x}
    with np.errstate(divide="ignore", invalid="ignore"):
        out = er[None, :] * -np.expm1(-2.0 * d * x) / d
    idx = np.arange(n)
    out[idx, idx] = 2.0 * x * er
    return out


def build_W(x: float, sd: SpectralData) -> ScaledMatrix:
    """Scaled Gelfand-Levitan matrix W_{s,r}(x).

    W = 2 sh((xi_s+xi_r)x)/(xi_s+xi_r) - (1-delta) 2 sh((xi_s-xi_r)x)/(xi_s-xi_r)
        - delta (2x - 4 xi_r^2/C_r),
    returned with the factor exp((xi_s+xi_r)x) removed entrywise.
    """
    if x < 0:
        raise ReconstructError("x must be >= 0")
    _check_spectral(sd)
    xi = sd.xi
    n = sd.count
    if n == 0:
        return ScaledMatrix(np.empty((0, 0)), 0.0)
    sig = xi[:, None] + xi[None, :]
    sm = ScaledMatrix(np.empty((n, n)), 2.0 * x * float(xi.sum()))
    W = -np.expm1(-2.0 * sig * x) / sig - _exp_diff(xi, x)
    idx = np.arange(n)
    W[idx, idx] = (-np.expm1(-4.0 * xi * x) / (2.0 * xi)
                   - (2.0 * x - 4.0 * xi**2 / sd.C) * np.exp(-2.0 * xi * x))
    sm.entries = W
    return sm


def build_W_derivatives(x: float, sd: SpectralData) -> tuple:
    """Analytic W'(x), W''(x) entries under the same scaling as build_W."""
    xi = sd.xi
    n = sd.count
    if n == 0:
        e = np.empty((0, 0))
        return e, e
    sig = xi[:, None] + xi[None, :]
    er = np.exp(-2.0 * xi * x)
    esig = np.exp(-2.0 * sig * x)
    W1 = (1.0 + esig) - (er[None, :] + er[:, None])
    idx = np.arange(n)
    W1[idx, idx] = (1.0 - er) ** 2
    dif = xi[:, None] - xi[None, :]
    W2 = sig * (1.0 - esig) - dif * (er[None, :] - er[:, None])
    W2[idx, idx] = 2.0 * xi * -np.expm1(-4.0 * xi * x)
    return W1, W2


def _equilibrated(M: np.ndarray, others: tuple) -> tuple:
    """Symmetric diagonal equilibration D^-1/2 (.) D^-1/2 shared by the whole
    family; similarity-invariant traces are unchanged, conditioning is not."""
    d = np.sqrt(np.abs(np.diag(M)))
    d[d == 0] = 1.0
    inv = 1.0 / d
    scale = inv[:, None] * inv[None, :]
    return M * scale, tuple(o * scale for o in others)


def logdet_d1(M: np.ndarray, M1: np.ndarray) -> float:
    """tr(M^-1 M'): first derivative of ln|det| for an analytic family."""
    if M.shape[0] == 0:
        return 0.0
    Me, (M1e,) = _equilibrated(M, (M1,))
    lu = lu_factor(Me)
    return float(np.real(np.trace(lu_solve(lu, M1e))))


def logdet_d2(M: np.ndarray, M1: np.ndarray, M2: np.ndarray,
              cond_limit: float = 1e13) -> float:
    """d2/dx2 ln|det M| = tr(M^-1 M'') - tr((M^-1 M')^2).

    M, M', M'' are the analytic entrywise derivatives of the family (any
    common symmetric exponential scaling cancels in the traces, and the
    diagonal equilibration applied here is a similarity as well).
    """
    if M.shape[0] == 0:
        return 0.0
    Me, (M1e, M2e) = _equilibrated(M, (M1, M2))
    sign, _ = np.linalg.slogdet(Me)
    if sign <= 0 or np.linalg.cond(Me) > cond_limit:
        raise SingularFamilyError(
            "matrix family is singular (or sign-crossing) at this node")
    lu = lu_factor(Me)
    X1 = lu_solve(lu, M1e)
    X2 = lu_solve(lu, M2e)
    return float(np.real(np.trace(X2) - np.trace(X1 @ X1)))


def _quad_form_derivatives(M: np.ndarray, v: np.ndarray, v1: np.ndarray) -> tuple:
    """(d/dx, d2/dx2) of ln|det| for families whose derivative is the rank-one
    4 v v^T (both sinh families here are):  d1 = 4 v^T M^-1 v and
    d2 = 8 v1^T M^-1 v - 16 (v^T M^-1 v)^2."""
    z = np.linalg.solve(M, v)
    q0 = float(v @ z)
    q1 = float(v1 @ z)
    return 4.0 * q0, 8.0 * q1 - 16.0 * q0 * q0


def _mp_quad_form(build_entries, n: int, dps: int) -> tuple:
    """Same quadratic forms in arbitrary precision.

    build_entries(mp) must return (W, v, v1) as mpmath matrices.  The sinh
    Gramian inside these families has conditioning growing like e^(cN), far
    past float64 for N over ~15, which no rescaling can repair; the digit
    count scales with N instead.
    """
    import mpmath as mp
    with mp.workdps(dps):
        W, v, v1 = build_entries(mp)
        z = mp.lu_solve(W, v)
        q0 = sum(v[i] * z[i] for i in range(n))
        q1 = sum(v1[i] * z[i] for i in range(n))
        return float(4 * q0), float(8 * q1 - 16 * q0 ** 2)


_COND_FLOAT64 = 1e8


def _gl0_node(sd: SpectralData, x: float) -> tuple:
    """(d1, d2) of ln|det W| at x, escalating precision with conditioning."""
    xi = sd.xi
    n = sd.count
    W = build_W(x, sd).entries
    vh = 0.5 * -np.expm1(-2.0 * xi * x)
    v1h = 0.5 * xi * (1.0 + np.exp(-2.0 * xi * x))
    Me, _ = _equilibrated(W, ())
    if np.linalg.cond(Me) < _COND_FLOAT64:
        sign, _ld = np.linalg.slogdet(Me)
        if sign <= 0:
            raise SingularFamilyError("det W crossed zero at this node")
        return _quad_form_derivatives(W, vh, v1h)

    def build(mp):
        xx = mp.mpf(x)
        xim = [mp.mpf(float(t)) for t in xi]
        Cm = [mp.mpf(float(t)) for t in sd.C]
        Wm = mp.zeros(n)
        for s in range(n):
            for r in range(n):
                a = xim[s] + xim[r]
                val = -mp.expm1(-2 * a * xx) / a
                if s != r:
                    d = xim[s] - xim[r]
                    val -= mp.exp(-2 * xim[r] * xx) * -mp.expm1(-2 * d * xx) / d
                else:
                    val -= (2 * xx - 4 * xim[s] ** 2 / Cm[s]) * mp.exp(-2 * xim[s] * xx)
                Wm[s, r] = val
        v = mp.matrix([-mp.expm1(-2 * xim[j] * xx) / 2 for j in range(n)])
        v1 = mp.matrix([xim[j] * (1 + mp.exp(-2 * xim[j] * xx)) / 2 for j in range(n)])
        return Wm, v, v1

    dps = max(50, 30 + int(2.6 * n))
    try:
        d1, d2 = _mp_quad_form(build, n, dps)
    except ZeroDivisionError as exc:
        raise SingularFamilyError("det W numerically singular at this node") from exc
    if d1 < 0:
        # ln|det W| is nondecreasing for genuine data (W' = 4 v v^T is PSD);
        # a negative derivative means the family degenerated
        raise SingularFamilyError("determinant family lost positivity")
    return d1, d2


def _reference_curves(ref: Potential, grid: np.ndarray) -> tuple:
    """Q_ref on the grid and its cumulative integral (per-interval Gauss)."""
    q = eval_potential(ref, grid, 0)
    gx, gw = gauss_rule(16)
    qint = np.zeros_like(grid)
    for i in range(1, len(grid)):
        a, b = grid[i - 1], grid[i]
        t = 0.5 * (a + b) + 0.5 * (b - a) * gx
        qint[i] = qint[i - 1] + 0.5 * (b - a) * float(
            np.dot(gw, eval_potential(ref, t, 0)))
    return q, qint


def _interpolate_flagged(res: ReconstructionResult) -> ReconstructionResult:
    """Linear fill of Q_rec/Q_int across flagged nodes (opt-in)."""
    bad = res.flags
    if bad.any() and (~bad).sum() >= 2:
        ok = ~bad
        res.Q_rec[bad] = np.interp(res.grid[bad], res.grid[ok], res.Q_rec[ok])
        res.Q_int[bad] = np.interp(res.grid[bad], res.grid[ok], res.Q_int[ok])
    return res


def _attach_errors(res: ReconstructionResult, ref: Optional[Potential]) -> ReconstructionResult:
    if ref is None:
        return res
    q_ref, qint_ref = _reference_curves(ref, res.grid)
    ok = ~res.flags
    res.Q_ref = q_ref
    res.Q_int_ref = qint_ref
    res.sup_error = float(np.max(np.abs(res.Q_rec - q_ref)[ok]))
    res.L1_error = float(np.trapezoid(np.abs(res.Q_rec - q_ref) * ok, res.grid))
    res.sup_error_int = float(np.max(np.abs(res.Q_int - qint_ref)[ok]))
    res.L1_error_int = float(np.trapezoid(np.abs(res.Q_int - qint_ref) * ok, res.grid))
    return res


def reconstruct_gl0(sd: SpectralData, grid: Sequence,
                    ref: Optional[Potential] = None,
                    interpolate_flagged: bool = False) -> ReconstructionResult:
    """Determinant-only reconstruction from the discrete data:

        Q0(x) = (2/omega^2) d2/dx2 ln|det W(x)|,

    plus its analytic primitive (2/omega^2) tr(W^-1 W') (zero baseline,
    since W'(0) = 0).  Nodes where the family degenerates are flagged, not
    interpolated.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ReconstructError("grid must be strictly increasing")
    _check_spectral(sd)
    om2 = sd.omega ** 2
    q = np.zeros_like(grid)
    qint = np.zeros_like(grid)
    flags = np.zeros(len(grid), dtype=bool)
    if sd.count:
        for i, x in enumerate(grid):
            try:
                d1, d2 = _gl0_node(sd, x)
                q[i] = (2.0 / om2) * d2
                qint[i] = (2.0 / om2) * d1
            except SingularFamilyError:
                flags[i] = True
    res = ReconstructionResult(grid=grid, Q_rec=q, Q_int=qint, method="gl0",
                               flags=flags)
    if interpolate_flagged:
        res = _interpolate_flagged(res)
    return _attach_errors(res, ref)


# ----------------------------------------------------------------------
# kernel-corrected reconstruction

def _scaled_transformed_sinh(sd: SpectralData, kf: KernelField) -> tuple:
    """Kernel-corrected sinh data at every kernel node, scaled by e^{-xi t}:

    I_j(t)  = int_0^t A(t,s) sh(xi_j s) ds            (the A-correction),
    F_j(t)  = sh(xi_j t) + I_j(t)                     (transformed solution),
    F_j'(t) = xi ch(xi t) + A(t,t) sh(xi t) + int_0^t dA/dx(t,s) sh(xi_j s) ds.

    Returns (Ih, Fh, F1h).  Keeping I separate lets the T assembly use the
    exact closed form for the pure-sinh Gram block (which is W itself) so
    only the A-corrections are quadratures.
    """
    xi = sd.xi
    nodes = kf.grid
    n = kf.n
    N = len(xi)
    Ih = np.zeros((N, n + 1))
    Fh = np.zeros((N, n + 1))
    F1h = np.zeros((N, n + 1))
    for i, t in enumerate(nodes):
        wt = kf.slice_weights(i)
        ys = nodes[: i + 1]
        a = np.real(kf.A[i])
        b = np.real(kf.dA_dx[i])
        # sh(xi y) e^{-xi t} = (e^{-xi(t-y)} - e^{-xi(t+y)})/2, all decaying
        sh_sc = 0.5 * (np.exp(-xi[:, None] * (t - ys[None, :]))
                       - np.exp(-xi[:, None] * (t + ys[None, :])))
        Ih[:, i] = sh_sc @ (wt * a)
        Fh[:, i] = -0.5 * np.expm1(-2.0 * xi * t) + Ih[:, i]
        ch_sc = 0.5 * xi * (1.0 + np.exp(-2.0 * xi * t))
        F1h[:, i] = (ch_sc + np.real(kf.diag[i]) * -0.5 * np.expm1(-2.0 * xi * t)
                     + sh_sc @ (wt * b))
    return Ih, Fh, F1h


def _t_matrix_at(sd: SpectralData, kf: KernelField, i: int,
                 cache: tuple) -> np.ndarray:
    """Scaled T at kernel node i: exact W part plus the A-cross quadratures.

    T = diag(4 xi^2/C) + 4 int (sh+I)(sh+I)^T; the diagonal and the pure
    sinh Gram block are exactly W, so only terms containing I need the
    Nystrom weights, keeping entry error at the kernel's accuracy level
    (the conditioning of these families amplifies any entry noise).
    """
    Ih, _, _ = cache
    xi = sd.xi
    x = kf.grid[i]
    wt = kf.slice_weights(i)
    ts = kf.grid[: i + 1]
    grow = np.exp(xi[:, None] * (ts[None, :] - x))
    p = 0.5 * (grow - np.exp(-xi[:, None] * (ts[None, :] + x)))
    q = Ih[:, : i + 1] * grow
    pw = p * wt[None, :]
    qw = q * wt[None, :]
    cross = 4.0 * (pw @ q.T + qw @ p.T + qw @ q.T)
    return build_W(x, sd).entries + cross


def build_T(x: float, sd: SpectralData, kf: KernelField,
            _cache: Optional[tuple] = None) -> ScaledMatrix:
    """Scaled matrix T_{j,k}(x) = (4 xi_j^2/C_j) delta + 4 int_0^x F_j F_k dt,
    evaluated at a kernel grid node (x must lie on kf.grid)."""
    _check_spectral(sd)
    if kf.grid[-1] < x - 1e-12:
        raise ReconstructError("kernel field grid shorter than x")
    i = int(round(x / (kf.grid[1] - kf.grid[0]))) if kf.n else 0
    if not math.isclose(kf.grid[i], x, rel_tol=0, abs_tol=1e-9 * max(1.0, x)):
        raise ReconstructError("build_T wants x on the kernel grid")
    w_expect = sd.omega ** 2 * sd.q0
    if abs(kf.w - w_expect) > 1e-6 * max(1.0, abs(w_expect)):
        raise ReconstructError(
            f"kernel field solved at w={kf.w}, data implies w={w_expect}")
    xi = sd.xi
    N = sd.count
    if N == 0:
        return ScaledMatrix(np.empty((0, 0)), 0.0)
    cache = _cache if _cache is not None else _scaled_transformed_sinh(sd, kf)
    return ScaledMatrix(_t_matrix_at(sd, kf, i, cache),
                        2.0 * x * float(xi.sum()))


def default_kernel_n(X: float, w: float) -> int:
    """Kernel grid size so that h sqrt(w) <~ 0.08: the determinant stage
    amplifies kernel entry error, so the solve must resolve the 1/sqrt(w)
    kernel scale to near machine accuracy (Gregory-8 weights assumed)."""
    n = max(128.0, 10.0 * X * math.sqrt(abs(w)))
    return int(2 ** math.ceil(math.log2(n)))


def reconstruct_glm(sd: SpectralData, grid: Sequence, n_kernel: Optional[int] = None,
                    ref: Optional[Potential] = None,
                    kf: Optional[KernelField] = None,
                    interpolate_flagged: bool = False) -> ReconstructionResult:
    """Kernel-plus-determinant reconstruction:

        Q(x) = (2/omega^2) [ -d/dx A(x,x) + d2/dx2 ln|det T(x)| ],

    with the transformation kernel solved at w = omega^2 Q(0).  The grid is
    snapped to the kernel's uniform nodes so the inner integrals reuse the
    Nystrom weights; T'' uses the slice derivative of A from the
    differentiated integral equation, never finite differences.
    """
    from .glkernel import solve_kernel

    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ReconstructError("grid must be strictly increasing")
    _check_spectral(sd)
    if sd.q0 <= 0:
        raise ReconstructError("reconstruction needs q0 > 0 (Re w > 0)")
    om2 = sd.omega ** 2
    w = om2 * sd.q0
    X = float(grid[-1])
    if kf is None:
        kf = solve_kernel(X, w, n=n_kernel or default_kernel_n(X, w))
    # evaluate on kernel nodes nearest the requested grid
    snap = np.unique(np.clip(np.round(grid / (kf.grid[1] - kf.grid[0])), 0,
                             kf.n).astype(int))
    xs = kf.grid[snap]
    q = np.zeros(len(xs))
    qint = np.zeros(len(xs))
    flags = np.zeros(len(xs), dtype=bool)
    xi = sd.xi
    N = sd.count
    cache = _scaled_transformed_sinh(sd, kf) if N else None
    for k, i in enumerate(snap):
        x = kf.grid[i]
        dd = float(np.real(kf.diag_deriv[i]))
        if N == 0:
            q[k] = (2.0 / om2) * (-dd)
            qint[k] = (2.0 / om2) * (-float(np.real(kf.diag[i])))
            continue
        _, Fh, F1h = cache
        T = _t_matrix_at(sd, kf, i, cache)
        try:
            Te, _ = _equilibrated(T, ())
            if np.linalg.cond(Te) < _COND_FLOAT64:
                sign, _ld = np.linalg.slogdet(Te)
                if sign <= 0:
                    raise SingularFamilyError("det T crossed zero at this node")
                d1, d2 = _quad_form_derivatives(T, Fh[:, i], F1h[:, i])
            else:
                Tl, fl, f1l = T.copy(), Fh[:, i].copy(), F1h[:, i].copy()

                def build(mp, Tl=Tl, fl=fl, f1l=f1l):
                    Wm = mp.matrix(Tl.tolist())
                    return (Wm, mp.matrix([float(t) for t in fl]),
                            mp.matrix([float(t) for t in f1l]))

                # entries are float64-accurate only; the mp solve removes the
                # factorization's conditioning loss, not the entry rounding
                d1, d2 = _mp_quad_form(build, N, max(50, 30 + int(2.6 * N)))
            q[k] = (2.0 / om2) * (-dd + d2)
            qint[k] = (2.0 / om2) * (-float(np.real(kf.diag[i])) + d1)
        except SingularFamilyError:
            flags[k] = True
    res = ReconstructionResult(grid=xs, Q_rec=q, Q_int=qint, method="glm",
                               flags=flags)
    if interpolate_flagged:
        res = _interpolate_flagged(res)
    return _attach_errors(res, ref)


def lax_levermore(eta: Sequence, c: Sequence, epsilon: float,
                  grid: Sequence) -> ReconstructionResult:
    """Small-dispersion determinant profile

        u(x, eps) = -2 eps^2 d2/dx2 ln det(I + G(x, eps)),
        G_jk = eps exp(-(eta_j+eta_k) x/eps) c_j c_k / (eta_j + eta_k);

    the result's Q_rec holds -u so it targets the positive profile the
    discrete data came from.  Exponentials decay for x >= 0: no scaling.
    """
    eta = np.asarray(eta, dtype=float)
    c = np.asarray(c, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if epsilon <= 0:
        raise ReconstructError("epsilon must be positive")
    if len(eta) != len(c):
        raise ReconstructError("eta and c must pair up")
    if len(eta) and (np.any(eta <= 0) or np.any(c <= 0)):
        raise ReconstructError("eta and c must be positive")
    if len(np.unique(eta)) != len(eta):
        # the matrix stays well defined (eta_j + eta_k > 0), but coincident
        # levels mean the norming data is degenerate
        warnings.warn("repeated eta values: degenerate norming", stacklevel=2)
    n = len(eta)
    u = np.zeros_like(grid)
    uint = np.zeros_like(grid)
    flags = np.zeros(len(grid), dtype=bool)
    if n:
        sig = eta[:, None] + eta[None, :]
        cc = np.outer(c, c)

        def family(x):
            E = np.exp(-sig * x / epsilon) * cc
            G = epsilon * E / sig
            return np.eye(n) + G, -E, (sig / epsilon) * E

        M0, G10, _ = family(0.0)
        base = logdet_d1(M0, G10)
        for i, x in enumerate(grid):
            M, G1, G2 = family(x)
            try:
                u[i] = -2.0 * epsilon**2 * logdet_d2(M, G1, G2)
                uint[i] = -2.0 * epsilon**2 * (logdet_d1(M, G1) - base)
            except SingularFamilyError:
                flags[i] = True
    return ReconstructionResult(grid=grid, Q_rec=-u, Q_int=-uint,
                                method="lax_levermore", flags=flags)
