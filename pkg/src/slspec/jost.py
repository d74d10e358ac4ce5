"""Jost function by successive approximations, and the norming identity.

The Jost solution behaves like e^{ikx} at infinity; its value at the origin
F(k) = f(k, 0) vanishes exactly at k = i xi_j.  The series

    f_0 = e^{ikx},   f_n(k, x) = int_x^inf [sin(k(t-x))/k] V(t) f_{n-1} dt,

with V = -omega^2 Q, is summed in the gauged variables g = f e^{-ikx},
whose kernel (e^{2ik(t-x)} - 1)/(2ik) stays bounded for Im k >= 0; the
factorial majorant

    |f_n| <= e^{-Im k x} B^n / n!,   B = int min(t, 1/|k|) |V| dt,

controls truncation, and B also bounds the roundoff floor ~ e^B eps of the
alternating sum, which the solver reports instead of hiding.

Note the integral-equation kernel is sin(k(t-x))/k: with the opposite sign
the series converges to a function whose zeros are NOT the eigenvalues
(checked against the square well's closed form).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .forward import SolverOptions, _state_profiles
from .potentials import Potential, eval_potential


class JostError(RuntimeError):
    pass


@dataclass
class JostSample:
    k: complex
    F: complex
    iterations_used: int
    tail_truncation: float
    roundoff_floor: float = 0.0
    grid: np.ndarray = field(default=None, repr=False)
    g: np.ndarray = field(default=None, repr=False)     # f(k,x) e^{-ikx}

    def f_at(self, x: float) -> complex:
        """Jost solution f(k, x) = e^{ikx} g(x) interpolated on the grid."""
        gr = np.interp(x, self.grid, self.g.real)
        gi = np.interp(x, self.grid, self.g.imag)
        return complex(np.exp(1j * self.k * x) * (gr + 1j * gi))


def _jost_grid(p: Potential, omega: float, k: complex, tol: float) -> np.ndarray:
    """Blocked uniform grid, dense where the phase or the potential moves,
    geometric in block length, truncated where the kernel tail bound dies."""
    kk = max(abs(k), 1e-12)
    if p.support_end is not None:
        X = p.support_end
        h = min(0.05, 0.1 / max(1.0, kk))
        pieces = [np.linspace(0.0, X, max(16, int(math.ceil(X / h))) + 1)]
        return np.unique(np.concatenate(pieces))
    d = p.decay
    om2 = omega * omega
    # tail of int min(t, 1/|k|) |V|:  om^2 a / ((k2-1) |k| X^(k2-1))
    X = (om2 * d.a / ((d.k2 - 1.0) * min(kk, 1.0) * max(tol, 1e-12))) ** (1.0 / (d.k2 - 1.0))
    X = min(max(X, 20.0), 5e4)
    h0 = min(0.05, 0.06 / max(1.0, kk))

    def build(h0):
        blocks = []
        a, h = 0.0, h0
        while a < X:
            b = min(X, a + max(60 * h, 3.0))
            n = max(8, int(math.ceil((b - a) / h / 2.0)) * 2)
            blocks.append(np.linspace(a, b, n + 1))
            a, h = b, 2.0 * h
        return np.unique(np.concatenate(blocks))

    g = build(h0)
    if len(g) > 3200:
        g = build(h0 * len(g) / 3200.0)
    return g


_RW_CACHE: dict = {}


def _row_weights(grid: np.ndarray) -> np.ndarray:
    """w[i, j]: Simpson-type weights for int over [x_i, X] on grid nodes.

    Built per row from composite Simpson (3/8-closed for odd counts) on the
    blocked grid; rows are dense enough that plain composite rules on the
    nonuniform spacing keep fourth order within each uniform block.
    """
    m = len(grid)
    key = (m, float(grid[0]), float(grid[-1]), float(grid[min(7, m - 1)]))
    hit = _RW_CACHE.get(key)
    if hit is not None:
        return hit
    W = np.zeros((m, m))
    # composite Simpson on a (piecewise-uniform) grid, built right-to-left
    for i in range(m - 1):
        sub = grid[i:]
        w = np.zeros(len(sub))
        j = 0
        while j < len(sub) - 1:
            # find the uniform run starting at j
            hstep = sub[j + 1] - sub[j]
            r = j + 1
            while r < len(sub) - 1 and abs((sub[r + 1] - sub[r]) - hstep) < 1e-12 * max(1.0, hstep):
                r += 1
            npan = r - j
            from .quadrature import simpson_weights
            w[j : r + 1] += simpson_weights(npan, hstep)
            j = r
        W[i, i:] = w
    if len(_RW_CACHE) > 8:
        _RW_CACHE.clear()
    _RW_CACHE[key] = W
    return W


def jost(p: Potential, omega: float, k: complex, n_max: int = 200,
         tol: float = 1e-10, _grid: Optional[np.ndarray] = None) -> JostSample:
    """F(k) = f(k, 0) for Im k >= 0 by the gauged successive approximations.

    Raises when the factorial bound cannot reach tol within n_max terms;
    reports the roundoff floor e^B eps when the alternating sum is expected
    to lose that much (small |k| with strong coupling).
    """
    k = complex(k)
    if k.imag < -1e-15:
        raise JostError("Jost function needs Im k >= 0")
    om2 = omega * omega
    grid = _jost_grid(p, omega, k, tol) if _grid is None else _grid
    m = len(grid)
    V = -om2 * eval_potential(p, np.minimum(grid, grid[-1]), 0)
    if p.support_end is not None:
        # the grid ends exactly at the support: the final node carries the
        # left-limit value so block-Simpson integrates the piece exactly
        V = -om2 * eval_potential(p, np.minimum(grid, p.support_end - 1e-12), 0)

    dxm = grid[None, :] - grid[:, None]
    kk = abs(k)
    if kk < 1e-12:
        kern = np.where(dxm > 0, dxm, 0.0).astype(complex)
    else:
        kern = (np.exp(2j * k * np.where(dxm > 0, dxm, 0.0)) - 1.0) / (2j * k)
        kern[dxm <= 0] = 0.0
    idx = np.arange(m)
    kern[idx, idx] = 0.0

    RW = _row_weights(grid)
    M = RW * kern * V[None, :]

    # factorial majorant with the bounded gauged kernel: the kernel modulus
    # is at most min(t - x, 1/(|k| + Im k))
    cap = np.minimum(grid, 1.0 / max(kk + k.imag, 1e-12))
    B = float(RW[0] @ (cap * np.abs(V)))
    if p.decay is not None:
        B += om2 * p.decay.a / ((p.decay.k2 - 1.0) * max(kk + k.imag, 1e-12)
                                * grid[-1] ** (p.decay.k2 - 1.0))
    n_bound = 1
    term_b = B
    while term_b > tol and n_bound < n_max:
        n_bound += 1
        term_b *= B / n_bound
    if term_b > tol:
        raise JostError(
            f"series not converged within n_max={n_max}: factorial bound "
            f"B={B:.3g} leaves remainder {term_b:.3g} > tol={tol:.3g}")

    g = np.ones(m, dtype=complex)
    term = np.ones(m, dtype=complex)
    max_term = 1.0
    used = 0
    for n in range(1, n_max + 1):
        term = M @ term
        g += term
        used = n
        tmax = float(np.max(np.abs(term)))
        max_term = max(max_term, tmax)
        if tmax < 0.2 * tol:
            break
    floor = max_term * 2e-16
    tail = term_b
    return JostSample(k=k, F=complex(g[0]), iterations_used=used,
                      tail_truncation=tail, roundoff_floor=floor,
                      grid=grid, g=g)


def jost_bound(p: Potential, omega: float) -> float:
    """The growth bound exp(2 sqrt(2) omega^2 int t Q dt) on |F|."""
    from .quadrature import integral_with_power_tail
    if p.support_end is not None:
        x = np.linspace(0, p.support_end, 2001)
        itq = float(np.trapezoid(x * eval_potential(p, x, 0), x))
    else:
        head, tail = integral_with_power_tail(
            lambda x: x * eval_potential(p, x, 0), max(p.x_tail, 1e4))
        itq = head + tail
    return math.exp(2.0 * math.sqrt(2.0) * omega * omega * itq)


@dataclass
class IdentityReport:
    j: int
    xi: float
    lhs: float            # 4 xi^2 / C from the shooting pipeline
    rhs: float            # -s^2 Fdot(i xi)^2 from the Jost pipeline
    residual: float
    h_step: float
    fdot: complex
    f_zero: float         # |F(i xi_j)| (should be ~0: zeros at eigenvalues)


def jost_identity_check(p: Potential, omega: float, j: int,
                        opts: Optional[SolverOptions] = None,
                        sd=None) -> IdentityReport:
    """Two-pipeline check of 4 xi_j^2 / C_j = -s_j^2 (dF/dk(i xi_j))^2.

    Left side: shooting eigenvalue + normalized-eigenfunction derivative at
    the origin.  Right side: tail amplitude s_j of the same eigenfunction
    matched against the Jost solution, and dF/dk by central differences of
    the Jost series along the imaginary axis (step well inside the gap).
    """
    from .forward import eigenvalues

    opts = opts or SolverOptions()
    xi = sd.xi if sd is not None else eigenvalues(p, omega, opts)
    if not 1 <= j <= len(xi):
        raise JostError(f"state index {j} outside 1..{len(xi)}")
    x = float(xi[j - 1])
    gaps = np.diff(xi)
    gap = float(min(gaps[max(0, j - 2): j].min() if len(gaps) else x, x))
    h = min(gap / 8.0, x / 100.0)
    if h > gap / 4.0:
        raise JostError("derivative step exceeds a quarter of the spectral "
                        "gap: neighboring zero would contaminate dF/dk")

    prof = _state_profiles(p, omega, np.array([x]), opts)[0]
    # one shared grid for all five evaluations: the discretization bias then
    # differentiates smoothly and the Richardson pair cancels it cleanly
    shared = _jost_grid(p, omega, 1j * (x - h), 1e-10)
    s0 = jost(p, omega, 1j * x, _grid=shared)

    def central(step):
        sp = jost(p, omega, 1j * (x + step), _grid=shared)
        sm = jost(p, omega, 1j * (x - step), _grid=shared)
        return (sp.F - sm.F) / (2j * step)

    # Richardson pair at h and h/2 (both inside the gap safety margin)
    fdot = (4.0 * central(0.5 * h) - central(h)) / 3.0

    # tail amplitude against the actual Jost solution, not the bare
    # exponential: phi ~ s e^{-xi x} g(x) with g from the same series
    g_end = s0.f_at(prof.x_stop) * math.exp(x * prof.x_stop)
    log_s = prof.log_s - math.log(abs(g_end.real))
    lhs = 4.0 * x * x / prof.C
    log_rhs = 2.0 * log_s + 2.0 * math.log(abs(fdot))
    rhs = math.exp(log_rhs)
    residual = abs(1.0 - math.exp(log_rhs - math.log(lhs)))
    return IdentityReport(j=j, xi=x, lhs=lhs, rhs=rhs, residual=residual,
                          h_step=h, fdot=complex(fdot), f_zero=abs(s0.F))
