"""Exact discrete spectral data of -d^2/dx^2 - omega^2 Q on the half-line.

Dirichlet condition at 0, decaying tail at infinity.  Eigenvalues are the
xi_j with lambda_j = -xi_j^2; the characteristic value C_j = phi_j'(0)^2 of
the L2-normalized eigenfunction completes the inverse problem's data.

The solver uses the Pruefer phase representation so eigenvalue indices come
from integer phase counts (no root can be missed): a vectorized fixed-grid
RK4 sweep bisects all candidate xi simultaneously.  Near-threshold states,
whose truncation domains are thousands of length units, are finished on a
Wronskian-mismatch functional instead (the phase representation compresses
their information exponentially, the mismatch keeps it well conditioned),
and the same mismatch powers the high-accuracy polish at moderate omega.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .potentials import Potential, eval_potential
from .quadrature import integral_with_power_tail, simpson_weights

SCHEMA_VERSION = 1


class ForwardError(RuntimeError):
    pass


class BracketError(ForwardError):
    """Eigenvalue bracket failure, reported with the oscillation-count diagnostic."""


@dataclass
class SolverOptions:
    tol: float = 1e-10              # xi tolerance of the refinement
    points_per_radian: float = 60.0
    efolds: float = 13.0            # decay margin past the turning point
    polish: Optional[bool] = None   # None: auto (on for omega <= 25)
    polish_rtol: float = 1e-12
    xi_floor: Optional[float] = None
    x_inf_cap: float = 1e8
    sensitivity_check: bool = False


@dataclass
class SpectralData:
    omega: float
    xi: np.ndarray
    C: np.ndarray
    q0: float
    q0_derivatives: tuple = ()
    potential_id: str = ""

    @property
    def count(self) -> int:
        return len(self.xi)

    def to_json(self) -> str:
        return json.dumps({
            "version": SCHEMA_VERSION,
            "omega": self.omega,
            "potential_id": self.potential_id,
            "xi": [float(v) for v in self.xi],
            "C": [float(v) for v in self.C],
            "q0": self.q0,
            "q0_derivatives": [float(v) for v in self.q0_derivatives],
        }, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "SpectralData":
        doc = json.loads(text)
        version = doc.get("version")
        if version != SCHEMA_VERSION:
            raise ForwardError(f"unsupported spectral schema version: {version!r}")
        return cls(
            omega=float(doc["omega"]),
            xi=np.asarray(doc["xi"], dtype=float),
            C=np.asarray(doc["C"], dtype=float),
            q0=float(doc["q0"]),
            q0_derivatives=tuple(doc.get("q0_derivatives", ())),
            potential_id=doc.get("potential_id", ""),
        )


def calogero_bounds(p: Potential, omega: float) -> tuple:
    """Bound-state count bracket (lower, upper) from int Q and int sqrt(Q)."""
    if p.support_end is not None:
        T = p.support_end
        x = np.linspace(0, T, 4001)
        q = eval_potential(p, x, 0)
        int_q = float(np.trapezoid(q, x))
        int_sq = float(np.trapezoid(np.sqrt(q), x))
    else:
        if p.decay is None:
            raise ForwardError("decay metadata missing: quadrature tail undetermined")
        T = max(p.x_tail, 1e4)
        h1, t1 = integral_with_power_tail(lambda x: eval_potential(p, x, 0), T)
        h2, t2 = integral_with_power_tail(lambda x: np.sqrt(eval_potential(p, x, 0)), T)
        if not (math.isfinite(t1) and math.isfinite(t2)):
            raise ForwardError("divergent quadrature: potential decays too slowly")
        int_q, int_sq = h1 + t1, h2 + t2
    lower = omega / (math.pi * math.sqrt(p.q0)) * int_q - 0.5
    upper = 2.0 * omega / math.pi * int_sq
    return lower, upper


# ----------------------------------------------------------------------
# per-(potential, omega) context and the vectorized Pruefer sweep

@dataclass
class _ShootGrid:
    xs: np.ndarray        # step left endpoints
    hs: np.ndarray        # step sizes
    qa: np.ndarray        # omega^2 Q at the three RK4 stage points
    qm: np.ndarray
    qb: np.ndarray
    ends: np.ndarray
    x_max: float


class _Problem:
    """Turning-point table, truncation rule, and grids for one (Q, omega)."""

    def __init__(self, p: Potential, omega: float, opts: SolverOptions):
        self.p = p
        self.omega = omega
        self.opts = opts
        self.sq0 = math.sqrt(p.q0)
        self.xi_max = omega * self.sq0
        self.xi_floor = opts.xi_floor or 1e-4 / omega
        self._xplus_table = self._build_xplus_table()

    def _build_xplus_table(self):
        if self.p.support_end is not None:
            return None
        etas = np.geomspace(1e-12 / self.omega ** 2, self.sq0 * (1 - 1e-13), 320)
        lo = np.zeros_like(etas)
        hi = np.ones_like(etas)
        e2 = etas * etas
        for _ in range(60):
            mask = eval_potential(self.p, hi, 0) > e2
            if not mask.any():
                break
            hi = np.where(mask, 2 * hi, hi)
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            inside = eval_potential(self.p, mid, 0) > e2
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return etas, 0.5 * (lo + hi)

    def x_plus(self, xi):
        """Turning point of the level at xi (vectorized, from the table)."""
        if self._xplus_table is None:
            return np.zeros_like(np.asarray(xi, dtype=float)) + self.p.support_end
        etas, xps = self._xplus_table
        eta = np.clip(np.asarray(xi, dtype=float) / self.omega, etas[0], etas[-1])
        return np.interp(np.log(eta), np.log(etas), xps)

    def x_stop(self, xi):
        """Right truncation: just past the turning point of the slightly
        lowered level, plus an e-fold margin that suppresses the residual
        boundary-condition error of y'/y = -xi exponentially."""
        xi = np.asarray(xi, dtype=float)
        if self.p.support_end is not None:
            return np.full_like(xi, self.p.support_end)
        base = self.x_plus(0.7 * xi)
        return np.minimum(base + self.opts.efolds / np.maximum(xi, 1e-300),
                          self.opts.x_inf_cap)

    def x_match(self, xi: float) -> float:
        """Matching point for the two-sided solves: a little past the turning
        point, capped at a few e-folds so the forward (unstable) leg stays
        clean of growing-solution admixture."""
        if self.p.support_end is not None:
            return self.p.support_end
        xp = float(self.x_plus(xi))
        x_stop = float(self.x_stop(xi))
        if xp <= 0:
            return min(1.0, x_stop)
        pad = min(max(0.5, 0.2 * xp), 4.0 / xi)
        return min(xp + pad, 0.5 * (xp + x_stop))

    def build_grid(self, x_max: float) -> _ShootGrid:
        ppr = self.opts.points_per_radian
        om2 = self.omega ** 2
        bps = sorted(b for b in self.p.breakpoints if 0 < b < x_max)
        bps.append(x_max)
        xs, hs = [], []
        x = 0.0
        nxt = iter(bps)
        bp = next(nxt)
        xi_max2 = om2 * self.p.q0
        while x < x_max - 1e-15:
            q = eval_potential(self.p, x + 1e-12, 0)
            # oscillation resolution plus an explicit-RK4 stability bound:
            # the phase Jacobian is at most 1 + |om^2 Q - xi^2| over the
            # states still active at x (deep ones freeze just past their
            # turning point, far-tail ones have xi ~ efolds/x)
            q_ahead = eval_potential(self.p, 0.9 * x + 1e-12, 0)
            xi_act = min(math.sqrt(xi_max2),
                         max(1.5 * math.sqrt(om2 * q_ahead),
                             self.opts.efolds / (0.3 * max(x, 0.1))))
            jac = 1.0 + om2 * q + xi_act * xi_act
            h = min(1.0 / (ppr * math.sqrt(om2 * q) + 1.0), 2.5 / jac, 0.8)
            if x + h >= bp - 1e-14:
                h = bp - x
                try:
                    bp = next(nxt)
                except StopIteration:
                    pass
            xs.append(x)
            hs.append(h)
            x += h
        xs = np.asarray(xs)
        hs = np.asarray(hs)
        nudge = 1e-12 * np.maximum(hs, 1e-6)
        qa = om2 * eval_potential(self.p, xs + nudge, 0)
        qm = om2 * eval_potential(self.p, xs + 0.5 * hs, 0)
        qb = om2 * eval_potential(self.p, xs + hs - nudge, 0)
        return _ShootGrid(xs, hs, qa, qm, qb, xs + hs, x_max)

    def count_grid_extent(self) -> float:
        """x beyond which the remaining zero-energy phase is negligible."""
        if self.p.support_end is not None:
            return self.p.support_end
        d = self.p.decay
        half = d.k2 / 2.0
        X = (self.omega * math.sqrt(d.a) / (0.02 * (half - 1.0))) ** (1.0 / (half - 1.0))
        return min(max(X, 10.0), 1e6)


def _pruefer_sweep(grid: _ShootGrid, xi: np.ndarray, x_stop: np.ndarray) -> np.ndarray:
    """Integrate theta' = cos^2 + (omega^2 Q - xi^2) sin^2 for all xi at once.

    Each state's phase is captured at its own truncation point; whatever the
    (unstable, discarded) values do past that point never feeds the result.
    """
    xi2 = xi * xi
    theta = np.zeros_like(xi)
    frozen = np.zeros_like(xi)
    freeze_at = np.searchsorted(grid.ends, x_stop * (1 - 1e-12), side="left")
    freeze_at = np.minimum(freeze_at, len(grid.xs) - 1)

    def f(q, th):
        s = np.sin(th)
        c = np.cos(th)
        return c * c + (q - xi2) * s * s

    last = int(freeze_at.max())
    for i in range(last + 1):
        h = grid.hs[i]
        k1 = f(grid.qa[i], theta)
        k2 = f(grid.qm[i], theta + 0.5 * h * k1)
        k3 = f(grid.qm[i], theta + 0.5 * h * k2)
        k4 = f(grid.qb[i], theta + h * k3)
        theta = theta + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        hit = freeze_at == i
        if hit.any():
            frozen = np.where(hit, theta, frozen)
    return frozen


def _phase_count_fn(prob: _Problem, grid: _ShootGrid):
    def P(xi_vec: np.ndarray) -> np.ndarray:
        xs = np.asarray(xi_vec, dtype=float)
        th = _pruefer_sweep(grid, xs, prob.x_stop(xs))
        return th + np.arctan(1.0 / xs) - math.pi
    return P


# ----------------------------------------------------------------------
# scalar two-sided machinery (node counts, Wronskian mismatch)

def _forward_leg(prob: _Problem, xi: float, x_m: float):
    """Integrate y'' = (xi^2 - om^2 Q) y from (0, 1), counting interior zeros.

    Returns (y(x_m), y'(x_m), nodes).
    """
    om2 = prob.omega ** 2
    p = prob.p

    def rhs(x, y):
        return [y[1], (xi * xi - om2 * eval_potential(p, x, 0)) * y[0]]

    def node(x, y):
        return y[0]
    node.direction = 0.0

    segs = [0.0] + [b for b in p.breakpoints if 0 < b < x_m] + [x_m]
    y = np.array([1e-300, 1.0])
    nodes = 0
    first = True
    for a, b in zip(segs[:-1], segs[1:]):
        sol = solve_ivp(rhs, (a, b), y, method="DOP853",
                        rtol=prob.opts.polish_rtol, atol=1e-14, events=node)
        y = sol.y[:, -1]
        ev = sol.t_events[0]
        if first:
            ev = ev[ev > 1e-9]  # the Dirichlet zero at x = 0 is not a node
            first = False
        nodes += len(ev)
    return float(y[0]), float(y[1]), nodes


def _backward_log_derivative(prob: _Problem, xi: float, x_m: float) -> float:
    """Log-derivative of the decaying solution at x_m, from a backward
    Riccati integration started at y'/y = -xi on the truncation point."""
    x_stop = float(prob.x_stop(xi))
    if x_stop <= x_m * (1 + 1e-12):
        return -xi
    om2 = prob.omega ** 2
    p = prob.p

    def rhs_u(x, u):
        return [xi * xi - om2 * eval_potential(p, x, 0) - u[0] * u[0]]

    sol = solve_ivp(rhs_u, (x_stop, x_m), [-xi], method="DOP853",
                    rtol=prob.opts.polish_rtol, atol=1e-14)
    return float(sol.y[0, -1])


def _mismatch(prob: _Problem, xi: float, with_nodes: bool = False):
    """Matching residual W(xi) = y_L'(x_m) - u_R(x_m) y_L(x_m), normalized.

    Zero exactly at eigenvalues; its sign together with the node count of
    y_L below x_m gives the exact number of eigenvalues above xi.
    """
    x_m = prob.x_match(xi)
    y, v, nodes = _forward_leg(prob, xi, x_m)
    u_r = _backward_log_derivative(prob, xi, x_m)
    w = (v - u_r * y) / math.hypot(y, v)
    if with_nodes:
        # one extra zero of y_L beyond x_m exactly when the growing-branch
        # coefficient (proportional to w) opposes the local sign of y
        return w, nodes + (1 if w * y < 0 else 0)
    return w


def count_above(p: Potential, omega: float, xi_star: float,
                opts: Optional[SolverOptions] = None, _prob=None) -> int:
    """Exact number of eigenvalues with xi > xi_star (Sturm oscillation)."""
    prob = _prob or _Problem(p, omega, opts or SolverOptions())
    _, n = _mismatch(prob, xi_star, with_nodes=True)
    return n


def count_states(p: Potential, omega: float,
                 opts: Optional[SolverOptions] = None, _prob=None) -> int:
    """Number of bound states, from the oscillation count of the zero-energy
    Dirichlet solution (each interior zero binds exactly one state).

    The fractional phase decides whether the asymptotically linear tail
    contributes one more zero; knife-edge cases (threshold states) are
    re-decided by the well-conditioned two-sided counter at a tiny xi.
    """
    opts = opts or SolverOptions()
    prob = _prob or _Problem(p, omega, opts)
    grid = prob.build_grid(prob.count_grid_extent())
    theta = _pruefer_sweep(grid, np.array([0.0]), np.array([grid.x_max]))[0]
    n, frac = divmod(theta / math.pi, 1.0)
    if abs(frac - 0.5) < 1e-3 and p.support_end is None:
        return count_above(p, omega, prob.xi_floor, opts, _prob=prob)
    return int(n) + (1 if frac > 0.5 else 0)


def eigenvalues(p: Potential, omega: float, opts: Optional[SolverOptions] = None) -> np.ndarray:
    """All xi_j of the Dirichlet problem, strictly increasing.

    Oscillation counting isolates each index; vectorized bisection on the
    Pruefer phase handles every state whose truncation fits the common grid;
    near-threshold states are finished on the Wronskian mismatch; for
    moderate omega the mismatch polish brings everything to opts.tol.
    """
    opts = opts or SolverOptions()
    prob = _Problem(p, omega, opts)
    n_states = count_states(p, omega, opts, _prob=prob)
    if n_states == 0:
        return np.empty(0)
    lo0 = prob.xi_floor
    if p.support_end is None and count_above(p, omega, lo0, opts, _prob=prob) < n_states:
        raise BracketError(
            f"weakest of {n_states} states lies below the resolvable floor "
            f"xi = {lo0:.3g}")

    # vector grid serves states down to xi_split; weaker ones go scalar
    xi_split = max(opts.efolds / 600.0, 1.2 * lo0)
    x_cap = float(prob.x_stop(min(xi_split, prob.xi_max / 4)))
    grid = prob.build_grid(x_cap)
    P = _phase_count_fn(prob, grid)
    p_hi = float(P(np.array([prob.xi_max * (1 - 1e-13)]))[0])
    if p_hi >= 0:
        raise BracketError(
            f"phase count does not close at xi_max: P={p_hi:.3g} (expected < 0)")

    targets = math.pi * np.arange(n_states)
    lo = np.full(n_states, lo0)
    hi = np.full(n_states, prob.xi_max * (1 - 1e-13))
    do_polish = opts.polish if opts.polish is not None else (omega <= 25)
    bisect_tol = max(opts.tol, 1e-7) if do_polish else opts.tol
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        # leave states below the vector grid's reach to the scalar pass
        safe = prob.x_stop(mid) <= grid.x_max * (1 + 1e-9)
        if not safe.any():
            break
        pm = P(np.where(safe, mid, hi))
        above = pm > targets
        lo = np.where(safe & above, mid, lo)
        hi = np.where(safe & ~above, mid, hi)
        if np.max(np.where(safe, hi - lo, 0.0)) < bisect_tol:
            break
    xi = 0.5 * (lo + hi)

    # scalar mismatch refinement for states the vector grid could not reach
    refined = np.zeros(n_states, dtype=bool)
    for i in range(n_states):
        if prob.x_stop(xi[i]) <= grid.x_max * (1 + 1e-9) and hi[i] - lo[i] < 2 * bisect_tol:
            continue
        a, b = lo[i], hi[i]
        wa = _mismatch(prob, a)
        wb = _mismatch(prob, b)
        if wa * wb > 0:
            raise BracketError(
                f"mismatch bracket failed for state with node count {i} on "
                f"[{a:.3g}, {b:.3g}]: W = ({wa:.3g}, {wb:.3g})")
        xi[i] = brentq(lambda t: _mismatch(prob, t), a, b,
                       xtol=max(opts.tol * max(1.0, xi[i]), 1e-14), rtol=1e-15)
        refined[i] = True

    if do_polish:
        srt = np.sort(xi)
        min_gap = float(np.diff(srt).min()) if n_states > 1 else float(srt[0])
        for i in range(n_states):
            if refined[i]:
                continue
            # the sweep root can be biased by phase discretization; expand the
            # polish bracket past that bias but never into a neighboring root
            pad = min(1e-4 * (1.0 + xi[i]), 0.2 * min_gap)
            a = max(lo0, xi[i] - pad)
            b = min(prob.xi_max * (1 - 1e-13), xi[i] + pad)
            wa = _mismatch(prob, a)
            wb = _mismatch(prob, b)
            tries = 0
            while wa * wb > 0 and tries < 5:
                pad = min(2 * pad, 0.45 * min_gap)
                a = max(lo0, xi[i] - pad)
                b = min(prob.xi_max * (1 - 1e-13), xi[i] + pad)
                wa = _mismatch(prob, a)
                wb = _mismatch(prob, b)
                tries += 1
            if wa * wb <= 0:
                xi[i] = brentq(lambda t: _mismatch(prob, t), a, b,
                               xtol=opts.tol, rtol=1e-15)
    xi = np.sort(xi)
    if opts.sensitivity_check and n_states:
        wide = SolverOptions(**{**opts.__dict__, "efolds": opts.efolds * 2,
                                "sensitivity_check": False})
        prob2 = _Problem(p, omega, wide)
        w1 = _mismatch(prob, xi[0])
        w2 = _mismatch(prob2, xi[0])
        if abs(w2 - w1) > 1e-6:
            raise ForwardError(
                f"truncation radius too small: mismatch shifts by "
                f"{abs(w2 - w1):.2e} when the tail margin doubles")
    return xi


@dataclass
class StateProfile:
    xi: float
    C: float
    log_s: float
    x_match: float
    x_stop: float
    mismatch: float


def _state_profiles(p: Potential, omega: float, xi: np.ndarray,
                    opts: Optional[SolverOptions] = None) -> list:
    """Normalization data per state: C_j, tail amplitude log s_j, diagnostics.

    The state is matched across the turning point (forward linear leg,
    backward Riccati with log-amplitude), so deep states never overflow; the
    normalization adds the analytic exponential tail beyond the truncation.
    """
    opts = opts or SolverOptions()
    prob = _Problem(p, omega, opts)
    om2 = omega * omega
    out = []
    for x in np.asarray(xi, dtype=float):
        # amplitude extraction is first-order sensitive to the truncation
        # boundary condition (no e-fold suppression, unlike the eigenvalue),
        # so push the truncation to omega^2 Q <= 1e-4 xi^2 and start the
        # backward Riccati on the WKB-corrected log-derivative
        x_stop = float(prob.x_stop(x))
        if p.support_end is None:
            x_stop = max(x_stop, float(prob.x_plus(1e-2 * x)))
        x_m = prob.x_match(x)

        def rhs(t, y):
            q = eval_potential(p, t, 0)
            return [y[1], (x * x - om2 * q) * y[0], y[0] * y[0]]

        segs = [0.0] + [b for b in p.breakpoints if 0 < b < x_m] + [x_m]
        y = np.array([0.0, 1.0, 0.0])
        for a, b in zip(segs[:-1], segs[1:]):
            sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=1e-11, atol=1e-14)
            y = sol.y[:, -1]
        y_m, v_m, z_l = y

        if x_stop <= x_m * (1 + 1e-12):
            l_m = 0.0
            m_hat = 0.0
            u_m = -x
        else:
            def rhs_ul(t, w):
                q = eval_potential(p, t, 0)
                return [x * x - om2 * q - w[0] * w[0], w[0]]
            kap2 = x * x - om2 * eval_potential(p, x_stop, 0)
            u0 = -math.sqrt(max(kap2, 0.25 * x * x))
            if p.m_smoothness >= 1:
                u0 += om2 * eval_potential(p, x_stop, 1) / (4.0 * kap2)
            solu = solve_ivp(rhs_ul, (x_stop, x_m), [u0, 0.0], method="DOP853",
                             rtol=1e-11, atol=1e-14, dense_output=True)
            u_m = solu.y[0, -1]
            # L(x) = int_{x_stop}^{x} u ds grows positive toward x_m (the
            # decaying branch is integrated against the orientation)
            l_m = solu.y[1, -1]
            span = x_stop - x_m
            n_ts = int(min(30000, max(801, 60.0 * x * span)))
            n_ts += n_ts % 2
            ts = np.linspace(x_m, x_stop, n_ts + 1)
            Ls = solu.sol(ts)[1]
            wts = simpson_weights(n_ts, ts[1] - ts[0])
            m_hat = float(np.dot(wts, np.exp(2.0 * (Ls - l_m))))
        tail = math.exp(-2.0 * l_m) / (2.0 * x)
        norm2 = z_l + y_m * y_m * (m_hat + tail)
        C = 1.0 / norm2
        log_s = math.log(abs(y_m)) - l_m + x * x_stop - 0.5 * math.log(norm2)
        mism = abs(v_m / y_m - u_m) if y_m != 0 else math.inf
        out.append(StateProfile(float(x), C, log_s, x_m, x_stop, mism))
    return out


def characteristic_values(p: Potential, omega: float, xi: Sequence,
                          opts: Optional[SolverOptions] = None) -> np.ndarray:
    """C_j = phi_j'(0)^2 for the L2-normalized Dirichlet eigenfunctions.

    The normalization integral is computed on [0, X_stop] plus the analytic
    exponential tail C e^{-2 xi x} beyond it.
    """
    profs = _state_profiles(p, omega, np.asarray(xi, dtype=float), opts)
    return np.array([s.C for s in profs])


def forward(p: Potential, omega: float, opts: Optional[SolverOptions] = None,
            potential_id: str = "") -> SpectralData:
    """eigenvalues + characteristic_values packaged as SpectralData."""
    xi = eigenvalues(p, omega, opts)
    C = characteristic_values(p, omega, xi, opts) if len(xi) else np.empty(0)
    return SpectralData(
        omega=omega, xi=xi, C=C, q0=p.q0,
        q0_derivatives=tuple(p.q0_derivatives), potential_id=potential_id or p.kind,
    )


def squarewell_oracle(omega: float, scan_per_pi: int = 48) -> SpectralData:
    """Exact square-well spectrum from the transcendental eigencondition.

    Roots of  xi sin(nu) + nu cos(nu) = 0  with nu = sqrt(omega^2 - xi^2),
    located by a nu-uniform scan plus bisection; C from the closed form
    2 xi (omega^2 - xi^2) / (1 + xi).  Independent of the shooting path.
    """
    if omega < 1:
        raise ForwardError("squarewell_oracle needs omega >= 1")

    def h(nu):
        x2 = omega * omega - nu * nu
        xi = math.sqrt(max(x2, 0.0))
        return xi * math.sin(nu) + nu * math.cos(nu)

    nus = np.linspace(1e-9, omega * (1 - 1e-12), max(8, int(scan_per_pi * omega / math.pi)))
    vals = np.array([h(v) for v in nus])
    roots = []
    for a, b, fa, fb in zip(nus[:-1], nus[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(brentq(h, a, b, xtol=1e-14, rtol=1e-15))
    xi = np.array(sorted(math.sqrt(omega * omega - nu * nu) for nu in roots))
    xi = xi[xi > 1e-9]
    C = 2.0 * xi * (omega * omega - xi * xi) / (1.0 + xi)
    return SpectralData(omega=omega, xi=xi, C=C, q0=1.0, q0_derivatives=(0.0,),
                        potential_id="square_well")
