"""Rotating-wave states of the phase formulation and their bifurcations.

Synchronized solutions theta_i = Omega t + const exist when the locked
frequency Omega_hat = Omega + omega_M satisfies
Omega_hat + K sin(Omega_hat tau) = omega_M, which for tau K > 1 has multiple
solutions organized in fold-connected branches over tau.  Along a branch the
characteristic blocks have delay-dependent modal gain
a(tau) = K mu cos(Omega_hat(tau) tau), so imaginary-axis crossings are zeros
of the delay-dependent crossing map (sn_scan), and the symmetry-breaking
block additionally admits steady-state (zero-root) events at
Omega_hat tau = pi/2 + n pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .charfun import BlockKind, build_blocks
from .errors import InvalidParamError
from .model import ModelKind, NetworkParams, normalize
from .snmap import CrossingCandidate, sn_scan

__all__ = [
    "RelEqBranch",
    "PhaseCrossing",
    "ZeroRootEvent",
    "CurveSample",
    "releq_solve",
    "releq_branches",
    "relative_hopf_scan",
    "zero_root_taus",
    "equilibrium_case_curves",
]

_TWO_PI = 2.0 * math.pi


def _locked_residual(oh, tau, k, wm):
    return oh + k * np.sin(oh * tau) - wm


def releq_solve(params: NetworkParams, tau: float) -> list[float]:
    """All locked frequencies Omega_hat in [omega_M - K, omega_M + K] at delay tau.

    Grid scan (step fine enough to separate oscillations of K sin(Omega_hat tau))
    plus bisection; residuals end below 1e-12.
    """
    p = normalize(params)
    k = p.coupling
    wm = p.free_freq
    tau = float(tau)
    if tau < 0.0:
        raise InvalidParamError("delay must be >= 0")
    if tau == 0.0:
        return [wm]
    lo, hi = wm - k, wm + k
    step = min(math.pi / (4.0 * tau * k), (hi - lo) / 100.0)
    npts = int(math.ceil((hi - lo) / step)) + 2
    grid = np.linspace(lo, hi, npts)
    g = _locked_residual(grid, tau, k, wm)
    roots: list[float] = []
    for i in range(len(grid) - 1):
        ga, gb = g[i], g[i + 1]
        if ga == 0.0:
            roots.append(float(grid[i]))
            continue
        if ga * gb < 0.0:
            a, b, fa = grid[i], grid[i + 1], ga
            for _ in range(200):
                m = 0.5 * (a + b)
                fm = _locked_residual(m, tau, k, wm)
                if fm == 0.0 or (b - a) < 1e-15:
                    break
                if fa * fm < 0.0:
                    b = m
                else:
                    a, fa = m, fm
            roots.append(0.5 * (a + b))
    if g[-1] == 0.0:
        roots.append(float(grid[-1]))
    roots.sort()
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > 1e-9:
            merged.append(r)
    return merged


@dataclass
class RelEqBranch:
    """One fold-connected branch of locked frequencies Omega_hat(tau)."""

    branch_id: int
    birth_tau: float
    taus: np.ndarray
    omegas: np.ndarray
    coupling: float
    free_freq: float

    @property
    def window(self) -> tuple[float, float]:
        return (self.birth_tau, float(self.taus[-1]))

    def omega_hat(self, tau):
        """Omega_hat at arbitrary tau inside the sample window (interp + polish)."""
        t = np.asarray(tau, dtype=float)
        oh = np.interp(t, self.taus, self.omegas)
        k = self.coupling
        for _ in range(8):
            g = _locked_residual(oh, t, k, self.free_freq)
            gp = 1.0 + k * t * np.cos(oh * t)
            gp = np.where(np.abs(gp) < 1e-8, np.where(gp >= 0.0, 1e-8, -1e-8), gp)
            step = np.clip(g / gp, -0.1 * k, 0.1 * k)
            oh = oh - step
        return oh if oh.ndim else float(oh)

    def omega_hat_prime(self, tau):
        """d Omega_hat/d tau from the locked-frequency relation (exact form)."""
        t = np.asarray(tau, dtype=float)
        oh = self.omega_hat(t)
        c = np.cos(np.asarray(oh) * t)
        val = -np.asarray(oh) * self.coupling * c / (1.0 + t * self.coupling * c)
        return val if val.ndim else float(val)


def _fold_extremum(tau, target_oh, k, wm):
    """Value of the locked-frequency residual at its critical point nearest target_oh.

    Critical points satisfy cos(Omega_hat tau) = -1/(K tau); returns None when
    K tau <= 1 (no fold possible).
    """
    if k * tau <= 1.0:
        return None
    base = math.acos(-1.0 / (k * tau))
    best = None
    for sgn in (1.0, -1.0):
        m0 = (target_oh * tau - sgn * base) / _TWO_PI
        for m in (math.floor(m0), math.ceil(m0)):
            oh = (sgn * base + _TWO_PI * m) / tau
            if wm - k - 1e-9 <= oh <= wm + k + 1e-9:
                d = abs(oh - target_oh)
                if best is None or d < best[0]:
                    best = (d, oh)
    if best is None:
        return None
    return float(_locked_residual(best[1], tau, k, wm))


@dataclass
class _Live:
    taus: list[float]
    omegas: list[float]
    birth_tau: float
    last_step: float


def releq_branches(
    params: NetworkParams, tau_window: tuple[float, float], resolution: int = 2000
) -> list[RelEqBranch]:
    """Continuation of locked-frequency branches over a delay window.

    Solutions on a tau grid are matched to branches by nearest predicted
    Omega_hat (gate adaptive to each branch's recent motion); a jump in the
    solution count marks a fold, whose location is bisected to 1e-6 in tau and
    recorded as the birth delay of the two new branches.
    """
    p = normalize(params)
    k, wm = p.coupling, p.free_freq
    t0, t1 = float(tau_window[0]), float(tau_window[1])
    taus = np.linspace(t0, t1, int(resolution))
    live: list[_Live] = []
    done: list[_Live] = []
    prev_tau = taus[0]
    for sol in releq_solve(p, taus[0]):
        live.append(_Live([float(taus[0])], [sol], t0, 0.05 * k))
    for tau in taus[1:]:
        tau = float(tau)
        dt = tau - prev_tau
        sols = releq_solve(p, tau)
        preds = []
        for br in live:
            oh = br.omegas[-1]
            c = math.cos(oh * br.taus[-1] * 1.0)
            denom = 1.0 + br.taus[-1] * k * c
            slope = 0.0 if abs(denom) < 1e-6 else -oh * k * c / denom
            pred = oh + max(-0.2 * k, min(0.2 * k, slope * dt))
            gate = max(0.02 * k, 4.0 * abs(slope) * dt, 3.0 * br.last_step)
            preds.append((pred, gate))
        pairs = sorted(
            (abs(s - preds[bi][0]), bi, si)
            for bi, _ in enumerate(live)
            for si, s in enumerate(sols)
        )
        taken_b: set[int] = set()
        taken_s: set[int] = set()
        for cost, bi, si in pairs:
            if bi in taken_b or si in taken_s or cost > preds[bi][1]:
                continue
            br = live[bi]
            br.last_step = abs(sols[si] - br.omegas[-1])
            br.taus.append(tau)
            br.omegas.append(sols[si])
            taken_b.add(bi)
            taken_s.add(si)
        # branches with no continuation stop here (folds annihilate pairs going
        # forward only in exotic windows; keep whatever was collected)
        still = []
        for bi, br in enumerate(live):
            (still.append(br) if bi in taken_b else done.append(br))
        live = still
        newborn = [si for si in range(len(sols)) if si not in taken_s]
        if newborn:
            mid = float(np.mean([sols[si] for si in newborn]))
            fold_tau = _bisect_fold(prev_tau, tau, mid, k, wm)
            for si in newborn:
                live.append(
                    _Live([tau], [sols[si]], fold_tau, max(0.05 * k, 2.0 * _spread(sols, newborn)))
                )
        prev_tau = tau
    done.extend(live)
    done = [b for b in done if len(b.taus) >= 2]
    done.sort(key=lambda b: (b.birth_tau, b.omegas[0]))
    return [
        RelEqBranch(i, b.birth_tau, np.asarray(b.taus), np.asarray(b.omegas), k, wm)
        for i, b in enumerate(done)
    ]


def _spread(sols, idxs) -> float:
    vals = [sols[i] for i in idxs]
    return max(vals) - min(vals) if len(vals) > 1 else 0.0


def _bisect_fold(ta: float, tb: float, target_oh: float, k: float, wm: float) -> float:
    ea = _fold_extremum(ta, target_oh, k, wm)
    eb = _fold_extremum(tb, target_oh, k, wm)
    if ea is None or eb is None or ea * eb > 0.0:
        return tb  # fold not bracketable (e.g. window start); use first grid point
    for _ in range(80):
        if tb - ta < 1e-6:
            break
        tm = 0.5 * (ta + tb)
        em = _fold_extremum(tm, target_oh, k, wm)
        if em is None:
            return tb
        if ea * em <= 0.0:
            tb, eb = tm, em
        else:
            ta, ea = tm, em
    return 0.5 * (ta + tb)


@dataclass(frozen=True)
class PhaseCrossing:
    branch_id: int
    crossing: CrossingCandidate


def relative_hopf_scan(
    params: NetworkParams,
    block: BlockKind,
    tau_window: tuple[float, float],
    resolution: int = 2000,
    grid_step: float | None = None,
) -> list[PhaseCrossing]:
    """Imaginary-axis crossings of a phase-model block along every locked branch."""
    p = normalize(params)
    branches = releq_branches(p, tau_window, resolution)
    out: list[PhaseCrossing] = []
    for br in branches:
        blocks = build_blocks(ModelKind.PHASE, p, br)
        blk = blocks.fix if block is BlockKind.FIX else blocks.standard
        lo = float(br.taus[0])
        hi = float(br.taus[-1])
        if hi <= lo:
            continue
        for cand in sn_scan(blk, (lo, hi), grid_step=grid_step):
            out.append(PhaseCrossing(br.branch_id, cand))
    out.sort(key=lambda c: c.crossing.tau_star)
    return out


@dataclass(frozen=True)
class ZeroRootEvent:
    tau_star: float
    n: int
    delta0: float
    omega_hat: float


def zero_root_taus(params: NetworkParams, n_range) -> list[ZeroRootEvent]:
    """Zero-root events of the symmetry-breaking block: Omega_hat tau = pi/2 + n pi.

    Only entries with positive denominator omega_M + (-1)^{n+1} K and
    nonnegative tau qualify; delta0 is the steady-state crossing speed scale
    (-1)^n (K N/(N-1)) (omega_M + (-1)^{n+1} K).
    """
    p = normalize(params)
    k, wm, n_nodes = p.coupling, p.free_freq, p.n_nodes
    events = []
    ns = n_range if not isinstance(n_range, tuple) else range(n_range[0], n_range[1] + 1)
    for n in ns:
        n = int(n)
        denom = wm + (-1.0) ** (n + 1) * k
        if denom <= 0.0:
            continue
        tau_star = (math.pi / 2.0 + n * math.pi) / denom
        if tau_star < 0.0:
            continue
        delta0 = (-1.0) ** n * (k * n_nodes / (n_nodes - 1)) * denom
        events.append(ZeroRootEvent(tau_star, n, delta0, denom))
    events.sort(key=lambda ev: ev.tau_star)
    return events


@dataclass(frozen=True)
class CurveSample:
    m: int
    n: int
    mu: float
    coupling: float
    omega: float


def equilibrium_case_curves(
    params: NetworkParams,
    n: int,
    m_range,
    mu_grid=None,
    parity: str = "even",
) -> list[CurveSample]:
    """K(mu) curves of Hopf points at delays with omega_M tau = 2 n pi.

    There the locked frequency equals omega_M, the crossing frequency is
    omega = sqrt(2 K mu - mu^2), and the delay condition becomes
    omega = (omega_M / 2 n pi)(atan2(-omega, mu - K) + 2 m pi), solved for K
    by bisection on each mu grid point.  parity="odd" is the
    omega_M tau = (2n+1) pi case, which admits no nonzero crossing
    frequencies: the table is empty.
    """
    if parity == "odd":
        return []
    if parity != "even":
        raise InvalidParamError(f"parity must be 'even' or 'odd', got {parity!r}")
    if int(n) < 1:
        raise InvalidParamError("the delay-family index n must be >= 1")
    n = int(n)
    p = normalize(params)
    wm = p.free_freq
    if mu_grid is None:
        mu_grid = np.linspace(0.05, 2.0, 40)
    ms = m_range if not isinstance(m_range, tuple) else range(m_range[0], m_range[1] + 1)
    rows: list[CurveSample] = []
    for m in ms:
        m = int(m)
        for mu in mu_grid:
            mu = float(mu)

            def h(kk: float) -> float:
                w = math.sqrt(max(0.0, 2.0 * kk * mu - mu * mu))
                ang = math.atan2(-w, mu - kk) + 2.0 * m * math.pi
                return w - wm * ang / (2.0 * n * math.pi)

            lo = mu / 2.0
            hi = max(mu, 1.0)
            flo = h(lo)
            for _ in range(80):
                if h(hi) > 0.0:
                    break
                hi *= 2.0
            else:
                continue
            fhi = h(hi)
            if flo * fhi > 0.0:
                continue
            a, b, fa = lo, hi, flo
            for _ in range(200):
                mid = 0.5 * (a + b)
                fm = h(mid)
                if abs(fm) < 1e-12 or b - a < 1e-13 * max(1.0, mid):
                    a = b = mid
                    break
                if fa * fm < 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            kk = 0.5 * (a + b)
            rows.append(
                CurveSample(m, n, mu, kk, math.sqrt(max(0.0, 2.0 * kk * mu - mu * mu)))
            )
    return rows
