"""Characteristic-root location: Lambert W seeding, polishing, and certification.

The rightmost root of a quasi-polynomial P = R + S e^{-lambda tau} governs
linear stability.  Near a root rho of the polynomial part R, writing
u = lambda - rho and linearizing R gives u e^{u tau} = -s0 tau e^{-rho tau}/R'(rho),
so u = W_k(.)/tau enumerates root chains over Lambert W branches.  Those seeds
(plus rho themselves) are polished on P by Newton or Halley iteration, and the
winner is certified by an argument-principle census over a box guaranteed to
contain any root further right.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .charfun import QuasiPolynomial
from .errors import (
    BoundaryRootError,
    BranchDomainError,
    NoConvergenceError,
)

__all__ = [
    "Scheme",
    "SpectrumEstimate",
    "CensusBox",
    "SweepRow",
    "lambert_w",
    "rightmost_root",
    "rightmost_sweep",
    "root_census",
]

_E = math.e
_EXP_NEG1 = 1.0 / math.e
_OMEGA = 0.5671432904097838  # W_0(1)


class Scheme(enum.Enum):
    NEWTON = "newton"
    HALLEY = "halley"


@dataclass(frozen=True)
class SpectrumEstimate:
    lam: complex
    scheme: Scheme
    residual: float
    certified: bool


@dataclass(frozen=True)
class CensusBox:
    re_interval: tuple[float, float]
    im_interval: tuple[float, float]
    count: int | None = None


@dataclass(frozen=True)
class SweepRow:
    tau: float
    lam: complex
    residual: float
    certified: bool


# ---------------------------------------------------------------------------
# Lambert W


def _w_seed(k: int, z: complex) -> complex:
    if k == 0:
        if abs(z) < 0.3:
            return z * (1.0 - z)
        if abs(1.0 + z) >= 0.2 and abs(z) < 4.0:
            return cmath.log(1.0 + z)
    if k == -1 and z.imag == 0.0 and -_EXP_NEG1 < z.real < 0.0:
        l1 = math.log(-z.real)
        return complex(l1 - math.log(-l1))
    big_l = cmath.log(z) + 2.0j * math.pi * k
    return big_l - cmath.log(big_l)


def lambert_w(k: int, z: complex) -> complex:
    """Branch k of the Lambert W function: w with w e^w = z.

    Halley iteration from asymptotic seeds (log z - log log z on the shifted
    logarithm sheet), with a series seed near the branch point -1/e for
    branches 0 and -1.  Inputs within 1e-14 of -1/e on those branches return
    -1 exactly.  Raises BranchDomainError for z = 0 on k != 0 and
    NoConvergenceError if the defining identity cannot be met.
    """
    z = complex(z)
    k = int(k)
    if z == 0:
        if k == 0:
            return complex(0.0)
        raise BranchDomainError("W_k(0) is unbounded for k != 0")
    if k in (0, -1):
        dz = z + _EXP_NEG1
        if abs(dz) < 1e-14:
            return complex(-1.0)
        if abs(dz) < 0.25 / _E:
            # series around the branch point: w = -1 + p - p^2/3 + 11 p^3/72
            p = cmath.sqrt(2.0 * _E * dz)
            if k == -1:
                p = -p
            w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)))
        else:
            w = _w_seed(k, z)
    else:
        w = _w_seed(k, z)

    for _ in range(100):
        ew = cmath.exp(w)
        f = w * ew - z
        if f == 0:
            return w
        wp1 = w + 1.0
        if wp1 == 0:
            w += 1e-8
            continue
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0:
            w += 1e-8
            continue
        dw = f / denom
        w -= dw
        if abs(dw) <= 2e-16 * (1.0 + abs(w)):
            break
    if abs(w * cmath.exp(w) - z) > 1e-12 * max(1.0, abs(z)):
        raise NoConvergenceError(f"Lambert W branch {k} failed at z={z}")
    return w


# ---------------------------------------------------------------------------
# Root polishing


def _pcoeffs(p: QuasiPolynomial, tau: float) -> tuple[float, float, float]:
    r0, r1, _ = (float(v) for v in p.r_coeffs(tau))
    s0 = float(p.s_coeffs(tau))
    return r0, r1, s0


def _polish(
    r0: float, r1: float, s0: float, tau: float, lam: complex, scheme: Scheme
) -> tuple[complex, float] | None:
    for _ in range(60):
        e = cmath.exp(-lam * tau) * s0
        f = (lam + r1) * lam + r0 + e
        fp = 2.0 * lam + r1 - tau * e
        if fp == 0:
            return None
        if scheme is Scheme.NEWTON:
            step = f / fp
        else:
            fpp = 2.0 + tau * tau * e
            denom = 2.0 * fp * fp - f * fpp
            if denom == 0:
                return None
            step = 2.0 * f * fp / denom
        lam = lam - step
        if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            return None
        if abs(step) <= 1e-15 * (1.0 + abs(lam)):
            break
    e = cmath.exp(-lam * tau) * s0
    res = abs((lam + r1) * lam + r0 + e)
    if res <= 1e-12 * max(1.0, abs(lam) ** 2):
        return lam, res
    return None


def _quadratic_roots(r1: float, r0: float) -> tuple[complex, complex]:
    d = cmath.sqrt(complex(r1 * r1 - 4.0 * r0))
    return (-r1 + d) / 2.0, (-r1 - d) / 2.0


def rightmost_root(
    p: QuasiPolynomial,
    tau: float | None = None,
    scheme: Scheme = Scheme.NEWTON,
    certify: bool = True,
    extra_seeds: tuple[complex, ...] = (),
) -> SpectrumEstimate:
    """Root of P with the largest real part, census-certified by default.

    Seeds: the roots rho of the polynomial part, the Lambert chains
    rho + W_k(-s0 tau e^{-rho tau}/R'(rho))/tau for k in -3..3, and any
    caller-provided warm starts.  At tau = 0 the quasi-polynomial is an exact
    quadratic and is solved in closed form.
    """
    t = p.delay if tau is None else float(tau)
    r0, r1, s0 = _pcoeffs(p, t)
    if t == 0.0:
        roots = _quadratic_roots(r1, r0 + s0)
        lam = max(roots, key=lambda r: (r.real, r.imag))
        return SpectrumEstimate(lam, scheme, 0.0, True)

    rho_pair = _quadratic_roots(r1, r0)
    seeds: list[complex] = list(extra_seeds) + list(rho_pair)
    for rho in rho_pair:
        rp = 2.0 * rho + r1
        if rp == 0:
            continue
        arg = -s0 * t * cmath.exp(-rho * t) / rp
        for k in range(-3, 4):
            try:
                seeds.append(rho + lambert_w(k, arg) / t)
            except (BranchDomainError, NoConvergenceError):
                continue

    roots_found: list[tuple[complex, float]] = []
    for seed in seeds:
        hit = _polish(r0, r1, s0, t, seed, scheme)
        if hit is None:
            continue
        lam, res = hit
        if all(abs(lam - other) > 1e-8 * (1.0 + abs(lam)) for other, _ in roots_found):
            roots_found.append((lam, res))
    if not roots_found:
        raise NoConvergenceError("no seed converged on the quasi-polynomial")
    lam, res = max(roots_found, key=lambda pair: pair[0].real)
    if lam.imag < 0.0:  # roots come in conjugate pairs; report the upper one
        lam = lam.conjugate()

    certified = False
    if certify:
        certified = _certify_rightmost(p, t, lam, r0, r1, s0)
    return SpectrumEstimate(lam, scheme, res, certified)


def _certify_rightmost(
    p: QuasiPolynomial, tau: float, lam: complex, r0: float, r1: float, s0: float
) -> bool:
    a = lam.real + 1e-6
    growth = abs(s0) * math.exp(-a * tau) if a < 0.0 else abs(s0)
    if growth > 1e10:
        return False
    m = abs(r0) + growth
    r_bound = (abs(r1) + math.sqrt(r1 * r1 + 4.0 * m)) / 2.0
    right = max(a + 1.0, 1.05 * r_bound + 0.5)
    y = r_bound + 1.0
    box = CensusBox((a, right), (-y, y))
    try:
        return root_census(p, tau, box) == 0
    except (BoundaryRootError, NoConvergenceError):
        return False


def rightmost_sweep(
    block_factory,
    tau_grid,
    scheme: Scheme = Scheme.NEWTON,
    certify: bool = True,
) -> list[SweepRow]:
    """Rightmost root along an ascending delay grid, warm-started point to point.

    ``block_factory`` maps tau to a QuasiPolynomial (pass ``p.with_delay`` for
    a delay-independent block).
    """
    rows: list[SweepRow] = []
    prev: complex | None = None
    for tau in tau_grid:
        tau = float(tau)
        p = block_factory(tau)
        warm = (prev,) if prev is not None and tau > 0.0 else ()
        est = rightmost_root(p, tau, scheme=scheme, certify=certify, extra_seeds=warm)
        rows.append(SweepRow(tau, est.lam, est.residual, est.certified))
        prev = est.lam
    return rows


# ---------------------------------------------------------------------------
# Argument-principle census


class _CensusState:
    __slots__ = ("evals", "capped", "max_evals")

    def __init__(self, max_evals: int) -> None:
        self.evals = 0
        self.capped = False
        self.max_evals = max_evals


def _census_eval(r0, r1, s0, tau, z, state: _CensusState) -> complex:
    state.evals += 1
    if state.evals > state.max_evals:
        raise NoConvergenceError("census evaluation budget exhausted")
    e = cmath.exp(-z * tau) * s0
    f = (z + r1) * z + r0 + e
    fp = 2.0 * z + r1 - tau * e
    if abs(f) <= 1e-8 * max(abs(fp), 1e-3):
        raise BoundaryRootError(f"root within ~1e-8 of census contour near {z}")
    return f


def _edge_arg(r0, r1, s0, tau, z0, z1, f0, f1, depth, state) -> float:
    dphi = cmath.phase(f1 / f0)
    if abs(dphi) < math.pi / 4.0 or depth >= 48:
        if depth >= 48:
            state.capped = True
        return dphi
    zm = 0.5 * (z0 + z1)
    fm = _census_eval(r0, r1, s0, tau, zm, state)
    return _edge_arg(r0, r1, s0, tau, z0, zm, f0, fm, depth + 1, state) + _edge_arg(
        r0, r1, s0, tau, zm, z1, fm, f1, depth + 1, state
    )


def _census_once(p, tau, rect, max_evals) -> int:
    re0, re1, im0, im1 = rect
    r0, r1, s0 = _pcoeffs(p, tau)
    corners = [
        complex(re0, im0),
        complex(re1, im0),
        complex(re1, im1),
        complex(re0, im1),
    ]
    state = _CensusState(max_evals)
    total = 0.0
    for i in range(4):
        z0, z1 = corners[i], corners[(i + 1) % 4]
        # initial subdivision keeps each recursion shallow
        pts = np.linspace(0.0, 1.0, 33)
        zs = [z0 + (z1 - z0) * t for t in pts]
        fs = [_census_eval(r0, r1, s0, tau, z, state) for z in zs]
        for j in range(32):
            total += _edge_arg(
                r0, r1, s0, tau, zs[j], zs[j + 1], fs[j], fs[j + 1], 0, state
            )
    winding = total / (2.0 * math.pi)
    count = round(winding)
    if abs(winding - count) > 0.05:
        raise NoConvergenceError(
            f"census winding {winding} is not close to an integer"
        )
    return int(count)


def root_census(
    p: QuasiPolynomial,
    tau: float | None = None,
    box: CensusBox | None = None,
    max_evals: int = 500_000,
) -> int:
    """Number of roots of P (with multiplicity) inside a rectangular box.

    Tracks the winding of P along the boundary, refining each segment until
    its phase increment is below pi/4.  If a root sits numerically on the
    contour the box is dilated slightly and the census retried (up to 6
    times) before BoundaryRootError propagates.
    """
    if box is None:
        raise ValueError("root_census requires a CensusBox")
    t = p.delay if tau is None else float(tau)
    re0, re1 = (float(v) for v in box.re_interval)
    im0, im1 = (float(v) for v in box.im_interval)
    if not (re1 > re0 and im1 > im0):
        raise ValueError("census box must have positive extent")
    size = max(re1 - re0, im1 - im0)
    last: BoundaryRootError | None = None
    for attempt in range(6):
        pad = attempt * (1e-6 + 1e-6 * size) * (1.3**attempt)
        try:
            return _census_once(p, t, (re0 - pad, re1 + pad, im0 - pad, im1 + pad), max_evals)
        except BoundaryRootError as err:
            last = err
    raise last if last is not None else BoundaryRootError("census failed")
