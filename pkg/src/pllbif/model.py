"""Network model definitions.

A network of N identical second-order phase-locked loops with all-to-all
delayed coupling is treated in four equivalent formulations:

* ``FULL_PHASE``: node phases phi_i obey
  phi_i'' + mu phi_i' = mu omega_M
  + (K mu / (N-1)) sum_{j != i} [sin(phi_j(t-tau) - phi_i) + sin(phi_j(t-tau) + phi_i)],
  the form whose phase-locked equilibria are constant vectors.
* ``PHASE``: instantaneous phases theta_i with
  theta_i'' + mu theta_i' = (K mu / (N-1)) sum_{j != i} sin(theta_j(t-tau) - theta_i - omega_M tau).
* ``PHASE_ROTATING_FRAME``: the PHASE model in a frame co-rotating at a given
  rate Omega, so synchronized rotating waves become equilibria.
* ``PHASE_DIFFERENCE``: lexicographic pair coordinates
  d_(i,j)(t) = theta_i(t) - theta_j(t-tau), a closed system for N in {2, 3}.

States interleave positions and velocities per node:
(x_1, x_1', x_2, x_2', ...).  All analysis downstream normalizes time by the
free-running frequency omega_M, so the canonical parameter set has
omega_M = 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidParamError,
    NoEquilibriumError,
    UnsupportedKindError,
)

__all__ = [
    "Branch",
    "ModelKind",
    "NetworkParams",
    "Equilibrium",
    "normalize",
    "state_dim",
    "equilibria",
    "equilibrium",
    "difference_pairs",
    "rhs",
]


class Branch(enum.Enum):
    """Which phase-locked equilibrium: cos(2 phi) = +sqrt(1-1/K^2) or the negative."""

    PLUS = "plus"
    MINUS = "minus"


class ModelKind(enum.Enum):
    FULL_PHASE = "full-phase"
    PHASE = "phase"
    PHASE_ROTATING_FRAME = "phase-rotating-frame"
    PHASE_DIFFERENCE = "phase-difference"


@dataclass(frozen=True)
class NetworkParams:
    """Physical parameters of the delay-coupled loop network.

    Attributes
    ----------
    n_nodes : int
        Number of loops N >= 2.
    coupling : float
        Coupling gain K > 0 (in units of omega_M after normalization).
    filter_gain : float
        Loop-filter rate mu > 0.
    free_freq : float
        Free-running frequency omega_M > 0; 1.0 once normalized.
    delay : float
        Transmission delay tau >= 0.
    """

    n_nodes: int
    coupling: float
    filter_gain: float
    free_freq: float = 1.0
    delay: float = 0.0

    def __post_init__(self) -> None:
        if not (isinstance(self.n_nodes, (int, np.integer)) and self.n_nodes >= 2):
            raise InvalidParamError(f"n_nodes must be an integer >= 2, got {self.n_nodes}")
        for name in ("coupling", "filter_gain", "free_freq"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidParamError(f"{name} must be finite and > 0, got {v}")
        if not (math.isfinite(self.delay) and self.delay >= 0):
            raise InvalidParamError(f"delay must be finite and >= 0, got {self.delay}")

    @property
    def is_normalized(self) -> bool:
        return self.free_freq == 1.0


def normalize(params: NetworkParams) -> NetworkParams:
    """Rescale time by omega_M: (K, mu, tau) -> (K/wM, mu/wM, wM tau), wM -> 1.

    Idempotent; every analysis routine calls this once at its boundary.
    """
    w = params.free_freq
    if w == 1.0:
        return params
    return replace(
        params,
        coupling=params.coupling / w,
        filter_gain=params.filter_gain / w,
        free_freq=1.0,
        delay=params.delay * w,
    )


def difference_pairs(n_nodes: int) -> list[tuple[int, int]]:
    """Ordered node pairs (i, j), i != j, lexicographic; the PHASE_DIFFERENCE layout."""
    return [(i, j) for i in range(n_nodes) for j in range(n_nodes) if i != j]


def state_dim(kind: ModelKind, n_nodes: int) -> int:
    if kind is ModelKind.PHASE_DIFFERENCE:
        if n_nodes > 3:
            raise UnsupportedKindError(
                "phase-difference formulation closes only for 2 or 3 nodes"
            )
        return 2 * n_nodes * (n_nodes - 1)
    return 2 * n_nodes


@dataclass(frozen=True)
class Equilibrium:
    """A phase-locked equilibrium of the FULL_PHASE model (normalized units)."""

    branch: Branch
    phi: float
    cos_two_phi: float


def equilibria(params: NetworkParams) -> list[Equilibrium]:
    """Phase-locked equilibria phi_i = phi* of the FULL_PHASE model.

    The doubled angle solves sin(2 phi) = -1/K (normalized), so representatives
    are chosen by reducing 2 phi into (-pi, pi] and halving:
    phi+ = asin(-1/K)/2, phi- = (-pi - asin(-1/K))/2.  Both lie in (-pi/2, 0]
    and coincide at K = 1 (saddle-node of equilibria).  Raises
    NoEquilibriumError for K < 1.
    """
    p = normalize(params)
    k = p.coupling
    if k < 1.0:
        raise NoEquilibriumError(
            f"phase-locked states need coupling >= free_freq (normalized K >= 1), got K={k}"
        )
    s = math.asin(-1.0 / k)
    root = math.sqrt(max(0.0, 1.0 - 1.0 / (k * k)))
    if k == 1.0:
        return [Equilibrium(Branch.PLUS, s / 2.0, 0.0)]
    return [
        Equilibrium(Branch.PLUS, s / 2.0, root),
        Equilibrium(Branch.MINUS, (-math.pi - s) / 2.0, -root),
    ]


def equilibrium(params: NetworkParams, branch: Branch) -> Equilibrium:
    """The equilibrium on a given branch; at K = 1 the coincident record, re-tagged."""
    eqs = equilibria(params)
    for eq in eqs:
        if eq.branch is branch:
            return eq
    # K == 1: single coincident record serves both labels
    return replace(eqs[0], branch=branch)


def _check_dim(kind: ModelKind, n_nodes: int, *vecs: np.ndarray) -> int:
    dim = state_dim(kind, n_nodes)
    for v in vecs:
        if v.shape != (dim,):
            raise DimensionMismatchError(
                f"expected state of shape ({dim},) for {kind.value} with N={n_nodes}, "
                f"got {v.shape}"
            )
    return dim


def _coupled_sum_full(pos: np.ndarray, dpos: np.ndarray) -> np.ndarray:
    # sum_{j != i} sin(dpos_j - pos_i) + sin(dpos_j + pos_i)
    m = np.sin(dpos[None, :] - pos[:, None]) + np.sin(dpos[None, :] + pos[:, None])
    return m.sum(axis=1) - np.diagonal(m)


def _coupled_sum_phase(pos: np.ndarray, dpos: np.ndarray, shift: float) -> np.ndarray:
    # sum_{j != i} sin(dpos_j - pos_i - shift)
    m = np.sin(dpos[None, :] - pos[:, None] - shift)
    return m.sum(axis=1) - np.diagonal(m)


def rhs(
    kind: ModelKind,
    params: NetworkParams,
    state: np.ndarray,
    delayed: np.ndarray,
    omega: float | None = None,
) -> np.ndarray:
    """Right-hand side x' = f(x(t), x(t - tau)) of the chosen formulation.

    ``omega`` is the frame rotation rate, required for PHASE_ROTATING_FRAME and
    ignored otherwise.  ``delayed`` must be the full state vector at t - tau
    (equal to ``state`` when tau = 0).
    """
    p = normalize(params)
    state = np.asarray(state, dtype=float)
    delayed = np.asarray(delayed, dtype=float)
    n = p.n_nodes
    mu = p.filter_gain
    gain = p.coupling * mu / (n - 1)

    if kind is ModelKind.PHASE_DIFFERENCE:
        _check_dim(kind, n, state, delayed)
        pairs = difference_pairs(n)
        pos = state[0::2]
        vel = state[1::2]
        dpos = delayed[0::2]
        shift = p.free_freq * p.delay
        # both per-node sums key on the pair's FIRST index: row (i,j) needs
        # sum_l sin(d_(i,l)(t) + shift) undelayed and sum_l sin(d_(j,l)(t - tau) + shift)
        und = np.zeros(n)
        dly = np.zeros(n)
        for idx, (i, j) in enumerate(pairs):
            und[i] += math.sin(pos[idx] + shift)
            dly[i] += math.sin(dpos[idx] + shift)
        out = np.empty_like(state)
        out[0::2] = vel
        for idx, (i, j) in enumerate(pairs):
            out[2 * idx + 1] = -mu * vel[idx] - gain * (und[i] - dly[j])
        return out

    _check_dim(kind, n, state, delayed)
    pos = state[0::2]
    vel = state[1::2]
    dpos = delayed[0::2]
    out = np.empty_like(state)
    out[0::2] = vel

    if kind is ModelKind.FULL_PHASE:
        acc = -mu * vel + mu * p.free_freq + gain * _coupled_sum_full(pos, dpos)
    elif kind is ModelKind.PHASE:
        acc = -mu * vel + gain * _coupled_sum_phase(pos, dpos, p.free_freq * p.delay)
    elif kind is ModelKind.PHASE_ROTATING_FRAME:
        if omega is None:
            raise UnsupportedKindError("rotating-frame evaluation needs the frame rate omega")
        shift = (omega + p.free_freq) * p.delay
        acc = -mu * (vel + omega) + gain * _coupled_sum_phase(pos, dpos, shift)
    else:  # pragma: no cover - exhaustive enum
        raise UnsupportedKindError(str(kind))
    out[1::2] = acc
    return out
