"""Characteristic functions and their symmetry block structure.

Linearizing any of the network formulations at a synchronized state gives a
characteristic matrix Delta(lambda) = lambda I - A0 - Atau e^{-lambda tau}
whose permutation symmetry forces a block decomposition into one
"synchronized" block (multiplicity 1) and one "symmetry-breaking" block
(multiplicity N - 1).  Each block is a quasi-polynomial

    P(lambda, tau) = R(lambda, tau) + S(lambda, tau) e^{-lambda tau}

with R monic quadratic in lambda and S constant in lambda.  Coefficients are
held as providers tau -> value so the same machinery covers delay-independent
coefficients (full-phase model) and delay-dependent ones (phase model along a
rotating-wave branch, where the modal gain is K mu cos(Omega_hat(tau) tau)).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np

from .errors import IndexOutOfRangeError, UnsupportedKindError
from .model import (
    Branch,
    Equilibrium,
    ModelKind,
    NetworkParams,
    normalize,
)

__all__ = [
    "BlockKind",
    "QuasiPolynomial",
    "BlockSet",
    "constant_quasi_polynomial",
    "build_blocks",
    "blocks_from_gain",
    "full_determinant",
    "isotypic_basis",
]


class BlockKind(enum.Enum):
    FIX = "fix"
    STANDARD = "standard"


RProvider = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]
SProvider = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuasiPolynomial:
    """P(lambda, tau) = r2 lambda^2 + r1 lambda + r0 + s0 e^{-lambda tau}.

    ``r_coeffs``/``s_coeffs`` map tau (scalar or array) to coefficient values;
    ``dr_coeffs``/``ds_coeffs`` are their tau-derivatives (None means
    identically zero, i.e. delay-independent coefficients).  ``delay`` is the
    evaluation default; ``role`` tags which symmetry block this is, when known.
    """

    r_coeffs: RProvider
    s_coeffs: SProvider
    delay: float
    dr_coeffs: RProvider | None = None
    ds_coeffs: SProvider | None = None
    role: BlockKind | None = None

    def with_delay(self, tau: float) -> "QuasiPolynomial":
        return replace(self, delay=float(tau))

    @property
    def tau_dependent(self) -> bool:
        return self.dr_coeffs is not None or self.ds_coeffs is not None

    def eval(self, lam: complex, tau: float | None = None) -> complex:
        """P(lambda, tau); tau defaults to the stored delay."""
        t = self.delay if tau is None else tau
        r0, r1, r2 = self.r_coeffs(t)
        s0 = self.s_coeffs(t)
        lam = complex(lam)
        return (r2 * lam + r1) * lam + r0 + s0 * np.exp(-lam * t)

    def eval_many(self, lam: np.ndarray, tau: float | None = None) -> np.ndarray:
        t = self.delay if tau is None else tau
        r0, r1, r2 = self.r_coeffs(t)
        s0 = self.s_coeffs(t)
        lam = np.asarray(lam, dtype=complex)
        return (r2 * lam + r1) * lam + r0 + s0 * np.exp(-lam * t)

    def b_c(self, tau: float | np.ndarray | None = None):
        """Coefficients (b, c) of |R(i w)|^2 - |S|^2 = w^4 + b w^2 + c."""
        t = self.delay if tau is None else tau
        r0, r1, _ = self.r_coeffs(t)
        s0 = self.s_coeffs(t)
        return r1 * r1 - 2.0 * r0, r0 * r0 - s0 * s0

    def coefficient_derivatives(self, tau: float):
        """(dr0, dr1, dr2, ds0) at tau; zeros when providers are absent."""
        if self.dr_coeffs is None:
            dr = (0.0, 0.0, 0.0)
        else:
            dr = self.dr_coeffs(tau)
        ds = 0.0 if self.ds_coeffs is None else self.ds_coeffs(tau)
        return dr[0], dr[1], dr[2], ds


def constant_quasi_polynomial(
    r0: float, r1: float, s0: float, delay: float, role: BlockKind | None = None
) -> QuasiPolynomial:
    """Quasi-polynomial with delay-independent coefficients (r2 = 1)."""

    def r_coeffs(tau):
        shaped = np.zeros_like(np.asarray(tau, dtype=float))
        return r0 + shaped, r1 + shaped, 1.0 + shaped

    def s_coeffs(tau):
        return s0 + np.zeros_like(np.asarray(tau, dtype=float))

    return QuasiPolynomial(r_coeffs, s_coeffs, float(delay), role=role)


@dataclass(frozen=True)
class BlockSet:
    """The two distinct characteristic blocks; standard has multiplicity N - 1."""

    fix: QuasiPolynomial
    standard: QuasiPolynomial
    n_nodes: int

    @property
    def multiplicities(self) -> tuple[int, int]:
        return 1, self.n_nodes - 1


def blocks_from_gain(
    params: NetworkParams,
    gain: SProvider | float,
    dgain: SProvider | None = None,
    delay: float | None = None,
) -> BlockSet:
    """Blocks of the sin-coupled phase formulations at modal gain a.

    With a = K mu cos(<locked argument>), the synchronized block is
    lambda^2 + mu lambda + a - a e^{-lambda tau} and the symmetry-breaking
    block is lambda^2 + mu lambda + a + (a/(N-1)) e^{-lambda tau}.
    ``gain`` may be a constant or a provider tau -> a(tau) with optional
    derivative provider ``dgain``.
    """
    p = normalize(params)
    n = p.n_nodes
    mu = p.filter_gain
    tau0 = p.delay if delay is None else float(delay)

    if callable(gain):
        a_of = gain
    else:
        a_val = float(gain)

        def a_of(tau):
            return a_val + np.zeros_like(np.asarray(tau, dtype=float))

    def r_coeffs(tau):
        a = a_of(tau)
        z = np.zeros_like(np.asarray(tau, dtype=float))
        return a, mu + z, 1.0 + z

    def s_fix(tau):
        return -a_of(tau)

    def s_std(tau):
        return a_of(tau) / (n - 1)

    dr = ds_f = ds_s = None
    if dgain is not None:

        def dr(tau):
            z = np.zeros_like(np.asarray(tau, dtype=float))
            return dgain(tau), z, z

        def ds_f(tau):
            return -dgain(tau)

        def ds_s(tau):
            return dgain(tau) / (n - 1)

    fix = QuasiPolynomial(r_coeffs, s_fix, tau0, dr, ds_f, role=BlockKind.FIX)
    std = QuasiPolynomial(r_coeffs, s_std, tau0, dr, ds_s, role=BlockKind.STANDARD)
    return BlockSet(fix, std, n)


Point = Union[Equilibrium, float, Callable[[float], float], "object"]


def build_blocks(kind: ModelKind, params: NetworkParams, point: Point) -> BlockSet:
    """Characteristic blocks of ``kind`` linearized at ``point``.

    * FULL_PHASE: ``point`` is an Equilibrium; coefficients are
      q = K mu (1 - cos 2phi), S_fix = -K mu (1 + cos 2phi),
      S_std = +K mu (1 + cos 2phi)/(N-1).
    * PHASE / PHASE_ROTATING_FRAME: ``point`` is the locked rotation rate
      Omega_hat (a float, treated as tau-independent) or an object with
      ``omega_hat(tau)`` / ``omega_hat_prime(tau)`` methods (a rotating-wave
      branch; coefficients then depend on tau).
    * PHASE_DIFFERENCE (N <= 3): ``point`` is the constant pairwise difference
      C; the returned pair are the non-fictitious blocks at modal gain
      a = K mu cos(C + omega_M tau).
    """
    p = normalize(params)
    mu = p.filter_gain
    k = p.coupling

    if kind is ModelKind.FULL_PHASE:
        if not isinstance(point, Equilibrium):
            raise UnsupportedKindError("full-phase blocks are built at an Equilibrium")
        c2 = point.cos_two_phi
        q = k * mu * (1.0 - c2)
        s = k * mu * (1.0 + c2)
        fix = constant_quasi_polynomial(q, mu, -s, p.delay, role=BlockKind.FIX)
        std = constant_quasi_polynomial(
            q, mu, s / (p.n_nodes - 1), p.delay, role=BlockKind.STANDARD
        )
        return BlockSet(fix, std, p.n_nodes)

    if kind in (ModelKind.PHASE, ModelKind.PHASE_ROTATING_FRAME):
        if hasattr(point, "omega_hat"):
            branch = point

            def a_of(tau):
                t = np.asarray(tau, dtype=float)
                return k * mu * np.cos(branch.omega_hat(t) * t)

            def da_of(tau):
                t = np.asarray(tau, dtype=float)
                oh = branch.omega_hat(t)
                arg = oh * t
                # d/dtau [cos(Omega_hat tau)] with Omega_hat' from the locked
                # frequency relation: Omega_hat + tau Omega_hat' = Omega_hat/(1 + tau K cos).
                return -k * mu * np.sin(arg) * oh / (1.0 + t * k * np.cos(arg))

            return blocks_from_gain(p, a_of, da_of)
        omega_hat = float(point)

        def a_const(tau):
            t = np.asarray(tau, dtype=float)
            return k * mu * np.cos(omega_hat * t)

        def da_const(tau):
            t = np.asarray(tau, dtype=float)
            return -k * mu * np.sin(omega_hat * t) * omega_hat

        return blocks_from_gain(p, a_const, da_const)

    if kind is ModelKind.PHASE_DIFFERENCE:
        if p.n_nodes > 3:
            raise UnsupportedKindError(
                "phase-difference blocks are defined for 2 or 3 nodes"
            )
        c_const = float(point)

        def a_of(tau):
            t = np.asarray(tau, dtype=float)
            return k * mu * np.cos(c_const + p.free_freq * t)

        return blocks_from_gain(p, a_of)

    raise UnsupportedKindError(str(kind))


def _linearization_matrices(
    kind: ModelKind, params: NetworkParams, point: Point
) -> tuple[np.ndarray, np.ndarray]:
    """(A0, Atau) of the 2N-dimensional first-order linearization.

    Assembled entry-by-entry from partial derivatives of the right-hand side,
    independent of the block formulas (the product identity test leans on
    that independence).
    """
    p = normalize(params)
    n = p.n_nodes
    mu = p.filter_gain
    k = p.coupling

    if kind is ModelKind.FULL_PHASE:
        if not isinstance(point, Equilibrium):
            raise UnsupportedKindError("full-phase linearization needs an Equilibrium")
        c2 = point.cos_two_phi
        diag = k * mu * (-1.0 + c2)  # d(acc_i)/d(pos_i)
        off = k * mu * (1.0 + c2) / (n - 1)  # d(acc_i)/d(delayed pos_j)
    elif kind in (ModelKind.PHASE, ModelKind.PHASE_ROTATING_FRAME):
        if hasattr(point, "omega_hat"):
            oh = float(point.omega_hat(p.delay))
        else:
            oh = float(point)
        c = np.cos(oh * p.delay)
        diag = -k * mu * c
        off = k * mu * c / (n - 1)
    else:
        raise UnsupportedKindError(f"no 2N-dimensional linearization for {kind}")

    a0 = np.zeros((2 * n, 2 * n))
    atau = np.zeros((2 * n, 2 * n))
    for i in range(n):
        a0[2 * i, 2 * i + 1] = 1.0
        a0[2 * i + 1, 2 * i] = diag
        a0[2 * i + 1, 2 * i + 1] = -mu
        for j in range(n):
            if j != i:
                atau[2 * i + 1, 2 * j] = off
    return a0, atau


def full_determinant(
    kind: ModelKind, params: NetworkParams, point: Point, lam: complex
) -> complex:
    """det(lambda I - A0 - Atau e^{-lambda tau}) of the full linearization."""
    p = normalize(params)
    a0, atau = _linearization_matrices(kind, p, point)
    lam = complex(lam)
    m = lam * np.eye(2 * p.n_nodes, dtype=complex) - a0 - atau * np.exp(-lam * p.delay)
    return complex(np.linalg.det(m))


def isotypic_basis(n_nodes: int, j: int) -> np.ndarray:
    """Rows spanning the j-th cyclic isotypic component of the node space.

    Returns a (2, 2N) complex array: two orthonormal rows whose position and
    velocity entries carry the root-of-unity pattern
    lambda_kj = exp(2 pi i (k j mod N) / N) / sqrt(N), interleaved with zeros.
    j = 0 spans the synchronized (fixed) subspace; j = 1..N-1 together span the
    symmetry-breaking complement.  Stacking all j block-diagonalizes the
    characteristic matrix.
    """
    if not 0 <= j < n_nodes:
        raise IndexOutOfRangeError(f"component index {j} outside 0..{n_nodes - 1}")
    k = np.arange(n_nodes)
    lam = np.exp(2.0 * np.pi * 1j * ((k * j) % n_nodes) / n_nodes) / np.sqrt(n_nodes)
    rows = np.zeros((2, 2 * n_nodes), dtype=complex)
    rows[0, 0::2] = lam
    rows[1, 1::2] = lam
    return rows
