"""Geometric measure of entanglement ``E_G = 1 - max |<chi|psi>|^2``.

The maximum runs over fully separable states

    |chi> = prod_i (cos t_i |0> + e^{i p_i} sin t_i |1>).

``eg_optimize`` does multi-start block-coordinate ascent. With all other
factors fixed, the overlap is ``|<chi_i|v>|^2`` for a 2-vector ``v``
obtained by contracting ``psi`` with the other factors, so each qubit
update is solved exactly by ``chi_i = v / |v|``. The value returned is an
upper bound on ``E_G``: the ascent may stop at a local optimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import CapExceededError, RMeasureError, StateError
from .state import StateVector

GENERAL_ANSATZ_CAP = 12
MAX_SWEEPS = 500


@dataclass(frozen=True)
class ProductAnsatz:
    """Angles of a product state; ``theta`` in [0, pi/2], ``phi`` in [0, 2 pi)."""

    n: int
    theta: tuple[float, ...]
    phi: tuple[float, ...]
    symmetric: bool = False

    @classmethod
    def uniform(cls, n: int, theta: float, phi: float) -> "ProductAnsatz":
        return cls(n, (theta,) * n, (phi,) * n, symmetric=True)

    def factors(self) -> np.ndarray:
        """``(n, 2)`` complex array of single-qubit amplitudes."""
        t, p = np.asarray(self.theta), np.asarray(self.phi)
        return np.stack([np.cos(t), np.exp(1j * p) * np.sin(t)], axis=1)

    def vector(self) -> np.ndarray:
        out = np.ones(1, dtype=np.complex128)
        for f in self.factors():
            out = np.kron(out, f)
        return out

    def to_dict(self) -> dict:
        return {"n": self.n, "theta": list(self.theta), "phi": list(self.phi),
                "symmetric": self.symmetric}


def _contract(psi: StateVector, factors: np.ndarray) -> complex:
    """``<chi|psi>`` by absorbing one qubit at a time, never forming chi."""
    v = psi.amps
    for f in factors:
        v = f.conj() @ v.reshape(2, -1)
    return complex(v[0])


def overlap(psi: StateVector, chi: ProductAnsatz) -> float:
    """Squared overlap ``|<chi|psi>|^2``."""
    if chi.n != psi.n:
        raise StateError(f"ansatz has {chi.n} qubits, state has {psi.n}")
    return min(abs(_contract(psi, chi.factors())) ** 2, 1.0)


def eg_closed_w(n: int) -> float:
    """``1 - (1 - 1/n)**(n - 1)``, the exact geometric measure of ``W_n``."""
    if n < 2:
        raise RMeasureError(f"need n >= 2, got {n}")
    return -math.expm1((n - 1) * math.log1p(-1.0 / n))


def _environment(tensor: np.ndarray, factors: np.ndarray, i: int) -> np.ndarray:
    """Contract every qubit except ``i`` with its conjugated factor."""
    t = tensor
    for q in range(len(factors) - 1, -1, -1):
        if q == i:
            continue
        t = np.tensordot(t, factors[q].conj(), axes=([q], [0]))
    return t


def _angles(f: np.ndarray) -> tuple[float, float]:
    """Angles of a unit 2-vector, up to a global phase."""
    a, b = f
    theta = math.atan2(abs(b), abs(a))
    phi = (np.angle(b) - np.angle(a)) % (2 * math.pi) if abs(a) > 0 and abs(b) > 0 else 0.0
    return theta, float(phi)


def _ascend_general(psi: StateVector, factors: np.ndarray, tol: float,
                    max_sweeps: int) -> tuple[float, np.ndarray, list[float]]:
    tensor = psi.tensor()
    history = [abs(_contract(psi, factors)) ** 2]
    for _ in range(max_sweeps):
        for i in range(psi.n):
            v = _environment(tensor, factors, i)
            norm = np.linalg.norm(v)
            if norm > 0:
                factors[i] = v / norm
        history.append(abs(_contract(psi, factors)) ** 2)
        if history[-1] - history[-2] < tol:
            break
    return history[-1], factors, history


def _symmetric_objective(weight_sums: np.ndarray, n: int):
    """Overlap with a uniform product state, through Hamming-weight sums.

    ``<chi|psi> = sum_w (cos t)^(n-w) (e^{-ip} sin t)^w A_w`` where ``A_w``
    is the sum of amplitudes with ``w`` ones; cost ``O(n)`` per call.
    """
    w = np.arange(n + 1)

    def value(theta: float, phi: float) -> float:
        c, s = math.cos(theta), math.sin(theta)
        coeff = c ** (n - w) * s ** w * np.exp(-1j * phi * w)
        return min(abs(np.dot(coeff, weight_sums)) ** 2, 1.0)

    return value


def _ascend_symmetric(value, theta: float, phi: float, tol: float,
                      max_sweeps: int) -> tuple[float, float, float, list[float]]:
    history = [value(theta, phi)]
    for _ in range(max_sweeps):
        res = minimize_scalar(lambda t: -value(t, phi), bounds=(0.0, math.pi / 2),
                              method="bounded", options={"xatol": 1e-12})
        if -res.fun > value(theta, phi):
            theta = float(res.x)
        res = minimize_scalar(lambda p: -value(theta, p), bounds=(0.0, 2 * math.pi),
                              method="bounded", options={"xatol": 1e-12})
        if -res.fun > value(theta, phi):
            phi = float(res.x)
        history.append(value(theta, phi))
        if history[-1] - history[-2] < tol:
            break
    return history[-1], theta, phi, history


@dataclass
class GeometricResult:
    """Outcome of ``eg_optimize``; unpacks as ``(value, ansatz)``."""

    value: float
    ansatz: ProductAnsatz
    overlap: float
    restarts: int
    sweeps: list[int]

    def __iter__(self):
        return iter((self.value, self.ansatz))


def eg_optimize(psi: StateVector, restarts: int = 32, tol: float = 1e-10,
                seed: int | None = 0, symmetric: bool = False,
                max_sweeps: int = MAX_SWEEPS) -> GeometricResult:
    """Upper bound on ``E_G(psi)`` from multi-start coordinate ascent.

    Parameters
    ----------
    restarts : int
        Number of uniformly random starting points. Starts are drawn in
        sequence from one generator, so more restarts never lowers the best
        overlap found for a given seed.
    tol : float
        A start stops once a full sweep gains less than ``tol``.
    symmetric : bool
        Restrict to ``theta_i = theta``, ``phi_i = phi`` for all qubits. Works
        for any state size within the state-vector cap; the general ansatz
        is limited to 12 qubits.

    Returns
    -------
    GeometricResult
        ``value = 1 - best overlap`` and the maximizing ansatz.
    """
    if restarts < 1:
        raise RMeasureError(f"restarts must be >= 1, got {restarts}")
    if not tol > 0:
        raise RMeasureError(f"tol must be positive, got {tol}")
    n = psi.n
    if not symmetric and n > GENERAL_ANSATZ_CAP:
        raise CapExceededError(
            f"general ansatz limited to n <= {GENERAL_ANSATZ_CAP}; use symmetric=True")
    rng = np.random.default_rng(seed)
    best, best_ansatz, sweeps = -1.0, None, []

    if symmetric:
        weights = np.bitwise_count(np.arange(psi.dim, dtype=np.uint64))
        sums = np.bincount(weights, weights=psi.amps.real, minlength=n + 1) \
            + 1j * np.bincount(weights, weights=psi.amps.imag, minlength=n + 1)
        value = _symmetric_objective(sums, n)
        for _ in range(restarts):
            t0, p0 = rng.uniform(0, math.pi / 2), rng.uniform(0, 2 * math.pi)
            ov, t, p, hist = _ascend_symmetric(value, t0, p0, tol, max_sweeps)
            sweeps.append(len(hist) - 1)
            if ov > best:
                best, best_ansatz = ov, ProductAnsatz.uniform(n, t, p)
    else:
        for _ in range(restarts):
            t0 = rng.uniform(0, math.pi / 2, n)
            p0 = rng.uniform(0, 2 * math.pi, n)
            factors = np.stack([np.cos(t0), np.exp(1j * p0) * np.sin(t0)], axis=1)
            ov, factors, hist = _ascend_general(psi, factors, tol, max_sweeps)
            sweeps.append(len(hist) - 1)
            if ov > best:
                angles = [_angles(f) for f in factors]
                best = ov
                best_ansatz = ProductAnsatz(n, tuple(a[0] for a in angles),
                                            tuple(a[1] for a in angles))
    best = min(best, 1.0)
    return GeometricResult(1.0 - best, best_ansatz, best, restarts, sweeps)
