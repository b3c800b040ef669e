"""Pure n-qubit states and reduced-subsystem purities.

Basis convention: the amplitude index encodes the bitstring
``q_1 q_2 ... q_n`` with qubit 1 as the most significant bit, so
``|q_1 q_2 ... q_n>`` reads left to right like the ket.

Subsystems are bit masks where qubit ``q`` (1-based) maps to bit ``q - 1``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError, StateError

MAX_QUBITS = 28
"""Largest qubit count accepted for an explicit state vector."""

MAX_DENSITY_QUBITS = 12
"""Largest subsystem for which ``reduced_density`` materializes a matrix."""

RENORM_WARN = 1e-6


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over ``n`` qubits.

    Instances are immutable; the amplitude array is flagged read-only.
    ``renormalized`` is True when the input norm deviated from one by more
    than ``1e-6`` before being rescaled.
    """

    n: int
    amps: np.ndarray = field(repr=False)
    renormalized: bool = False

    @property
    def dim(self) -> int:
        return 1 << self.n

    def tensor(self) -> np.ndarray:
        """Amplitudes as an ``(2,)*n`` array; axis ``q`` is qubit ``q + 1``."""
        return self.amps.reshape((2,) * self.n)


@dataclass(frozen=True, order=True)
class QubitSubset:
    """A subset of the qubits ``{1..n}`` stored as a bit mask."""

    n: int
    mask: int

    def __post_init__(self):
        if self.n < 1:
            raise StateError(f"qubit count must be positive, got {self.n}")
        if self.mask < 0 or self.mask >> self.n:
            raise StateError(f"mask {self.mask:#x} does not fit in {self.n} qubits")

    @classmethod
    def of(cls, n: int, qubits: Iterable[int]) -> "QubitSubset":
        """Build from 1-based qubit labels."""
        mask = 0
        for q in qubits:
            if not 1 <= q <= n:
                raise StateError(f"qubit {q} outside 1..{n}")
            mask |= 1 << (q - 1)
        return cls(n, mask)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q + 1 for q in range(self.n) if self.mask >> q & 1)

    def complement(self) -> "QubitSubset":
        return QubitSubset(self.n, self.full_mask ^ self.mask)

    def is_proper(self) -> bool:
        return 0 < self.mask < self.full_mask


def _check_n(n: int) -> None:
    if n < 1:
        raise StateError(f"qubit count must be positive, got {n}")
    if n > MAX_QUBITS:
        raise CapExceededError(
            f"{n} qubits exceeds the state-vector cap of {MAX_QUBITS}")


def make_state(n: int, amps) -> StateVector:
    """Wrap ``amps`` as an ``n``-qubit state, renormalizing to unit norm.

    Raises
    ------
    StateError
        If the length is not ``2**n`` or the vector is zero.
    """
    _check_n(n)
    vec = np.array(amps, dtype=np.complex128).reshape(-1)
    if vec.shape[0] != 1 << n:
        raise StateError(f"expected {1 << n} amplitudes for n={n}, got {vec.shape[0]}")
    if not np.all(np.isfinite(vec)):
        raise StateError("amplitudes must be finite")
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise StateError("zero vector is not a state")
    flagged = abs(norm - 1.0) > RENORM_WARN
    if flagged:
        warnings.warn(f"input norm {norm:.6g} renormalized to 1", stacklevel=2)
    vec = vec / norm
    vec.flags.writeable = False
    return StateVector(n, vec, flagged)


def basis_state(bits: str) -> StateVector:
    """Computational basis state from a bitstring like ``"0110"``."""
    if not bits or set(bits) - {"0", "1"}:
        raise StateError(f"not a bitstring: {bits!r}")
    n = len(bits)
    _check_n(n)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return make_state(n, amps)


def zero_state(n: int) -> StateVector:
    return basis_state("0" * n)


def ghz(n: int) -> StateVector:
    """``(|0...0> + |1...1>)/sqrt(2)``."""
    if n < 2:
        raise StateError(f"GHZ needs n >= 2, got {n}")
    _check_n(n)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return make_state(n, amps)


def dicke(n: int, k: int) -> StateVector:
    """Equal superposition of all basis states with exactly ``k`` ones."""
    _check_n(n)
    if not 0 <= k <= n:
        raise StateError(f"need 0 <= k <= n, got n={n}, k={k}")
    weights = np.bitwise_count(np.arange(1 << n, dtype=np.uint64))
    amps = np.where(weights == k, 1 / math.sqrt(math.comb(n, k)), 0.0).astype(np.complex128)
    return make_state(n, amps)


def w_state(n: int) -> StateVector:
    return dicke(n, 1)


def product(parts: Sequence[StateVector]) -> StateVector:
    """Tensor product; ``parts[0]`` occupies the lowest-numbered qubits."""
    if not parts:
        raise StateError("product needs at least one factor")
    n = sum(p.n for p in parts)
    _check_n(n)
    amps = parts[0].amps
    for p in parts[1:]:
        amps = np.kron(amps, p.amps)
    return make_state(n, amps)


def haar_random(n: int, rng: np.random.Generator | int | None = None) -> StateVector:
    rng = np.random.default_rng(rng)
    z = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return make_state(n, z / np.linalg.norm(z))


def _bipartition_matrix(psi: StateVector, mask: int) -> np.ndarray:
    """Reshape amplitudes to a matrix with rows indexed by the qubits in ``mask``."""
    keep = [q for q in range(psi.n) if mask >> q & 1]
    rest = [q for q in range(psi.n) if not mask >> q & 1]
    t = psi.tensor().transpose(keep + rest)
    return t.reshape(1 << len(keep), 1 << len(rest))


def _subset(psi: StateVector, s: QubitSubset) -> QubitSubset:
    if s.n != psi.n:
        raise StateError(f"subset is over {s.n} qubits, state has {psi.n}")
    if not s.is_proper():
        raise StateError("subsystem must be a proper nonempty subset")
    return s


def purity_from_mask(psi: StateVector, mask: int) -> float:
    """``tr rho_s^2`` for the subsystem with bit mask ``mask`` (no validation)."""
    m = _bipartition_matrix(psi, mask)
    rows, cols = m.shape
    # Gram matrix on the smaller side; both sides share the nonzero spectrum.
    g = m @ m.conj().T if rows <= cols else m.conj().T @ m
    return float(np.vdot(g, g).real)


def reduced_purity(psi: StateVector, s: QubitSubset) -> float:
    """Purity ``tr rho_s^2`` of the reduced state on subsystem ``s``.

    The result lies in ``[2**-min(|s|, n-|s|), 1]``. Only the Gram matrix
    of the smaller side of the bipartition is ever formed.
    """
    return purity_from_mask(psi, _subset(psi, s).mask)


def reduced_density(psi: StateVector, s: QubitSubset) -> np.ndarray:
    """Reduced density matrix ``tr_{s-bar} |psi><psi|`` on ``s``.

    Rows and columns are ordered by the bitstring of the qubits in ``s``
    taken in ascending label order.
    """
    _subset(psi, s)
    if s.size > MAX_DENSITY_QUBITS:
        raise CapExceededError(
            f"|s|={s.size} exceeds the density-matrix cap of {MAX_DENSITY_QUBITS}")
    m = _bipartition_matrix(psi, s.mask)
    return m @ m.conj().T
