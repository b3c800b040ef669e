"""Closed-form R_m for permutation-symmetric states.

For a state invariant under qubit permutations, eta depends only on the
subsystem size and xi only on the partition shape, so

    ln R_m = sum over shapes of (h(shape) / S(n, m)) * ln xi(shape)

with ``h`` the number of set partitions of that shape. This runs in
``O(p(n) * n)`` for ``p(n)`` integer partitions instead of the Bell number.

Eta tables for the GHZ, W and Dicke families are computed in exact
rational arithmetic and only converted to floats for the logarithm.
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import RMeasureError, SymmetryError
from .measures import EPS_SEP, MeasureReport, eta
from .partitions import STIRLING_MAX_N, iter_shapes, multiplicity, stirling2
from .state import QubitSubset, StateVector

SYMMETRY_TOL = 1e-10


def _norm_exact(size: int) -> Fraction:
    return Fraction(2**size, 2**size - 1)


def _check_size(n: int, size: int) -> None:
    if not 1 <= size <= n - 1:
        raise RMeasureError(f"need 1 <= size <= n-1, got n={n}, size={size}")


def eta_ghz(n: int, size: int, exact: bool = False):
    """``N(size) / 2``: every marginal of GHZ has purity 1/2."""
    _check_size(n, size)
    val = _norm_exact(size) / 2
    return val if exact else float(val)


def eta_w(n: int, size: int, exact: bool = False):
    """``N(size) * 2 size (n - size) / n^2`` for the W state."""
    _check_size(n, size)
    val = _norm_exact(size) * Fraction(2 * size * (n - size), n * n)
    return val if exact else float(val)


def eta_dicke(n: int, k: int, size: int, exact: bool = False):
    """Eta of a ``size``-qubit marginal of the Dicke state with ``k`` excitations.

    ``N(size) * (1 - sum_r C(size, r)^2 C(n - size, k - r)^2 / C(n, k)^2)``
    with ``r`` running over ``max(0, size - (n - k)) .. min(size, k)``.
    Valid for any ``0 <= k <= n``.
    """
    _check_size(n, size)
    if not 0 <= k <= n:
        raise RMeasureError(f"need 0 <= k <= n, got n={n}, k={k}")
    lo, hi = max(0, size - (n - k)), min(size, k)
    total = sum(math.comb(size, r) ** 2 * math.comb(n - size, k - r) ** 2
                for r in range(lo, hi + 1))
    val = _norm_exact(size) * (1 - Fraction(total, math.comb(n, k) ** 2))
    return val if exact else float(val)


@dataclass(frozen=True)
class EtaProfile:
    """Eta of a symmetric ``n``-qubit state as a function of subsystem size.

    ``eta_by_size[j - 1]`` is eta for any subsystem of ``j`` qubits,
    ``j = 1..n-1``. Values are already clamped at ``eps_sep``.
    """

    n: int
    eta_by_size: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        if self.n < 2 or len(self.eta_by_size) != self.n - 1:
            raise RMeasureError("profile needs n >= 2 and n - 1 eta values")

    def __getitem__(self, size: int) -> float:
        return self.eta_by_size[size - 1]


def _profile(n: int, values, label: str, eps_sep: float) -> EtaProfile:
    vals = tuple(0.0 if float(v) < eps_sep else float(v) for v in values)
    return EtaProfile(n, vals, label)


def ghz_profile(n: int, eps_sep: float = EPS_SEP) -> EtaProfile:
    return _profile(n, (eta_ghz(n, j, exact=True) for j in range(1, n)), f"ghz:{n}", eps_sep)


def w_profile(n: int, eps_sep: float = EPS_SEP) -> EtaProfile:
    return _profile(n, (eta_w(n, j, exact=True) for j in range(1, n)), f"w:{n}", eps_sep)


def dicke_profile(n: int, k: int, eps_sep: float = EPS_SEP) -> EtaProfile:
    return _profile(n, (eta_dicke(n, k, j, exact=True) for j in range(1, n)),
                    f"dicke:{n},{k}", eps_sep)


def is_symmetric(psi: StateVector, tol: float = SYMMETRY_TOL) -> bool:
    """True if the amplitudes are constant on each Hamming-weight class."""
    weights = np.bitwise_count(np.arange(psi.dim, dtype=np.uint64))
    for w in range(psi.n + 1):
        cls = psi.amps[weights == w]
        if np.max(np.abs(cls - cls[0])) > tol:
            return False
    return True


def eta_profile_from_state(psi: StateVector, eps_sep: float = EPS_SEP,
                           label: str = "") -> EtaProfile:
    """Eta profile of a permutation-symmetric state, one purity per size.

    Raises
    ------
    SymmetryError
        If amplitudes differ within some Hamming-weight class by more than
        ``1e-10``.
    """
    if psi.n < 2:
        raise RMeasureError("profile needs at least two qubits")
    if not is_symmetric(psi):
        raise SymmetryError("state is not invariant under qubit permutations")
    vals = [eta(psi, QubitSubset(psi.n, (1 << j) - 1), eps_sep) for j in range(1, psi.n)]
    return EtaProfile(psi.n, tuple(vals), label)


def shape_weight(shape) -> float:
    """``h(shape) / S(n, m)`` as a correctly rounded double."""
    # int / int true division in Python is correctly rounded for any size
    return multiplicity(shape) / stirling2(sum(shape), len(shape))


def _check_m(n: int, m: int) -> None:
    if not 2 <= m <= n:
        raise RMeasureError(f"need 2 <= m <= n, got n={n}, m={m}")
    if n > STIRLING_MAX_N:
        raise RMeasureError(f"n={n} exceeds the fast-path limit of {STIRLING_MAX_N}")


def shape_xi(profile: EtaProfile, shape) -> float:
    return math.fsum(profile[s] for s in shape) / len(shape)


@lru_cache(maxsize=64)
def shape_table(n: int) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Per block count ``m``: the shapes of ``G(n, m)`` and their weights.

    Maps ``m`` to ``(parts, weights)`` where ``parts`` is an int array of
    shape ``(|G(n, m)|, m)`` (one ascending shape per row, lexicographic
    order) and ``weights[i] = h(shape_i) / S(n, m)``. Cached and read-only.
    """
    grouped: dict[int, list] = {}
    for shape in iter_shapes(n):
        grouped.setdefault(len(shape), []).append(shape)
    table = {}
    for m, group in grouped.items():
        parts = np.array(group, dtype=np.int16).reshape(len(group), m)
        s_nm = stirling2(n, m)
        weights = np.array([multiplicity(sh) / s_nm for sh in group])
        parts.flags.writeable = False
        weights.flags.writeable = False
        table[m] = (parts, weights)
    return table


def _r_from_table(etas: np.ndarray, parts: np.ndarray, weights: np.ndarray) -> float:
    m = parts.shape[1]
    xis = etas[parts].sum(axis=1) / m
    if np.any(xis <= 0.0):
        return 0.0
    return math.exp(math.fsum((weights * np.log(xis)).tolist()))


def _padded(profile: EtaProfile) -> np.ndarray:
    # index by size directly; slot 0 and slot n are unused
    return np.array((0.0,) + profile.eta_by_size + (0.0,))


def r_symmetric(profile: EtaProfile, m: int) -> float:
    """``R_m`` of a symmetric state from its eta profile, summing over shapes.

    Exact 0 when the mean eta of any shape vanishes.
    """
    n = profile.n
    _check_m(n, m)
    parts, weights = shape_table(n)[m]
    return _r_from_table(_padded(profile), parts, weights)


def r_symmetric_all(profile: EtaProfile, ms=None) -> dict[int, float]:
    """``R_m`` for several ``m`` (default ``2..n``) sharing one shape table."""
    n = profile.n
    ms = sorted(set(range(2, n + 1) if ms is None else ms))
    for m in ms:
        _check_m(n, m)
    table = shape_table(n)
    etas = _padded(profile)
    return {m: _r_from_table(etas, *table[m]) for m in ms}


FAMILIES = ("ghz", "w", "dicke")


def family_profile(family: str, n: int, k: int = 0, eps_sep: float = EPS_SEP) -> EtaProfile:
    if family == "ghz":
        return ghz_profile(n, eps_sep)
    if family == "w":
        return w_profile(n, eps_sep)
    if family == "dicke":
        return dicke_profile(n, k, eps_sep)
    raise RMeasureError(f"unknown family {family!r}; expected one of {FAMILIES}")


def sweep(family: str, n_range, m_range=None, k: int = 0,
          eps_sep: float = EPS_SEP) -> list[tuple]:
    """Rows ``(family, n, k, m, R_m, zero_flag)`` over an (n, m) grid.

    ``m_range`` defaults to ``2..n`` for each ``n``; values outside that
    range are skipped. ``k`` is reported as 0 for GHZ and W.
    """
    rows = []
    k_out = k if family == "dicke" else 0
    for n in n_range:
        profile = family_profile(family, n, k, eps_sep)
        ms = [m for m in (m_range if m_range is not None else range(2, n + 1)) if 2 <= m <= n]
        for m, value in r_symmetric_all(profile, ms).items():
            rows.append((family, n, k_out, m, value, value == 0.0))
    return rows


def symmetric_report(profile: EtaProfile, ms=None, tag: str = "") -> MeasureReport:
    """``MeasureReport`` from the fast path; per-shape counts are ``h(shape)``."""
    n = profile.n
    values = r_symmetric_all(profile, ms)
    table = shape_table(n)
    etas = _padded(profile)
    per_shape = {}
    for m in values:
        parts, _ = table[m]
        xis = etas[parts].sum(axis=1) / m
        for row, x in zip(parts.tolist(), xis.tolist()):
            per_shape[(m, tuple(row))] = (multiplicity(row), x)
    flags = {m: v == 0.0 for m, v in values.items()}
    return MeasureReport(n, values, flags, per_shape=per_shape,
                         tag=tag or profile.label, path="symmetric")
