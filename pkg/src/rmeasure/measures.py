"""The R_m family for arbitrary pure states by exhaustive enumeration.

For a subsystem ``s`` the normalized linear entropy is

    eta_s = N(|s|) (1 - tr rho_s^2),   N(k) = 2^k / (2^k - 1),

which is 0 iff the state factorizes across ``s | s-bar`` and 1 when
``rho_s`` is maximally mixed. A set partition ``P`` gets the mean
``xi_P`` of eta over its blocks, and ``R_m`` is the geometric mean of
``xi_P`` over all partitions with ``m`` blocks. ``R_m = 0`` iff the state
splits into at least ``m`` factors.

Eta values smaller than ``eps_sep`` are clamped to exactly zero so that a
floating-point product state yields an exact zero.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceededError, NumericError, RMeasureError, StateError
from .partitions import (
    ENUMERATION_CAP,
    SetPartition,
    Shape,
    block_masks,
    rgs_array,
    stirling2,
)
from .state import QubitSubset, StateVector, purity_from_mask

EPS_SEP = 1e-9
GENERIC_CAP = 12
"""Largest n for which every m is evaluated by full enumeration."""
NEAR_DIAGONAL_GAP = 2
"""Up to ENUMERATION_CAP qubits, m >= n - NEAR_DIAGONAL_GAP stays enumerable."""


def norm_factor(size: int) -> float:
    """``N(size) = 2**size / (2**size - 1)``."""
    return 2.0**size / (2.0**size - 1.0)


def _clamp(value: float, eps_sep: float) -> float:
    return 0.0 if value < eps_sep else value


def eta(psi: StateVector, s: QubitSubset, eps_sep: float = EPS_SEP) -> float:
    """Normalized linear entropy of subsystem ``s``; exact 0 below ``eps_sep``."""
    if s.n != psi.n:
        raise StateError(f"subset is over {s.n} qubits, state has {psi.n}")
    if not s.is_proper():
        raise StateError("subsystem must be a proper nonempty subset")
    raw = norm_factor(s.size) * (1.0 - purity_from_mask(psi, s.mask))
    return _clamp(raw, eps_sep)


class EtaCache:
    """Eta values of one state, keyed by subset mask and filled on demand.

    Stored densely (one slot per mask, NaN when not yet computed). Call
    ``fill_all`` before sharing the table across worker processes.
    """

    def __init__(self, psi: StateVector, eps_sep: float = EPS_SEP):
        if psi.n > ENUMERATION_CAP:
            raise CapExceededError(
                f"eta table for n={psi.n} exceeds the cap of {ENUMERATION_CAP} qubits")
        self.psi = psi
        self.eps_sep = eps_sep
        self.table = np.full(1 << psi.n, np.nan)

    @property
    def n(self) -> int:
        return self.psi.n

    def get(self, mask: int) -> float:
        val = self.table[mask]
        if np.isnan(val):
            val = eta(self.psi, QubitSubset(self.n, int(mask)), self.eps_sep)
            self.table[mask] = val
        return float(val)

    def ensure(self, masks: np.ndarray) -> np.ndarray:
        """Compute any missing entries for ``masks`` and return their values."""
        masks = np.asarray(masks)
        for mk in np.unique(masks[np.isnan(self.table[masks])]):
            self.get(int(mk))
        return self.table[masks]

    def fill_all(self) -> np.ndarray:
        full = (1 << self.n) - 1
        return self.ensure(np.arange(1, full))


def xi(psi: StateVector, p: SetPartition, eps_sep: float = EPS_SEP,
       cache: EtaCache | None = None) -> float:
    """Arithmetic mean of eta over the blocks of ``p``."""
    if p.n != psi.n:
        raise StateError(f"partition is over {p.n} qubits, state has {psi.n}")
    if len(p) == 1:
        return 0.0
    cache = cache or EtaCache(psi, eps_sep)
    return math.fsum(cache.get(mk) for mk in p.masks) / len(p)


def _check_generic(n: int, m: int) -> None:
    if n < 2:
        raise RMeasureError("R_m is undefined for fewer than two qubits")
    if not 2 <= m <= n:
        raise RMeasureError(f"need 2 <= m <= n, got n={n}, m={m}")
    if n <= GENERIC_CAP:
        return
    if n <= ENUMERATION_CAP and n - m <= NEAR_DIAGONAL_GAP:
        return
    raise CapExceededError(
        f"R_{m} for n={n} needs {stirling2(n, m)} partitions; generic path is "
        f"limited to n <= {GENERIC_CAP} (or m >= n - {NEAR_DIAGONAL_GAP} up to "
        f"n = {ENUMERATION_CAP}). Use the symmetric fast path for GHZ/W/Dicke states.")


def _partition_xis(n: int, m: int, eta_of: callable) -> tuple[np.ndarray, np.ndarray]:
    """Block masks ``(P, m)`` and xi values ``(P,)`` of every m-block partition."""
    masks = block_masks(rgs_array(n, m), m)
    etas = eta_of(masks)
    return masks, etas.sum(axis=1) / m


def _log_geometric_mean(values: np.ndarray, count: int) -> float:
    """``exp(sum(ln v) / count)``, exact 0 if any ``v`` is 0."""
    if np.any(values <= 0.0):
        return 0.0
    result = math.exp(math.fsum(np.log(values).tolist()) / count)
    if not math.isfinite(result):
        raise NumericError("non-finite geometric mean")
    return result


def r_measure(psi: StateVector, m: int, eps_sep: float = EPS_SEP,
              cache: EtaCache | None = None) -> float:
    """``R_m``: geometric mean of xi over all partitions into ``m`` blocks.

    The log-sum is accumulated with ``math.fsum`` so the result does not
    depend on summation order. Returns exactly 0 when any partition has
    ``xi = 0``.
    """
    n = psi.n
    _check_generic(n, m)
    cache = cache or EtaCache(psi, eps_sep)
    _, xis = _partition_xis(n, m, cache.ensure)
    return _log_geometric_mean(xis, stirling2(n, m))


def c_coefficient(n: int, size: int) -> float:
    """Bipartition weight ``1 - (2^(n-size) - 2^size) / (2 (2^n - 2^size))``."""
    if not 1 <= size <= n - 1:
        raise RMeasureError(f"need 1 <= size <= n-1, got n={n}, size={size}")
    a, b = 2.0**size, 2.0 ** (n - size)
    return 1.0 - 0.5 * (b - a) / (2.0**n - a)


def r2_closed(psi: StateVector, eps_sep: float = EPS_SEP) -> float:
    """``R_2`` written as a product over the smaller side of each bipartition.

    Each cut ``{s, s-bar}`` with ``|s| <= |s-bar|`` contributes
    ``c(s) * eta_s``; for ``|s| == |s-bar|`` only the side without the
    last qubit is taken.
    """
    n = psi.n
    if n < 2:
        raise RMeasureError("R_2 is undefined for fewer than two qubits")
    if n > ENUMERATION_CAP:
        raise CapExceededError(f"n={n} exceeds the subset-enumeration cap of {ENUMERATION_CAP}")
    top = 1 << (n - 1)
    logs = []
    for mask in range(1, 1 << n):
        size = mask.bit_count()
        if 2 * size > n or (2 * size == n and mask & top):
            continue
        e = eta(psi, QubitSubset(n, mask), eps_sep)
        if e == 0.0:
            return 0.0
        logs.append(math.log(c_coefficient(n, size) * e))
    count = (1 << (n - 1)) - 1
    assert len(logs) == count
    return math.exp(math.fsum(logs) / count)


def mw_measure(psi: StateVector, eps_sep: float = EPS_SEP) -> float:
    """Mean single-qubit eta, i.e. ``R_n`` (the Meyer-Wallach measure)."""
    n = psi.n
    if n < 2:
        raise RMeasureError("R_n is undefined for fewer than two qubits")
    return math.fsum(eta(psi, QubitSubset(n, 1 << q), eps_sep) for q in range(n)) / n


@dataclass
class MeasureReport:
    """All ``R_m`` of one state plus per-shape summaries.

    ``per_shape[(m, shape)]`` is ``(count, xi)`` where ``xi`` is the geometric
    mean of xi over the partitions with that shape (for permutation-symmetric
    states every partition of a shape has the same xi).
    """

    n: int
    values: dict[int, float]
    zero_flags: dict[int, bool]
    eps_sep: float = EPS_SEP
    per_shape: dict[tuple[int, Shape], tuple[int, float]] = field(default_factory=dict)
    tag: str = ""
    path: str = "generic"

    def rows(self) -> list[tuple]:
        return [(self.tag, self.n, m, self.values[m], self.zero_flags[m])
                for m in sorted(self.values)]


def _r_with_shapes(n: int, m: int, table: np.ndarray) -> tuple[float, dict]:
    masks, xis = _partition_xis(n, m, lambda mk: table[mk])
    value = _log_geometric_mean(xis, stirling2(n, m))
    sizes = np.sort(np.bitwise_count(masks.astype(np.uint64)), axis=1)
    keys, inverse = np.unique(sizes, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    per_shape = {}
    for j, key in enumerate(keys):
        group = xis[inverse == j]
        shape = tuple(int(v) for v in key)
        per_shape[(m, shape)] = (int(group.size), _log_geometric_mean(group, group.size))
    return value, per_shape


def _r_task(args):
    return _r_with_shapes(*args)


def r_all(psi: StateVector, eps_sep: float = EPS_SEP, ms=None, workers: int = 1,
          tag: str = "") -> MeasureReport:
    """Evaluate ``R_m`` for every requested ``m`` (default ``2..n``).

    The eta table is filled once up front and shared by every ``m``. With
    ``workers > 1`` the values of ``m`` are spread over processes; each
    ``m`` is still reduced by a single worker, so output is identical to
    the serial run.
    """
    n = psi.n
    ms = list(range(2, n + 1)) if ms is None else sorted(set(ms))
    for m in ms:
        _check_generic(n, m)
    cache = EtaCache(psi, eps_sep)
    if n <= GENERIC_CAP:
        cache.fill_all()
    else:
        for m in ms:
            cache.ensure(block_masks(rgs_array(n, m), m))
    jobs = [(n, m, cache.table) for m in ms]
    # process start-up outweighs the work below a few thousand partitions
    if workers > 1 and len(jobs) > 1 and n > 8:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_r_task, jobs))
    else:
        results = [_r_task(j) for j in jobs]
    values, flags, per_shape = {}, {}, {}
    for m, (value, shapes_m) in zip(ms, results):
        values[m] = value
        flags[m] = value == 0.0
        per_shape.update(shapes_m)
    return MeasureReport(n, values, flags, eps_sep, per_shape, tag)
