"""Set partitions, integer-partition shapes and Stirling numbers.

Set partitions of ``{1..n}`` are enumerated as restricted growth strings
(RGS): ``a_1 = 0`` and ``a_i <= 1 + max(a_1..a_{i-1})``. Element ``i`` sits
in block ``a_i``, so blocks come out ordered by their minimum element and
every partition appears exactly once. Ordering is lexicographic in the RGS.

Shapes are plain tuples of block sizes in ascending order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import CapExceededError, RMeasureError
from .state import QubitSubset

STIRLING_MAX_N = 64
ENUMERATION_CAP = 16

Shape = tuple[int, ...]


def _build_stirling_table(nmax: int) -> list[list[int]]:
    table = [[0] * (nmax + 1) for _ in range(nmax + 1)]
    table[0][0] = 1
    for n in range(1, nmax + 1):
        row, prev = table[n], table[n - 1]
        for m in range(1, n + 1):
            row[m] = prev[m - 1] + m * prev[m]
    return table


# Built eagerly at import: read-only afterwards, so safe to share across threads.
_STIRLING = _build_stirling_table(STIRLING_MAX_N)
_FACTORIAL = [math.factorial(i) for i in range(STIRLING_MAX_N + 1)]


def _check_nm(n: int, m: int, nmax: int = STIRLING_MAX_N) -> None:
    if not 1 <= m <= n:
        raise RMeasureError(f"need 1 <= m <= n, got n={n}, m={m}")
    if n > nmax:
        raise CapExceededError(f"n={n} exceeds the cap of {nmax}")


def stirling2(n: int, m: int) -> int:
    """Exact Stirling number of the second kind ``S(n, m)``.

    Counts the partitions of ``n`` labelled elements into ``m`` nonempty
    blocks. Served from a table built with
    ``S(n, m) = S(n-1, m-1) + m * S(n-1, m)``.
    """
    _check_nm(n, m)
    return _STIRLING[n][m]


def op_count_estimate(n: int, m: int) -> int:
    """Steps to assemble ``R_m`` from a precomputed eta table: ``m * S(n, m)``."""
    return m * stirling2(n, m)


def stirling_asym_large_n(n: int, m: int) -> float:
    """Natural log of ``m**n / (sqrt(2 pi) m!)``.

    This is the large-``n`` approximation in its commonly quoted form. Note
    that the true leading term of ``S(n, m)`` for fixed ``m`` is
    ``m**n / m!``; the value here is smaller by exactly ``ln sqrt(2 pi)``.
    """
    if not 1 <= m < n:
        raise RMeasureError(f"need 1 <= m < n, got n={n}, m={m}")
    return n * math.log(m) - math.lgamma(m + 1) - 0.5 * math.log(2 * math.pi)


def stirling_asym_small_gap(n: int, l: int) -> float:
    """Natural log of ``(m**2 / 2)**l / l!`` with ``m = n - l``, for small ``l``."""
    if not 0 <= l < n:
        raise RMeasureError(f"need 0 <= l < n, got n={n}, l={l}")
    m = n - l
    return l * math.log(m * m / 2) - math.lgamma(l + 1)


@dataclass(frozen=True)
class SetPartition:
    """A partition of ``{1..n}`` into disjoint nonempty blocks.

    ``masks`` holds one bit mask per block (qubit ``q`` is bit ``q - 1``),
    ordered by the smallest element of each block.
    """

    n: int
    masks: tuple[int, ...]

    def __post_init__(self):
        acc = 0
        for mk in self.masks:
            if mk == 0 or acc & mk:
                raise RMeasureError("blocks must be nonempty and pairwise disjoint")
            acc |= mk
        if acc != (1 << self.n) - 1:
            raise RMeasureError("blocks do not cover all elements")

    @classmethod
    def from_blocks(cls, n: int, blocks) -> "SetPartition":
        """Build from blocks of 1-based labels, e.g. ``[[1], [2, 3]]``."""
        masks = sorted((QubitSubset.of(n, b).mask for b in blocks),
                       key=lambda mk: (mk & -mk))
        return cls(n, tuple(masks))

    @property
    def blocks(self) -> tuple[QubitSubset, ...]:
        return tuple(QubitSubset(self.n, mk) for mk in self.masks)

    @property
    def shape(self) -> Shape:
        return tuple(sorted(mk.bit_count() for mk in self.masks))

    def __len__(self) -> int:
        return len(self.masks)

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, b.qubits)) + "}" for b in self.blocks)


def _rgs_iter(n: int, m: int) -> Iterator[tuple[list[int], list[int]]]:
    """Restricted growth strings with exactly ``m`` labels, plus block masks.

    Yields ``(a, masks)`` where ``a[q]`` is the block label of element
    ``q`` and ``masks[b]`` the bit mask of block ``b``. Both lists are
    updated in place between yields, so copy them to keep a value.
    """
    if not 1 <= m <= n:
        return
    if n == 1:
        yield [0], [1]
        return
    # smallest string: zeros, then one new label per trailing position
    a = [0] * (n - m + 1) + list(range(1, m))
    masks = [0] * m
    for q, label in enumerate(a[:-1]):
        masks[label] |= 1 << q
    # opened[q] = number of labels used by a[:q]
    opened = [0] + [max(a[:q]) + 1 for q in range(1, n)]
    last, top = n - 1, 1 << (n - 1)
    while True:
        # the last element runs over every label that leaves m blocks in use
        if opened[last] == m:
            for label in range(m):
                a[last] = label
                masks[label] |= top
                yield a, masks
                masks[label] ^= top
        else:
            a[last] = m - 1
            masks[m - 1] |= top
            yield a, masks
            masks[m - 1] ^= top
        # bump the rightmost prefix position that can still be completed
        i = last - 1
        while i > 0:
            new = a[i] + 1
            cap = opened[i]
            if (new < cap or new == cap < m) and m - max(cap, new + 1) <= last - i:
                break
            i -= 1
        if i == 0:
            return
        bit = 1 << i
        masks[a[i]] ^= bit
        a[i] += 1
        masks[a[i]] |= bit
        used = max(opened[i], a[i] + 1)
        opened[i + 1] = used
        # smallest completion: zeros, then the still-unopened labels in order
        first_new = n - (m - used)
        for q in range(i + 1, last):
            label = 0 if q < first_new else used + q - first_new
            if a[q] != label:
                bit = 1 << q
                masks[a[q]] ^= bit
                masks[label] |= bit
                a[q] = label
            opened[q + 1] = max(opened[q], label + 1)


def enumerate_set_partitions(n: int, m: int) -> Iterator[SetPartition]:
    """Yield every partition of ``{1..n}`` into exactly ``m`` blocks once.

    Order is lexicographic in the restricted growth string. The total count
    equals ``stirling2(n, m)``.
    """
    _check_nm(n, m, ENUMERATION_CAP)
    new, setattr_ = object.__new__, object.__setattr__
    for _, masks in _rgs_iter(n, m):
        # valid by construction, so skip the checks in __post_init__
        p = new(SetPartition)
        setattr_(p, "n", n)
        setattr_(p, "masks", tuple(masks))
        yield p


def rgs_array(n: int, m: int) -> np.ndarray:
    """All restricted growth strings with exactly ``m`` labels as an array.

    Returns an ``(S(n, m), n)`` int8 array in the same lexicographic order as
    ``enumerate_set_partitions``. Built breadth-first with pruning so no
    intermediate row is discarded at the end.
    """
    _check_nm(n, m, ENUMERATION_CAP)
    rows = np.zeros((1, 1), dtype=np.int8)
    used = np.ones(1, dtype=np.int8)
    for i in range(1, n):
        remaining = n - i  # positions left including this one
        children, child_used = [], []
        for label in range(m):
            # label may be reused (label < used) or opened (label == used)
            ok = label <= used
            new_used = np.maximum(used, label + 1)
            ok &= new_used <= m
            ok &= (m - new_used) <= remaining - 1
            idx = np.nonzero(ok)[0]
            children.append((idx, label))
            child_used.append(new_used[idx])
        # interleave so each parent's children stay contiguous and label-ordered
        parent = np.concatenate([c[0] for c in children])
        labels = np.concatenate([np.full(c[0].shape, c[1], dtype=np.int8) for c in children])
        new_used = np.concatenate(child_used)
        order = np.lexsort((labels, parent))
        rows = np.concatenate([rows[parent[order]], labels[order, None]], axis=1)
        used = new_used[order].astype(np.int8)
    return rows


def block_masks(rgs: np.ndarray, m: int) -> np.ndarray:
    """Convert an RGS array to per-block bit masks, shape ``(P, m)``."""
    n = rgs.shape[1]
    weights = (np.int64(1) << np.arange(n, dtype=np.int64))
    return np.stack([((rgs == b) * weights).sum(axis=1) for b in range(m)], axis=1)


def iter_shapes(n: int, m: int | None = None, smallest: int = 1) -> Iterator[Shape]:
    """Integer partitions of ``n`` with ascending parts, lexicographic order.

    With ``m`` given, only partitions into exactly ``m`` parts.
    """
    if m is None:
        for k in range(1, n + 1):
            yield from iter_shapes(n, k, smallest)
        return
    if m == 1:
        if n >= smallest:
            yield (n,)
        return
    # first part p leaves n - p for m - 1 parts each >= p
    for p in range(smallest, n // m + 1):
        for rest in iter_shapes(n - p, m - 1, p):
            yield (p,) + rest


def shapes(n: int, m: int) -> list[Shape]:
    """All shapes (integer partitions of ``n`` into ``m`` parts)."""
    _check_nm(n, m, nmax=10**6)
    return list(iter_shapes(n, m))


def multiplicity(shape: Shape) -> int:
    """Number of set partitions whose sorted block sizes equal ``shape``.

    ``n! / (prod |s_i|! * prod c_j!)`` with ``c_j`` the number of blocks of
    size ``j``.
    """
    if not shape or any(s < 1 for s in shape):
        raise RMeasureError(f"invalid shape {shape!r}")
    shape = tuple(sorted(shape))
    n = sum(shape)
    fact = _FACTORIAL if n <= STIRLING_MAX_N else [math.factorial(i) for i in range(n + 1)]
    denom = 1
    run = 1
    for i, s in enumerate(shape):
        denom *= fact[s]
        if i and shape[i - 1] == s:
            run += 1
        else:
            denom *= fact[run]
            run = 1
    denom *= fact[run]
    return fact[n] // denom
