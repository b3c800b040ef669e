"""Acceptance suite: one test per criterion, each with its own time budget.

Every test records a ``PASS``/``FAIL`` line (printed live with ``-s`` and
repeated in the terminal summary). Tolerances and budgets are the
contractual ones; nothing here is loosened to make a criterion pass.
"""
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from rmeasure.geometric import (_ascend_symmetric, _symmetric_objective, eg_closed_w,
                                eg_optimize)
from rmeasure.measures import mw_measure, r2_closed, r_all, r_measure
from rmeasure.partitions import enumerate_set_partitions, multiplicity, stirling2
from rmeasure.state import (dicke, ghz, haar_random, make_state, product, reduced_purity,
                            w_state, zero_state)
from rmeasure.state import QubitSubset
from rmeasure.symmetric import (dicke_profile, ghz_profile, r_symmetric, r_symmetric_all,
                                shape_table, w_profile)

from oracles import permute_qubits, random_local_unitary

RESULTS: dict[int, str] = {}


@contextmanager
def criterion(number: int, title: str, budget: float):
    """Time the body, enforce ``budget`` seconds and record a summary line."""
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        line = f"criterion {number}: FAIL  {title} ({elapsed:.2f}s) {type(exc).__name__}"
        RESULTS[number] = line
        print("\n" + line)
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget
    verdict = "PASS" if ok else "FAIL"
    line = f"criterion {number}: {verdict}  {title} ({elapsed:.2f}s, budget {budget:g}s)"
    RESULTS[number] = line
    print("\n" + line)
    assert ok, f"took {elapsed:.2f}s, budget {budget}s"


def test_criterion_1_r2_ghz4():
    with criterion(1, "R_2(GHZ_4) ~ 0.732, generic path", 1.0):
        value = r_measure(ghz(4), 2)
        exact = float(Fraction(11, 14) ** 4 * Fraction(2, 3) ** 3) ** (1 / 7)
        assert abs(value - 0.732) < 5e-4
        assert value == pytest.approx(exact, abs=1e-12)


def test_criterion_2_r2_w4():
    with criterion(2, "R_2(W_4) ~ 0.621, generic and symmetric", 1.0):
        generic = r_measure(w_state(4), 2)
        fast = r_symmetric(w_profile(4), 2)
        assert abs(generic - 0.621) < 5e-4
        assert abs(fast - 0.621) < 5e-4


def _s(n, m):
    return stirling2(n, m) if 1 <= m <= n else 0


def test_criterion_3_combinatorics():
    with criterion(3, "combinatorics golden values", 10.0):
        assert multiplicity((1, 3)) == 4
        assert multiplicity((2, 2)) == 3
        assert stirling2(4, 2) == 7
        for n in range(2, 41):
            assert stirling2(n, 2) == 2 ** (n - 1) - 1
            if n >= 3:
                assert 24 * stirling2(n, n - 2) == n * (n - 1) * (n - 2) * (3 * n - 5)
            for m in range(2, n + 1):
                assert _s(n, m) == _s(n - 1, m - 1) + m * _s(n - 1, m)
        for n in range(1, 13):
            for m in range(1, n + 1):
                count = sum(1 for _ in enumerate_set_partitions(n, m))
                assert count == stirling2(n, m)


def test_criterion_4_fig1_zero_pattern():
    with criterion(4, "GHZ-block zero pattern at n = 8", 30.0):
        total = 0
        for k in range(3, 9):
            psi = product([ghz(k), zero_state(8 - k)]) if k < 8 else ghz(8)
            rep = r_all(psi, workers=1)
            total = sum(stirling2(8, m) for m in rep.values)
            for m, v in rep.values.items():
                if m <= 9 - k:
                    assert v == 0.0
                else:
                    assert v > 1e-6
        assert total + 1 == 4140  # every partition except the trivial one
        reps = [r_all(product([ghz(k), ghz(l)]), workers=1) for k, l in [(4, 4), (5, 3), (6, 2)]]
        for rep in reps:
            assert rep.values[2] == 0.0
            assert abs(rep.values[8] - 1.0) < 1e-9
        assert any(max(r.values[m] for r in reps) - min(r.values[m] for r in reps) > 1e-6
                   for m in range(2, 9))


def test_criterion_5_envelopes():
    with criterion(5, "GHZ and W envelopes, 3 <= n <= 50", 60.0):
        shape_table.cache_clear()
        for n in range(3, 51):
            g = r_symmetric_all(ghz_profile(n))
            seq = [g[m] for m in range(2, n + 1)]
            assert all(a < b for a, b in zip(seq, seq[1:]))
            assert all(0.5 < v <= 1.0 for v in seq)
            assert g[n] == 1.0
            w = r_symmetric_all(w_profile(n))
            if n >= 9:
                assert all(v < 0.5 for v in w.values())


def test_criterion_6_dicke():
    with criterion(6, "Dicke maximum at n = m = 2k, monotone in k at n = 40", 120.0):
        for k in range(1, 26):
            assert abs(r_symmetric(dicke_profile(2 * k, k), 2 * k) - 1.0) < 1e-12
        rows = [r_symmetric_all(dicke_profile(40, k)) for k in range(1, 21)]
        for m in range(2, 41):
            seq = [row[m] for row in rows]
            assert all(a < b for a, b in zip(seq, seq[1:]))


def test_criterion_7_oracle_equivalence():
    with criterion(7, "fast path, R_2 closed form and MW against enumeration", 300.0):
        for n in range(2, 11):
            cases = [(ghz(n), ghz_profile(n)), (w_state(n), w_profile(n))]
            cases += [(dicke(n, k), dicke_profile(n, k)) for k in range(2, n // 2 + 1)]
            for psi, prof in cases:
                generic = r_all(psi, workers=1).values
                fast = r_symmetric_all(prof)
                for m in range(2, n + 1):
                    assert abs(generic[m] - fast[m]) < 1e-9
        rng = np.random.default_rng(7)
        for _ in range(100):
            psi = haar_random(int(rng.integers(2, 9)), rng)
            assert abs(r2_closed(psi) - r_measure(psi, 2)) < 1e-10
            assert abs(mw_measure(psi) - r_measure(psi, psi.n)) < 1e-12


def test_criterion_8_geometric():
    with criterion(8, "geometric measure of W states", 60.0):
        for n in range(2, 21):
            value = eg_optimize(w_state(n), symmetric=True).value
            assert abs(value - eg_closed_w(n)) < 1e-6
        for n in range(2, 9):
            value = eg_optimize(w_state(n), restarts=8).value
            assert abs(value - eg_closed_w(n)) < 1e-6
        assert abs(eg_closed_w(10**6) - (1 - 1 / math.e)) < 1e-5
        assert r_symmetric(w_profile(50), 50) < 0.08
        # W_50 has 2^50 amplitudes, so optimize through its weight sums A_w instead
        sums = np.zeros(51, dtype=complex)
        sums[1] = math.sqrt(50)
        best = max(_ascend_symmetric(_symmetric_objective(sums, 50), t, p, 1e-12, 500)[0]
                   for t, p in [(0.1, 0.0), (0.5, 1.0), (1.2, 3.0)])
        assert 1 - best > 0.62
        assert 1 - best == pytest.approx(eg_closed_w(50), abs=1e-6)


def _mixed_states(rng, count):
    for _ in range(count):
        yield haar_random(int(rng.integers(2, 6)), rng)


def test_criterion_9_properties():
    with criterion(9, "purity, invariance, ladder and weight properties", 300.0):
        rng = np.random.default_rng(99)
        for psi in _mixed_states(rng, 100):
            n = psi.n
            mask = int(rng.integers(1, (1 << n) - 1))
            s = QubitSubset(n, mask)
            assert abs(reduced_purity(psi, s) - reduced_purity(psi, s.complement())) < 1e-12

        for psi in _mixed_states(rng, 100):
            n = psi.n
            moved = make_state(n, random_local_unitary(n, rng) @ psi.amps)
            a, b = r_all(psi, workers=1).values, r_all(moved, workers=1).values
            assert all(abs(a[m] - b[m]) < 1e-9 for m in a)

        for psi in _mixed_states(rng, 100):
            n = psi.n
            moved = make_state(n, permute_qubits(psi.amps, n, rng.permutation(n)))
            a, b = r_all(psi, workers=1).values, r_all(moved, workers=1).values
            assert all(abs(a[m] - b[m]) < 1e-12 for m in a)

        for _ in range(100):
            sizes = rng.integers(1, 3, size=int(rng.integers(2, 5)))
            psi = product([haar_random(int(s), rng) for s in sizes])
            values = r_all(psi, workers=1).values
            zeros = [m for m, v in values.items() if v == 0.0]
            assert len(sizes) in zeros
            assert all(values[m] == 0.0 for m in range(2, max(zeros) + 1))

        for n in range(2, 51):
            for parts, weights in shape_table(n).values():
                assert abs(math.fsum(weights.tolist()) - 1.0) < 1e-12
