"""Intermediate-separability entanglement measures for n-qubit pure states.

``R_m`` vanishes exactly when a state factorizes into at least ``m``
subsystems; ``R_n`` is the Meyer-Wallach measure. Generic states are handled
by enumerating set partitions, permutation-symmetric ones (GHZ, W, Dicke)
by a closed form over partition shapes.
"""
from .errors import (CapExceededError, NumericError, RMeasureError, StateError,
                     SymmetryError)
from .geometric import ProductAnsatz, eg_closed_w, eg_optimize, overlap
from .measures import (EPS_SEP, EtaCache, MeasureReport, c_coefficient, eta,
                       mw_measure, r2_closed, r_all, r_measure, xi)
from .partitions import (SetPartition, enumerate_set_partitions, multiplicity,
                         op_count_estimate, shapes, stirling2,
                         stirling_asym_large_n, stirling_asym_small_gap)
from .state import (QubitSubset, StateVector, basis_state, dicke, ghz, haar_random,
                    make_state, product, reduced_density, reduced_purity,
                    w_state, zero_state)
from .symmetric import (EtaProfile, dicke_profile, eta_dicke, eta_ghz,
                        eta_profile_from_state, eta_w, ghz_profile, r_symmetric,
                        r_symmetric_all, sweep, w_profile)

__version__ = "0.1.0"
