"""Exact forward and inverse engine for the plane-wave impulse response of
a piecewise-constant layered medium.

The forward map writes the finite-time response of a model (travel times
plus reflection coefficients) as a finite train of arrivals with
closed-form polynomial amplitudes; the inverse map recovers the model from
the response exactly, arrival times first, amplitudes second.  Everything
runs in either IEEE float or exact rational arithmetic.
"""

__version__ = "0.1.0"

from .core import (Data, Model, PhysicalProfile, RawTermList, Scalar,
                   data_from_dict, data_to_dict, from_physical,
                   model_from_dict, model_to_dict, normalize,
                   total_travel_time, validate_data, validate_model)
from .errors import (AlgorithmError, GuardExceededError, LayerwaveError,
                     ValidationError)
from .lattice import (LatticeSet, TransitCount, branch_box,
                      enumerate_lattice_set, enumerate_restricted,
                      is_transit_count, left_shift, primary_vector,
                      project_onto_tau)
from .amplitude import (AmplitudeTerm, amplitude_eval, amplitude_terms,
                        redundancy_ratio_check)
from .forward import (EnumerationMap, GenericityReport, enumeration_matrix,
                      forward, ill_posed_pair, is_generic, j_matrix,
                      k_matrix)
from .inverse import (CorrectionSets, InverseOptions, InverseReport,
                      consensus, correct_reflectivity, invert,
                      redundancy_pairs)
from .oracle import (SequenceStats, count_sequences_by, enumerate_sequences,
                     oracle_response, oracle_terms, stats, weight_eval)
from .perturb import (PerturbSpec, add_spurious, decimate, random_spurious,
                      shift_times, sine_distort)

__all__ = [
    "AlgorithmError", "AmplitudeTerm", "CorrectionSets", "Data",
    "EnumerationMap", "GenericityReport", "GuardExceededError",
    "InverseOptions", "InverseReport", "LatticeSet", "LayerwaveError",
    "Model", "PerturbSpec", "PhysicalProfile", "RawTermList", "Scalar",
    "SequenceStats",
    "TransitCount", "ValidationError", "add_spurious", "amplitude_eval",
    "amplitude_terms", "branch_box", "consensus", "correct_reflectivity",
    "count_sequences_by", "data_from_dict", "data_to_dict", "decimate",
    "enumerate_lattice_set", "enumerate_restricted", "enumerate_sequences",
    "enumeration_matrix", "forward", "from_physical", "ill_posed_pair",
    "invert", "is_generic", "is_transit_count", "j_matrix", "k_matrix",
    "left_shift", "model_from_dict", "model_to_dict", "normalize",
    "oracle_response", "oracle_terms", "primary_vector", "project_onto_tau",
    "random_spurious", "redundancy_pairs", "redundancy_ratio_check",
    "shift_times", "sine_distort", "stats", "total_travel_time",
    "validate_data", "validate_model", "weight_eval",
]
