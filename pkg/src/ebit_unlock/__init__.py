"""Bounds on the rate at which classical bits unlock entanglement in pure-state sources."""

__version__ = "0.1.0"

from .ensembles import (
    PureEnsemble,
    PureState,
    average_state,
    make_ensemble,
    multicopy,
    multicopy_ensemble,
    validate,
)
from .measures import (
    UNAVAILABLE,
    UNDEFINED,
    EnsembleReport,
    analyze,
    certified_rate_interval,
    concavity_upper_bound,
    entropy_of_entanglement,
    eof_two_qubit,
    gap_upper_bound,
    hashing_lower_bound,
    log_negativity,
    shannon_entropy,
    source_entanglement,
    theorem_rate_bound,
    von_neumann_entropy,
)
from .sampling import SampleConfig, additivity_check, haar_random_state, random_ensemble, sweep, verify
from .search import SearchResult, search
