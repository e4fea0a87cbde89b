"""Online covering with multiple per-step predictions.

Engines for plain covering rows and for box-constrained rows, exact STATIC
and DYNAMIC benchmark oracles with ledger verifiers, a robustification
meta-algorithm, adapters for set cover, weighted caching, and facility
location, suggestion generators, and a JSONL experiment CLI.
"""

from .benchmarks import (BoundReport, BoxDynamicCertificate, DEFAULT_BUDGET,
                         DynamicCertificate, LedgerReport, dynamic_benchmark,
                         dynamic_benchmark_box, potential, potential_box,
                         static_benchmark, verify_competitive_bound,
                         verify_ledger, verify_ledger_box)
from .box import (BoxRunTrace, BoxState, BoxSuggestionHistory, BoxSuggestionSet,
                  output_box_solution, process_box_constraint)
from .caching import CacheModel
from .constraints import (EPS_TIGHT, SparseConstraint, SuggestionHistory,
                          SuggestionSet, tighten)
from .covering import (BISECT_TOL, EPS_SAT, HALF, CoveringState, EventKind,
                       PhaseEvent, PhaseRecord, RunTrace, StepRecord,
                       output_solution, phase_advance, process_constraint)
from .errors import (BoundViolation, BudgetExceeded, CopredictError,
                     InfeasibleReference, InfeasibleSuggestion, LedgerViolation,
                     MetricError, RepairFailed, SchemaError, StalledPhase,
                     UncoverableElement, UnsatisfiableConstraint)
from .facility import FacilityInstance, client_step, validate_metric
from .predictors import (gen_lower_bound, noisy_predictor, oracle_predictor,
                         repair_to_feasible)
from .robust import ROBUST_FACTOR, RobustResult, baseline_step, robust_run
from .setcover import (RoundingResult, SetCoverInstance, round_setcover_online,
                       setcover_constraint)
from .stream import (StreamInstance, StreamStep, canonical_json, dump_instance,
                     dumps_instance, load_instance, loads_instance)

__version__ = "0.1.0"
