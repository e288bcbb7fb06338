"""Quantum pushdown automata: tables, unitarity checks, recognition runs."""

from .model import (
    Alphabets,
    DfaSpec,
    Direction,
    QpaError,
    QpaSpec,
    StructureError,
    StructureViolation,
    SymbolError,
    TransitionKey,
    enumerate_push_words,
    parse_amplitude,
    format_amplitude,
    transitions_from,
    validate_structure,
)
from .io import (
    ParseError,
    load_dfa,
    load_qpa,
    qpa_dumps,
    qpa_loads,
    save_dfa,
    save_qpa,
)
from .wellformed import (
    ConditionReport,
    ConditionSummary,
    check_all,
    check_column_orthogonality,
    check_local_probability,
    check_row_norm,
    check_separability,
    check_simplified,
)
from .evolve import (
    Configuration,
    RecognitionResult,
    Superposition,
    TapeContext,
    TapeOverrunError,
    NotWellFormedError,
    apply_evolution,
    decide,
    initial_superposition,
    measure,
    recognize,
    trace,
)
from .matrixlab import (
    ConfigWindow,
    TruncatedMatrix,
    UnitarityReport,
    WindowCapError,
    banded_associativity_probe,
    build_matrix,
    check_truncated_unitarity,
    enumerate_window,
    row_norm_bound_probe,
    shift_fixture,
)
from .dfa2rpa import compile_dfa, simulate_dfa
from . import zoo

__version__ = "0.1.0"
