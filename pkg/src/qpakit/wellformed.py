"""Well-formedness conditions: finite algebraic checks equivalent to unitarity.

Each condition is an exhaustive finite sum over transition-table entries.
The general suite checks a plain table; the simplified suite applies when
every target state fixes the head direction, which makes the two mixed
direction conditions vacuous and collapses the row scan to one tape
symbol.

Condition identifiers
    general     LPC, OCV, RVN, SEP1a, SEP1b, SEP2, SEP3a, SEP3b
    simplified  LPC2, OCV2, RVN2, SEP_a, SEP_b

LPC asks each source column to carry unit probability; OCV asks columns
sharing a tape symbol to be orthogonal; RVN asks each target row to
carry unit probability; the separability conditions rule out collisions
between entries whose push words differ in length, which is where
stack-shifted configurations could otherwise meet.

The row scan quantifies over all ordered pairs of stack symbols,
including repeated ones; the degenerate tuples are well defined and are
deliberately not skipped.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .model import (
    Direction,
    KIND_GENERAL,
    KIND_REVERSIBLE,
    KIND_SIMPLIFIED,
    QpaError,
    QpaSpec,
)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_REPORTS = 100

GENERAL_CONDITIONS = ("LPC", "OCV", "RVN", "SEP1a", "SEP1b", "SEP2", "SEP3a", "SEP3b")
SIMPLIFIED_CONDITIONS = ("LPC2", "OCV2", "RVN2", "SEP_a", "SEP_b")

_STAY = Direction.STAY
_ADV = Direction.ADVANCE


class MissingDirectionError(QpaError):
    """The simplified suite needs a total direction function."""


@dataclass(frozen=True)
class ConditionReport:
    """One violated quantifier instance: which tuple, and how far off."""

    condition_id: str
    witness: tuple
    residual: float


@dataclass(frozen=True)
class ConditionResult:
    condition_id: str
    passed: bool
    worst_residual: float
    violations: int
    reports: tuple[ConditionReport, ...]


@dataclass(frozen=True)
class ConditionSummary:
    suite: str
    tolerance: float
    results: tuple[ConditionResult, ...]
    passed: bool
    worst_residual: float
    total_violations: int

    def result(self, condition_id: str) -> ConditionResult:
        for r in self.results:
            if r.condition_id == condition_id:
                return r
        raise KeyError(condition_id)


class _Collector:
    """Accumulates residuals for one condition; reports are capped, counts are not."""

    def __init__(self, condition_id: str, tol: float, max_reports: int):
        self.condition_id = condition_id
        self.tol = tol
        self.max_reports = max_reports
        self.reports: list[ConditionReport] = []
        self.violations = 0
        self.worst = 0.0

    def add(self, witness: tuple, residual: float) -> None:
        if residual > self.worst:
            self.worst = residual
        if residual > self.tol:
            self.violations += 1
            if len(self.reports) < self.max_reports:
                self.reports.append(ConditionReport(self.condition_id, witness, residual))

    def result(self) -> ConditionResult:
        return ConditionResult(
            condition_id=self.condition_id,
            passed=self.violations == 0,
            worst_residual=self.worst,
            violations=self.violations,
            reports=tuple(self.reports),
        )


@dataclass
class _Tables:
    """Per-source and per-target index maps over the stored entries."""

    sources: list[tuple[str, str, str]] = field(default_factory=list)
    full: dict = field(default_factory=dict)      # src -> {(q,d,omega): amp}
    singles: dict = field(default_factory=dict)   # src -> {(q,d,sym): amp}
    doubles: dict = field(default_factory=dict)   # src -> {(q,d,s0,s1): amp}
    eps: dict = field(default_factory=dict)       # src -> {(q,d): amp}
    stay_w: dict = field(default_factory=dict)    # src -> {(q,omega): amp}
    adv_w: dict = field(default_factory=dict)     # src -> {(q,omega): amp}
    adv_in: dict = field(default_factory=dict)    # (q1,sigma) -> {omega: sum |amp|^2}
    stay_in: dict = field(default_factory=dict)   # (q1,sigma) -> {omega: sum |amp|^2}


def _build_tables(spec: QpaSpec) -> _Tables:
    t = _Tables()
    al = spec.alphabets
    t.sources = [
        (q, s, tau)
        for q in sorted(spec.states)
        for s in al.gamma_sorted()
        for tau in al.delta_sorted()
    ]
    for src in t.sources:
        t.full[src] = {}
        t.singles[src] = {}
        t.doubles[src] = {}
        t.eps[src] = {}
        t.stay_w[src] = {}
        t.adv_w[src] = {}
    for key in spec.sorted_keys():
        amp = spec.delta[key]
        src = (key.q1, key.sigma, key.tau)
        t.full[src][(key.q, key.d, key.omega)] = amp
        if len(key.omega) == 0:
            t.eps[src][(key.q, key.d)] = amp
        elif len(key.omega) == 1:
            t.singles[src][(key.q, key.d, key.omega[0])] = amp
        else:
            t.doubles[src][(key.q, key.d, key.omega[0], key.omega[1])] = amp
        (t.stay_w if key.d is _STAY else t.adv_w)[src][(key.q, key.omega)] = amp
        into = t.adv_in if key.d is _ADV else t.stay_in
        bucket = into.setdefault((key.q, key.sigma), {})
        bucket[key.omega] = bucket.get(key.omega, 0.0) + abs(amp) ** 2
    return t


def _tables(spec: QpaSpec) -> _Tables:
    cached = getattr(spec, "_wf_tables", None)
    if cached is None:
        cached = _build_tables(spec)
        object.__setattr__(spec, "_wf_tables", cached)
    return cached


def _dot(a: dict, b: dict) -> complex:
    """Inner product of two sparse columns, conjugating the first."""
    if len(b) < len(a):
        return sum(a[k].conjugate() * v for k, v in b.items() if k in a)
    return sum(v.conjugate() * b[k] for k, v in a.items() if k in b)


def _omega_set(tau1: str, tau2: str) -> tuple[tuple[str, ...], ...]:
    return ((), (tau2,), (tau1, tau2))


# --- condition scans ----------------------------------------------------------

def _scan_local_probability(spec: QpaSpec, tol: float, max_reports: int,
                            condition_id: str) -> _Collector:
    t = _tables(spec)
    col = _Collector(condition_id, tol, max_reports)
    for src in t.sources:
        s = sum(abs(a) ** 2 for a in t.full[src].values())
        col.add(src, abs(s - 1.0))
    return col


def _scan_column_orthogonality(spec: QpaSpec, tol: float, max_reports: int,
                               condition_id: str) -> _Collector:
    t = _tables(spec)
    col = _Collector(condition_id, tol, max_reports)
    al = spec.alphabets
    pairs = [(q, tau) for q in sorted(spec.states) for tau in al.delta_sorted()]
    for sigma in al.gamma_sorted():
        for i in range(len(pairs)):
            q1, tau1 = pairs[i]
            f1 = t.full[(q1, sigma, tau1)]
            for j in range(i + 1, len(pairs)):
                q2, tau2 = pairs[j]
                if not f1:
                    col.add((q1, sigma, tau1, q2, tau2), 0.0)
                    continue
                f2 = t.full[(q2, sigma, tau2)]
                inner = _dot(f1, f2) if f2 else 0.0
                col.add((q1, sigma, tau1, q2, tau2), abs(inner))
    return col


def _row_sum(t: _Tables, q1: str, sigma_adv: str, sigma_stay: str,
             tau1: str, tau2: str) -> float:
    omegas = _omega_set(tau1, tau2)
    a = t.adv_in.get((q1, sigma_adv))
    b = t.stay_in.get((q1, sigma_stay))
    s = 0.0
    if a:
        for w in omegas:
            s += a.get(w, 0.0)
    if b:
        for w in omegas:
            s += b.get(w, 0.0)
    return s


def _scan_row_norm(spec: QpaSpec, tol: float, max_reports: int) -> _Collector:
    t = _tables(spec)
    col = _Collector("RVN", tol, max_reports)
    al = spec.alphabets
    gam = al.gamma_sorted()
    dl = al.delta_sorted()
    for q1 in sorted(spec.states):
        for s1 in gam:
            for s2 in gam:
                for tau1 in dl:
                    for tau2 in dl:
                        s = _row_sum(t, q1, s1, s2, tau1, tau2)
                        col.add((q1, s1, s2, tau1, tau2), abs(s - 1.0))
    return col


def _scan_row_norm_simplified(spec: QpaSpec, tol: float, max_reports: int) -> _Collector:
    t = _tables(spec)
    col = _Collector("RVN2", tol, max_reports)
    al = spec.alphabets
    for q1 in sorted(spec.states):
        for s1 in al.gamma_sorted():
            for tau1 in al.delta_sorted():
                for tau2 in al.delta_sorted():
                    s = _row_sum(t, q1, s1, s1, tau1, tau2)
                    col.add((q1, s1, tau1, tau2), abs(s - 1.0))
    return col


def _scan_sep_shared_sigma(spec: QpaSpec, tol: float, max_reports: int,
                           id_a: str, id_b: str) -> tuple[_Collector, _Collector]:
    """Stack-shift collisions between columns that read the same tape symbol.

    Part a pairs single pushes against two-symbol pushes and empty pushes
    against single pushes; part b pairs empty pushes against two-symbol
    pushes.  Ordered pairs, self-pairs included: the paired columns stand
    for configurations whose stacks differ in depth, which one table
    triple can realize on its own.
    """
    t = _tables(spec)
    col_a = _Collector(id_a, tol, max_reports)
    col_b = _Collector(id_b, tol, max_reports)
    al = spec.alphabets
    states = sorted(spec.states)
    dl = al.delta_sorted()
    for sigma in al.gamma_sorted():
        srcs = [(q, sigma, tau) for q in states for tau in dl]
        for src1 in srcs:
            singles1 = t.singles[src1]
            eps1 = t.eps[src1]
            for src2 in srcs:
                doubles2 = t.doubles[src2]
                singles2 = t.singles[src2]
                tau2 = src2[2]
                for tau3 in dl:
                    wit = (src1[0], sigma, src1[2], src2[0], src2[2], tau3)
                    s = 0.0 + 0.0j
                    if singles1 and doubles2:
                        for (q, d, sym), amp in singles1.items():
                            other = doubles2.get((q, d, tau3, sym))
                            if other is not None:
                                s += amp.conjugate() * other
                    if eps1 and singles2:
                        for (q, d), amp in eps1.items():
                            other = singles2.get((q, d, tau3))
                            if other is not None:
                                s += amp.conjugate() * other
                    col_a.add(wit, abs(s))
                    sb = 0.0 + 0.0j
                    if eps1 and doubles2:
                        for (q, d), amp in eps1.items():
                            other = doubles2.get((q, d, tau2, tau3))
                            if other is not None:
                                sb += amp.conjugate() * other
                    col_b.add(wit, abs(sb))
    return col_a, col_b


def _scan_sep_mixed(spec: QpaSpec, tol: float, max_reports: int
                    ) -> tuple[_Collector, _Collector, _Collector]:
    """Collisions between a staying source and an advancing source.

    SEP2 pairs equal push words; SEP3a/SEP3b pair push words that differ
    by one net symbol, in both direction assignments.
    """
    t = _tables(spec)
    col2 = _Collector("SEP2", tol, max_reports)
    col3a = _Collector("SEP3a", tol, max_reports)
    col3b = _Collector("SEP3b", tol, max_reports)
    dl = spec.alphabets.delta_sorted()
    srcs = t.sources
    for src1 in srcs:
        stay1 = t.stay_w[src1]
        for src2 in srcs:
            if stay1:
                adv2 = t.adv_w[src2]
                inner = _dot(stay1, adv2) if adv2 else 0.0
                col2.add(src1 + src2, abs(inner))
            else:
                col2.add(src1 + src2, 0.0)
    dir_pairs = ((_STAY, _ADV), (_ADV, _STAY))
    for src1 in srcs:
        singles1 = t.singles[src1]
        eps1 = t.eps[src1]
        quiet = not singles1 and not eps1
        for src2 in srcs:
            doubles2 = t.doubles[src2]
            singles2 = t.singles[src2]
            tau2 = src2[2]
            for tau3 in dl:
                for d1, d2 in dir_pairs:
                    wit = src1 + src2 + (tau3, d1.value)
                    if quiet:
                        col3a.add(wit, 0.0)
                        col3b.add(wit, 0.0)
                        continue
                    s = 0.0 + 0.0j
                    if singles1 and doubles2:
                        for (q, d, sym), amp in singles1.items():
                            if d is not d1:
                                continue
                            other = doubles2.get((q, d2, tau3, sym))
                            if other is not None:
                                s += amp.conjugate() * other
                    if eps1 and singles2:
                        for (q, d), amp in eps1.items():
                            if d is not d1:
                                continue
                            other = singles2.get((q, d2, tau3))
                            if other is not None:
                                s += amp.conjugate() * other
                    col3a.add(wit, abs(s))
                    sb = 0.0 + 0.0j
                    if eps1 and doubles2:
                        for (q, d), amp in eps1.items():
                            if d is not d1:
                                continue
                            other = doubles2.get((q, d2, tau2, tau3))
                            if other is not None:
                                sb += amp.conjugate() * other
                    col3b.add(wit, abs(sb))
    return col2, col3a, col3b


# --- public checks ------------------------------------------------------------

def check_local_probability(spec: QpaSpec, tol: float = DEFAULT_TOL,
                            max_reports: int = DEFAULT_MAX_REPORTS) -> list[ConditionReport]:
    """Each (state, tape symbol, popped symbol) column sums to probability 1."""
    return list(_scan_local_probability(spec, tol, max_reports, "LPC").reports)


def check_column_orthogonality(spec: QpaSpec, tol: float = DEFAULT_TOL,
                               max_reports: int = DEFAULT_MAX_REPORTS) -> list[ConditionReport]:
    """Distinct columns reading the same tape symbol are orthogonal."""
    return list(_scan_column_orthogonality(spec, tol, max_reports, "OCV").reports)


def check_row_norm(spec: QpaSpec, tol: float = DEFAULT_TOL,
                   max_reports: int = DEFAULT_MAX_REPORTS) -> list[ConditionReport]:
    """Each target row carries unit probability.

    A row is indexed by a target state, the tape symbol consumed by its
    advancing sources, the tape symbol read by its staying sources, and
    the last two symbols of the target stack.
    """
    return list(_scan_row_norm(spec, tol, max_reports).reports)


def check_separability(spec: QpaSpec, tol: float = DEFAULT_TOL,
                       max_reports: int = DEFAULT_MAX_REPORTS) -> list[ConditionReport]:
    """All five separability sums for a general table."""
    a, b = _scan_sep_shared_sigma(spec, tol, max_reports, "SEP1a", "SEP1b")
    c2, c3a, c3b = _scan_sep_mixed(spec, tol, max_reports)
    return list(a.reports) + list(b.reports) + list(c2.reports) + list(c3a.reports) + list(c3b.reports)


def _require_direction(spec: QpaSpec) -> None:
    if spec.kind == KIND_GENERAL or spec.direction_fn is None:
        raise MissingDirectionError("simplified conditions need a total direction function")
    missing = spec.states - set(spec.direction_fn)
    if missing:
        raise MissingDirectionError(f"direction undefined for {sorted(missing)}")


def check_simplified(spec: QpaSpec, tol: float = DEFAULT_TOL,
                     max_reports: int = DEFAULT_MAX_REPORTS) -> list[ConditionReport]:
    """The five-condition suite for direction-per-state tables."""
    _require_direction(spec)
    cols = _simplified_collectors(spec, tol, max_reports)
    out: list[ConditionReport] = []
    for c in cols:
        out.extend(c.reports)
    return out


def _simplified_collectors(spec: QpaSpec, tol: float, max_reports: int) -> list[_Collector]:
    a, b = _scan_sep_shared_sigma(spec, tol, max_reports, "SEP_a", "SEP_b")
    return [
        _scan_local_probability(spec, tol, max_reports, "LPC2"),
        _scan_column_orthogonality(spec, tol, max_reports, "OCV2"),
        _scan_row_norm_simplified(spec, tol, max_reports),
        a,
        b,
    ]


def _general_collectors(spec: QpaSpec, tol: float, max_reports: int) -> list[_Collector]:
    a, b = _scan_sep_shared_sigma(spec, tol, max_reports, "SEP1a", "SEP1b")
    c2, c3a, c3b = _scan_sep_mixed(spec, tol, max_reports)
    return [
        _scan_local_probability(spec, tol, max_reports, "LPC"),
        _scan_column_orthogonality(spec, tol, max_reports, "OCV"),
        _scan_row_norm(spec, tol, max_reports),
        a,
        b,
        c2,
        c3a,
        c3b,
    ]


def check_all(spec: QpaSpec, tol: float = DEFAULT_TOL,
              max_reports: int = DEFAULT_MAX_REPORTS) -> ConditionSummary:
    """Run the suite matching the spec kind and fold into one summary."""
    if spec.kind in (KIND_SIMPLIFIED, KIND_REVERSIBLE):
        _require_direction(spec)
        collectors = _simplified_collectors(spec, tol, max_reports)
        suite = "simplified"
    else:
        collectors = _general_collectors(spec, tol, max_reports)
        suite = "general"
    results = tuple(c.result() for c in collectors)
    worst = max((r.worst_residual for r in results), default=0.0)
    total = sum(r.violations for r in results)
    return ConditionSummary(
        suite=suite, tolerance=tol, results=results,
        passed=total == 0, worst_residual=worst, total_violations=total,
    )


def as_general(spec: QpaSpec) -> QpaSpec:
    """View a simplified table as a plain one for the general suite."""
    return replace(spec, kind=KIND_GENERAL)


def summary_to_dict(summary: ConditionSummary) -> dict:
    return {
        "suite": summary.suite,
        "tolerance": summary.tolerance,
        "passed": summary.passed,
        "worst_residual": summary.worst_residual,
        "total_violations": summary.total_violations,
        "conditions": [
            {
                "condition": r.condition_id,
                "passed": r.passed,
                "worst_residual": r.worst_residual,
                "violations": r.violations,
                "witnesses": [
                    {"condition": rep.condition_id, "witness": list(rep.witness),
                     "residual": rep.residual}
                    for rep in r.reports
                ],
            }
            for r in summary.results
        ],
    }
