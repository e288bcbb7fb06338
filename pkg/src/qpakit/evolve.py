"""Configuration-space simulation with measure-many observation.

A configuration is (state, head position, stack word) over a framed
input tape ``# x $``.  One computation step applies the evolution
operator to the current sparse superposition and then observes it
against the accept / reject / non-halting decomposition: halting mass
is accumulated into probabilities and removed, and the residual is
never renormalized, so the three numbers stay additive.

Probabilities come from exact path summation over the sparse amplitude
map, not sampling; for the bounded runs this package targets the
reachable configuration sets are small.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .io import tokenize_word
from .model import (
    Direction,
    LEFT_MARKER,
    RIGHT_MARKER,
    STACK_BASE,
    QpaError,
    QpaSpec,
)
from .wellformed import ConditionSummary, check_all

PRUNE_EPS = 1e-15
HALT_EPS = 1e-12


class TapeOverrunError(QpaError):
    """A live branch tried to advance past the right end marker."""


class NotWellFormedError(QpaError):
    """Recognition refused because the table fails its conditions."""

    def __init__(self, summary: ConditionSummary):
        self.summary = summary
        failed = [r.condition_id for r in summary.results if not r.passed]
        super().__init__(f"table is not well-formed; failing conditions: {failed}")


@dataclass(frozen=True)
class TapeContext:
    """The framed input word; immutable for the duration of a run."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        if len(self.symbols) < 2 or self.symbols[0] != LEFT_MARKER or self.symbols[-1] != RIGHT_MARKER:
            raise ValueError("tape must be a framed word with both end markers")

    @classmethod
    def from_word(cls, spec: QpaSpec, word) -> "TapeContext":
        syms = tokenize_word(spec.alphabets, word) if isinstance(word, str) else tuple(word)
        for s in syms:
            if s not in spec.alphabets.sigma:
                raise QpaError(f"{s!r} is not an input symbol")
        return cls((LEFT_MARKER, *syms, RIGHT_MARKER))

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True, order=True)
class Configuration:
    state: str
    head: int
    stack: tuple[str, ...]


@dataclass
class Superposition:
    """Sparse complex amplitude map over configurations."""

    amplitudes: dict[Configuration, complex]

    def norm_squared(self) -> float:
        return sum((abs(a) ** 2 for a in self.amplitudes.values()), 0.0)

    def sorted_items(self) -> list[tuple[Configuration, complex]]:
        return sorted(self.amplitudes.items(), key=lambda kv: kv[0])

    def amplitude(self, config: Configuration) -> complex:
        return self.amplitudes.get(config, 0.0 + 0.0j)

    def __len__(self) -> int:
        return len(self.amplitudes)


@dataclass(frozen=True)
class RecognitionResult:
    p_accept: float
    p_reject: float
    p_nonhalt: float
    steps: int
    halted: bool


@dataclass(frozen=True)
class TraceStep:
    """One evolution step and its observation.

    ``entries`` is the superposition right after the evolution operator
    and before the observation, so interference on halting
    configurations is visible; the increments and the residual norm
    describe the observation that follows.
    """

    step: int
    entries: tuple[tuple[Configuration, complex], ...]
    p_accept_inc: float
    p_reject_inc: float
    p_accept: float
    p_reject: float
    residual_norm_squared: float


def initial_superposition(spec: QpaSpec, word) -> Superposition:
    """Unit mass on (initial state, head on the left marker, base stack)."""
    TapeContext.from_word(spec, word)
    return Superposition({Configuration(spec.q0, 0, (STACK_BASE,)): 1.0 + 0.0j})


def step_targets(spec: QpaSpec, tape: TapeContext, config: Configuration
                 ) -> tuple[list[tuple[Configuration, complex]], bool]:
    """Successors of one configuration with amplitudes, plus an overrun flag.

    The flag is set when a nonzero entry advances off the right end of
    the tape; such branches have no target configuration.
    """
    sigma = tape.symbols[config.head]
    tau = config.stack[-1]
    entries = spec.by_source().get((config.state, sigma, tau))
    if not entries:
        return [], False
    last = len(tape) - 1
    out = []
    overran = False
    for q, d, omega, amp in entries:
        if d is Direction.ADVANCE:
            if config.head == last:
                overran = True
                continue
            head = config.head + 1
        else:
            head = config.head
        stack = config.stack[:-1] + omega
        assert stack and stack[0] == STACK_BASE and STACK_BASE not in stack[1:], \
            "stack lost its base prefix"
        out.append((Configuration(q, head, stack), amp))
    return out, overran


def apply_evolution(spec: QpaSpec, tape: TapeContext, psi: Superposition,
                    prune_eps: float = PRUNE_EPS) -> Superposition:
    """One application of the evolution operator, by linear extension.

    Amplitudes arriving at the same configuration are summed, which is
    where interference happens; entries below ``prune_eps`` are dropped.
    """
    out: dict[Configuration, complex] = {}
    for config, alpha in psi.amplitudes.items():
        targets, overran = step_targets(spec, tape, config)
        if overran:
            raise TapeOverrunError(
                f"advance past the end marker from {config} (amplitude {alpha!r})")
        for target, amp in targets:
            out[target] = out.get(target, 0.0 + 0.0j) + alpha * amp
    if prune_eps > 0.0:
        out = {c: a for c, a in out.items() if abs(a) >= prune_eps}
    return Superposition(out)


def measure(psi: Superposition, q_accept: frozenset[str], q_reject: frozenset[str]
            ) -> tuple[float, float, Superposition]:
    """Observe against the accept / reject / non-halting decomposition.

    Returns the probability mass measured into each halting outcome and
    the unrenormalized residual supported on non-halting states.
    """
    p_acc = 0.0
    p_rej = 0.0
    residual: dict[Configuration, complex] = {}
    for config, alpha in psi.amplitudes.items():
        if config.state in q_accept:
            p_acc += abs(alpha) ** 2
        elif config.state in q_reject:
            p_rej += abs(alpha) ** 2
        else:
            residual[config] = alpha
    return p_acc, p_rej, Superposition(residual)


def default_max_steps(word_length: int) -> int:
    return 20 * (word_length + 2)


def _ensure_well_formed(spec: QpaSpec, force: bool) -> None:
    if force:
        return
    cached = getattr(spec, "_wf_summary", None)
    if cached is None:
        cached = check_all(spec)
        object.__setattr__(spec, "_wf_summary", cached)
    if not cached.passed:
        raise NotWellFormedError(cached)


def recognize(spec: QpaSpec, word, max_steps: int | None = None,
              halt_eps: float = HALT_EPS, force: bool = False) -> RecognitionResult:
    """Run the measure-many recognition loop on one input word.

    Stops once the residual mass drops below ``halt_eps`` (halted) or
    after ``max_steps`` evolution steps (not halted); the leftover mass
    is reported as the non-halting probability.
    """
    _ensure_well_formed(spec, force)
    tape = TapeContext.from_word(spec, word)
    if max_steps is None:
        max_steps = default_max_steps(len(tape) - 2)
    psi = initial_superposition(spec, word)
    p_acc = 0.0
    p_rej = 0.0
    steps = 0
    halted = False
    while steps < max_steps:
        psi = apply_evolution(spec, tape, psi)
        steps += 1
        acc_inc, rej_inc, psi = measure(psi, spec.q_accept, spec.q_reject)
        p_acc += acc_inc
        p_rej += rej_inc
        if psi.norm_squared() < halt_eps:
            halted = True
            break
    return RecognitionResult(
        p_accept=p_acc,
        p_reject=p_rej,
        p_nonhalt=psi.norm_squared(),
        steps=steps,
        halted=halted,
    )


def trace(spec: QpaSpec, word, max_steps: int | None = None,
          halt_eps: float = HALT_EPS, force: bool = False) -> list[TraceStep]:
    """Like recognize, but snapshots every step's pre-observation state."""
    _ensure_well_formed(spec, force)
    tape = TapeContext.from_word(spec, word)
    if max_steps is None:
        max_steps = default_max_steps(len(tape) - 2)
    psi = initial_superposition(spec, word)
    p_acc = 0.0
    p_rej = 0.0
    out: list[TraceStep] = []
    for step in range(1, max_steps + 1):
        psi = apply_evolution(spec, tape, psi)
        pre_observation = tuple(psi.sorted_items())
        acc_inc, rej_inc, psi = measure(psi, spec.q_accept, spec.q_reject)
        p_acc += acc_inc
        p_rej += rej_inc
        residual = psi.norm_squared()
        out.append(TraceStep(
            step=step,
            entries=pre_observation,
            p_accept_inc=acc_inc,
            p_reject_inc=rej_inc,
            p_accept=p_acc,
            p_reject=p_rej,
            residual_norm_squared=residual,
        ))
        if residual < halt_eps:
            break
    return out


def decide(result: RecognitionResult, threshold: float) -> str:
    """Map probabilities to a verdict using a strict-majority cutoff."""
    if not (0.5 < threshold <= 1.0):
        raise ValueError(f"threshold must lie in (0.5, 1], got {threshold}")
    if result.p_accept >= threshold:
        return "accepted"
    if result.p_reject >= threshold:
        return "rejected"
    return "inconclusive"


def next_above_half() -> float:
    """Smallest float strictly above 1/2; the default decision threshold."""
    return math.nextafter(0.5, 1.0)


def result_to_dict(result: RecognitionResult) -> dict:
    return {
        "p_accept": result.p_accept,
        "p_reject": result.p_reject,
        "p_nonhalt": result.p_nonhalt,
        "steps": result.steps,
        "halted": result.halted,
    }


def trace_to_dict(steps: list[TraceStep]) -> list[dict]:
    return [
        {
            "step": s.step,
            "p_accept_inc": s.p_accept_inc,
            "p_reject_inc": s.p_reject_inc,
            "p_accept": s.p_accept,
            "p_reject": s.p_reject,
            "residual_norm_squared": s.residual_norm_squared,
            "superposition": [
                {
                    "state": c.state,
                    "head": c.head,
                    "stack": list(c.stack),
                    "re": a.real,
                    "im": a.imag,
                }
                for c, a in s.entries
            ],
        }
        for s in steps
    ]
