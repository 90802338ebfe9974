"""Learning game runtime.

Runs a learner against a target and an informant stage by stage, recording
hypotheses and every bit queried, then reports convergence facts three ways:
stable suffix in the trace, horizon correctness against the oracle, and an
exact certificate computed from the learner's code.  Limits are not
observable at a finite stage, so the three are deliberately kept apart.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, UseViolation
from .formulas import eval_exact_ep, exact_inner_bound, least_refutation
from .learners import Informant, Learner, SynthLearner, cantor_unpair
from .words import Word

__all__ = [
    "StageView",
    "SessionTrace",
    "SessionReport",
    "ConvergenceCertificate",
    "run_session",
    "summarize",
    "certify_convergence",
    "use_principle_check",
    "format_stage_record",
    "format_summary_record",
]


class StageView:
    """Query window for one stage: enforces the use bound, logs every read."""

    def __init__(self, target: Word, informant: Informant, stage: int, bound: int,
                 informant_overrides=None):
        self._target = target
        self._informant = informant
        self._stage = stage
        self._bound = bound
        self._overrides = informant_overrides or {}
        self.reads = set()

    @property
    def informant_size(self):
        return self._informant.size

    def _check(self, pos: int):
        if pos >= self._bound:
            raise UseViolation(self._stage, pos, self._bound)
        if pos < 0:
            raise ConfigError(f"negative position {pos}")

    def target_bit(self, pos: int) -> int:
        self._check(pos)
        self.reads.add(("t", pos))
        return self._target.bit(pos)

    def informant_bit(self, j: int, pos: int) -> int:
        self._check(pos)
        self.reads.add(("i", j, pos))
        if (j, pos) in self._overrides:
            return self._overrides[(j, pos)]
        w = self._informant.word(j)
        if w is None:
            raise ConfigError(f"informant index {j} out of range")
        return w.bit(pos)


@dataclass(frozen=True)
class SessionTrace:
    target: Word
    informant: Informant
    hypotheses: tuple         # h_0 .. h_H
    pointers: tuple           # per-stage pointer or None
    reads: tuple              # per-stage frozensets of query log entries

    @property
    def horizon(self) -> int:
        return len(self.hypotheses) - 1


@dataclass(frozen=True)
class ConvergenceCertificate:
    limit_index: int
    surviving_pair: tuple
    refutations: tuple        # (a, b, m) per earlier pair; m None for range skips
    stabilization_stage: int


@dataclass(frozen=True)
class SessionReport:
    mind_changes: int
    last_change_stage: int
    ex_correct_at_horizon: bool
    bc_correct_suffix_start: int | None
    certified: ConvergenceCertificate | None


def run_session(learner: Learner, target: Word, informant: Informant, horizon: int,
                informant_overrides=None) -> SessionTrace:
    """Run stages 0..horizon inclusive; deterministic given equal inputs."""
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    state = learner.fresh_state()
    hyps, pointers, reads = [], [], []
    last_pointer = None
    for stage in range(horizon + 1):
        view = StageView(target, informant, stage, learner.use_bound_at(stage),
                         informant_overrides)
        state, hyp = learner.step(state, stage, view)
        pointer = learner.pointer_of(state)
        if pointer is not None and last_pointer is not None:
            assert pointer >= last_pointer, "synthesizer pointer must not retreat"
        last_pointer = pointer
        hyps.append(hyp)
        pointers.append(pointer)
        reads.append(frozenset(view.reads))
    return SessionTrace(target, informant, tuple(hyps), tuple(pointers), tuple(reads))


def summarize(trace: SessionTrace, relation, target: Word, informant: Informant,
              certificate: ConvergenceCertificate | None = None) -> SessionReport:
    hyps = trace.hypotheses
    horizon = trace.horizon

    def correct(h: int) -> bool:
        w = informant.word(h)
        return w is not None and relation.decide(target, w)

    changes = [s for s in range(1, len(hyps)) if hyps[s] != hyps[s - 1]]
    mind_changes = len(changes)
    last_change = changes[-1] if changes else 0
    ex_correct = correct(hyps[-1]) and last_change < horizon

    bc_start = None
    if correct(hyps[-1]):
        s = len(hyps) - 1
        while s > 0 and correct(hyps[s - 1]):
            s -= 1
        bc_start = s
    return SessionReport(mind_changes, last_change, ex_correct, bc_start, certificate)


def certify_convergence(learner: Learner, target: Word,
                        informant: Informant | None = None) -> ConvergenceCertificate | None:
    """Exact convergence certificate for a synthesized learner, or None.

    Walks the pair enumeration the synthesizer's pointer walks, but with
    exact evaluation: every pair before the first exactly-true one gets a
    concrete refuting witness (or a range skip), so the pointer's final
    resting place is forced.
    """
    if not isinstance(learner, SynthLearner):
        raise ConfigError("certification needs a synthesized learner")
    informant = informant if informant is not None else learner.informant
    if not informant.is_explicit:
        raise ConfigError("certification needs an explicit informant")
    ws = informant.explicit_words()
    pred = learner.pred

    truths = [eval_exact_ep(learner.code, target, w) for w in ws]
    if not any(truths):
        return None

    refutations = []
    k = 0
    while True:
        a, b = cantor_unpair(k)
        if a >= len(ws):
            refutations.append((a, b, None))
            k += 1
            continue
        bound = exact_inner_bound(pred, target, ws[a], b)
        m = least_refutation(pred, target, ws[a], b, bound)
        if m is None:
            surviving = (a, b)
            break
        refutations.append((a, b, m))
        k += 1

    witnesses = [m for (_, _, m) in refutations if m is not None]
    stabilization = max([k] + [m + 1 for m in witnesses])
    return ConvergenceCertificate(surviving[0], surviving, tuple(refutations), stabilization)


def use_principle_check(learner: Learner, cert: ConvergenceCertificate,
                        trace: SessionTrace, free_bits: int) -> bool:
    """Exhaustively overlay the lowest unqueried informant bits and re-run.

    True iff the hypothesis at the stabilization stage is the certified limit
    in all 2^free_bits completions.  The queried-bit record comes from the
    trace; only bits below the stabilization stage's use bound can matter.
    """
    if free_bits > 12:
        raise ConfigError(f"freeBits {free_bits} exceeds the exhaustive budget 12")
    informant = trace.informant
    if not informant.is_explicit:
        raise ConfigError("use principle check needs an explicit informant")
    stage = cert.stabilization_stage
    if stage > trace.horizon:
        raise ConfigError("trace too short for the certificate's stabilization stage")

    queried = set()
    for s in range(stage + 1):
        for entry in trace.reads[s]:
            if entry[0] == "i":
                queried.add((entry[1], entry[2]))

    bound = learner.use_bound_at(stage)
    slots = [(pos, j) for pos in range(bound) for j in range(informant.size)
             if (j, pos) not in queried]
    slots = slots[:free_bits]

    horizon = max(stage, 1)
    for mask in range(1 << len(slots)):
        overrides = {(j, pos): (mask >> i) & 1 for i, (pos, j) in enumerate(slots)}
        replay = run_session(learner, trace.target, informant, horizon, overrides)
        if replay.hypotheses[stage] != cert.limit_index:
            return False
    return True


def format_stage_record(stage: int, hypothesis: int, pointer, bits_read_count: int) -> str:
    p = "-" if pointer is None else str(pointer)
    return f"stage={stage} hypothesis={hypothesis} pointer={p} bitsReadCount={bits_read_count}"


def format_summary_record(report: SessionReport) -> str:
    bc = "-" if report.bc_correct_suffix_start is None else str(report.bc_correct_suffix_start)
    cert = "-" if report.certified is None else str(report.certified.limit_index)
    ex = "true" if report.ex_correct_at_horizon else "false"
    return (f"summary mindChanges={report.mind_changes} lastChangeStage={report.last_change_stage} "
            f"exCorrectAtHorizon={ex} bcCorrectSuffixStart={bc} certified={cert}")
