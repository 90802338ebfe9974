"""Adversarial constructions against learners and candidate codes.

Genericity arguments become exhaustive bounded searches: density of a set of
conditions is witnessed by finding an extension inside it, never assumed.
Every verdict ships enough committed data to replay it exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import words
from .errors import ConfigError, ContractViolation, UseViolation
from .formulas import And, BitOf, ExistsForall, Le, TERM_N, const_term, eval_exact_ep
from .learners import (
    ConstantLearner,
    Informant,
    Learner,
    RecentOnesLearner,
    SynthLearner,
)
from .relations import e0_code, id_code
from .simulation import run_session
from .words import Word

__all__ = [
    "Condition",
    "ForcedExtension",
    "EXHAUSTED",
    "AdversaryRun",
    "MembershipRun",
    "force_mind_change",
    "diagonalize_inf",
    "falsify_inf_classifier",
    "candidate_codes",
    "shipped_sim0_candidates",
    "inf_family_informant",
    "bc_class_membership_procedure",
    "enumerate_words",
    "format_adversary_record",
]


class _Exhausted:
    def __repr__(self):
        return "EXHAUSTED"


EXHAUSTED = _Exhausted()


def _binary(s: str, what: str) -> str:
    if any(c not in "01" for c in s):
        raise ConfigError(f"{what} must be a binary string, got {s!r}")
    return s


@dataclass(frozen=True)
class Condition:
    """Finite commitments: a target prefix and one prefix per informant slot."""

    target_prefix: str
    informant_prefixes: tuple

    def __post_init__(self):
        _binary(self.target_prefix, "target prefix")
        for p in self.informant_prefixes:
            _binary(p, "informant prefix")

    def completed_target(self) -> Word:
        return Word(self.target_prefix, "0")

    def completed_informant(self) -> Informant:
        return Informant.explicit([Word(p, "0") for p in self.informant_prefixes])


@dataclass(frozen=True)
class ForcedExtension:
    condition: Condition
    stage: int


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def force_mind_change(learner: Learner, c: Condition, current_hyp: int,
                      depth_budget: int, stage_budget: int):
    """Search all extensions of c, shortest first, for one that makes the
    learner emit something other than current_hyp within the stage budget."""
    streams = 1 + len(c.informant_prefixes)
    horizon = max(stage_budget, 1)
    for total in range(depth_budget + 1):
        for lengths in _compositions(total, streams):
            pools = [itertools.product("01", repeat=n) for n in lengths]
            for added in itertools.product(*pools):
                ext = Condition(
                    c.target_prefix + "".join(added[0]),
                    tuple(p + "".join(a)
                          for p, a in zip(c.informant_prefixes, added[1:])),
                )
                trace = run_session(learner, ext.completed_target(),
                                    ext.completed_informant(), horizon)
                for stage, hyp in enumerate(trace.hypotheses[:stage_budget + 1]):
                    if hyp != current_hyp:
                        return ForcedExtension(ext, stage)
    return EXHAUSTED


@dataclass(frozen=True)
class AdversaryRun:
    committed_target: Word
    phase_log: tuple
    mind_change_stages: tuple
    verdict: str                    # FORCED | LEARNER_STUCK | BUDGET_EXHAUSTED
    forced_rounds: int | None = None
    witness: Word | None = None


def inf_family_informant() -> Informant:
    # slot 0 is the infinite-support representative, then all finite-support words
    return Informant.from_function(
        lambda j: Word("", "1") if j == 0 else words.finite_support_word(j - 1)
    )


class _GrowingTargetView:
    """Stage view over a target defined by a mutable set of one-positions."""

    def __init__(self, ones, informant, stage, bound, on_read):
        self._ones = ones
        self._informant = informant
        self._stage = stage
        self._bound = bound
        self._on_read = on_read

    @property
    def informant_size(self):
        return self._informant.size

    def _check(self, pos):
        if pos >= self._bound:
            raise UseViolation(self._stage, pos, self._bound)

    def target_bit(self, pos):
        self._check(pos)
        self._on_read(pos)
        return 1 if pos in self._ones else 0

    def informant_bit(self, j, pos):
        self._check(pos)
        w = self._informant.word(j)
        return w.bit(pos)


def _word_from_ones(ones) -> Word:
    if not ones:
        return Word("", "0")
    top = max(ones)
    return Word("".join("1" if i in ones else "0" for i in range(top + 1)), "0")


def diagonalize_inf(learner: Learner, relation, patience: int, rounds: int) -> AdversaryRun:
    """Straddle the infinite-support boundary against a fixed learner.

    While the hypothesis sits at index 0 (the infinite-support claim), the
    revealed target stays all-zero beyond the committed ones; each time the
    hypothesis leaves 0, one more 1 is committed past everything the learner
    has been allowed to read.  A learner parked at 0 past the patience budget
    is stuck: the all-zero completion refutes its claim exactly.
    """
    if relation.name not in ("sim0", "sim1"):
        raise ConfigError(f"diagonalization targets sim0 or sim1, not {relation.name}")
    informant = inf_family_informant()
    one_rep = informant.word(0)

    ones: set[int] = set()
    frontier = 0
    state = learner.fresh_state()
    stage = 0
    prev_hyp = None
    mind_changes = []
    phase_log = []

    def step_once():
        nonlocal state, stage, prev_hyp, frontier
        bound = learner.use_bound_at(stage)
        reads = []
        view = _GrowingTargetView(ones, informant, stage, bound, reads.append)
        state, hyp = learner.step(state, stage, view)
        frontier = max([frontier] + [p + 1 for p in reads])
        if prev_hyp is not None and hyp != prev_hyp:
            mind_changes.append(stage)
        prev_hyp = hyp
        stage += 1
        return hyp

    for r in range(rounds):
        fed = 0
        while True:
            hyp = step_once()
            if hyp != 0:
                break
            fed += 1
            if fed > patience:
                witness = _word_from_ones(ones)
                assert not witness.is_inf
                assert not relation.decide(witness, one_rep)
                phase_log.append(f"round {r}: hypothesis parked at 0 past patience {patience}")
                return AdversaryRun(witness, tuple(phase_log), tuple(mind_changes),
                                    "LEARNER_STUCK", None, witness)
        pos = max(frontier, (max(ones) + 1) if ones else 0)
        ones.add(pos)
        frontier = pos + 1
        phase_log.append(f"round {r}: left 0 after {fed} zero-fed stages, committed 1 at {pos}")

    committed = _word_from_ones(ones)
    return AdversaryRun(committed, tuple(phase_log), tuple(mind_changes),
                        "FORCED", rounds, None)


def enumerate_words(max_size: int):
    """All canonical words with size ≤ max_size: by size, preperiod length, bits."""
    out = []
    for total in range(1, max_size + 1):
        for pre_len in range(total):
            per_len = total - pre_len
            for pre_bits in itertools.product("01", repeat=pre_len):
                pre = "".join(pre_bits)
                for per_bits in itertools.product("01", repeat=per_len):
                    per = "".join(per_bits)
                    w = Word(pre, per)
                    if (w.pre, w.per) == (pre, per):
                        out.append(w)
    return out


def falsify_inf_classifier(code, relation, max_size: int):
    """First word pair within the size bound where the code's exact value
    disagrees with the relation's oracle; None if the bound finds nothing."""
    ws = enumerate_words(max_size)
    for x in ws:
        for y in ws:
            if eval_exact_ep(code, x, y) != relation.decide(x, y):
                return (x, y)
    return None


def candidate_codes():
    """Small two-level codes a falsifier must defeat, all of size ≤ 6."""
    return (
        ("always-true", ExistsForall(Le(const_term(0), const_term(0)))),
        ("always-false", ExistsForall(Le(const_term(1), const_term(0)))),
        ("identity", id_code()),
        ("tail-agreement", e0_code()),
        ("common-one", ExistsForall(And(BitOf("x", TERM_N), BitOf("y", TERM_N)))),
    )


def shipped_sim0_candidates():
    """Candidate learners for the infinite-support relation, for diagonalization."""
    informant = inf_family_informant()
    return (
        ("synth-tail-agreement", lambda: SynthLearner(e0_code(), informant)),
        ("constant-0", lambda: ConstantLearner(0)),
        ("recent-ones", lambda: RecentOnesLearner(8)),
    )


@dataclass(frozen=True)
class MembershipRun:
    values: tuple             # hypothesis of a fresh run at each stage
    limit_zero: bool          # all-zero on the final quarter of the window


def bc_class_membership_procedure(bc: Learner, relation, y: Word, b, z: Word,
                                  horizon: int) -> MembershipRun:
    """Staged membership test for z against y's class, driven by a BC learner.

    The informant starts as (z, y, y, ...).  While the fresh-run hypothesis
    stays at 0, unpinned slots commit longer prefixes of y; when it moves,
    slots at or beyond the first unpinned index are punished: pinned forever
    to a b(n) that shares the committed prefix but is outside the class.
    Related z lets the hypothesis rest at 0; unrelated z keeps the punishment
    front marching, so the final quarter of the window cannot be all zeros.
    """
    if horizon < 4:
        raise ConfigError("membership procedure needs horizon at least 4")

    checked = {}

    def b_checked(n: int) -> Word:
        if n not in checked:
            w = b(n)
            if w.prefix(n) != y.prefix(n):
                raise ContractViolation(f"b({n}) does not extend the target prefix of length {n}")
            if relation.decide(w, y):
                raise ContractViolation(f"b({n}) is related to the target")
            checked[n] = w
        return checked[n]

    for n in range(horizon + 1):
        b_checked(n)

    # slot j describes informant index j+1: ("open", committed prefix length) or ("pin", word)
    slots: list = []

    def slot(j: int):
        while len(slots) <= j:
            slots.append(("open", 0))
        return slots[j]

    def snapshot() -> Informant:
        frozen = tuple(slots)

        def at(j: int) -> Word:
            if j == 0:
                return z
            if j - 1 < len(frozen) and frozen[j - 1][0] == "pin":
                return frozen[j - 1][1]
            return y

        return Informant.from_function(at)

    values = []
    for s in range(horizon):
        trace = run_session(bc, y, snapshot(), max(s, 1))
        i_s = trace.hypotheses[s]
        values.append(i_s)

        u = bc.use_bound_at(s)
        calm = s == 0 or (i_s == 0 and values[s - 1] == 0)
        if calm:
            for j in range(s):
                kind, t = slot(j)
                if kind == "open":
                    slots[j] = ("open", max(t, u))
            continue

        touched = max(len(slots), i_s + 1, s)
        front = 0
        while front < touched and slot(front)[0] == "pin":
            front += 1
        before = [slot(j) for j in range(touched)]
        for j in range(front, touched):
            kind, t = before[j]
            if kind != "open":
                continue
            later_initialized = any(
                before[i][0] == "pin" or before[i][1] > 0 for i in range(j + 1, touched)
            )
            if later_initialized or j <= i_s:
                n_j = max(t, u) if j + 1 <= s else t
                slots[j] = ("pin", b_checked(n_j))

    quarter = range(3 * horizon // 4, horizon)
    flag = all(values[s] == 0 for s in quarter)
    return MembershipRun(tuple(values), flag)


def format_adversary_record(run: AdversaryRun) -> str:
    stages = ",".join(str(s) for s in run.mind_change_stages)
    verdict = run.verdict if run.forced_rounds is None else f"FORCED({run.forced_rounds})"
    line = f"verdict={verdict} stages={stages} target={run.committed_target.literal}"
    if run.witness is not None:
        line += f" witness={run.witness.literal}"
    return line
