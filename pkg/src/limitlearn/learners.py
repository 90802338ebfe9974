"""Learner construction.

A learner is a deterministic stage machine: step(state, stage, view) returns
the successor state and a hypothesis index into the informant.  All queries go
through the view, which enforces the learner's declared use schedule, so
determinism plus the schedule realizes the continuity contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from . import formulas, words
from .errors import ConfigError, ContractViolation
from .formulas import ExistsForall, compile_pred, parse_formula, parse_formulas, pred_sides, use_bound
from .words import Word

__all__ = [
    "cantor_pair",
    "cantor_unpair",
    "Informant",
    "Learner",
    "SynthLearner",
    "SeparatorLearner",
    "CountableClassLearner",
    "ClassIndexSets",
    "class_index_sets",
    "BcToExLearner",
    "Reduction",
    "identity_reduction",
    "prefix_reduction",
    "embed_reduction",
    "TransportLearner",
    "CyclingLearner",
    "ConstantLearner",
    "RecentOnesLearner",
    "synth_from_code",
    "separator_learner",
    "countable_class_learner",
    "bc_to_ex",
    "transport_learner",
    "cycling_bc_learner",
    "learner_from_string",
]


def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def cantor_unpair(k: int) -> tuple[int, int]:
    w = (math.isqrt(8 * k + 1) - 1) // 2
    b = k - w * (w + 1) // 2
    return w - b, b


class Informant:
    """Sequence of reference words: explicit finite list or named generator."""

    def __init__(self, explicit_words=None, fn=None):
        if (explicit_words is None) == (fn is None):
            raise ConfigError("informant needs exactly one of a word list or a function")
        self._words = None if explicit_words is None else tuple(explicit_words)
        self._fn = fn
        self._cache = {}

    @staticmethod
    def explicit(ws) -> "Informant":
        ws = tuple(ws)
        if not ws:
            raise ConfigError("explicit informant must be nonempty")
        return Informant(explicit_words=ws)

    @staticmethod
    def from_function(fn) -> "Informant":
        return Informant(fn=fn)

    @staticmethod
    def finite_support(start: int = 0) -> "Informant":
        return Informant(fn=lambda j: words.finite_support_word(start + j))

    @staticmethod
    def prefixed(bit: int, inner: "Informant") -> "Informant":
        return Informant(fn=lambda j: words.prefix_with(bit, inner.word(j)))

    @property
    def size(self) -> int | None:
        return None if self._words is None else len(self._words)

    @property
    def is_explicit(self) -> bool:
        return self._words is not None

    def word(self, j: int) -> Word | None:
        if j < 0:
            return None
        if self._words is not None:
            return self._words[j] if j < len(self._words) else None
        if j not in self._cache:
            self._cache[j] = self._fn(j)
        return self._cache[j]

    def explicit_words(self) -> tuple[Word, ...]:
        if self._words is None:
            raise ConfigError("operation needs an explicit informant")
        return self._words


class Learner:
    """Deterministic stage machine with a declared use schedule."""

    def fresh_state(self):
        return None

    def step(self, state, stage: int, view):
        raise NotImplementedError

    def use_bound_at(self, stage: int) -> int:
        raise NotImplementedError

    def pointer_of(self, state):
        return None


class SynthLearner(Learner):
    """Learner synthesized from a single EF code.

    The state walks the Cantor enumeration of pairs (informant index, inner
    witness).  At stage s the pointer skips, while it is below s, every pair
    refuted by some m < s and every pair whose informant index is out of
    range, then the current pair's index component is emitted.  The pointer
    cap of one pair per elapsed stage keeps each stage finite even on codes
    that refute everything.
    """

    def __init__(self, code, informant: Informant):
        if not isinstance(code, ExistsForall):
            raise ConfigError("synthesizer needs a single exists-forall atom")
        self.code = code
        self.pred = code.pred
        self.informant = informant

    def fresh_state(self):
        # (pointer, first m not yet checked against the current pair)
        return (0, 0)

    def use_bound_at(self, stage: int) -> int:
        return use_bound(self.pred, stage, stage)

    def pointer_of(self, state):
        return state[0]

    def step(self, state, stage: int, view):
        k, next_m = state
        size = view.informant_size
        while k < stage:
            a, b = cantor_unpair(k)
            if size is not None and a >= size:
                k += 1
                next_m = 0
                continue
            cp = compile_pred(self.pred, view.target_bit, lambda i, a=a: view.informant_bit(a, i))
            refuted = False
            for m in range(next_m, stage):
                if not cp(b, m):
                    refuted = True
                    break
            if refuted:
                k += 1
                next_m = 0
                continue
            next_m = stage
            break
        a, _ = cantor_unpair(k)
        return (k, next_m), a


class SeparatorLearner(Learner):
    """Learner from a finite list of unary set codes over the target.

    Emits the set component of the minimal surviving (set, witness) pair
    below the stage, with the stage itself as the nothing-survives sentinel.
    """

    def __init__(self, set_codes):
        set_codes = tuple(set_codes)
        if not set_codes:
            raise ConfigError("separator learner needs at least one set code")
        for code in set_codes:
            if not isinstance(code, ExistsForall):
                raise ConfigError("separator codes must be single exists-forall atoms")
            if pred_sides(code.pred) - {"x"}:
                raise ConfigError("separator codes must mention only the target side x")
        self.codes = set_codes

    def use_bound_at(self, stage: int) -> int:
        return max(use_bound(c.pred, stage, stage) for c in self.codes)

    def step(self, state, stage: int, view):
        for idx in range(stage):
            i, n = cantor_unpair(idx)
            if i >= len(self.codes):
                continue
            cp = compile_pred(self.codes[i].pred, view.target_bit, view.target_bit)
            if all(cp(n, m) for m in range(stage)):
                return state, i
        return state, stage


class CountableClassLearner(Learner):
    """Learner for countable classes given by finite row enumerations.

    Hypothesis at stage n: least row i < n holding, within its first n
    entries, a word agreeing with the target on the first n bits; sentinel n.
    """

    def __init__(self, rows):
        self.rows = tuple(tuple(r) for r in rows)

    def use_bound_at(self, stage: int) -> int:
        return stage

    def step(self, state, stage: int, view):
        got = "".join(str(view.target_bit(i)) for i in range(stage))
        for i, row in enumerate(self.rows[:stage]):
            if any(w.prefix(stage) == got for w in row[:stage]):
                return state, i
        return state, stage


@dataclass(frozen=True)
class ClassIndexSets:
    """For each informant index i, the block e_i of indices equivalent to i."""

    blocks: tuple

    def __post_init__(self):
        for i, block in enumerate(self.blocks):
            if i not in block:
                raise ConfigError(f"class block e_{i} must contain {i}")
            for j in block:
                if not 0 <= j < len(self.blocks):
                    raise ConfigError(f"class block e_{i} mentions out-of-range index {j}")
                if self.blocks[j] != block:
                    raise ConfigError(f"class blocks e_{i} and e_{j} disagree")

    def e(self, i: int):
        return self.blocks[i]

    @property
    def count(self) -> int:
        return len(self.blocks)


def class_index_sets(relation, informant_words) -> ClassIndexSets:
    ws = tuple(informant_words)
    return ClassIndexSets(
        tuple(
            frozenset(j for j, wj in enumerate(ws) if relation.decide(wj, wi))
            for wi in ws
        )
    )


class BcToExLearner(Learner):
    """Wraps a BC learner, replacing each hypothesis h by min(e_h)."""

    def __init__(self, inner: Learner, classes: ClassIndexSets):
        self.inner = inner
        self.classes = classes

    def fresh_state(self):
        return self.inner.fresh_state()

    def use_bound_at(self, stage: int) -> int:
        return self.inner.use_bound_at(stage)

    def pointer_of(self, state):
        return self.inner.pointer_of(state)

    def step(self, state, stage: int, view):
        state, h = self.inner.step(state, stage, view)
        if not 0 <= h < self.classes.count:
            raise ContractViolation(
                f"hypothesis {h} outside the class structure over {self.classes.count} indices"
            )
        return state, min(self.classes.e(h))


@dataclass(frozen=True)
class Reduction:
    """Continuous word map: output bits below k depend on input bits below modulus(k)."""

    name: str
    modulus: object
    bit_rule: object
    apply_word: object


def identity_reduction() -> Reduction:
    return Reduction("identity", lambda k: k, lambda pos, src: src(pos), lambda w: w)


def prefix_reduction(bit: int) -> Reduction:
    if bit not in (0, 1):
        raise ConfigError("prefix reduction bit must be 0 or 1")

    def rule(pos, src):
        return bit if pos == 0 else src(pos - 1)

    return Reduction(
        f"prefix{bit}",
        lambda k: max(k - 1, 0),
        rule,
        lambda w: words.prefix_with(bit, w),
    )


def embed_reduction() -> Reduction:
    """Principal-form round trip: the identity on infinite-support words."""

    def apply(w: Word) -> Word:
        if not w.is_inf:
            raise ConfigError("increasing-sequence embedding needs infinite support")
        return words.embed_increasing_sequence(words.principal_form(w))

    return Reduction("embed", lambda k: k, lambda pos, src: src(pos), apply)


class _TransportedView:
    def __init__(self, view, reduction):
        self._view = view
        self._red = reduction

    @property
    def informant_size(self):
        return self._view.informant_size

    def _through(self, pos, raw):
        bound = self._red.modulus(pos + 1)

        def src(q):
            if q >= bound:
                raise ContractViolation(
                    f"reduction {self._red.name} read input {q} beyond modulus({pos + 1})={bound}"
                )
            return raw(q)

        return self._red.bit_rule(pos, src)

    def target_bit(self, pos):
        return self._through(pos, self._view.target_bit)

    def informant_bit(self, j, pos):
        return self._through(pos, lambda q: self._view.informant_bit(j, q))


class TransportLearner(Learner):
    """Runs the base learner on the reduction's images, stage for stage."""

    def __init__(self, base: Learner, reduction: Reduction):
        self.base = base
        self.reduction = reduction

    def fresh_state(self):
        return self.base.fresh_state()

    def use_bound_at(self, stage: int) -> int:
        return self.reduction.modulus(self.base.use_bound_at(stage))

    def pointer_of(self, state):
        return self.base.pointer_of(state)

    def step(self, state, stage: int, view):
        return self.base.step(state, stage, _TransportedView(view, self.reduction))


class CyclingLearner(Learner):
    """BC-correct fixture: cycles through one class block, never converging."""

    def __init__(self, classes: ClassIndexSets, true_class: int):
        if not 0 <= true_class < classes.count:
            raise ConfigError(f"true class {true_class} out of range")
        block = sorted(classes.e(true_class))
        if len(block) < 2:
            raise ConfigError("cycling learner needs a class block with at least 2 elements")
        self.block = block

    def use_bound_at(self, stage: int) -> int:
        return 0

    def step(self, state, stage: int, view):
        return state, self.block[stage % len(self.block)]


class ConstantLearner(Learner):
    def __init__(self, hypothesis: int = 0):
        self.hypothesis = hypothesis

    def use_bound_at(self, stage: int) -> int:
        return 0

    def step(self, state, stage: int, view):
        return state, self.hypothesis


class RecentOnesLearner(Learner):
    """Candidate infinite-support classifier: a one in the recent window means
    hypothesis 0, otherwise a guess derived from the ones seen so far."""

    def __init__(self, window: int = 8):
        if window < 1:
            raise ConfigError("window must be positive")
        self.window = window

    def use_bound_at(self, stage: int) -> int:
        return stage

    def step(self, state, stage: int, view):
        recent = range(max(0, stage - self.window), stage)
        if any(view.target_bit(i) == 1 for i in recent):
            return state, 0
        ones = sum(view.target_bit(i) for i in range(stage))
        return state, 1 + ones


# ------------------------------------------------------- construction names


def synth_from_code(code, informant: Informant) -> SynthLearner:
    return SynthLearner(code, informant)


def separator_learner(set_codes) -> SeparatorLearner:
    return SeparatorLearner(set_codes)


def countable_class_learner(rows) -> CountableClassLearner:
    return CountableClassLearner(rows)


def bc_to_ex(bc: Learner, classes: ClassIndexSets) -> BcToExLearner:
    return BcToExLearner(bc, classes)


def transport_learner(base: Learner, reduction: Reduction) -> TransportLearner:
    return TransportLearner(base, reduction)


def cycling_bc_learner(classes: ClassIndexSets, true_class: int) -> CyclingLearner:
    return CyclingLearner(classes, true_class)


_REDUCTIONS = {
    "identity": identity_reduction,
    "prefix0": lambda: prefix_reduction(0),
    "prefix1": lambda: prefix_reduction(1),
    "embed": embed_reduction,
}


def _parse_rows_file(text: str):
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        rows.append([words.parse_word(tok) for tok in line.split()])
    if not rows:
        raise ConfigError("rows file holds no rows")
    return rows


def learner_from_string(spec: str, relation=None, informant: Informant | None = None, base_dir: str = ".") -> Learner:
    """Build a learner from a selection string like synth:FILE or cycling:2."""
    kind, _, rest = spec.partition(":")
    base = Path(base_dir)

    def read(name):
        p = base / name
        try:
            return p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {p}: {exc}") from exc

    def need_classes():
        if relation is None or informant is None or not informant.is_explicit:
            raise ConfigError(f"{kind} learner needs a relation and an explicit informant")
        return class_index_sets(relation, informant.explicit_words())

    if kind == "synth":
        if informant is None:
            raise ConfigError("synth learner needs an informant")
        return SynthLearner(parse_formula(read(rest)), informant)
    if kind == "separators":
        return SeparatorLearner(parse_formulas(read(rest)))
    if kind == "countable":
        return CountableClassLearner(_parse_rows_file(read(rest)))
    if kind == "bc2ex":
        if not rest:
            raise ConfigError("bc2ex needs an inner learner string")
        return BcToExLearner(learner_from_string(rest, relation, informant, base_dir), need_classes())
    if kind == "transport":
        red_name, _, inner = rest.partition(":")
        if red_name not in _REDUCTIONS:
            raise ConfigError(f"unknown reduction {red_name!r}; have {', '.join(sorted(_REDUCTIONS))}")
        if not inner:
            raise ConfigError("transport needs an inner learner string")
        return TransportLearner(learner_from_string(inner, relation, informant, base_dir), _REDUCTIONS[red_name]())
    if kind == "cycling":
        try:
            true_class = int(rest)
        except ValueError:
            raise ConfigError(f"cycling needs a class index, got {rest!r}") from None
        return CyclingLearner(need_classes(), true_class)
    if kind == "constant":
        try:
            return ConstantLearner(int(rest or "0"))
        except ValueError:
            raise ConfigError(f"constant needs an index, got {rest!r}") from None
    if kind == "recent-ones":
        return RecentOnesLearner(int(rest) if rest else 8)
    raise ConfigError(f"unknown learner kind {kind!r}")
