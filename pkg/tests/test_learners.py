"""Learner construction: pairing walk, informants, the synthesized, separator,
countable-class, wrapper, and fixture learners, reductions, and the selection
string parser.

Stage machines are driven here through an unrestricted view so their
hypothesis streams can be frozen independently of the session runner.
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from limitlearn.errors import ConfigError, ContractViolation
from limitlearn.formulas import (
    And,
    BitOf,
    ExistsForall,
    ForallExists,
    Not,
    TERM_N,
    use_bound,
)
from limitlearn.learners import (
    BcToExLearner,
    ClassIndexSets,
    ConstantLearner,
    CountableClassLearner,
    CyclingLearner,
    Informant,
    RecentOnesLearner,
    Reduction,
    SeparatorLearner,
    SynthLearner,
    TransportLearner,
    cantor_pair,
    cantor_unpair,
    class_index_sets,
    embed_reduction,
    identity_reduction,
    learner_from_string,
    prefix_reduction,
)
from limitlearn.relations import e0_code, id_code, make_relation
from limitlearn.words import parse_word as W


class FreeView:
    """Unlimited view for driving learners outside a session."""

    def __init__(self, target, informant_words, size="auto"):
        self._t = target
        self._ws = list(informant_words)
        self.informant_size = len(self._ws) if size == "auto" else size

    def target_bit(self, pos):
        return self._t.bit(pos)

    def informant_bit(self, j, pos):
        return self._ws[j].bit(pos)


def drive(learner, target, informant_words, stages):
    view = FreeView(target, informant_words)
    state = learner.fresh_state()
    hyps, pointers = [], []
    for s in range(stages):
        state, h = learner.step(state, s, view)
        hyps.append(h)
        pointers.append(learner.pointer_of(state))
    return hyps, pointers


# ------------------------------------------------------------------ pairing

def test_cantor_enumeration_order():
    assert [cantor_unpair(k) for k in range(6)] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


@given(st.integers(0, 10**6))
def test_cantor_unpair_inverts_pair(k):
    a, b = cantor_unpair(k)
    assert cantor_pair(a, b) == k


@given(st.integers(0, 1000), st.integers(0, 1000))
def test_cantor_pair_inverts_unpair(a, b):
    assert cantor_unpair(cantor_pair(a, b)) == (a, b)


# --------------------------------------------------------------- informants

def test_informant_explicit():
    inf = Informant.explicit([W("|0"), W("1|0")])
    assert inf.is_explicit and inf.size == 2
    assert inf.word(1) == W("1|0")
    assert inf.word(2) is None
    assert inf.word(-1) is None
    assert inf.explicit_words() == (W("|0"), W("1|0"))
    with pytest.raises(ConfigError):
        Informant.explicit([])


def test_informant_generators():
    inf = Informant.finite_support()
    assert not inf.is_explicit and inf.size is None
    assert inf.word(0) == W("|0")
    assert inf.word(1) == W("1|0")
    assert inf.word(2) == W("01|0")
    with pytest.raises(ConfigError):
        inf.explicit_words()
    shifted = Informant.finite_support(start=2)
    assert shifted.word(0) == W("01|0")
    pref = Informant.prefixed(1, Informant.finite_support())
    assert pref.word(0) == W("1|0")


def test_informant_caches_its_function():
    calls = []

    def fn(j):
        calls.append(j)
        return W("|0")

    inf = Informant.from_function(fn)
    inf.word(3)
    inf.word(3)
    assert calls == [3]


def test_informant_constructor_needs_one_source():
    with pytest.raises(ConfigError):
        Informant()
    with pytest.raises(ConfigError):
        Informant(explicit_words=[W("|0")], fn=lambda j: W("|0"))


# -------------------------------------------------------------- synthesized

def test_synth_rejects_non_ef_codes():
    inf = Informant.explicit([W("|0")])
    with pytest.raises(ConfigError):
        SynthLearner(ForallExists(BitOf("x", TERM_N)), inf)


def test_synth_schedule_and_pointer():
    l = SynthLearner(e0_code(), Informant.explicit([W("|1"), W("|0")]))
    assert l.fresh_state() == (0, 0)
    assert l.pointer_of((7, 3)) == 7
    assert l.use_bound_at(5) == use_bound(e0_code().pred, 5, 5) == 6


def test_synth_hypothesis_stream():
    """Reference walk: the target's tail matches informant word 1, reached at
    pair (1, 1) after refuting (0, 0), (0, 1), (1, 0) and skipping the
    out-of-range pair (2, 0)."""
    l = SynthLearner(e0_code(), Informant.explicit([W("|1"), W("|0")]))
    hyps, pointers = drive(l, W("1|0"), [W("|1"), W("|0")], 6)
    assert hyps == [0, 0, 0, 2, 1, 1]
    assert pointers == [0, 0, 2, 3, 4, 4]


def test_synth_without_size_never_skips():
    l = SynthLearner(id_code(), Informant.from_function(lambda j: W("|0")))
    view = FreeView(W("|1"), [W("|0")] * 64, size=None)
    state = l.fresh_state()
    for s in range(8):
        state, h = l.step(state, s, view)
    # every pair is refuted by bit 0, so the pointer climbs one pair per stage
    assert l.pointer_of(state) == 7
    assert h == cantor_unpair(7)[0]


# --------------------------------------------------------------- separators

HAS_ONE = ExistsForall(BitOf("x", TERM_N))
HAS_ZERO = ExistsForall(Not(BitOf("x", TERM_N)))
NEVER = ExistsForall(And(BitOf("x", TERM_N), Not(BitOf("x", TERM_N))))


def test_separator_validation():
    with pytest.raises(ConfigError):
        SeparatorLearner([])
    with pytest.raises(ConfigError):
        SeparatorLearner([ForallExists(BitOf("x", TERM_N))])
    with pytest.raises(ConfigError):
        SeparatorLearner([ExistsForall(BitOf("y", TERM_N))])


def test_separator_stream_walks_to_the_surviving_set():
    l = SeparatorLearner([HAS_ONE, NEVER, HAS_ZERO])
    hyps, _ = drive(l, W("|0"), [], 7)
    # pair (2, 0) sits at index 3 of the enumeration; sentinels before that
    assert hyps == [0, 1, 2, 3, 2, 2, 2]
    hyps1, _ = drive(l, W("1|0"), [], 4)
    assert hyps1 == [0, 0, 0, 0]


def test_separator_use_bound_is_the_worst_code():
    l = SeparatorLearner([HAS_ONE, ExistsForall(BitOf("x", TERM_N))])
    assert l.use_bound_at(4) == 5


# ----------------------------------------------------------- countable rows

def test_countable_stream():
    rows = [[W("|0")], [W("|1"), W("1|0")], [W("11|0")]]
    l = CountableClassLearner(rows)
    assert l.use_bound_at(9) == 9
    hyps, _ = drive(l, W("11|0"), [], 6)
    assert hyps == [0, 1, 1, 2, 2, 2]
    hyps0, _ = drive(l, W("|0"), [], 4)
    assert hyps0 == [0, 0, 0, 0]


def test_countable_truncates_rows_and_entries():
    # |0 sits second in its row, invisible until stage 2
    l = CountableClassLearner([[W("1|0"), W("|0")]])
    hyps, _ = drive(l, W("|0"), [], 4)
    assert hyps == [0, 1, 0, 0]


# ------------------------------------------------------------- class blocks

def test_class_index_sets_values():
    classes = class_index_sets(make_relation("e0"), [W("|1"), W("|0"), W("1|0")])
    assert classes.blocks == (frozenset({0}), frozenset({1, 2}), frozenset({1, 2}))
    assert classes.count == 3
    assert classes.e(2) == frozenset({1, 2})


def test_class_index_sets_validation():
    with pytest.raises(ConfigError):
        ClassIndexSets((frozenset({1}), frozenset({1})))
    with pytest.raises(ConfigError):
        ClassIndexSets((frozenset({0, 5}),))
    with pytest.raises(ConfigError):
        ClassIndexSets((frozenset({0, 1}), frozenset({1})))


def test_bc_to_ex_rewrites_into_block_minima():
    classes = ClassIndexSets((frozenset({0, 1}), frozenset({0, 1}), frozenset({2})))
    l = BcToExLearner(CyclingLearner(classes, 1), classes)
    hyps, _ = drive(l, W("|0"), [], 5)
    assert hyps == [0, 0, 0, 0, 0]


def test_bc_to_ex_rejects_out_of_range_hypotheses():
    classes = ClassIndexSets((frozenset({0}),))
    l = BcToExLearner(ConstantLearner(5), classes)
    with pytest.raises(ContractViolation):
        drive(l, W("|0"), [], 1)


# ---------------------------------------------------------------- fixtures

def test_cycling_learner():
    classes = ClassIndexSets((frozenset({0, 1}), frozenset({0, 1})))
    l = CyclingLearner(classes, 0)
    hyps, _ = drive(l, W("|0"), [], 7)
    assert hyps == [0, 1, 0, 1, 0, 1, 0]
    assert l.use_bound_at(99) == 0
    with pytest.raises(ConfigError):
        CyclingLearner(ClassIndexSets((frozenset({0}),)), 0)
    with pytest.raises(ConfigError):
        CyclingLearner(classes, 2)


def test_constant_learner():
    hyps, _ = drive(ConstantLearner(3), W("|1"), [], 3)
    assert hyps == [3, 3, 3]


def test_recent_ones_learner():
    with pytest.raises(ConfigError):
        RecentOnesLearner(0)
    hyps, _ = drive(RecentOnesLearner(2), W("1|0"), [], 5)
    assert hyps == [1, 0, 0, 2, 2]


# --------------------------------------------------------------- reductions

def test_reduction_word_maps():
    assert identity_reduction().apply_word(W("|01")) == W("|01")
    assert prefix_reduction(0).apply_word(W("|1")) == W("0|1")
    assert prefix_reduction(1).apply_word(W("|0")) == W("1|0")
    assert embed_reduction().apply_word(W("|10")) == W("|10")
    with pytest.raises(ConfigError):
        embed_reduction().apply_word(W("1|0"))
    with pytest.raises(ConfigError):
        prefix_reduction(2)


def test_reduction_moduli():
    assert [identity_reduction().modulus(k) for k in (0, 3)] == [0, 3]
    assert [prefix_reduction(1).modulus(k) for k in (0, 1, 3)] == [0, 0, 2]


def test_transport_agrees_with_base_on_images():
    base_words = [W("|1"), W("|0")]
    red = prefix_reduction(1)
    base = SynthLearner(e0_code(), Informant.explicit([red.apply_word(w) for w in base_words]))
    transported = TransportLearner(
        SynthLearner(e0_code(), Informant.explicit(base_words)), red
    )
    hyps_t, _ = drive(transported, W("|0"), base_words, 9)
    hyps_b, _ = drive(base, red.apply_word(W("|0")), [red.apply_word(w) for w in base_words], 9)
    assert hyps_t == hyps_b
    assert transported.use_bound_at(5) == red.modulus(base.use_bound_at(5)) == 5


def test_transport_catches_modulus_violations():
    greedy = Reduction("bad", lambda k: 0, lambda pos, src: src(pos), lambda w: w)
    l = TransportLearner(RecentOnesLearner(2), greedy)
    with pytest.raises(ContractViolation):
        drive(l, W("|1"), [], 2)


# ---------------------------------------------------------- selection names

def test_learner_from_string(tmp_path):
    (tmp_path / "e0.s2f").write_text(
        "(ef (or (le (ix 0 1 1) (ix 1 0 0)) (eq (ix 0 1 0) (ix 0 1 0))))\n"
    )
    (tmp_path / "seps.s2f").write_text("(ef (bit x (ix 1 0 0)))\n(ef (not (bit x (ix 1 0 0))))\n")
    (tmp_path / "rows.txt").write_text("# classes\n|0 1|0\n|1\n")
    inf = Informant.explicit([W("|0"), W("1|0")])
    e0 = make_relation("e0")
    base = str(tmp_path)

    l = learner_from_string("synth:e0.s2f", informant=inf, base_dir=base)
    assert isinstance(l, SynthLearner) and l.code == e0_code()

    l = learner_from_string("separators:seps.s2f", base_dir=base)
    assert isinstance(l, SeparatorLearner) and len(l.codes) == 2

    l = learner_from_string("countable:rows.txt", base_dir=base)
    assert isinstance(l, CountableClassLearner)
    assert l.rows == ((W("|0"), W("1|0")), (W("|1"),))

    l = learner_from_string("bc2ex:cycling:0", relation=e0, informant=inf)
    assert isinstance(l, BcToExLearner) and isinstance(l.inner, CyclingLearner)

    l = learner_from_string("transport:prefix1:constant:3", relation=e0, informant=inf)
    assert isinstance(l, TransportLearner) and l.reduction.name == "prefix1"
    assert isinstance(l.base, ConstantLearner) and l.base.hypothesis == 3

    assert isinstance(learner_from_string("constant:"), ConstantLearner)
    assert learner_from_string("constant:7").hypothesis == 7
    assert learner_from_string("recent-ones").window == 8
    assert learner_from_string("recent-ones:3").window == 3


def test_learner_from_string_errors(tmp_path):
    inf = Informant.explicit([W("|0"), W("1|0")])
    e0 = make_relation("e0")
    cases = [
        dict(spec="mystery:1"),
        dict(spec="synth:e0.s2f"),  # no informant
        dict(spec="synth:absent.s2f", informant=inf),
        dict(spec="cycling:0"),  # no relation
        dict(spec="cycling:zero", relation=e0, informant=inf),
        dict(spec="cycling:0", relation=e0, informant=Informant.finite_support()),
        dict(spec="bc2ex:", relation=e0, informant=inf),
        dict(spec="transport:warp:constant:0"),
        dict(spec="transport:prefix0:"),
        dict(spec="constant:abc"),
    ]
    for case in cases:
        with pytest.raises(ConfigError):
            learner_from_string(case.pop("spec"), base_dir=str(tmp_path), **case)
    with pytest.raises(ValueError):
        learner_from_string("recent-ones:wide")
