"""Catalog of equivalence relations on eventually periodic words.

Each entry bundles a name, an optional two-level formula code, an exact
oracle, and learnability metadata.  Trees with periodic branch generators
drive the E_T construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import words
from .errors import ConfigError
from .formulas import (
    TERM_M,
    TERM_N,
    BitEq,
    ExistsForall,
    IndexTerm,
    Le,
    Or,
)
from .words import Word, drop_first, split_even_odd

__all__ = [
    "RelationSpec",
    "TreeSpec",
    "CATALOG_NAMES",
    "catalog_rows",
    "make_relation",
    "oracle_decide",
    "tree_is_wellfounded",
    "branch_word",
    "parse_tree_file",
    "id_code",
    "e0_code",
    "oscillation_display_holds",
    "OSC_COUNT_BOUND",
    "OSC_WINDOW",
]

CATALOG_NAMES = (
    "id",
    "e0",
    "oscillation",
    "sim0",
    "sim1",
    "sim3",
    "sim4",
    "sim5",
    "tree",
)


@dataclass(frozen=True)
class RelationSpec:
    name: str
    code: object | None
    decide: object
    learnable: str
    summary: str
    params: object | None = None


def oracle_decide(r: RelationSpec, x: Word, y: Word) -> bool:
    return r.decide(x, y)


# ------------------------------------------------------------------- trees


@dataclass(frozen=True)
class TreeSpec:
    """Finitely described subtree of the naturals-sequences tree.

    Generators (u, v) denote an infinite branch: the labels of u, then from
    the last label (0 for empty u) the increments of v applied cyclically.
    """

    nodes: frozenset
    generators: frozenset

    def __post_init__(self):
        for node in self.nodes:
            _check_nat_tuple(node, "node")
        gen_prefixes = set()
        for u, v in self.generators:
            _check_nat_tuple(u, "generator stem")
            _check_nat_tuple(v, "generator cycle")
            if not v:
                raise ConfigError("generator cycle must be nonempty")
            labels = _branch_labels((u, v), len(u) + len(v) + 1)
            for i in range(len(labels) + 1):
                gen_prefixes.add(tuple(labels[:i]))
        for node in self.nodes:
            # the root is a member of every nonempty prefix-closed tree
            for i in range(1, len(node)):
                q = node[:i]
                if q not in self.nodes and not _is_branch_prefix(q, self.generators):
                    raise ConfigError(f"tree not prefix-closed at {q}")


def _check_nat_tuple(t, what):
    if not isinstance(t, tuple) or any(not isinstance(v, int) or v < 0 for v in t):
        raise ConfigError(f"{what} must be a tuple of naturals: {t!r}")


def _branch_labels(gen, count: int) -> list[int]:
    u, v = gen
    labels = list(u[:count])
    cur = u[-1] if u else 0
    t = 0
    while len(labels) < count:
        cur += v[t % len(v)]
        labels.append(cur)
        t += 1
    return labels


def _is_branch_prefix(q, generators) -> bool:
    return any(tuple(_branch_labels(g, len(q))) == q for g in generators)


def tree_is_wellfounded(t: TreeSpec) -> bool:
    return not t.generators


def branch_word(gen) -> Word | None:
    """Characteristic word of the branch as an increasing enumeration.

    None when the branch is not strictly increasing and hence is the
    principal function of no word.
    """
    u, v = gen
    if any(b <= a for a, b in zip(u, u[1:])) or min(v) < 1:
        return None
    base = u[-1] if u else 0
    step = sum(v)
    sums = set()
    acc = 0
    for inc in v:
        acc += inc
        sums.add(acc)
    in_u = set(u)

    def bit(i):
        if i in in_u:
            return 1
        if i > base and (i - base - 1) % step + 1 in sums:
            return 1
        return 0

    return words.from_bits(bit, base + 1, step)


def parse_tree_file(text: str) -> TreeSpec:
    """Lines `node 0.1.4` and `gen 3 : 1.2` (stem may be empty); # comments."""
    nodes, gens = set(), set()

    def path(tok: str) -> tuple:
        if not tok:
            return ()
        try:
            return tuple(int(v) for v in tok.split("."))
        except ValueError:
            raise ConfigError(f"bad tree path {tok!r}") from None

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node" and len(parts) == 2:
            nodes.add(path(parts[1]))
        elif parts[0] == "gen":
            rest = line[len("gen") :].strip()
            if ":" not in rest:
                raise ConfigError(f"generator line needs ':': {raw!r}")
            stem, cycle = (side.strip() for side in rest.split(":", 1))
            if not cycle:
                raise ConfigError(f"generator cycle missing: {raw!r}")
            gens.add((path(stem), path(cycle)))
        else:
            raise ConfigError(f"bad tree line: {raw!r}")
    return TreeSpec(frozenset(nodes), frozenset(gens))


# ------------------------------------------------------------------ oracles


def _decide_id(x, y):
    return x == y


def _decide_e0(x, y):
    start = max(len(x.pre), len(y.pre))
    span = math.lcm(len(x.per), len(y.per))
    return all(x.bit(i) == y.bit(i) for i in range(start, start + span))


def _decide_sim0(x, y):
    return (x.is_inf and y.is_inf) or x == y


def _decide_sim1(x, y):
    return x.is_inf == y.is_inf


def _decide_sim3(x, y):
    if x == y:
        return True
    return x.is_inf and y.is_inf and drop_first(x) == drop_first(y)


def _decide_sim4(x, y):
    if _decide_sim3(x, y):
        return True
    return x.bit(0) == y.bit(0) == 1 and not x.is_inf and not y.is_inf


def _decide_sim5(x, y):
    if _decide_sim3(x, y):
        return True
    return x.bit(0) == y.bit(0) and not x.is_inf and not y.is_inf


def _tree_decider(t: TreeSpec):
    branches = frozenset(w for w in (branch_word(g) for g in t.generators) if w is not None)

    def decide(x, y):
        if x == y:
            return True
        ex, ox = split_even_odd(x)
        ey, oy = split_even_odd(y)
        return ex in branches and ey in branches and ox.is_inf and oy.is_inf

    return decide


# The oscillation relation collapses to INF-agreement here: an eventually
# periodic word has bounded zero runs exactly when it is INF, so the display's
# one-counts over zero blocks are mutually bounded exactly for INF pairs and
# for finite-support pairs.  The bounded display evaluation below is the
# independent safeguard for that collapse.

OSC_COUNT_BOUND = 16
OSC_WINDOW = 64


def oscillation_display_holds(x, y, count_bound: int = OSC_COUNT_BOUND, window: int = OSC_WINDOW) -> bool:
    """Direct evaluation of the oscillation display over bounded parameters.

    Checks whether some N <= count_bound works for every open interval
    (n, n+m) with n+m <= window.
    """
    sx = [0]
    sy = [0]
    for i in range(window + 1):
        sx.append(sx[-1] + x.bit(i))
        sy.append(sy[-1] + y.bit(i))

    def worst(szero, sones):
        worst_count = 0
        for n in range(window + 1):
            for top in range(n + 2, window + 1):
                # open interval (n, top): positions n+1 .. top-1
                if szero[top] - szero[n + 1] == 0:
                    worst_count = max(worst_count, sones[top] - sones[n + 1])
        return worst_count

    needed = max(worst(sx, sy), worst(sy, sx)) + 1
    return needed <= count_bound


# ------------------------------------------------------------------ catalog


def id_code():
    return ExistsForall(BitEq(TERM_M, TERM_M))


def e0_code():
    # guard m < n written as m+1 <= n
    return ExistsForall(Or(Le(IndexTerm(0, 1, 1), TERM_N), BitEq(TERM_M, TERM_M)))


_CATALOG = {
    "id": ("YES", "equality of sequences", _decide_id, id_code),
    "e0": ("YES", "eventual equality of tails", _decide_e0, e0_code),
    "oscillation": ("YES", "mutually bounded one-counts over zero blocks", None, None),
    "sim0": ("NO", "both infinite support, or equal", _decide_sim0, None),
    "sim1": ("NO", "same side of the infinite-support divide", _decide_sim1, None),
    "sim3": ("NO", "equal, or both infinite and equal past position 0", _decide_sim3, None),
    "sim4": ("NO", "as sim3, or both finite starting with 1", _decide_sim4, None),
    "sim5": ("NO", "as sim3, or both finite agreeing at 0", _decide_sim5, None),
    "tree": ("N/A", "equal, or even parts on tree branches with infinite odd parts", None, None),
}


def catalog_rows():
    """Name, learnability label, and summary for every catalog relation."""
    return tuple((name,) + _CATALOG[name][:2] for name in CATALOG_NAMES)


def make_relation(name: str, params: TreeSpec | None = None) -> RelationSpec:
    if name not in _CATALOG:
        raise ConfigError(f"unknown relation {name!r}; catalog: {', '.join(CATALOG_NAMES)}")
    learnable, summary, decide, code_fn = _CATALOG[name]
    if name == "tree":
        if params is None:
            raise ConfigError("relation tree needs a TreeSpec")
        learnable = "YES" if tree_is_wellfounded(params) else "NO"
        return RelationSpec("tree", None, _tree_decider(params), learnable, summary, params)
    if params is not None:
        raise ConfigError(f"relation {name!r} takes no tree parameter")
    if name == "oscillation":
        decide = _decide_sim1
    return RelationSpec(name, code_fn() if code_fn else None, decide, learnable, summary)
