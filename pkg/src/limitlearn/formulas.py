"""Two-level formula codes: R(x,y,n,m) predicates under an EF or FE prefix.

Predicates are positive-affine: index terms are cN*n + cM*m + c with capped
coefficients, which keeps atom truth eventually periodic in each variable and
makes two-level truth decidable on eventually periodic words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, UnsupportedAtomError

COEFF_CAP = 8

__all__ = [
    "COEFF_CAP",
    "IndexTerm",
    "BitOf",
    "BitEq",
    "Le",
    "CountLe",
    "Not",
    "And",
    "Or",
    "ExistsForall",
    "ForallExists",
    "FAnd",
    "FOr",
    "ThreeValued",
    "TERM_N",
    "TERM_M",
    "const_term",
    "eval_pred",
    "use_bound",
    "compile_pred",
    "eval_bounded",
    "eval_exact_ep",
    "exact_inner_bound",
    "exact_outer_bound",
    "forall_m_holds",
    "least_refutation",
    "exists_forall_witness",
    "formula_size",
    "pred_sides",
    "parse_formula",
    "parse_formulas",
    "format_formula",
]


@dataclass(frozen=True)
class IndexTerm:
    coeff_n: int
    coeff_m: int
    constant: int

    def __post_init__(self):
        for v in (self.coeff_n, self.coeff_m, self.constant):
            if not 0 <= v <= COEFF_CAP:
                raise ConfigError(f"index term component {v} outside [0, {COEFF_CAP}]")

    def value(self, n: int, m: int) -> int:
        return self.coeff_n * n + self.coeff_m * m + self.constant


TERM_N = IndexTerm(1, 0, 0)
TERM_M = IndexTerm(0, 1, 0)


def const_term(c: int) -> IndexTerm:
    return IndexTerm(0, 0, c)


@dataclass(frozen=True)
class BitOf:
    side: str
    term: IndexTerm

    def __post_init__(self):
        if self.side not in ("x", "y"):
            raise ConfigError(f"bit side must be x or y, got {self.side!r}")


@dataclass(frozen=True)
class BitEq:
    """x-bit at the first term equals y-bit at the second."""

    term_x: IndexTerm
    term_y: IndexTerm


@dataclass(frozen=True)
class Le:
    lhs: IndexTerm
    rhs: IndexTerm


@dataclass(frozen=True)
class CountLe:
    """Number of ones of one side in [lo, hi) is at most bound."""

    side: str
    lo: IndexTerm
    hi: IndexTerm
    bound: IndexTerm

    def __post_init__(self):
        if self.side not in ("x", "y"):
            raise ConfigError(f"count side must be x or y, got {self.side!r}")


@dataclass(frozen=True)
class Not:
    inner: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class ExistsForall:
    pred: object


@dataclass(frozen=True)
class ForallExists:
    pred: object


@dataclass(frozen=True)
class FAnd:
    left: object
    right: object


@dataclass(frozen=True)
class FOr:
    left: object
    right: object


# ---------------------------------------------------------------- predicates


def eval_pred(p, x, y, n: int, m: int) -> bool:
    """Truth of the predicate AST; x and y need only a .bit(i) method."""
    if isinstance(p, BitOf):
        w = x if p.side == "x" else y
        return w.bit(p.term.value(n, m)) == 1
    if isinstance(p, BitEq):
        return x.bit(p.term_x.value(n, m)) == y.bit(p.term_y.value(n, m))
    if isinstance(p, Le):
        return p.lhs.value(n, m) <= p.rhs.value(n, m)
    if isinstance(p, CountLe):
        w = x if p.side == "x" else y
        lo, hi = p.lo.value(n, m), p.hi.value(n, m)
        count = sum(w.bit(i) for i in range(lo, hi))
        return count <= p.bound.value(n, m)
    if isinstance(p, Not):
        return not eval_pred(p.inner, x, y, n, m)
    if isinstance(p, And):
        return eval_pred(p.left, x, y, n, m) and eval_pred(p.right, x, y, n, m)
    if isinstance(p, Or):
        return eval_pred(p.left, x, y, n, m) or eval_pred(p.right, x, y, n, m)
    raise ConfigError(f"not a predicate node: {p!r}")


def use_bound(p, n: int, m: int) -> int:
    """Positions >= use_bound(n, m) are never read by eval_pred at (n, m)."""
    if isinstance(p, BitOf):
        return p.term.value(n, m) + 1
    if isinstance(p, BitEq):
        return max(p.term_x.value(n, m), p.term_y.value(n, m)) + 1
    if isinstance(p, Le):
        return 0
    if isinstance(p, CountLe):
        return p.hi.value(n, m)
    if isinstance(p, Not):
        return use_bound(p.inner, n, m)
    if isinstance(p, (And, Or)):
        return max(use_bound(p.left, n, m), use_bound(p.right, n, m))
    raise ConfigError(f"not a predicate node: {p!r}")


def compile_pred(p, xbit, ybit):
    """Compile to a closure (n, m) -> bool over the two bit sources."""
    if isinstance(p, BitOf):
        src = xbit if p.side == "x" else ybit
        cn, cm, c = p.term.coeff_n, p.term.coeff_m, p.term.constant
        return lambda n, m: src(cn * n + cm * m + c) == 1
    if isinstance(p, BitEq):
        tx, ty = p.term_x, p.term_y
        an, am, ac = tx.coeff_n, tx.coeff_m, tx.constant
        bn, bm, bc = ty.coeff_n, ty.coeff_m, ty.constant
        return lambda n, m: xbit(an * n + am * m + ac) == ybit(bn * n + bm * m + bc)
    if isinstance(p, Le):
        l, r = p.lhs, p.rhs
        return lambda n, m: l.value(n, m) <= r.value(n, m)
    if isinstance(p, CountLe):
        src = xbit if p.side == "x" else ybit
        lo, hi, bd = p.lo, p.hi, p.bound
        return lambda n, m: (
            sum(src(i) for i in range(lo.value(n, m), hi.value(n, m)))
            <= bd.value(n, m)
        )
    if isinstance(p, Not):
        f = compile_pred(p.inner, xbit, ybit)
        return lambda n, m: not f(n, m)
    if isinstance(p, And):
        f, g = compile_pred(p.left, xbit, ybit), compile_pred(p.right, xbit, ybit)
        return lambda n, m: f(n, m) and g(n, m)
    if isinstance(p, Or):
        f, g = compile_pred(p.left, xbit, ybit), compile_pred(p.right, xbit, ybit)
        return lambda n, m: f(n, m) or g(n, m)
    raise ConfigError(f"not a predicate node: {p!r}")


def _atoms(node):
    if isinstance(node, Not):
        yield from _atoms(node.inner)
    elif isinstance(node, (And, Or)):
        yield from _atoms(node.left)
        yield from _atoms(node.right)
    else:
        yield node


def _terms_of(atom):
    if isinstance(atom, BitOf):
        return (atom.term,)
    if isinstance(atom, BitEq):
        return (atom.term_x, atom.term_y)
    if isinstance(atom, Le):
        return (atom.lhs, atom.rhs)
    if isinstance(atom, CountLe):
        return (atom.lo, atom.hi, atom.bound)
    raise ConfigError(f"not an atom: {atom!r}")


def pred_sides(p) -> set[str]:
    sides = set()
    for atom in _atoms(p):
        if isinstance(atom, BitOf):
            sides.add(atom.side)
        elif isinstance(atom, BitEq):
            sides.update(("x", "y"))
        elif isinstance(atom, CountLe):
            sides.add(atom.side)
    return sides


# ------------------------------------------------------------ formula level


@dataclass(frozen=True)
class ThreeValued:
    kind: str
    witness: int | None
    horizon: int

    @staticmethod
    def confirmed(witness, horizon):
        return ThreeValued("CONFIRMED", witness, horizon)

    @staticmethod
    def refuted(horizon):
        return ThreeValued("REFUTED_UP_TO", None, horizon)

    @staticmethod
    def undecided(horizon):
        return ThreeValued("UNDECIDED", None, horizon)

    @property
    def is_confirmed(self):
        return self.kind == "CONFIRMED"


def _formula_preds(f):
    if isinstance(f, (Not, And, Or, BitOf, BitEq, Le, CountLe)):
        yield f
    elif isinstance(f, (ExistsForall, ForallExists)):
        yield f.pred
    elif isinstance(f, (FAnd, FOr)):
        yield from _formula_preds(f.left)
        yield from _formula_preds(f.right)
    else:
        raise ConfigError(f"not a formula node: {f!r}")


def formula_size(f) -> int:
    """Node count over the formula tree and every predicate AST (terms free)."""
    if isinstance(f, (FAnd, FOr)):
        return 1 + formula_size(f.left) + formula_size(f.right)
    if isinstance(f, (ExistsForall, ForallExists)):
        return 1 + _pred_size(f.pred)
    raise ConfigError(f"not a formula node: {f!r}")


def _pred_size(p) -> int:
    if isinstance(p, Not):
        return 1 + _pred_size(p.inner)
    if isinstance(p, (And, Or)):
        return 1 + _pred_size(p.left) + _pred_size(p.right)
    return 1


def eval_bounded(f, x, y, horizon: int) -> ThreeValued:
    """Search both variables below the horizon; UNDECIDED absorbs in combinations."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if isinstance(f, ExistsForall):
        cp = compile_pred(f.pred, x.bit, y.bit)
        for n in range(horizon):
            if all(cp(n, m) for m in range(horizon)):
                return ThreeValued.confirmed(n, horizon)
        return ThreeValued.refuted(horizon)
    if isinstance(f, ForallExists):
        cp = compile_pred(f.pred, x.bit, y.bit)
        for n in range(horizon):
            if not any(cp(n, m) for m in range(horizon)):
                return ThreeValued.undecided(horizon)
        return ThreeValued.confirmed(None, horizon)
    if isinstance(f, (FAnd, FOr)):
        a = eval_bounded(f.left, x, y, horizon)
        b = eval_bounded(f.right, x, y, horizon)
        if a.kind == "UNDECIDED" or b.kind == "UNDECIDED":
            return ThreeValued.undecided(horizon)
        if isinstance(f, FAnd):
            ok = a.is_confirmed and b.is_confirmed
        else:
            ok = a.is_confirmed or b.is_confirmed
        return ThreeValued.confirmed(None, horizon) if ok else ThreeValued.refuted(horizon)
    raise ConfigError(f"not a formula node: {f!r}")


# ------------------------------------------------------------- exact truth
#
# For a fixed outer value n, every atom's truth is periodic in m with period
# P = lcm(|per_x|, |per_y|) once m is past max(L, mu*n + kappa + 1), where
# L = max preperiod length, mu = the largest n-coefficient and kappa the
# largest constant in any term: bit positions cN*n + cM*m + c then sit in the
# periodic tails of both words (cM >= 1 implies position >= m), and every Le
# comparison has stabilized.  Scanning one extra period therefore decides the
# inner universal exactly.
#
# For the outer variable, shifting n by P maps surviving inner assignments to
# surviving inner assignments via m -> m +- P once n exceeds L + 2P + 2k + 1,
# provided every coefficient is 0 or 1 (coefficient 2 and up would need the
# shift 2P on positions but P on the guards, which breaks the pairing).  So a
# true EF formula has a witness below max(T, L + 3P + 2k + 2), where T is the
# coarser classical bound (preperiod mass plus two coefficient-lcm periods).
# Coefficients above 1 are rejected rather than risked.


def _exact_profile(f):
    mu = kappa = 0
    coeffs = []
    for pred in _formula_preds(f):
        for atom in _atoms(pred):
            if isinstance(atom, CountLe):
                raise UnsupportedAtomError(
                    "CountLe atoms have no periodicity threshold; use the relation's oracle"
                )
            for t in _terms_of(atom):
                if t.coeff_n > 1 or t.coeff_m > 1:
                    raise UnsupportedAtomError(
                        "exact evaluation requires index coefficients 0 or 1"
                    )
                mu = max(mu, t.coeff_n)
                kappa = max(kappa, t.constant)
                coeffs.extend(c for c in (t.coeff_n, t.coeff_m) if c)
    return mu, kappa, coeffs


def _geometry(x, y):
    big_l = max(len(x.pre), len(y.pre))
    period = math.lcm(len(x.per), len(y.per))
    return big_l, period


def exact_inner_bound(f, x, y, n: int) -> int:
    mu, kappa, _ = _exact_profile(f)
    big_l, period = _geometry(x, y)
    return max(big_l, mu * n + kappa + 1) + period


def exact_outer_bound(f, x, y) -> int:
    mu, kappa, coeffs = _exact_profile(f)
    big_l, period = _geometry(x, y)
    coeff_lcm = math.lcm(*coeffs) if coeffs else 1
    classical = (len(x.pre) + len(y.pre)) + period * coeff_lcm * 2
    return max(classical, big_l + 3 * period + 2 * kappa + 2)


def forall_m_holds(pred, x, y, n: int, bound: int, cp=None) -> bool:
    if cp is None:
        cp = compile_pred(pred, x.bit, y.bit)
    return all(cp(n, m) for m in range(bound))


def least_refutation(pred, x, y, n: int, bound: int, cp=None) -> int | None:
    if cp is None:
        cp = compile_pred(pred, x.bit, y.bit)
    for m in range(bound):
        if not cp(n, m):
            return m
    return None


def _exact_ef_atom(pred, f_for_bounds, x, y) -> int | None:
    """Least exact witness n of an EF atom, or None."""
    cp = compile_pred(pred, x.bit, y.bit)
    mu, kappa, coeffs = _exact_profile(f_for_bounds)
    big_l, period = _geometry(x, y)
    coeff_lcm = math.lcm(*coeffs) if coeffs else 1
    classical = (len(x.pre) + len(y.pre)) + period * coeff_lcm * 2
    outer = max(classical, big_l + 3 * period + 2 * kappa + 2)
    for n in range(outer):
        inner = max(big_l, mu * n + kappa + 1) + period
        if all(cp(n, m) for m in range(inner)):
            return n
    return None


def exists_forall_witness(f, x, y) -> int | None:
    if not isinstance(f, ExistsForall):
        raise ConfigError("witness search needs a single EF atom")
    return _exact_ef_atom(f.pred, f, x, y)


def eval_exact_ep(f, x, y) -> bool:
    """Exact two-level truth on eventually periodic words."""
    if isinstance(f, ExistsForall):
        return _exact_ef_atom(f.pred, f, x, y) is not None
    if isinstance(f, ForallExists):
        flipped = ExistsForall(Not(f.pred))
        return _exact_ef_atom(flipped.pred, flipped, x, y) is None
    if isinstance(f, FAnd):
        return eval_exact_ep(f.left, x, y) and eval_exact_ep(f.right, x, y)
    if isinstance(f, FOr):
        return eval_exact_ep(f.left, x, y) or eval_exact_ep(f.right, x, y)
    raise ConfigError(f"not a formula node: {f!r}")


# ------------------------------------------------------------- text format


def _tokenize(text: str):
    clean = []
    for line in text.splitlines():
        semi = line.find(";")
        clean.append(line if semi < 0 else line[:semi])
    return "\n".join(clean).replace("(", " ( ").replace(")", " ) ").split()


def _read_sexp(tokens, pos):
    if pos >= len(tokens):
        raise ConfigError("unexpected end of formula text")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read_sexp(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise ConfigError("unbalanced '(' in formula text")
        return items, pos + 1
    if tok == ")":
        raise ConfigError("unbalanced ')' in formula text")
    return tok, pos + 1


def _nat(tok) -> int:
    try:
        v = int(tok)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a natural number, got {tok!r}") from None
    if v < 0:
        raise ConfigError(f"expected a natural number, got {v}")
    return v


def _term_of_sexp(sx) -> IndexTerm:
    if not (isinstance(sx, list) and len(sx) == 4 and sx[0] == "ix"):
        raise ConfigError(f"expected (ix cN cM c), got {sx!r}")
    return IndexTerm(_nat(sx[1]), _nat(sx[2]), _nat(sx[3]))


def _pred_of_sexp(sx):
    if not isinstance(sx, list) or not sx:
        raise ConfigError(f"expected a predicate form, got {sx!r}")
    head = sx[0]
    if head == "and" and len(sx) == 3:
        return And(_pred_of_sexp(sx[1]), _pred_of_sexp(sx[2]))
    if head == "or" and len(sx) == 3:
        return Or(_pred_of_sexp(sx[1]), _pred_of_sexp(sx[2]))
    if head == "not" and len(sx) == 2:
        return Not(_pred_of_sexp(sx[1]))
    if head == "bit" and len(sx) == 3:
        if sx[1] not in ("x", "y"):
            raise ConfigError(f"(bit ...) side must be x or y, got {sx[1]!r}")
        return BitOf(sx[1], _term_of_sexp(sx[2]))
    if head == "eq" and len(sx) == 3:
        return BitEq(_term_of_sexp(sx[1]), _term_of_sexp(sx[2]))
    if head == "le" and len(sx) == 3:
        return Le(_term_of_sexp(sx[1]), _term_of_sexp(sx[2]))
    if head == "cntle" and len(sx) == 5:
        if sx[1] not in ("x", "y"):
            raise ConfigError(f"(cntle ...) side must be x or y, got {sx[1]!r}")
        return CountLe(sx[1], _term_of_sexp(sx[2]), _term_of_sexp(sx[3]), _term_of_sexp(sx[4]))
    raise ConfigError(f"unknown predicate form: {sx!r}")


def _formula_of_sexp(sx):
    if not isinstance(sx, list) or not sx:
        raise ConfigError(f"expected a formula form, got {sx!r}")
    head = sx[0]
    if head == "ef" and len(sx) == 2:
        return ExistsForall(_pred_of_sexp(sx[1]))
    if head == "fe" and len(sx) == 2:
        return ForallExists(_pred_of_sexp(sx[1]))
    if head == "and" and len(sx) == 3:
        return FAnd(_formula_of_sexp(sx[1]), _formula_of_sexp(sx[2]))
    if head == "or" and len(sx) == 3:
        return FOr(_formula_of_sexp(sx[1]), _formula_of_sexp(sx[2]))
    raise ConfigError(f"unknown formula form: {sx!r}")


def parse_formulas(text: str) -> list:
    tokens = _tokenize(text)
    out, pos = [], 0
    while pos < len(tokens):
        sx, pos = _read_sexp(tokens, pos)
        out.append(_formula_of_sexp(sx))
    if not out:
        raise ConfigError("no formula found in text")
    return out


def parse_formula(text: str):
    forms = parse_formulas(text)
    if len(forms) != 1:
        raise ConfigError(f"expected exactly one formula, found {len(forms)}")
    return forms[0]


def _term_text(t: IndexTerm) -> str:
    return f"(ix {t.coeff_n} {t.coeff_m} {t.constant})"


def _pred_text(p) -> str:
    if isinstance(p, And):
        return f"(and {_pred_text(p.left)} {_pred_text(p.right)})"
    if isinstance(p, Or):
        return f"(or {_pred_text(p.left)} {_pred_text(p.right)})"
    if isinstance(p, Not):
        return f"(not {_pred_text(p.inner)})"
    if isinstance(p, BitOf):
        return f"(bit {p.side} {_term_text(p.term)})"
    if isinstance(p, BitEq):
        return f"(eq {_term_text(p.term_x)} {_term_text(p.term_y)})"
    if isinstance(p, Le):
        return f"(le {_term_text(p.lhs)} {_term_text(p.rhs)})"
    if isinstance(p, CountLe):
        return f"(cntle {p.side} {_term_text(p.lo)} {_term_text(p.hi)} {_term_text(p.bound)})"
    raise ConfigError(f"not a predicate node: {p!r}")


def format_formula(f) -> str:
    if isinstance(f, ExistsForall):
        return f"(ef {_pred_text(f.pred)})"
    if isinstance(f, ForallExists):
        return f"(fe {_pred_text(f.pred)})"
    if isinstance(f, FAnd):
        return f"(and {format_formula(f.left)} {format_formula(f.right)})"
    if isinstance(f, FOr):
        return f"(or {format_formula(f.left)} {format_formula(f.right)})"
    raise ConfigError(f"not a formula node: {f!r}")
