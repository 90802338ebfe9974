"""Exact algebra of eventually periodic binary words.

A word is a canonical description pre|per denoting the infinite sequence
pre concatenated with per repeated forever.  Canonical means the period is
primitive and the preperiod cannot be shortened, which makes description
equality coincide with sequence equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError

__all__ = [
    "Word",
    "PrincipalForm",
    "canonicalize",
    "parse_word",
    "from_bits",
    "split_even_odd",
    "interleave",
    "principal_form",
    "finite_support_word",
    "finite_support_index",
    "embed_increasing_sequence",
    "drop_first",
    "prefix_with",
]


def _primitive_root(s: str) -> str:
    """Shortest u such that s is a power of u."""
    n = len(s)
    for d in range(1, n):
        if n % d == 0 and s[:d] * (n // d) == s:
            return s[:d]
    return s


@dataclass(frozen=True)
class Word:
    pre: str
    per: str

    def __post_init__(self):
        if not self.per:
            raise ConfigError("word period must be nonempty")
        if set(self.pre) - {"0", "1"} or set(self.per) - {"0", "1"}:
            raise ConfigError(f"word bits must be over 0/1: {self.pre!r}|{self.per!r}")
        pre = self.pre
        per = _primitive_root(self.per)
        # absorb the preperiod tail into the period by rotating right
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1] + per[:-1]
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "per", per)

    def bit(self, i: int) -> int:
        if i < len(self.pre):
            return int(self.pre[i])
        return int(self.per[(i - len(self.pre)) % len(self.per)])

    def prefix(self, n: int) -> str:
        return "".join(str(self.bit(i)) for i in range(n))

    @property
    def size(self) -> int:
        return len(self.pre) + len(self.per)

    @property
    def is_inf(self) -> bool:
        return "1" in self.per

    @property
    def literal(self) -> str:
        return f"{self.pre}|{self.per}"

    def __repr__(self):
        return f"Word({self.literal!r})"


def canonicalize(pre: str, per: str) -> Word:
    return Word(pre, per)


def parse_word(text: str) -> Word:
    """Parse a PRE|PER literal, e.g. 01|10 for 01(10)^inf, |0 for the zero word."""
    if text.count("|") != 1:
        raise ConfigError(f"word literal needs exactly one '|': {text!r}")
    pre, per = text.split("|")
    try:
        return Word(pre, per)
    except ConfigError as exc:
        raise ConfigError(f"bad word literal {text!r}: {exc}") from exc


def from_bits(fn, pre_len: int, per_len: int) -> Word:
    """Word whose bit i is fn(i), assuming periodicity per_len from pre_len on."""
    pre = "".join(str(int(fn(i))) for i in range(pre_len))
    per = "".join(str(int(fn(pre_len + i))) for i in range(per_len))
    return Word(pre, per)


def split_even_odd(w: Word) -> tuple[Word, Word]:
    lp, p = len(w.pre), len(w.per)
    q = p // math.gcd(2, p)
    even = from_bits(lambda n: w.bit(2 * n), (lp + 1) // 2, q)
    odd = from_bits(lambda n: w.bit(2 * n + 1), lp // 2, q)
    return even, odd


def interleave(a: Word, b: Word) -> Word:
    pre_len = 2 * max(len(a.pre), len(b.pre))
    per_len = 2 * math.lcm(len(a.per), len(b.per))
    return from_bits(
        lambda i: a.bit(i // 2) if i % 2 == 0 else b.bit(i // 2), pre_len, per_len
    )


@dataclass(frozen=True)
class PrincipalForm:
    """Increasing enumeration of the 1-positions of a word.

    Finitely many positions listed outright; from tail_start on, the positions
    are exactly the naturals in the given residue classes.  tail_start is None
    exactly for finite-support words, where the enumeration is partial.
    """

    initial: tuple[int, ...]
    tail_start: int | None
    residues: frozenset[int]
    modulus: int

    def positions(self, count: int):
        """First `count` enumerated positions; fewer if the support is finite."""
        out = list(self.initial[:count])
        if self.tail_start is not None:
            p = self.tail_start
            while len(out) < count:
                if p % self.modulus in self.residues:
                    out.append(p)
                p += 1
        return out


def principal_form(w: Word) -> PrincipalForm:
    lp, p = len(w.pre), len(w.per)
    if not w.is_inf:
        ones = tuple(i for i in range(lp) if w.bit(i) == 1)
        return PrincipalForm(ones, None, frozenset(), 1)
    initial = tuple(i for i in range(lp) if w.bit(i) == 1)
    residues = frozenset((lp + j) % p for j in range(p) if w.per[j] == "1")
    return PrincipalForm(initial, lp, residues, p)


def finite_support_word(i: int) -> Word:
    """The i-th finite-support word: bit j is bit j of i in LSB-first binary."""
    if i < 0:
        raise ConfigError("finite_support_word index must be a natural")
    pre = ""
    k = i
    while k:
        pre += str(k & 1)
        k >>= 1
    return Word(pre, "0")


def finite_support_index(w: Word) -> int:
    """Inverse of finite_support_word; rejects words with infinite support."""
    if w.is_inf:
        raise ConfigError("word has infinite support")
    return sum(1 << i for i in range(len(w.pre)) if w.bit(i) == 1)


def embed_increasing_sequence(seq: PrincipalForm) -> Word:
    """Characteristic word of the range of a total strictly increasing sequence."""
    if seq.tail_start is None:
        raise ConfigError("sequence is not total (finite support)")
    if any(b <= a for a, b in zip(seq.initial, seq.initial[1:])):
        raise ConfigError("sequence is not strictly increasing")
    if seq.initial and seq.initial[-1] >= seq.tail_start:
        raise ConfigError("initial positions overlap the residue tail")
    if not seq.residues or not all(0 <= r < seq.modulus for r in seq.residues):
        raise ConfigError("residues must be a nonempty subset of [0, modulus)")
    init = set(seq.initial)

    def bit(i):
        if i < seq.tail_start:
            return 1 if i in init else 0
        return 1 if i % seq.modulus in seq.residues else 0

    return from_bits(bit, max(seq.tail_start, (seq.initial[-1] + 1) if seq.initial else 0), seq.modulus)


def drop_first(w: Word) -> Word:
    return from_bits(lambda i: w.bit(i + 1), max(len(w.pre) - 1, 0), len(w.per))


def prefix_with(bit: int, w: Word) -> Word:
    return from_bits(lambda i: bit if i == 0 else w.bit(i - 1), len(w.pre) + 1, len(w.per))
