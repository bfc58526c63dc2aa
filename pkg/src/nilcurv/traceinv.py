"""Trace invariants ``I_{k1..|..k2q}(j)``: parser and exact evaluator.

A spec such as ``"ab|ab"`` names the sum over ``alpha, beta = 1..r`` of
``Tr(j_a j_b) * Tr(j_a j_b)``; each letter is one summation index and must
occur exactly twice.
"""
from __future__ import annotations

import itertools
import string
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import INT64_SAFE, max_abs, widen
from .liealg import JMap

_ALLOWED = set(string.ascii_letters)


class SpecParseError(ValueError):
    """Malformed trace-invariant spec; ``position`` is a 0-based offset."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}")

    def caret(self) -> str:
        return f"{self.text}\n{' ' * self.position}^"


@dataclass(frozen=True)
class TraceSpec:
    groups: tuple[str, ...]

    @property
    def letters(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for g in self.groups:
            for c in g:
                seen.setdefault(c, None)
        return tuple(seen)

    @property
    def order(self) -> int:
        """``2q``, the total number of letters."""
        return sum(len(g) for g in self.groups)

    def __str__(self) -> str:
        return "|".join(self.groups)


def parse_spec(s: str) -> TraceSpec:
    """Validate ``WORD ('|' WORD)*`` with every letter used exactly twice."""
    if not isinstance(s, str):
        raise TypeError("spec must be a string")
    if not s:
        raise SpecParseError("empty spec", s, 0)
    groups, start = [], 0
    for pos, c in enumerate(s + "|"):
        if c == "|":
            if pos == start:
                raise SpecParseError("empty group", s, pos)
            groups.append(s[start:pos])
            start = pos + 1
        elif c not in _ALLOWED:
            raise SpecParseError(f"illegal character {c!r}", s, pos)
    counts: dict[str, list[int]] = {}
    for pos, c in enumerate(s):
        if c != "|":
            counts.setdefault(c, []).append(pos)
    for c, where in counts.items():
        if len(where) != 2:
            # point at the first unmatched or surplus occurrence
            at = where[0] if len(where) == 1 else where[2]
            raise SpecParseError(f"letter {c!r} occurs {len(where)} times, expected 2", s, at)
    return TraceSpec(tuple(groups))


def _as_spec(spec) -> TraceSpec:
    return spec if isinstance(spec, TraceSpec) else parse_spec(spec)


def eval_trace_invariant(spec: TraceSpec | str, j: JMap) -> Fraction:
    """Exact value of the trace invariant on ``j``.

    Group traces are memoized on the tuple of indices they actually read, so
    a group of length ``l`` costs at most ``r**l`` matrix products however
    many letters the whole spec carries.
    """
    spec = _as_spec(spec)
    letters = spec.letters
    pos = {c: k for k, c in enumerate(letters)}
    den = Fraction(1, j.den ** spec.order)
    if j.r == 0:
        return Fraction(0)
    mats = j.num
    word_max = max(len(g) for g in spec.groups)
    if max_abs(mats) ** word_max * j.m ** word_max >= INT64_SAFE:
        mats = widen(mats)
    cache: dict[tuple[int, ...], int] = {}

    def group_trace(word: tuple[int, ...]) -> int:
        # cyclic rotation leaves the trace unchanged; key on the least rotation
        key = min(word[k:] + word[:k] for k in range(len(word)))
        val = cache.get(key)
        if val is None:
            prod = mats[key[0]]
            for a in key[1:]:
                prod = prod @ mats[a]
            val = int(np.trace(prod))
            cache[key] = val
        return val

    idx_groups = [tuple(pos[c] for c in g) for g in spec.groups]
    total = 0
    for assign in itertools.product(range(j.r), repeat=len(letters)):
        term = 1
        for g in idx_groups:
            t = group_trace(tuple(assign[k] for k in g))
            if t == 0:
                term = 0
                break
            term *= t
        total += term
    return total * den


# name -> spec, in the order the named list is usually displayed
NAMED_SPECS: dict[str, str] = {
    "I_aa": "aa",
    "I_aa|bb": "aa|bb",
    "I_aabb": "aabb",
    "I_ab|ab": "ab|ab",
    "I_abab": "abab",
    "I_aabccb": "aabccb",
    "I_aabcbc": "aabcbc",
    "I_aabc|bc": "aabc|bc",
    "I_ac|bc|ab": "ac|bc|ab",
    "I_abc|abc": "abc|abc",
    "I_acbc|ab": "acbc|ab",
    "I_aabbcc": "aabbcc",
    "I_ab|bc|ca": "ab|bc|ca",
}


def eval_named_basics(j: JMap) -> dict[str, Fraction]:
    """The named trace invariants of order at most six, keyed by name."""
    return {name: eval_trace_invariant(spec, j) for name, spec in NAMED_SPECS.items()}


def spec_count(spec: TraceSpec | str, r: int) -> int:
    """Number of summands, ``r**q``."""
    return r ** len(_as_spec(spec).letters)


def product_of_traces(j: JMap, words) -> Fraction:
    """``prod_w Tr(j_{w[0]} ... j_{w[-1]})`` for explicit index words."""
    out = Fraction(1)
    for w in words:
        prod = widen(j.num[w[0]])
        for a in w[1:]:
            prod = prod @ widen(j.num[a])
        out *= Fraction(int(np.trace(prod)), j.den ** len(w))
    return out


__all__ = [
    "NAMED_SPECS",
    "SpecParseError",
    "TraceSpec",
    "eval_named_basics",
    "eval_trace_invariant",
    "parse_spec",
    "product_of_traces",
    "spec_count",
]
