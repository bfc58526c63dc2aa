"""Built-in examples: the printed isospectral pairs and Clifford-module maps.

The printed matrices live in ``data/<id>.json`` in the shared j-map format
``{"m": int, "r": int, "mats": [[["p/q", ...], ...], ...]}``; ``mats[a]`` is
the coefficient matrix of ``c_{a+1}`` in ``j_Z`` for ``Z = (c_1, ..., c_r)``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .heisenberg import MODULE_DIM, clifford
from .liealg import JMap

PRINTED = ("fourthree", "fourthree-prime", "fivethree", "fivethree-prime",
           "sixtwo", "sixtwo-prime")

PAIRS: dict[str, tuple[str, str]] = {
    "fourthree": ("fourthree", "fourthree-prime"),
    "fivethree": ("fivethree", "fivethree-prime"),
    "sixtwo": ("sixtwo", "sixtwo-prime"),
    "heis3": ("heis3-2-0", "heis3-1-1"),
    "heis7": ("heis7-2-0", "heis7-1-1"),
}

MAX_MODULES = {3: 3, 7: 2}

_HEIS_RE = re.compile(r"^heis(\d+)-(\d+)-(\d+)$")


class UnknownExampleError(KeyError):
    def __str__(self) -> str:
        return f"unknown example id {self.args[0]!r}; try 'catalog list'"


class JMapFormatError(ValueError):
    """A j-map document could not be parsed."""


@dataclass(frozen=True)
class Fact:
    value: object
    source: str
    erratum: str | None = None


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    id: str
    description: str
    j: JMap
    partner: str | None = None
    facts: dict[str, Fact] = field(default_factory=dict)


_DESCRIPTIONS = {
    "fourthree": "m=4, r=3 pair: Tr(Ric^3) differs",
    "fivethree": "m=5, r=3 pair: (*), (**), threestar and |nabla ric|^2 differ",
    "sixtwo": "m=6, r=2 pair: |ric|^2 and |R|^2 differ",
}

_PARTNER = {a: b for a, b in (PAIRS[k] for k in ("fourthree", "fivethree", "sixtwo"))}
_PARTNER.update({b: a for a, b in list(_PARTNER.items())})

PUBLISHED = "published value"
DERIVED = "recomputed from the printed matrices"


def _F(*xs):
    return tuple(Fraction(x) for x in xs)


_CHARPOLY_ERRATUM = ("the printed lambda^2 coefficient (c1^2 + 9c2^2)^2 is short by 3c2^4; "
                     "both printed matrices give (c1^2 + 9c2^2)^2 + 3c2^4")

_FACTS: dict[str, dict[str, Fact]] = {
    "fourthree": {
        "J_diag": Fact(_F(-12, -6, -6, -6), PUBLISHED),
        "TrJ3": Fact(Fraction(-2376), PUBLISHED),
        "TrJ": Fact(Fraction(-30), DERIVED),
    },
    "fourthree-prime": {
        "J_diag": Fact(_F(-3, -9, -9, -9), PUBLISHED),
        "TrJ3": Fact(Fraction(-2214), PUBLISHED),
        "TrJ": Fact(Fraction(-30), DERIVED),
    },
    "fivethree": {
        "J_diag": Fact(_F(-2, -2, -1, -1, -2), PUBLISHED),
        "I_aabccb": Fact(Fraction(-24), PUBLISHED),
        "TrJ": Fact(Fraction(-8), PUBLISHED),
        "TrJ2": Fact(Fraction(14), PUBLISHED),
    },
    "fivethree-prime": {
        "J_diag": Fact(_F(-1, -1, -2, -2, -2), PUBLISHED),
        "I_aabccb": Fact(Fraction(-26), PUBLISHED),
        "TrJ": Fact(Fraction(-8), PUBLISHED),
        "TrJ2": Fact(Fraction(14), PUBLISHED),
    },
    "sixtwo": {
        "TrJ2": Fact(Fraction(630), PUBLISHED),
        "charpoly": Fact("printed", PUBLISHED, _CHARPOLY_ERRATUM),
        "charpoly_corrected": Fact("corrected", DERIVED),
        "kernel_c2_zero": Fact(((0, 1, 0, 0, 0, 0), (0, 0, 0, 0, 1, 0)), PUBLISHED),
    },
    "sixtwo-prime": {
        "TrJ2": Fact(Fraction(598), PUBLISHED),
        "charpoly": Fact("printed", PUBLISHED, _CHARPOLY_ERRATUM),
        "charpoly_corrected": Fact("corrected", DERIVED),
        "kernel_c2_zero": Fact(((0, 1, 0, 0, 0, 0), (0, 0, 0, 0, 1, 0)), PUBLISHED),
    },
}


def sixtwo_charpoly(c1, c2, printed: bool = True) -> tuple[Fraction, ...]:
    """Characteristic polynomial of the m=6 pair, highest degree first.

    Printed: ``x^6 + (2c1^2 + 21c2^2) x^4 + (c1^2 + 9c2^2)^2 x^2 + c2^2 (c1^2 + 8c2^2)^2``.
    The matrices themselves give an extra ``3c2^4`` in the ``x^2`` coefficient;
    ``printed=False`` returns that version.
    """
    c1, c2 = Fraction(c1), Fraction(c2)
    x2 = (c1**2 + 9 * c2**2) ** 2 + (0 if printed else 3 * c2**4)
    return (Fraction(1), Fraction(0), 2 * c1**2 + 21 * c2**2, Fraction(0),
            x2, Fraction(0), c2**2 * (c1**2 + 8 * c2**2) ** 2)


def parse_jmap_text(text: str) -> JMap:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JMapFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or not {"m", "r", "mats"} <= set(obj):
        raise JMapFormatError('expected an object with keys "m", "r", "mats"')
    try:
        return JMap.from_json(obj)
    except (TypeError, ValueError) as exc:
        raise JMapFormatError(str(exc)) from exc


def read_jmap(path: str | Path) -> JMap:
    with open(path, encoding="utf-8") as fh:
        return parse_jmap_text(fh.read())


def jmap_to_text(j: JMap) -> str:
    """Shared JSON format with one matrix row per line, so diffs stay readable."""
    doc = j.to_json()
    mats = []
    for mat in doc["mats"]:
        rows = ",\n    ".join(json.dumps(row) for row in mat)
        mats.append(f"   [\n    {rows}\n   ]")
    body = ",\n".join(mats)
    return f'{{\n "m": {doc["m"]},\n "r": {doc["r"]},\n "mats": [\n{body}\n ]\n}}\n'


def write_jmap(j: JMap, path: str | Path) -> None:
    Path(path).write_text(jmap_to_text(j), encoding="utf-8")


def data_path(name: str) -> Path:
    return Path(str(resources.files("nilcurv") / "data" / f"{name}.json"))


def heis_spec(eid: str) -> tuple[int, int, int] | None:
    mt = _HEIS_RE.match(eid)
    if not mt:
        return None
    r, a, b = (int(g) for g in mt.groups())
    if r not in MAX_MODULES or a + b < 1 or a + b > MAX_MODULES[r]:
        return None
    return r, a, b


def ids() -> list[str]:
    out = list(PRINTED)
    for r in sorted(MAX_MODULES):
        for total in range(1, MAX_MODULES[r] + 1):
            for a in range(total, -1, -1):
                out.append(f"heis{r}-{a}-{total - a}")
    return out


def get(eid: str) -> CatalogEntry:
    if eid in PRINTED:
        j = read_jmap(data_path(eid))
        base = eid.removesuffix("-prime")
        desc = _DESCRIPTIONS[base] + (" (second map)" if eid.endswith("-prime") else " (first map)")
        return CatalogEntry(eid, desc, j, _PARTNER[eid], dict(_FACTS.get(eid, {})))
    spec = heis_spec(eid)
    if spec is None:
        raise UnknownExampleError(eid)
    r, a, b = spec
    j = clifford(r, a, b)
    d = MODULE_DIM[r]
    facts = {
        "ricci_v": Fact(Fraction(-r, 2), PUBLISHED),
        "ricci_z": Fact(Fraction(j.m, 4), PUBLISHED),
        "omega_trace_squared": Fact(Fraction(((a - b) * d) ** 2), DERIVED),
    }
    desc = f"Heisenberg type from {a} plus and {b} minus modules of C_{r} (m={j.m}, r={r})"
    return CatalogEntry(eid, desc, j, None, facts)


def get_pair(pid: str) -> tuple[CatalogEntry, CatalogEntry]:
    if pid not in PAIRS:
        raise UnknownExampleError(pid)
    a, b = PAIRS[pid]
    return get(a), get(b)


def expected_facts(eid: str) -> dict[str, Fact]:
    return get(eid).facts
