"""Finite symbolic descriptions of separating semigroups and bounded comparisons."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np


@dataclass(frozen=True)
class SemigroupDescription:
    """Union of a finite set, shifted cones v + N0^r and rays {k v : k >= 1}."""

    arity: int
    finite: tuple = ()
    cones: tuple = ()
    rays: tuple = ()

    def __post_init__(self):
        for part in (self.finite, self.cones, self.rays):
            for v in part:
                if len(v) != self.arity:
                    raise ValueError(f"vector {v} does not have arity {self.arity}")
                if min(v) < 0:
                    raise ValueError(f"vector {v} has a negative entry")
        for v in self.rays:
            if sum(v) == 0:
                raise ValueError("ray generator must be nonzero")

    def contains(self, v) -> bool:
        return contains_vector(self, v)

    def enumerate(self, bound: int) -> set:
        return {v for v in _all_vectors(self.arity, bound) if self.contains(v)}

    def to_json(self) -> dict:
        return {"arity": self.arity,
                "finite": [list(v) for v in self.finite],
                "cones": [list(v) for v in self.cones],
                "rays": [list(v) for v in self.rays]}

    @classmethod
    def from_json(cls, d) -> "SemigroupDescription":
        tup = lambda vs: tuple(tuple(int(x) for x in v) for v in vs)
        return cls(int(d["arity"]), tup(d.get("finite", [])), tup(d.get("cones", [])),
                   tup(d.get("rays", [])))

    def __str__(self):
        parts = []
        if self.finite:
            parts.append("{" + ", ".join(_fmt(v) for v in self.finite) + "}")
        parts += [f"{_fmt(v)}N" for v in self.rays]
        parts += [f"({_fmt(v)} + N0^{self.arity})" for v in self.cones]
        return " u ".join(parts) if parts else "{}"


def _fmt(v):
    return str(v[0]) if len(v) == 1 else "(" + ",".join(map(str, v)) + ")"


def _all_vectors(r: int, bound: int):
    for v in product(range(bound + 1), repeat=r):
        if 0 < sum(v) <= bound:
            yield v


def contains_vector(S: SemigroupDescription, v) -> bool:
    v = tuple(int(x) for x in np.atleast_1d(v))
    if len(v) != S.arity:
        raise ValueError(f"arity mismatch: {len(v)} vs {S.arity}")
    if v in S.finite:
        return True
    if any(all(a >= b for a, b in zip(v, c)) for c in S.cones):
        return True
    for g in S.rays:
        ks = {a // b for a, b in zip(v, g) if b} or {0}
        if len(ks) == 1:
            k = ks.pop()
            if k >= 1 and all(a == k * b for a, b in zip(v, g)):
                return True
    return False


TABLE1 = {
    ("ellipsoid", 3, 3): SemigroupDescription(3, cones=((1, 2, 1),)),
    ("cone", 3, 0): SemigroupDescription(3, finite=((1, 1, 1),), cones=((1, 2, 1),)),
    ("cone", 3, 2): SemigroupDescription(3, cones=((1, 2, 1),)),
    ("hyperboloid", 1, 0): SemigroupDescription(1, cones=((3,),)),
    ("hyperboloid", 3, 0): SemigroupDescription(3, cones=((1, 1, 1),)),
    ("hyperboloid", 3, 2): SemigroupDescription(3, cones=((1, 2, 1),)),
}

M_CURVE_ROWS = {("ellipsoid", 5, 5), ("cone", 5, 4), ("hyperboloid", 5, 4)}


def table1_description(kind: str, r: int, l: int) -> SemigroupDescription:
    key = (kind, int(r), int(l))
    if key in M_CURVE_ROWS:
        raise ValueError(f"{key} is a maximal-curve row, out of scope")
    if key not in TABLE1:
        raise ValueError(f"{key} is not a row of the genus-4 table")
    return TABLE1[key]


def theorem2_description(g: int) -> SemigroupDescription:
    """Separating semigroup of a non-maximal hyperelliptic curve of genus g."""
    g = int(g)
    if g < 1:
        raise ValueError("genus must be at least 1")
    m = (g + 1) // 2
    if g % 2:
        return SemigroupDescription(2, rays=((1, 1),), cones=((m, m),))
    return SemigroupDescription(1, rays=((2,),), cones=((g,),))


# ---------------------------------------------------------------------------
# ledger and closure


@dataclass(frozen=True)
class LedgerEntry:
    vector: tuple
    certificate: str
    non_special: bool
    rank: int | None = None

    def to_json(self) -> dict:
        return {"vector": list(self.vector), "certificate": self.certificate,
                "non_special": self.non_special, "rank": self.rank}


@dataclass
class RealizationLedger:
    arity: int
    entries: list = field(default_factory=list)

    def add(self, vector, certificate: str, non_special: bool = False, rank: int | None = None,
            full_rank: int = 4):
        """``rank`` is the speciality rank; non-special needs rank == full_rank."""
        v = tuple(int(x) for x in vector)
        if len(v) != self.arity:
            raise ValueError(f"arity mismatch: {len(v)} vs {self.arity}")
        if non_special and rank != full_rank:
            raise ValueError("a non-special flag needs a full-rank certificate")
        self.entries.append(LedgerEntry(v, certificate, bool(non_special), rank))

    def add_realization(self, R, certificate: str | None = None):
        """Record a certified Realization; uncertified ones are ignored."""
        if not R.ok:
            return False
        rank = min(R.speciality.get("ranks", [0])) if R.non_special else None
        self.add(R.degree_vector, certificate or R.name, R.non_special, rank)
        return True

    @property
    def vectors(self) -> list:
        return [e.vector for e in self.entries]

    def to_json(self) -> dict:
        return {"arity": self.arity, "entries": [e.to_json() for e in self.entries]}


def closure_up_to_bound(ledger: RealizationLedger, bound: int) -> set:
    """Smallest sum-closed set containing the ledger and v + N0^r for non-special v."""
    if not ledger.entries:
        raise ValueError("ledger is empty")
    r = ledger.arity
    S = {e.vector for e in ledger.entries if sum(e.vector) <= bound}
    for e in ledger.entries:
        if e.non_special:
            S |= {v for v in _all_vectors(r, bound) if all(a >= b for a, b in zip(v, e.vector))}
    while True:
        new = {tuple(a + b for a, b in zip(u, v)) for u in S for v in S}
        new = {v for v in new if sum(v) <= bound} - S
        if not new:
            return S
        S |= new


def compare_up_to_bound(S, T, bound: int) -> dict:
    """Vectors of S not in T and of T not in S, with sum at most ``bound``."""
    def as_set(X):
        if isinstance(X, SemigroupDescription):
            return X.enumerate(bound)
        return {tuple(v) for v in X if sum(v) <= bound}

    a, b = as_set(S), as_set(T)
    ar = {len(v) for v in a | b}
    if len(ar) > 1:
        raise ValueError("arity mismatch")
    only_s = sorted(a - b, key=lambda v: (sum(v), v))
    only_t = sorted(b - a, key=lambda v: (sum(v), v))
    return {"bound": bound, "only_in_first": [list(v) for v in only_s],
            "only_in_second": [list(v) for v in only_t], "equal": not only_s and not only_t}
