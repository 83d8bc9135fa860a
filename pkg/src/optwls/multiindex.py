"""Downward-closed multi-index sets with reduced-margin bookkeeping.

A multi-index is a tuple of non-negative integers of fixed length d. An
IndexSet keeps a downward-closed collection of members together with its
reduced margin (the indices whose addition preserves downward closedness)
and, for each reduced-margin index, the iteration at which it first became
eligible. IndexSet values are immutable snapshots: growth operations return
new instances, so concurrent readers are always safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

MultiIndex = tuple

__all__ = [
    "MultiIndex",
    "IndexSet",
    "new_root",
    "is_downward_closed",
    "bulk",
]


def _as_index(nu) -> MultiIndex:
    return tuple(int(c) for c in nu)


def is_downward_closed(members) -> bool:
    """Check closure under componentwise decrease by one in any coordinate."""
    mset = set(members)
    for nu in mset:
        for j, c in enumerate(nu):
            if c > 0:
                lower = nu[:j] + (c - 1,) + nu[j + 1 :]
                if lower not in mset:
                    return False
    return True


def _in_reduced_margin(nu, member_set) -> bool:
    if nu in member_set:
        return False
    for j, c in enumerate(nu):
        if c > 0:
            lower = nu[:j] + (c - 1,) + nu[j + 1 :]
            if lower not in member_set:
                return False
    return True


@dataclass(frozen=True)
class IndexSet:
    """Immutable downward-closed index set with reduced-margin state.

    Attributes
    ----------
    dim : int
        Ambient dimension d (fixed for the lifetime of the set).
    members : tuple
        Members in lexicographic order; position i defines the i-th basis
        element.
    reduced_margin : frozenset
        Exactly the indices outside `members` whose every nonzero coordinate
        can be decreased into `members`.
    entry_age : dict
        Iteration at which each reduced-margin index became eligible.
    """

    dim: int
    members: tuple
    reduced_margin: frozenset
    entry_age: dict = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_member_set", frozenset(self.members))

    def __len__(self):
        return len(self.members)

    def __contains__(self, nu):
        return _as_index(nu) in self._member_set

    def enumerate_lex(self) -> list:
        """Members sorted lexicographically; defines the basis ordering."""
        return list(self.members)

    def position(self, nu) -> int:
        return self.members.index(_as_index(nu))

    def add(self, nu, iteration: int) -> "IndexSet":
        """Move a reduced-margin index into the set.

        New reduced-margin entries created by the move are stamped with
        `iteration`. Raises ValueError for indices outside the reduced
        margin, since adding those would break downward closedness.
        """
        nu = _as_index(nu)
        if nu not in self.reduced_margin:
            raise ValueError(f"{nu} is not in the reduced margin")
        members = tuple(sorted(self._member_set | {nu}))
        member_set = frozenset(members)
        margin = set(self.reduced_margin)
        margin.discard(nu)
        ages = dict(self.entry_age)
        ages.pop(nu, None)
        for j in range(self.dim):
            cand = nu[:j] + (nu[j] + 1,) + nu[j + 1 :]
            if cand not in margin and _in_reduced_margin(cand, member_set):
                margin.add(cand)
                ages[cand] = iteration
        return IndexSet(self.dim, members, frozenset(margin), ages)

    def margin(self) -> set:
        """All indices outside the set reachable by one coordinate increment."""
        out = set()
        for nu in self.members:
            for j in range(self.dim):
                cand = nu[:j] + (nu[j] + 1,) + nu[j + 1 :]
                if cand not in self._member_set:
                    out.add(cand)
        return out

    def most_ancient(self, excluded=()) -> MultiIndex:
        """Oldest reduced-margin index outside `excluded`, ties broken lex."""
        excluded = {_as_index(nu) for nu in excluded}
        candidates = [nu for nu in self.reduced_margin if nu not in excluded]
        if not candidates:
            raise ValueError("no reduced-margin candidates left")
        return min(candidates, key=lambda nu: (self.entry_age[nu], nu))

    def max_degrees(self) -> np.ndarray:
        arr = np.array(self.members, dtype=np.int64)
        return arr.max(axis=0)

    def to_json(self) -> str:
        return json.dumps([list(nu) for nu in self.members])

    @staticmethod
    def from_json(text: str) -> "IndexSet":
        members = [_as_index(nu) for nu in json.loads(text)]
        return index_set_from_members(members)


def new_root(dim: int) -> IndexSet:
    """The singleton set {(0,...,0)} with reduced margin {e_1,...,e_d}."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    root = (0,) * dim
    margin = frozenset(
        root[:j] + (1,) + root[j + 1 :] for j in range(dim)
    )
    return IndexSet(dim, (root,), margin, {nu: 1 for nu in margin})


def index_set_from_members(members, iteration: int = 0) -> IndexSet:
    """Rebuild an IndexSet (recomputing the reduced margin) from raw members."""
    members = sorted({_as_index(nu) for nu in members})
    if not members:
        raise ValueError("empty index set")
    dim = len(members[0])
    if not is_downward_closed(members):
        raise ValueError("members are not downward closed")
    member_set = frozenset(members)
    margin = set()
    for nu in members:
        for j in range(dim):
            cand = nu[:j] + (nu[j] + 1,) + nu[j + 1 :]
            if _in_reduced_margin(cand, member_set):
                margin.add(cand)
    return IndexSet(dim, tuple(members), frozenset(margin), {nu: iteration for nu in margin})


def bulk(index_set: IndexSet, estimates: dict, beta: float) -> list:
    """Smallest reduced-margin subset carrying a beta fraction of the mass.

    Candidates are ranked by estimate (descending, lexicographic on ties) and
    the shortest prefix whose sum reaches beta times the total is returned.
    A zero total yields the single lexicographically smallest candidate, so
    the selection always has positive cardinality.
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must be in (0, 1]")
    if not index_set.reduced_margin:
        raise ValueError("reduced margin is empty")
    items = sorted(
        ((nu, float(estimates[nu])) for nu in index_set.reduced_margin),
        key=lambda kv: (-kv[1], kv[0]),
    )
    total = sum(v for _, v in items)
    if total <= 0.0:
        return [min(index_set.reduced_margin)]
    acc = 0.0
    chosen = []
    for nu, v in items:
        chosen.append(nu)
        acc += v
        if acc >= beta * total:
            break
    return chosen
