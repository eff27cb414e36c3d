"""Shared containers for assembled supercharacter theories.

A theory is a list of characters and a partition of the group.  Character
values are interned: each character stores a compact id array over the
group's packed element ids plus a shared pool of exact cyclotomic values,
so equality, constancy, and table emission are integer-array operations
and every exact value is stored once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ValuePool:
    """Interning pool of exact values; id 0 is always the zero of the field."""

    def __init__(self, cfield):
        self.field = cfield
        self.values = [cfield.zero]
        self.index = {cfield.zero: 0}

    def id_of(self, value):
        got = self.index.get(value)
        if got is None:
            got = len(self.values)
            self.values.append(value)
            self.index[value] = got
        return got

    def __len__(self):
        return len(self.values)


@dataclass
class SuperChar:
    """One supercharacter: interned values over packed group ids."""
    label: str
    ids: np.ndarray               # int32 pool ids, one per group element
    pool: ValuePool
    provenance: dict = field(default_factory=dict)

    def value_at(self, gid):
        return self.pool.values[int(self.ids[gid])]

    def degree(self, ident_id):
        return self.value_at(ident_id).as_int()

    def key(self):
        return self.ids.tobytes()


@dataclass
class SuperClass:
    """One superclass: a sorted array of packed member ids."""
    label: str
    members: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.members = np.unique(np.asarray(self.members, dtype=np.int64))

    @property
    def rep(self):
        return int(self.members[0])

    @property
    def size(self):
        return int(self.members.size)

    def key(self):
        return self.members.tobytes()


@dataclass
class SuperTheory:
    """An assembled (characters, partition) pair over one finite group."""
    kind: str                     # "U-on-U", "Ub-on-G", "Gb-on-G"
    group_size: int
    ident_id: int
    chars: list
    classes: list
    pool: ValuePool
    meta: dict = field(default_factory=dict)

    def class_of_element(self):
        """Array mapping each element id to its class index; -1 if uncovered."""
        out = np.full(self.group_size, -1, dtype=np.int64)
        for idx, kl in enumerate(self.classes):
            out[kl.members] = idx
        return out


def dedup_chars(chars):
    """Drop characters with identical value vectors, preserving first labels."""
    seen = set()
    out = []
    for ch in chars:
        k = ch.key()
        if k not in seen:
            seen.add(k)
            out.append(ch)
    return out


def dedup_classes(classes):
    seen = set()
    out = []
    for kl in classes:
        k = kl.key()
        if k not in seen:
            seen.add(k)
            out.append(kl)
    return out


def sort_canonical(theory):
    """Deterministic presentation: classes by (size, members), characters by
    (identity value id, value bytes)."""
    theory.classes.sort(key=lambda kl: (kl.size, kl.members.tolist()))
    theory.chars.sort(key=lambda ch: (int(ch.ids[theory.ident_id]), ch.key()))
    return theory
