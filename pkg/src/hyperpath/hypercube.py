"""Combinatorics of the binary hypercube Q^d.

Vertices are plain ``int`` bit-sets throughout the package: bit ``c`` is set
iff coordinate ``c`` is one.  :class:`Vertex` is the validated wrapper used at
I/O boundaries.  Python ints are unbounded, so the types here work for any
``d``; the full-cube kernels in :mod:`hyperpath.paths` impose their own cap
(:data:`WORD_DIM_CAP`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import InvalidInput, NotAdjacent

# Largest d for which every edge encoding lower*d + coord fits in 64 bits.
WORD_DIM_CAP = 58


def full_vertex(d: int) -> int:
    return (1 << d) - 1


def layer(v: int) -> int:
    return v.bit_count()


def ones(v: int) -> list[int]:
    """Coordinates of ``v`` equal to one, ascending."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def mask_of(coords) -> int:
    m = 0
    for c in coords:
        m |= 1 << c
    return m


def is_leq(u: int, v: int) -> bool:
    """``I(u) ⊆ I(v)``."""
    return u & ~v == 0


def format_vertex(v: int, d: int) -> str:
    """Fixed-width binary string, most significant coordinate first."""
    return format(v, f"0{d}b") if d else ""


def parse_vertex(s: str) -> int:
    s = s.strip()
    if not s or set(s) - {"0", "1"}:
        raise InvalidInput(f"not a binary vertex string: {s!r}")
    return int(s, 2)


@dataclass(frozen=True)
class Vertex:
    bits: int
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInput("dimension must be >= 1")
        if self.bits < 0 or self.bits >> self.dim:
            raise InvalidInput(f"bits {self.bits:#x} out of range for d={self.dim}")

    @classmethod
    def from_string(cls, s: str) -> "Vertex":
        return cls(parse_vertex(s), len(s.strip()))

    @classmethod
    def zero(cls, d: int) -> "Vertex":
        return cls(0, d)

    @classmethod
    def one(cls, d: int) -> "Vertex":
        return cls(full_vertex(d), d)

    @property
    def layer(self) -> int:
        return self.bits.bit_count()

    @property
    def ones(self) -> frozenset[int]:
        return frozenset(ones(self.bits))

    def __str__(self) -> str:
        return format_vertex(self.bits, self.dim)


@dataclass(frozen=True)
class EdgeId:
    """Edge from ``lower`` to ``lower | 1 << coord``."""

    lower: int
    coord: int

    def __post_init__(self):
        if self.coord < 0 or (self.lower >> self.coord) & 1:
            raise InvalidInput(f"coordinate {self.coord} already set in lower vertex")

    @property
    def upper(self) -> int:
        return self.lower | (1 << self.coord)

    def encode(self, d: int) -> int:
        return self.lower * d + self.coord


@dataclass(frozen=True)
class Subcube:
    """The induced subcube ``Q(lo, hi) = {u : lo <= u <= hi}``."""

    lo: int
    hi: int

    def __post_init__(self):
        if not is_leq(self.lo, self.hi):
            raise InvalidInput("subcube requires I(lo) ⊆ I(hi)")

    @classmethod
    def full(cls, d: int) -> "Subcube":
        return cls(0, full_vertex(d))

    @property
    def dimension(self) -> int:
        return self.hi.bit_count() - self.lo.bit_count()

    @property
    def free_mask(self) -> int:
        return self.hi & ~self.lo

    def free_coords(self) -> list[int]:
        return ones(self.free_mask)

    def __contains__(self, v: int) -> bool:
        return is_leq(self.lo, v) and is_leq(v, self.hi)

    def vertices(self) -> Iterator[int]:
        """All vertices, enumerating subsets of the free mask."""
        free = self.free_mask
        s = 0
        while True:
            yield self.lo | s
            if s == free:
                return
            s = (s - free) & free

    def edges(self) -> Iterator[EdgeId]:
        free = self.free_coords()
        for v in self.vertices():
            for c in free:
                if not (v >> c) & 1:
                    yield EdgeId(v, c)


def coord_diff(u: int, v: int) -> int:
    x = u ^ v
    if x == 0 or x & (x - 1):
        raise NotAdjacent(f"vertices {u:#x} and {v:#x} are not adjacent")
    return x.bit_length() - 1


def up_neighbors(v: int, d: int) -> list[tuple[int, int]]:
    return [(c, v | (1 << c)) for c in range(d) if not (v >> c) & 1]


def down_neighbors(v: int) -> list[tuple[int, int]]:
    return [(c, v & ~(1 << c)) for c in ones(v)]


def subcubes_certified_disjoint(a: Subcube, b: Subcube) -> bool:
    """Sufficient test for vertex-disjointness of two subcubes.

    True iff ``I(a.lo) ⊄ I(b.hi)`` or ``I(b.lo) ⊄ I(a.hi)``.  In that case no
    vertex can lie in both; a False answer does not imply intersection.
    """
    return not is_leq(a.lo, b.hi) or not is_leq(b.lo, a.hi)


def enumerate_layer(d: int, k: int) -> Iterator[int]:
    """Vertices of layer ``k`` in ascending numeric order (Gosper's hack)."""
    if not 0 <= k <= d:
        raise InvalidInput(f"layer {k} outside [0, {d}]")
    if k == 0:
        yield 0
        return
    v = (1 << k) - 1
    limit = 1 << d
    while v < limit:
        yield v
        low = v & -v
        ripple = v + low
        v = (((ripple ^ v) >> 2) // low) | ripple
