"""Seeded, stateless Bernoulli(p) edge oracle realising Q^d_p.

Every edge ``(lower, coord)`` is encoded as ``lower * d + coord`` and hashed
together with the seed by the SplitMix64 finalizer.  The top 53 bits of the
hash give a uniform value in [0, 1); the edge is present iff that value is
below ``p``.  Because the uniform does not depend on ``p``, graphs with the
same seed and different ``p`` are monotonically coupled.

For ``d <= WORD_DIM_CAP`` the encoding fits one 64-bit word and the hash is
``fmix64(seed ^ enc)``.  Larger ``d`` splits the encoding into a fixed number
of 64-bit limbs (most significant first) and chains ``h = fmix64(h ^ limb)``
starting from ``h = seed``, which reduces to the one-word formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidParameter
from .hypercube import WORD_DIM_CAP, EdgeId, Subcube, is_leq

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TWO53 = float(1 << 53)


def fmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def fmix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(_M1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_M2)
        z ^= z >> np.uint64(31)
    return z


def derive_seed(master_seed: int, index: int) -> int:
    """Replica seed; injective in ``index`` for a fixed master seed."""
    return fmix64(master_seed ^ ((index * GAMMA) & MASK64))


def parse_seed(text) -> int:
    """Accept an int, a decimal string, or a 0x-prefixed hex string."""
    if isinstance(text, int):
        value = text
    else:
        s = str(text).strip().lower()
        try:
            value = int(s, 16) if s.startswith("0x") else int(s, 10)
        except ValueError:
            raise InvalidParameter(f"bad seed {text!r}") from None
    if not 0 <= value <= MASK64:
        raise InvalidParameter(f"seed {text!r} outside the 64-bit range")
    return value


def threshold_int(p: float) -> int:
    """Integer form of p: ``(h >> 11) < threshold_int(p)`` iff ``u(h) < p``."""
    return math.ceil(p * _TWO53)


def p_from_alpha(alpha: float, d: int) -> float:
    """``alpha / d`` clipped to 1 (alpha > d would not be a probability)."""
    return min(1.0, alpha / d)


def n_limbs(d: int) -> int:
    return max(1, ((d << d) - 1).bit_length() + 63 >> 6)


def hash_encoding(seed: int, enc: int, limbs: int) -> int:
    h = seed
    for i in range(limbs - 1, -1, -1):
        h = fmix64(h ^ ((enc >> (64 * i)) & MASK64))
    return h


def _uniform(h):
    return (h >> 11) / _TWO53


@dataclass(frozen=True)
class RandomSubgraph:
    """Q^d_p realised lazily from ``seed`` (or from a materialised mask).

    ``mode="explicit"`` stores one presence flag per edge encoding
    (``2**d * d`` booleans); queries then read the mask instead of hashing.
    """

    d: int
    p: float
    seed: int
    mode: str = "lazy"
    mask: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.d < 1:
            raise InvalidParameter("d must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidParameter(f"p={self.p} outside [0, 1]")
        if not 0 <= self.seed <= MASK64:
            raise InvalidParameter("seed must be a 64-bit unsigned integer")
        if self.mode not in ("lazy", "explicit"):
            raise InvalidParameter(f"unknown mode {self.mode!r}")
        if self.mode == "explicit":
            if self.d > WORD_DIM_CAP:
                raise InvalidParameter("explicit mode needs d <= WORD_DIM_CAP")
            if self.mask is None:
                object.__setattr__(self, "mask", _materialise(self.d, self.p, self.seed))
            elif self.mask.shape != ((1 << self.d) * self.d,):
                raise InvalidParameter("mask has the wrong shape")

    @classmethod
    def from_alpha(cls, d: int, alpha: float, seed: int, mode: str = "lazy") -> "RandomSubgraph":
        return cls(d, p_from_alpha(alpha, d), seed, mode)

    @property
    def alpha(self) -> float:
        return self.p * self.d

    @property
    def limbs(self) -> int:
        return n_limbs(self.d)

    @property
    def threshold(self) -> int:
        return threshold_int(self.p)

    def with_p(self, p: float) -> "RandomSubgraph":
        """Same seed, different p (monotone coupling).  Always lazy."""
        return RandomSubgraph(self.d, p, self.seed)

    def explicit(self) -> "RandomSubgraph":
        return RandomSubgraph(self.d, self.p, self.seed, "explicit")

    def _check(self, lower: int, coord: int):
        if not 0 <= coord < self.d or lower < 0 or lower >> self.d or (lower >> coord) & 1:
            raise InvalidInput(f"invalid edge ({lower:#x}, {coord}) for d={self.d}")

    def hash(self, lower: int, coord: int) -> int:
        return hash_encoding(self.seed, lower * self.d + coord, self.limbs)

    def uniform(self, lower: int, coord: int) -> float:
        self._check(lower, coord)
        return _uniform(self.hash(lower, coord))

    def present(self, lower: int, coord: int) -> bool:
        self._check(lower, coord)
        if self.mask is not None:
            return bool(self.mask[lower * self.d + coord])
        return (self.hash(lower, coord) >> 11) < self.threshold

    # Batched queries, used by the tree-growing and sparse search code.

    def up_hashes(self, x: int, coords: np.ndarray) -> np.ndarray:
        """Hashes of the edges ``(x, c)`` for each ``c`` in ``coords``."""
        coords = np.asarray(coords, dtype=np.uint64)
        base = x * self.d
        limbs = self.limbs
        if limbs == 1:
            return fmix64_array(np.uint64(self.seed) ^ (np.uint64(base) + coords))
        lo = base & MASK64
        high = base >> 64
        pre = []
        for hv in (high, high + 1):
            h = self.seed
            for i in range(limbs - 2, -1, -1):
                h = fmix64(h ^ ((hv >> (64 * i)) & MASK64))
            pre.append(h)
        with np.errstate(over="ignore"):
            low = np.uint64(lo) + coords
        carry = low < np.uint64(lo)
        start = np.where(carry, np.uint64(pre[1]), np.uint64(pre[0]))
        return fmix64_array(start ^ low)

    def down_hashes(self, x: int, coords: np.ndarray) -> np.ndarray:
        """Hashes of the edges ``(x - 2**c, c)``."""
        if self.limbs == 1:
            c = np.asarray(coords, dtype=np.uint64)
            with np.errstate(over="ignore"):
                lower = np.uint64(x) - (np.uint64(1) << c)
                enc = lower * np.uint64(self.d) + c
            return fmix64_array(np.uint64(self.seed) ^ enc)
        return np.array([self.hash(x & ~(1 << int(c)), int(c)) for c in coords], dtype=np.uint64)

    def present_up(self, x: int, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        if self.mask is not None:
            return self.mask[x * self.d + coords].copy()
        return (self.up_hashes(x, coords) >> np.uint64(11)) < np.uint64(self.threshold)

    def present_down(self, x: int, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        if self.mask is not None:
            lowers = np.array([x & ~(1 << int(c)) for c in coords], dtype=np.int64)
            return self.mask[lowers * self.d + coords].copy()
        return (self.down_hashes(x, coords) >> np.uint64(11)) < np.uint64(self.threshold)

    def uniforms_up(self, x: int, coords) -> np.ndarray:
        return (self.up_hashes(x, coords) >> np.uint64(11)).astype(np.float64) / _TWO53


def _materialise(d: int, p: float, seed: int) -> np.ndarray:
    enc = np.arange((1 << d) * d, dtype=np.uint64)
    h = fmix64_array(np.uint64(seed) ^ enc)
    present = (h >> np.uint64(11)) < np.uint64(threshold_int(p))
    lower = enc // np.uint64(d)
    coord = enc % np.uint64(d)
    valid = ((lower >> coord) & np.uint64(1)) == 0
    return present & valid


def edge_state(g: RandomSubgraph, e: EdgeId) -> bool:
    return g.present(e.lower, e.coord)


def coupled_threshold(g: RandomSubgraph, e: EdgeId) -> float:
    return g.uniform(e.lower, e.coord)


@dataclass(frozen=True)
class SubcubeOracle:
    """Edge oracle for the subgraph of ``g`` induced on ``subcube``.

    Answers come from the ambient sample, so events inside disjoint subcubes
    are measurable in the same realisation of Q^d_p.
    """

    g: RandomSubgraph
    subcube: Subcube

    @property
    def d(self) -> int:
        return self.g.d

    def contains_edge(self, lower: int, coord: int) -> bool:
        bit = 1 << coord
        return (
            not lower & bit
            and self.subcube.free_mask & bit != 0
            and is_leq(self.subcube.lo, lower)
            and is_leq(lower | bit, self.subcube.hi)
        )

    def present(self, lower: int, coord: int) -> bool:
        if not self.contains_edge(lower, coord):
            return False
        return self.g.present(lower, coord)

    def edges(self):
        return self.subcube.edges()


def restrict_to_subcube(g: RandomSubgraph, s: Subcube) -> SubcubeOracle:
    if s.hi >> g.d:
        raise InvalidInput("subcube outside the ambient cube")
    return SubcubeOracle(g, s)
