"""
Conductance engine.

A :class:`PartitionState` caches the cut, both volumes and the boundary
degrees of every vertex, so a single-vertex move is tested in O(1) and
applied in O(deg(v)). A swap of two vertices is tested in O(log deg): the
only non-constant step is the edge lookup, a binary search
(``np.searchsorted``) over the sorted neighbour row in :meth:`Graph.has_edge`.
Applying it costs O(deg(u) + deg(w)). All comparisons of conductance values
are done on integers by cross-multiplication.

Sign convention: moving v out of S turns its ``boundary_comp[v]`` cut edges
into internal edges and its ``boundary_s[v]`` internal edges into cut edges,
so ``cut' = cut - boundary_comp[v] + boundary_s[v]`` and ``Vol(S)`` drops by
``deg(v)``. Moving v into S mirrors every sign. For every neighbour w of v,
``boundary_s[w]`` decreases by one on removal and increases on insertion.
"""

import logging
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from mincond.core.errors import LengthMismatch, SameSide, TooLarge, UndefinedPartition, UndefinedPhi
from mincond.core.graph import Graph

logger = logging.getLogger(__name__)

BITS_DTYPE = np.uint8
DISPLAY_DIGITS = 8
BRUTE_FORCE_MAX_N = 24
BRUTE_FORCE_CHUNK = 1 << 16


@dataclass(frozen=True)
class ConductanceValue:
    """
    Exact conductance ``numerator / denominator``.

    A zero denominator is the undefined value. It orders above every defined
    value, so it behaves as the "infinity" a search starts from.
    """

    numerator: int
    denominator: int

    def __post_init__(self):
        object.__setattr__(self, "numerator", int(self.numerator))
        object.__setattr__(self, "denominator", int(self.denominator))

    @classmethod
    def undefined(cls) -> "ConductanceValue":
        return cls(0, 0)

    @property
    def defined(self) -> bool:
        return self.denominator > 0

    def _compare(self, other: "ConductanceValue") -> int:
        if not (self.defined and other.defined):
            return int(not self.defined) - int(not other.defined)
        left = self.numerator * other.denominator
        right = other.numerator * self.denominator
        return (left > right) - (left < right)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConductanceValue):
            return NotImplemented
        return self._compare(other) == 0

    def __lt__(self, other: "ConductanceValue") -> bool:
        return self._compare(other) < 0

    def __le__(self, other: "ConductanceValue") -> bool:
        return self._compare(other) <= 0

    def __gt__(self, other: "ConductanceValue") -> bool:
        return self._compare(other) > 0

    def __ge__(self, other: "ConductanceValue") -> bool:
        return self._compare(other) >= 0

    def __hash__(self) -> int:
        return hash(self.as_fraction()) if self.defined else hash("undefined")

    def as_fraction(self) -> Fraction:
        if not self.defined:
            raise UndefinedPartition("conductance is undefined for S = {} or S = V")
        return Fraction(self.numerator, self.denominator)

    def __float__(self) -> float:
        return float(self.as_fraction()) if self.defined else float("inf")

    def display(self) -> str:
        """Decimal with exactly 8 fractional digits, rounded half up."""
        if not self.defined:
            return "undefined"
        return format_decimal(self.as_fraction())

    def __str__(self) -> str:
        return self.display()


def format_decimal(value: Fraction, digits: int = DISPLAY_DIGITS) -> str:
    scale = 10 ** digits
    scaled = (2 * value.numerator * scale + value.denominator) // (2 * value.denominator)
    whole, frac = divmod(scaled, scale)
    return f"{whole}.{frac:0{digits}d}"


@dataclass(frozen=True)
class MoveDelta:
    """Cut and volumes the state would have after a flip or a swap."""

    vertex: int | tuple[int, int]
    new_cut: int
    new_vol_s: int
    new_vol_comp: int

    @property
    def degenerate(self) -> bool:
        return self.new_vol_s <= 0 or self.new_vol_comp <= 0

    @property
    def phi(self) -> ConductanceValue:
        return ConductanceValue(self.new_cut, max(0, min(self.new_vol_s, self.new_vol_comp)))


def argmin_ratio(numerators: np.ndarray, denominators: np.ndarray) -> int:
    """
    Index of the smallest ``numerators[i] / denominators[i]``; ties go to the
    smallest index. Denominators must be positive.

    The float quotient only picks a starting pivot; the winner is settled by
    integer cross-multiplication.
    """
    quotients = numerators / denominators
    best = int(np.argmin(quotients))
    while True:
        better = numerators * denominators[best] < numerators[best] * denominators
        if not better.any():
            break
        candidates = np.flatnonzero(better)
        best = int(candidates[np.argmin(quotients[candidates])])
    ties = np.flatnonzero(numerators * denominators[best] == numerators[best] * denominators)
    return int(ties[0])


def as_bits(graph: Graph, bits) -> np.ndarray:
    array = np.asarray(bits)
    if array.shape != (graph.n,):
        raise LengthMismatch(f"membership has shape {array.shape}, graph has {graph.n} vertices")
    return (array != 0).astype(BITS_DTYPE)


def cut_and_volumes(graph: Graph, bits: np.ndarray) -> tuple[int, int, int]:
    """Full O(m) evaluation: (cut, Vol(S), Vol(V \\ S))."""
    in_s = as_bits(graph, bits).astype(bool)
    cut = int(np.count_nonzero(in_s[graph.sources] != in_s[graph.indices])) // 2
    vol_s = int(graph.degree[in_s].sum())
    return cut, vol_s, 2 * graph.m - vol_s


def evaluate_bits(graph: Graph, bits: np.ndarray) -> ConductanceValue:
    cut, vol_s, vol_comp = cut_and_volumes(graph, bits)
    return ConductanceValue(cut, min(vol_s, vol_comp))


class PartitionState:
    """
    Mutable bipartition (S, V \\ S) of a graph with the auxiliary data of the
    incremental evaluation.

    Besides the cached quantities, the vertices are kept in ``_order`` with
    the members of S in the first ``size_s`` slots, so a uniformly random
    member of either side is drawn in O(1).
    """

    def __init__(self, graph: Graph, membership: np.ndarray, cut: int, vol_s: int, vol_comp: int,
                 boundary_s: np.ndarray, boundary_comp: np.ndarray):
        self.graph = graph
        self.membership = membership
        self.cut = cut
        self.vol_s = vol_s
        self.vol_comp = vol_comp
        self.boundary_s = boundary_s
        self.boundary_comp = boundary_comp

        in_s = membership.astype(bool)
        self._order = np.concatenate([np.flatnonzero(in_s), np.flatnonzero(~in_s)])
        self._pos = np.empty(graph.n, dtype=np.int64)
        self._pos[self._order] = np.arange(graph.n)
        self.size_s = int(np.count_nonzero(in_s))

    def copy(self) -> "PartitionState":
        clone = object.__new__(PartitionState)
        clone.graph = self.graph
        clone.membership = self.membership.copy()
        clone.cut = self.cut
        clone.vol_s = self.vol_s
        clone.vol_comp = self.vol_comp
        clone.boundary_s = self.boundary_s.copy()
        clone.boundary_comp = self.boundary_comp.copy()
        clone._order = self._order.copy()
        clone._pos = self._pos.copy()
        clone.size_s = self.size_s
        return clone

    def bits(self) -> np.ndarray:
        return self.membership.copy()

    def phi(self) -> ConductanceValue:
        return ConductanceValue(self.cut, min(self.vol_s, self.vol_comp))

    def phi_max_form(self) -> ConductanceValue:
        """max{cut / Vol(S), cut / Vol(V \\ S)}, which equals :meth:`phi`."""
        if self.vol_s == 0 or self.vol_comp == 0:
            raise UndefinedPartition("max form needs both volumes positive")
        return max(ConductanceValue(self.cut, self.vol_s), ConductanceValue(self.cut, self.vol_comp))

    def eval_flip(self, v: int) -> MoveDelta:
        v = int(v)
        inside = int(self.boundary_s[v])
        outside = int(self.boundary_comp[v])
        deg = int(self.graph.degree[v])
        if self.membership[v]:
            return MoveDelta(v, self.cut - outside + inside, self.vol_s - deg, self.vol_comp + deg)
        return MoveDelta(v, self.cut - inside + outside, self.vol_s + deg, self.vol_comp - deg)

    def apply_flip(self, v: int) -> "PartitionState":
        v = int(v)
        delta = self.eval_flip(v)
        nbrs = self.graph.neighbors(v)
        if self.membership[v]:
            self.boundary_s[nbrs] -= 1
            self.boundary_comp[nbrs] += 1
            self.membership[v] = 0
            self._move_slot(self._pos[v], self.size_s - 1)
            self.size_s -= 1
        else:
            self.boundary_s[nbrs] += 1
            self.boundary_comp[nbrs] -= 1
            self.membership[v] = 1
            self._move_slot(self._pos[v], self.size_s)
            self.size_s += 1
        self.cut = delta.new_cut
        self.vol_s = delta.new_vol_s
        self.vol_comp = delta.new_vol_comp
        return self

    def _move_slot(self, i: int, j: int) -> None:
        a, b = self._order[i], self._order[j]
        self._order[i], self._order[j] = b, a
        self._pos[b], self._pos[a] = i, j

    def eval_swap(self, u: int, w: int) -> MoveDelta:
        """
        Exchanges u and w across the cut. Composing the two flip deltas
        counts the edge {u, w} wrongly when it exists: after the first flip
        that edge changes side, which adds 2 to the cut.
        """
        u, w = int(u), int(w)
        if self.membership[u] == self.membership[w]:
            raise SameSide(f"vertices {u} and {w} are on the same side")
        first = self.eval_flip(u)
        second = self.eval_flip(w)
        correction = 2 if self.graph.has_edge(u, w) else 0
        return MoveDelta(
            (u, w),
            first.new_cut + second.new_cut - self.cut + correction,
            first.new_vol_s + second.new_vol_s - self.vol_s,
            first.new_vol_comp + second.new_vol_comp - self.vol_comp,
        )

    def apply_swap(self, u: int, w: int) -> "PartitionState":
        if self.membership[int(u)] == self.membership[int(w)]:
            raise SameSide(f"vertices {u} and {w} are on the same side")
        self.apply_flip(u)
        self.apply_flip(w)
        return self

    def improvement_predicate(self, delta: MoveDelta) -> bool:
        """
        Tests ``min-vol(S) - min-vol(S') + c / phi(S) <= 0`` with
        ``c = cut(S') - cut(S)``, multiplied through by ``cut(S) > 0`` to stay
        in integers. Equivalent to ``phi(S') <= phi(S)``.
        """
        current = min(self.vol_s, self.vol_comp)
        if current <= 0 or self.cut <= 0:
            raise UndefinedPhi("predicate needs a defined, positive phi(S)")
        new = min(delta.new_vol_s, delta.new_vol_comp)
        if new <= 0:
            raise UndefinedPhi("move leads to an undefined phi(S')")
        change = delta.new_cut - self.cut
        return (current - new) * self.cut + change * current <= 0

    def scan_flips(self) -> tuple[np.ndarray, np.ndarray]:
        """New cut and new min-volume of every single flip, vectorised."""
        in_s = self.membership.astype(bool)
        diff = self.boundary_s - self.boundary_comp
        new_cut = self.cut + np.where(in_s, diff, -diff)
        shift = np.where(in_s, -self.graph.degree, self.graph.degree)
        new_den = np.minimum(self.vol_s + shift, self.vol_comp - shift)
        return new_cut, new_den

    def sample_in_s(self, rng: np.random.Generator) -> int:
        return int(self._order[rng.integers(self.size_s)])

    def sample_out_s(self, rng: np.random.Generator) -> int:
        return int(self._order[self.size_s + rng.integers(self.graph.n - self.size_s)])

    def check(self) -> None:
        """Asserts every cached field equals a full recomputation."""
        fresh = init_from_bits(self.graph, self.membership)
        assert self.cut == fresh.cut, f"cut {self.cut} != {fresh.cut}"
        assert self.vol_s == fresh.vol_s, f"vol_s {self.vol_s} != {fresh.vol_s}"
        assert self.vol_comp == fresh.vol_comp, f"vol_comp {self.vol_comp} != {fresh.vol_comp}"
        assert np.array_equal(self.boundary_s, fresh.boundary_s), "boundary_s drifted"
        assert np.array_equal(self.boundary_comp, fresh.boundary_comp), "boundary_comp drifted"
        assert self.size_s == fresh.size_s
        assert np.all(self.membership[self._order[:self.size_s]] == 1)
        assert np.all(self.membership[self._order[self.size_s:]] == 0)


def init_from_bits(graph: Graph, membership) -> PartitionState:
    """Builds a :class:`PartitionState` in O(m). Raises LengthMismatch."""
    bits = as_bits(graph, membership)
    in_s = bits.astype(bool)
    boundary_s = np.bincount(graph.sources[in_s[graph.indices]], minlength=graph.n).astype(np.int64)
    boundary_comp = graph.degree - boundary_s
    cut = int(boundary_comp[in_s].sum())
    vol_s = int(graph.degree[in_s].sum())
    return PartitionState(graph, bits, cut, vol_s, 2 * graph.m - vol_s, boundary_s, boundary_comp)


def brute_force_min_conductance(graph: Graph) -> tuple[ConductanceValue, np.ndarray]:
    """
    Global minimum conductance by enumeration.

    Vertex 0 is pinned outside S (complement symmetry), and subsets are
    enumerated with vertex 0 as the most significant bit, so the first
    minimiser met is the lexicographically smallest membership.

    Raises:
        TooLarge: more than 24 vertices.
    """
    n = graph.n
    if n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"brute force is limited to {BRUTE_FORCE_MAX_N} vertices, graph has {n}")

    edges = graph.edges()
    shifts = (n - 1 - np.arange(n)).astype(np.uint32)
    total = 2 * graph.m
    best = ConductanceValue.undefined()
    best_code = None

    for start in range(1, 1 << (n - 1), BRUTE_FORCE_CHUNK):
        codes = np.arange(start, min(start + BRUTE_FORCE_CHUNK, 1 << (n - 1)), dtype=np.uint32)
        bits = ((codes[:, None] >> shifts[None, :]) & 1).astype(np.int64)
        cuts = np.count_nonzero(bits[:, edges[:, 0]] != bits[:, edges[:, 1]], axis=1).astype(np.int64)
        vol_s = bits @ graph.degree
        dens = np.minimum(vol_s, total - vol_s)
        valid = np.flatnonzero(dens > 0)
        if not len(valid):
            continue
        i = valid[argmin_ratio(cuts[valid], dens[valid])]
        candidate = ConductanceValue(cuts[i], dens[i])
        if candidate < best:
            best, best_code = candidate, int(codes[i])

    witness = ((np.uint32(best_code) >> shifts) & 1).astype(BITS_DTYPE)
    logger.debug("%s: brute-force minimum %s", graph.name, best)
    return best, witness


def write_partition(path: str, graph: Graph, bits: np.ndarray, phi: ConductanceValue) -> None:
    """One "label side" line per vertex after a header with the conductance."""
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# conductance {phi.display()}\n")
        for label, side in zip(graph.labels, as_bits(graph, bits).tolist()):
            f.write(f"{label} {side}\n")
