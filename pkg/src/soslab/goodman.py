"""Triangle counting: Goodman's bound, exhaustive minima, and the gap
between Goodman's piecewise picture and the true asymptotic density.

Everything on the Goodman side is exact rational arithmetic.  The true
minimal-density formula contains a square root, so it is evaluated in
floating point; its documented evaluation error (1e-9) is far below
every tolerance it is compared at.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

from .errors import InvalidInputError, ResourceCapError
from .rationals import Q, rat, rat_str


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices [1, n]."""

    n: int
    edges: frozenset

    def __post_init__(self):
        for e in self.edges:
            a, b = e
            if not (1 <= a < b <= self.n):
                raise InvalidInputError(f"bad edge {e} for n = {self.n}")

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        norm = set()
        for a, b in edges:
            if a == b:
                raise InvalidInputError(f"self-loop ({a},{b})")
            norm.add((min(a, b), max(a, b)))
        return cls(n, frozenset(norm))

    @classmethod
    def from_edge_list_text(cls, text: str) -> "Graph":
        """First line: n.  Each further non-empty line: `i j`."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise InvalidInputError("empty graph file")
        n = int(lines[0])
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise InvalidInputError(f"expected 'i j', got {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
        return cls.from_edges(n, edges)

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        """JSON adjacency form: {"n": 5, "adjacency": {"1": [2,3], ...}}."""
        data = json.loads(text)
        n = int(data["n"])
        edges = []
        for v, nbrs in data.get("adjacency", {}).items():
            for u in nbrs:
                edges.append((int(v), int(u)))
        return cls.from_edges(n, edges)

    def to_json(self) -> str:
        adjacency: dict = {}
        for a, b in sorted(self.edges):
            adjacency.setdefault(str(a), []).append(b)
        return json.dumps({"n": self.n, "adjacency": adjacency})

    def density(self):
        pairs = math.comb(self.n, 2)
        return Q(len(self.edges), pairs) if pairs else Q(0)


@dataclass(frozen=True)
class InducedCounts:
    """Numbers of 3-vertex induced subgraphs with 3, 2, 1, 0 edges."""

    n33: int
    n32: int
    n31: int
    n30: int


def count_induced(g: Graph) -> InducedCounts:
    counts = [0, 0, 0, 0]
    es = g.edges
    for a, b, c in itertools.combinations(range(1, g.n + 1), 3):
        k = ((a, b) in es) + ((a, c) in es) + ((b, c) in es)
        counts[k] += 1
    return InducedCounts(n33=counts[3], n32=counts[2], n31=counts[1], n30=counts[0])


def verify_counting_identities(g: Graph) -> bool:
    """Three exact identities tying the induced counts to the edge
    density rho = |E|/C(n,2):

    1. N33 + N32 + N31 + N30 = C(n,3);
    2. (n-2)(1-rho)C(n,2) = N32 + 2 N31 + 3 N30  (each missing edge is
       counted once per triple containing it);
    3. sum_i sum_{j<l, both != i} (1-x_ij)(1-x_il) = N31 + 3 N30, and
       the resulting re-expression of N33 in terms of the others.
    """
    n = g.n
    c = count_induced(g)
    rho = g.density()
    total_ok = c.n33 + c.n32 + c.n31 + c.n30 == math.comb(n, 3)
    missing_ok = (n - 2) * (1 - rho) * math.comb(n, 2) == c.n32 + 2 * c.n31 + 3 * c.n30

    es = g.edges
    cherry_sum = 0
    for i in range(1, n + 1):
        others = [j for j in range(1, n + 1) if j != i]
        for j, l in itertools.combinations(others, 2):
            if (min(i, j), max(i, j)) not in es and (min(i, l), max(i, l)) not in es:
                cherry_sum += 1
    cherry_ok = cherry_sum == c.n31 + 3 * c.n30
    # N33 re-expressed through the previous two identities
    reexpr_ok = (
        c.n33
        == math.comb(n, 3)
        - (n - 2) * (1 - rho) * math.comb(n, 2)
        + Q(2, 3) * cherry_sum
        + Q(c.n31, 3)
    )
    return total_ok and missing_ok and cherry_ok and reexpr_ok


def goodman_bound(n: int, rho):
    """t(n, rho) = C(n,3) - (n(n-1)(1-rho)/6)((1+2rho)n - 2 - 2rho).

    A lower bound on the triangle count of any graph with edge density
    rho; may be negative or fractional (it is a bound, not a count)."""
    rho = rat(rho) if not isinstance(rho, Q) else rho
    return Q(math.comb(n, 3)) - (
        Q(n * (n - 1)) * (1 - rho) / 6
    ) * ((1 + 2 * rho) * n - 2 - 2 * rho)


def tight_form(n: int, k):
    """(1/6) n (n - n/k) (n - 2n/k): the triangle count of the complete
    k-partite graph with equal parts, and equal to goodman_bound at the
    corresponding density."""
    k = rat(k) if not isinstance(k, Q) else k
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    g = Q(n) / k
    value = Q(n) * (n - g) * (n - 2 * g) / 6
    rho = (n - g) / Q(n - 1) if n > 1 else Q(0)
    assert value == goodman_bound(n, rho), "tight form disagrees with the bound"
    return value


def _triangles_of_mask(mask: int, tri_masks) -> int:
    return sum(1 for t in tri_masks if mask & t == t)


def brute_min_triangles(n: int, m_edges: int, prune: bool = True) -> int:
    """Exact minimum triangle count over all graphs with n vertices and
    m_edges edges, by exhaustive search over edge subsets.

    With prune=True, edge subsets are reduced to one representative per
    isomorphism class via a canonical adjacency-matrix form before
    counting; the no-pruning mode exists as a cross-check at n <= 5."""
    if n > 7:
        raise ResourceCapError(f"exhaustive search limited to n <= 7, got n = {n}")
    if not prune and n > 5:
        raise ResourceCapError("no-pruning mode limited to n <= 5")
    pairs = list(itertools.combinations(range(n), 2))
    if not 0 <= m_edges <= len(pairs):
        raise InvalidInputError(f"m_edges = {m_edges} out of range for n = {n}")
    pair_index = {p: i for i, p in enumerate(pairs)}
    tri_masks = []
    for a, b, c in itertools.combinations(range(n), 3):
        tri_masks.append(
            (1 << pair_index[(a, b)]) | (1 << pair_index[(a, c)]) | (1 << pair_index[(b, c)])
        )

    def canonical(mask: int) -> int:
        best = None
        for perm in itertools.permutations(range(n)):
            relabeled = 0
            for p, i in pair_index.items():
                if mask >> i & 1:
                    a, b = perm[p[0]], perm[p[1]]
                    relabeled |= 1 << pair_index[(min(a, b), max(a, b))]
            if best is None or relabeled < best:
                best = relabeled
        return best

    best = None
    seen = set()
    for combo in itertools.combinations(range(len(pairs)), m_edges):
        mask = 0
        for i in combo:
            mask |= 1 << i
        if prune:
            key = canonical(mask)
            if key in seen:
                continue
            seen.add(key)
        t = _triangles_of_mask(mask, tri_masks)
        if best is None or t < best:
            best = t
            if best == 0 and goodman_bound(n, Q(m_edges, len(pairs))) <= 0:
                break
    return best


def razborov_density(rho: float) -> float:
    """Asymptotic minimal triangle density at edge density rho.

    With t = floor(1/(1-rho)), the density is
    (t-1)(t - 2 sqrt(t(t - rho(t+1)))) (t + sqrt(t(t - rho(t+1))))^2
    / (t^2 (t+1)^2).
    Matches Goodman's rho(2 rho - 1) exactly at rho = 1 - 1/t."""
    rho = float(rho)
    if not 0 <= rho < 1:
        raise InvalidInputError(f"need 0 <= rho < 1, got {rho}")
    t = math.floor(1 / (1 - rho))
    root = math.sqrt(t * (t - rho * (t + 1)))
    return (t - 1) * (t - 2 * root) * (t + root) ** 2 / (t**2 * (t + 1) ** 2)


def _bollobas_chord(rho: float) -> float:
    """Linear interpolation of rho(2 rho - 1) between the adjacent
    critical densities 1 - 1/t and 1 - 1/(t+1)."""
    t = math.floor(1 / (1 - rho))
    lo, hi = 1 - 1 / t, 1 - 1 / (t + 1)
    f_lo, f_hi = lo * (2 * lo - 1), hi * (2 * hi - 1)
    if hi == lo:
        return f_lo
    return f_lo + (f_hi - f_lo) * (rho - lo) / (hi - lo)


def gap_report(d: int) -> dict:
    """At the midpoint between critical densities 1-1/d and 1-1/(d+1),
    report how far the true density exceeds both Goodman's curve and its
    piecewise-linear upper envelope, and the ratio of that gap to 1/d^2
    (degree-d SOS cannot certify more than the envelope near t >= d)."""
    if d < 2:
        raise InvalidInputError(f"d must be >= 2, got {d}")
    t = d
    rho_exact = 1 - Q(2 * t + 1, 2 * t * (t + 1))
    rho = float(rho_exact)
    goodman = rho * (2 * rho - 1)
    chord = _bollobas_chord(rho)
    true_density = razborov_density(rho)
    gap = true_density - max(goodman, chord)
    return {
        "d": d,
        "rho": rat_str(rho_exact),
        "rho_float": rho,
        "goodman_density": goodman,
        "piecewise_density": chord,
        "true_density": true_density,
        "gap": gap,
        "gap_times_d_squared": gap * d * d,
    }
