"""Story-derived pseudo-expectations and honest brute-force oracles.

Three problems are supported:

* knapsack: n boolean item variables x_i, one equation sum x_i = k, with
  k an arbitrary rational;
* the MOD 2 principle: edge variables x_{ij} on K_n with every vertex
  asking for exactly one incident matching edge (infeasible for odd n);
* the triangle problem: edge variables with a global edge-density
  equation and a triangle-count equation, parameterized by a group count
  k (group size n/k, also rational in general).

Each story is a symmetric conditional distribution an adversary commits
to; its induced linear functional on monomials is what this module
evaluates, in exact rational arithmetic.  At integer parameter points
the story degenerates to the uniform distribution over permutations of
one actual solution; `honest_expectation` enumerates that orbit directly
and is the independent oracle the pseudo-expectations are tested
against.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

from .caps import check_cap
from .errors import ArityError, HonestyError, InvalidInputError
from .rationals import Q, ZERO, ONE, rat
from .polynomials import (
    Monomial,
    Polynomial,
    index_degree,
    merge_monomials,
    relabel_key,
    support,
)


class ProblemKind(enum.Enum):
    KNAPSACK = "knapsack"
    MOD2 = "mod2"
    TRIANGLE = "triangle"

    @property
    def arity(self) -> int:
        return 1 if self is ProblemKind.KNAPSACK else 2


@dataclass(frozen=True)
class Params:
    """n plus the capacity / group-count parameter k (None for Mod2)."""

    n: int
    k: object = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError(f"n must be positive, got {self.n}")
        if self.k is not None:
            object.__setattr__(self, "k", rat(self.k))

    def group_size(self):
        """n/k, the triangle story's independent-set size."""
        return Q(self.n) / self.k

    def rho(self):
        """Edge density (n - n/k)/(n - 1) of the triangle story."""
        return (self.n - self.group_size()) / (self.n - 1)


def _require_arity(m: Monomial, arity: int) -> None:
    for e in m:
        if len(e) != arity:
            raise ArityError(
                f"edge {e} has arity {len(e)}, problem expects arity {arity}"
            )


def knapsack_pe_eval(params: Params, m: Monomial):
    """E-tilde of a knapsack monomial: the falling-factorial quotient
    prod_{j<s} (k-j)/(n-j) with s the index degree.  Exact for rational k."""
    _require_arity(m, 1)
    n, k = params.n, params.k
    s = index_degree(m)
    if s > n:
        raise InvalidInputError(f"monomial touches {s} indices, n = {n}")
    out = ONE
    for j in range(s):
        out *= (k - j) / Q(n - j)
    return out


def mod2_pe_eval(n: int, m: Monomial):
    """E-tilde of a MOD 2 monomial: 0 unless the edges form a partial
    matching, else 1/prod_{j=1}^{|E|} (n - 2j + 1)."""
    _require_arity(m, 2)
    if index_degree(m) > n:
        raise InvalidInputError(f"monomial touches {index_degree(m)} indices, n = {n}")
    seen = set()
    for e in m:
        if e[0] in seen or e[1] in seen:
            return ZERO
        seen.update(e)
    out = ONE
    for j in range(1, len(m) + 1):
        out /= Q(n - 2 * j + 1)
    return out


class BlockHistory:
    """Sizes of the independent-set blocks built so far in the triangle
    story, in order of first appearance."""

    __slots__ = ("sizes",)

    def __init__(self, sizes=()):
        sizes = tuple(int(s) for s in sizes)
        if any(s < 1 for s in sizes):
            raise InvalidInputError(f"block sizes must be >= 1, got {sizes}")
        self.sizes = sizes

    @property
    def queried(self) -> int:
        return sum(self.sizes)

    def __repr__(self):
        return f"BlockHistory({list(self.sizes)})"


def triangle_step_prob(params: Params, history, choice):
    """Conditional probability of the next vertex's placement.

    `choice` is ("join", b) with b the 1-based block index, or ("new",).
    Values may be negative beyond the story's good range; they still sum
    to 1 over all choices, which is what the certificate needs.
    """
    if not isinstance(history, BlockHistory):
        history = BlockHistory(history)
    n = params.n
    g = params.group_size()
    s = history.queried
    if s >= n:
        raise InvalidInputError(f"{s} vertices already queried, n = {n}")
    denom = Q(n - s)
    kind = choice[0]
    if kind == "join":
        b = choice[1]
        if not 1 <= b <= len(history.sizes):
            raise InvalidInputError(f"no block {b} in history {history}")
        return (g - history.sizes[b - 1]) / denom
    if kind == "new":
        t = len(history.sizes)
        return (n - t * g) / denom
    raise InvalidInputError(f"unknown choice {choice!r}")


def _triangle_partition_sum(n: int, g, vertices, adjacency):
    """Sum over set partitions of `vertices` of the story probability,
    restricted to partitions in which no two adjacent vertices share a
    block (adjacent pairs would zero the monomial).  The probability of
    a partition is the sequential product of step probabilities along
    the given vertex order; order-independence is tested, not assumed.
    """
    total = ZERO
    blocks: list[tuple[int, frozenset]] = []

    def place(idx, prob):
        nonlocal total, blocks
        if idx == len(vertices):
            total += prob
            return
        v = vertices[idx]
        denom = Q(n - idx)
        nbrs = adjacency[v]
        for bi, (size, members) in enumerate(blocks):
            if members & nbrs:
                continue
            p = (g - size) / denom
            if p == 0:
                continue
            saved = blocks[bi]
            blocks[bi] = (size + 1, members | {v})
            place(idx + 1, prob * p)
            blocks[bi] = saved
        p = (n - len(blocks) * g) / denom
        if p != 0:
            blocks.append((1, frozenset((v,))))
            place(idx + 1, prob * p)
            blocks.pop()

    place(0, ONE)
    return total


def triangle_pe_eval(params: Params, m: Monomial, order=None):
    """E-tilde of a triangle-story monomial.

    Sums, over set partitions of the monomial's support into independent
    sets, the probability the story assigns to the partition; a monomial
    evaluates to 1 exactly when every one of its edges crosses two
    blocks.  `order` overrides the vertex query order (the result must
    not depend on it)."""
    _require_arity(m, 2)
    n = params.n
    verts = sorted(support(m))
    if len(verts) > n:
        raise InvalidInputError(f"monomial touches {len(verts)} indices, n = {n}")
    if order is None:
        order = verts
    else:
        order = list(order)
        if sorted(order) != verts:
            raise InvalidInputError("order must enumerate the monomial support")
    adjacency = {v: set() for v in verts}
    for a, b in m:
        adjacency[a].add(b)
        adjacency[b].add(a)
    adjacency = {v: frozenset(s) for v, s in adjacency.items()}
    return _triangle_partition_sum(n, params.group_size(), order, adjacency)


class PseudoExpectation:
    """Linear functional induced by a story; evaluates monomials and, by
    term-wise extension, polynomials.  Values are cached per relabeling
    class since every story is S_n-symmetric."""

    def __init__(self, problem: ProblemKind, params: Params):
        self.problem = problem
        self.params = params
        self._cache: dict = {}
        n, k = params.n, params.k
        if problem is ProblemKind.MOD2:
            if k is not None:
                raise InvalidInputError("Mod2 takes no parameter k")
        elif k is None:
            raise InvalidInputError(f"{problem.value} requires parameter k")
        elif problem is ProblemKind.KNAPSACK:
            if not 0 <= k <= n:
                raise InvalidInputError(f"knapsack needs 0 <= k <= n, got k={k}")
        elif not 1 <= k <= n:
            raise InvalidInputError(f"triangle needs 1 <= k <= n, got k={k}")

    @property
    def arity(self) -> int:
        return self.problem.arity

    def monomial_value(self, m: Monomial):
        key = relabel_key(m)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.problem is ProblemKind.KNAPSACK:
            value = knapsack_pe_eval(self.params, key)
        elif self.problem is ProblemKind.MOD2:
            value = mod2_pe_eval(self.params.n, key)
        else:
            value = triangle_pe_eval(self.params, key)
        self._cache[key] = value
        return value

    def __call__(self, f):
        if isinstance(f, tuple):
            return self.monomial_value(f)
        return pe_eval(self, f)

    def product_value(self, p: Monomial, q: Monomial):
        return self.monomial_value(merge_monomials(p, q))


def pseudo_expectation(problem: ProblemKind, params: Params) -> PseudoExpectation:
    return PseudoExpectation(problem, params)


def pe_eval(pe: PseudoExpectation, f: Polynomial):
    """Linear extension of the monomial evaluator."""
    total = ZERO
    for m, c in f.terms.items():
        total += c * pe.monomial_value(m)
    return total


# --- problem equations ------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    name: str
    polynomial: Polynomial
    index_degree: int


@dataclass(frozen=True)
class ConstraintFamily:
    """Generating equations of a problem, closed under vertex relabeling.

    The boolean equations x_e^2 - x_e = 0 are not listed: the multilinear
    monomial representation reduces x_e^2 to x_e at construction, so
    E-tilde[f * (x_e^2 - x_e)] is the zero polynomial's value for every
    f.  They form a zero family by representation and the test suite
    pins that down.
    """

    problem: ProblemKind
    params: Params
    constraints: tuple


def problem_equations(problem: ProblemKind, params: Params) -> ConstraintFamily:
    from .goodman import goodman_bound  # triangle count target

    n = params.n
    if problem is ProblemKind.KNAPSACK:
        f = Polynomial({(( (i,), )): ONE for i in range(1, n + 1)})
        f = f - Polynomial.constant(params.k)
        constraints = (Constraint("sum-equals-k", f, 1),)
    elif problem is ProblemKind.MOD2:
        constraints = tuple(
            Constraint(
                f"degree-at-{i}",
                Polynomial({((min(i, j), max(i, j)),): ONE for j in range(1, n + 1) if j != i})
                - 1,
                2,
            )
            for i in range(1, n + 1)
        )
    elif problem is ProblemKind.TRIANGLE:
        rho = params.rho()
        edges = Polynomial(
            {((i, j),): ONE for i, j in itertools.combinations(range(1, n + 1), 2)}
        )
        edge_target = rho * Q(math.comb(n, 2))
        triangles = Polynomial(
            {
                tuple(sorted([(i, j), (i, l), (j, l)])): ONE
                for i, j, l in itertools.combinations(range(1, n + 1), 3)
            }
        )
        tri_target = goodman_bound(n, rho)
        constraints = (
            Constraint("edge-density", edges - edge_target, 2),
            Constraint("triangle-count", triangles - tri_target, 3),
        )
    else:  # pragma: no cover
        raise InvalidInputError(f"unknown problem {problem!r}")
    return ConstraintFamily(problem, params, constraints)


# --- honest oracles ---------------------------------------------------------

def _perfect_matchings(vertices):
    if not vertices:
        yield ()
        return
    v = vertices[0]
    for i in range(1, len(vertices)):
        u = vertices[i]
        rest = vertices[1:i] + vertices[i + 1:]
        for rem in _perfect_matchings(rest):
            yield ((v, u),) + rem


def _balanced_partitions(vertices, g):
    if not vertices:
        yield ()
        return
    v = vertices[0]
    for combo in itertools.combinations(vertices[1:], g - 1):
        taken = set(combo)
        rest = tuple(u for u in vertices[1:] if u not in taken)
        for rem in _balanced_partitions(rest, g):
            yield ((v,) + combo,) + rem


def is_honest_point(problem: ProblemKind, params: Params) -> bool:
    n, k = params.n, params.k
    if problem is ProblemKind.KNAPSACK:
        return k.denominator == 1 and 0 <= k <= n
    if problem is ProblemKind.MOD2:
        return n % 2 == 0
    return k is not None and k.denominator == 1 and k >= 1 and n % int(k) == 0


def honest_expectation(problem: ProblemKind, params: Params, m: Monomial, cap=None):
    """Average of the monomial over the full solution orbit, enumerated.

    Knapsack: all k-subsets; Mod2: all perfect matchings of K_n;
    triangle: all partitions of [1,n] into k independent sets of size
    n/k (the monomial sees the complete multipartite graph)."""
    n = params.n
    if not is_honest_point(problem, params):
        raise HonestyError(f"{problem.value} with {params} is not an honest point")
    if problem is ProblemKind.KNAPSACK:
        _require_arity(m, 1)
        k = int(params.k)
        check_cap(math.comb(n, k), cap, "knapsack orbit")
        need = support(m)
        hits = sum(
            1 for sub in itertools.combinations(range(1, n + 1), k) if need <= set(sub)
        )
        return Q(hits, math.comb(n, k))
    if problem is ProblemKind.MOD2:
        _require_arity(m, 2)
        count = 1
        for odd in range(1, n, 2):
            count *= odd
        check_cap(count, cap, "perfect matching orbit")
        need = set(m)
        hits = total = 0
        for matching in _perfect_matchings(tuple(range(1, n + 1))):
            total += 1
            if need <= set(matching):
                hits += 1
        return Q(hits, total)
    _require_arity(m, 2)
    k = int(params.k)
    g = n // k
    orbit = math.factorial(n) // (math.factorial(g) ** k * math.factorial(k))
    check_cap(orbit, cap, "balanced partition orbit")
    hits = total = 0
    for blocks in _balanced_partitions(tuple(range(1, n + 1)), g):
        total += 1
        owner = {v: bi for bi, block in enumerate(blocks) for v in block}
        if all(owner[a] != owner[b] for a, b in m):
            hits += 1
    return Q(hits, total)
