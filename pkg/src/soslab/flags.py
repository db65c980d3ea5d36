"""Flag polynomials and the symmetry-reduced decomposition of E[g^2].

A flag is a pattern multigraph with an ordered tuple of labeled vertices
(the asymmetry level r) and some free vertices, none isolated.  p_{F,L}
sums the pattern over all injective placements of the free vertices with
the labels pinned to L; phi_{F,L} is the linear combination
sum_{L'} c(L,L') p_{F,L'} whose single-coordinate orbit sums vanish.
Those vanishing sums are what let E[g^2] split into blocks: writing
g = sum b_{F,L} phi_{F,L} with zero-sum coefficients, E[g^2] becomes a
weighted sum of E[h^2] over inner polynomials h indexed by (r, A, L),
each symmetric under permutations of the unlabeled indices.

The decomposition of g into phi's is computed here by exact linear
algebra: solve the (underdetermined) linear system for the coefficients,
then project onto the zero-sum subspace along the shift directions,
which lie in the kernel of the expansion map.  The projection is the
exact realization of the shifting argument that proves the zero-sum
coefficients exist.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .caps import check_cap
from .errors import InvalidInputError
from .rationals import Q, ZERO, ONE, falling, rat_str
from .polynomials import (
    Monomial,
    Polynomial,
    index_degree,
    normalize_edge,
    term_sort_key,
    to_text,
    transposition,
)

# --- flags ------------------------------------------------------------------

@dataclass(frozen=True)
class Flag:
    """Pattern on vertices 0..labeled+free-1; vertices 0..labeled-1 are
    the labeled ones, in label order.  Stored in canonical form: the free
    vertices are renumbered to minimize the sorted edge tuple."""

    labeled: int
    free: int
    edges: tuple

    @property
    def vertices(self) -> int:
        return self.labeled + self.free

    def describe(self) -> str:
        names = [f"v{i + 1}" for i in range(self.labeled)] + [
            f"f{i + 1}" for i in range(self.free)
        ]
        edges = ",".join(
            "(" + "-".join(names[v] for v in e) + ")" for e in self.edges
        )
        return f"r={self.labeled} free={self.free} edges=[{edges}]"


def make_flag(labeled: int, free: int, edges) -> Flag:
    """Validate and canonicalize a flag.  Every vertex must appear in
    some edge (no isolated vertices)."""
    v = labeled + free
    edges = tuple(sorted({tuple(sorted(e)) for e in map(tuple, edges)}))
    touched = {x for e in edges for x in e}
    for e in edges:
        if len(e) == 2 and e[0] == e[1]:
            raise InvalidInputError(f"self-loop {e} in flag")
        if len(e) not in (1, 2):
            raise InvalidInputError(f"edge {e} must have 1 or 2 endpoints")
        if any(not 0 <= x < v for x in e):
            raise InvalidInputError(f"edge {e} out of range for {v} vertices")
    if touched != set(range(v)):
        raise InvalidInputError("flag has an isolated vertex")
    best = None
    frees = list(range(labeled, v))
    for perm in itertools.permutations(frees):
        mapping = {old: new for old, new in zip(frees, perm)}
        relabeled = tuple(
            sorted(tuple(sorted(mapping.get(x, x) for x in e)) for e in edges)
        )
        if best is None or relabeled < best:
            best = relabeled
    return Flag(labeled, free, best)


def enumerate_flags(arity: int, max_vertices: int) -> list:
    """All canonical flags with at most max_vertices vertices whose edge
    kind matches the problem arity.  Includes the empty flag (constants)."""
    out = {Flag(0, 0, ())}
    for v in range(1, max_vertices + 1):
        if arity == 1:
            patterns = [tuple((a,) for a in range(v))]
        else:
            if v == 1:
                continue
            pairs = list(itertools.combinations(range(v), 2))
            patterns = []
            for rr in range(1, len(pairs) + 1):
                for chosen in itertools.combinations(pairs, rr):
                    if {x for e in chosen for x in e} == set(range(v)):
                        patterns.append(chosen)
        for pattern in patterns:
            for r in range(v + 1):
                for labels in itertools.permutations(range(v), r):
                    remap = {old: slot for slot, old in enumerate(labels)}
                    nxt = r
                    for old in range(v):
                        if old not in remap:
                            remap[old] = nxt
                            nxt += 1
                    edges = [tuple(remap[x] for x in e) for e in pattern]
                    out.add(make_flag(r, v - r, edges))
    return sorted(out, key=lambda f: (f.vertices, f.labeled, f.edges))


def expand_p(F: Flag, L, n: int) -> Polynomial:
    """Sum over injective placements of the free vertices into
    [1,n] \\ I_L, labels pinned to L; placements landing on the same
    multilinear monomial accumulate."""
    L = tuple(L)
    if len(L) != F.labeled:
        raise InvalidInputError(f"flag wants {F.labeled} labels, got {len(L)}")
    if len(set(L)) != len(L):
        raise InvalidInputError(f"label tuple {L} has repeats")
    if F.vertices > n:
        raise InvalidInputError(f"flag has {F.vertices} vertices, n = {n}")
    if any(not 1 <= l <= n for l in L):
        raise InvalidInputError(f"labels {L} out of [1,{n}]")
    avail = [a for a in range(1, n + 1) if a not in L]
    terms: dict = {}
    for placement in itertools.permutations(avail, F.free):
        image = list(L) + list(placement)
        m = tuple(
            sorted({normalize_edge(tuple(image[x] for x in e)) for e in F.edges})
        )
        terms[m] = terms.get(m, ZERO) + 1
    return Polynomial(terms)


def coeff_c(L, Lp, n: int, r: int | None = None):
    """0 if some entry of L' collides with a DIFFERENT position of L;
    otherwise (-1)^z / (n-r)(n-r-1)...(n-r-z+1) with z the number of
    changed positions."""
    L, Lp = tuple(L), tuple(Lp)
    if len(L) != len(Lp):
        raise InvalidInputError("label tuples differ in length")
    if r is None:
        r = len(L)
    if len(set(L)) != len(L) or len(set(Lp)) != len(Lp):
        raise InvalidInputError("label tuples must have distinct entries")
    pos = {l: i for i, l in enumerate(L)}
    z = 0
    for j, lp in enumerate(Lp):
        if lp == L[j]:
            continue
        if lp in pos:
            return ZERO
        z += 1
    denom = falling(n - r, z)
    return Q(-1) ** z / denom


def expand_phi(F: Flag, L, n: int, cap=None, _p_cache=None) -> Polynomial:
    """phi_{F,L} = sum_{L'} c(L,L') p_{F,L'}, enumerating only the L'
    with nonzero coefficient: each changed position takes a fresh value
    outside I_L."""
    L = tuple(L)
    r = F.labeled
    if len(L) != r:
        raise InvalidInputError(f"flag wants {r} labels, got {len(L)}")
    avail = [a for a in range(1, n + 1) if a not in L]
    predicted = sum(
        math.comb(r, z) * math.perm(len(avail), z) for z in range(r + 1)
    ) * math.perm(len(avail), F.free)
    check_cap(predicted, cap, "phi expansion")
    out = Polynomial.zero()
    for z in range(r + 1):
        coeff = Q(-1) ** z / falling(n - r, z)
        for positions in itertools.combinations(range(r), z):
            for values in itertools.permutations(avail, z):
                Lp = list(L)
                for pos, val in zip(positions, values):
                    Lp[pos] = val
                Lp = tuple(Lp)
                if _p_cache is not None:
                    p = _p_cache.get((F, Lp))
                    if p is None:
                        p = expand_p(F, Lp, n)
                        _p_cache[(F, Lp)] = p
                else:
                    p = expand_p(F, Lp, n)
                out = out + coeff * p
    return out


def matrix_M(n: int, r: int, cap=None) -> list:
    """Matrix indexed by S_r with M[pi][pi'] = sum over A containing the
    positions where pi and pi' differ of 1/(n-r)...(n-r-|A|+1).
    Satisfies M >= Id."""
    if 2 * r > n:
        raise InvalidInputError(f"need r <= n/2, got r={r}, n={n}")
    perms = list(itertools.permutations(range(r)))
    check_cap(len(perms) ** 2 * 2**r, cap, "matrix M")
    size = len(perms)
    M = [[ZERO] * size for _ in range(size)]
    positions = list(range(r))
    for a, pa in enumerate(perms):
        for b in range(a, size):
            pb = perms[b]
            diff = [i for i in positions if pa[i] != pb[i]]
            rest = [i for i in positions if pa[i] == pb[i]]
            value = ZERO
            for extra in range(len(rest) + 1):
                count = math.comb(len(rest), extra)
                value += count / falling(n - r, len(diff) + extra)
            M[a][b] = value
            M[b][a] = value
    return M


# --- exact linear algebra helpers ------------------------------------------

def _solve_any(rows, rhs):
    """One exact solution of rows * x = rhs (free variables set to 0),
    or None if inconsistent.  rows: list of lists of Q."""
    m = len(rows)
    cols = len(rows[0]) if m else 0
    A = [list(row) + [rhs[i]] for i, row in enumerate(rows)]
    pivots = []
    row = 0
    for col in range(cols):
        sel = None
        for i in range(row, m):
            if A[i][col] != 0:
                sel = i
                break
        if sel is None:
            continue
        A[row], A[sel] = A[sel], A[row]
        inv = ONE / A[row][col]
        A[row] = [x * inv for x in A[row]]
        for i in range(m):
            if i != row and A[i][col] != 0:
                factor = A[i][col]
                A[i] = [x - factor * y for x, y in zip(A[i], A[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for i in range(row, m):
        if A[i][cols] != 0:
            return None
    x = [ZERO] * cols
    for i, col in enumerate(pivots):
        x[col] = A[i][cols]
    return x


# --- decomposition into phi's ----------------------------------------------

@dataclass
class FlagCombination:
    """g = sum b_{F,L} phi_{F,L} with zero-sum coefficients."""

    n: int
    arity: int
    coefficients: dict  # (Flag, L) -> Q, no zeros
    phis: dict = field(repr=False, default_factory=dict)  # (Flag, L) -> Polynomial

    def expand(self) -> Polynomial:
        out = Polynomial.zero()
        for key, b in self.coefficients.items():
            out = out + b * self.phis[key]
        return out

    def zero_sums_hold(self) -> bool:
        """For every flag, position, and fixed values of the other
        positions, the coefficients over the free coordinate sum to 0."""
        by_flag: dict = {}
        for (F, L), b in self.coefficients.items():
            by_flag.setdefault(F, {})[L] = b
        for F, table in by_flag.items():
            r = F.labeled
            for i in range(r):
                groups: dict = {}
                for L, b in table.items():
                    ctx = L[:i] + L[i + 1:]
                    groups[ctx] = groups.get(ctx, ZERO) + b
                if any(v != 0 for v in groups.values()):
                    return False
        return True


def _infer_arity(g: Polynomial, arity=None) -> int:
    kinds = {len(e) for m in g.terms for e in m}
    if len(kinds) > 1:
        raise InvalidInputError("polynomial mixes unary and binary edges")
    if kinds:
        return kinds.pop()
    if arity is None:
        return 1
    return arity


def decompose_to_phi(g: Polynomial, n: int, arity=None, cap=None) -> FlagCombination:
    """Express g exactly as sum b_{F,L} phi_{F,L} over flags with at
    most indexdeg(g) vertices, with the zero-sum property enforced by
    projecting the solution along the shift directions (which expand to
    zero, so the expansion is untouched)."""
    D = g.index_degree()
    if 2 * D > n:
        raise InvalidInputError(f"index degree {D} exceeds n/2 = {n}/2")
    arity = _infer_arity(g, arity)
    flags = enumerate_flags(arity, D)
    unknowns = []  # (Flag, L)
    for F in flags:
        count = math.perm(n, F.labeled)
        check_cap(len(unknowns) + count, cap, "flag decomposition unknowns")
        for L in itertools.permutations(range(1, n + 1), F.labeled):
            unknowns.append((F, L))

    p_cache: dict = {}
    phis = {
        key: expand_phi(key[0], key[1], n, cap, _p_cache=p_cache) for key in unknowns
    }

    monomials = sorted(
        {m for phi in phis.values() for m in phi.terms} | set(g.terms),
        key=term_sort_key,
    )
    row_of = {m: i for i, m in enumerate(monomials)}
    rows = [[ZERO] * len(unknowns) for _ in monomials]
    for col, key in enumerate(unknowns):
        for m, c in phis[key].terms.items():
            rows[row_of[m]][col] = c
    rhs = [g.coefficient(m) for m in monomials]
    b0 = _solve_any(rows, rhs)
    if b0 is None:
        raise AssertionError("phi expansion does not span the polynomial")

    # zero-sum projection, flag by flag
    col_of = {key: i for i, key in enumerate(unknowns)}
    b = list(b0)
    for F in flags:
        r = F.labeled
        if r == 0:
            continue
        shifts = []  # each: list of unknown-column indices with entry 1
        for i in range(r):
            others = [j for j in range(r) if j != i]
            for ctx in itertools.permutations(range(1, n + 1), r - 1):
                members = []
                for a in range(1, n + 1):
                    if a in ctx:
                        continue
                    L = [None] * r
                    for j, val in zip(others, ctx):
                        L[j] = val
                    L[i] = a
                    members.append(col_of[(F, tuple(L))])
                shifts.append(members)
        smalls = [sum(b[c] for c in s) for s in shifts]
        if all(v == 0 for v in smalls):
            continue
        gram = [
            [Q(len(set(sa) & set(sb))) for sb in shifts] for sa in shifts
        ]
        y = _solve_any(gram, smalls)
        if y is None:
            raise AssertionError("zero-sum projection system inconsistent")
        for ya, s in zip(y, shifts):
            if ya != 0:
                for c in s:
                    b[c] -= ya
    coefficients = {key: b[i] for i, key in enumerate(unknowns) if b[i] != 0}
    combo = FlagCombination(n=n, arity=arity, coefficients=coefficients, phis=phis)
    if not combo.zero_sums_hold():
        raise AssertionError("zero-sum projection failed")
    return combo


# --- the square decomposition -----------------------------------------------

@dataclass
class SquareTerm:
    I: frozenset
    r: int
    A: tuple  # positions allowed to permute
    labels: tuple  # the representative L
    weight: object
    inner: Polynomial
    value: object = None  # E-tilde[inner^2], filled by decompose_square

    def to_json(self) -> dict:
        return {
            "I": sorted(self.I),
            "r": self.r,
            "A": [a + 1 for a in self.A],
            "labels": list(self.labels),
            "weight": rat_str(self.weight),
            "inner": to_text(self.inner),
            "value": rat_str(self.value) if self.value is not None else None,
        }


@dataclass
class SquareDecomposition:
    g: Polynomial
    n: int
    combination: FlagCombination
    terms: list
    total: object  # sum of weight * E-tilde[inner^2]
    direct: object  # E-tilde[g^2] computed by plain squaring

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "g": to_text(self.g),
            "terms": [t.to_json() for t in self.terms],
            "total": rat_str(self.total),
            "direct": rat_str(self.direct),
            "match": self.total == self.direct,
        }


def _square_value(pe, poly: Polynomial, gram: dict):
    total = ZERO
    items = list(poly.terms.items())
    for a, (m1, c1) in enumerate(items):
        for m2, c2 in items[a:]:
            key = (m1, m2) if m1 <= m2 else (m2, m1)
            v = gram.get(key)
            if v is None:
                v = pe.product_value(m1, m2)
                gram[key] = v
            contrib = c1 * c2 * v
            total += contrib if m1 == m2 else 2 * contrib
    return total


def decompose_square(pe, g: Polynomial, n: int, cap=None) -> SquareDecomposition:
    """E[g^2] as a weighted sum of E[h^2] over symmetry-reduced inner
    polynomials h, one per (r, A, representative L):

        h = sum_F sum_{pi0} (sum_pi b_{F,L^pi}) (sum_pi phi_{F,L^pi})

    where pi0 ranges over injections from the positions outside A into
    [0,r), pi ranges over the permutations extending pi0 (the left coset
    of the subgroup permuting only the A positions), and the weight is
    1/(|A|! (n-r)...(n-r-|A|+1))."""
    combo = decompose_to_phi(g, n, arity=pe.arity, cap=cap)
    by_r: dict = {}
    for (F, L), b in combo.coefficients.items():
        by_r.setdefault(F.labeled, {}).setdefault(F, {})[L] = b
    gram: dict = {}
    terms = []
    total = ZERO
    for r, flag_tables in sorted(by_r.items()):
        for A in itertools.chain.from_iterable(
            itertools.combinations(range(r), z) for z in range(r + 1)
        ):
            Aset = set(A)
            notA = [i for i in range(r) if i not in Aset]
            weight = ONE / (math.factorial(len(A)) * falling(n - r, len(A)))
            for L in itertools.combinations(range(1, n + 1), r):
                inner = Polynomial.zero()
                for pi0 in itertools.permutations(range(r), len(notA)):
                    base = dict(zip(notA, pi0))
                    rest = [p for p in range(r) if p not in base.values()]
                    for F, table in flag_tables.items():
                        B = ZERO
                        Phi = Polynomial.zero()
                        for piA in itertools.permutations(rest):
                            pi = dict(base)
                            pi.update(zip(A, piA))
                            Lpi = tuple(L[pi[i]] for i in range(r))
                            bb = table.get(Lpi)
                            if bb is not None:
                                B += bb
                            Phi = Phi + combo.phis[(F, Lpi)]
                        if B != 0 and Phi:
                            inner = inner + B * Phi
                if not inner:
                    continue
                value = _square_value(pe, inner, gram)
                total += weight * value
                terms.append(
                    SquareTerm(
                        I=frozenset(L),
                        r=r,
                        A=A,
                        labels=L,
                        weight=weight,
                        inner=inner,
                        value=value,
                    )
                )
    direct = _square_value(pe, g, gram)
    return SquareDecomposition(
        g=g, n=n, combination=combo, terms=terms, total=total, direct=direct
    )


# --- the three bullet checks ------------------------------------------------

def square_term_checks(term: SquareTerm, g_index_degree: int, n: int) -> dict:
    """The three properties each inner polynomial must have: symmetry
    under permutations of [1,n] \\ I, index degree at most indexdeg(g),
    and vanishing orbit sums over S_{[1,n] \\ (I \\ {i})} for each i in I.

    Symmetry is checked on transpositions of adjacent moving indices
    (they generate the group).  The orbit sum is checked via coset
    representatives: once h is invariant under H = S_{[1,n] \\ I}, the
    full sum over G = S_{[1,n] \\ (I \\ {i})} is |H| times the sum of
    (i a)(h) over a in the moving set plus the identity, since the
    transpositions (i a) are left-coset representatives of H in G."""
    h = term.inner
    I = term.I
    moving = sorted(set(range(1, n + 1)) - I)
    symmetric = all(
        h.apply_permutation(transposition(a, b)) == h
        for a, b in zip(moving, moving[1:])
    )
    degree_ok = h.index_degree() <= g_index_degree
    orbit_ok = True
    if symmetric:
        for i in sorted(I):
            acc = h
            for a in moving:
                acc = acc + h.apply_permutation(transposition(i, a))
            if acc:
                orbit_ok = False
                break
    else:
        orbit_ok = False
    return {"symmetric": symmetric, "index_degree": degree_ok, "orbit_sum": orbit_ok}


# --- direct statements of the phi properties --------------------------------

def verify_phi_zero_sum(F: Flag, L, I, n: int, cap=None) -> bool:
    """Full expansion of sum over sigma in S_{[1,n] \\ I} of
    phi_{F,sigma(L)}, compared to the zero polynomial.  I must be a
    proper subset of I_L."""
    L = tuple(L)
    I = set(I)
    if not I < set(L):
        raise InvalidInputError("I must be a proper subset of I_L")
    moving = sorted(set(range(1, n + 1)) - I)
    check_cap(math.factorial(len(moving)), cap, "phi orbit sum")
    p_cache: dict = {}
    total = Polynomial.zero()
    for images in itertools.permutations(moving):
        sigma = dict(zip(moving, images))
        sL = tuple(sigma.get(l, l) for l in L)
        total = total + expand_phi(F, sL, n, cap, _p_cache=p_cache)
    return not total


def verify_orthogonality(pe, F1: Flag, L1, F2: Flag, L2, n: int, cap=None):
    """E-tilde[phi_{F1,L1} * phi_{F2,L2}] = 0 when the asymmetry levels
    differ; returns None ("not applicable") when they are equal."""
    if F1.labeled == F2.labeled:
        return None
    phi1 = expand_phi(F1, L1, n, cap)
    phi2 = expand_phi(F2, L2, n, cap)
    return pe(phi1 * phi2) == 0
