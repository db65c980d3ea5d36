"""Multilinear polynomials over indexed boolean variables.

Variables live on edges over the vertex set [1, n]: unary edges (i,) for
arity-1 problems and unordered binary edges (i, j), i < j, for arity-2
problems.  The boolean equations x_e^2 = x_e are baked into the monomial
representation: a monomial is a sorted tuple of distinct edges, so
exponent reduction happens at construction and never needs to be tracked
as an explicit constraint.  The empty tuple is the constant monomial 1.

Index degree is the number of distinct vertices a monomial touches, not
its multiplicative degree; it is the degree notion the whole hierarchy is
parameterized by.
"""

from __future__ import annotations

import itertools
import math
import re

from .caps import check_cap
from .errors import ArityError, InvalidInputError
from .rationals import Q, ZERO, rat, rat_str

Edge = tuple
Monomial = tuple

ONE_MONOMIAL: Monomial = ()


def unary(i: int) -> Edge:
    if i < 1:
        raise InvalidInputError(f"vertex index must be >= 1, got {i}")
    return (i,)


def edge(i: int, j: int) -> Edge:
    if i < 1 or j < 1:
        raise InvalidInputError(f"vertex indices must be >= 1, got ({i}, {j})")
    if i == j:
        raise InvalidInputError(f"self-loop edge ({i}, {j})")
    return (i, j) if i < j else (j, i)


def normalize_edge(e) -> Edge:
    e = tuple(e)
    if len(e) == 1:
        return unary(e[0])
    if len(e) == 2:
        return edge(e[0], e[1])
    raise InvalidInputError(f"edge must have 1 or 2 endpoints, got {e!r}")


def canonicalize_monomial(edges) -> Monomial:
    """Sorted, deduplicated edge tuple; idempotent."""
    out = tuple(sorted({normalize_edge(e) for e in edges}))
    if len({len(e) for e in out}) > 1:
        raise ArityError(f"mixed unary/binary variables in monomial {out}")
    return out


def monomial(*edges) -> Monomial:
    return canonicalize_monomial(edges)


def support(m: Monomial) -> frozenset:
    return frozenset(v for e in m for v in e)


def index_degree(m: Monomial) -> int:
    return len(support(m))


def index_degree_outside(m: Monomial, I) -> int:
    return len(support(m) - frozenset(I))


def merge_monomials(p: Monomial, q: Monomial) -> Monomial:
    """Product of two canonical monomials (multilinear reduction)."""
    if not p:
        return q
    if not q:
        return p
    return tuple(sorted(set(p) | set(q)))


def term_sort_key(m: Monomial):
    """Canonical term order: by index degree, then lex on the edge tuple."""
    return (index_degree(m), m)


def relabel_key(m: Monomial) -> Monomial:
    """Relabel vertices by first occurrence in the sorted edge list.

    Two monomials with the same key differ only by a vertex relabeling,
    so any S_n-symmetric functional takes the same value on both.  Used
    as a cache key; it need not be a full canonical form.
    """
    mapping: dict[int, int] = {}
    out = []
    for e in m:
        for v in e:
            if v not in mapping:
                mapping[v] = len(mapping) + 1
        out.append(normalize_edge(tuple(mapping[v] for v in e)))
    return tuple(sorted(out))


# --- permutations -----------------------------------------------------------
#
# A permutation of [1, n] is a dict {i: sigma(i)}; absent keys are fixed
# points, so a transposition is just a two-entry dict.

def transposition(a: int, b: int) -> dict:
    return {a: b, b: a}


def compose(sigma: dict, tau: dict) -> dict:
    """sigma after tau: i -> sigma(tau(i))."""
    keys = set(sigma) | set(tau)
    out = {i: sigma.get(tau.get(i, i), tau.get(i, i)) for i in keys}
    return {i: v for i, v in out.items() if v != i}


def invert(sigma: dict) -> dict:
    return {v: i for i, v in sigma.items() if v != i}


def permute_monomial(m: Monomial, sigma: dict) -> Monomial:
    return tuple(sorted(normalize_edge(tuple(sigma.get(v, v) for v in e)) for e in m))


# --- polynomials ------------------------------------------------------------

class Polynomial:
    """Sparse exact polynomial: mapping from canonical monomials to
    nonzero rationals."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            self.terms = {}
        else:
            self.terms = {m: Q(c) for m, c in terms.items() if c != 0}

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        out = cls.__new__(cls)
        out.terms = terms
        return out

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls._raw({})

    @classmethod
    def constant(cls, c) -> "Polynomial":
        c = Q(c)
        return cls._raw({ONE_MONOMIAL: c} if c != 0 else {})

    @classmethod
    def from_monomial(cls, m: Monomial, c=1) -> "Polynomial":
        c = Q(c)
        return cls._raw({m: c} if c != 0 else {})

    @classmethod
    def variable(cls, *endpoints) -> "Polynomial":
        return cls.from_monomial((normalize_edge(endpoints),))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if isinstance(other, (int, Q)):
            return self == Polynomial.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Q)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, ZERO) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else Polynomial.constant(-Q(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Q)):
            c = Q(other)
            if c == 0:
                return Polynomial.zero()
            return Polynomial._raw({m: cc * c for m, cc in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = merge_monomials(m1, m2)
                s = out.get(m, ZERO) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Polynomial._raw(out)

    __rmul__ = __mul__

    def index_degree(self) -> int:
        return max((index_degree(m) for m in self.terms), default=0)

    def coefficient(self, m: Monomial):
        return self.terms.get(m, ZERO)

    def apply_permutation(self, sigma: dict) -> "Polynomial":
        out: dict = {}
        for m, c in self.terms.items():
            mm = permute_monomial(m, sigma)
            out[mm] = out.get(mm, ZERO) + c
        return Polynomial._raw({m: c for m, c in out.items() if c != 0})

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: term_sort_key(kv[0]))

    def __repr__(self):
        return f"Polynomial({to_text(self)!r})"


def multiply(f: Polynomial, g: Polynomial) -> Polynomial:
    return f * g


def apply_permutation(f: Polynomial, sigma: dict) -> Polynomial:
    return f.apply_permutation(sigma)


def symmetrize_over(f: Polynomial, I, n: int, cap: int | None = None) -> Polynomial:
    """Orbit SUM (not average) of f over all permutations fixing I pointwise."""
    moving = sorted(set(range(1, n + 1)) - set(I))
    check_cap(math.factorial(len(moving)), cap, "symmetrize_over permutation count")
    out = Polynomial.zero()
    for images in itertools.permutations(moving):
        sigma = {a: b for a, b in zip(moving, images) if a != b}
        out = out + f.apply_permutation(sigma)
    return out


# --- text form --------------------------------------------------------------
#
# Canonical text: `x_i` for unary, `x_{i,j}` (i<j) for binary, terms as
# `coeff*mono` joined by ` + `, rationals as `p/q`.  The parser accepts
# exactly this shape plus optional leading minus signs and bare
# coefficients/monomials.

def monomial_text(m: Monomial) -> str:
    if not m:
        return "1"
    parts = []
    for e in m:
        if len(e) == 1:
            parts.append(f"x_{e[0]}")
        else:
            parts.append("x_{%d,%d}" % e)
    return "*".join(parts)


def to_text(f: Polynomial) -> str:
    if not f.terms:
        return "0"
    parts = []
    for m, c in f.sorted_terms():
        if m == ONE_MONOMIAL:
            parts.append(rat_str(c))
        elif c == 1:
            parts.append(monomial_text(m))
        else:
            parts.append(f"{rat_str(c)}*{monomial_text(m)}")
    return " + ".join(parts)


_VAR_RE = re.compile(r"x_(?:(\d+)|\{(\d+),(\d+)\})$")


def _parse_term(text: str) -> Polynomial:
    coeff = Q(1)
    edges = []
    for factor in text.split("*"):
        factor = factor.strip()
        if not factor:
            raise InvalidInputError(f"empty factor in term {text!r}")
        m = _VAR_RE.match(factor)
        if m:
            if m.group(1):
                edges.append((int(m.group(1)),))
            else:
                edges.append((int(m.group(2)), int(m.group(3))))
        else:
            try:
                coeff *= rat(factor)
            except ValueError as exc:
                raise InvalidInputError(f"cannot parse factor {factor!r}") from exc
    return Polynomial.from_monomial(canonicalize_monomial(edges), coeff)


def from_text(text: str) -> Polynomial:
    """Parse the canonical text form (also tolerates '-' separators)."""
    text = text.strip()
    if not text or text == "0":
        return Polynomial.zero()
    # normalize "a - b" to "a + -b" so we can split on +
    text = re.sub(r"(?<=[\d}])\s*-\s*", " + -", text)
    out = Polynomial.zero()
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            raise InvalidInputError(f"empty term in polynomial text {text!r}")
        neg = False
        while chunk.startswith("-"):
            neg = not neg
            chunk = chunk[1:].strip()
        term = _parse_term(chunk)
        out = out + (-term if neg else term)
    return out
