"""Free graded nonsymmetric operad on generators m_n (degree n-2) and P_n (degree n-1).

Trees are nested tuples ``(Generator, children)`` with ``None`` for a leaf.
Signs follow the planar left-to-right Koszul rule: reading a tree in preorder
as a word of vertices, grafting ``b`` into leaf ``i`` of ``a`` moves ``b`` past
every vertex of ``a`` that comes after that leaf.  ``convention="rtl"`` uses
the vertices before the leaf instead; it is kept only to record that it fails.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from .algebra import DefectReport, MorphismSpec, check_associative, check_morphism, check_nijenhuis_operator

CONVENTIONS = ("ltr", "rtl")
DEFAULT_CONVENTION = "ltr"


class Generator(NamedTuple):
    kind: str
    arity: int

    @property
    def degree(self) -> int:
        return self.arity - 2 if self.kind == "m" else self.arity - 1

    def __str__(self):
        return f"{self.kind}{self.arity}"


Tree = Optional[Tuple[Generator, tuple]]


def gen(kind: str, n: int) -> Tree:
    if kind not in ("m", "P"):
        raise ValueError(f"unknown generator kind {kind!r}")
    if n < 1 or (kind == "m" and n < 2):
        raise ValueError(f"no generator {kind}{n}")
    return (Generator(kind, n), (None,) * n)


def arity(t: Tree) -> int:
    return 1 if t is None else sum(arity(c) for c in t[1])


def degree(t: Tree) -> int:
    return 0 if t is None else t[0].degree + sum(degree(c) for c in t[1])


def show(t: Tree) -> str:
    """Canonical preorder serialization, e.g. ``m2(P1(|),|)``."""
    if t is None:
        return "|"
    return f"{t[0]}(" + ",".join(show(c) for c in t[1]) + ")"


def _preorder(t: Tree, out: list) -> list:
    if t is None:
        out.append(None)
        return out
    out.append(t[0].degree)
    for c in t[1]:
        _preorder(c, out)
    return out


def _degrees_after_leaves(t: Tree) -> List[int]:
    """For each leaf (in order), the total degree of vertices after it in preorder."""
    seq = _preorder(t, [])
    out, acc = [], 0
    for item in reversed(seq):
        if item is None:
            out.append(acc)
        else:
            acc += item
    return out[::-1]


def _leaf_weights(t: Tree, convention: str) -> List[int]:
    after = _degrees_after_leaves(t)
    if convention == "ltr":
        return after
    total = degree(t)
    return [total - x for x in after]


def _graft_all(t: Tree, children: List[Tree]) -> Tree:
    it_ = iter(children)

    def rec(s):
        if s is None:
            return next(it_)
        return (s[0], tuple(rec(c) for c in s[1]))

    return rec(t)


def graft(a: Tree, i: int, b: Tree) -> Tree:
    n = arity(a)
    if not 1 <= i <= n:
        raise ValueError(f"slot {i} out of range for arity {n}")
    return _graft_all(a, [b if k == i - 1 else None for k in range(n)])


# -- linear combinations --------------------------------------------------------------------

class OperadElement:
    """Finite formal combination of tree monomials; zero coefficients never stored."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Dict[Tree, Fraction]] = None):
        self._terms: Dict[Tree, Fraction] = {}
        for t, c in (terms or {}).items():
            self._add(t, c)

    @classmethod
    def monomial(cls, t: Tree, coeff=1) -> "OperadElement":
        return cls({t: Fraction(coeff)})

    def _add(self, t: Tree, c) -> None:
        v = self._terms.get(t, Fraction(0)) + Fraction(c)
        if v:
            self._terms[t] = v
        else:
            self._terms.pop(t, None)

    def items(self) -> Iterator[Tuple[Tree, Fraction]]:
        return iter(sorted(self._terms.items(), key=lambda kv: show(kv[0])))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "OperadElement") -> "OperadElement":
        out = OperadElement(self._terms)
        for t, c in other._terms.items():
            out._add(t, c)
        return out

    def __neg__(self):
        return OperadElement({t: -c for t, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "OperadElement":
        return OperadElement({t: c * Fraction(s) for t, c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, OperadElement):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(tuple(self.canonical()))

    def canonical(self) -> List[Tuple[str, str]]:
        return [(show(t), str(c)) for t, c in self.items()]

    def coefficient(self, t: Tree) -> Fraction:
        return self._terms.get(t, Fraction(0))

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for t, c in self.items():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            parts.append(f"{sign} {'' if mag == 1 else str(mag) + '*'}{show(t)}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text


def compose(outer: Tree, i: int, inner: Tree, convention: str = DEFAULT_CONVENTION) -> OperadElement:
    """outer o_i inner as a single signed monomial."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    n = arity(outer)
    if not 1 <= i <= n:
        raise ValueError(f"slot {i} out of range for arity {n}")
    w = _leaf_weights(outer, convention)[i - 1]
    return OperadElement.monomial(graft(outer, i, inner), -1 if (degree(inner) * w) % 2 else 1)


def compose_elements(a: OperadElement, i: int, b: OperadElement,
                     convention: str = DEFAULT_CONVENTION) -> OperadElement:
    out = OperadElement()
    for ta, ca in a.items():
        for tb, cb in b.items():
            out = out + compose(ta, i, tb, convention).scale(ca * cb)
    return out


def _sign_of(e: OperadElement) -> int:
    (_, c), = e.items()
    return int(c)


# -- generator differentials ------------------------------------------------------------------

def d_m(n: int, convention: str = DEFAULT_CONVENTION) -> OperadElement:
    """sum_{j=2}^{n-1} sum_{i=1}^{n-j+1} (-1)^{i + j(n-i)} m_{n-j+1} o_i m_j."""
    if n < 2:
        raise ValueError("m_n needs n >= 2")
    out = OperadElement()
    for j in range(2, n):
        for i in range(1, n - j + 2):
            term = compose(gen("m", n - j + 1), i, gen("m", j), convention)
            out = out + term.scale((-1) ** ((i + j * (n - i)) % 2))
    return out


def compositions(n: int, p: int) -> Iterator[Tuple[int, ...]]:
    """Ordered p-tuples of positive integers summing to n."""
    if p == 1:
        if n >= 1:
            yield (n,)
        return
    for r in range(1, n - p + 2):
        for rest in compositions(n - r, p - 1):
            yield (r,) + rest


@dataclass(frozen=True)
class PTerm:
    """One index tuple of the P_n differential."""

    r: Tuple[int, ...]
    t: int
    i: Tuple[int, ...]
    k: Tuple[int, ...]

    @property
    def p(self) -> int:
        return len(self.r)

    def alpha_prime(self) -> int:
        p, r = self.p, self.r
        a = 1
        for q in range(1, self.t + 1):
            rq, iq = r[q - 1], self.i[q - 1]
            tail = sum(r[s - 1] for s in range(q + 1, p + 1))
            a += iq + tail * (rq - iq) - q * (rq - iq)
        for idx in range(self.t + 1, p + 1):
            a += (self.k[idx - 1 - self.t] - p) * (r[idx - 1] - 1)
        return a

    def beta(self) -> int:
        """Slot of the last inner graft: k_{p-1} + r_{t+1} + ... + r_{p-1} - (p-1-t)."""
        if self.t == self.p:
            raise ValueError("no inner grafts when t = p")
        return self.k[-1] + sum(self.r[self.t:self.p - 1]) - (self.p - 1 - self.t)


def p_terms(n: int) -> Iterator[PTerm]:
    for p in range(2, n + 1):
        for r in compositions(n, p):
            for t in range(p + 1):
                for iis in itertools.product(*[range(1, r[q] + 1) for q in range(t)]):
                    for ks in itertools.combinations(range(1, p + 1), p - t):
                        yield PTerm(r, t, tuple(iis), ks)


def p_term_tree(term: PTerm, convention: str = DEFAULT_CONVENTION) -> Tuple[int, Tree]:
    """Build the monomial of one index tuple, with the Koszul sign of its composition."""
    sign, cur, shift = 1, gen("m", term.p), 0
    for idx, k in enumerate(term.k):
        rr = term.r[term.t + idx]
        e = compose(cur, k + shift, gen("P", rr), convention)
        sign *= _sign_of(e)
        (cur, _), = e.items()
        shift += rr - 1
    for q in reversed(range(term.t)):
        e = compose(gen("P", term.r[q]), term.i[q], cur, convention)
        sign *= _sign_of(e)
        (cur, _), = e.items()
    return sign, cur


def d_P(n: int, convention: str = DEFAULT_CONVENTION) -> OperadElement:
    if n < 1:
        raise ValueError("P_n needs n >= 1")
    out = OperadElement()
    for term in p_terms(n):
        sign, tree = p_term_tree(term, convention)
        out = out + OperadElement.monomial(tree, sign * (-1) ** (term.alpha_prime() % 2))
    return out


def d_generator(g: Generator, convention: str = DEFAULT_CONVENTION) -> OperadElement:
    return d_m(g.arity, convention) if g.kind == "m" else d_P(g.arity, convention)


# -- derivation extension ---------------------------------------------------------------------

def _vertex_paths(t: Tree, path=()) -> Iterator[tuple]:
    if t is None:
        return
    yield path
    for ci, c in enumerate(t[1]):
        yield from _vertex_paths(c, path + (ci,))


def _subtree(t: Tree, path) -> Tree:
    for p in path:
        t = t[1][p]
    return t


def _replace(t: Tree, path, new: Tree) -> Tree:
    if not path:
        return new
    ch = list(t[1])
    ch[path[0]] = _replace(ch[path[0]], path[1:], new)
    return (t[0], tuple(ch))


def differentiate_tree(T: Tree, convention: str = DEFAULT_CONVENTION, cache=None) -> OperadElement:
    cache = {} if cache is None else cache
    out = OperadElement()
    prefix = 0
    for path in _vertex_paths(T):
        v = _subtree(T, path)
        g, children = v
        if g not in cache:
            cache[g] = d_generator(g, convention)
        for S, c in cache[g].items():
            weights = _leaf_weights(S, convention)
            exp = sum(degree(C) * w for C, w in zip(children, weights)) + prefix
            new = _replace(T, path, _graft_all(S, list(children)))
            out._add(new, c * (-1) ** (exp % 2))
        prefix += g.degree
    return out


def extend_differential(e: OperadElement, convention: str = DEFAULT_CONVENTION) -> OperadElement:
    """Derivation extension of the generator differential to tree monomials."""
    cache: dict = {}
    out = OperadElement()
    for t, c in e.items():
        out = out + differentiate_tree(t, convention, cache).scale(c)
    return out


def d_squared_check(kind: str, n: int, convention: str = DEFAULT_CONVENTION) -> OperadElement:
    first = d_m(n, convention) if kind == "m" else d_P(n, convention)
    return extend_differential(first, convention)


def choose_convention(max_m: int = 5, max_P: int = 3) -> dict:
    """Try the planar left-to-right rule first, fall back to right-to-left; record the outcome."""
    tried = {}
    for conv in CONVENTIONS:
        bad = [f"m{n}" for n in range(2, max_m + 1) if not d_squared_check("m", n, conv).is_zero()]
        bad += [f"P{n}" for n in range(1, max_P + 1) if not d_squared_check("P", n, conv).is_zero()]
        tried[conv] = bad
        if not bad:
            return {"convention": conv, "tried": tried}
    return {"convention": None, "tried": tried}


def nijenhuis_relation() -> OperadElement:
    """(mu o_1 P) o_2 P - (P o_1 mu) o_1 P - (P o_1 mu) o_2 P + (P o_1 P) o_1 mu with mu = m2, P = P1."""
    mu, P = gen("m", 2), gen("P", 1)
    terms = [
        (compose_elements(compose(mu, 1, P), 2, OperadElement.monomial(P)), 1),
        (compose_elements(compose(P, 1, mu), 1, OperadElement.monomial(P)), -1),
        (compose_elements(compose(P, 1, mu), 2, OperadElement.monomial(P)), -1),
        (compose_elements(compose(P, 1, P), 1, OperadElement.monomial(mu)), 1),
    ]
    out = OperadElement()
    for e, s in terms:
        out = out + e.scale(s)
    return out


# -- two-colored relations on concrete data -----------------------------------------------------

def _relabel(rep: DefectReport, src: DefectReport, label) -> None:
    for lab, idx, res in src.failures:
        rep.add(label(lab), idx, res)
    rep.total += src.total - len(src.failures)


def check_colored_relations(f: MorphismSpec) -> DefectReport:
    """Evaluate the defining relations of a Nijenhuis morphism as multilinear maps.

    Labels: ``mu o1 mu - mu o2 mu [A|B]``, ``nijenhuis [A|B]``,
    ``f o1 mu_A - (mu_B o1 f) o2 f`` and ``f o1 P_A - P_B o1 f``.
    """
    rep = DefectReport()
    for tag, alg in (("A", f.source), ("B", f.target)):
        _relabel(rep, check_associative(alg), lambda _: f"mu o1 mu - mu o2 mu [{tag}]")
        _relabel(rep, check_nijenhuis_operator(alg), lambda _: f"nijenhuis [{tag}]")
    names = {"multiplicativity": "f o1 mu_A - (mu_B o1 f) o2 f", "operator": "f o1 P_A - P_B o1 f"}
    _relabel(rep, check_morphism(f), names.__getitem__)
    return rep
