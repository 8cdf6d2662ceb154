"""Multilinear nonassociative monomials and alternated evaluation trees.

A bracketing is a binary tree whose leaves are ``None`` and whose internal
nodes are 2-tuples ``(left, right)``. A monomial pairs a bracketing with a
labeling: ``labeling[p]`` is the (0-based) variable sitting at leaf ``p``,
leaves counted left to right.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import comb
from typing import Iterator, Sequence, Union

from .algebra import AlgebraSpec, Element, build_W, multiply

LEAF = None


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def enumerate_bracketings(n: int) -> tuple:
    """All binary trees with ``n`` leaves, ordered by size of the left subtree."""
    if n < 1:
        raise ValueError("need at least one leaf")
    if n == 1:
        return (LEAF,)
    out = []
    for a in range(1, n):
        for left in enumerate_bracketings(a):
            for right in enumerate_bracketings(n - a):
                out.append((left, right))
    return tuple(out)


def leaf_count(b) -> int:
    return 1 if b is LEAF else leaf_count(b[0]) + leaf_count(b[1])


def left_normed(n: int):
    b = LEAF
    for _ in range(n - 1):
        b = (b, LEAF)
    return b


@dataclass(frozen=True)
class Monomial:
    bracketing: object
    labeling: tuple

    def __post_init__(self):
        n = leaf_count(self.bracketing)
        if sorted(self.labeling) != list(range(n)):
            raise ValueError("labeling must be a bijection onto the leaves")

    @property
    def degree(self) -> int:
        return len(self.labeling)

    def act(self, sigma: Sequence[int]) -> "Monomial":
        """Substitute x_i -> x_sigma(i)."""
        return Monomial(self.bracketing, tuple(sigma[v] for v in self.labeling))

    def __str__(self):
        return format_monomial(self)


def enumerate_monomials(n: int) -> list:
    """Bracketings in recursive order, labelings lexicographic within each."""
    perms = list(permutations(range(n)))
    return [Monomial(b, p) for b in enumerate_bracketings(n) for p in perms]


def format_monomial(m: Monomial) -> str:
    it = iter(m.labeling)

    def rec(b):
        if b is LEAF:
            return f"x{next(it) + 1}"
        return f"({rec(b[0])}{rec(b[1])})"

    s = rec(m.bracketing)
    return s[1:-1] if m.bracketing is not LEAF else s


_TOKEN = re.compile(r"\s*(\(|\)|x\d+)")


def parse_monomial(text: str) -> Monomial:
    """Parse explicit-parenthesis text; juxtaposition is left-normed, abc = (ab)c."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse monomial at {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    labels = []

    def seq(i):
        items = []
        while i < len(tokens) and tokens[i] != ")":
            if tokens[i] == "(":
                sub, i = seq(i + 1)
                if i >= len(tokens) or tokens[i] != ")":
                    raise ValueError("unbalanced parentheses")
                i += 1
                items.append(sub)
            else:
                labels.append(int(tokens[i][1:]) - 1)
                items.append(LEAF)
                i += 1
        if not items:
            raise ValueError("empty product")
        acc = items[0]
        for it in items[1:]:
            acc = (acc, it)
        return acc, i

    b, i = seq(0)
    if i != len(tokens):
        raise ValueError("unbalanced parentheses")
    return Monomial(b, tuple(labels))


def _eval_bracketing(A: AlgebraSpec, b, leaves: Iterator[Element]) -> Element:
    if b is LEAF:
        return next(leaves)
    left = _eval_bracketing(A, b[0], leaves)
    right = _eval_bracketing(A, b[1], leaves)
    return multiply(A, left, right)


def evaluate_monomial(A: AlgebraSpec, m: Monomial, assignment: Sequence[Element]) -> Element:
    if len(assignment) != m.degree:
        raise ValueError(f"monomial has degree {m.degree}, got {len(assignment)} values")
    return _eval_bracketing(A, m.bracketing, iter(assignment[v] for v in m.labeling))


# --- multilinear polynomials -------------------------------------------------

class MultilinearPoly(dict):
    """Sparse map Monomial -> coefficient; zero coefficients are never stored."""

    def add_term(self, m: Monomial, c) -> None:
        c = self.get(m, 0) + c
        if c:
            self[m] = c
        else:
            self.pop(m, None)

    def __add__(self, other):
        out = MultilinearPoly(self)
        for m, c in other.items():
            out.add_term(m, c)
        return out

    def scale(self, c) -> "MultilinearPoly":
        out = MultilinearPoly()
        if c:
            for m, a in self.items():
                out[m] = a * c
        return out

    def act(self, sigma) -> "MultilinearPoly":
        out = MultilinearPoly()
        for m, c in self.items():
            out.add_term(m.act(sigma), c)
        return out

    def evaluate(self, A: AlgebraSpec, assignment) -> Element:
        acc = Element.zero(A.dim)
        for m, c in self.items():
            acc = acc + evaluate_monomial(A, m, assignment).scale(c)
        return acc

    @classmethod
    def from_monomial(cls, m: Monomial, c=1):
        return cls({m: Fraction(c)})


# --- tableaux and Young symmetrizers -----------------------------------------

@dataclass(frozen=True)
class Tableau:
    """Young tableau; ``rows`` holds the filling with entries 0..n-1."""

    rows: tuple

    def __post_init__(self):
        lens = [len(r) for r in self.rows]
        if any(a < b for a, b in zip(lens, lens[1:])) or any(l == 0 for l in lens):
            raise ValueError("row lengths must be positive and weakly decreasing")
        entries = sorted(x for r in self.rows for x in r)
        if entries != list(range(len(entries))):
            raise ValueError("filling must be a bijection onto 0..n-1")

    @property
    def shape(self) -> tuple:
        return tuple(len(r) for r in self.rows)

    @property
    def n(self) -> int:
        return sum(self.shape)

    @property
    def columns(self) -> tuple:
        return tuple(tuple(r[j] for r in self.rows if len(r) > j) for j in range(len(self.rows[0])))

    @classmethod
    def canonical(cls, shape: Sequence[int]) -> "Tableau":
        rows, k = [], 0
        for length in shape:
            rows.append(tuple(range(k, k + length)))
            k += length
        return cls(tuple(rows))


def perm_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def _block_group(blocks, n: int, signed: bool) -> list:
    """All permutations of 0..n-1 preserving each block, with signs."""
    out = []
    for choice in product(*(permutations(b) for b in blocks)):
        sigma = list(range(n))
        for block, image in zip(blocks, choice):
            for src, dst in zip(block, image):
                sigma[src] = dst
        sigma = tuple(sigma)
        out.append((sigma, perm_sign(sigma) if signed else 1))
    return out


def compose(s, t) -> tuple:
    """(s o t)(i) = s(t(i))."""
    return tuple(s[t[i]] for i in range(len(t)))


def symmetrizer_element(T: Tableau) -> dict:
    """e_T = R(T) C(T) as a group-algebra element {perm: coeff}."""
    n = T.n
    rows = _block_group(T.rows, n, signed=False)
    cols = _block_group(T.columns, n, signed=True)
    out: dict = {}
    for r, _ in rows:
        for c, s in cols:
            g = compose(r, c)
            out[g] = out.get(g, 0) + s
    return {g: c for g, c in out.items() if c}


def group_algebra_mul(x: dict, y: dict) -> dict:
    out: dict = {}
    for g, a in x.items():
        for h, b in y.items():
            gh = compose(g, h)
            out[gh] = out.get(gh, 0) + a * b
    return {g: c for g, c in out.items() if c}


def act_group_algebra(elem: dict, f: MultilinearPoly) -> MultilinearPoly:
    out = MultilinearPoly()
    for g, c in elem.items():
        for m, a in f.items():
            out.add_term(m.act(g), a * c)
    return out


def apply_symmetrizer(T: Tableau, f: MultilinearPoly) -> MultilinearPoly:
    """Row symmetrization composed with signed column alternation: R(T)(C(T) f)."""
    for m in f:
        if m.degree != T.n:
            raise ValueError(f"tableau has {T.n} cells, polynomial degree is {m.degree}")
    n = T.n
    cf = act_group_algebra(dict((g, s) for g, s in _block_group(T.columns, n, True)), f)
    return act_group_algebra(dict((g, 1) for g, _ in _block_group(T.rows, n, False)), cf)


# --- alternated evaluation trees ---------------------------------------------

Payload = Union[Element, str]


@dataclass(frozen=True)
class Leaf:
    payload: object
    alt: str | None = None
    sym: str | None = None

    def __post_init__(self):
        if self.alt is not None and self.sym is not None:
            raise ValueError("a leaf belongs to at most one class")


@dataclass(frozen=True)
class Node:
    left: object
    right: object


def mul(*factors):
    """Left-normed product of expression trees."""
    acc = factors[0]
    for f in factors[1:]:
        acc = Node(acc, f)
    return acc


def leaves(expr) -> list:
    if isinstance(expr, Leaf):
        return [expr]
    return leaves(expr.left) + leaves(expr.right)


def _classes(expr) -> dict:
    """class key -> list of payloads, in leaf order. Keys are ('alt'|'sym', tag)."""
    out: dict = {}
    for lf in leaves(expr):
        if lf.alt is not None:
            out.setdefault(("alt", lf.alt), []).append(lf.payload)
        elif lf.sym is not None:
            out.setdefault(("sym", lf.sym), []).append(lf.payload)
    return out


def expand_alt(expr) -> list:
    """Signed list of plain trees: sum over products of class permutations."""
    classes = _classes(expr)
    keys = list(classes)
    choices = [list(permutations(range(len(classes[k])))) for k in keys]
    terms = []
    for combo in product(*choices):
        sign = 1
        for k, perm in zip(keys, combo):
            if k[0] == "alt":
                sign *= perm_sign(perm)
        cursor = {k: 0 for k in keys}

        def rebuild(e):
            if isinstance(e, Leaf):
                key = ("alt", e.alt) if e.alt is not None else ("sym", e.sym) if e.sym is not None else None
                if key is None:
                    return Leaf(e.payload)
                perm = combo[keys.index(key)]
                idx = cursor[key]
                cursor[key] += 1
                return Leaf(classes[key][perm[idx]])
            return Node(rebuild(e.left), rebuild(e.right))

        terms.append((sign, rebuild(expr)))
    return terms


def evaluate_tree(A: AlgebraSpec, expr) -> Element:
    if isinstance(expr, Leaf):
        if not isinstance(expr.payload, Element):
            raise TypeError("cannot evaluate a symbolic leaf")
        return expr.payload
    return multiply(A, evaluate_tree(A, expr.left), evaluate_tree(A, expr.right))


def evaluate_alt(A: AlgebraSpec, expr) -> Element:
    """Evaluate an alternated/symmetrized tree on concrete elements.

    Each subtree is tabulated by which payload slots of each class it has
    consumed, so the full product of factorials is never enumerated.
    """
    classes = _classes(expr)
    keys = sorted(classes)
    pos = {k: i for i, k in enumerate(keys)}
    signed = [k[0] == "alt" for k in keys]
    empty = tuple(frozenset() for _ in keys)

    def tab(e) -> dict:
        if isinstance(e, Leaf):
            key = ("alt", e.alt) if e.alt is not None else ("sym", e.sym) if e.sym is not None else None
            if key is None:
                return {empty: e.payload}
            c = pos[key]
            out = {}
            for j, payload in enumerate(classes[key]):
                used = list(empty)
                used[c] = frozenset((j,))
                out[tuple(used)] = payload
            return out
        left, right = tab(e.left), tab(e.right)
        out: dict = {}
        for kl, vl in left.items():
            for kr, vr in right.items():
                if any(a & b for a, b in zip(kl, kr)):
                    continue
                sign = 1
                for c, (a, b) in enumerate(zip(kl, kr)):
                    if signed[c]:
                        cross = sum(1 for x in a for y in b if x > y)
                        if cross % 2:
                            sign = -sign
                v = multiply(A, vl, vr)
                if sign < 0:
                    v = -v
                key = tuple(a | b for a, b in zip(kl, kr))
                out[key] = out[key] + v if key in out else v
        return out

    table = tab(expr)
    full = tuple(frozenset(range(len(classes[k]))) for k in keys)
    return table.get(full, Element.zero(A.dim))


# --- witness expressions on W --------------------------------------------------

def witness_trees(m1: Element | None = None) -> dict:
    """The alternated witness expressions on W.

    ``m1`` replaces every occurrence of e_{-1} (used for the e_{-1} -> e_{-1}+e_0
    substitution); by default it is e_{-1} itself.
    """
    W = build_W()
    em1 = W.basis(0) if m1 is None else m1
    e0, e1, e2 = W.basis(1), W.basis(2), W.basis(3)
    bar = lambda x: Leaf(x, alt="bar")
    tilde = lambda x: Leaf(x, alt="tilde")
    dbar = lambda x: Leaf(x, alt="dbar")
    plain = Leaf

    tail = mul(bar(e1), bar(e2))
    # [e-1' ((e0' e-1) (e1' e2'))] with plain inner e-1
    core1 = mul(bar(em1), mul(mul(bar(e0), plain(em1)), tail))
    # same core with the inner e-1 in the tilde set
    core3 = mul(bar(em1), mul(mul(bar(e0), tilde(em1)), tail))
    a = mul(core3, tilde(e0))
    return {
        "f1": mul(plain(em1), core1),
        "f2": mul(bar(em1), bar(e0), bar(e1)),
        "f3": mul(mul(plain(em1), core3), tilde(e0)),
        "a": a,
        "f4": mul(dbar(em1), mul(a, dbar(e0))),
    }


WITNESS_NAMES = ("f1", "f2", "f3", "f4", "a")

# Number of leaves in each witness tree.
WITNESS_DEGREE = {"f1": 6, "f2": 3, "f3": 7, "f4": 8, "a": 6}


def evaluate_witness(name: str, A: AlgebraSpec | None = None, m1: Element | None = None) -> Element:
    """Evaluate a witness on W, or on another 4-dim table given as ``A``.

    Payloads are coordinate vectors, so the same trees evaluate on any
    algebra of dimension four (used to probe tampered tables).
    """
    if name not in WITNESS_NAMES:
        raise ValueError(f"unknown witness {name!r}; expected one of {WITNESS_NAMES}")
    A = build_W() if A is None else A
    if A.dim != 4:
        raise ValueError("witness expressions are defined for four-dimensional algebras")
    return evaluate_alt(A, witness_trees(m1)[name])
