"""Moment graphs of Schubert varieties built from Cartan data.

Roots live in the root lattice (coordinates with respect to the simple
roots).  Cartan entries follow A[i][j] = <alpha_i^vee, alpha_j>.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from pathlib import Path

from .graph import Edge, MomentGraph
from .lattice import Lattice, Weight, sign_normalize

__all__ = [
    "CartanMatrix",
    "RootSystemData",
    "WeylGroup",
    "CoxeterElement",
    "finite_bruhat_graph",
    "affine_grassmannian_graph",
    "coweight_id",
    "parse_coweight_id",
    "coweight_length",
    "io_graph",
]


class CartanMatrix:
    """A generalized Cartan matrix, validated on construction."""

    def __init__(self, entries, name: str | None = None):
        rows = tuple(tuple(int(x) for x in r) for r in entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("Cartan matrix must be square and nonempty")
        for i in range(n):
            if rows[i][i] != 2:
                raise ValueError("diagonal entries must be 2")
            for j in range(n):
                if i != j:
                    if rows[i][j] > 0:
                        raise ValueError("off-diagonal entries must be <= 0")
                    if (rows[i][j] == 0) != (rows[j][i] == 0):
                        raise ValueError("A_ij = 0 must imply A_ji = 0")
        self.entries = rows
        self.size = n
        self.name = name

    @classmethod
    def from_type(cls, spec: str) -> "CartanMatrix":
        m = re.fullmatch(r"\s*([A-Ga-g])(\d+)\s*", spec)
        if not m:
            return cls.parse(spec)
        t, n = m.group(1).upper(), int(m.group(2))
        A = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        if t in "ABCD":
            for i in range(n - 1):
                A[i][i + 1] = A[i + 1][i] = -1
            if t == "B" and n >= 2:
                A[n - 1][n - 2] = -2
            elif t == "C" and n >= 2:
                A[n - 2][n - 1] = -2
            elif t == "D":
                if n < 4:
                    raise ValueError("type D needs rank >= 4")
                A[n - 2][n - 1] = A[n - 1][n - 2] = 0
                A[n - 3][n - 1] = A[n - 1][n - 3] = -1
        elif t == "G" and n == 2:
            A = [[2, -3], [-1, 2]]
        else:
            raise ValueError(f"unsupported Cartan type {spec!r}")
        return cls(A, name=f"{t}{n}")

    @classmethod
    def parse(cls, text: str) -> "CartanMatrix":
        """Type string, JSON matrix, or rows separated by ';' with entries separated by ','."""
        text = text.strip()
        if re.fullmatch(r"[A-Ga-g]\d+", text):
            return cls.from_type(text)
        if text.startswith("["):
            return cls(json.loads(text))
        return cls([[int(x) for x in row.replace(",", " ").split()] for row in text.split(";")])

    def transpose(self) -> "CartanMatrix":
        return CartanMatrix([[self.entries[j][i] for j in range(self.size)] for i in range(self.size)])

    @cached_property
    def symmetrizer(self) -> tuple:
        """Positive d_i with d_i A_ij = d_j A_ji."""
        n = self.size
        d = [None] * n
        for start in range(n):
            if d[start] is not None:
                continue
            d[start] = Fraction(1)
            queue = deque([start])
            while queue:
                i = queue.popleft()
                for j in range(n):
                    if j != i and self.entries[i][j]:
                        val = d[i] * self.entries[i][j] / self.entries[j][i]
                        if d[j] is None:
                            d[j] = val
                            queue.append(j)
                        elif d[j] != val:
                            raise ValueError("Cartan matrix is not symmetrizable")
        return tuple(d)

    def is_finite_type(self) -> bool:
        try:
            d = self.symmetrizer
        except ValueError:
            return False
        n = self.size
        B = [[d[i] * self.entries[i][j] for j in range(n)] for i in range(n)]
        # positive definite iff Gaussian elimination without pivoting meets positive pivots
        for c in range(n):
            if B[c][c] <= 0:
                return False
            for r in range(c + 1, n):
                f = B[r][c] / B[c][c]
                for j in range(c, n):
                    B[r][j] -= f * B[c][j]
        return True

    def __eq__(self, other):
        return isinstance(other, CartanMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"CartanMatrix({self.name or list(map(list, self.entries))})"


def _as_cartan(A) -> CartanMatrix:
    if isinstance(A, CartanMatrix):
        return A
    if isinstance(A, str):
        return CartanMatrix.parse(A)
    return CartanMatrix(A)


class RootSystemData:
    """Finite root system of a finite-type Cartan matrix."""

    def __init__(self, A):
        A = _as_cartan(A)
        if not A.is_finite_type():
            raise ValueError("Cartan matrix is not of finite type")
        self.cartan = A
        self.rank = A.size
        n = self.rank
        self.simple_roots = tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(n))
        roots = set(self.simple_roots)
        queue = deque(self.simple_roots)
        while queue:
            b = queue.popleft()
            for i in range(n):
                c = self.simple_reflect(i, b)
                if c not in roots:
                    roots.add(c)
                    queue.append(c)
        pos = [r for r in roots if all(x >= 0 for x in r)]
        # sort by height, then reverse-lex so simple roots come in index order
        self.positive_roots = tuple(sorted(pos, key=lambda r: (sum(r), tuple(-x for x in r))))

    def pairing_simple(self, i: int, beta) -> int:
        """<alpha_i^vee, beta>."""
        return sum(b * self.cartan.entries[i][j] for j, b in enumerate(beta))

    def simple_reflect(self, i: int, beta) -> tuple:
        c = self.pairing_simple(i, beta)
        return tuple(b - (c if j == i else 0) for j, b in enumerate(beta))

    def form(self, a, b) -> Fraction:
        d = self.cartan.symmetrizer
        A = self.cartan.entries
        return sum(a[i] * b[j] * d[i] * A[i][j] for i in range(self.rank) for j in range(self.rank))

    def coroot_pairing(self, beta, gamma) -> int:
        """<beta^vee, gamma>."""
        v = 2 * self.form(beta, gamma) / self.form(beta, beta)
        if v.denominator != 1:
            raise ArithmeticError("non-integral coroot pairing")
        return int(v)

    def coroot_fundamental(self, beta) -> tuple:
        """beta^vee in fundamental-coweight coordinates: (<beta^vee, alpha_i>)_i."""
        return tuple(self.coroot_pairing(beta, a) for a in self.simple_roots)

    def reflection_matrix(self, beta) -> tuple:
        """Matrix of s_beta on root coordinates (columns are images of simple roots)."""
        n = self.rank
        cols = []
        for a in self.simple_roots:
            c = self.coroot_pairing(beta, a)
            cols.append(tuple(a[j] - c * beta[j] for j in range(n)))
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    @property
    def coxeter_number(self) -> int:
        return len(self.positive_roots) * 2 // self.rank


def _matmul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


class WeylGroup:
    """Finite Weyl group as integer matrices on the root lattice."""

    def __init__(self, A):
        self.roots = RootSystemData(A)
        n = self.roots.rank
        self.rank = n
        self.identity = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
        self.simple = tuple(self.roots.reflection_matrix(a) for a in self.roots.simple_roots)
        self.length = {self.identity: 0}
        order = [self.identity]
        queue = deque(order)
        while queue:
            w = queue.popleft()
            for s in self.simple:
                v = _matmul(s, w)
                if v not in self.length:
                    self.length[v] = self.length[w] + 1
                    order.append(v)
                    queue.append(v)
        self.elements = order
        self.reflections = {beta: self.roots.reflection_matrix(beta) for beta in self.roots.positive_roots}
        self._words: dict = {self.identity: ()}

    def mul(self, a, b):
        return _matmul(a, b)

    def from_word(self, word) -> tuple:
        w = self.identity
        for i in word:
            if not 1 <= i <= self.rank:
                raise ValueError(f"simple reflection index {i} out of range")
            w = _matmul(w, self.simple[i - 1])
        return w

    def word(self, w) -> tuple:
        """Lexicographically smallest reduced word (1-based indices)."""
        hit = self._words.get(w)
        if hit is not None:
            return hit
        lw = self.length[w]
        for i, s in enumerate(self.simple):
            v = _matmul(s, w)
            if self.length[v] < lw:
                out = (i + 1,) + self.word(v)
                self._words[w] = out
                return out
        raise AssertionError("no left descent for a non-identity element")

    def element_id(self, w) -> str:
        word = self.word(w)
        return "e" if not word else "".join(f"s{i}" for i in word)

    def bruhat_down_set(self, top) -> set:
        seen = {top}
        queue = deque([top])
        while queue:
            v = queue.popleft()
            lv = self.length[v]
            for t in self.reflections.values():
                u = _matmul(t, v)
                if self.length[u] < lv and u not in seen:
                    seen.add(u)
                    queue.append(u)
        return seen

    def bruhat_leq(self, x, y) -> bool:
        return x in self.bruhat_down_set(y)

    def parabolic_subgroup(self, I) -> list:
        gens = [self.simple[i - 1] for i in I]
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            w = queue.popleft()
            for s in gens:
                v = _matmul(w, s)
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return list(seen)

    def min_coset_reps(self, I) -> dict:
        """element -> minimal-length representative of its left coset w W_I."""
        WI = self.parabolic_subgroup(I)
        rep = {}
        for w in self.elements:
            if w in rep:
                continue
            coset = [_matmul(w, u) for u in WI]
            m = min(coset, key=lambda v: (self.length[v], self.word(v)))
            for v in coset:
                rep[v] = m
        return rep


@dataclass(frozen=True)
class CoxeterElement:
    group: WeylGroup
    matrix: tuple

    @classmethod
    def from_word(cls, group: WeylGroup, word) -> "CoxeterElement":
        if isinstance(word, str):
            word = [int(x) for x in word.replace(",", " ").split()]
        return cls(group, group.from_word(word))

    @property
    def word(self) -> tuple:
        return self.group.word(self.matrix)

    @property
    def length(self) -> int:
        return self.group.length[self.matrix]

    @property
    def id(self) -> str:
        return self.group.element_id(self.matrix)

    def __mul__(self, other: "CoxeterElement") -> "CoxeterElement":
        return CoxeterElement(self.group, _matmul(self.matrix, other.matrix))

    def __le__(self, other: "CoxeterElement") -> bool:
        return self.group.bruhat_leq(self.matrix, other.matrix)

    def __eq__(self, other):
        return isinstance(other, CoxeterElement) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"CoxeterElement({self.id})"


def finite_bruhat_graph(A, top=None, parabolic=(), negate_roots: bool = False) -> MomentGraph:
    """Moment graph of the Schubert variety of ``top`` in G/P_I.

    ``top`` is a CoxeterElement, a reduced word, or None for the longest
    element.  ``negate_roots`` labels edges by negative roots before sign
    normalisation (used to test that labels are normalised).
    """
    W = WeylGroup(A)
    if top is None:
        topm = max(W.elements, key=lambda w: W.length[w])
    elif isinstance(top, CoxeterElement):
        topm = top.matrix
    else:
        topm = CoxeterElement.from_word(W, top).matrix
    I = tuple(sorted(set(int(i) for i in parabolic)))
    reps = W.min_coset_reps(I)
    if top is None:
        topm = reps[topm]
    elif reps[topm] != topm:
        raise ValueError("top is not a minimal-length coset representative")
    down = W.bruhat_down_set(topm)
    verts = sorted({reps[v] for v in down}, key=lambda w: (W.length[w], W.word(w)))
    vset = set(verts)
    edges = {}
    for x in verts:
        for beta, t in W.reflections.items():
            y = reps[_matmul(t, x)]
            if y == x or y not in vset:
                continue
            pair = frozenset((x, y))
            lab = tuple(-c for c in beta) if negate_roots else beta
            lab = sign_normalize(Weight(lab))
            if pair in edges:
                if edges[pair][2] != lab:
                    raise ValueError("two reflections connect the same pair of cosets")
                continue
            lx, ly = W.length[x], W.length[y]
            if lx == ly:
                raise ValueError("reflection joins representatives of equal length")
            tail, head = (x, y) if lx < ly else (y, x)
            edges[pair] = (W.element_id(tail), W.element_id(head), lab)
    ordered = sorted(edges.values(), key=lambda e: (e[0], e[1]))
    return MomentGraph(Lattice(W.rank), [W.element_id(v) for v in verts], [Edge(*e) for e in ordered])


# --- affine Grassmannian ---------------------------------------------------


def coweight_id(mu) -> str:
    return "[" + ",".join(str(int(c)) for c in mu) + "]"


def parse_coweight_id(s: str) -> tuple:
    s = s.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ValueError(f"not a coweight id: {s!r}")
    return tuple(int(x) for x in s[1:-1].split(",") if x.strip())


def coweight_length(R: RootSystemData, mu) -> int:
    """Dimension of the Iwahori orbit through the fixed point t^mu."""
    total = 0
    for beta in R.positive_roots:
        c = sum(b * m for b, m in zip(beta, mu))
        if c > 0:
            total += c
        elif c < 0:
            total += -c - 1
    return total


def _in_coroot_coset(A: CartanMatrix, diff) -> bool:
    """Is ``diff`` (fundamental-coweight coordinates) in the coroot lattice?"""
    n = A.size
    # diff = A^T c  ->  solve for c over Q
    M = [[Fraction(A.entries[j][i]) for j in range(n)] + [Fraction(diff[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return all((M[i][n] / M[i][i]).denominator == 1 for i in range(n))


def affine_grassmannian_graph(A, cutoff: int, component=None) -> MomentGraph:
    """Truncated moment graph of the affine Grassmannian.

    Vertices are the coweights mu (fundamental-coweight coordinates) in the
    coset ``component + Q^vee`` with Iwahori-orbit dimension <= cutoff.  The
    lattice is the finite root lattice plus a last coordinate for delta;
    mu and mu - j beta^vee are joined by an edge labelled beta + (j - <mu, beta>) delta.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    R = RootSystemData(A)
    n = R.rank
    rep = tuple(component) if component is not None else (0,) * n
    if len(rep) != n:
        raise ValueError("component representative has wrong length")
    bound = cutoff + len(R.positive_roots) + max(abs(c) for c in rep)
    verts = {}
    for mu in product(range(-bound, bound + 1), repeat=n):
        if coweight_length(R, mu) > cutoff:
            continue
        if not _in_coroot_coset(R.cartan, [m - r for m, r in zip(mu, rep)]):
            continue
        verts[mu] = coweight_length(R, mu)
    edges = {}
    for mu in verts:
        for beta in R.positive_roots:
            cv = R.coroot_fundamental(beta)
            pair_mu = sum(b * m for b, m in zip(beta, mu))
            for nu in verts:
                if nu == mu:
                    continue
                d = [m - v for m, v in zip(mu, nu)]
                # need mu - nu = j beta^vee for a nonzero integer j
                j = None
                ok = True
                for dc, cc in zip(d, cv):
                    if cc == 0:
                        if dc != 0:
                            ok = False
                            break
                    else:
                        if dc % cc:
                            ok = False
                            break
                        jj = dc // cc
                        if j is None:
                            j = jj
                        elif j != jj:
                            ok = False
                            break
                if not ok or not j:
                    continue
                pair = frozenset((mu, nu))
                lab = sign_normalize(Weight(tuple(beta) + (j - pair_mu,)))
                if pair in edges:
                    if edges[pair][2] != lab:
                        raise ValueError("two affine reflections connect the same pair of cosets")
                    continue
                if verts[mu] == verts[nu]:
                    raise ValueError("affine reflection joins vertices of equal length")
                tail, head = (mu, nu) if verts[mu] < verts[nu] else (nu, mu)
                edges[pair] = (coweight_id(tail), coweight_id(head), lab)
    order = sorted(verts, key=lambda m: (verts[m], m))
    ordered = sorted(edges.values(), key=lambda e: (e[0], e[1]))
    return MomentGraph(Lattice(n + 1), [coweight_id(m) for m in order], [Edge(*e) for e in ordered])


def io_graph(direction: str, path, G: MomentGraph | None = None):
    path = Path(path)
    if direction == "load":
        return MomentGraph.from_json(json.loads(path.read_text()))
    if direction == "save":
        if G is None:
            raise ValueError("save needs a graph")
        path.write_text(json.dumps(G.to_json(), sort_keys=True, indent=1) + "\n")
        return None
    raise ValueError(f"unknown direction {direction!r}")
