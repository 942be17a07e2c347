"""Kazhdan-Lusztig polynomials by the classical recursion.

This oracle shares no code with the graph builders or the BM engine: the
Weyl group is realised on its own, as the orbit of rho (in fundamental
weight coordinates) under left multiplication by simple reflections.
"""

from __future__ import annotations

from collections import deque

__all__ = ["KLTable", "kl_table", "poly_str"]


def _cartan(A):
    if hasattr(A, "entries"):
        return [list(r) for r in A.entries]
    if isinstance(A, str):
        from ..builders import CartanMatrix  # only for parsing type strings

        return [list(r) for r in CartanMatrix.parse(A).entries]
    return [list(r) for r in A]


class _Group:
    """Elements are the images w(rho) of the regular weight rho = (1, ..., 1)."""

    def __init__(self, A):
        self.A = _cartan(A)
        self.n = len(self.A)
        e = tuple([1] * self.n)
        self.e = e
        self.length = {e: 0}
        queue = deque([e])
        while queue:
            v = queue.popleft()
            for i in range(self.n):
                u = self.reflect(i, v)
                if u not in self.length:
                    self.length[u] = self.length[v] + 1
                    queue.append(u)

    def reflect(self, i, lam):
        # s_i(lambda) = lambda - lambda_i alpha_i; alpha_i has fundamental coordinates (A[j][i])_j
        c = lam[i]
        return tuple(l - c * self.A[j][i] for j, l in enumerate(lam))

    def from_word(self, word):
        v = self.e
        for i in reversed(list(word)):
            v = self.reflect(i - 1, v)
        return v

    def word(self, v):
        out = []
        while v != self.e:
            for i in range(self.n):
                u = self.reflect(i, v)
                if self.length[u] < self.length[v]:
                    out.append(i + 1)
                    v = u
                    break
        return tuple(out)

    def name(self, v):
        w = self.word(v)
        return "e" if not w else "".join(f"s{i}" for i in w)

    def left_descent(self, v):
        for i in range(self.n):
            if self.length[self.reflect(i, v)] < self.length[v]:
                return i
        return None


def _padd(a, b, sign=1):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) + sign * (b[i] if i < len(b) else 0) for i in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _pshift(a, k):
    return tuple([0] * k + list(a)) if a else ()


def poly_str(p) -> str:
    terms = []
    for i, c in enumerate(p):
        if not c:
            continue
        mono = "" if i == 0 else ("q" if i == 1 else f"q^{i}")
        coef = str(c) if (c != 1 or i == 0) else ""
        terms.append(coef + mono)
    return " + ".join(terms) if terms else "0"


class KLTable:
    """P_{x,w} for all x <= top, keyed by element names."""

    def __init__(self, A, top_word=None):
        W = _Group(A)
        self.group = W
        top = W.from_word(top_word) if top_word is not None else max(W.length, key=W.length.get)
        self.top = W.name(top)
        self._leq: dict = {}
        self._P: dict = {}
        below = [v for v in W.length if self.leq(v, top)]
        self.elements = sorted(below, key=lambda v: (W.length[v], W.word(v)))
        self.table = {}
        for w in self.elements:
            for x in self.elements:
                if self.leq(x, w):
                    self.table[(W.name(x), W.name(w))] = self.P(x, w)

    def leq(self, x, w) -> bool:
        """Bruhat order via the lifting property."""
        key = (x, w)
        hit = self._leq.get(key)
        if hit is not None:
            return hit
        W = self.group
        if W.length[x] > W.length[w]:
            res = False
        elif w == W.e:
            res = x == W.e
        else:
            s = W.left_descent(w)
            sw = W.reflect(s, w)
            sx = W.reflect(s, x)
            res = self.leq(sx, sw) if W.length[sx] < W.length[x] else self.leq(x, sw)
        self._leq[key] = res
        return res

    def P(self, x, w) -> tuple:
        key = (x, w)
        hit = self._P.get(key)
        if hit is not None:
            return hit
        W = self.group
        if not self.leq(x, w):
            res = ()
        elif x == w:
            res = (1,)
        else:
            s = W.left_descent(w)
            v = W.reflect(s, w)
            sx = W.reflect(s, x)
            c = 1 if W.length[sx] < W.length[x] else 0
            res = _padd(_pshift(self.P(sx, v), 1 - c), _pshift(self.P(x, v), c))
            lw = W.length[w]
            for z in self.elements if hasattr(self, "elements") else W.length:
                if not (self.leq(x, z) and self.leq(z, v)) or z == v:
                    continue
                if W.length[W.reflect(s, z)] > W.length[z]:
                    continue
                m = self.mu(z, v)
                if m:
                    res = _padd(res, tuple(m * a for a in _pshift(self.P(x, z), (lw - W.length[z]) // 2)), -1)
        self._P[key] = res
        return res

    def mu(self, z, v) -> int:
        W = self.group
        d = W.length[v] - W.length[z]
        if d % 2 == 0:
            return 0
        p = self.P(z, v)
        k = (d - 1) // 2
        return p[k] if k < len(p) else 0

    def get(self, x: str, w: str) -> tuple:
        return self.table.get((x, w), ())

    def to_tsv(self) -> str:
        lines = ["x\tw\tP"]
        for (x, w), p in sorted(self.table.items()):
            lines.append(f"{x}\t{w}\t{poly_str(p)}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {f"{x},{w}": list(p) for (x, w), p in sorted(self.table.items())}


def kl_table(A, top=None) -> KLTable:
    """KL polynomials P_{x,w} (coefficient tuples in q) for x <= w <= top."""
    if isinstance(top, str):
        top = [int(t) for t in top.replace(",", " ").split()]
    return KLTable(A, top)
