"""Composite Gauss-Legendre rules on the uniform mesh, graded into boundary layers."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

LAYER_REACH = 40.0  # e^{-40} ~ 4e-18: beyond 40 layer widths the layer term is below rounding
# error norms integrate squared layer terms, twice as steep as the layer itself;
# 5 points per doubling piece lose ~4e-8 relative there, 10 points reach rounding
ERROR_GAUSS_POINTS = 10


@lru_cache(maxsize=None)
def gauss_legendre(npts: int):
    x, w = np.polynomial.legendre.leggauss(npts)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def graded_distances(width: float, smallest: float, reach: float) -> np.ndarray:
    """Distances 0 < smallest < 2*smallest < 4*smallest < ... capped at ``reach``.

    These are breakpoints measured from the boundary that a layer of the given
    ``width`` is attached to; ``reach`` is usually min(h, 40*width).
    """
    if reach <= 0 or smallest <= 0:
        return np.zeros(0)
    d = []
    s = smallest
    while s < reach:
        d.append(s)
        s *= 2.0
    d.append(reach)
    return np.asarray(d)


def piece_rule(breaks, npts: int = 5, refine: int = 0):
    """Gauss nodes and weights on every piece [breaks[i], breaks[i+1]]."""
    b = np.unique(np.asarray(breaks, dtype=float))
    if refine:
        k = 2**refine
        frac = np.arange(k) / k
        inner = (b[:-1, None] + frac[None, :] * np.diff(b)[:, None]).ravel()
        b = np.append(inner, b[-1])
    gx, gw = gauss_legendre(npts)
    mid = 0.5 * (b[1:] + b[:-1])
    half = 0.5 * np.diff(b)
    nodes = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    weights = (half[:, None] * gw[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class CompositeRule:
    """Quadrature points over [0, 1] tagged with their mesh element.

    ``elem`` is 0-based (element e = [e*h, (e+1)*h]); ``t`` is the offset
    from the element's left node; ``x`` the absolute coordinate.
    """

    n: int
    elem: np.ndarray
    t: np.ndarray
    x: np.ndarray
    w: np.ndarray

    def restrict(self, mask) -> "CompositeRule":
        return CompositeRule(self.n, self.elem[mask], self.t[mask], self.x[mask], self.w[mask])

    def hat_matrix(self) -> np.ndarray:
        """Values phi_l(x_p) of the interior hat functions, shape (points, n-1)."""
        h = 1.0 / self.n
        P = np.zeros((self.x.size, self.n - 1))
        idx = np.arange(self.x.size)
        s = self.t / h
        left = self.elem - 1  # interior index of the node at the element's left end
        ok = left >= 0
        P[idx[ok], left[ok]] = 1.0 - s[ok]
        right = self.elem
        ok = right <= self.n - 2
        P[idx[ok], right[ok]] = s[ok]
        return P

    def hat_slope_matrix(self) -> np.ndarray:
        h = 1.0 / self.n
        D = np.zeros((self.x.size, self.n - 1))
        idx = np.arange(self.x.size)
        left = self.elem - 1
        ok = left >= 0
        D[idx[ok], left[ok]] = -1.0 / h
        right = self.elem
        ok = right <= self.n - 2
        D[idx[ok], right[ok]] = 1.0 / h
        return D


def composite_rule(n: int, local_breaks=(), global_breaks=(), npts: int = 5, refine: int = 0) -> CompositeRule:
    """Gauss rule on every element of the uniform n-mesh.

    ``local_breaks`` are offsets in (0, h) applied inside every element (used
    for layers that repeat per element, like the exponential bubble);
    ``global_breaks`` are absolute points in (0, 1) (boundary layers).
    """
    h = 1.0 / n
    local = np.asarray([b for b in np.atleast_1d(local_breaks) if 0.0 < b < h], dtype=float)
    base_t, base_w = piece_rule(np.concatenate(([0.0], local, [h])), npts, refine)

    g = np.sort(np.asarray([p for p in np.atleast_1d(global_breaks) if 0.0 < p < 1.0], dtype=float))
    g_elem = np.clip(np.floor(g * n).astype(int), 0, n - 1)
    special = set(g_elem.tolist())

    elems, ts, ws = [], [], []
    plain = np.array([e for e in range(n) if e not in special], dtype=int)
    if plain.size:
        elems.append(np.repeat(plain, base_t.size))
        ts.append(np.tile(base_t, plain.size))
        ws.append(np.tile(base_w, plain.size))
    for e in sorted(special):
        extra = g[g_elem == e] - e * h
        t, w = piece_rule(np.concatenate(([0.0], local, extra, [h])), npts, refine)
        elems.append(np.full(t.size, e))
        ts.append(t)
        ws.append(w)
    elem = np.concatenate(elems)
    t = np.concatenate(ts)
    w = np.concatenate(ws)
    order = np.lexsort((t, elem))
    elem, t, w = elem[order], t[order], w[order]
    return CompositeRule(n, elem, t, elem * h + t, w)


def right_layer_breaks(width: float, smallest_fraction: float = 1 / 8) -> np.ndarray:
    """Absolute breakpoints grading toward x = 1 for a layer of the given width."""
    d = graded_distances(width, smallest_fraction * width, min(1.0, LAYER_REACH * width))
    return 1.0 - d


def left_layer_breaks(width: float, smallest_fraction: float = 1 / 8) -> np.ndarray:
    return graded_distances(width, smallest_fraction * width, min(1.0, LAYER_REACH * width))
