"""
Hopf-Lax updates on the stencils of a StencilTable.

For a point x with stencil boundary vertices v_0 .. v_{m-1} (counter-clockwise, offsets p_k = v_k - x), the update is
the minimum over the boundary edges [v_k, v_k+1] of

    min_{t in [0,1]}  t d(v_k) + (1-t) d(v_k+1) + F_x(t p_k + (1-t) p_k+1)

which for an OffsetNorm has a closed-form solution. Norm parameters are passed around as plain
(a, b, c, mwx, mwy) tuples on the hot paths.
"""

import math
from typing import NamedTuple

from scipy.optimize import minimize_scalar

from fmasr.grid import OUTSIDE

INF = math.inf
# relative width of the band around A = delta^2 where the stationarity equation is ill-conditioned
DEGENERATE_RTOL = 1e-14


class EdgeSolveResult(NamedTuple):
    value: float
    t_star: float
    interior: bool


def norm_params(F):
    return (F.M.a, F.M.b, F.M.c, F.drift[0], F.drift[1])


def _norm(params, x, y):
    a, b, c, mwx, mwy = params
    return math.sqrt(max(a * x * x + 2 * b * x * y + c * y * y, 0.0)) - (mwx * x + mwy * y)


def _objective(params, p, q, dp, dq, t):
    s = 1.0 - t
    return t * dp + s * dq + _norm(params, t * p[0] + s * q[0], t * p[1] + s * q[1])


def minimize_on_unit_interval(f, xatol=1e-12):
    """ Minimize a convex scalar function on [0,1]; bounded Brent search, then compared against both endpoints.

        Returns (value, argmin).
    """

    res = minimize_scalar(f, bounds=(0.0, 1.0), method="bounded", options={"xatol": xatol})
    return min((float(res.fun), float(res.x)), (f(0.0), 0.0), (f(1.0), 1.0))


def _edge(params, p, q, dp, dq):
    """ (value, t) minimizing t dp + (1-t) dq + F(t p + (1-t) q) over [0,1] """

    if dp == INF:
        if dq == INF:
            return INF, 0.0
        return dq + _norm(params, q[0], q[1]), 0.0
    if dq == INF:
        return dp + _norm(params, p[0], p[1]), 1.0

    a, b, c, mwx, mwy = params
    px, py = p
    qx, qy = q
    ex, ey = px - qx, py - qy
    mex, mey = a * ex + b * ey, b * ex + c * ey
    A = mex * ex + mey * ey
    B = mex * qx + mey * qy
    C = a * qx * qx + 2 * b * qx * qy + c * qy * qy

    # subtracting the linear part of F from the values leaves a pure quadratic norm
    delta = (dp - (mwx * px + mwy * py)) - (dq - (mwx * qx + mwy * qy))
    gap = A - delta * delta

    if abs(gap) <= DEGENERATE_RTOL * A:
        _, t = minimize_on_unit_interval(lambda s: _objective(params, p, q, dp, dq, s))
    elif gap > 0:
        D = max(A * C - B * B, 0.0)
        s = -math.copysign(abs(delta) * math.sqrt(D / gap), delta)
        t = min(max((s - B) / A, 0.0), 1.0)
    else:
        # the objective is monotone with the sign of delta
        t = 0.0 if delta > 0 else 1.0

    return _objective(params, p, q, dp, dq, t), t


def hopf_lax_edge(F, p, q, d_p, d_q):
    """ Minimize t d_p + (1-t) d_q + F(t p + (1-t) q) over t in [0,1].

        `p` and `q` are the (linearly independent) offsets from the updated point to the two vertices of the edge.
        A vertex with value +inf is never used; if both values are +inf the result is +inf.
    """

    value, t = _edge(norm_params(F), (float(p[0]), float(p[1])), (float(q[0]), float(q[1])), float(d_p), float(d_q))
    return EdgeSolveResult(value, t, 0.0 < t < 1.0 and value < INF)


def _ring_min(params, vectors, dvals):
    """ Minimum over the boundary edges of one stencil; vertex candidates are the edges' endpoints. """

    m = len(vectors)
    best = INF
    for k in range(m):
        j = k + 1 if k + 1 < m else 0
        if dvals[k] == INF and dvals[j] == INF:
            continue
        value, _ = _edge(params, vectors[k], vectors[j], dvals[k], dvals[j])
        if value < best:
            best = value
    return best


def _seed_min(params, vectors, outside):
    """ Update from the OUTSIDE vertices alone, all at value 0 """

    m = len(vectors)
    best = INF
    for k in range(m):
        if not outside[k]:
            continue
        best = min(best, _norm(params, vectors[k][0], vectors[k][1]))
        j = k + 1 if k + 1 < m else 0
        if outside[j]:
            value, _ = _edge(params, vectors[k], vectors[j], 0.0, 0.0)
            best = min(best, value)
    return best


def _partial_min(params, p, dy, flanks):
    """ Vertex candidate of y plus the edge solves towards each usable flanking vertex, given as (offset, value). """

    if dy == INF:
        return INF

    best = dy + _norm(params, p[0], p[1])
    for q, dz in flanks:
        if dz == INF:
            continue
        value, _ = _edge(params, p, q, dy, dz)
        if value < best:
            best = value
    return best


class HopfLax:
    """ Hopf-Lax updates over a whole StencilTable, with its arrays unpacked into python lists for scalar access.

        `outside_value` is the permanent value of OUTSIDE vertices: +inf for point-source problems, 0 for the
        escape-time boundary condition.
    """

    def __init__(self, table, outside_value=INF):
        self.outside_value = outside_value
        self.indptr = table.indptr.tolist()
        self.neighbors = table.neighbors.tolist()
        self.vectors = [tuple(v) for v in table.vectors.tolist()]
        self.params = [None if F is None else norm_params(F) for F in table.norms]
        self.rev_indptr = table.rev_indptr.tolist()
        self.rev_points = table.rev_points.tolist()
        self.rev_slots = table.rev_slots.tolist()

    def _value(self, values, n):
        return self.outside_value if n == OUTSIDE else values[n]

    def full(self, values, x):
        lo, hi = self.indptr[x], self.indptr[x + 1]
        if lo == hi:
            return INF
        dvals = [self._value(values, n) for n in self.neighbors[lo:hi]]
        return _ring_min(self.params[x], self.vectors[lo:hi], dvals)

    def partial(self, values, accepted, x, slot):
        """ Update of x restricted to the vertex y at forward entry `slot` and the boundary edges [y, z] whose other
            vertex z is accepted. OUTSIDE vertices count as accepted.
        """

        lo, hi = self.indptr[x], self.indptr[x + 1]
        flanks = []
        for j in (slot - 1 if slot > lo else hi - 1, slot + 1 if slot + 1 < hi else lo):
            z = self.neighbors[j]
            if z == OUTSIDE:
                flanks.append((self.vectors[j], self.outside_value))
            elif accepted[z]:
                flanks.append((self.vectors[j], values[z]))

        return _partial_min(self.params[x], self.vectors[slot], self._value(values, self.neighbors[slot]), flanks)

    def seed(self, x):
        """ The value of x once every OUTSIDE vertex is accepted at value 0, or +inf if its stencil stays inside. """

        lo, hi = self.indptr[x], self.indptr[x + 1]
        outside = [n == OUTSIDE for n in self.neighbors[lo:hi]]
        if not any(outside):
            return INF
        return _seed_min(self.params[x], self.vectors[lo:hi], outside)

    def residual(self, values, points):
        worst = 0.0
        for x in points:
            d = values[x]
            update = self.full(values, x)
            if d == INF or update == INF:
                if d != update:
                    return INF
                continue
            worst = max(worst, abs(d - update) / (1.0 + d))
        return worst


def _stencil_of(x, table):
    if table.norms[x] is None:
        raise ValueError(f"point {x} has no stencil (Dirichlet point)")
    lo, hi = int(table.indptr[x]), int(table.indptr[x + 1])
    neighbors = table.neighbors[lo:hi].tolist()
    vectors = [tuple(v) for v in table.vectors[lo:hi].tolist()]
    return norm_params(table.norms[x]), neighbors, vectors


def _field_value(field, n):
    return field.outside_value if n == OUTSIDE else float(field.values[n])


def hopf_lax_full(field, x, table):
    """ Lambda(d, x): the update of x from all the boundary edges of its stencil. Does not depend on d(x). """

    params, neighbors, vectors = _stencil_of(x, table)
    return _ring_min(params, vectors, [_field_value(field, n) for n in neighbors])


def hopf_lax_partial(field, x, y, table):
    """ Lambda(d, x; b, y): the update of x restricted to the vertex y and the boundary edges [y, z] of its stencil
        whose other vertex z is accepted (OUTSIDE vertices count as accepted).
    """

    params, neighbors, vectors = _stencil_of(x, table)
    m = len(neighbors)
    slots = [k for k in range(m) if neighbors[k] == y]
    if not slots:
        raise ValueError(f"point {y} is not a vertex of the stencil of {x}")

    best = INF
    for k in slots:
        flanks = []
        for j in ((k - 1) % m, (k + 1) % m):
            if neighbors[j] == OUTSIDE or field.accepted[neighbors[j]]:
                flanks.append((vectors[j], _field_value(field, neighbors[j])))
        best = min(best, _partial_min(params, vectors[k], _field_value(field, y), flanks))
    return best


def residual(field, table):
    """ max over interior x of |d(x) - Lambda(d, x)| / (1 + d(x)), with +inf = +inf counted as 0 """
    return HopfLax(table, field.outside_value).residual(field.values.tolist(), field.domain.interior.tolist())
