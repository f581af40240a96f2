"""Free-space diagrams at threshold delta, Frechet decisions, extremal points.

The diagram of (P, Q) lives on the grid [0, n] x [0, m] where n, m are the
edge counts (x-axis = P, y-axis = Q).  Boundary free intervals are the
solution sets of one quadratic inequality per grid edge, computed once and
shared by adjacent cells.  Within a cell the free space is an ellipse
intersected with the cell, hence convex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    CurveParam,
    PolygonalCurve,
    ParameterError,
    DegenerateSubcurveError,
    eval_param,
    extract_subcurve,
    param_from_grid,
    point_to_curve_distance,
)

SNAP = 1e-12
MEMBER_TOL = 1e-9
# relative threshold for treating a quadratic as degenerate
DEGENERATE_REL = 1e-9


def _solve_free_intervals(starts, vecs, points, delta):
    """Free intervals {t in [0,1] : |start + t*vec - point| <= delta}.

    Vectorized over all (segment, point) pairs; returns (lo, hi) arrays of
    shape (n_segments, n_points) with NaN marking empty intervals.  Uses the
    numerically stable root form and snaps roots within SNAP of 0/1.
    """
    starts = np.asarray(starts, dtype=np.float64)
    vecs = np.asarray(vecs, dtype=np.float64)
    points = np.asarray(points, dtype=np.float64)
    diff = starts[:, None, :] - points[None, :, :]  # (n, k, d)
    a = np.einsum("id,id->i", vecs, vecs)[:, None]  # > 0, no zero edges
    b = 2.0 * np.einsum("ikd,id->ik", diff, vecs)
    c = np.einsum("ikd,ikd->ik", diff, diff) - delta * delta
    disc = b * b - 4.0 * a * c
    ok = disc >= 0.0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    sign_b = np.where(b >= 0.0, 1.0, -1.0)
    qf = -0.5 * (b + sign_b * sq)
    qf_safe = np.where(qf == 0.0, 1.0, qf)
    r1 = np.where(qf == 0.0, -0.5 * b / a, qf_safe / a)
    r2 = np.where(qf == 0.0, -0.5 * b / a, c / qf_safe)
    r_lo = np.minimum(r1, r2)
    r_hi = np.maximum(r1, r2)
    r_lo = np.where(np.abs(r_lo) < SNAP, 0.0, r_lo)
    r_lo = np.where(np.abs(r_lo - 1.0) < SNAP, 1.0, r_lo)
    r_hi = np.where(np.abs(r_hi) < SNAP, 0.0, r_hi)
    r_hi = np.where(np.abs(r_hi - 1.0) < SNAP, 1.0, r_hi)
    empty = ~ok | (r_hi < 0.0) | (r_lo > 1.0)
    lo = np.where(empty, np.nan, np.clip(r_lo, 0.0, 1.0))
    hi = np.where(empty, np.nan, np.clip(r_hi, 0.0, 1.0))
    return lo, hi


@dataclass(frozen=True)
class ExtremalPoint:
    """Left- or right-most point of the free space within one cell."""

    cell: tuple[int, int]
    side: str  # "left" | "right"
    x: CurveParam  # on the x-axis curve
    y: CurveParam  # on the y-axis curve
    ambiguity_role: str  # "unique" | "lower" | "upper"


class FreeSpaceDiagram:
    """Boundary free intervals of the delta-free space of a curve pair.

    ``hor_lo/hor_hi[i, j]``: free interval on the horizontal grid segment
    along P-edge i at Q-vertex j, shape (n, m+1).  ``ver_lo/ver_hi[i, j]``:
    along Q-edge j at P-vertex i, shape (n+1, m).  NaN marks empty.
    """

    __slots__ = ("P", "Q", "delta", "hor_lo", "hor_hi", "ver_lo", "ver_hi")

    def __init__(self, P: PolygonalCurve, Q: PolygonalCurve, delta: float,
                 _arrays=None):
        if delta < 0:
            raise ParameterError("delta must be >= 0")
        self.P = P
        self.Q = Q
        self.delta = float(delta)
        if _arrays is not None:
            self.hor_lo, self.hor_hi, self.ver_lo, self.ver_hi = _arrays
            return
        pv, qv = P.vertices, Q.vertices
        pu = np.diff(pv, axis=0)
        qu = np.diff(qv, axis=0)
        self.hor_lo, self.hor_hi = _solve_free_intervals(pv[:-1], pu, qv, delta)
        self.ver_lo, self.ver_hi = _solve_free_intervals(qv[:-1], qu, pv, delta)
        self.ver_lo = self.ver_lo.T.copy()
        self.ver_hi = self.ver_hi.T.copy()

    @property
    def p_edges(self) -> int:
        return self.P.n_edges

    @property
    def q_edges(self) -> int:
        return self.Q.n_edges

    def transpose(self) -> "FreeSpaceDiagram":
        """Diagram of (Q, P); shares the interval data bit-identically."""
        return FreeSpaceDiagram(
            self.Q, self.P, self.delta,
            _arrays=(self.ver_lo.T, self.ver_hi.T, self.hor_lo.T, self.hor_hi.T),
        )

    def cell_nonempty(self) -> np.ndarray:
        """Boolean (n, m): cell's free space is nonempty.

        A cell is nonempty iff some boundary interval is nonempty or the
        free ellipse lies strictly inside the cell (detected via the
        horizontal tangency of the distance quadratic).
        """
        n, m = self.p_edges, self.q_edges
        any_boundary = (
            ~np.isnan(self.hor_lo[:, :-1])
            | ~np.isnan(self.hor_lo[:, 1:])
            | ~np.isnan(self.ver_lo[:-1, :])
            | ~np.isnan(self.ver_lo[1:, :])
        )
        tx, ty, feas = self._tangency(left=True)
        return any_boundary | feas

    def _cell_vectors(self):
        pv, qv = self.P.vertices, self.Q.vertices
        u = np.diff(pv, axis=0)  # (n, d)
        v = np.diff(qv, axis=0)  # (m, d)
        c = pv[:-1][:, None, :] - qv[:-1][None, :, :]  # (n, m, d)
        return u, v, c

    def _tangency(self, left: bool):
        """Horizontal tangency of the per-cell free ellipse.

        Returns (x, y, feasible) arrays of shape (n, m) in local cell
        coordinates; the leftmost (or rightmost) point of the ellipse where
        the tangent is vertical, when it falls inside the cell.
        """
        u, v, c = self._cell_vectors()
        vv = np.einsum("md,md->m", v, v)[None, :]  # (1, m)
        uv = np.einsum("nd,md->nm", u, v)
        cv = np.einsum("nmd,md->nm", c, v)
        # components orthogonal to the Q-edge direction
        u_perp = u[:, None, :] - (uv / vv)[:, :, None] * v[None, :, :]
        c_perp = c - (cv / vv)[:, :, None] * v[None, :, :]
        A = np.einsum("nmd,nmd->nm", u_perp, u_perp)
        B = 2.0 * np.einsum("nmd,nmd->nm", c_perp, u_perp)
        C = np.einsum("nmd,nmd->nm", c_perp, c_perp) - self.delta ** 2
        uu = np.einsum("nd,nd->n", u, u)[:, None]
        nondeg = A > DEGENERATE_REL * uu
        disc = B * B - 4.0 * A * C
        ok = nondeg & (disc >= 0.0)
        sq = np.sqrt(np.where(ok, disc, 0.0))
        A_safe = np.where(nondeg, A, 1.0)
        x = (-B - sq) / (2.0 * A_safe) if left else (-B + sq) / (2.0 * A_safe)
        x = np.where(np.abs(x) < SNAP, 0.0, x)
        x = np.where(np.abs(x - 1.0) < SNAP, 1.0, x)
        y = (cv + x * uv) / vv
        y = np.where(np.abs(y) < SNAP, 0.0, y)
        y = np.where(np.abs(y - 1.0) < SNAP, 1.0, y)
        feasible = ok & (x >= 0.0) & (x <= 1.0) & (y >= 0.0) & (y <= 1.0)
        return x, y, feasible


def build_free_space(P: PolygonalCurve, Q: PolygonalCurve, delta: float) -> FreeSpaceDiagram:
    """Compute all boundary free intervals of the delta-free space of (P, Q)."""
    return FreeSpaceDiagram(P, Q, delta)


# -- extremal points --------------------------------------------------------


def extremal_points(diag: FreeSpaceDiagram, verify_membership: bool = True):
    """Left and right delta-extremal points of every nonempty cell.

    Per cell and side: the unique extreme point, or the upper-most and
    lower-most extreme points when the extreme set is a vertical segment
    (which, with zero-length edges removed, only happens on a cell's own
    vertical boundary).
    """
    out: list[ExtremalPoint] = []
    n, m = diag.p_edges, diag.q_edges
    hor_lo, hor_hi = diag.hor_lo, diag.hor_hi
    ver_lo, ver_hi = diag.ver_lo, diag.ver_hi
    lx, ly, lfeas = diag._tangency(left=True)
    rx, ry, rfeas = diag._tangency(left=False)

    any_cell = (
        ~np.isnan(hor_lo[:, :-1]) | ~np.isnan(hor_lo[:, 1:])
        | ~np.isnan(ver_lo[:-1, :]) | ~np.isnan(ver_lo[1:, :])
        | lfeas
    )
    cells = np.argwhere(any_cell)

    def emit(i, j, side, gx, gy, role):
        out.append(
            ExtremalPoint(
                cell=(i, j),
                side=side,
                x=param_from_grid(gx, n),
                y=param_from_grid(gy, m),
                ambiguity_role=role,
            )
        )

    def boundary_pair(i, j, side, x_local, lo, hi):
        gx = i + x_local
        if hi - lo > SNAP:
            emit(i, j, side, gx, j + lo, "lower")
            emit(i, j, side, gx, j + hi, "upper")
        else:
            emit(i, j, side, gx, j + lo, "unique")

    for i, j in cells:
        i, j = int(i), int(j)
        left_iv = (ver_lo[i, j], ver_hi[i, j])
        right_iv = (ver_lo[i + 1, j], ver_hi[i + 1, j])
        bot_iv = (hor_lo[i, j], hor_hi[i, j])
        top_iv = (hor_lo[i, j + 1], hor_hi[i, j + 1])

        # left extremal
        if not math.isnan(left_iv[0]):
            boundary_pair(i, j, "left", 0.0, left_iv[0], left_iv[1])
        else:
            cand = []
            if lfeas[i, j]:
                cand.append((float(lx[i, j]), float(ly[i, j])))
            if not math.isnan(bot_iv[0]):
                cand.append((float(bot_iv[0]), 0.0))
            if not math.isnan(top_iv[0]):
                cand.append((float(top_iv[0]), 1.0))
            if cand:
                x0, y0 = min(cand)
                emit(i, j, "left", i + x0, j + y0, "unique")
            elif not math.isnan(right_iv[0]):
                # free space only touches the right boundary
                boundary_pair(i, j, "left", 1.0, right_iv[0], right_iv[1])

        # right extremal
        if not math.isnan(right_iv[0]):
            boundary_pair(i, j, "right", 1.0, right_iv[0], right_iv[1])
        else:
            cand = []
            if rfeas[i, j]:
                cand.append((float(rx[i, j]), float(ry[i, j])))
            if not math.isnan(bot_iv[1]):
                cand.append((float(bot_iv[1]), 0.0))
            if not math.isnan(top_iv[1]):
                cand.append((float(top_iv[1]), 1.0))
            if cand:
                x0, y0 = max(cand)
                emit(i, j, "right", i + x0, j + y0, "unique")
            elif not math.isnan(left_iv[0]):
                boundary_pair(i, j, "right", 0.0, left_iv[0], left_iv[1])

    if verify_membership:
        for ep in out:
            d = np.linalg.norm(eval_param(diag.P, ep.x) - eval_param(diag.Q, ep.y))
            if d > diag.delta + MEMBER_TOL:
                raise AssertionError(
                    f"extremal point {ep} violates membership: dist {d} > {diag.delta}"
                )
    return out


# -- monotone reachability ---------------------------------------------------


def _clip_low(iv_lo, iv_hi, lo_bound):
    if math.isnan(iv_lo):
        return None
    lo = max(iv_lo, lo_bound)
    if lo > iv_hi:
        return None
    return (lo, iv_hi)


def monotone_path_exists(diag: FreeSpaceDiagram) -> bool:
    """True iff a coordinate-monotone path (0,0) -> (1,1) exists in the
    delta-free space (standard cell-by-cell reachability propagation)."""
    n, m = diag.p_edges, diag.q_edges
    hor_lo = diag.hor_lo.tolist()
    hor_hi = diag.hor_hi.tolist()
    ver_lo = diag.ver_lo.tolist()
    ver_hi = diag.ver_hi.tolist()

    # corner (0,0) must be free
    h00 = hor_lo[0][0]
    v00 = ver_lo[0][0]
    if (math.isnan(h00) or h00 > 0.0) and (math.isnan(v00) or v00 > 0.0):
        return False

    # reachable prefix of the bottom boundary row
    B: list = [None] * n
    open_run = True
    for i in range(n):
        lo, hi = hor_lo[i][0], hor_hi[i][0]
        if open_run and not math.isnan(lo) and lo <= 0.0:
            B[i] = (0.0, hi)
            open_run = hi >= 1.0
        else:
            B[i] = None
            open_run = False

    # reachable prefix of the left boundary column
    Lcol: list = [None] * m
    open_run = True
    for j in range(m):
        lo, hi = ver_lo[0][j], ver_hi[0][j]
        if open_run and not math.isnan(lo) and lo <= 0.0:
            Lcol[j] = (0.0, hi)
            open_run = hi >= 1.0
        else:
            Lcol[j] = None
            open_run = False

    R = None
    T = None
    for j in range(m):
        L = Lcol[j]
        for i in range(n):
            bottom = B[i]
            left = L
            R = None
            T = None
            if bottom is not None or left is not None:
                if bottom is not None:
                    R = _clip_low(ver_lo[i + 1][j], ver_hi[i + 1][j], 0.0)
                else:
                    R = _clip_low(ver_lo[i + 1][j], ver_hi[i + 1][j], left[0])
                if left is not None:
                    T = _clip_low(hor_lo[i][j + 1], hor_hi[i][j + 1], 0.0)
                else:
                    T = _clip_low(hor_lo[i][j + 1], hor_hi[i][j + 1], bottom[0])
            B[i] = T
            L = R
    top_right_T = B[n - 1]
    if top_right_T is not None and top_right_T[1] >= 1.0 - SNAP:
        return True
    if R is not None and R[1] >= 1.0 - SNAP:
        return True
    return False


def frechet_decision(
    P: PolygonalCurve,
    Q: PolygonalCurve,
    delta: float,
    start: tuple[CurveParam, CurveParam] | None = None,
    end: tuple[CurveParam, CurveParam] | None = None,
) -> bool:
    """Decide whether a monotone path exists in the delta-free space of
    (P, Q) from ``start`` to ``end`` (defaults: full diagram corners).

    With the defaults this decides d_F(P, Q) <= delta.
    """
    if start is None:
        start = (P.start_param(), Q.start_param())
    if end is None:
        end = (P.end_param(), Q.end_param())
    pa, qa = P.check_param(start[0]), Q.check_param(start[1])
    pb, qb = P.check_param(end[0]), Q.check_param(end[1])
    if pa > pb or qa > qb:
        raise ParameterError("start must be componentwise <= end")

    p_degenerate = pa == pb or pb.to_grid() - pa.to_grid() <= SNAP
    q_degenerate = qa == qb or qb.to_grid() - qa.to_grid() <= SNAP
    if p_degenerate and q_degenerate:
        d = np.linalg.norm(eval_param(P, pa) - eval_param(Q, qa))
        return bool(d <= delta)
    if p_degenerate:
        sub = extract_subcurve(Q, qa, qb)
        return point_to_curve_distance(eval_param(P, pa), sub) <= delta
    if q_degenerate:
        sub = extract_subcurve(P, pa, pb)
        return point_to_curve_distance(eval_param(Q, qa), sub) <= delta
    subP = extract_subcurve(P, pa, pb)
    subQ = extract_subcurve(Q, qa, qb)
    return monotone_path_exists(FreeSpaceDiagram(subP, subQ, delta))


def occupancy_text(diag: FreeSpaceDiagram) -> str:
    """Cell occupancy as a text grid, row m-1 at the top ('#' nonempty)."""
    occ = diag.cell_nonempty()
    lines = []
    for j in range(diag.q_edges - 1, -1, -1):
        lines.append("".join("#" if occ[i, j] else "." for i in range(diag.p_edges)))
    return "\n".join(lines)
