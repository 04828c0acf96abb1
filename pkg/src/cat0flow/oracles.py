"""Brute-force grid references for the proximal-step solvers.

The oracle minimizes the step energy over a dense grid and refines the
grid around the running argmin. The refinement window at each level is
wide enough to contain the true minimizer (strong convexity of the step
energy localizes it near the grid argmin); if the argmin ever lands on
the window edge the window is grown instead of trusted. Landing on the
boundary of the search region itself is reported as an error, since it
means the region failed the contract of containing the minimizer.

All values feeding acceptance comparisons are certified here first and
frozen into a fixtures file; the main test suite reads the fixtures.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import flow as flow_mod
from . import geometry as geo
from .errors import DataError, RegionTooSmallError, UsageError
from .functionals import Functional
from .geometry import EuclideanSpace, ProductSpace, QuadrantSpace, TreePoint, TreeSpace

__all__ = [
    "GridOracle",
    "certify_resolve_cases",
    "convergence_order",
    "load_fixtures",
    "oracle_resolve",
    "reference_trajectory",
    "write_fixtures",
]

GRID_PER_DIM = 33
MARGIN_CELLS = 4
MAX_LEVELS = 60
MAX_PTS_PER_AXIS = 1200


# ---------------------------------------------------------------------------
# grids


class _BoxGrid:
    def __init__(self, space, axes):
        self.space = space
        self.axes = axes
        mesh = np.meshgrid(*axes, indexing="ij")
        self.pts = np.stack([m.ravel() for m in mesh], axis=1)

    def size(self):
        return self.pts.shape[0]

    def sqd(self, p):
        diff = self.pts - np.asarray(p, dtype=float)
        return (diff * diff).sum(axis=1)

    def coord(self, i):
        return self.pts[:, i]

    def point_at(self, k):
        return tuple(float(v) for v in self.pts[k])


class _TreeGrid:
    def __init__(self, space: TreeSpace, eids, offs):
        self.space = space
        self.eids = np.asarray(eids, dtype=np.int64)
        self.offs = np.asarray(offs, dtype=float)
        self.lens = np.array([e[2] for e in space.edges], dtype=float)

    def size(self):
        return self.eids.shape[0]

    def _dist(self, p: TreePoint):
        sp = self.space
        du = np.array([sp.point_vertex_distance(p, e[0]) for e in sp.edges])
        dv = np.array([sp.point_vertex_distance(p, e[1]) for e in sp.edges])
        d = np.minimum(self.offs + du[self.eids], self.lens[self.eids] - self.offs + dv[self.eids])
        same = self.eids == p.edge
        if same.any():
            d = np.where(same, np.minimum(d, np.abs(self.offs - p.offset)), d)
        return d

    def sqd(self, p):
        d = self._dist(self.space.canonicalize(p) if isinstance(p, TreePoint) else self.space.validate_point(p))
        return d * d

    def point_at(self, k):
        return self.space.canonicalize(TreePoint(int(self.eids[k]), float(self.offs[k])))


class _ProductGrid:
    def __init__(self, space: ProductSpace, left, right):
        self.space = space
        self.left = left
        self.right = right
        li, ri = np.meshgrid(np.arange(left.size()), np.arange(right.size()), indexing="ij")
        self.li = li.ravel()
        self.ri = ri.ravel()

    def size(self):
        return self.li.shape[0]

    def sqd(self, p):
        return self.left.sqd(p[0])[self.li] + self.right.sqd(p[1])[self.ri]

    def point_at(self, k):
        return (self.left.point_at(int(self.li[k])), self.right.point_at(int(self.ri[k])))


# ---------------------------------------------------------------------------
# vectorized functional values


def _values(f: Functional, t0: float, grid) -> np.ndarray:
    name = f.name
    if name == "linear_drift":
        return -(t0 + 1.0) * grid.coord(0)
    if name == "min_coordinate":
        return -np.minimum(grid.coord(0), grid.coord(1))
    if name == "moving_min":
        return -np.minimum(grid.coord(0) - t0, grid.coord(1))
    if name == "sum_squared":
        acc = None
        for a in f.anchors:
            term = grid.sqd(a)
            acc = term if acc is None else acc + term
        return acc / float(len(f.anchors))
    if name == "distance_to_target":
        return _target_values(f.moving.position(t0), grid)
    if name == "weighted_sum":
        acc = np.zeros(grid.size())
        for w, term in f.terms:
            acc = acc + w * _values(term, t0, grid)
        return acc
    # slow fallback: evaluate pointwise
    return np.array([f.eval_fn(t0, grid.point_at(k)) for k in range(grid.size())])


def _target_values(target, grid) -> np.ndarray:
    kind = target.kind
    if kind == "point":
        return np.sqrt(grid.sqd(target.point))
    if kind == "ball":
        return np.maximum(0.0, np.sqrt(grid.sqd(target.center)) - target.radius)
    if kind == "segment" and isinstance(grid, _BoxGrid):
        a = np.asarray(target.a, dtype=float)
        b = np.asarray(target.b, dtype=float)
        ab = b - a
        den = float((ab * ab).sum())
        if den == 0.0:
            return np.sqrt(grid.sqd(target.a))
        u = np.clip(((grid.pts - a) @ ab) / den, 0.0, 1.0)
        proj = a + u[:, None] * ab
        diff = grid.pts - proj
        return np.sqrt((diff * diff).sum(axis=1))
    if kind == "segment" and isinstance(grid, _TreeGrid):
        return _tree_segment_values(grid, target.a, target.b)
    if kind == "subtree":
        acc = None
        for e, lo, hi in target.segments:
            a = grid.space.canonicalize(TreePoint(e, lo))
            b = grid.space.canonicalize(TreePoint(e, hi))
            vals = _tree_segment_values(grid, a, b)
            acc = vals if acc is None else np.minimum(acc, vals)
        return acc
    return np.array([target.distance(grid.point_at(k)) for k in range(grid.size())])


def _tree_segment_values(grid: _TreeGrid, a, b) -> np.ndarray:
    da = grid._dist(a)
    db = grid._dist(b)
    dab = grid.space.distance(a, b)
    return np.maximum(0.0, 0.5 * (da + db - dab))


# ---------------------------------------------------------------------------
# refinement search


def _energy(f, t0, x0, h, grid):
    return _values(f, t0, grid) + grid.sqd(x0) / (2.0 * h)


def _box_bounds(space, x0, radius):
    hard_lo = isinstance(space, QuadrantSpace)
    bounds = []
    for c in x0:
        lo = c - radius
        hard = False
        if hard_lo and lo < 0.0:
            lo = 0.0
            hard = True
        bounds.append([lo, c + radius, hard])
    return bounds


def _localization_radius(f, t0, x0, h, pt, cell_diag, window_diag):
    """How far the true minimizer can sit from a window grid argmin.

    Some grid point lies within cell_diag/2 of the minimizer, so the argmin
    energy is within L*cell_diag/2 of optimal, where L bounds the step
    energy's Lipschitz constant over the window. The energy is
    (lam + 1/h)-strongly convex, which turns that energy gap into the
    distance bound sqrt(L*cell_diag/kappa). This sqrt-scale radius, not a
    fixed multiple of the cell, is what makes refinement sound when the
    functional has kinks off the grid axes."""
    kappa = f.lam + 1.0 / h
    reach = f.space.distance(x0, pt) + window_diag
    lip = f.lipschitz_x_on(t0, pt, window_diag) + reach / h
    return math.sqrt(max(lip, 0.0) * cell_diag / kappa)


def _axis_counts(widths, cells, pitch):
    """Grid sizes that shrink each axis cell 4x per level, floored at the
    pitch and capped so grids stay a bounded numpy allocation."""
    counts = []
    for width, cell in zip(widths, cells):
        target = max(pitch, cell / 4.0)
        n = int(math.ceil(width / target)) + 1
        counts.append(max(2, min(MAX_PTS_PER_AXIS, n)))
    return counts


def _box_search(f, t0, x0, h, bounds, pitch):
    """Refine a box window around the running argmin. The window always
    keeps the true minimizer: it starts from a provable step bound, then
    shrinks to the strong-convexity localization radius around the argmin.
    Edge hits (possible only when pinned by the caller's region or the
    lam < 0 slack) grow the window instead of being trusted; a window
    pinned at the region bound errors out."""
    space = f.space
    dim = len(x0)
    lo = [b[0] for b in bounds]
    hi = [b[1] for b in bounds]
    counts = [GRID_PER_DIM] * dim
    for _ in range(MAX_LEVELS):
        axes = [np.linspace(lo[i], hi[i], counts[i]) for i in range(dim)]
        grid = _BoxGrid(space, axes)
        energy = _energy(f, t0, x0, h, grid)
        k = int(np.argmin(energy))
        pt = grid.point_at(k)
        cells = [(hi[i] - lo[i]) / (counts[i] - 1) for i in range(dim)]
        grow = []
        for i in range(dim):
            if cells[i] == 0.0:
                continue
            near_lo = pt[i] <= lo[i] + 0.51 * cells[i]
            near_hi = pt[i] >= hi[i] - 0.51 * cells[i]
            if near_lo and bounds[i][2] and lo[i] <= bounds[i][0] + 1e-15:
                continue  # resting on a wall of the space itself is a valid argmin
            if near_lo or near_hi:
                grow.append(i)
        if grow:
            for i in grow:
                width = hi[i] - lo[i]
                new_lo = max(bounds[i][0], pt[i] - width)
                new_hi = min(bounds[i][1], pt[i] + width)
                if new_hi - new_lo <= (hi[i] - lo[i]) + 1e-15 and (
                    abs(new_lo - lo[i]) <= 1e-15 and abs(new_hi - hi[i]) <= 1e-15
                ):
                    raise RegionTooSmallError(
                        f"step-energy argmin pressed against the search region on coordinate {i}"
                    )
                lo[i], hi[i] = new_lo, new_hi
            continue
        if max(cells) <= pitch:
            return space.validate_point(pt)
        cell_diag = math.sqrt(sum(c * c for c in cells))
        window_diag = math.sqrt(sum((hi[i] - lo[i]) ** 2 for i in range(dim)))
        r = _localization_radius(f, t0, x0, h, pt, cell_diag, window_diag) + cell_diag
        for i in range(dim):
            # the minimizer is in the old window AND within r of the argmin
            lo[i] = max(lo[i], pt[i] - r)
            hi[i] = min(hi[i], pt[i] + r)
        counts = _axis_counts([hi[i] - lo[i] for i in range(dim)], cells, pitch)
    raise UsageError("grid refinement did not reach the requested pitch")


def _tree_ball_intervals(space: TreeSpace, center: TreePoint, radius: float):
    """Offset intervals of each edge within tree distance `radius` of
    center. On any edge the distance is concave piecewise linear, so the
    sublevel set is at most two end intervals plus the direct interval on
    the center's own edge."""
    out = []
    for eid, (u, v, length) in enumerate(space.edges):
        ivs = []
        du = space.point_vertex_distance(center, u)
        dv = space.point_vertex_distance(center, v)
        if radius - du >= 0.0:
            ivs.append((0.0, min(length, radius - du)))
        if radius - dv >= 0.0:
            ivs.append((max(0.0, length - (radius - dv)), length))
        if eid == center.edge:
            ivs.append((max(0.0, center.offset - radius), min(length, center.offset + radius)))
        ivs.sort()
        merged = []
        for a, b in ivs:
            if merged and a <= merged[-1][1] + 1e-15:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        for a, b in merged:
            out.append((eid, a, b))
    return out


def _tree_grid_from_intervals(space, intervals, pitch):
    eids = []
    offs = []
    for eid, a, b in intervals:
        n = max(2, int(math.ceil((b - a) / pitch)) + 1) if b > a else 1
        for k in range(n):
            eids.append(eid)
            offs.append(a + (b - a) * k / (n - 1) if n > 1 else a)
    return _TreeGrid(space, eids, offs)


def _tree_search(f, t0, x0, h, pitch):
    """Level 0 covers every edge; later levels sample a tree ball of the
    strong-convexity localization radius around the argmin. A ball-boundary
    argmin means the window lost the true minimizer (balls are convex), so
    the ball grows instead."""
    space = f.space
    intervals = [(i, 0.0, e[2]) for i, e in enumerate(space.edges)]
    whole = sum(e[2] for e in space.edges)
    level_pitch = max(e[2] for e in space.edges) / 32.0
    window_diam = whole
    ball_center = None
    radius = None
    for _ in range(MAX_LEVELS):
        grid = _tree_grid_from_intervals(space, intervals, level_pitch)
        energy = _energy(f, t0, x0, h, grid)
        k = int(np.argmin(energy))
        center = grid.point_at(k)
        if radius is not None and space.distance(center, ball_center) >= radius - 1.6 * level_pitch:
            radius *= 2.0
            window_diam = 2.0 * radius
            intervals = _tree_ball_intervals(space, ball_center, radius)
            continue
        if level_pitch <= pitch:
            return center
        loc = _localization_radius(f, t0, x0, h, center, level_pitch, window_diam)
        radius = loc + 2.0 * level_pitch
        ball_center = center
        window_diam = 2.0 * radius
        intervals = _tree_ball_intervals(space, center, radius)
        level_pitch = max(pitch, level_pitch / 4.0, 2.0 * radius / MAX_PTS_PER_AXIS)
    raise UsageError("grid refinement did not reach the requested pitch")


def _component_axes(space, c, radius, cell):
    if isinstance(space, (EuclideanSpace, QuadrantSpace)):
        bounds = _box_bounds(space, c, radius)
        axes = []
        for b in bounds:
            n = max(2, min(MAX_PTS_PER_AXIS, int(math.ceil((b[1] - b[0]) / cell)) + 1))
            axes.append(np.linspace(b[0], b[1], n))
        return _BoxGrid(space, axes)
    if isinstance(space, TreeSpace):
        ivs = _tree_ball_intervals(space, space.canonicalize(c), radius)
        total = sum(b - a for _, a, b in ivs)
        return _tree_grid_from_intervals(space, ivs, max(cell, total / MAX_PTS_PER_AXIS))
    raise UsageError(f"oracle does not support component space kind {space.kind}")


def _product_search(f, t0, x0, h, radius, pitch):
    """Component windows are balls around the running argmin components,
    shrunk per level to the strong-convexity localization radius; a
    component argmin reaching its ball boundary grows the window."""
    space = f.space
    center = x0
    level_radius = radius
    cell = max(pitch, 2.0 * radius / (GRID_PER_DIM - 1))
    for _ in range(MAX_LEVELS):
        grid = _ProductGrid(
            space,
            _component_axes(space.left, center[0], level_radius, cell),
            _component_axes(space.right, center[1], level_radius, cell),
        )
        energy = _energy(f, t0, x0, h, grid)
        k = int(np.argmin(energy))
        new_center = grid.point_at(k)
        moved = max(
            space.left.distance(center[0], new_center[0]),
            space.right.distance(center[1], new_center[1]),
        )
        if moved >= level_radius - 1.6 * cell:
            level_radius *= 2.0
            continue
        center = new_center
        if cell <= pitch:
            return center
        # offsets of the nearest grid point add across the two components
        cell_diag = cell * math.sqrt(2.0)
        loc = _localization_radius(f, t0, x0, h, center, cell_diag, 2.0 * level_radius)
        level_radius = loc + 2.0 * cell
        cell = max(pitch, cell / 4.0, 2.0 * level_radius / MAX_PTS_PER_AXIS)
    raise UsageError("grid refinement did not reach the requested pitch")


def oracle_resolve(f: Functional, t0: float, x0, h: float, region=None, pitch: float = 1e-4):
    """Grid argmin of the step energy F(t0, .) + d(x0, .)^2 / 2h.

    region: for box spaces, [(lo, hi), ...] per coordinate; trees always
    search their whole edge set. Defaults to a ball around x0 sized from
    the gradient norm, which always contains the proximal step.
    """
    if pitch <= 0.0:
        raise UsageError("pitch must be positive")
    if h <= 0.0:
        raise UsageError("step size must be positive")
    space = f.space
    x0 = space.validate_point(x0)
    gnorm = f.grad_fn(t0, x0).length
    radius = h * (gnorm + 1.0) + max(0.05, 16.0 * pitch)
    # refine to half the requested pitch per axis so the certified point is
    # within pitch in the space metric even on two-axis grids
    fine = 0.5 * pitch
    if isinstance(space, (EuclideanSpace, QuadrantSpace)):
        if region is not None:
            bounds = [[float(lo), float(hi), False] for lo, hi in region]
            if isinstance(space, QuadrantSpace):
                for b in bounds:
                    if b[0] <= 0.0:
                        b[0] = max(0.0, b[0])
                        b[2] = True
        else:
            bounds = _box_bounds(space, x0, radius)
        return _box_search(f, t0, x0, h, bounds, fine)
    if isinstance(space, TreeSpace):
        return _tree_search(f, t0, x0, h, fine)
    if isinstance(space, ProductSpace):
        return _product_search(f, t0, x0, h, radius, fine)
    raise UsageError(f"oracle does not support space kind {space.kind}")


class GridOracle:
    """Bundles a pitch and an optional region for repeated certifications."""

    def __init__(self, pitch: float = 1e-4, region=None):
        self.pitch = pitch
        self.region = region

    def resolve(self, f: Functional, t0: float, x0, h: float):
        return oracle_resolve(f, t0, x0, h, region=self.region, pitch=self.pitch)


# ---------------------------------------------------------------------------
# reference runs and convergence fits


def reference_trajectory(f: Functional, t0: float, x0, s: float, h_ref: float, record_every: int = 1):
    """Fine-step reference curve used as ground truth; h_ref must resolve
    the horizon to 1e-4 s or better."""
    if h_ref > 1e-4 * s:
        raise UsageError(f"h_ref={h_ref} too coarse for horizon {s}; need h_ref <= {1e-4 * s}")
    return flow_mod.time_dependent_curve(f, t0, x0, s, flow_mod.euler_scheme(h_ref), record_every=record_every)


def convergence_order(pairs) -> float:
    """Least-squares slope of log(err) against log(h)."""
    pts = list(pairs)
    if len(pts) < 3:
        raise DataError("need at least three (h, err) pairs")
    xs = []
    ys = []
    for h, err in pts:
        if h <= 0.0 or err <= 0.0:
            raise DataError(f"convergence data must be positive, got ({h}, {err})")
        xs.append(math.log(h))
        ys.append(math.log(err))
    n = float(len(xs))
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    if sxx == 0.0:
        raise DataError("step sizes are all equal")
    return sxy / sxx


# ---------------------------------------------------------------------------
# fixtures


def certify_resolve_cases(cases: dict, pitch: float = 1e-4) -> dict:
    """cases: key -> (functional, t0, x0, h). Returns key -> certified
    record with the oracle argmin frozen in spec form."""
    out = {}
    for key, (f, t0, x0, h) in cases.items():
        pt = oracle_resolve(f, t0, x0, h, pitch=pitch)
        out[key] = {
            "t0": t0,
            "x0": geo.point_to_spec(f.space, f.space.validate_point(x0)),
            "h": h,
            "point": geo.point_to_spec(f.space, pt),
            "pitch": pitch,
        }
    return out


def write_fixtures(path, fixtures: dict):
    with open(path, "w") as fh:
        json.dump(fixtures, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return path


def load_fixtures(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
