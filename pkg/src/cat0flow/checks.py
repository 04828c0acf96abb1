"""Sampled invariant suites over the model spaces and functional catalog.

Each suite returns a list of records {invariant, samples, worst_slack,
pass}; slacks are signed so that negative values are failures. The CLI
`check` subcommand and the acceptance tests both run these.
"""

from __future__ import annotations

import math
import zlib

import numpy as np

from . import geometry as geo
from .functionals import (
    gradient_pair_check,
    gradient_support_check,
    hoelder_check,
    lambda_convexity_check,
    linear_drift,
    min_coordinate,
    moving_min,
    sum_squared,
    weighted_sum,
)
from .geometry import EuclideanSpace, ProductSpace, QuadrantSpace, TreeSpace
from .pursuit import MovingTarget, distance_to_target, footpoint_stability_check
from .resolvent import resolvent_contraction_check

__all__ = [
    "catalog_functionals",
    "catalog_spaces",
    "run_suites",
    "suite_barycenter",
    "suite_cat0",
    "suite_contraction",
    "suite_footpoint",
    "suite_gradient",
    "suite_hoelder",
    "tripod",
]


def _rng(seed: int, label: str):
    return np.random.default_rng((seed & 0xFFFFFFFF) ^ zlib.crc32(label.encode("utf8")))


def tripod() -> TreeSpace:
    """Three unit legs meeting at a central vertex."""
    return TreeSpace([("c", "a", 1.0), ("c", "b", 1.0), ("c", "d", 1.0)])


def catalog_spaces():
    return [
        ("euclidean2", EuclideanSpace(2)),
        ("quadrant", QuadrantSpace()),
        ("tripod", tripod()),
        ("product", ProductSpace(tripod(), EuclideanSpace(1))),
    ]


def catalog_functionals():
    """Representative instances of every catalog entry, with a sampling
    window (t_lo, t_hi) for time-dependent checks."""
    tree = tripod()
    e2 = EuclideanSpace(2)
    anchors_e = [(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]
    anchors_t = [tree.validate_point((0, 1.0)), tree.validate_point((1, 1.0)), tree.validate_point((2, 0.5))]
    evader = MovingTarget(e2, "point", [0.0, 8.0], [(2.0, 0.0), (2.0, 8.0)])
    return [
        ("linear_drift", linear_drift(), (0.0, 2.0)),
        ("min_coordinate", min_coordinate(), (0.0, 1.0)),
        ("moving_min", moving_min(), (0.0, 1.0)),
        ("sum_squared_euclid", sum_squared(e2, anchors_e), (0.0, 1.0)),
        ("sum_squared_tree", sum_squared(tree, anchors_t), (0.0, 1.0)),
        ("distance_to_point", distance_to_target(e2, evader), (0.0, 8.0)),
        (
            "weighted_mix",
            weighted_sum(e2, [(0.5, sum_squared(e2, anchors_e)), (1.0, sum_squared(e2, [(1.0, 1.0)]))]),
            (0.0, 1.0),
        ),
    ]


def _record(name, samples, worst, tol=0.0):
    return {"invariant": name, "samples": samples, "worst_slack": worst, "pass": worst >= -tol}


def suite_cat0(seed: int = 0, samples: int = 1000):
    """Metric axioms, geodesic parameterization, the quadruple comparison
    inequality, and the tangent-cone angle bound, per model space."""
    out = []
    for label, space in catalog_spaces():
        rng = _rng(seed, "cat0:" + label)
        worst_metric = math.inf
        worst_geo = math.inf
        worst_quad = math.inf
        worst_cone = math.inf
        worst_log = math.inf
        for _ in range(samples):
            x = geo.random_point(space, rng)
            y = geo.random_point(space, rng)
            z = geo.random_point(space, rng)
            dxy = space.distance(x, y)
            worst_metric = min(worst_metric, 1e-9 - abs(dxy - space.distance(y, x)))
            worst_metric = min(worst_metric, space.distance(x, z) + 1e-9 - abs(dxy - space.distance(y, z)))
            worst_metric = min(worst_metric, dxy + space.distance(y, z) - space.distance(x, z) + 1e-9)
            a, b = sorted((float(rng.random()), float(rng.random())))
            ga = space.geodesic_point(x, y, a)
            gb = space.geodesic_point(x, y, b)
            worst_geo = min(worst_geo, 1e-9 * max(1.0, dxy) - abs(space.distance(ga, gb) - (b - a) * dxy))
            t = float(rng.random())
            _, slack = geo.cat0_quadruple_check(space, z, x, y, t)
            worst_quad = min(worst_quad, slack + 1e-9)
            if dxy > 1e-9:
                v = geo.log_direction(space, x, y)
                ip = geo.inner_product(v, v)
                worst_log = min(worst_log, 1e-9 * max(1.0, dxy * dxy) - abs(ip - dxy * dxy))
                if space.distance(x, z) > 1e-9:
                    w = geo.log_direction(space, x, z)
                    u = geo.random_point(space, rng)
                    if space.distance(x, u) > 1e-9:
                        vu = geo.log_direction(space, x, u)
                        unit = vu.scaled(1.0 / vu.length)
                        _, slack = geo.angle_difference_bound_check(v, w, unit)
                        worst_cone = min(worst_cone, slack + 1e-9)
        out.append(_record(f"cat0.metric[{label}]", samples, worst_metric))
        out.append(_record(f"cat0.geodesic[{label}]", samples, worst_geo))
        out.append(_record(f"cat0.quadruple[{label}]", samples, worst_quad))
        out.append(_record(f"cat0.log_inner[{label}]", samples, worst_log))
        out.append(_record(f"cat0.angle_bound[{label}]", samples, worst_cone))
    return out


def suite_contraction(seed: int = 0, samples: int = 500, steps=(0.1, 0.01)):
    """Proximal-step distance contraction d(Jx, Jy) <= d(x, y)/(1 + lam h)."""
    out = []
    for label, f, (t_lo, t_hi) in catalog_functionals():
        rng = _rng(seed, "contraction:" + label)
        for h in steps:
            worst = math.inf
            n_done = 0
            for _ in range(samples):
                t = t_lo + (t_hi - t_lo) * float(rng.random())
                x = geo.random_point(f.space, rng)
                y = geo.random_point(f.space, rng)
                if f.space.distance(x, y) <= 1e-12:
                    continue
                _, ratio, bound = resolvent_contraction_check(f, t, x, y, h)
                worst = min(worst, bound - ratio)
                n_done += 1
            out.append(_record(f"contraction[{label},h={h}]", n_done, worst))
    return out


def suite_gradient(seed: int = 0, samples: int = 500):
    """Convexity along geodesics, the descent-vector support inequality,
    and the two-point descent pairing."""
    out = []
    for label, f, (t_lo, t_hi) in catalog_functionals():
        rng = _rng(seed, "gradient:" + label)
        worst_conv = math.inf
        worst_supp = math.inf
        worst_pair = math.inf
        n_pair = 0
        for _ in range(samples):
            t = t_lo + (t_hi - t_lo) * float(rng.random())
            x = geo.random_point(f.space, rng)
            y = geo.random_point(f.space, rng)
            tau = float(rng.random())
            _, slack = lambda_convexity_check(f, t, x, y, tau)
            worst_conv = min(worst_conv, slack + 1e-9)
            if f.space.distance(x, y) > 1e-6 and n_pair < max(40, samples // 10):
                _, slack = gradient_support_check(f, t, x, y)
                worst_supp = min(worst_supp, slack)
                _, slack = gradient_pair_check(f, t, x, y)
                worst_pair = min(worst_pair, slack)
                n_pair += 1
        out.append(_record(f"gradient.convexity[{label}]", samples, worst_conv))
        out.append(_record(f"gradient.support[{label}]", n_pair, worst_supp, tol=1e-4))
        out.append(_record(f"gradient.pair[{label}]", n_pair, worst_pair, tol=1e-4))
    return out


def suite_hoelder(seed: int = 0, samples: int = 300):
    """Declared time-regularity of the descent field, sampled."""
    out = []
    for label, f, (t_lo, t_hi) in catalog_functionals():
        if f.hoelder is None:
            continue
        rng = _rng(seed, "hoelder:" + label)
        worst = math.inf
        n_done = 0
        for _ in range(samples):
            x = geo.random_point(f.space, rng)
            t1 = t_lo + (t_hi - t_lo) * float(rng.random())
            window = min(f.hoelder.B0, t_hi - t_lo)
            t2 = min(t_hi, t1 + window * float(rng.random()))
            if t1 == t2:
                continue
            _, slack = hoelder_check(f, x, t1, t2)
            worst = min(worst, slack + 1e-9)
            n_done += 1
        out.append(_record(f"hoelder[{label}]", n_done, worst))
    return out


def suite_footpoint(seed: int = 0, samples: int = 500):
    """Footpoint drift bounds under unit-speed target motion, plus the
    right-angle inequality at the footpoint."""
    e2 = EuclideanSpace(2)
    targets = [
        ("point", MovingTarget(e2, "point", [0.0, 4.0], [(0.0, 0.0), (4.0, 0.0)])),
        (
            "segment",
            MovingTarget(
                e2, "segment", [0.0, 4.0],
                [((0.0, 0.0), (2.0, 0.0)), ((0.0, 4.0), (2.0, 4.0))],
            ),
        ),
        ("ball", MovingTarget(e2, "ball", [0.0, 4.0], [((0.0, 0.0), 0.5), ((0.0, 2.0), 1.5)])),
    ]
    out = []
    for label, moving in targets:
        rng = _rng(seed, "footpoint:" + label)
        worst_stab = math.inf
        worst_pyth = math.inf
        for _ in range(samples):
            p = geo.random_point(e2, rng, scale=3.0)
            t1 = 4.0 * float(rng.random())
            t2 = 4.0 * float(rng.random())
            _, det = footpoint_stability_check(moving, p, t1, t2)
            worst_stab = min(
                worst_stab,
                det["footpoint_bound"] - det["footpoint_move"] + 1e-9,
                det["dt"] - det["gap_change"] + 1e-9,
            )
            target = moving.position(t1)
            q = target.footpoint(p)
            y = target.sample_point(rng)
            lhs = e2.distance(p, y) ** 2
            rhs = e2.distance(p, q) ** 2 + e2.distance(q, y) ** 2
            worst_pyth = min(worst_pyth, lhs - rhs + 1e-9)
        out.append(_record(f"footpoint.stability[{label}]", samples, worst_stab))
        out.append(_record(f"footpoint.right_angle[{label}]", samples, worst_pyth))
    return out


def suite_barycenter(seed: int = 0, samples: int = 200):
    """Barycenter curve of unit-speed evaders is 1-Lipschitz, on the plane
    and on the tripod."""
    from .pursuit import EvaderSet, barycenter_lipschitz_check

    e2 = EuclideanSpace(2)
    tree = tripod()
    ev_e = EvaderSet(
        [
            MovingTarget(e2, "point", [0.0, 4.0], [(0.0, 0.0), (4.0, 0.0)]),
            MovingTarget(e2, "point", [0.0, 4.0], [(3.0, 1.0), (3.0, -3.0)]),
        ]
    )
    ev_t = EvaderSet(
        [
            MovingTarget(tree, "point", [0.0, 1.0], [tree.validate_point((0, 1.0)), tree.validate_point((0, 0.0))]),
            MovingTarget(tree, "point", [0.0, 1.0], [tree.validate_point((1, 0.2)), tree.validate_point((1, 1.0))]),
            MovingTarget(tree, "point", [0.0, 1.0], [tree.validate_point((2, 0.5)), tree.validate_point((2, 0.0))]),
        ]
    )
    out = []
    for label, evs, span in (("euclidean", ev_e, 4.0), ("tripod", ev_t, 1.0)):
        rng = _rng(seed, "barycenter:" + label)
        worst = math.inf
        for _ in range(samples):
            t1 = span * float(rng.random())
            t2 = span * float(rng.random())
            _, det = barycenter_lipschitz_check(evs, t1, t2)
            worst = min(
                worst,
                det["mean_evader_move"] - det["moved"] + 1e-7,
                det["dt"] - det["moved"] + 1e-7,
            )
        out.append(_record(f"barycenter.lipschitz[{label}]", samples, worst))
    return out


SUITES = {
    "cat0": suite_cat0,
    "contraction": suite_contraction,
    "gradient": suite_gradient,
    "hoelder": suite_hoelder,
    "footpoint": suite_footpoint,
    "barycenter": suite_barycenter,
}


def run_suites(names, seed: int = 0, jobs: int = 1, samples: dict | None = None):
    """Run the named suites (or all) and return their records sorted by
    invariant name; `samples` may override per-suite sample counts."""
    if isinstance(names, str):
        names = [names]
    chosen = list(SUITES) if not names or list(names) == ["all"] else list(names)
    for name in chosen:
        if name not in SUITES:
            raise KeyError(name)

    def call(name):
        kw = {"seed": seed}
        if samples and name in samples:
            kw["samples"] = samples[name]
        return SUITES[name](**kw)

    results = []
    if jobs > 1 and len(chosen) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(call, chosen):
                results.extend(part)
    else:
        for name in chosen:
            results.extend(call(name))
    results.sort(key=lambda r: r["invariant"])
    return results
