"""Machine-checkable property suite for the scaling behaviour.

Every claimed law -- the variant quantities with their exact factors,
the invariance of the geodesic machinery, and the optimizer step-size
equivalence -- appears here as one named check that measures a worst
deviation over a seeded sweep and compares it against a pinned
tolerance.  One deliberately inverted check demonstrates that a
position-dependent factor breaks connection invariance, so its
criterion is a lower bound instead of an upper bound.

Per-check random streams are derived by hashing the root seed together
with the check id; adding checks therefore never perturbs existing
ones, and a report is byte-reproducible from its seed.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._version import __version__
from .charts import (
    builtin_charts,
    chart_from_string,
    christoffel_at,
    geodesic_integrate,
    scale_chart_constant,
    scale_chart_pointwise,
    spherical_to_ambient,
    volume_density,
    chart_curve_length,
)
from .manifolds import Manifold, ManifoldPoint, Sphere, manifold_from_string
from .optimize import (
    OptimizerConfig,
    calibrate_scale,
    equivalence_check,
    pairwise_distances,
    random_frechet_problem,
    riemannian_gd,
)
from .scaling import ScaledManifold, volume_scale_factor

SCHEMA_VERSION = 1

MANIFOLD_SPECS = ("euclidean:3", "sphere:2", "spd:2")
VARIANT_LAMBDAS = (0.25, 1.0, 4.0, 10.0)
INVARIANT_LAMBDAS = (0.25, 4.0, 10.0)
CASES_PER_SWEEP = 100
DELEGATION_CASES = 25

# Safe launch states for chart geodesics: trajectories stay well inside
# each built-in domain over one unit of time.
GEODESIC_STARTS = {
    "euclidean:2": ((0.0, 0.0), (0.5, -0.3)),
    "polar": ((3.0, 0.0), (0.5, 0.2)),
    "sphere-chart": ((1.2, 0.3), (0.2, 0.5)),
}


def derive_seed(root_seed: int, check_id: str) -> int:
    """Stable per-check stream seed from the root seed and the check id."""
    digest = hashlib.sha256(f"{root_seed}:{check_id}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _rel(value: float, reference: float, floor: float = 1e-300) -> float:
    return abs(value - reference) / max(abs(reference), floor)


def _rel_array(value: np.ndarray, reference: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(reference))), 1e-300)
    return float(np.max(np.abs(value - reference))) / scale


def _same_bits(a: np.ndarray, b: np.ndarray) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and a.tobytes() == b.tobytes()


def _angle_between(m: Manifold, p: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    """Angle between tangent vectors, stable for nearly parallel inputs."""
    nu = m.norm(p, u)
    nv = m.norm(p, v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    c = m.inner(p, u, v) / (nu * nv)
    residual = u / nu - c * (v / nv)
    s = min(1.0, m.norm(p, residual))
    angle = math.asin(s)
    return math.pi - angle if c < 0.0 else angle


def _random_curve(m: Manifold, rng: np.random.Generator, samples: int = 4):
    """A short sampled curve built from successive moderate geodesic steps."""
    pts = [m.random_point(rng)]
    for _ in range(samples - 1):
        v = m.random_tangent(pts[-1], rng)
        nv = m.norm(pts[-1], v)
        if nv > 0.0:
            v = v * (0.3 / nv)
        pts.append(m.exp(pts[-1], v))
    return pts


def _interior_points(chart, rng: np.random.Generator, count: int) -> np.ndarray:
    margin = np.maximum(0.05 * (chart.upper - chart.lower), 1e-3)
    return rng.uniform(chart.lower + margin, chart.upper - margin, (count, chart.dimension))


# ---------------------------------------------------------------------------
# Check runners.  Each takes a dedicated random generator and returns the
# worst deviation it observed.
# ---------------------------------------------------------------------------


def _run_variant_norm(rng):
    worst = 0.0
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        for _ in range(CASES_PER_SWEEP):
            p = m.random_point(rng)
            v = m.random_tangent(p, rng)
            base = m.norm(p, v)
            for lam in VARIANT_LAMBDAS:
                sm = ScaledManifold(m, lam)
                worst = max(worst, _rel(sm.norm(p, v), math.sqrt(lam) * base))
    return worst


def _run_variant_distance(rng):
    worst = 0.0
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        for _ in range(CASES_PER_SWEEP):
            p = m.random_point(rng)
            q = m.random_point(rng)
            base = m.dist(p, q)
            for lam in VARIANT_LAMBDAS:
                sm = ScaledManifold(m, lam)
                worst = max(worst, _rel(sm.dist(p, q), math.sqrt(lam) * base))
    return worst


def _run_variant_curve_length(rng):
    worst = 0.0
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        for _ in range(CASES_PER_SWEEP):
            pts = _random_curve(m, rng)
            base = m.curve_length(pts)
            for lam in VARIANT_LAMBDAS:
                sm = ScaledManifold(m, lam)
                worst = max(worst, _rel(sm.curve_length(pts), math.sqrt(lam) * base))
    return worst


def _run_variant_gradient(rng):
    worst = 0.0
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        for _ in range(CASES_PER_SWEEP):
            p = m.random_point(rng)
            ambient = rng.standard_normal(m.ambient_shape)
            base = m.euclidean_to_riemannian_gradient(p, ambient)
            for lam in VARIANT_LAMBDAS:
                sm = ScaledManifold(m, lam)
                got = sm.euclidean_to_riemannian_gradient(p, ambient)
                worst = max(worst, _rel_array(got, base / lam))
    return worst


def _run_variant_volume_factor(rng):
    worst = 0.0
    for n in range(1, 9):
        for lam in VARIANT_LAMBDAS:
            reference = math.exp(0.5 * n * math.log(lam))
            worst = max(worst, _rel(volume_scale_factor(lam, n), reference))
    return worst


def _run_delegation(rng):
    worst = 0.0
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        for _ in range(DELEGATION_CASES):
            p = m.random_point(rng)
            q = m.random_point(rng)
            v = m.random_tangent(p, rng)
            w = rng.standard_normal(m.ambient_shape)
            for lam in VARIANT_LAMBDAS:
                sm = ScaledManifold(m, lam)
                pairs = (
                    (sm.exp(p, v), m.exp(p, v)),
                    (sm.log(p, q), m.log(p, q)),
                    (sm.transport(p, q, v), m.transport(p, q, v)),
                    (sm.to_tangent(p, w), m.to_tangent(p, w)),
                )
                for got, ref in pairs:
                    if not _same_bits(got, ref):
                        worst = max(worst, float(np.max(np.abs(got - ref))), 1e-30)
    return worst


def _run_composition(rng):
    worst = 0.0
    pairs = ((0.25, 4.0), (4.0, 10.0), (10.0, 0.25))
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        for lam1, lam2 in pairs:
            nested = ScaledManifold(ScaledManifold(m, lam1), lam2)
            flat = ScaledManifold(m, lam1 * lam2)
            for _ in range(DELEGATION_CASES):
                p = m.random_point(rng)
                q = m.random_point(rng)
                v = m.random_tangent(p, rng)
                ambient = rng.standard_normal(m.ambient_shape)
                worst = max(worst, _rel(nested.norm(p, v), flat.norm(p, v)))
                worst = max(worst, _rel(nested.dist(p, q), flat.dist(p, q)))
                worst = max(
                    worst,
                    _rel_array(
                        nested.euclidean_to_riemannian_gradient(p, ambient),
                        flat.euclidean_to_riemannian_gradient(p, ambient),
                    ),
                )
    return worst


def _run_unit_scale_identity(rng):
    worst = 0.0
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        sm = ScaledManifold(m, 1.0)
        for _ in range(DELEGATION_CASES):
            p = m.random_point(rng)
            q = m.random_point(rng)
            v = m.random_tangent(p, rng)
            if sm.norm(p, v) != m.norm(p, v):
                worst = max(worst, abs(sm.norm(p, v) - m.norm(p, v)), 1e-30)
            if sm.dist(p, q) != m.dist(p, q):
                worst = max(worst, abs(sm.dist(p, q) - m.dist(p, q)), 1e-30)
            for got, ref in (
                (sm.rescale_gradient(v), m.rescale_gradient(v)),
                (sm.exp(p, v), m.exp(p, v)),
                (sm.log(p, q), m.log(p, q)),
            ):
                if not _same_bits(got, ref):
                    worst = max(worst, float(np.max(np.abs(got - ref))), 1e-30)
    return worst


def _run_gradient_direction(rng):
    worst = 0.0
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        for _ in range(DELEGATION_CASES):
            p = m.random_point(rng)
            ambient = rng.standard_normal(m.ambient_shape)
            grad = m.euclidean_to_riemannian_gradient(p, ambient)
            if m.norm(p, grad) < 1e-12:
                continue
            for lam in VARIANT_LAMBDAS:
                sm = ScaledManifold(m, lam)
                worst = max(
                    worst, _angle_between(m, p, sm.rescale_gradient(grad), grad)
                )
    return worst


def _run_connection_invariance(rng):
    worst = 0.0
    for chart in builtin_charts():
        points = _interior_points(chart, rng, 20)
        for lam in INVARIANT_LAMBDAS:
            scaled = scale_chart_constant(chart, lam)
            for x in points:
                base = christoffel_at(chart, x).symbols
                got = christoffel_at(scaled, x).symbols
                worst = max(worst, float(np.max(np.abs(got - base))))
    return worst


def _run_geodesic_invariance(rng):
    worst = 0.0
    for chart in builtin_charts():
        x0, v0 = GEODESIC_STARTS[chart.name]
        base = geodesic_integrate(chart, x0, v0, t_end=1.0, steps=1000)
        for lam in INVARIANT_LAMBDAS:
            scaled_chart = scale_chart_constant(chart, lam)
            scaled = geodesic_integrate(scaled_chart, x0, v0, t_end=1.0, steps=1000)
            worst = max(
                worst, float(np.max(np.abs(scaled.positions - base.positions)))
            )
    return worst


def _run_volume_law(rng):
    worst = 0.0
    for chart in builtin_charts():
        points = _interior_points(chart, rng, 20)
        n = chart.dimension
        for lam in VARIANT_LAMBDAS:
            scaled = scale_chart_constant(chart, lam)
            factor = volume_scale_factor(lam, n)
            for x in points:
                ratio = volume_density(scaled, x) / volume_density(chart, x)
                worst = max(worst, _rel(ratio, factor))
    return worst


def _run_length_law(rng):
    worst = 0.0
    times = np.linspace(0.0, 1.0, 101)
    for chart in builtin_charts():
        for _ in range(3):
            ends = _interior_points(chart, rng, 2)
            points = ends[0] + times[:, None] * (ends[1] - ends[0])
            base = chart_curve_length(chart, times, points)
            for lam in VARIANT_LAMBDAS:
                scaled = scale_chart_constant(chart, lam)
                got = chart_curve_length(scaled, times, points)
                worst = max(worst, _rel(got, math.sqrt(lam) * base))
    return worst


def _run_nonconstant_scaling(rng):
    # inverted check: a position-dependent factor must CHANGE the connection
    chart = chart_from_string("euclidean:2")
    scaled = scale_chart_pointwise(chart, lambda x: math.exp(2.0 * x[0]))
    origin = np.zeros(2)
    base = christoffel_at(chart, origin).symbols
    got = christoffel_at(scaled, origin).symbols
    return float(np.max(np.abs(got - base)))


def _run_chart_matches_closed_form(rng):
    chart = chart_from_string("sphere-chart")
    path = geodesic_integrate(chart, (np.pi / 2, 0.0), (0.0, 1.0), t_end=1.0, steps=1000)
    sphere = Sphere(2)
    start = spherical_to_ambient(path.positions[0])
    velocity = np.array([0.0, 1.0, 0.0])
    worst = 0.0
    for t, x in zip(path.times, path.positions):
        ambient = spherical_to_ambient(x)
        reference = sphere.exp(start, t * velocity)
        worst = max(worst, float(np.max(np.abs(ambient - reference))))
    return worst


def _run_update_rule_identity(rng):
    worst = 0.0
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        for _ in range(DELEGATION_CASES):
            p = m.random_point(rng)
            ambient = rng.standard_normal(m.ambient_shape)
            grad = m.euclidean_to_riemannian_gradient(p, ambient)
            for lam in VARIANT_LAMBDAS:
                sm = ScaledManifold(m, lam)
                for eta in (0.1, 0.5):
                    step_scaled = -eta * sm.rescale_gradient(grad)
                    step_base = -(eta / lam) * grad
                    worst = max(worst, _rel_array(step_scaled, step_base))
    return worst


def _run_trajectory_equivalence(rng):
    worst = 0.0
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        _, objective, x0 = random_frechet_problem(m, 4, rng)
        for lam in INVARIANT_LAMBDAS:
            worst = max(
                worst, equivalence_check(m, objective, x0, eta=0.1, lam=lam, iters=200)
            )
    return worst


def _run_iterate_gradient_direction(rng):
    worst = 0.0
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        _, objective, x0 = random_frechet_problem(m, 4, rng)
        sm = ScaledManifold(m, 4.0)
        config = OptimizerConfig(step_size=0.1, max_iters=50, grad_tol=0.0)
        trace = riemannian_gd(sm, objective, x0, config)
        for point in trace.iterates:
            grad = objective.gradient_fn(point).components
            if m.norm(point.coordinates, grad) < 1e-12:
                continue
            scaled_grad = sm.rescale_gradient(grad)
            worst = max(
                worst, _angle_between(m, point.coordinates, scaled_grad, grad)
            )
    return worst


def _run_frechet_gradient(rng):
    worst = 0.0
    h = 1e-5
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        _, objective, _ = random_frechet_problem(m, 4, rng)
        for _ in range(10):
            x = ManifoldPoint(m, m.random_point(rng))
            v = m.random_tangent(x.coordinates, rng)
            nv = m.norm(x.coordinates, v)
            if nv == 0.0:
                continue
            v = v / nv
            f_plus = objective.value_fn(ManifoldPoint(m, m.exp(x.coordinates, h * v)))
            f_minus = objective.value_fn(ManifoldPoint(m, m.exp(x.coordinates, -h * v)))
            fd = (f_plus - f_minus) / (2.0 * h)
            grad = objective.gradient_fn(x).components
            ip = m.inner(x.coordinates, grad, v)
            denom = max(abs(ip), 1e-3 * m.norm(x.coordinates, grad), 1e-12)
            worst = max(worst, abs(fd - ip) / denom)
    return worst


def _run_calibration_optimality(rng):
    worst = -np.inf
    for spec in MANIFOLD_SPECS:
        m = manifold_from_string(spec)
        for _ in range(5):
            points, _, _ = random_frechet_problem(m, 4, rng)
            base = pairwise_distances(points)
            noise = rng.standard_normal(base.shape)
            targets = np.abs(rng.uniform(0.5, 3.0) * base + 0.05 * (noise + noise.T))
            np.fill_diagonal(targets, 0.0)
            scale, best = calibrate_scale(points, targets)
            iu = np.triu_indices(len(points), k=1)
            d, t = base[iu], targets[iu]

            def loss(lam):
                return float(np.sum((math.sqrt(lam) * d - t) ** 2))

            lam_star = scale.value
            worst = max(
                worst,
                best - loss(lam_star * (1.0 + 1e-3)),
                best - loss(lam_star * (1.0 - 1e-3)),
            )
    return float(worst)


def _run_coverage(rng):
    # asserted against the registry size when the report is assembled
    return 0.0


@dataclass(frozen=True)
class PropertyCheck:
    check_id: str
    category: str
    target: str
    lam: str
    tolerance: float
    criterion: str  # "<=" bounds the deviation above, ">=" below
    run: Callable[[np.random.Generator], float]


_ALL_MANIFOLDS = "|".join(MANIFOLD_SPECS)
_ALL_CHARTS = "euclidean:2|polar|sphere-chart"
_VARIANT_LAMS = "|".join(f"{v:g}" for v in VARIANT_LAMBDAS)
_INVARIANT_LAMS = "|".join(f"{v:g}" for v in INVARIANT_LAMBDAS)

PROPERTY_CHECKS: tuple[PropertyCheck, ...] = (
    PropertyCheck("variant.norm", "variant", _ALL_MANIFOLDS, _VARIANT_LAMS,
                  1e-12, "<=", _run_variant_norm),
    PropertyCheck("variant.distance", "variant", _ALL_MANIFOLDS, _VARIANT_LAMS,
                  1e-12, "<=", _run_variant_distance),
    PropertyCheck("variant.curve-length", "variant", _ALL_MANIFOLDS, _VARIANT_LAMS,
                  1e-12, "<=", _run_variant_curve_length),
    PropertyCheck("variant.gradient", "variant", _ALL_MANIFOLDS, _VARIANT_LAMS,
                  1e-12, "<=", _run_variant_gradient),
    PropertyCheck("variant.volume-factor", "variant", "n=1..8", _VARIANT_LAMS,
                  1e-14, "<=", _run_variant_volume_factor),
    PropertyCheck("invariant.delegation", "invariant", _ALL_MANIFOLDS, _VARIANT_LAMS,
                  0.0, "<=", _run_delegation),
    PropertyCheck("invariant.composition", "invariant", _ALL_MANIFOLDS,
                  "0.25*4|4*10|10*0.25", 1e-12, "<=", _run_composition),
    PropertyCheck("invariant.unit-scale-identity", "invariant", _ALL_MANIFOLDS, "1",
                  0.0, "<=", _run_unit_scale_identity),
    PropertyCheck("invariant.gradient-direction", "invariant", _ALL_MANIFOLDS,
                  _VARIANT_LAMS, 1e-12, "<=", _run_gradient_direction),
    PropertyCheck("chart.connection-invariance", "chart", _ALL_CHARTS, _INVARIANT_LAMS,
                  1e-6, "<=", _run_connection_invariance),
    PropertyCheck("chart.geodesic-invariance", "chart", _ALL_CHARTS, _INVARIANT_LAMS,
                  1e-8, "<=", _run_geodesic_invariance),
    PropertyCheck("chart.volume-law", "chart", _ALL_CHARTS, _VARIANT_LAMS,
                  1e-10, "<=", _run_volume_law),
    PropertyCheck("chart.length-law", "chart", _ALL_CHARTS, _VARIANT_LAMS,
                  1e-10, "<=", _run_length_law),
    PropertyCheck("chart.nonconstant-scaling-breaks-connection", "negative-check",
                  "euclidean:2", "exp(2*x0)", 0.5, ">=", _run_nonconstant_scaling),
    PropertyCheck("chart.matches-closed-form-geodesic", "cross-check",
                  "sphere-chart", "1", 1e-6, "<=", _run_chart_matches_closed_form),
    PropertyCheck("optimizer.update-rule-identity", "optimizer", _ALL_MANIFOLDS,
                  _VARIANT_LAMS, 1e-14, "<=", _run_update_rule_identity),
    PropertyCheck("optimizer.trajectory-equivalence", "optimizer", _ALL_MANIFOLDS,
                  _INVARIANT_LAMS, 1e-8, "<=", _run_trajectory_equivalence),
    PropertyCheck("optimizer.iterate-gradient-direction", "optimizer", _ALL_MANIFOLDS,
                  "4", 1e-12, "<=", _run_iterate_gradient_direction),
    PropertyCheck("optimizer.frechet-gradient", "optimizer", _ALL_MANIFOLDS, "1",
                  1e-5, "<=", _run_frechet_gradient),
    PropertyCheck("optimizer.calibration-optimality", "optimizer", _ALL_MANIFOLDS,
                  "fitted", 0.0, "<=", _run_calibration_optimality),
)

EXPECTED_PROPERTY_COUNT = 20


def run_suite(seed: int) -> dict:
    """Run every check with streams derived from ``seed`` and assemble the
    report, ordered by check id."""
    records = []
    for check in PROPERTY_CHECKS:
        rng = np.random.default_rng(derive_seed(seed, check.check_id))
        deviation = float(check.run(rng))
        if check.criterion == "<=":
            passed = deviation <= check.tolerance
        else:
            passed = deviation >= check.tolerance
        records.append(
            {
                "id": check.check_id,
                "category": check.category,
                "target": check.target,
                "lambda": check.lam,
                "deviation": deviation,
                "tolerance": check.tolerance,
                "criterion": check.criterion,
                "passed": passed,
            }
        )
    records.append(
        {
            "id": "report.coverage",
            "category": "meta",
            "target": "suite",
            "lambda": "-",
            "deviation": float(abs(len(records) - EXPECTED_PROPERTY_COUNT)),
            "tolerance": 0.0,
            "criterion": "<=",
            "passed": len(records) == EXPECTED_PROPERTY_COUNT,
        }
    )
    records.sort(key=lambda r: r["id"])
    passed = sum(1 for r in records if r["passed"])
    return {
        "schema_version": SCHEMA_VERSION,
        "environment": {"seed": int(seed), "version": __version__},
        "records": records,
        "summary": {
            "total": len(records),
            "passed": passed,
            "failed": len(records) - passed,
        },
    }


# ---------------------------------------------------------------------------
# Deterministic rendering: floats carry 17 significant digits so that
# every value round-trips exactly, keys are emitted in sorted order, and
# no timestamps or environment-dependent data appear anywhere.
# ---------------------------------------------------------------------------


def _render_value(value, indent: int, pad: str) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError(f"cannot serialize non-finite value {value!r}")
        return format(float(value), ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = pad * (indent + 1)
        items = [
            f"{inner}{json.dumps(str(k))}: {_render_value(value[k], indent + 1, pad)}"
            for k in sorted(value)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad * indent + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        inner = pad * (indent + 1)
        items = [f"{inner}{_render_value(v, indent + 1, pad)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad * indent + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def render_json(report: dict) -> str:
    """Canonical JSON rendering of a report (or any plain structure)."""
    return _render_value(report, 0, "  ") + "\n"


def render_csv(report: dict) -> str:
    """Flat CSV rendering of the per-check records."""
    columns = (
        "id", "category", "target", "lambda",
        "deviation", "tolerance", "criterion", "passed",
    )
    lines = [",".join(columns)]
    for record in report["records"]:
        cells = []
        for col in columns:
            value = record[col]
            if isinstance(value, bool):
                cells.append("true" if value else "false")
            elif isinstance(value, float):
                cells.append(format(value, ".17g"))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
