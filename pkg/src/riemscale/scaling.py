"""Constant rescaling of a manifold's metric.

A :class:`ScaledManifold` wraps any base manifold with a fixed factor
``lam > 0`` and realizes the two sides of the rescaling story:

* measured quantities change by fixed powers of ``lam`` -- inner
  products by ``lam``, norms / distances / curve lengths by
  ``sqrt(lam)``, volume densities by ``lam**(n/2)``, metric gradients
  by ``1/lam``;
* the geodesic structure does not change at all -- exponential and
  logarithm maps, parallel transport and tangent projection are
  forwarded to the base manifold untouched, so their outputs are
  representation-identical to the unscaled ones by construction.

The numerical evidence that this delegation is legitimate (rather than
an implementation shortcut) lives in :mod:`riemscale.charts`, which
rederives connections and geodesics from scaled metric matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractViolationError
from .manifolds import (
    Manifold,
    ManifoldPoint,
    SampledCurve,
    TangentVector,
    _require_same_base,
    _require_same_manifold,
)


@dataclass(frozen=True)
class ScaleFactor:
    """A validated metric scale: finite and strictly positive."""

    value: float

    def __post_init__(self):
        value = float(self.value)
        if not math.isfinite(value) or value <= 0.0:
            raise ContractViolationError(
                f"scale factor must be a finite positive real, got {self.value!r}"
            )
        object.__setattr__(self, "value", value)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class ScaledManifold(Manifold):
    """A base manifold whose metric is multiplied by a constant factor.

    Wrappers compose: scaling by ``a`` and then ``b`` behaves exactly
    like scaling by ``a * b``.  The factor is immutable; choosing a new
    one means constructing a new wrapper.
    """

    base: Manifold
    scale: ScaleFactor

    def __post_init__(self):
        if not isinstance(self.base, Manifold):
            raise ContractViolationError("base must be a Manifold")
        if not isinstance(self.scale, ScaleFactor):
            object.__setattr__(self, "scale", ScaleFactor(self.scale))

    @property
    def family(self) -> str:
        return self.base.family

    @property
    def lam(self) -> float:
        return self.scale.value

    @property
    def root(self) -> Manifold:
        """The underlying unscaled manifold, through any nesting."""
        m = self.base
        while isinstance(m, ScaledManifold):
            m = m.base
        return m

    @property
    def total_scale(self) -> float:
        """Product of the factors of every wrapper layer."""
        lam = self.lam
        m = self.base
        while isinstance(m, ScaledManifold):
            lam *= m.lam
            m = m.base
        return lam

    @property
    def intrinsic_dim(self) -> int:
        return self.base.intrinsic_dim

    @property
    def ambient_shape(self) -> tuple[int, ...]:
        return self.base.ambient_shape

    # -- quantities that change -------------------------------------------

    def inner(self, p, u, v) -> float:
        return self.lam * self.base.inner(p, u, v)

    def dist(self, p, q) -> float:
        return math.sqrt(self.lam) * self.base.dist(p, q)

    def curve_length(self, points: Sequence[np.ndarray]) -> float:
        return math.sqrt(self.lam) * self.base.curve_length(points)

    def euclidean_to_riemannian_gradient(self, p, ambient_gradient):
        return self.base.euclidean_to_riemannian_gradient(p, ambient_gradient) / self.lam

    def rescale_gradient(self, gradient):
        return self.base.rescale_gradient(gradient) / self.lam

    # -- structure that does not ------------------------------------------

    def exp(self, p, v):
        return self.base.exp(p, v)

    def log(self, p, q):
        return self.base.log(p, q)

    def transport(self, p, q, v):
        return self.base.transport(p, q, v)

    def to_tangent(self, p, w):
        return self.base.to_tangent(p, w)

    def validate_point(self, coordinates):
        return self.base.validate_point(coordinates)

    def validate_tangent(self, p, components):
        return self.base.validate_tangent(p, components)

    def random_point(self, rng):
        return self.base.random_point(rng)

    def random_tangent(self, p, rng):
        return self.base.random_tangent(p, rng)

    def zero_tangent(self, p):
        return self.base.zero_tangent(p)


def volume_scale_factor(scale: ScaleFactor | float, n: int) -> float:
    """Factor by which an n-dimensional volume density is multiplied when
    the metric is multiplied by ``scale``."""
    if int(n) != n or n < 1:
        raise ContractViolationError(f"dimension must be a positive integer, got {n!r}")
    lam = scale.value if isinstance(scale, ScaleFactor) else float(ScaleFactor(scale))
    return lam ** (n / 2)


def _require_on_base(sm: ScaledManifold, p: ManifoldPoint) -> None:
    if sm.root != p.manifold:
        raise ContractViolationError(
            f"point lives on {p.manifold}, not on the wrapped {sm.root}"
        )


def scaled_inner(sm: ScaledManifold, u: TangentVector, v: TangentVector) -> float:
    """Inner product in the scaled metric: ``lam`` times the base value."""
    p = _require_same_base(u, v)
    _require_on_base(sm, p)
    return sm.inner(p.coordinates, u.components, v.components)


def scaled_norm(sm: ScaledManifold, v: TangentVector) -> float:
    """Norm in the scaled metric, computed as the root of the scaled inner."""
    _require_on_base(sm, v.base)
    return sm.norm(v.base.coordinates, v.components)


def scaled_distance(sm: ScaledManifold, p: ManifoldPoint, q: ManifoldPoint) -> float:
    """Distance in the scaled metric: ``sqrt(lam)`` times the base distance."""
    _require_same_manifold(p, q)
    _require_on_base(sm, p)
    return sm.dist(p.coordinates, q.coordinates)


def scaled_curve_length(sm: ScaledManifold, curve: SampledCurve) -> float:
    """Curve length in the scaled metric: ``sqrt(lam)`` times the base length."""
    _require_on_base(sm, curve.points[0])
    return sm.curve_length([pt.coordinates for pt in curve.points])


def scaled_gradient(sm: ScaledManifold, base_gradient: TangentVector) -> TangentVector:
    """Gradient in the scaled metric, given the base-metric gradient.

    Only the magnitude changes (division by ``lam``); the direction is
    untouched.
    """
    _require_on_base(sm, base_gradient.base)
    return TangentVector(
        base_gradient.base, sm.rescale_gradient(base_gradient.components)
    )


def scaled_exp(sm: ScaledManifold, v: TangentVector) -> ManifoldPoint:
    """Exponential map under the scaled metric: identical to the base map."""
    _require_on_base(sm, v.base)
    return ManifoldPoint(v.manifold, sm.exp(v.base.coordinates, v.components))


def scaled_log(sm: ScaledManifold, p: ManifoldPoint, q: ManifoldPoint) -> TangentVector:
    """Logarithm map under the scaled metric: identical to the base map."""
    _require_same_manifold(p, q)
    _require_on_base(sm, p)
    return TangentVector(p, sm.log(p.coordinates, q.coordinates))


def scaled_transport(sm: ScaledManifold, v: TangentVector, q: ManifoldPoint) -> TangentVector:
    """Parallel transport under the scaled metric: identical to the base map."""
    _require_same_manifold(v.base, q)
    _require_on_base(sm, q)
    return TangentVector(q, sm.transport(v.base.coordinates, q.coordinates, v.components))


def scaled_projection(sm: ScaledManifold, p: ManifoldPoint, w) -> TangentVector:
    """Tangent projection under the scaled metric: identical to the base map."""
    _require_on_base(sm, p)
    return TangentVector(p, sm.to_tangent(p.coordinates, w))
