"""Concrete Riemannian manifolds with closed-form geometry.

Three manifold families share one capability set: flat Euclidean space
R^n, the unit sphere S^n embedded in R^{n+1}, and the cone of symmetric
positive-definite matrices with the affine-invariant metric.  Each
exposes the metric (inner product, norm, distance), the geodesic
structure (exponential and logarithm maps, parallel transport along the
connecting geodesic), tangent projection, conversion of ambient
gradients to metric gradients, and chordal curve length.

Everything here is closed form: sphere operations use trigonometric
formulas, matrix operations go through symmetric eigendecompositions.
All values are immutable and all operations are pure functions, so the
module is safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Sequence

import numpy as np
import scipy.linalg

from .errors import ContractViolationError, DomainError, InternalConsistencyError

# Tolerances: membership checks mirror double-precision headroom; the
# renormalization budget bounds drift any single operation may repair.
POINT_TOL = 1e-12
TANGENT_TOL = 1e-10
RENORM_TOL = 1e-9
ANTIPODE_MARGIN = 1e-9


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _sym_apply(a: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to a symmetric matrix through its eigenvalues."""
    w, v = np.linalg.eigh(a)
    return (v * fn(w)) @ v.T


class Manifold(ABC):
    """Capability set shared by every manifold family.

    Methods operate on raw ``numpy`` arrays in the ambient
    representation (vectors for Euclidean space and the sphere, square
    symmetric matrices for the SPD cone).  The wrapper types
    :class:`ManifoldPoint` and :class:`TangentVector` add membership
    validation on top of this engine.
    """

    family: ClassVar[str]

    @property
    @abstractmethod
    def intrinsic_dim(self) -> int:
        """Dimension of the manifold itself (not of the ambient space)."""

    @property
    @abstractmethod
    def ambient_shape(self) -> tuple[int, ...]:
        """Shape of the arrays that represent points and tangent vectors."""

    # -- metric --------------------------------------------------------

    @abstractmethod
    def inner(self, p: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        """Metric inner product of tangent vectors ``u``, ``v`` at ``p``."""

    def norm(self, p: np.ndarray, v: np.ndarray) -> float:
        """Metric norm of ``v`` at ``p``."""
        return math.sqrt(max(self.inner(p, v, v), 0.0))

    @abstractmethod
    def dist(self, p: np.ndarray, q: np.ndarray) -> float:
        """Geodesic distance between ``p`` and ``q``."""

    # -- geodesic structure ---------------------------------------------

    @abstractmethod
    def exp(self, p: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Endpoint of the unit-time geodesic from ``p`` with velocity ``v``."""

    @abstractmethod
    def log(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Initial velocity of the geodesic from ``p`` reaching ``q`` at time 1."""

    @abstractmethod
    def transport(self, p: np.ndarray, q: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Parallel transport of ``v`` along the minimizing geodesic p -> q."""

    @abstractmethod
    def to_tangent(self, p: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Project an ambient array onto the tangent space at ``p``."""

    @abstractmethod
    def euclidean_to_riemannian_gradient(
        self, p: np.ndarray, ambient_gradient: np.ndarray
    ) -> np.ndarray:
        """Convert the ambient (Euclidean) gradient of a smooth extension
        into the metric gradient at ``p``."""

    def rescale_gradient(self, gradient: np.ndarray) -> np.ndarray:
        """Gradient in this manifold's own metric, given the gradient
        measured in the unscaled base metric.  Identity here; scaled
        wrappers divide by their factor."""
        return gradient

    def curve_length(self, points: Sequence[np.ndarray]) -> float:
        """Length of a sampled curve as the sum of geodesic segment distances.

        Converges to the true length as the sampling refines, and is
        exact when consecutive samples lie on a common geodesic.
        """
        if len(points) < 2:
            raise ContractViolationError("a sampled curve needs at least 2 points")
        return float(sum(self.dist(a, b) for a, b in zip(points[:-1], points[1:])))

    # -- membership and sampling -----------------------------------------

    @abstractmethod
    def validate_point(self, coordinates) -> np.ndarray:
        """Check membership and return a canonical float64 copy."""

    @abstractmethod
    def validate_tangent(self, p: np.ndarray, components) -> np.ndarray:
        """Check tangency at ``p`` and return a canonical float64 copy."""

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def random_tangent(self, p: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Projection of an ambient Gaussian draw onto the tangent space."""
        return self.to_tangent(p, rng.standard_normal(self.ambient_shape))

    def zero_tangent(self, p: np.ndarray) -> np.ndarray:
        return np.zeros(self.ambient_shape)

    def _check_shape(self, arr, what: str) -> np.ndarray:
        out = np.array(arr, dtype=float)
        if out.shape != self.ambient_shape:
            raise ContractViolationError(
                f"{what} has shape {out.shape}, expected {self.ambient_shape} on {self}"
            )
        if not np.all(np.isfinite(out)):
            raise ContractViolationError(f"{what} contains non-finite entries")
        return out


@dataclass(frozen=True)
class Euclidean(Manifold):
    """Flat R^n: every operation reduces to vector arithmetic."""

    dim: int
    family: ClassVar[str] = "euclidean"

    def __post_init__(self):
        if self.dim < 1:
            raise ContractViolationError("dimension must be >= 1")

    @property
    def intrinsic_dim(self) -> int:
        return self.dim

    @property
    def ambient_shape(self) -> tuple[int, ...]:
        return (self.dim,)

    def inner(self, p, u, v) -> float:
        return float(np.dot(u, v))

    def dist(self, p, q) -> float:
        return float(np.linalg.norm(q - p))

    def exp(self, p, v):
        return p + v

    def log(self, p, q):
        return q - p

    def transport(self, p, q, v):
        return v.copy()

    def to_tangent(self, p, w):
        return np.asarray(w, dtype=float).copy()

    def euclidean_to_riemannian_gradient(self, p, ambient_gradient):
        return np.asarray(ambient_gradient, dtype=float).copy()

    def validate_point(self, coordinates) -> np.ndarray:
        return self._check_shape(coordinates, "point")

    def validate_tangent(self, p, components) -> np.ndarray:
        return self._check_shape(components, "tangent vector")

    def random_point(self, rng):
        return rng.standard_normal(self.dim)


@dataclass(frozen=True)
class Sphere(Manifold):
    """Unit sphere S^n embedded in R^{n+1} with the round metric.

    Geodesics are great circles; the logarithm is only defined away
    from the antipode, where no canonical direction exists.
    """

    dim: int
    family: ClassVar[str] = "sphere"

    def __post_init__(self):
        if self.dim < 1:
            raise ContractViolationError("dimension must be >= 1")

    @property
    def intrinsic_dim(self) -> int:
        return self.dim

    @property
    def ambient_shape(self) -> tuple[int, ...]:
        return (self.dim + 1,)

    def inner(self, p, u, v) -> float:
        return float(np.dot(u, v))

    def dist(self, p, q) -> float:
        if np.array_equal(p, q):
            return 0.0
        c = float(np.clip(np.dot(p, q), -1.0, 1.0))
        u = q - c * p
        # atan2 keeps full accuracy near both coincident and antipodal pairs
        return float(np.arctan2(np.linalg.norm(u), c))

    def exp(self, p, v):
        theta = float(np.linalg.norm(v))
        if theta == 0.0:
            return p.copy()
        out = math.cos(theta) * p + math.sin(theta) * (v / theta)
        return self._renormalize(out)

    def log(self, p, q):
        if np.array_equal(p, q):
            return np.zeros_like(p)
        c = float(np.clip(np.dot(p, q), -1.0, 1.0))
        if c <= -1.0 + ANTIPODE_MARGIN:
            raise DomainError(
                "logarithm is undefined at the antipode: no canonical direction"
            )
        u = q - c * p
        nu = float(np.linalg.norm(u))
        if nu == 0.0:
            return np.zeros_like(p)
        theta = float(np.arctan2(nu, c))
        return (theta / nu) * u

    def transport(self, p, q, v):
        w = self.log(p, q)
        theta = float(np.linalg.norm(w))
        if theta == 0.0:
            return v.copy()
        e = w / theta
        a = float(np.dot(e, v))
        # component along the geodesic rotates in the (p, e) plane,
        # the orthogonal complement rides along unchanged
        return v + a * ((math.cos(theta) - 1.0) * e - math.sin(theta) * p)

    def to_tangent(self, p, w):
        w = np.asarray(w, dtype=float)
        return w - np.dot(p, w) * p

    def euclidean_to_riemannian_gradient(self, p, ambient_gradient):
        return self.to_tangent(p, ambient_gradient)

    def validate_point(self, coordinates) -> np.ndarray:
        out = self._check_shape(coordinates, "point")
        drift = abs(float(np.linalg.norm(out)) - 1.0)
        if drift > POINT_TOL:
            raise ContractViolationError(
                f"point is off the unit sphere by {drift:.3e} (tolerance {POINT_TOL})"
            )
        return out

    def validate_tangent(self, p, components) -> np.ndarray:
        out = self._check_shape(components, "tangent vector")
        normal = abs(float(np.dot(p, out)))
        if normal > TANGENT_TOL:
            raise ContractViolationError(
                f"vector has a normal component of {normal:.3e} "
                f"(tolerance {TANGENT_TOL})"
            )
        return out

    def random_point(self, rng):
        while True:
            x = rng.standard_normal(self.dim + 1)
            n = np.linalg.norm(x)
            if n > 1e-8:
                return x / n

    def _renormalize(self, out: np.ndarray) -> np.ndarray:
        n = float(np.linalg.norm(out))
        if abs(n - 1.0) > RENORM_TOL:
            raise InternalConsistencyError(
                f"sphere result drifted {abs(n - 1.0):.3e} from unit norm"
            )
        return out / n


@dataclass(frozen=True)
class SymmetricPositiveDefinite(Manifold):
    """SPD matrices of a fixed side with the affine-invariant metric
    <U, V>_P = trace(P^-1 U P^-1 V).

    Exponential, logarithm, transport and distance all reduce to
    symmetric eigendecompositions, which keeps them exact enough to
    serve as references for chart-level integration.
    """

    side: int
    family: ClassVar[str] = "spd"

    def __post_init__(self):
        if self.side < 1:
            raise ContractViolationError("matrix side must be >= 1")

    @property
    def intrinsic_dim(self) -> int:
        return self.side * (self.side + 1) // 2

    @property
    def ambient_shape(self) -> tuple[int, ...]:
        return (self.side, self.side)

    def inner(self, p, u, v) -> float:
        pu = np.linalg.solve(p, u)
        pv = np.linalg.solve(p, v)
        return float(np.einsum("ij,ji->", pu, pv))

    def dist(self, p, q) -> float:
        if np.array_equal(p, q):
            return 0.0
        w = scipy.linalg.eigh(q, p, eigvals_only=True)
        return float(np.sqrt(np.sum(np.log(w) ** 2)))

    def exp(self, p, v):
        half, inv_half = self._sqrt_and_inv_sqrt(p)
        inner = _sym(inv_half @ v @ inv_half)
        out = half @ _sym_apply(inner, np.exp) @ half
        return self._resymmetrize(out)

    def log(self, p, q):
        if np.array_equal(p, q):
            return np.zeros_like(p)
        half, inv_half = self._sqrt_and_inv_sqrt(p)
        inner = _sym(inv_half @ q @ inv_half)
        out = half @ _sym_apply(inner, np.log) @ half
        return self._resymmetrize(out)

    def transport(self, p, q, v):
        if np.array_equal(p, q):
            return v.copy()
        half, inv_half = self._sqrt_and_inv_sqrt(p)
        inner = _sym(inv_half @ q @ inv_half)
        # principal square root of q p^-1, written with symmetric factors
        e = half @ _sym_apply(inner, np.sqrt) @ inv_half
        return self._resymmetrize(e @ v @ e.T)

    def to_tangent(self, p, w):
        return _sym(np.asarray(w, dtype=float))

    def euclidean_to_riemannian_gradient(self, p, ambient_gradient):
        return _sym(p @ _sym(np.asarray(ambient_gradient, dtype=float)) @ p)

    def validate_point(self, coordinates) -> np.ndarray:
        out = self._check_shape(coordinates, "point")
        asym = float(np.max(np.abs(out - out.T)))
        if asym > POINT_TOL:
            raise ContractViolationError(
                f"matrix is asymmetric by {asym:.3e} (tolerance {POINT_TOL})"
            )
        if float(np.linalg.eigvalsh(out).min()) <= 0.0:
            raise DomainError("matrix is not positive definite")
        return out

    def validate_tangent(self, p, components) -> np.ndarray:
        out = self._check_shape(components, "tangent vector")
        asym = float(np.max(np.abs(out - out.T)))
        if asym > POINT_TOL:
            raise ContractViolationError(
                f"tangent matrix is asymmetric by {asym:.3e} (tolerance {POINT_TOL})"
            )
        return out

    def random_point(self, rng):
        a = _sym(rng.uniform(-1.0, 1.0, (self.side, self.side)))
        return _sym_apply(a, np.exp)

    @staticmethod
    def _sqrt_and_inv_sqrt(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        w, v = np.linalg.eigh(p)
        if w.min() <= 0.0:
            raise DomainError("matrix is not positive definite")
        rw = np.sqrt(w)
        return (v * rw) @ v.T, (v / rw) @ v.T

    @staticmethod
    def _resymmetrize(out: np.ndarray) -> np.ndarray:
        drift = float(np.max(np.abs(out - out.T)))
        if drift > RENORM_TOL:
            raise InternalConsistencyError(
                f"matrix result drifted {drift:.3e} from symmetry"
            )
        return _sym(out)


def manifold_from_string(spec: str) -> Manifold:
    """Build a manifold from a ``family:size`` string.

    ``euclidean:n`` and ``sphere:n`` take the intrinsic dimension;
    ``spd:m`` takes the matrix side (intrinsic dimension m(m+1)/2).
    """
    try:
        family, _, size_str = spec.partition(":")
        size = int(size_str)
    except ValueError:
        raise ContractViolationError(f"malformed manifold spec {spec!r}") from None
    if size < 1:
        raise ContractViolationError(f"manifold size must be >= 1, got {size}")
    if family == "euclidean":
        return Euclidean(size)
    if family == "sphere":
        return Sphere(size)
    if family == "spd":
        return SymmetricPositiveDefinite(size)
    raise ContractViolationError(f"unknown manifold family {family!r}")


# ---------------------------------------------------------------------------
# Validated value types and the typed operation layer.
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """A point on a manifold, validated at construction.

    The coordinate array is stored as a read-only copy; operations
    never mutate it.
    """

    manifold: Manifold
    coordinates: np.ndarray

    def __post_init__(self):
        coords = self.manifold.validate_point(self.coordinates)
        object.__setattr__(self, "coordinates", _readonly(coords))

    def __repr__(self):
        return f"ManifoldPoint({self.manifold!r}, {self.coordinates!r})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector anchored to its base point."""

    base: ManifoldPoint
    components: np.ndarray

    def __post_init__(self):
        comps = self.manifold.validate_tangent(self.base.coordinates, self.components)
        object.__setattr__(self, "components", _readonly(comps))

    @property
    def manifold(self) -> Manifold:
        return self.base.manifold

    def __repr__(self):
        return f"TangentVector(base={self.base!r}, components={self.components!r})"


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """An ordered sampling of a curve, with parameters in [0, 1].

    At least two samples are required and all points must live on the
    same manifold.  When ``parameters`` is omitted a uniform grid is
    used.
    """

    points: tuple[ManifoldPoint, ...]
    parameters: np.ndarray = field(default=None)

    def __post_init__(self):
        points = tuple(self.points)
        if len(points) < 2:
            raise ContractViolationError("a sampled curve needs at least 2 points")
        m = points[0].manifold
        if any(pt.manifold != m for pt in points[1:]):
            raise ContractViolationError("curve samples live on different manifolds")
        if self.parameters is None:
            params = np.linspace(0.0, 1.0, len(points))
        else:
            params = np.asarray(self.parameters, dtype=float)
        if params.shape != (len(points),):
            raise ContractViolationError("one parameter value per sample is required")
        if params[0] < 0.0 or params[-1] > 1.0 or np.any(np.diff(params) <= 0.0):
            raise ContractViolationError(
                "parameters must be strictly increasing within [0, 1]"
            )
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "parameters", _readonly(params))

    @property
    def manifold(self) -> Manifold:
        return self.points[0].manifold


def _require_same_manifold(p: ManifoldPoint, q: ManifoldPoint) -> Manifold:
    if p.manifold != q.manifold:
        raise ContractViolationError(
            f"points live on different manifolds: {p.manifold} vs {q.manifold}"
        )
    return p.manifold


def _require_same_base(u: TangentVector, v: TangentVector) -> ManifoldPoint:
    if u.base is not v.base:
        _require_same_manifold(u.base, v.base)
        if not np.array_equal(u.base.coordinates, v.base.coordinates):
            raise ContractViolationError("tangent vectors have different base points")
    return u.base


def inner_product(u: TangentVector, v: TangentVector) -> float:
    """Metric inner product of two tangent vectors at a shared base point."""
    p = _require_same_base(u, v)
    return p.manifold.inner(p.coordinates, u.components, v.components)


def norm(v: TangentVector) -> float:
    """Metric norm of a tangent vector."""
    return v.manifold.norm(v.base.coordinates, v.components)


def exp_map(v: TangentVector) -> ManifoldPoint:
    """Endpoint of the unit-time geodesic with initial velocity ``v``."""
    m = v.manifold
    return ManifoldPoint(m, m.exp(v.base.coordinates, v.components))


def log_map(p: ManifoldPoint, q: ManifoldPoint) -> TangentVector:
    """Tangent vector at ``p`` whose geodesic reaches ``q`` at time 1."""
    m = _require_same_manifold(p, q)
    return TangentVector(p, m.log(p.coordinates, q.coordinates))


def distance(p: ManifoldPoint, q: ManifoldPoint) -> float:
    """Geodesic distance between two points."""
    m = _require_same_manifold(p, q)
    return m.dist(p.coordinates, q.coordinates)


def parallel_transport(v: TangentVector, q: ManifoldPoint) -> TangentVector:
    """Transport ``v`` along the minimizing geodesic from its base to ``q``."""
    m = _require_same_manifold(v.base, q)
    return TangentVector(q, m.transport(v.base.coordinates, q.coordinates, v.components))


def tangent_projection(p: ManifoldPoint, w) -> TangentVector:
    """Project an ambient array onto the tangent space at ``p``."""
    return TangentVector(p, p.manifold.to_tangent(p.coordinates, w))


def riemannian_gradient(p: ManifoldPoint, ambient_gradient) -> TangentVector:
    """Metric gradient at ``p`` from the ambient gradient of a smooth extension."""
    m = p.manifold
    g = m._check_shape(ambient_gradient, "ambient gradient")
    return TangentVector(p, m.euclidean_to_riemannian_gradient(p.coordinates, g))


def curve_length(curve: SampledCurve) -> float:
    """Chordal-geodesic length of a sampled curve."""
    return curve.manifold.curve_length([pt.coordinates for pt in curve.points])


def random_point(manifold: Manifold, rng: np.random.Generator) -> ManifoldPoint:
    """Draw a point with full support: normalized Gaussians on the sphere,
    matrix exponentials of uniform symmetric matrices on the SPD cone."""
    return ManifoldPoint(manifold, manifold.random_point(rng))


def random_tangent(p: ManifoldPoint, rng: np.random.Generator) -> TangentVector:
    """Draw a tangent vector by projecting an ambient Gaussian draw."""
    return TangentVector(p, p.manifold.random_tangent(p.coordinates, rng))
