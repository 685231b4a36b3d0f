"""
fields/analytic.py
Analytic signed distance primitives and min/max CSG composition.

All evaluators are vectorized: a point array has shape ``(n, d)``, scalar
results have shape ``(n,)``. Primitive gradients are analytic (raw, not
renormalized: zero on the primitive's own medial locus); CSG trees use
central differences.
"""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from core.constants import CSG_FD_STEP_REL, MAX_SHAPE_DEPTH
from core.errors import BoundsDegenerate
from core.math_utils import Bounds, as_points
from fields.shapes import check_dimension, is_leaf

Aabb = Optional[tuple[np.ndarray, np.ndarray]]


def _orthonormal_complement(n: np.ndarray) -> np.ndarray:
    """Rows spanning the hyperplane orthogonal to unit vector *n*."""
    d = n.size
    if d == 2:
        return np.array([[-n[1], n[0]]])
    helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(n, helper)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    return np.stack([u, v])


def _unit_directions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# ===========================================================================
# Primitives
# ===========================================================================


class Primitive(ABC):
    """Exact SDF leaf with analytic gradient, membership test and surface sampler."""

    def __init__(self, dim: int) -> None:
        self.dim = dim

    @abstractmethod
    def phi(self, p: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def grad(self, p: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def contains(self, p: np.ndarray) -> np.ndarray:
        """Membership test computed without the distance formula."""

    @abstractmethod
    def aabb(self) -> Aabb: ...

    @abstractmethod
    def surface_measure(self, bounds: Bounds) -> float:
        """Boundary length (2D) / area (3D) used to weight surface sampling."""

    @abstractmethod
    def sample_surface(self, n: int, rng: np.random.Generator, bounds: Bounds) -> np.ndarray: ...


class Sphere(Primitive):
    def __init__(self, dim: int, center, radius: float) -> None:
        super().__init__(dim)
        self.center = np.asarray(center, dtype=np.float64)
        self.radius = float(radius)

    def phi(self, p):
        return np.linalg.norm(p - self.center, axis=1) - self.radius

    def grad(self, p):
        v = p - self.center
        norm = np.linalg.norm(v, axis=1, keepdims=True)
        return np.divide(v, norm, out=np.zeros_like(v), where=norm > 0.0)

    def contains(self, p):
        return np.sum((p - self.center) ** 2, axis=1) < self.radius**2

    def aabb(self):
        return self.center - self.radius, self.center + self.radius

    def surface_measure(self, bounds):
        if self.dim == 2:
            return 2.0 * np.pi * self.radius
        return 4.0 * np.pi * self.radius**2

    def sample_surface(self, n, rng, bounds):
        return self.center + self.radius * _unit_directions(rng, n, self.dim)


class Box(Primitive):
    def __init__(self, dim: int, center, half_extents) -> None:
        super().__init__(dim)
        self.center = np.asarray(center, dtype=np.float64)
        self.half = np.asarray(half_extents, dtype=np.float64)

    def phi(self, p):
        q = np.abs(p - self.center) - self.half
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
        inside = np.minimum(np.max(q, axis=1), 0.0)
        return outside + inside

    def grad(self, p):
        d = p - self.center
        q = np.abs(d) - self.half
        s = np.sign(d)
        outside = np.max(q, axis=1) > 0.0
        g = np.zeros_like(p)

        m = np.maximum(q[outside], 0.0)
        g[outside] = s[outside] * m / np.linalg.norm(m, axis=1, keepdims=True)

        inner = np.flatnonzero(~outside)
        k = np.argmax(q[inner], axis=1)
        g[inner, k] = s[inner, k]
        return g

    def contains(self, p):
        return np.all(np.abs(p - self.center) < self.half, axis=1)

    def aabb(self):
        return self.center - self.half, self.center + self.half

    def _face_weights(self) -> np.ndarray:
        full = 2.0 * self.half
        return np.array([np.prod(np.delete(full, k)) for k in range(self.dim)])

    def surface_measure(self, bounds):
        return float(2.0 * self._face_weights().sum())

    def sample_surface(self, n, rng, bounds):
        w = self._face_weights()
        axis = rng.choice(self.dim, size=n, p=w / w.sum())
        side = rng.choice([-1.0, 1.0], size=n)
        local = rng.uniform(-1.0, 1.0, size=(n, self.dim)) * self.half
        local[np.arange(n), axis] = side * self.half[axis]
        return self.center + local


class Capsule(Primitive):
    def __init__(self, dim: int, a, b, radius: float) -> None:
        super().__init__(dim)
        self.a = np.asarray(a, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.radius = float(radius)
        self._ba = self.b - self.a
        self._len2 = float(self._ba @ self._ba)

    def _offset(self, p):
        pa = p - self.a
        if self._len2 == 0.0:
            return pa
        h = np.clip(pa @ self._ba / self._len2, 0.0, 1.0)
        return pa - h[:, None] * self._ba

    def phi(self, p):
        return np.linalg.norm(self._offset(p), axis=1) - self.radius

    def grad(self, p):
        v = self._offset(p)
        norm = np.linalg.norm(v, axis=1, keepdims=True)
        return np.divide(v, norm, out=np.zeros_like(v), where=norm > 0.0)

    def contains(self, p):
        # nearest point on the segment found by dense parameter search
        ts = np.linspace(0.0, 1.0, 257)
        pts = self.a + ts[:, None] * self._ba
        d2 = np.min(np.sum((p[:, None, :] - pts[None, :, :]) ** 2, axis=2), axis=1)
        return d2 < self.radius**2

    def aabb(self):
        return np.minimum(self.a, self.b) - self.radius, np.maximum(self.a, self.b) + self.radius

    def surface_measure(self, bounds):
        length = np.sqrt(self._len2)
        if self.dim == 2:
            return 2.0 * length + 2.0 * np.pi * self.radius
        return 2.0 * np.pi * self.radius * length + 4.0 * np.pi * self.radius**2

    def sample_surface(self, n, rng, bounds):
        length = np.sqrt(self._len2)
        total = self.surface_measure(bounds)
        if self.dim == 2:
            side_measure = 2.0 * length
        else:
            side_measure = 2.0 * np.pi * self.radius * length
        on_side = rng.random(n) < side_measure / total
        out = np.empty((n, self.dim))

        # caps: uniform direction, placed on whichever end faces it
        dirs = _unit_directions(rng, n, self.dim)
        toward_b = dirs @ self._ba > 0.0
        out[:] = np.where(toward_b[:, None], self.b, self.a) + self.radius * dirs

        k = int(on_side.sum())
        if k and length > 0.0:
            axis = self._ba / length
            basis = _orthonormal_complement(axis)
            u = rng.random(k)
            if self.dim == 2:
                radial = rng.choice([-1.0, 1.0], size=k)[:, None] * basis[0]
            else:
                ang = rng.uniform(0.0, 2.0 * np.pi, size=k)
                radial = np.cos(ang)[:, None] * basis[0] + np.sin(ang)[:, None] * basis[1]
            out[on_side] = self.a + u[:, None] * self._ba + self.radius * radial
        return out


class Torus(Primitive):
    def __init__(self, dim: int, center, major_r: float, minor_r: float) -> None:
        super().__init__(dim)
        self.center = np.asarray(center, dtype=np.float64)
        self.major = float(major_r)
        self.minor = float(minor_r)

    def _q(self, p):
        d = p - self.center
        rho = np.hypot(d[:, 0], d[:, 2])
        return d, rho, rho - self.major, d[:, 1]

    def phi(self, p):
        _, _, qx, qy = self._q(p)
        return np.hypot(qx, qy) - self.minor

    def grad(self, p):
        d, rho, qx, qy = self._q(p)
        qn = np.hypot(qx, qy)
        ok = (rho > 1e-12) & (qn > 0.0)
        g = np.zeros_like(p)
        rs = np.where(ok, rho, 1.0)
        qs = np.where(ok, qn, 1.0)
        g[:, 0] = np.where(ok, qx * d[:, 0] / rs / qs, 0.0)
        g[:, 2] = np.where(ok, qx * d[:, 2] / rs / qs, 0.0)
        g[:, 1] = np.where(ok, qy / qs, 0.0)
        return g

    def contains(self, p):
        d = p - self.center
        # ring angle per point, then distance to the core circle point
        ang = np.arctan2(d[:, 2], d[:, 0])
        core = np.stack([self.major * np.cos(ang), np.zeros_like(ang), self.major * np.sin(ang)], axis=1)
        return np.sum((d - core) ** 2, axis=1) < self.minor**2

    def aabb(self):
        ext = np.array([self.major + self.minor, self.minor, self.major + self.minor])
        return self.center - ext, self.center + ext

    def surface_measure(self, bounds):
        return 4.0 * np.pi**2 * self.major * self.minor

    def sample_surface(self, n, rng, bounds):
        out = np.empty((0, 3))
        while out.shape[0] < n:
            m = 2 * (n - out.shape[0]) + 16
            u = rng.uniform(0.0, 2.0 * np.pi, m)
            v = rng.uniform(0.0, 2.0 * np.pi, m)
            keep = rng.random(m) * (self.major + self.minor) < self.major + self.minor * np.cos(v)
            u, v = u[keep], v[keep]
            ring = self.major + self.minor * np.cos(v)
            pts = np.stack([ring * np.cos(u), self.minor * np.sin(v), ring * np.sin(u)], axis=1)
            out = np.concatenate([out, pts])
        return self.center + out[:n]


class Halfspace(Primitive):
    def __init__(self, dim: int, point, normal) -> None:
        super().__init__(dim)
        self.point = np.asarray(point, dtype=np.float64)
        normal = np.asarray(normal, dtype=np.float64)
        self.normal = normal / np.linalg.norm(normal)

    def phi(self, p):
        return (p - self.point) @ self.normal

    def grad(self, p):
        return np.broadcast_to(self.normal, p.shape).copy()

    def contains(self, p):
        return np.sum((p - self.point) * self.normal, axis=1) < 0.0

    def aabb(self):
        return None

    def _patch(self, bounds: Bounds) -> tuple[np.ndarray, float]:
        anchor = bounds.center - ((bounds.center - self.point) @ self.normal) * self.normal
        return anchor, bounds.diag

    def surface_measure(self, bounds):
        _, half = self._patch(bounds)
        return (2.0 * half) ** (self.dim - 1)

    def sample_surface(self, n, rng, bounds):
        anchor, half = self._patch(bounds)
        basis = _orthonormal_complement(self.normal)
        coords = rng.uniform(-half, half, size=(n, self.dim - 1))
        return anchor + coords @ basis


class Slab(Primitive):
    def __init__(self, dim: int, axis: int, half_width: float) -> None:
        super().__init__(dim)
        self.axis = int(axis)
        self.half_width = float(half_width)

    def phi(self, p):
        return np.abs(p[:, self.axis]) - self.half_width

    def grad(self, p):
        g = np.zeros_like(p)
        g[:, self.axis] = np.sign(p[:, self.axis])
        return g

    def contains(self, p):
        return (p[:, self.axis] > -self.half_width) & (p[:, self.axis] < self.half_width)

    def aabb(self):
        return None

    def surface_measure(self, bounds):
        return 2.0 * float(np.prod(np.delete(bounds.extent, self.axis)))

    def sample_surface(self, n, rng, bounds):
        pts = rng.uniform(bounds.lo, bounds.hi, size=(n, self.dim))
        pts[:, self.axis] = rng.choice([-1.0, 1.0], size=n) * self.half_width
        return pts


# ===========================================================================
# CSG composition
# ===========================================================================


class CsgNode:
    """min / max composition over child evaluators."""

    def __init__(self, op: str, children: list) -> None:
        self.op = op
        self.children = children

    def _signed(self, p) -> tuple[np.ndarray, np.ndarray]:
        """Child values with subtracted children negated, and their sign."""
        values = np.stack([c.phi(p) for c in self.children])
        sign = np.ones(len(self.children))
        if self.op == "difference":
            sign[1:] = -1.0
        return values * sign[:, None], sign

    def _active(self, values: np.ndarray) -> np.ndarray:
        return np.argmin(values, axis=0) if self.op == "union" else np.argmax(values, axis=0)

    def phi(self, p):
        values, _ = self._signed(p)
        return values[self._active(values), np.arange(p.shape[0])]

    def grad(self, p):
        """Gradient of the active child; one-sided at ties."""
        values, sign = self._signed(p)
        grads = np.stack([s * c.grad(p) for s, c in zip(sign, self.children)])
        return grads[self._active(values), np.arange(p.shape[0])]

    def tie_gap(self, p) -> np.ndarray:
        """Distance in value between the active child and the runner-up, down the active path."""
        values, _ = self._signed(p)
        if len(self.children) == 1:
            gap = np.full(p.shape[0], np.inf)
        else:
            ordered = np.sort(values, axis=0)
            gap = ordered[1] - ordered[0] if self.op == "union" else ordered[-1] - ordered[-2]
        active = self._active(values)
        for i, child in enumerate(self.children):
            if isinstance(child, CsgNode):
                rows = active == i
                if np.any(rows):
                    gap[rows] = np.minimum(gap[rows], child.tie_gap(p[rows]))
        return gap

    def contains(self, p):
        inside = [c.contains(p) for c in self.children]
        if self.op == "union":
            return np.any(inside, axis=0)
        if self.op == "intersection":
            return np.all(inside, axis=0)
        return inside[0] & ~np.any(inside[1:], axis=0)

    def aabb(self) -> Aabb:
        boxes = [c.aabb() for c in self.children]
        if self.op == "difference":
            return boxes[0]
        if self.op == "union":
            if any(b is None for b in boxes):
                return None
            return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)
        finite = [b for b in boxes if b is not None]
        if not finite:
            return None
        return np.max([b[0] for b in finite], axis=0), np.min([b[1] for b in finite], axis=0)

    def leaves(self) -> list[Primitive]:
        out: list[Primitive] = []
        for c in self.children:
            out.extend(c.leaves() if isinstance(c, CsgNode) else [c])
        return out


_LEAF_BUILDERS = {
    "sphere": lambda s, d: Sphere(d, s.center, s.radius),
    "box": lambda s, d: Box(d, s.center, s.half_extents),
    "capsule": lambda s, d: Capsule(d, s.a, s.b, s.radius),
    "torus": lambda s, d: Torus(d, s.center, s.major_r, s.minor_r),
    "halfspace": lambda s, d: Halfspace(d, s.point, s.normal),
    "slab": lambda s, d: Slab(d, s.axis, s.half_width),
}


def build_evaluator(spec, dim: int, _depth: int = 1):
    """Compile a validated ShapeSpec tree into primitive / CsgNode evaluators."""
    if _depth > MAX_SHAPE_DEPTH:
        raise ValueError(f"shape tree deeper than {MAX_SHAPE_DEPTH} levels")
    if is_leaf(spec):
        return _LEAF_BUILDERS[spec.type](spec, dim)
    return CsgNode(spec.type, [build_evaluator(c, dim, _depth + 1) for c in spec.children])


# ===========================================================================
# DistanceField over an analytic tree
# ===========================================================================


class AnalyticField:
    """
    Exact (per primitive) signed distance field of a ShapeSpec tree.

    Parameters
    ----------
    spec : ShapeSpec
        Validated shape tree.
    dim : int
        2 or 3.
    bounds : Bounds, optional
        Scene box; derived from primitive boxes when omitted.
    """

    def __init__(self, spec, dim: int, bounds: Optional[Bounds] = None) -> None:
        if dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {dim}")
        check_dimension(spec, dim)
        self.spec = spec
        self.dim = dim
        self.root = build_evaluator(spec, dim)
        self.bounds = bounds if bounds is not None else self._derived_bounds()
        self.fd_step = CSG_FD_STEP_REL * self.bounds.diag

    def _derived_bounds(self) -> Bounds:
        box = self.root.aabb()
        if box is None:
            raise BoundsDegenerate("shape is unbounded; the scene must give explicit bounds")
        lo, hi = box
        pad = 0.25 * (hi - lo)
        return Bounds(lo - pad, hi + pad)

    @property
    def is_primitive(self) -> bool:
        return isinstance(self.root, Primitive)

    def leaves(self) -> list[Primitive]:
        return [self.root] if self.is_primitive else self.root.leaves()

    def phi(self, points: np.ndarray) -> np.ndarray:
        p, _ = as_points(points)
        return self.root.phi(p)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """
        Raw gradient.

        Analytic for primitives and for CSG trees away from ties; rows whose
        active child is within one step of the runner-up fall back to central
        differences, so the gradient shrinks towards zero on the tie set.
        """
        p, _ = as_points(points)
        if self.is_primitive:
            return self.root.grad(p)
        g = self.root.grad(p)
        h = self.fd_step
        near = np.flatnonzero(self.root.tie_gap(p) < 2.0 * h)
        if near.size:
            sub = p[near]
            for k in range(self.dim):
                e = np.zeros(self.dim)
                e[k] = h
                g[near, k] = (self.root.phi(sub + e) - self.root.phi(sub - e)) / (2.0 * h)
        return g

    def contains(self, points: np.ndarray) -> np.ndarray:
        p, _ = as_points(points)
        return self.root.contains(p)

