"""Exact closed surfaces, closest-point projection, and manufactured solutions.

Three surface families are supported: the unit sphere, tori, and ellipsoids.
Each provides a signed distance, a closest-point projection onto the surface,
outward unit normals, and a catalog of analytic test problems (u, grad u, f)
for the equation -lap_S u + u = f.

All point-valued operations are vectorized: ``p`` may be a single point of
shape (3,) or an array of shape (..., 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, NoConvergence, OutOfTubularNeighborhood

SPHERE = "sphere"
TORUS = "torus"
ELLIPSOID = "ellipsoid"

_NEWTON_MAX_ITER = 50
_NEWTON_TOL = 1e-14

# Fraction of the reach admitted on the side(s) where the nearest-point map
# can become ambiguous.  Kept below 1 so we fail loudly near the medial axis.
_TUBE_SAFETY = 0.9


@dataclass(frozen=True)
class SurfaceDescriptor:
    """An exact closed surface: the unit sphere, a torus, or an ellipsoid.

    ``params`` is () for the sphere, (R, r) for the torus (major/minor radius,
    R > r > 0), and (a, b, c) for the ellipsoid (positive semi-axes).
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind == SPHERE:
            if self.params:
                raise DomainError("unit sphere takes no parameters")
        elif self.kind == TORUS:
            if len(self.params) != 2:
                raise DomainError("torus needs (R, r)")
            R, r = self.params
            if not (R > r > 0):
                raise DomainError(f"torus requires R > r > 0, got R={R}, r={r}")
        elif self.kind == ELLIPSOID:
            if len(self.params) != 3 or not all(s > 0 for s in self.params):
                raise DomainError("ellipsoid needs positive semi-axes (a, b, c)")
        else:
            raise DomainError(f"unknown surface kind {self.kind!r}")
        object.__setattr__(self, "params", tuple(float(s) for s in self.params))

    def tube_limits(self):
        """Signed-distance interval (lo, hi) where projection is accepted.

        The bound is conservative (a 0.9 safety factor toward the medial
        axis); the outside of the convex surfaces is unbounded because every
        exterior point has a unique nearest point there.
        """
        if self.kind == SPHERE:
            return (-_TUBE_SAFETY, math.inf)
        if self.kind == TORUS:
            R, r = self.params
            return (-_TUBE_SAFETY * r, _TUBE_SAFETY * (R - r))
        a = max(self.params)
        c = min(self.params)
        return (-_TUBE_SAFETY * c * c / a, math.inf)

    def describe(self):
        """Short human-readable form, e.g. ``torus(R=2, r=0.5)``."""
        if self.kind == SPHERE:
            return "sphere"
        inner = ", ".join(f"{v:g}" for v in self.params)
        return f"{self.kind}({inner})"


def unit_sphere():
    return SurfaceDescriptor(SPHERE)


def torus(R, r):
    return SurfaceDescriptor(TORUS, (R, r))


def ellipsoid(a, b, c):
    return SurfaceDescriptor(ELLIPSOID, (a, b, c))


def _as_points(p):
    pts = np.asarray(p, dtype=float)
    if pts.shape[-1] != 3:
        raise DomainError(f"points must have a trailing dimension of 3, got {pts.shape}")
    return pts, pts.ndim == 1


def _check_tube(surface, dist, what):
    lo, hi = surface.tube_limits()
    bad = (dist < lo) | (dist > hi)
    if np.any(bad):
        worst = float(np.asarray(dist)[bad].flat[0])
        raise OutOfTubularNeighborhood(
            f"{what}: point at signed distance {worst:.6g} outside the "
            f"admissible band [{lo:.6g}, {hi:.6g}] of {surface.describe()}"
        )


def _raw_distance(surface, pts):
    """Signed distance without the tubular-neighborhood check."""
    if surface.kind == SPHERE:
        return np.linalg.norm(pts, axis=-1) - 1.0
    if surface.kind == TORUS:
        R, r = surface.params
        rho = np.hypot(pts[..., 0], pts[..., 1])
        return np.hypot(rho - R, pts[..., 2]) - r
    q = _project_ellipsoid(surface, pts)
    a, b, c = surface.params
    level = (pts[..., 0] / a) ** 2 + (pts[..., 1] / b) ** 2 + (pts[..., 2] / c) ** 2
    return np.where(level >= 1.0, 1.0, -1.0) * np.linalg.norm(pts - q, axis=-1)


def signed_distance(surface, p):
    """Signed distance to the surface: negative inside the enclosed volume.

    Raises OutOfTubularNeighborhood when the point is so far from the surface
    that a nearest point would be ambiguous (conservatively judged).
    """
    pts, single = _as_points(p)
    d = _raw_distance(surface, pts)
    _check_tube(surface, d, "signed_distance")
    return float(d) if single else d


def project(surface, p):
    """Closest point on the surface; the segment p -> result is normal to S."""
    pts, single = _as_points(p)
    d = _raw_distance(surface, pts)
    _check_tube(surface, d, "project")
    if surface.kind == SPHERE:
        q = pts / np.linalg.norm(pts, axis=-1, keepdims=True)
    elif surface.kind == TORUS:
        R, r = surface.params
        rho = np.hypot(pts[..., 0], pts[..., 1])
        center = np.empty_like(pts)
        center[..., 0] = R * pts[..., 0] / rho
        center[..., 1] = R * pts[..., 1] / rho
        center[..., 2] = 0.0
        spoke = pts - center
        q = center + r * spoke / np.linalg.norm(spoke, axis=-1, keepdims=True)
    else:
        q = _project_ellipsoid(surface, pts)
    return q


def _project_ellipsoid(surface, pts):
    """Nearest ellipsoid point via damped Newton on the Lagrange parameter.

    The closest point has the form q_i = s_i^2 p_i / (s_i^2 + t) for the root
    t of  sum_i (s_i p_i)^2 / (s_i^2 + t)^2 = 1,  which is monotone and convex
    in t on (-min s_i^2, inf); an overshoot below the singular boundary is
    damped by bisection toward it.
    """
    s2 = np.array(surface.params, dtype=float) ** 2
    smin2 = s2.min()
    flat = pts.reshape(-1, 3)
    w = s2 * flat**2  # (n, 3): (s_i p_i)^2
    t = np.zeros(flat.shape[0])
    converged = np.zeros(flat.shape[0], dtype=bool)
    for _ in range(_NEWTON_MAX_ITER):
        denom = s2 + t[:, None]
        g = np.sum(w / denom**2, axis=1) - 1.0
        gp = -2.0 * np.sum(w / denom**3, axis=1)
        step = np.where(gp != 0.0, g / np.where(gp != 0.0, gp, 1.0), 0.0)
        t_new = t - step
        overshoot = t_new <= -smin2
        t_new[overshoot] = 0.5 * (t[overshoot] - smin2)
        converged = (np.abs(g) <= _NEWTON_TOL) & (np.abs(t_new - t) <= _NEWTON_TOL * (1.0 + np.abs(t)))
        t = t_new
        if converged.all():
            break
    if not converged.all():
        n_bad = int(np.count_nonzero(~converged))
        denom = s2 + t[:, None]
        res = float(np.max(np.abs(np.sum(w / denom**2, axis=1) - 1.0)))
        raise NoConvergence(
            f"ellipsoid projection stalled for {n_bad} point(s)", _NEWTON_MAX_ITER, res
        )
    q = (s2 * flat) / (s2 + t[:, None])
    return q.reshape(pts.shape)


def surface_normal(surface, p):
    """Outward unit normal at a point on (or very near) the surface."""
    pts, single = _as_points(p)
    if surface.kind == SPHERE:
        n = pts / np.linalg.norm(pts, axis=-1, keepdims=True)
    elif surface.kind == TORUS:
        R, _ = surface.params
        rho = np.hypot(pts[..., 0], pts[..., 1])
        center = np.stack(
            [R * pts[..., 0] / rho, R * pts[..., 1] / rho, np.zeros_like(rho)], axis=-1
        )
        spoke = pts - center
        n = spoke / np.linalg.norm(spoke, axis=-1, keepdims=True)
    else:
        s2 = np.array(surface.params, dtype=float) ** 2
        grad = pts / s2
        n = grad / np.linalg.norm(grad, axis=-1, keepdims=True)
    return n


def sample_points(surface, n, rng, offset_scale=0.0):
    """n quasi-random points on the surface, optionally offset along normals.

    ``offset_scale`` is relative to the narrow side of the admissible tube.
    """
    if surface.kind == SPHERE:
        v = rng.normal(size=(n, 3))
        pts = v / np.linalg.norm(v, axis=1, keepdims=True)
    elif surface.kind == TORUS:
        R, r = surface.params
        th = rng.uniform(0.0, 2.0 * np.pi, size=n)
        ph = rng.uniform(0.0, 2.0 * np.pi, size=n)
        w = R + r * np.cos(ph)
        pts = np.stack([w * np.cos(th), w * np.sin(th), r * np.sin(ph)], axis=1)
    else:
        v = rng.normal(size=(n, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        pts = _project_ellipsoid(surface, v * np.array(surface.params))
    if offset_scale:
        lo, hi = surface.tube_limits()
        width = min(-lo, hi if math.isfinite(hi) else -lo)
        offs = rng.uniform(-offset_scale, offset_scale, size=n) * width
        pts = pts + offs[:, None] * surface_normal(surface, pts)
    return pts


@dataclass(frozen=True)
class ManufacturedCase:
    """An analytic solution u of -lap_S u + u = f with its data.

    ``u_exact`` and ``f`` map points (..., 3) on S to scalars; ``grad_u_exact``
    maps them to the tangential gradient, shape (..., 3).
    """

    surface: SurfaceDescriptor
    name: str
    u_exact: Callable = field(repr=False)
    grad_u_exact: Callable = field(repr=False)
    f: Callable = field(repr=False)


def _constant_case(surface):
    return ManufacturedCase(
        surface,
        "constant",
        u_exact=lambda p: np.ones(np.shape(p)[:-1]),
        grad_u_exact=lambda p: np.zeros(np.shape(p)),
        f=lambda p: np.ones(np.shape(p)[:-1]),
    )


def _sphere_cases(surface):
    def grad_z(p):
        # grad_S z = e_z - z n with n = p on the unit sphere
        g = -p[..., 2:3] * p
        g[..., 2] += 1.0
        return g

    def grad_xy(p):
        x, y, z = p[..., 0], p[..., 1], p[..., 2]
        amb = np.stack([y, x, np.zeros_like(x)], axis=-1)
        return amb - (2.0 * x * y)[..., None] * p

    return [
        _constant_case(surface),
        ManufacturedCase(
            surface,
            "linear-harmonic",
            u_exact=lambda p: p[..., 2],
            grad_u_exact=grad_z,
            f=lambda p: 3.0 * p[..., 2],
        ),
        ManufacturedCase(
            surface,
            "quadratic-harmonic",
            u_exact=lambda p: p[..., 0] * p[..., 1],
            grad_u_exact=grad_xy,
            f=lambda p: 7.0 * p[..., 0] * p[..., 1],
        ),
    ]


def _torus_cases(surface):
    R, r = surface.params

    def angles(p):
        rho = np.hypot(p[..., 0], p[..., 1])
        sin_ph = p[..., 2] / r
        cos_ph = (rho - R) / r
        cos_th = p[..., 0] / rho
        sin_th = p[..., 1] / rho
        return rho, sin_ph, cos_ph, cos_th, sin_th

    def frame(p):
        rho, sin_ph, cos_ph, cos_th, sin_th = angles(p)
        zeros = np.zeros_like(rho)
        e_th = np.stack([-sin_th, cos_th, zeros], axis=-1)
        e_ph = np.stack([-sin_ph * cos_th, -sin_ph * sin_th, cos_ph], axis=-1)
        return rho, sin_ph, cos_ph, cos_th, sin_th, e_th, e_ph

    # u = sin(phi) * cos(theta): oscillates in both angles
    def u_two(p):
        _, sin_ph, _, cos_th, _ = angles(p)
        return sin_ph * cos_th

    def grad_two(p):
        rho, sin_ph, cos_ph, cos_th, sin_th, e_th, e_ph = frame(p)
        du_th = -sin_ph * sin_th
        du_ph = cos_ph * cos_th
        return (du_th / rho)[..., None] * e_th + (du_ph / r)[..., None] * e_ph

    def f_two(p):
        rho, sin_ph, cos_ph, cos_th, _ = angles(p)
        return sin_ph * cos_th * (1.0 + 1.0 / rho**2 + 1.0 / r**2) + (
            sin_ph * cos_ph * cos_th / (r * rho)
        )

    # u = sin(phi) = z / r: varies around the tube only
    def u_tube(p):
        return p[..., 2] / r

    def grad_tube(p):
        rho, sin_ph, cos_ph, cos_th, sin_th, e_th, e_ph = frame(p)
        return (cos_ph / r)[..., None] * e_ph

    def f_tube(p):
        rho, sin_ph, cos_ph, _, _ = angles(p)
        return sin_ph / r**2 + sin_ph * cos_ph / (r * rho) + sin_ph

    return [
        _constant_case(surface),
        ManufacturedCase(surface, "two-angle", u_two, grad_two, f_two),
        ManufacturedCase(surface, "tube-angle", u_tube, grad_tube, f_tube),
    ]


def _ellipsoid_cases(surface):
    a, b, c = surface.params

    def pieces(p):
        x, y, z = p[..., 0], p[..., 1], p[..., 2]
        gx, gy, gz = x / a**2, y / b**2, z / c**2
        m = np.sqrt(gx**2 + gy**2 + gz**2)
        return x, y, z, gx, gy, gz, m

    def mean_curv(p):
        x, y, z, gx, gy, gz, m = pieces(p)
        tr = 1.0 / a**2 + 1.0 / b**2 + 1.0 / c**2
        num = x**2 / a**6 + y**2 / b**6 + z**2 / c**6
        return tr / m - num / m**3

    def u_lin(p):
        return p[..., 2]

    def grad_lin(p):
        x, y, z, gx, gy, gz, m = pieces(p)
        nz = gz / m
        n = np.stack([gx, gy, gz], axis=-1) / m[..., None]
        g = -nz[..., None] * n
        g[..., 2] += 1.0
        return g

    def f_lin(p):
        _, _, z, gx, gy, gz, m = pieces(p)
        return z + mean_curv(p) * gz / m

    return [
        _constant_case(surface),
        ManufacturedCase(surface, "linear-z", u_lin, grad_lin, f_lin),
    ]


def manufactured_cases(surface):
    """All analytic test problems available for the given surface."""
    if surface.kind == SPHERE:
        return _sphere_cases(surface)
    if surface.kind == TORUS:
        return _torus_cases(surface)
    return _ellipsoid_cases(surface)


def get_case(surface, name):
    """Look up a manufactured case by name; DomainError if absent."""
    for case in manufactured_cases(surface):
        if case.name == name:
            return case
    known = ", ".join(c.name for c in manufactured_cases(surface))
    raise DomainError(f"no case {name!r} for {surface.describe()} (known: {known})")
