"""Oriented boxes, ellipses and their 2-D Gaussian form.

A box ``(cx, cy, w, h, theta)`` maps to a Gaussian whose mean is the box
center and whose covariance is that of a uniform distribution over the
rectangle. Two Gaussians are compared with the Bhattacharyya distance and the
Hellinger distance derived from it; the latter is a bounded metric in [0, 1].

Angles are radians from the +x image axis toward +y (row-down coordinates).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DET_FLOOR = 1e-30


class SingularCovarianceError(ValueError):
    pass


def normalize_angle(theta: float) -> float:
    """Map ``theta`` onto [0, pi); a rectangle is unchanged by a half turn."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    t = math.fmod(theta, math.pi)
    if t < 0.0:
        t += math.pi
    # fmod of a tiny negative number plus pi rounds up to pi itself
    if t >= math.pi:
        t = 0.0
    return t


@dataclass(frozen=True)
class OrientedBox:
    cx: float
    cy: float
    w: float
    h: float
    theta: float = 0.0

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box sides must be positive, got w={self.w!r} h={self.h!r}")
        if not (math.isfinite(self.cx) and math.isfinite(self.cy)):
            raise ValueError("box center must be finite")
        if not (math.isfinite(self.w) and math.isfinite(self.h)):
            raise ValueError("box sides must be finite")
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))


@dataclass(frozen=True)
class Ellipse:
    cx: float
    cy: float
    a: float
    b: float
    theta: float = 0.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"semi-axes must be positive, got a={self.a!r} b={self.b!r}")

    def to_box(self) -> OrientedBox:
        return OrientedBox(self.cx, self.cy, 2.0 * self.a, 2.0 * self.b, self.theta)


@dataclass(frozen=True)
class GaussianBB:
    """Mean ``(x, y)`` and covariance ``[[a, c], [c, b]]``."""

    x: float
    y: float
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.a * self.b - self.c * self.c > 0):
            raise ValueError("covariance must be symmetric positive definite")

    @property
    def mu(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def cov(self) -> np.ndarray:
        return np.array([[self.a, self.c], [self.c, self.b]])

    @property
    def det(self) -> float:
        return self.a * self.b - self.c * self.c


def obb_to_ellipse(box: OrientedBox) -> Ellipse:
    return Ellipse(box.cx, box.cy, box.w / 2.0, box.h / 2.0, box.theta)


def obb_to_gaussian(box: OrientedBox) -> GaussianBB:
    var_w = box.w * box.w / 12.0
    var_h = box.h * box.h / 12.0
    if var_w == var_h:
        # exact for squares: no angle dependence at all
        return GaussianBB(box.cx, box.cy, var_w, var_h, 0.0)
    cos_t = math.cos(box.theta)
    sin_t = math.sin(box.theta)
    a = var_w * cos_t * cos_t + var_h * sin_t * sin_t
    b = var_w * sin_t * sin_t + var_h * cos_t * cos_t
    c = 0.5 * (var_w - var_h) * math.sin(2.0 * box.theta)
    return GaussianBB(box.cx, box.cy, a, b, c)


def bhattacharyya_distance(p: GaussianBB, q: GaussianBB) -> float:
    det_p = p.det
    det_q = q.det
    a = 0.5 * (p.a + q.a)
    b = 0.5 * (p.b + q.b)
    c = 0.5 * (p.c + q.c)
    det_m = a * b - c * c
    if det_p <= DET_FLOOR or det_q <= DET_FLOOR or det_m <= DET_FLOOR:
        raise SingularCovarianceError("singular covariance")
    dx = p.x - q.x
    dy = p.y - q.y
    # closed-form inverse of the mean covariance: adj / det
    quad = (b * dx * dx - 2.0 * c * dx * dy + a * dy * dy) / det_m
    dist = 0.125 * quad + 0.5 * math.log(det_m / math.sqrt(det_p * det_q))
    return max(dist, 0.0)


def hellinger_distance(p: GaussianBB, q: GaussianBB) -> float:
    bd = bhattacharyya_distance(p, q)
    return math.sqrt(-math.expm1(-bd))


def gaussian_array(gaussians) -> np.ndarray:
    """Stack Gaussians into an ``(n, 5)`` array of ``x, y, a, b, c``."""
    out = np.empty((len(gaussians), 5), dtype=np.float64)
    for i, g in enumerate(gaussians):
        out[i] = (g.x, g.y, g.a, g.b, g.c)
    return out


def hellinger_matrix(ps, qs) -> np.ndarray:
    """Pairwise Hellinger distances; ``ps``/``qs`` are Gaussians or ``(n, 5)`` arrays."""
    P = ps if isinstance(ps, np.ndarray) else gaussian_array(ps)
    Q = qs if isinstance(qs, np.ndarray) else gaussian_array(qs)
    if P.shape[0] == 0 or Q.shape[0] == 0:
        return np.zeros((P.shape[0], Q.shape[0]))
    px, py, pa, pb, pc = (P[:, k, None] for k in range(5))
    qx, qy, qa, qb, qc = (Q[None, :, k] for k in range(5))
    det_p = pa * pb - pc * pc
    det_q = qa * qb - qc * qc
    a = 0.5 * (pa + qa)
    b = 0.5 * (pb + qb)
    c = 0.5 * (pc + qc)
    det_m = a * b - c * c
    if (det_p <= DET_FLOOR).any() or (det_q <= DET_FLOOR).any() or (det_m <= DET_FLOOR).any():
        raise SingularCovarianceError("singular covariance")
    dx = px - qx
    dy = py - qy
    quad = (b * dx * dx - 2.0 * c * dx * dy + a * dy * dy) / det_m
    bd = 0.125 * quad + 0.5 * np.log(det_m / np.sqrt(det_p * det_q))
    bd = np.maximum(bd, 0.0)
    return np.sqrt(-np.expm1(-bd))


def rotate_covariance(cov: np.ndarray, phi: float) -> np.ndarray:
    """Return ``R(phi) @ cov @ R(phi).T``."""
    r = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    return r @ cov @ r.T
