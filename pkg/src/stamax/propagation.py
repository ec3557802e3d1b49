"""
Vacuum evolution of Cauchy data by the retarded Green function and by the
finite-aperture Rayleigh-Sommerfeld integral, plus peak/front tracking for
the pulse-reshaping demonstration.

The delta function of the retarded kernel is integrated analytically, which
turns the Cauchy solution into the sphere-mean (Kirchhoff/Poisson) form

    Phi(t, x) = t M_t[dPhi0] + d/dt ( t M_t[Phi0] ),

with M_t the average over the sphere of radius exactly t. Data propagate
causally at speed 1; superluminal peak motion of truncated X-wave data is
pure reshaping. Scalars are complex and propagate componentwise; bivector
lifts are the caller's business.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from stamax import fields as fl


class FlatProfileError(RuntimeError):
    """Every profile sample sits below the tracking threshold."""


@dataclass
class CauchyData:
    """Initial scalar data Phi(0, x) and dPhi/dt(0, x), both complex-valued."""

    phi0: object                 # phi0(x, y, z) -> complex array
    dphi0: object                # dphi0(x, y, z) -> complex array
    compact_support: bool = False

    @classmethod
    def from_scalar(cls, scalar, window: fl.WindowParams | None = None) -> "CauchyData":
        """Cauchy data of a symbolic scalar at t = 0, optionally windowed."""

        def phi0(x, y, z):
            return scalar.partial((), 0.0, x, y, z)

        def dphi0(x, y, z):
            return scalar.partial((0,), 0.0, x, y, z)

        if window is None:
            return cls(phi0, dphi0, compact_support=False)
        return cls(_windowed(phi0, window), _windowed(dphi0, window), compact_support=True)


def _windowed(fn, window: fl.WindowParams):
    def wrapped(x, y, z):
        vals = np.asarray(fn(x, y, z))
        mask = fl.window_mask(x, y, z, window)
        return vals * np.broadcast_to(mask, vals.shape)

    return wrapped


# ---------------------------------------------------------------------------
# Sphere quadrature and the Kirchhoff formula
# ---------------------------------------------------------------------------

def unit_sphere_nodes(order: int):
    """Fixed-order spherical node set: GL in cos(theta) x uniform phi.

    Weights sum to 4 pi; spectral accuracy on smooth integrands.
    """
    xc, wc = leggauss(order)
    n_phi = 2 * order
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    wp = 2 * np.pi / n_phi
    sint = np.sqrt(np.maximum(0.0, 1.0 - xc**2))
    nx = sint[:, None] * np.cos(phi)[None, :]
    ny = sint[:, None] * np.sin(phi)[None, :]
    nz = np.broadcast_to(xc[:, None], nx.shape)
    nodes = np.stack([nx, ny, nz], axis=-1).reshape(-1, 3)
    weights = np.broadcast_to((wc * wp)[:, None], (order, n_phi)).reshape(-1)
    return nodes, weights


def sphere_mean(fn, centers: np.ndarray, radius, nodes, weights) -> np.ndarray:
    """Average of fn over spheres |x' - c| = radius around each center row."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radius = np.broadcast_to(np.asarray(radius, dtype=float), (centers.shape[0],))
    pts = centers[:, None, :] + radius[:, None, None] * nodes[None, :, :]
    vals = np.asarray(fn(pts[..., 0], pts[..., 1], pts[..., 2]))
    return np.sum(weights[None, :] * vals, axis=1) / (4.0 * np.pi)


def kirchhoff_evolve(
    data: CauchyData, t: float, points, order: int = 32, dt_frac: float = 1e-3
):
    """Evaluate the Cauchy solution at time t > 0 for an (N, 3) point batch.

    The time derivative of t M_t[phi0] is expanded as M + t dM/dt with dM/dt
    by centered differencing of the sphere mean (step dt = dt_frac * t), so
    quadrature nodes are never differentiated.
    """
    if t <= 0:
        raise ValueError("kirchhoff_evolve needs t > 0")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    nodes, weights = unit_sphere_nodes(order)
    dt = dt_frac * t
    m_psi = sphere_mean(data.dphi0, points, t, nodes, weights)
    m_phi = sphere_mean(data.phi0, points, t, nodes, weights)
    m_plus = sphere_mean(data.phi0, points, t + dt, nodes, weights)
    m_minus = sphere_mean(data.phi0, points, t - dt, nodes, weights)
    return t * m_psi + m_phi + t * (m_plus - m_minus) / (2.0 * dt)


def kirchhoff_on_axis(
    data: CauchyData, times, z_values, order: int = 32, threads: int | None = None
) -> np.ndarray:
    """|Phi| is wanted on a (t, z) lattice along the axis; rows are times."""
    z_values = np.asarray(z_values, dtype=float)
    pts = np.zeros((z_values.size, 3))
    pts[:, 2] = z_values

    def one(t):
        return kirchhoff_evolve(data, float(t), pts, order=order)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, times))
    else:
        rows = [one(t) for t in times]
    return np.stack(rows, axis=0)


# ---------------------------------------------------------------------------
# Finite-aperture Rayleigh-Sommerfeld integral
# ---------------------------------------------------------------------------

@dataclass
class ApertureSpec:
    """Circular radiator of radius b in the z = 0 plane, emitting for a
    finite window |t'| <= T/2 (T = 2 Delta); samples are per-axis node
    counts of the polar product rule."""

    radius: float
    n_radial: int = 48
    n_phi: int = 64
    duration: float = np.inf

    def __post_init__(self):
        if self.radius <= 0 or self.n_radial < 2 or self.n_phi < 4:
            raise ValueError("aperture needs positive radius and sane sampling")
        if self.duration <= 0:
            raise ValueError("emission window must be positive")


@dataclass
class BoundaryField:
    """Scalar amplitude and its time derivative on the z = 0 plane."""

    value: object   # value(t, x, y) -> complex
    dt: object      # dt(t, x, y) -> complex

    @classmethod
    def from_scalar(cls, scalar) -> "BoundaryField":
        return cls(
            lambda t, x, y: scalar.partial((), t, x, y, 0.0),
            lambda t, x, y: scalar.partial((0,), t, x, y, 0.0),
        )


def _disk_nodes(spec: ApertureSpec):
    # GL in u with rho = b sin(pi u / 2): nodes cluster toward the rim,
    # where aperture-edge contributions live
    xu, wu = leggauss(spec.n_radial)
    u = 0.5 * (xu + 1.0)
    wu = 0.5 * wu
    rho = spec.radius * np.sin(0.5 * np.pi * u)
    drho = spec.radius * 0.5 * np.pi * np.cos(0.5 * np.pi * u)
    w_r = wu * rho * drho
    phi = 2 * np.pi * np.arange(spec.n_phi) / spec.n_phi
    w_phi = 2 * np.pi / spec.n_phi
    R_, P_ = np.meshgrid(rho, phi, indexing="ij")
    xs = (R_ * np.cos(P_)).ravel()
    ys = (R_ * np.sin(P_)).ravel()
    weights = (w_r[:, None] * w_phi).repeat(spec.n_phi).reshape(spec.n_radial, spec.n_phi).ravel()
    return xs, ys, weights


def rs_aperture_evolve(
    boundary: BoundaryField, spec: ApertureSpec, t, x: float, y: float, z: float
) -> np.ndarray:
    """Two-term retarded aperture integral at (t, x, y, z), z > 0:

        Phi = (1/2 pi) ∫ dS' [ (z/R^2) dPhi/dt' + (1/R) Phi ]_{t' = t - R}.

    Emission is windowed to |t'| <= duration/2; points too far to have been
    reached return exactly 0 by retarded causality.
    """
    if z <= 0:
        raise ValueError("aperture evolution is defined for z > 0")
    scalar_input = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    xs, ys, weights = _disk_nodes(spec)
    R = np.sqrt((x - xs) ** 2 + (y - ys) ** 2 + z * z)
    t_ret = t[:, None] - R[None, :]
    live = np.abs(t_ret) <= 0.5 * spec.duration
    tt = np.where(live, t_ret, 0.0)
    XX = np.broadcast_to(xs[None, :], tt.shape)
    YY = np.broadcast_to(ys[None, :], tt.shape)
    val = np.asarray(boundary.value(tt, XX, YY)) * live
    dval = np.asarray(boundary.dt(tt, XX, YY)) * live
    kernel = (z / R**2)[None, :] * dval + (1.0 / R)[None, :] * val
    out = np.sum(weights[None, :] * kernel, axis=1) / (2.0 * np.pi)
    return out[0] if scalar_input else out


def rs_on_axis_scan(
    boundary: BoundaryField, spec: ApertureSpec, times, z_values,
    threads: int | None = None,
) -> np.ndarray:
    times = np.asarray(times, dtype=float)

    def one(z):
        return rs_aperture_evolve(boundary, spec, times, 0.0, 0.0, float(z))

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cols = list(pool.map(one, z_values))
    else:
        cols = [one(z) for z in z_values]
    return np.stack(cols, axis=1)  # (nt, nz)


# ---------------------------------------------------------------------------
# Peak and front tracking
# ---------------------------------------------------------------------------

@dataclass
class KinematicsReport:
    times: np.ndarray
    threshold: float
    peak_positions: np.ndarray      # NaN where the slice is flat
    peak_speeds: np.ndarray         # centered differences, length nt
    front_positions: np.ndarray
    front_speeds: np.ndarray
    valid: np.ndarray               # slices with signal above threshold

    def as_dict(self) -> dict:
        def clean(a):
            return [None if not np.isfinite(v) else float(v) for v in a]

        return {
            "times": [float(v) for v in self.times],
            "threshold": self.threshold,
            "peak_positions": clean(self.peak_positions),
            "peak_speeds": clean(self.peak_speeds),
            "front_positions": clean(self.front_positions),
            "front_speeds": clean(self.front_speeds),
            "valid": [bool(v) for v in self.valid],
        }


def _parabolic_peak(z, a, i):
    """Sub-cell peak location by parabola through the three samples at i."""
    if i == 0 or i == len(z) - 1:
        return z[i]
    denom = a[i - 1] - 2 * a[i] + a[i + 1]
    if denom == 0:
        return z[i]
    delta = 0.5 * (a[i - 1] - a[i + 1]) / denom
    return z[i] + np.clip(delta, -1.0, 1.0) * (z[1] - z[0])


def _front_crossing(z, a, tau):
    above = np.nonzero(a > tau)[0]
    if above.size == 0:
        return np.nan
    i = above[-1]
    if i == len(z) - 1:
        return z[i]
    # linear interpolation of the downward crossing
    a0, a1 = a[i], a[i + 1]
    frac = (a0 - tau) / (a0 - a1) if a0 != a1 else 0.0
    return z[i] + frac * (z[i + 1] - z[i])


def _centered_speeds(times, positions):
    speeds = np.full(len(times), np.nan)
    for i in range(len(times)):
        lo, hi = max(i - 1, 0), min(i + 1, len(times) - 1)
        if hi == lo:
            continue
        if np.isfinite(positions[hi]) and np.isfinite(positions[lo]):
            speeds[i] = (positions[hi] - positions[lo]) / (times[hi] - times[lo])
    return speeds


def track_kinematics(times, z_values, profiles, threshold: float | None = None) -> KinematicsReport:
    """Peak (argmax of |amplitude|) and front (outermost threshold crossing)
    positions and their centered-difference speeds on a (t, z) lattice.

    threshold defaults to 1e-3 times the global amplitude maximum; it is a
    first-class parameter because any measured front is a detection-threshold
    front. Raises FlatProfileError when no slice carries signal.
    """
    times = np.asarray(times, dtype=float)
    z_values = np.asarray(z_values, dtype=float)
    amps = np.abs(np.asarray(profiles))
    if len(times) < 3:
        raise ValueError("kinematics needs at least 3 time samples")
    if amps.shape != (times.size, z_values.size):
        raise ValueError("profiles must be (nt, nz)")
    gmax = float(np.max(amps))
    tau = 1e-3 * gmax if threshold is None else threshold
    if gmax <= tau or gmax == 0.0:
        raise FlatProfileError(f"all profiles below threshold {tau:.3e}")
    n_t = times.size
    peak_pos = np.full(n_t, np.nan)
    front_pos = np.full(n_t, np.nan)
    valid = np.zeros(n_t, dtype=bool)
    for i in range(n_t):
        a = amps[i]
        if np.max(a) <= tau:
            continue
        valid[i] = True
        peak_pos[i] = _parabolic_peak(z_values, a, int(np.argmax(a)))
        front_pos[i] = _front_crossing(z_values, a, tau)
    if not np.any(valid):
        raise FlatProfileError(f"all profiles below threshold {tau:.3e}")
    return KinematicsReport(
        times=times,
        threshold=tau,
        peak_positions=peak_pos,
        peak_speeds=_centered_speeds(times, peak_pos),
        front_positions=front_pos,
        front_speeds=_centered_speeds(times, front_pos),
        valid=valid,
    )


def fit_speed(times, positions) -> float:
    """Least-squares speed of a tracked position sequence (finite entries)."""
    times = np.asarray(times, dtype=float)
    positions = np.asarray(positions, dtype=float)
    ok = np.isfinite(positions)
    if np.count_nonzero(ok) < 2:
        raise ValueError("not enough tracked points for a speed fit")
    return float(np.polyfit(times[ok], positions[ok], 1)[0])
