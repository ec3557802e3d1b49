"""
Schrodinger form of the Maxwell equation on the Riemann-Silberstein vector
F = E + iB, helicity analysis, exact spectral evolution on periodic boxes,
and the action-factorization / quantum-potential apparatus.

The complex 3-vector form uses the spin-1 matrices (Sigma^p)_{jk} =
-i eps_{pjk}; i dF/dt = -i Sigma.grad F, whose right side equals curl F,
splitting back into dE/dt = curl B, dB/dt = -curl E.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from stamax import algebra as al
from stamax import grids as gr

SPIN1 = np.zeros((3, 3, 3), dtype=complex)
for _p in range(3):
    for _j in range(3):
        for _k in range(3):
            eps = 0
            if (_p, _j, _k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
                eps = 1
            elif (_p, _j, _k) in ((0, 2, 1), (2, 1, 0), (1, 0, 2)):
                eps = -1
            SPIN1[_p, _j, _k] = -1j * eps


class DegenerateAmplitudeError(ValueError):
    """The factored amplitude is non-invertible where a generic evaluation
    was requested."""


# ---------------------------------------------------------------------------
# Riemann-Silberstein vector <-> bivector
# ---------------------------------------------------------------------------

def rs_from_bivector(F: np.ndarray) -> np.ndarray:
    """(..., 16) bivector -> (..., 3) complex E + iB."""
    E, B = al.pauli_split(F)
    return E + 1j * B


def rs_to_bivector(rs: np.ndarray) -> np.ndarray:
    rs = np.asarray(rs, dtype=complex)
    return al.pauli_assemble(rs.real, rs.imag)


# ---------------------------------------------------------------------------
# Schrodinger form on spatial grids
# ---------------------------------------------------------------------------

def _require_spatial(rs: np.ndarray):
    rs = np.asarray(rs, dtype=complex)
    if rs.ndim < 4 or rs.shape[-1] != 3:
        raise ValueError("expected an (nx, ny, nz, 3) complex field")
    if min(rs.shape[:3]) < 5:
        raise ValueError("grid too small for central stencils (need >= 5 per axis)")
    return rs


def sigma_dot_grad(rs: np.ndarray, spacing) -> np.ndarray:
    """Sigma . grad F via the spin-1 matrices (equals i curl F)."""
    rs = _require_spatial(rs)
    out = np.zeros_like(rs)
    for p in range(3):
        dp = np.gradient(rs, spacing[p], axis=p, edge_order=2)
        out += np.einsum("jk,...k->...j", SPIN1[p], dp)
    return out


def schrodinger_rhs(rs: np.ndarray, spacing) -> np.ndarray:
    """Hamiltonian action i dF/dt = -i Sigma.grad F (= curl F)."""
    return -1j * sigma_dot_grad(rs, spacing)


def rs_time_derivative(rs: np.ndarray, spacing) -> np.ndarray:
    """dF/dt = -i curl F; real/imag parts are curl B and -curl E."""
    return -1j * schrodinger_rhs(rs, spacing)


def curl_fd(V: np.ndarray, spacing) -> np.ndarray:
    """Hand-coded curl of a complex 3-field, for cross-checking the matrices."""
    V = np.asarray(V)

    def d(c, ax):
        return np.gradient(c, spacing[ax], axis=ax, edge_order=2)

    cx = d(V[..., 2], 1) - d(V[..., 1], 2)
    cy = d(V[..., 0], 2) - d(V[..., 2], 0)
    cz = d(V[..., 1], 0) - d(V[..., 0], 1)
    return np.stack([cx, cy, cz], axis=-1)


# ---------------------------------------------------------------------------
# Spectral evolution on a periodic box
# ---------------------------------------------------------------------------

def spectral_propagate(rs0: np.ndarray, spacing, t: float):
    """Advance E + iB by time t on a periodic box, exactly per Fourier mode.

    Each mode obeys dF/dt = k x F; the transverse part rotates by |k| t about
    k-hat (helicity eigenvectors pick up phases exp(-+ i |k| t)) while the
    longitudinal part is constant in time, is not Maxwell data, and is
    reported as a diagnostic. Dims must be powers of two.

    Returns (rs_t, diagnostics) with diagnostics carrying the longitudinal
    fraction of the total norm.
    """
    rs0 = _require_spatial(rs0)
    dims = rs0.shape[:3]
    for n in dims:
        if n & (n - 1):
            raise ValueError(f"spectral box dims must be powers of two, got {dims}")
    F = np.fft.fftn(rs0, axes=(0, 1, 2))
    ks = [2 * np.pi * np.fft.fftfreq(dims[i], d=spacing[i]) for i in range(3)]
    KX, KY, KZ = np.meshgrid(*ks, indexing="ij")
    K = np.stack([KX, KY, KZ], axis=-1)
    kmag = np.linalg.norm(K, axis=-1)
    safe = np.where(kmag > 0, kmag, 1.0)
    khat = K / safe[..., None]
    c_long = np.einsum("...k,...k->...", khat, F)
    F_long = c_long[..., None] * khat
    F_perp = F - F_long
    theta = kmag * t
    rotated = (
        F_long
        + np.cos(theta)[..., None] * F_perp
        + np.sin(theta)[..., None] * np.cross(khat, F_perp)
    )
    zero = kmag == 0
    rotated[zero] = F[zero]
    long_norm = float(np.sqrt(np.sum(np.abs(F_long[~zero]) ** 2)))
    total_norm = float(np.sqrt(np.sum(np.abs(F) ** 2))) or 1.0
    out = np.fft.ifftn(rotated, axes=(0, 1, 2))
    return out, {"longitudinal_fraction": long_norm / total_norm}


def helicity_project(f, k):
    """Decompose a complex amplitude into (plus, minus, longitudinal) parts.

    Plus helicity is the eigenvalue -i subspace of k-hat cross (the
    e1 + i e2 state for k along e3); projections are idempotent, mutually
    annihilating, and sum to the input.
    """
    f = np.asarray(f, dtype=complex)
    k = np.asarray(k, dtype=float)
    kn = np.linalg.norm(k)
    if kn == 0:
        raise ValueError("helicity needs a nonzero wave vector")
    khat = k / kn
    longitudinal = np.dot(khat, f) * khat
    ft = f - longitudinal
    cross = np.cross(khat, ft)
    plus = 0.5 * (ft + 1j * cross)
    minus = 0.5 * (ft - 1j * cross)
    return plus, minus, longitudinal


# ---------------------------------------------------------------------------
# Action factorization F = amplitude * exp(g5 S)
# ---------------------------------------------------------------------------

def t0_of(F_closure, t, x, y, z) -> np.ndarray:
    vals = F_closure.values(t, x, y, z)
    return -0.5 * al.gp(vals, al.gp(al.GAMMA[0], vals))


@dataclass
class HJFactorization:
    """Action S and amplitude closure with F = amplitude exp(g5 S)."""

    F_closure: object
    S_fn: object                       # S(t, x, y, z) -> float
    S_grad: object = None              # optional exact (dS_t, .., dS_z)
    exactness_residual: float | None = None  # max |d T0| over probe points
    reference: tuple | None = None

    def S(self, t, x, y, z) -> float:
        return float(self.S_fn(t, x, y, z))

    def amplitude(self, t, x, y, z) -> np.ndarray:
        S = self.S_fn(t, x, y, z)
        return al.gp(self.F_closure.values(t, x, y, z), al.duality_exp(-np.asarray(S)))

    def action_gradient(self, t, x, y, z, h: float = 1e-5) -> np.ndarray:
        """dS as a grade-1 multivector (exact when S_grad is supplied)."""
        if self.S_grad is not None:
            comps = np.asarray(self.S_grad(t, x, y, z), dtype=float)
        else:
            pt = np.array([t, x, y, z], dtype=float)
            comps = np.empty(4)
            for mu in range(4):
                dp, dm = pt.copy(), pt.copy()
                dp[mu] += h
                dm[mu] -= h
                comps[mu] = (self.S_fn(*dp) - self.S_fn(*dm)) / (2 * h)
        return al.vector(comps)


def exactness_residual(F_closure, points, h: float = 1e-4) -> float:
    """max |d(T0)| over probe points: the path-independence diagnostic."""
    worst = 0.0
    has_jac = getattr(F_closure, "has_jacobian", False)
    for pt in points:
        pt = np.asarray(pt, dtype=float)
        if has_jac:
            Fv = F_closure.values(*pt)
            jac = F_closure.jacobian(*pt)
            dT0 = np.zeros(16)
            for mu in range(4):
                dT0_mu = -0.5 * (
                    al.gp(jac[mu], al.gp(al.GAMMA[0], Fv)) + al.gp(Fv, al.gp(al.GAMMA[0], jac[mu]))
                )
                dT0 += al.grade_project(al.gp(al.basis_vector(mu), dT0_mu), 2)
        else:
            dT0 = np.zeros(16)
            for mu in range(4):
                dp, dm = pt.copy(), pt.copy()
                dp[mu] += h
                dm[mu] -= h
                diff = (t0_of(F_closure, *dp) - t0_of(F_closure, *dm)) / (2 * h)
                dT0 += al.grade_project(al.gp(al.basis_vector(mu), diff), 2)
        worst = max(worst, float(al.norm(dT0)))
    return worst


def action_from_T0(
    F_closure, reference=(0.0, 0.0, 0.0, 0.0), quad_order: int = 32,
    probe_points=None,
) -> HJFactorization:
    """Recover S(x) = -integral of T0 along an axis-ordered staircase path.

    The path runs from the reference point along t, then x, y, z; each
    segment uses Gauss-Legendre quadrature of the matching T0 component. For
    fields whose T0 is not closed the result is path dependent; that is
    surfaced through exactness_residual over the probe points, never averaged
    away.
    """
    from numpy.polynomial.legendre import leggauss

    nodes, weights = leggauss(quad_order)
    ref = np.asarray(reference, dtype=float)

    def S_fn(t, x, y, z):
        target = np.array([t, x, y, z], dtype=float)
        total = 0.0
        current = ref.copy()
        for mu in range(4):
            a, b = current[mu], target[mu]
            if a != b:
                s = 0.5 * (b - a) * nodes + 0.5 * (a + b)
                pts = np.tile(current, (quad_order, 1))
                pts[:, mu] = s
                T0 = t0_of(F_closure, pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3])
                comp = T0[:, 1 << mu]
                total += 0.5 * (b - a) * float(np.sum(weights * comp))
            current[mu] = target[mu]
        return -total

    res = None
    if probe_points is not None:
        res = exactness_residual(F_closure, probe_points)
    return HJFactorization(F_closure, S_fn, None, res, tuple(ref))


# ---------------------------------------------------------------------------
# Quantum potential / generalized HJ balance
# ---------------------------------------------------------------------------

@dataclass
class QuantumPotentialEval:
    Q_F: float
    hje_residual: float
    constraint_grade2: float
    constraint_grade4: float
    dS_squared: float
    linearized_Q: np.ndarray | None
    degenerate: bool


def quantum_potential(
    fact: HJFactorization, q, amp_tol: float = 1e-12, null_tol: float = 1e-10
) -> QuantumPotentialEval:
    """Evaluate the HJ balance dS.dS + <g5 dln(amp) dS>_0 and its constraints.

    dln(amp) = (d/ amp) amp^{-1} with amp^{-1} = rev(amp) (amp rev(amp))^{-1}.
    A constant amplitude short-circuits to the free-photon case (everything
    zero up to the supplied derivatives); a non-invertible amplitude with
    nonvanishing derivative raises DegenerateAmplitudeError.
    """
    t, x, y, z = (float(v) for v in q)
    F = fact.F_closure
    dS = fact.action_gradient(t, x, y, z)
    dS2 = float(al.minkowski_dot(dS, dS))
    amp = fact.amplitude(t, x, y, z)
    # d_mu amp = (d_mu F - d_mu S g5 F) exp(-g5 S)
    if getattr(F, "has_jacobian", False):
        jacF = F.jacobian(t, x, y, z)
    else:
        h = 1e-5
        jacF = np.empty((4, 16))
        pt = np.array([t, x, y, z])
        for mu in range(4):
            dp, dm = pt.copy(), pt.copy()
            dp[mu] += h
            dm[mu] -= h
            jacF[mu] = (F.values(*dp) - F.values(*dm)) / (2 * h)
    Sval = fact.S(t, x, y, z)
    dS_comp = al.vector_components(dS)
    phase = al.duality_exp(-Sval)
    Fv = F.values(t, x, y, z)
    d_amp = np.empty((4, 16))
    for mu in range(4):
        d_amp[mu] = al.gp(jacF[mu] - dS_comp[mu] * al.gp(al.GAMMA5, Fv), phase)
    dirac_amp = np.zeros(16)
    for mu in range(4):
        dirac_amp += al.gp(al.basis_vector(mu), d_amp[mu])

    amp_scale = float(al.norm(amp)) or 1.0
    if float(np.max(al.norm(d_amp))) <= amp_tol * amp_scale:
        # constant amplitude: the free-photon degenerate check
        return QuantumPotentialEval(
            Q_F=0.0, hje_residual=abs(dS2), constraint_grade2=0.0,
            constraint_grade4=0.0, dS_squared=dS2, linearized_Q=None, degenerate=True,
        )

    amp2 = al.gp(amp, al.reverse(amp))  # scalar + pseudoscalar pair
    s, p = amp2[al.SCALAR], amp2[al.G5]
    denom = s * s + p * p
    if denom <= (amp_tol * amp_scale**2) ** 2:
        raise DegenerateAmplitudeError(
            f"amplitude is not invertible at {tuple(q)}: |amp rev(amp)| = {np.sqrt(denom):.3e}"
        )
    inv_pair = np.zeros(16)
    inv_pair[al.SCALAR] = s / denom
    inv_pair[al.G5] = -p / denom
    amp_inv = al.gp(al.reverse(amp), inv_pair)
    dln = al.gp(dirac_amp, amp_inv)
    obj = al.gp(al.GAMMA5, al.gp(dln, dS))
    Q_F = float(obj[al.SCALAR])
    hje = abs(dS2 + Q_F)
    c2 = float(al.norm(al.grade_project(obj, 2)))
    c4 = float(al.norm(al.grade_project(obj, 4)))
    linearized = None
    if abs(dS2) > null_tol * float(np.sum(al.vector_components(dS) ** 2)):
        linearized = al.gp(al.GAMMA5, dln)
    return QuantumPotentialEval(
        Q_F=Q_F, hje_residual=hje, constraint_grade2=c2, constraint_grade4=c4,
        dS_squared=dS2, linearized_Q=linearized, degenerate=False,
    )


# ---------------------------------------------------------------------------
# Momentum operator and trajectory integration
# ---------------------------------------------------------------------------

def momentum_operator(F_closure, t, x, y, z) -> np.ndarray:
    """P-hat F = -g5 (d/ F), from the closure's exact jacobian."""
    jac = F_closure.jacobian(t, x, y, z)
    dF = np.zeros(jac.shape[:-2] + (16,))
    for mu in range(4):
        dF += al.gp(al.basis_vector(mu), jac[..., mu, :])
    return al.gp(-al.GAMMA5, dF)


def integrate_trajectory(velocity_fn, start, step: float, n_steps: int) -> np.ndarray:
    """RK4 integral curve of a 4-velocity field v(t, x, y, z) -> (4,)."""
    path = np.empty((n_steps + 1, 4))
    path[0] = np.asarray(start, dtype=float)
    pt = path[0].copy()
    for i in range(n_steps):
        k1 = np.asarray(velocity_fn(*pt))
        k2 = np.asarray(velocity_fn(*(pt + 0.5 * step * k1)))
        k3 = np.asarray(velocity_fn(*(pt + 0.5 * step * k2)))
        k4 = np.asarray(velocity_fn(*(pt + step * k3)))
        pt = pt + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        path[i + 1] = pt
    return path


def action_velocity(fact: HJFactorization):
    """Integral-curve generator of the recovered -dS field (upper index)."""

    def v(t, x, y, z):
        dS = fact.action_gradient(t, x, y, z)
        return -al.raise_index(al.vector_components(dS))

    return v


# ---------------------------------------------------------------------------
# RS field CSV round-trip (6 real columns + grid sidecar)
# ---------------------------------------------------------------------------

def save_rs_field(rs: np.ndarray, origin, spacing, csv_path) -> None:
    rs = np.asarray(rs, dtype=complex)
    dims = rs.shape[:3]
    csv_path = Path(csv_path)
    flat = rs.reshape(-1, 3)
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ReF1", "ImF1", "ReF2", "ImF2", "ReF3", "ImF3"])
        for row in flat:
            writer.writerow(
                [f"{v:.17g}" for pair in ((c.real, c.imag) for c in row) for v in pair]
            )
    sidecar = {"origin": list(origin), "spacing": list(spacing), "dims": list(dims)}
    csv_path.with_suffix(".grid.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True))


def load_rs_field(csv_path):
    csv_path = Path(csv_path)
    sidecar = json.loads(csv_path.with_suffix(".grid.json").read_text())
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    rs = data[:, 0::2] + 1j * data[:, 1::2]
    dims = tuple(sidecar["dims"])
    return rs.reshape(dims + (3,)), sidecar


def save_trajectory(path_points: np.ndarray, csv_path) -> None:
    csv_path = Path(csv_path)
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "y", "z"])
        for row in np.asarray(path_points, dtype=float):
            writer.writerow([f"{v:.17g}" for v in row])
