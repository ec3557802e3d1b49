"""
Closed-form field configurations: null plane waves, the superluminal X-wave,
the focus wave mode, the static charged magnetized sphere, and the localized
photon Hertz solution.

Every entry is an evaluatable closure over spacetime points (natural units,
c = 1), vectorized over numpy arrays. Scalars carrying a complex amplitude are
lifted to multivectors by mapping the imaginary unit to g5, which is central
on the even subalgebra.

Analytic derivatives: the catalog scalars are declared once as sympy
expressions with their parameters as free symbols; partial derivatives of any
order are generated symbolically and lambdified to numpy on first use, then
cached process-wide. Grid operators treat these exact partials as the fast
path and fall back to finite differences otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from stamax import algebra as al

_T, _X, _Y, _Z = sp.symbols("t x y z", real=True)
_COORDS = (_T, _X, _Y, _Z)


class DomainError(ValueError):
    """Evaluation requested outside a closure's modeled region."""


# ---------------------------------------------------------------------------
# Symbolic scalar fields with cached lambdified partials
# ---------------------------------------------------------------------------

_PARTIAL_CACHE: dict = {}


class SymbolicScalar:
    """Complex scalar closure with exact partial derivatives of any order.

    The expression and its parameter symbols identify the lambdified
    derivative functions in a process-wide cache, so a given (expression,
    multi-index) pair is differentiated and compiled exactly once no matter
    how many parameter sets are in play.
    """

    def __init__(self, key: str, expr: sp.Expr, param_symbols, param_values):
        self.key = key
        self.expr = expr
        self.param_symbols = tuple(param_symbols)
        self.param_values = tuple(float(v) for v in param_values)

    def _fn(self, mus: tuple[int, ...]):
        mus = tuple(sorted(mus))
        cache_key = (self.key, mus)
        fn = _PARTIAL_CACHE.get(cache_key)
        if fn is None:
            expr = self.expr
            for mu in mus:
                expr = sp.diff(expr, _COORDS[mu])
            fn = sp.lambdify(_COORDS + self.param_symbols, expr, modules="numpy", cse=True)
            _PARTIAL_CACHE[cache_key] = fn
        return fn

    def partial(self, mus, t, x, y, z) -> np.ndarray:
        t, x, y, z = np.broadcast_arrays(
            *(np.asarray(np.asarray(c, dtype=float)) for c in (t, x, y, z))
        )
        raw = self._fn(tuple(mus))(t, x, y, z, *self.param_values)
        out = np.asarray(raw, dtype=complex)
        return np.broadcast_to(out, t.shape).copy() if out.shape != t.shape else out

    def value(self, t, x, y, z) -> np.ndarray:
        return self.partial((), t, x, y, z)

    def __call__(self, t, x, y, z) -> np.ndarray:
        return self.value(t, x, y, z)

    def second_partials(self, t, x, y, z) -> dict[tuple[int, int], np.ndarray]:
        return {
            (mu, nu): self.partial((mu, nu), t, x, y, z)
            for mu in range(4)
            for nu in range(mu, 4)
        }


# ---------------------------------------------------------------------------
# Parameter types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x: float
    y: float
    z: float

    def as_tuple(self):
        return (self.t, self.x, self.y, self.z)


@dataclass(frozen=True)
class PlaneWaveParams:
    omega: float
    direction: tuple[float, float, float] = (0.0, 0.0, 1.0)
    helicity: int = 1
    phase0: float = 0.0

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.helicity not in (1, -1):
            raise ValueError("helicity must be +1 or -1")
        d = np.asarray(self.direction, dtype=float)
        n = float(np.linalg.norm(d))
        if n == 0.0:
            raise ValueError("direction must be nonzero")
        object.__setattr__(self, "direction", tuple(d / n))


@dataclass(frozen=True)
class XWaveParams:
    eta: float
    a0: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eta < math.pi / 2:
            raise ValueError("axicon angle eta must lie in (0, pi/2)")
        if self.a0 <= 0:
            raise ValueError("a0 must be positive")

    @property
    def peak_speed(self) -> float:
        return 1.0 / math.cos(self.eta)


@dataclass(frozen=True)
class FwmParams:
    beta: float
    z0: float

    def __post_init__(self):
        if self.beta <= 0 or self.z0 <= 0:
            raise ValueError("beta and z0 must be positive")


@dataclass(frozen=True)
class DipoleParams:
    Q: float
    C: float
    R: float

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("sphere radius R must be positive")


@dataclass(frozen=True)
class LocalizedPhotonParams:
    l: float
    m_blade: tuple = field(default_factory=lambda: tuple(al.basis(al.G12)))

    def __post_init__(self):
        if self.l <= 0:
            raise ValueError("localization length l must be positive")
        m = np.asarray(self.m_blade, dtype=float)
        if m.shape != (16,) or not al.is_grade(m, 2):
            raise ValueError("m_blade must be a constant bivector (16 coefficients)")
        object.__setattr__(self, "m_blade", tuple(m))


@dataclass(frozen=True)
class WindowParams:
    b: float
    delta: float

    def __post_init__(self):
        if self.b <= 0 or self.delta <= 0:
            raise ValueError("window extents must be positive")


# ---------------------------------------------------------------------------
# Null plane waves
# ---------------------------------------------------------------------------

def _transverse_frame(direction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-handed orthonormal (a, b, d) with a x b = d, chosen deterministically."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(d)))] = 1.0
    a = seed - np.dot(seed, d) * d
    a = a / np.linalg.norm(a)
    b = np.cross(d, a)
    return a, b, d


class PlaneWaveField:
    """F = (a + ii b) exp(h g5 phi), phi = omega (t - d.x) + phase0.

    Null (F^2 = 0) and transverse; the energy flux E x B points along
    +direction for both helicities, which enter as the sign of the duality
    exponent. The radiation-gauge potential (A0 = 0, div A = 0) is exposed for
    the canonical/spin extensor machinery.
    """

    has_jacobian = True

    def __init__(self, params: PlaneWaveParams):
        self.params = params
        a, b, d = _transverse_frame(params.direction)
        self.frame = (a, b, d)
        self._f = al.pauli_assemble(a, b)
        self._f_g5 = al.gp(self._f, al.GAMMA5)
        # lower-index gradient of phi: (omega, +omega d) since d_i phi = -omega d_i
        self._dphi = np.array([params.omega, -params.omega * d[0],
                               -params.omega * d[1], -params.omega * d[2]])

    def phase(self, t, x, y, z):
        p = self.params
        a, b, d = self.frame
        t, x, y, z = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (t, x, y, z)))
        return p.omega * (t - d[0] * x - d[1] * y - d[2] * z) + p.phase0

    def values(self, t, x, y, z) -> np.ndarray:
        phi = self.params.helicity * self.phase(t, x, y, z)
        return np.cos(phi)[..., None] * self._f + np.sin(phi)[..., None] * self._f_g5

    def jacobian(self, t, x, y, z) -> np.ndarray:
        h = self.params.helicity
        phi = h * self.phase(t, x, y, z)
        dF_dphi = -np.sin(phi)[..., None] * self._f + np.cos(phi)[..., None] * self._f_g5
        out = np.zeros(phi.shape + (4, 16))
        for mu in range(4):
            out[..., mu, :] = (h * self._dphi[mu]) * dF_dphi
        return out

    def potential_values(self, t, x, y, z) -> np.ndarray:
        """Radiation-gauge 1-form A with dA = F, A_0 = 0, div A = 0."""
        p = self.params
        a, b, d = self.frame
        phi = p.helicity * self.phase(t, x, y, z)
        avec = (np.cos(phi)[..., None] * b - np.sin(phi)[..., None] * a) / (p.helicity * p.omega)
        comps = np.zeros(phi.shape + (4,))
        comps[..., 1:] = -avec  # lower spatial components
        return al.vector(comps)

    def potential_jacobian(self, t, x, y, z) -> np.ndarray:
        p = self.params
        a, b, d = self.frame
        phi = p.helicity * self.phase(t, x, y, z)
        davec_dphi = (-np.sin(phi)[..., None] * b - np.cos(phi)[..., None] * a) / (p.helicity * p.omega)
        out = np.zeros(phi.shape + (4, 16))
        for mu in range(4):
            comps = np.zeros(phi.shape + (4,))
            comps[..., 1:] = -(p.helicity * self._dphi[mu]) * davec_dphi
            out[..., mu, :] = al.vector(comps)
        return out


def eq_5a_field(omega: float = 1.0) -> PlaneWaveField:
    """The specific null plane wave (g01 - g13) exp(g5 omega (t + z))."""
    return PlaneWaveField(PlaneWaveParams(omega=omega, direction=(0.0, 0.0, -1.0), helicity=1))


# ---------------------------------------------------------------------------
# X-wave
# ---------------------------------------------------------------------------

_A0, _SE, _CE = sp.symbols("a0 s_eta c_eta", positive=True)
_XWAVE_EXPR = _A0 / sp.sqrt(
    (_SE * sp.sqrt(_X**2 + _Y**2)) ** 2 + (_A0 - sp.I * (_CE * _Z - _T)) ** 2
)


def xwave_scalar_closure(params: XWaveParams) -> SymbolicScalar:
    return SymbolicScalar(
        "xwave", _XWAVE_EXPR, (_A0, _SE, _CE),
        (params.a0, math.sin(params.eta), math.cos(params.eta)),
    )


def xwave_scalar(t, x, y, z, params: XWaveParams) -> np.ndarray:
    """Closed form a0 / sqrt((rho sin eta)^2 + (a0 - i(z cos eta - t))^2).

    The square-root argument never meets the negative real axis (its
    imaginary part vanishes only where its real part is >= a0^2), so the
    principal branch is globally continuous and real positive on the peak
    locus z cos eta = t, rho = 0.
    """
    s, c, a0 = math.sin(params.eta), math.cos(params.eta), params.a0
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    w = (s * s) * (x * x + y * y) + (a0 - 1j * (c * z - t)) ** 2
    return a0 / np.sqrt(w)


# F_X blade assembly from second partials of the scalar; complex parts lift
# via g5.  The g12 coefficient is -(d11 + d22), the sign forced by
# F = -d(delta(Pi)) and by the Maxwell residual itself.
_XWAVE_TERMS = (
    ((0, 2), al.basis(al.G01)),
    ((0, 1), -al.basis(al.G02)),
    ((3, 2), -al.basis(al.G13)),   # g31 = -g13
    ((3, 1), al.basis(al.G23)),    # -g32 = +g23
)


class XWaveField:
    """Electromagnetic X-wave bivector assembled from analytic second partials."""

    has_jacobian = True

    def __init__(self, params: XWaveParams):
        self.params = params
        self.scalar = xwave_scalar_closure(params)

    def _assemble(self, partial_of):
        shape = None
        out = None
        for mus, blade in _XWAVE_TERMS:
            c = partial_of(mus)
            if out is None:
                shape = c.shape
                out = np.zeros(shape + (16,))
            out += c.real[..., None] * blade + c.imag[..., None] * al.gp(al.GAMMA5, blade)
        lap = partial_of((1, 1)) + partial_of((2, 2))
        blade = -al.basis(al.G12)
        out += lap.real[..., None] * blade + lap.imag[..., None] * al.gp(al.GAMMA5, blade)
        return out

    def values(self, t, x, y, z) -> np.ndarray:
        return self._assemble(lambda mus: self.scalar.partial(mus, t, x, y, z))

    def jacobian(self, t, x, y, z) -> np.ndarray:
        cols = [
            self._assemble(lambda mus, rho=rho: self.scalar.partial(mus + (rho,), t, x, y, z))
            for rho in range(4)
        ]
        return np.stack(cols, axis=-2)


# ---------------------------------------------------------------------------
# Focus wave mode
# ---------------------------------------------------------------------------

_BETA, _Z0 = sp.symbols("beta z0", positive=True)
_FWM_EXPR = (
    sp.exp(sp.I * _BETA * (_Z + _T))
    * sp.exp(-(_X**2 + _Y**2) * _BETA / (_Z0 + sp.I * (_Z - _T)))
    / (4 * sp.pi * sp.I * (_Z0 + sp.I * (_Z - _T)))
)


def fwm_scalar_closure(params: FwmParams) -> SymbolicScalar:
    return SymbolicScalar("fwm", _FWM_EXPR, (_BETA, _Z0), (params.beta, params.z0))


def fwm_hertz(t, x, y, z, params: FwmParams) -> np.ndarray:
    """Focus-wave-mode Hertz amplitude; denominator nonzero for z0 > 0."""
    b, z0 = params.beta, params.z0
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    den = z0 + 1j * (z - t)
    return np.exp(1j * b * (z + t)) * np.exp(-(x * x + y * y) * b / den) / (4 * np.pi * 1j * den)


# ---------------------------------------------------------------------------
# Static dipole (charged magnetized sphere exterior)
# ---------------------------------------------------------------------------

def static_dipole_EB(t, x, y, z, params: DipoleParams):
    """Cartesian (E, B) of the exterior field; domain error for r <= R."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    x, y, z, _ = np.broadcast_arrays(x, y, z, t)
    r2 = x * x + y * y + z * z
    r = np.sqrt(r2)
    if np.any(r <= params.R):
        raise DomainError("dipole field is modeled only outside the sphere (r > R)")
    E = (params.Q / (r2 * r))[..., None] * np.stack([x, y, z], axis=-1)
    r5 = r2 * r2 * r
    B = (params.C / r5)[..., None] * np.stack([3 * z * x, 3 * z * y, 3 * z * z - r2], axis=-1)
    return E, B


def dipole_poynting(x, y, z, params: DipoleParams) -> np.ndarray:
    """E x B = (QC / r^6)(-y, x, 0): purely azimuthal circulation."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    x, y, z = np.broadcast_arrays(x, y, z)
    r2 = x * x + y * y + z * z
    coef = params.Q * params.C / r2**3
    return np.stack([-coef * y, coef * x, np.zeros_like(coef)], axis=-1)


class DipoleField:
    """Static bivector closure for the sphere exterior."""

    has_jacobian = False

    def __init__(self, params: DipoleParams):
        self.params = params

    def values(self, t, x, y, z) -> np.ndarray:
        E, B = static_dipole_EB(t, x, y, z, self.params)
        return al.pauli_assemble(E, B)


# ---------------------------------------------------------------------------
# Localized photon Hertz solution
# ---------------------------------------------------------------------------

_L = sp.Symbol("l", positive=True)
_R_SYM = sp.sqrt(_X**2 + _Y**2 + _Z**2)
_LP_EXPR = (2 * sp.pi ** sp.Rational(3, 2) / (sp.I * _R_SYM)) * (
    sp.exp(-2 * sp.sqrt(1 + sp.I * (_T - _R_SYM) / _L))
    - sp.exp(-2 * sp.sqrt(1 + sp.I * (_T + _R_SYM) / _L))
)


def localized_photon_closure(params: LocalizedPhotonParams) -> SymbolicScalar:
    return SymbolicScalar("locphot", _LP_EXPR, (_L,), (params.l,))


def localized_photon_scalar(t, r, l: float, r_eps: float = 1e-6) -> np.ndarray:
    """Spherical-shell scalar amplitude; the r -> 0 limit is removable.

    The two retarded/advanced terms differ, so near the origin the amplitude
    is evaluated by the odd Taylor expansion of g(t-r) - g(t+r) in r, with
    g(tau) = exp(-2 sqrt(1 + i tau / l)).
    """
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    t, r = np.broadcast_arrays(t, r)
    const = 2 * math.pi**1.5

    def g(tau):
        return np.exp(-2.0 * np.sqrt(1.0 + 1j * tau / l))

    out = np.empty(t.shape, dtype=complex)
    small = np.abs(r) < r_eps * l
    big = ~small
    rb = r[big]
    out[big] = const * (g(t[big] - rb) - g(t[big] + rb)) / (1j * rb)
    if np.any(small):
        ts = t[small]
        root = np.sqrt(1.0 + 1j * ts / l)
        gp1 = g(ts) * (-1j / l) / root  # g'(t)
        out[small] = const * (-2.0 * gp1) / 1j
    return out


def localized_photon_hertz(t, x, y, z, params: LocalizedPhotonParams) -> np.ndarray:
    """Grade-2 Hertz potential H+ = m * psi(t, r), complex unit lifted to ii."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    r = np.sqrt(x * x + y * y + z * z)
    psi = localized_photon_scalar(t, r, params.l)
    m = np.asarray(params.m_blade)
    return psi.real[..., None] * m + psi.imag[..., None] * al.gp(al.PAULI_I, m)


# ---------------------------------------------------------------------------
# Analytic Hertz machinery: Pi = scalar * m, A = -delta Pi, F = dA
# ---------------------------------------------------------------------------

class HertzField:
    """Electromagnetic field generated by a Hertz potential Pi = psi(x) m.

    psi is a complex scalar with exact symbolic partials, m a constant
    bivector; the complex unit lifts to g5. All outputs are linear in the
    partial-derivative tables of psi against precomputed constant blade
    products, so A, F, dF, the Lorenz scalar delta A, and the wave residual
    are evaluated in closed form:

        A      = <d/ Pi>_1            (first partials)
        F      = <d/ A>_2 = -d delta Pi   (second partials)
        dF     = third partials
        delta A = -<d/ A>_0           (vanishes identically: Lorenz gauge)
    """

    has_jacobian = True

    def __init__(self, scalar: SymbolicScalar, m):
        m = np.asarray(m, dtype=float)
        if not al.is_grade(m, 2):
            raise ValueError("Hertz potential blade must be grade 2")
        self.scalar = scalar
        self.m = m
        # Hertz scalars are Fourier-synthesized complex waves riding
        # exp(-g5 k.x) kernels: their unit is ii = -g5. Field-coefficient
        # lifts use +g5; g5 is the Hodge operator and swaps d with delta,
        # so exactly this pairing makes -d(delta(Pi)) agree with the
        # blade-by-blade complex assembly of F.
        m_im = al.gp(al.PAULI_I, m)
        # Q[mu] = <g^mu m>_1 for the real and imaginary channels
        self._Q = [
            [al.grade_project(al.gp(al.basis_vector(mu), mm), 1) for mu in range(4)]
            for mm in (m, m_im)
        ]
        # R[ch][nu][mu] = <g^nu Q[ch][mu]>_2 ; S scalars give delta A
        self._R = [
            [[al.grade_project(al.gp(al.basis_vector(nu), q), 2) for q in qs] for nu in range(4)]
            for qs in self._Q
        ]
        self._S = [
            [[al.gp(al.basis_vector(nu), q)[al.SCALAR] for q in qs] for nu in range(4)]
            for qs in self._Q
        ]

    def pi_values(self, t, x, y, z) -> np.ndarray:
        psi = self.scalar.value(t, x, y, z)
        return psi.real[..., None] * self.m + psi.imag[..., None] * al.gp(al.PAULI_I, self.m)

    def potential_values(self, t, x, y, z) -> np.ndarray:
        out = None
        for mu in range(4):
            d = self.scalar.partial((mu,), t, x, y, z)
            term = d.real[..., None] * self._Q[0][mu] + d.imag[..., None] * self._Q[1][mu]
            out = term if out is None else out + term
        return out

    def potential_jacobian(self, t, x, y, z) -> np.ndarray:
        cols = []
        for rho in range(4):
            col = None
            for mu in range(4):
                d = self.scalar.partial((mu, rho), t, x, y, z)
                term = d.real[..., None] * self._Q[0][mu] + d.imag[..., None] * self._Q[1][mu]
                col = term if col is None else col + term
            cols.append(col)
        return np.stack(cols, axis=-2)

    def values(self, t, x, y, z) -> np.ndarray:
        out = None
        for nu in range(4):
            for mu in range(4):
                d = self.scalar.partial((nu, mu), t, x, y, z)
                term = d.real[..., None] * self._R[0][nu][mu] + d.imag[..., None] * self._R[1][nu][mu]
                out = term if out is None else out + term
        return out

    def jacobian(self, t, x, y, z) -> np.ndarray:
        cols = []
        for rho in range(4):
            col = None
            for nu in range(4):
                for mu in range(4):
                    d = self.scalar.partial((nu, mu, rho), t, x, y, z)
                    term = (d.real[..., None] * self._R[0][nu][mu]
                            + d.imag[..., None] * self._R[1][nu][mu])
                    col = term if col is None else col + term
            cols.append(col)
        return np.stack(cols, axis=-2)

    def lorenz_values(self, t, x, y, z) -> np.ndarray:
        """delta A = -<d/ A>_0, evaluated from second partials (complex)."""
        out = 0.0
        for nu in range(4):
            for mu in range(4):
                d = self.scalar.partial((nu, mu), t, x, y, z)
                out = out - (d.real * self._S[0][nu][mu] + 1j * d.imag * self._S[1][nu][mu])
        return out

    def wave_values(self, t, x, y, z) -> np.ndarray:
        """Box psi = (d_t^2 - laplacian) psi; the Hertz precondition."""
        out = self.scalar.partial((0, 0), t, x, y, z)
        for i in range(1, 4):
            out = out - self.scalar.partial((i, i), t, x, y, z)
        return out


def fwm_field_F(params: FwmParams) -> HertzField:
    """Bivector focus wave mode from Pi = Phi_fwm g21."""
    return HertzField(fwm_scalar_closure(params), -al.basis(al.G12))


def localized_photon_field_F(params: LocalizedPhotonParams) -> HertzField:
    return HertzField(localized_photon_closure(params), np.asarray(params.m_blade))


# ---------------------------------------------------------------------------
# Window truncation
# ---------------------------------------------------------------------------

def window_mask(x, y, z, w: WindowParams) -> np.ndarray:
    """Indicator of the interior {rho <= b, |z| <= Delta}.

    The compact-support requirement of the front-speed bound selects the
    interior; the literal step-function orientation printed alongside it
    would keep the exterior instead.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    rho = np.sqrt(x * x + y * y)
    return (rho <= w.b) & (np.abs(z) <= w.delta)


class TruncatedField:
    """Field multiplied by the window indicator; compact support at t = 0."""

    def __init__(self, base, window: WindowParams):
        self.base = base
        self.window = window
        self.has_jacobian = False

    def values(self, t, x, y, z) -> np.ndarray:
        vals = self.base.values(t, x, y, z)
        mask = window_mask(x, y, z, self.window)
        return vals * np.broadcast_to(mask[..., None], vals.shape)


def truncate(base, window: WindowParams) -> TruncatedField:
    return TruncatedField(base, window)


def truncate_scalar(fn, window: WindowParams):
    """Window a complex scalar closure fn(t, x, y, z)."""

    def wrapped(t, x, y, z):
        vals = np.asarray(fn(t, x, y, z))
        mask = window_mask(x, y, z, window)
        return vals * np.broadcast_to(mask, vals.shape)

    return wrapped


# ---------------------------------------------------------------------------
# Catalog registry (string ids used by the CLI config)
# ---------------------------------------------------------------------------

def plane_wave_F(params: PlaneWaveParams) -> PlaneWaveField:
    return PlaneWaveField(params)


def xwave_field_F(params: XWaveParams) -> XWaveField:
    return XWaveField(params)


CATALOG = {
    "plane_wave": (PlaneWaveParams, PlaneWaveField),
    "xwave": (XWaveParams, XWaveField),
    "fwm": (FwmParams, fwm_field_F),
    "dipole": (DipoleParams, DipoleField),
    "localized_photon": (LocalizedPhotonParams, localized_photon_field_F),
}


def make_field(kind: str, **kwargs):
    """Instantiate a catalog field from its string id and raw parameters."""
    if kind not in CATALOG:
        raise KeyError(f"unknown catalog field {kind!r}; have {sorted(CATALOG)}")
    params_cls, factory = CATALOG[kind]
    return factory(params_cls(**kwargs))
