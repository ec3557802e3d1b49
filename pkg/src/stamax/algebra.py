"""
Exact arithmetic for the spacetime algebra Cl(1,3).

Basis blades are indexed by a 4-bit mask b in {0..15}: bit mu set means the
ordered factor g^mu is present, factors in ascending index order. Mask 0 is
the scalar, mask 0b1111 is the volume element g5 = g0 g1 g2 g3. The metric is
diag(+1, -1, -1, -1).

Products are computed from a precomputed 16x16 Cayley table (sign from swap
counting, metric contraction on shared factors). Everything here operates on
plain float64 coefficient arrays of shape (..., 16), so grids of multivectors
vectorize for free; the Multivector class is a thin immutable wrapper for
single elements.

Conventions that matter downstream:
  * the Pauli basis is s_i = g_i g_0 (masks 3, 5, 9 with +1 coefficients);
  * the Pauli pseudoscalar is ii = s1 s2 s3 = -g5, so the electromagnetic
    bivector splits as F = E^i s_i + ii B^j s_j (matches the component
    matrix F^{mu nu} of the usual tensor formulation);
  * duality rotations use exp(g5 s) = cos s + g5 sin s.
"""

from __future__ import annotations

import re

import numpy as np

N_BLADES = 16
METRIC = np.array([1.0, -1.0, -1.0, -1.0])

# Blade masks for readable code elsewhere.
SCALAR = 0
G0, G1, G2, G3 = 1, 2, 4, 8
G01, G02, G03, G12, G13, G23 = 3, 5, 9, 6, 10, 12
G012, G013, G023, G123 = 7, 11, 13, 14
G5 = 15

GRADES = np.array([bin(b).count("1") for b in range(N_BLADES)])
GRADE_MASKS = [GRADES == k for k in range(5)]

BLADE_NAMES = [
    "1" if b == 0 else "g" + "".join(str(mu) for mu in range(4) if b >> mu & 1)
    for b in range(N_BLADES)
]
_NAME_TO_MASK = {name: b for b, name in enumerate(BLADE_NAMES)}

# Pauli blades: s_i = g_i g_0 = +g0 g^i; ii = s1 s2 s3 = -g5.
SIGMA_MASKS = (G01, G02, G03)


def _reorder_sign(a: int, b: int) -> int:
    """Sign from counting transpositions that merge blade a into blade b."""
    a >>= 1
    total = 0
    while a:
        total += bin(a & b).count("1")
        a >>= 1
    return -1 if total & 1 else 1


def _blade_product(a: int, b: int) -> tuple[int, float]:
    sign = float(_reorder_sign(a, b))
    for mu in range(4):
        if a >> mu & 1 and b >> mu & 1:
            sign *= METRIC[mu]
    return a ^ b, sign


def _build_tables():
    idx = np.zeros((N_BLADES, N_BLADES), dtype=np.intp)
    sign = np.zeros((N_BLADES, N_BLADES))
    for a in range(N_BLADES):
        for b in range(N_BLADES):
            k, s = _blade_product(a, b)
            idx[a, b] = k
            sign[a, b] = s
    return idx, sign


CAYLEY_IDX, CAYLEY_SIGN = _build_tables()

# Flat nonzero-pair lists for the vectorized product loop.
_PAIRS_I, _PAIRS_J = np.meshgrid(np.arange(N_BLADES), np.arange(N_BLADES), indexing="ij")
_PAIRS_I = _PAIRS_I.ravel()
_PAIRS_J = _PAIRS_J.ravel()
_PAIRS_K = CAYLEY_IDX[_PAIRS_I, _PAIRS_J]
_PAIRS_S = CAYLEY_SIGN[_PAIRS_I, _PAIRS_J]

REVERSE_SIGNS = np.array([(-1.0) ** (k * (k - 1) // 2) for k in GRADES])
INVOLUTE_SIGNS = np.array([(-1.0) ** k for k in GRADES])


def gp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Geometric product on coefficient arrays of shape (..., 16)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out_shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(out_shape)
    for i, j, k, s in zip(_PAIRS_I, _PAIRS_J, _PAIRS_K, _PAIRS_S):
        out[..., k] += s * a[..., i] * b[..., j]
    return out


def left_matrix(m: np.ndarray) -> np.ndarray:
    """16x16 matrix L with (m x)_k = sum_i L[k, i] x_i, for constant m."""
    m = np.asarray(m, dtype=float)
    L = np.zeros((N_BLADES, N_BLADES))
    for i, j, k, s in zip(_PAIRS_I, _PAIRS_J, _PAIRS_K, _PAIRS_S):
        L[k, j] += s * m[i]
    return L


def right_matrix(m: np.ndarray) -> np.ndarray:
    """16x16 matrix R with (x m)_k = sum_i R[k, i] x_i, for constant m."""
    m = np.asarray(m, dtype=float)
    R = np.zeros((N_BLADES, N_BLADES))
    for i, j, k, s in zip(_PAIRS_I, _PAIRS_J, _PAIRS_K, _PAIRS_S):
        R[k, i] += s * m[j]
    return R


def grade_project(a: np.ndarray, k: int) -> np.ndarray:
    if not 0 <= k <= 4:
        raise ValueError(f"grade must be in 0..4, got {k}")
    out = np.zeros_like(np.asarray(a, dtype=float))
    out[..., GRADE_MASKS[k]] = np.asarray(a, dtype=float)[..., GRADE_MASKS[k]]
    return out


def grades_present(a: np.ndarray, tol: float = 0.0) -> list[int]:
    a = np.asarray(a, dtype=float)
    out = []
    for k in range(5):
        comp = a[..., GRADE_MASKS[k]]
        if np.max(np.abs(comp)) > tol:
            out.append(k)
    return out


def reverse(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=float) * REVERSE_SIGNS


def involute(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=float) * INVOLUTE_SIGNS


def _graded_product(a, b, select):
    """Product keeping blade pairs (i, j) passing select(grade_i, grade_j, grade_k)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out_shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(out_shape)
    for i, j, k, s in zip(_PAIRS_I, _PAIRS_J, _PAIRS_K, _PAIRS_S):
        if select(GRADES[i], GRADES[j], GRADES[k]):
            out[..., k] += s * a[..., i] * b[..., j]
    return out


def left_contract(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a .| b : grade (s - r) part of the blade products."""
    return _graded_product(a, b, lambda r, s, k: k == s - r)


def right_contract(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _graded_product(a, b, lambda r, s, k: k == r - s)


def wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _graded_product(a, b, lambda r, s, k: k == r + s)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """K x L = (KL - LK)/2."""
    return 0.5 * (gp(a, b) - gp(b, a))


def scalar_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """<a b>_0, the Minkowski-contracted scalar of the geometric product."""
    return gp(a, b)[..., 0]


def norm(a: np.ndarray) -> np.ndarray:
    """Euclidean norm of the 16 coefficients (positive-definite, for residuals)."""
    return np.sqrt(np.sum(np.square(np.asarray(a, dtype=float)), axis=-1))


def basis(mask: int) -> np.ndarray:
    e = np.zeros(N_BLADES)
    e[mask] = 1.0
    return e


def basis_vector(mu: int) -> np.ndarray:
    return basis(1 << mu)


GAMMA = [basis_vector(mu) for mu in range(4)]
GAMMA5 = basis(G5)
PAULI_I = -GAMMA5  # ii = s1 s2 s3
SIGMA = [basis(m) for m in SIGMA_MASKS]


def duality_exp(s) -> np.ndarray:
    """exp(g5 s) = cos s + g5 sin s; one-parameter duality-rotation group."""
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape + (N_BLADES,))
    out[..., SCALAR] = np.cos(s)
    out[..., G5] = np.sin(s)
    return out


def vector(components) -> np.ndarray:
    """1-form c_mu g^mu from its 4 lower-index components."""
    c = np.asarray(components, dtype=float)
    out = np.zeros(c.shape[:-1] + (N_BLADES,))
    for mu in range(4):
        out[..., 1 << mu] = c[..., mu]
    return out


def vector_components(a: np.ndarray) -> np.ndarray:
    """Lower-index components c_mu of the grade-1 part."""
    a = np.asarray(a, dtype=float)
    return np.stack([a[..., 1 << mu] for mu in range(4)], axis=-1)


def raise_index(c_lower: np.ndarray) -> np.ndarray:
    return np.asarray(c_lower, dtype=float) * METRIC


def minkowski_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a . b for grade-1 arguments, eta^{mu nu} a_mu b_nu."""
    ca = vector_components(a)
    cb = vector_components(b)
    return np.sum(ca * cb * METRIC, axis=-1)


# ---------------------------------------------------------------------------
# Electric/magnetic split of a bivector
# ---------------------------------------------------------------------------

# F = E^i s_i + ii B^j s_j expands over the six bivector blades as
#   E: +g01, +g02, +g03     B: -g23, +g13, -g12
_B_MASKS = (G23, G13, G12)
_B_SIGNS = (-1.0, 1.0, -1.0)

BIVECTOR_MASKS = (G01, G02, G03, G12, G13, G23)


def is_grade(a: np.ndarray, k: int, tol: float = 1e-12) -> bool:
    a = np.asarray(a, dtype=float)
    rest = a.copy()
    rest[..., GRADE_MASKS[k]] = 0.0
    scale = max(float(np.max(np.abs(a))), 1.0)
    return float(np.max(np.abs(rest))) <= tol * scale


def pauli_split(F: np.ndarray, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Split a bivector into (E, B) 3-vectors, F = E^i s_i + ii B^j s_j.

    Returns arrays of shape (..., 3). Raises ValueError when the input is not
    pure grade 2.
    """
    F = np.asarray(F, dtype=float)
    if check and not is_grade(F, 2):
        raise ValueError("pauli_split expects a pure grade-2 multivector")
    E = np.stack([F[..., m] for m in SIGMA_MASKS], axis=-1)
    B = np.stack([s * F[..., m] for m, s in zip(_B_MASKS, _B_SIGNS)], axis=-1)
    return E, B


def pauli_assemble(E: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Inverse of pauli_split."""
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    out = np.zeros(np.broadcast_shapes(E.shape, B.shape)[:-1] + (N_BLADES,))
    for i, m in enumerate(SIGMA_MASKS):
        out[..., m] = E[..., i]
    for i, (m, s) in enumerate(zip(_B_MASKS, _B_SIGNS)):
        out[..., m] = s * B[..., i]
    return out


def space_conjugation(F: np.ndarray) -> np.ndarray:
    """g0 F g0, i.e. E -> -E with B fixed on bivectors."""
    F = np.asarray(F, dtype=float)
    if not is_grade(F, 2):
        raise ValueError("space_conjugation expects a pure grade-2 multivector")
    return gp(GAMMA[0], gp(F, GAMMA[0]))


def complex_lift(z) -> np.ndarray:
    """Lift a complex scalar to Re(z) + g5 Im(z) (shape (..., 16))."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + (N_BLADES,))
    out[..., SCALAR] = z.real
    out[..., G5] = z.imag
    return out


# ---------------------------------------------------------------------------
# Value type and textual round-trip format
# ---------------------------------------------------------------------------

class Multivector:
    """Immutable Cl(1,3) element; coefficients indexed by blade mask."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.shape != (N_BLADES,):
            raise ValueError(f"expected 16 coefficients, got shape {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    @classmethod
    def scalar(cls, x: float) -> "Multivector":
        c = np.zeros(N_BLADES)
        c[SCALAR] = x
        return cls(c)

    @classmethod
    def basis(cls, mask: int) -> "Multivector":
        return cls(basis(mask))

    @classmethod
    def from_blades(cls, blades: dict[str, float]) -> "Multivector":
        c = np.zeros(N_BLADES)
        for name, value in blades.items():
            c[_NAME_TO_MASK[name]] += value
        return cls(c)

    def __add__(self, other):
        return Multivector(self.coeffs + _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Multivector(self.coeffs - _coerce(other))

    def __rsub__(self, other):
        return Multivector(_coerce(other) - self.coeffs)

    def __mul__(self, other):
        if np.isscalar(other):
            return Multivector(self.coeffs * float(other))
        return Multivector(gp(self.coeffs, _coerce(other)))

    def __rmul__(self, other):
        if np.isscalar(other):
            return Multivector(self.coeffs * float(other))
        return Multivector(gp(_coerce(other), self.coeffs))

    def __neg__(self):
        return Multivector(-self.coeffs)

    def __truediv__(self, scalar):
        return Multivector(self.coeffs / float(scalar))

    def grade(self, k: int) -> "Multivector":
        return Multivector(grade_project(self.coeffs, k))

    def reverse(self) -> "Multivector":
        return Multivector(reverse(self.coeffs))

    def left_contract(self, other) -> "Multivector":
        return Multivector(left_contract(self.coeffs, _coerce(other)))

    def right_contract(self, other) -> "Multivector":
        return Multivector(right_contract(self.coeffs, _coerce(other)))

    def wedge(self, other) -> "Multivector":
        return Multivector(wedge(self.coeffs, _coerce(other)))

    def scalar_part(self) -> float:
        return float(self.coeffs[SCALAR])

    def pseudoscalar_part(self) -> float:
        return float(self.coeffs[G5])

    def norm(self) -> float:
        return float(norm(self.coeffs))

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def approx_eq(self, other, tol: float = 1e-12) -> bool:
        return float(norm(self.coeffs - _coerce(other))) <= tol

    def __repr__(self):
        return f"Multivector({format_multivector(self.coeffs)!r})"


def _coerce(x) -> np.ndarray:
    if isinstance(x, Multivector):
        return x.coeffs
    if np.isscalar(x):
        c = np.zeros(N_BLADES)
        c[SCALAR] = float(x)
        return c
    return np.asarray(x, dtype=float)


def format_multivector(a, zero_tol: float = 0.0) -> str:
    """Textual form "c*blade +/- ...", blades named 1, g0..g3, g01.., g0123."""
    a = _coerce(a)
    parts = []
    for b in range(N_BLADES):
        c = a[b]
        if c == 0.0 or abs(c) <= zero_tol:
            continue
        mag = repr(float(abs(c)))
        term = mag if b == SCALAR else f"{mag}*{BLADE_NAMES[b]}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    if not parts:
        return "0"
    return " ".join(parts)


_TERM_RE = re.compile(r"^(?P<num>[^*]+?)(?:\*(?P<blade>1|g[0-9]+))?$")


def parse_multivector(text: str) -> np.ndarray:
    """Inverse of format_multivector; also accepts bare blade names."""
    s = text.strip()
    if s == "0" or not s:
        return np.zeros(N_BLADES)
    s = s.replace("- ", "-").replace("+ ", "+")
    tokens = s.split()
    out = np.zeros(N_BLADES)
    for tok in tokens:
        sign = 1.0
        body = tok
        if body.startswith("+"):
            body = body[1:]
        elif body.startswith("-"):
            sign = -1.0
            body = body[1:]
        if body in _NAME_TO_MASK:
            out[_NAME_TO_MASK[body]] += sign
            continue
        m = _TERM_RE.match(body)
        if m is None:
            raise ValueError(f"cannot parse multivector term {tok!r}")
        num = float(m.group("num"))
        blade = m.group("blade")
        mask = SCALAR if blade in (None, "1") else _NAME_TO_MASK[blade]
        out[mask] += sign * num
    return out


def to_row(a) -> list[float]:
    """16-column numeric row form for bulk export."""
    return [float(v) for v in _coerce(a)]


def from_row(row) -> np.ndarray:
    c = np.asarray(row, dtype=float)
    if c.shape != (N_BLADES,):
        raise ValueError("expected a 16-column row")
    return c
