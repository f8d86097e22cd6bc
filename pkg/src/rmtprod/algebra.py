r"""Dense matrix algebra over the reals, complexes and quaternions.

All three fields share one storage format: a complex ``ndarray``.  Real
matrices carry zero imaginary parts.  A quaternion matrix :math:`A + Bj`
with complex :math:`n\times m` blocks ``A`` and ``B`` is stored in the
``2n x 2m`` Pauli representation

.. math::

    \begin{pmatrix} A & B \\ -B^* & A^* \end{pmatrix},

which is characterised by :math:`M^* = (\tau_2\otimes 1) M (\tau_2\otimes 1)`.

Functions ending in ``_batch`` (and the array helpers without a
:class:`FieldMatrix` in their signature) act on stacks of matrices along the
leading axes; they are what the samplers and estimators use internally.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .errors import NotHermitian, PairingFailure, SpecValidationError

FIELDS = {1: "real", 2: "complex", 4: "quaternion"}
BETAS = {v: k for k, v in FIELDS.items()}

STRUCTURE_TOL = 1e-12
KRAMERS_TOL = 1e-8
HERMITIAN_TOL = 1e-10

TAU2 = np.array([[0.0, -1.0j], [1.0j, 0.0]])


@dataclass(frozen=True)
class DysonIndex:
    """Dyson index together with the bookkeeping constants derived from it.

    ``gamma`` doubles the matrix dimension for quaternions, ``gamma_tilde``
    doubles the number of masses for real matrices and ``beta_tilde = 4/beta``
    labels the dual circular ensemble.
    """

    beta: int

    def __post_init__(self):
        if self.beta not in FIELDS:
            raise SpecValidationError(f"beta must be one of 1, 2, 4; got {self.beta!r}")

    @property
    def gamma(self) -> int:
        return 2 if self.beta == 4 else 1

    @property
    def gamma_tilde(self) -> int:
        return 2 if self.beta == 1 else 1

    @property
    def beta_tilde(self) -> Fraction:
        return Fraction(4, self.beta)

    @property
    def field(self) -> str:
        return FIELDS[self.beta]


def as_dyson(beta) -> DysonIndex:
    if isinstance(beta, DysonIndex):
        return beta
    return DysonIndex(int(beta))


# ---------------------------------------------------------------------------
# structure helpers on raw arrays


def quaternion_embed(a, b) -> np.ndarray:
    """Pauli representation of the quaternion matrix ``a + b j``.

    ``a`` and ``b`` are complex arrays of identical shape ``(..., n, m)``;
    the result has shape ``(..., 2n, 2m)``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("quaternion blocks must have equal shapes")
    top = np.concatenate([a, b], axis=-1)
    bottom = np.concatenate([-b.conj(), a.conj()], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def quaternion_blocks(data):
    """Inverse of :func:`quaternion_embed`: return the ``(A, B)`` blocks."""
    r, c = data.shape[-2] // 2, data.shape[-1] // 2
    return data[..., :r, :c], data[..., :r, c:]


def _tau2_kron(k):
    return np.kron(TAU2, np.eye(k))


def quaternion_defect(data) -> np.ndarray:
    """Relative violation of the quaternion self-conjugacy, per matrix."""
    data = np.asarray(data)
    rows, cols = data.shape[-2], data.shape[-1]
    if rows % 2 or cols % 2:
        return np.full(data.shape[:-2], np.inf)
    left = _tau2_kron(rows // 2)
    right = _tau2_kron(cols // 2)
    diff = np.abs(data.conj() - left @ data @ right).max(axis=(-2, -1))
    scale = np.abs(data).max(axis=(-2, -1))
    return diff / np.where(scale > 0, scale, 1.0)


def project_quaternion(data) -> np.ndarray:
    """Nearest structured matrix: average of ``M`` and its self-conjugate image."""
    rows, cols = data.shape[-2], data.shape[-1]
    left = _tau2_kron(rows // 2)
    right = _tau2_kron(cols // 2)
    return 0.5 * (data + (left @ data @ right).conj())


def interleave_permutation(k: int) -> np.ndarray:
    """Block-layout index ``s*k + i`` listed in interleaved order ``2i + s``."""
    return np.arange(2 * k).reshape(2, k).T.ravel()


def block_permutation(k: int) -> np.ndarray:
    """Interleaved index ``2i + s`` listed in block-layout order ``s*k + i``."""
    return np.arange(2 * k).reshape(k, 2).T.ravel()


def gaussian_field(beta, rows: int, cols: int, rng: np.random.Generator,
                   scale: float = 1.0, size=None) -> np.ndarray:
    """Gaussian matrices with density proportional to ``exp(-tr W W^† / scale^2)``.

    The trace runs over the ``gamma``-embedded matrix, so each real component
    has variance ``scale**2 / (2*gamma)``.  Returns an array of shape
    ``size + (gamma*rows, gamma*cols)``; real for ``beta=1``, complex otherwise.
    """
    d = as_dyson(beta)
    shape = (() if size is None else tuple(np.atleast_1d(size))) + (rows, cols)
    sigma = scale / np.sqrt(2.0 * d.gamma)
    if d.beta == 1:
        return sigma * rng.standard_normal(shape)
    if d.beta == 2:
        return sigma * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    a = sigma * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    b = sigma * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return quaternion_embed(a, b)


def gram_batch(data) -> np.ndarray:
    return data @ np.swapaxes(data, -1, -2).conj()


def hermitian_defect(data) -> np.ndarray:
    diff = np.abs(data - np.swapaxes(data, -1, -2).conj()).max(axis=(-2, -1))
    scale = np.abs(data).max(axis=(-2, -1))
    return diff / np.where(scale > 0, scale, 1.0)


def pair_values(values, tol: float = KRAMERS_TOL) -> np.ndarray:
    """Collapse ascending Kramers-degenerate spectra ``(..., 2n) -> (..., n)``.

    A pair ``(a, b)`` is accepted when ``|a - b| <= tol * max(|a|, |b|)``
    plus a roundoff floor of ``64 eps`` times the largest eigenvalue of the
    same spectrum (tiny eigenvalues of a Gram matrix are only known to
    absolute, not relative, precision).
    """
    values = np.asarray(values, dtype=float)
    if values.shape[-1] % 2:
        raise PairingFailure(f"odd spectrum length {values.shape[-1]} cannot be Kramers paired")
    lo, hi = values[..., 0::2], values[..., 1::2]
    scale = np.abs(values).max(axis=-1, keepdims=True)
    bound = tol * np.maximum(np.abs(lo), np.abs(hi)) + 64 * np.finfo(float).eps * scale
    gap = np.abs(hi - lo)
    if np.any(~(gap <= bound)):
        worst = float(np.max(gap / np.where(bound > 0, bound, 1.0)))
        raise PairingFailure(f"spectrum is not Kramers degenerate (worst gap {worst:.3g} x tolerance)")
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# FieldMatrix API


@dataclass(frozen=True, eq=False)
class FieldMatrix:
    """A matrix over one of the three number fields in complex storage.

    ``rows`` and ``cols`` are the logical (quaternion-valued for ``beta=4``)
    dimensions; ``data`` has shape ``(gamma*rows, gamma*cols)``.
    """

    field: str
    data: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        if self.field not in BETAS:
            raise SpecValidationError(f"unknown field {self.field!r}")
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2:
            raise ValueError("FieldMatrix data must be two dimensional")
        g = self.dyson.gamma
        if data.shape[0] % g or data.shape[1] % g:
            raise ValueError("quaternion storage needs even dimensions")
        object.__setattr__(self, "data", data)

    @classmethod
    def from_beta(cls, beta, data) -> "FieldMatrix":
        return cls(FIELDS[as_dyson(beta).beta], data)

    @classmethod
    def from_quaternion(cls, a, b) -> "FieldMatrix":
        return cls("quaternion", quaternion_embed(np.atleast_2d(a), np.atleast_2d(b)))

    @property
    def beta(self) -> int:
        return BETAS[self.field]

    @property
    def dyson(self) -> DysonIndex:
        return DysonIndex(self.beta)

    @property
    def rows(self) -> int:
        return self.data.shape[0] // self.dyson.gamma

    @property
    def cols(self) -> int:
        return self.data.shape[1] // self.dyson.gamma

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        if other.field != self.field:
            raise ValueError("cannot multiply matrices over different fields")
        return FieldMatrix(self.field, self.data @ other.data)


@dataclass(frozen=True, eq=False)
class SpectrumWithMultiplicity:
    values: np.ndarray
    kramers_collapsed: bool = False

    def __len__(self):
        return len(self.values)


def validate_symmetry(W: FieldMatrix, tol: float = STRUCTURE_TOL) -> bool:
    """Check the field-specific structural invariant of ``W``.

    Real matrices must have exactly vanishing imaginary parts, quaternion
    matrices must satisfy the self-conjugacy relation to relative ``tol``.
    Complex matrices carry no extra constraint.
    """
    if W.field == "real":
        return bool(np.all(W.data.imag == 0))
    if W.field == "quaternion":
        return bool(quaternion_defect(W.data) <= tol)
    return True


def gram(W: FieldMatrix) -> FieldMatrix:
    """Return ``W W^†`` over the same field."""
    H = gram_batch(W.data)
    H = 0.5 * (H + H.conj().T)
    return FieldMatrix(W.field, H)


def eigenvalues_hermitian(H, tol: float = HERMITIAN_TOL) -> SpectrumWithMultiplicity:
    """Ascending eigenvalues of the full complex representation of ``H``.

    Raises :class:`NotHermitian` when ``H`` deviates from its adjoint by more
    than ``tol`` relative to its largest entry.
    """
    data = H.data if isinstance(H, FieldMatrix) else np.asarray(H, dtype=complex)
    if data.ndim != 2 or data.shape[0] != data.shape[1]:
        raise NotHermitian("matrix is not square")
    if hermitian_defect(data) > tol:
        raise NotHermitian(f"relative Hermiticity defect {float(hermitian_defect(data)):.3g} exceeds {tol}")
    return SpectrumWithMultiplicity(np.linalg.eigvalsh(data), kramers_collapsed=False)


def collapse_kramers(s: SpectrumWithMultiplicity, tol: float = KRAMERS_TOL) -> SpectrumWithMultiplicity:
    """Keep one representative of each Kramers pair (the quaternion spectrum)."""
    if s.kramers_collapsed:
        return s
    return SpectrumWithMultiplicity(pair_values(np.sort(s.values), tol), kramers_collapsed=True)


# ---------------------------------------------------------------------------
# Haar measure on O(N), U(N), USp(2N)


def haar_columns(beta, N: int, p: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """First ``p`` (quaternion) columns of Haar matrices from ``U^(beta)(N)``.

    Uses the QR decomposition of a Gaussian ``N x p`` matrix with the phases
    of ``diag(R)`` moved into ``Q``.  For quaternions the factorisation is done
    in the interleaved layout, where complex Gram-Schmidt keeps each
    quaternion column pair intact, and permuted back to block layout.
    """
    d = as_dyson(beta)
    if N < 1 or not 1 <= p <= N:
        raise SpecValidationError(f"need 1 <= p <= N, got N={N}, p={p}")
    z = gaussian_field(d, N, p, rng, size=size)
    if d.beta == 4:
        z = z[..., interleave_permutation(N), :][..., :, interleave_permutation(p)]
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (diag / np.abs(diag))[..., None, :]
    if d.beta == 4:
        q = q[..., block_permutation(N), :][..., :, block_permutation(p)]
    return q


def haar_batch(beta, N: int, rng: np.random.Generator, size=None) -> np.ndarray:
    return haar_columns(beta, N, N, rng, size=size)


def haar_sample(beta, N: int, rng: np.random.Generator) -> FieldMatrix:
    """One Haar-distributed element of O(N), U(N) or USp(2N)."""
    return FieldMatrix.from_beta(beta, haar_batch(beta, N, rng))


def polar_square(data, beta, rng: np.random.Generator) -> np.ndarray:
    """Square matrices ``(W W^†)^{1/2} V`` with ``V`` Haar, one per input.

    Maps an ``n x (n+nu)`` sample to an ``n x n`` matrix whose Gram matrix is
    identical and whose distribution is bi-invariant, i.e. the induced
    square-matrix measure of a rectangular ensemble.
    """
    d = as_dyson(beta)
    data = np.asarray(data)
    rows = data.shape[-2] // d.gamma
    lam, vec = np.linalg.eigh(gram_batch(data))
    root = (vec * np.sqrt(np.clip(lam, 0.0, None))[..., None, :]) @ np.swapaxes(vec, -1, -2).conj()
    if d.beta == 4:
        root = project_quaternion(root)
    elif d.beta == 1:
        root = root.real
    return root @ haar_batch(d, rows, rng, size=data.shape[:-2] or None)
