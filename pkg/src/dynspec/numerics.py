"""Dense complex linear-algebra kernels.

Everything here is a pure function of its inputs: the DFT in both
directions, rank-revealing least squares, and monic-polynomial arithmetic
(division, root finding, construction from roots). Vectors and matrices
are plain complex ndarrays; the two ``as_*`` helpers validate shape and
finiteness at the boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import DimensionError

_RESIDUAL_FLOOR = float(np.finfo(np.float64).tiny)


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Coerce to a finite, nonempty 1-D complex array."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"{name}: expected a nonempty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name}: entries must be finite")
    return arr


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite, nonempty 2-D complex array."""
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionError(f"{name}: expected a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name}: entries must be finite")
    return arr


@lru_cache(maxsize=32)
def _dft_kernel(d: int, inverse: bool) -> np.ndarray:
    k = np.arange(d)
    sign = 2j if inverse else -2j
    return np.exp(sign * np.pi * np.outer(k, k) / d)


def dft(v, inverse: bool = False, fast: bool = False) -> np.ndarray:
    """Discrete Fourier transform with kernel exp(-2*pi*i*k*l/d).

    The forward transform is unnormalized; the inverse carries the 1/d
    factor, so ``dft(dft(v), inverse=True)`` returns ``v`` to machine
    precision. Any length is supported, not only powers of two. The
    default path multiplies by the kernel matrix (O(d^2)); ``fast=True``
    routes through numpy's FFT, which agrees with the direct path to
    ~1e-12 but not bit for bit.
    """
    arr = as_vector(v, "dft input")
    if fast:
        return np.fft.ifft(arr) if inverse else np.fft.fft(arr)
    out = _dft_kernel(arr.size, inverse) @ arr
    return out / arr.size if inverse else out


@dataclass(frozen=True)
class LstSqResult:
    """Minimum-norm least-squares solution with residual diagnostics.

    ``relative_residual`` is measured against the right-hand-side norm with
    a tiny floor, so an exactly reproduced (or all-zero) rhs gives 0.
    """

    solution: np.ndarray
    residual_norm: float
    relative_residual: float
    rank: int


def least_squares(M, rhs) -> LstSqResult:
    """Minimum-norm least squares via a column-pivoted orthogonal
    factorization (LAPACK gelsy), never normal equations.

    Deterministic for identical inputs. The stacked systems this solves
    can be ill-conditioned Hankel blocks, hence the rank-revealing driver.
    """
    A = as_matrix(M, "coefficient matrix")
    b = as_vector(rhs, "right-hand side")
    if A.shape[0] != b.size:
        raise DimensionError(f"matrix has {A.shape[0]} rows but rhs has {b.size} entries")
    sol, _, rank, _ = scipy.linalg.lstsq(A, b, lapack_driver="gelsy")
    residual = float(np.linalg.norm(A @ sol - b))
    rel = residual / max(float(np.linalg.norm(b)), _RESIDUAL_FLOOR)
    return LstSqResult(solution=sol, residual_norm=residual, relative_residual=rel, rank=int(rank))


@dataclass(frozen=True)
class MonicPolynomial:
    """Monic polynomial stored by its low-order coefficients.

    ``low_coeffs[l]`` multiplies lambda^l; the leading coefficient is an
    implicit 1, so degree 0 is the constant polynomial 1.
    """

    low_coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.low_coeffs, dtype=np.complex128).ravel()
        if not np.all(np.isfinite(arr)):
            raise DimensionError("polynomial coefficients must be finite")
        object.__setattr__(self, "low_coeffs", arr)

    @property
    def degree(self) -> int:
        return self.low_coeffs.size

    def coeffs_desc(self) -> np.ndarray:
        """Coefficients from the leading 1 down to the constant term."""
        return np.concatenate(([1.0 + 0j], self.low_coeffs[::-1]))

    def __call__(self, z):
        return np.polyval(self.coeffs_desc(), z)

    @classmethod
    def from_roots(cls, roots) -> "MonicPolynomial":
        coeffs = np.atleast_1d(np.poly(np.asarray(roots, dtype=np.complex128)))
        return cls(coeffs[1:][::-1])


def poly_roots(p: MonicPolynomial) -> np.ndarray:
    """All ``degree`` roots, with multiplicity, via the balanced
    companion-matrix eigensolve."""
    if p.degree == 0:
        return np.zeros(0, dtype=np.complex128)
    return np.roots(p.coeffs_desc())


def poly_divide(p: MonicPolynomial, q: MonicPolynomial):
    """Long division p = quotient * q + remainder.

    Returns the quotient and the Euclidean norm of the remainder's
    coefficients. The quotient is monic whenever it is nonzero; when
    p.degree < q.degree it is None (the zero polynomial).
    """
    if q.degree == 0:
        return p, 0.0
    if p.degree < q.degree:
        return None, float(np.linalg.norm(p.coeffs_desc()))
    quot, rem = np.polydiv(p.coeffs_desc(), q.coeffs_desc())
    quot = np.atleast_1d(quot)
    return MonicPolynomial(quot[1:][::-1]), float(np.linalg.norm(np.atleast_1d(rem)))


def set_match_error(got, expected) -> float:
    """Symmetric worst-case nearest-neighbor distance between two point
    sets in the complex plane (inf when exactly one side is empty)."""
    a = np.asarray(got, dtype=np.complex128).ravel()
    b = np.asarray(expected, dtype=np.complex128).ravel()
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return float("inf")
    dist = np.abs(a[:, None] - b[None, :])
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))
