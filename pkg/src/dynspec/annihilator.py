"""The annihilating-polynomial engine.

Given the restricted power sequence seq[l] = (restriction of B^l x), the
smallest monic polynomial annihilating the sequence is found by an
ascending degree search: degree r is accepted as soon as the stacked
block system

    seq[k + r] + sum_{l < r} alpha_l seq[k + l] = 0,   k = 0..rows-1

is consistent, which guarantees minimality. Each block contributes one
row per restricted coordinate, so the scalar form is a plain Hankel
system. Extending the number of row blocks beyond the degree does not
change the solution set, which is why one solver serves both the generic
engine (rows = r_max) and the aliased per-class systems (rows = m).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import config
from .errors import DimensionError, NoAnnihilator
from .model import (EvolutionOperator, as_diagonalizable, group_eigenvalues,
                    observable_spectrum_oracle, require_well_conditioned)
from .numerics import MonicPolynomial, as_vector, least_squares


@dataclass(frozen=True)
class AnnihilatorPolynomial:
    """A computed annihilator with its consistency diagnostics."""

    poly: MonicPolynomial
    relative_residual: float
    rows_used: int

    @property
    def degree(self) -> int:
        return self.poly.degree


def _zero_threshold(zero_scale: float) -> float:
    return max(config.ZERO_FLOOR, config.ZERO_REL * zero_scale)


def hankel_system(c, degree: int, rows: int):
    """The scalar-form system for one candidate degree.

    Returns (M, rhs) with M[k, l] = c[k + l] (a rows x degree Hankel
    block) and rhs[k] = -c[k + degree].
    """
    c = as_vector(c, "sample sequence")
    if degree < 1 or rows < 1:
        raise DimensionError("degree and rows must be positive")
    if c.size < rows + degree:
        raise DimensionError(f"need at least rows + degree = {rows + degree} terms, got {c.size}")
    M = scipy.linalg.hankel(c[:rows], c[rows - 1:rows - 1 + degree])
    return M, -c[degree:degree + rows]


def annihilator_from_samples(seq, r_max: int, rows: int | None = None,
                             tol: float = config.TAU_SOLVE,
                             zero_scale: float = 1.0) -> AnnihilatorPolynomial:
    """Smallest-degree monic annihilator of a restricted power sequence.

    ``seq`` is time-major: seq[l] is the restricted sample at time l (a
    vector, or a scalar for the scalar form). ``rows`` defaults to r_max,
    which needs 2 * r_max terms. Degree 0 (the constant polynomial 1) is
    returned only when the whole sequence is numerically zero; otherwise
    degrees 1..r_max are tried in ascending order and the first one whose
    system reaches relative residual < tol wins.

    Raises NoAnnihilator, carrying the best residual seen, when no degree
    up to r_max is consistent (r_max too small, or degenerate data).
    """
    terms = np.asarray(seq, dtype=np.complex128)
    if terms.ndim == 1:
        terms = terms[:, None]
    if terms.ndim != 2 or terms.shape[0] < 1 or terms.shape[1] < 1:
        raise DimensionError(f"sample sequence must be 1-D or 2-D time-major, got shape {terms.shape}")
    if not np.all(np.isfinite(terms)):
        raise DimensionError("sample sequence contains non-finite values")
    if r_max < 0:
        raise DimensionError(f"r_max must be nonnegative, got {r_max}")
    rows = r_max if rows is None else rows
    if rows < 1:
        raise DimensionError(f"need at least one row block, got {rows}")
    if terms.shape[0] < rows + r_max:
        raise DimensionError(
            f"need at least rows + r_max = {rows + r_max} time levels, got {terms.shape[0]}")

    if float(np.max(np.abs(terms))) < _zero_threshold(zero_scale):
        return AnnihilatorPolynomial(MonicPolynomial(np.zeros(0)), 0.0, rows)

    best = float("inf")
    for r in range(1, r_max + 1):
        M = np.column_stack([terms[l:l + rows].ravel() for l in range(r)])
        rhs = -terms[r:r + rows].ravel()
        res = least_squares(M, rhs)
        if res.relative_residual < tol:
            return AnnihilatorPolynomial(MonicPolynomial(res.solution), res.relative_residual, rows)
        best = min(best, res.relative_residual)
    raise NoAnnihilator(
        f"no annihilator of degree <= {r_max} fits the sequence (best residual {best:.3e})", best)


def scalar_annihilator(c, r_max: int, rows: int | None = None,
                       tol: float = config.TAU_SOLVE,
                       zero_scale: float = 1.0) -> AnnihilatorPolynomial:
    """Scalar form of the engine; the coefficient matrix is Hankel."""
    c = np.asarray(c, dtype=np.complex128)
    if c.ndim != 1:
        raise DimensionError(f"expected a scalar sequence, got shape {c.shape}")
    return annihilator_from_samples(c[:, None], r_max, rows=rows, tol=tol, zero_scale=zero_scale)


def minimal_polynomial_oracle(op: EvolutionOperator,
                              tau_eig: float = config.TAU_EIG) -> AnnihilatorPolynomial:
    """The operator's minimal polynomial, prod (lambda - lambda_j) over its
    distinct eigenvalues. Oracle for tests and verification: it reads the
    operator's factorization, not samples."""
    diag = as_diagonalizable(op)
    require_well_conditioned(diag.U)
    values, _ = group_eigenvalues(diag.eigs, tau_eig)
    return AnnihilatorPolynomial(MonicPolynomial.from_roots(values), 0.0, 0)


def altered_minimal_polynomial_oracle(op: EvolutionOperator, omega,
                                      tau_eig: float = config.TAU_EIG,
                                      tau_obs: float = config.TAU_OBS) -> AnnihilatorPolynomial:
    """The smallest monic polynomial whose action is invisible through the
    sampled coordinates: prod (lambda - lambda_j) over the omega-observable
    eigenvalues. Oracle counterpart of the sample-side engine."""
    roots = observable_spectrum_oracle(op, omega, tau_eig=tau_eig, tau_obs=tau_obs)
    return AnnihilatorPolynomial(MonicPolynomial.from_roots(roots), 0.0, 0)
