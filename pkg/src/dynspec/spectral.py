"""Spectrum recovery for diagonalizable operators from sampled coordinates.

Each sampled coordinate i yields a scalar time series whose annihilator
roots are exactly the eigenvalues observable at i; the observable spectrum
of a sampling set is the deduplicated union over its coordinates. When
samples are scarce, a window recurrence fitted to the first (|omega|+1)*L
levels extrapolates the series to any horizon first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import config
from .annihilator import scalar_annihilator
from .errors import (DimensionError, InsufficientDataError, NoAnnihilator,
                     SpanConditionViolated)
from .model import SampleSet
from .numerics import least_squares, poly_roots


@dataclass(frozen=True, eq=False)
class SpectrumEstimate:
    """Recovered eigenvalues, per source and merged.

    ``per_source`` maps a source id (a sampled coordinate, or a residue
    class id for the aliased pipeline) to its recovered root list; every
    merged value is one of those roots, and merged values are pairwise
    separated by more than ``dedup_tol``. ``residuals`` holds the
    per-source annihilator residuals, ``failures`` the per-source error
    messages for sources that produced no annihilator.
    """

    per_source: dict
    merged: np.ndarray
    dedup_tol: float
    residuals: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)


def merge_roots(root_lists, dedup_rel: float = config.DEDUP_REL,
                dedup_tol: float | None = None):
    """Deduplicate roots across sources.

    Greedy in a deterministic order; survivors are actual roots, and any
    two survivors are separated by more than the tolerance (``dedup_rel``
    times the largest modulus unless an absolute ``dedup_tol`` is given).
    Returns (merged, tolerance_used).
    """
    chunks = [np.asarray(r, dtype=np.complex128).ravel() for r in root_lists]
    roots = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.complex128)
    if dedup_tol is None:
        scale = float(np.max(np.abs(roots))) if roots.size else 0.0
        dedup_tol = dedup_rel * (scale if scale > 0 else 1.0)
    if roots.size == 0:
        return roots, dedup_tol
    order = np.lexsort((roots.imag, roots.real))
    reps: list[complex] = []
    for z in roots[order]:
        if all(abs(z - rep) > dedup_tol for rep in reps):
            reps.append(complex(z))
    return np.array(reps, dtype=np.complex128), dedup_tol


def recover_spectrum_at_index(c, r_max: int, tol: float = config.TAU_SOLVE) -> np.ndarray:
    """Eigenvalues observable at one coordinate, from its scalar series
    (2 * r_max terms)."""
    ann = scalar_annihilator(c, r_max, tol=tol)
    return poly_roots(ann.poly)


def _r_max_map(r_max, omega, d: int) -> dict:
    if r_max is None:
        return {int(i): d for i in omega}
    if isinstance(r_max, Mapping):
        return {int(i): int(r_max[i]) for i in omega}
    return {int(i): int(r_max) for i in omega}


def recover_observable_spectrum(samples: SampleSet, r_max=None,
                                dedup_rel: float = config.DEDUP_REL,
                                tol: float = config.TAU_SOLVE) -> SpectrumEstimate:
    """Observable spectrum of the sampling set: per-coordinate roots,
    merged with dedup.

    ``r_max`` bounds the per-coordinate degree search: an int, a mapping
    coordinate -> bound, or None for the safe upper bound d (which needs
    2d time levels). Per-coordinate failures are recorded; the call fails
    only when every coordinate fails.
    """
    omega = samples.omega
    bounds = _r_max_map(r_max, omega, samples.d)
    per_source: dict = {}
    residuals: dict = {}
    failures: dict = {}
    worst = 0.0
    for pos, i in enumerate(int(v) for v in omega):
        need = 2 * bounds[i]
        if samples.L_total < need:
            raise InsufficientDataError(
                f"coordinate {i} needs {need} time levels for r_max={bounds[i]}, have {samples.L_total}")
        try:
            ann = scalar_annihilator(samples.samples[:need, pos], bounds[i], tol=tol)
        except NoAnnihilator as exc:
            failures[i] = str(exc)
            worst = max(worst, exc.best_residual)
            continue
        per_source[i] = poly_roots(ann.poly)
        residuals[i] = ann.relative_residual
    if not per_source:
        raise NoAnnihilator(
            f"all {omega.size} sampled coordinates failed the degree search", worst)
    merged, tol_used = merge_roots(per_source.values(), dedup_rel)
    return SpectrumEstimate(per_source, merged, tol_used, residuals, failures)


@dataclass(frozen=True, eq=False)
class ExtrapolationModel:
    """Length-L vector recurrence over the sampled coordinates.

    The restricted sample at time k >= L is a fixed linear combination of
    the L preceding restricted samples: weights[i, l, j] multiplies the
    value at coordinate omega[j], lag L - l. The first L training levels
    are kept as the seed window.
    """

    omega: tuple[int, ...]
    L: int
    weights: np.ndarray
    seed_window: np.ndarray

    def extend(self, L_total: int) -> np.ndarray:
        """Run the recurrence forward; rows 0..L-1 are the seed verbatim."""
        n = len(self.omega)
        out = np.empty((max(L_total, self.L), n), dtype=np.complex128)
        out[:self.L] = self.seed_window
        for t in range(self.L, L_total):
            out[t] = np.einsum("ilj,lj->i", self.weights, out[t - self.L:t])
        return out[:L_total]

    def extrapolate(self, k: int) -> np.ndarray:
        """Restricted sample at time k (seed values verbatim for k < L)."""
        if k < 0:
            raise DimensionError(f"time index must be nonnegative, got {k}")
        return self.extend(k + 1)[k]


def fit_extrapolation(samples: SampleSet, L: int,
                      tol: float = config.TAU_SOLVE) -> ExtrapolationModel:
    """Fit the length-L recurrence from the first (|omega|+1)*L levels.

    For each coordinate the square system over row offsets k =
    0..|omega|*L-1 is solved (minimum-norm when degenerate); a relative
    residual at or above ``tol`` means no length-L recurrence reproduces
    that coordinate, reported as SpanConditionViolated. Retrying with a
    larger window helps; L = d always fits.
    """
    if L < 1:
        raise DimensionError(f"window length must be positive, got {L}")
    omega = samples.omega
    n = omega.size
    need = (n + 1) * L
    if samples.L_total < need:
        raise InsufficientDataError(
            f"window L={L} with {n} coordinates needs {need} time levels, have {samples.L_total}")
    S = samples.samples
    nL = n * L
    M = np.empty((nL, L * n), dtype=np.complex128)
    for l in range(L):
        M[:, l * n:(l + 1) * n] = S[l:l + nL, :]
    weights = np.empty((n, L, n), dtype=np.complex128)
    for pos in range(n):
        res = least_squares(M, S[L:L + nL, pos])
        if res.relative_residual >= tol:
            raise SpanConditionViolated(
                f"no length-{L} recurrence reproduces coordinate {omega[pos]} "
                f"(residual {res.relative_residual:.3e}); retry with a larger window")
        weights[pos] = res.solution.reshape(L, n)
    return ExtrapolationModel(tuple(int(i) for i in omega), L, weights, S[:L].copy())


def extrapolate(model: ExtrapolationModel, k: int) -> np.ndarray:
    """Restricted sample at time k from a fitted recurrence."""
    return model.extrapolate(k)


def recover_spectrum_via_extrapolation(samples: SampleSet, L: int, r_max=None,
                                       dedup_rel: float = config.DEDUP_REL,
                                       tol: float = config.TAU_SOLVE) -> SpectrumEstimate:
    """Fit the window recurrence, extrapolate each coordinate out to its
    2 * r_max budget, then recover the observable spectrum as usual."""
    model = fit_extrapolation(samples, L, tol=tol)
    bounds = _r_max_map(r_max, samples.omega, samples.d)
    horizon = max(2 * r for r in bounds.values())
    extended = SampleSet(samples.d, samples.sampler, model.extend(horizon))
    return recover_observable_spectrum(extended, r_max=bounds, dedup_rel=dedup_rel, tol=tol)
