"""Recovery pipeline for circulant operators under uniform subsampling.

Keeping every m-th coordinate aliases the frequency content: in the
Fourier domain the subsampled state collapses onto J = d/m residue
classes (frequencies congruent mod J), and within class j every time
level contributes the single scalar

    series_l(j) = (1/m) * sum_i transfer(j + i*J)^l * xhat(j + i*J).

Each class series is a sum of at most m geometric modes whose ratios are
the transfer values on that class, so a degree <= m annihilator per class
recovers them from just 2m time levels; the union over classes is the
whole spectrum. With a real, symmetric, decreasing transfer function the
sorted values can also be assigned back to frequencies, which pins down
the operator itself, and a known transfer function lets the per-class
alias systems be inverted for the driving signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .annihilator import scalar_annihilator
from .errors import (AmbiguousOrdering, DimensionError, InsufficientDataError,
                     NoAnnihilator, NotSymmetricReal, RecoveryError,
                     UnderDetermined)
from .model import Circulant, SampleSet, Uniform
from .numerics import as_vector, dft, least_squares, poly_roots
from .spectral import SpectrumEstimate, merge_roots


@dataclass(frozen=True, eq=False)
class ResidueClassData:
    """One aliased frequency class: its id j, the frequencies k with
    k = j (mod J), and the scalar series it contributes per time level."""

    j: int
    indices: np.ndarray
    series: np.ndarray


@dataclass(frozen=True, eq=False)
class FilterEstimate:
    """A recovered (or supplied) circulant filter.

    ``a_hat`` is the transfer function over frequencies 0..d-1, ``taps``
    its inverse DFT. ``ordering_mode`` records how the values were
    assigned to frequencies: "symmetric_decreasing" or "none" (positions
    known directly).
    """

    a_hat: np.ndarray
    taps: np.ndarray
    ordering_mode: str

    def __post_init__(self):
        object.__setattr__(self, "a_hat", as_vector(self.a_hat, "transfer function"))
        object.__setattr__(self, "taps", as_vector(self.taps, "filter taps"))
        if self.a_hat.size != self.taps.size:
            raise DimensionError("transfer function and taps must have the same length")

    @classmethod
    def from_taps(cls, taps) -> "FilterEstimate":
        taps = as_vector(taps, "filter taps")
        return cls(dft(taps), taps, "none")

    @classmethod
    def from_transfer(cls, a_hat) -> "FilterEstimate":
        a_hat = as_vector(a_hat, "transfer function")
        return cls(a_hat, dft(a_hat, inverse=True), "none")


def _require_uniform(samples: SampleSet) -> Uniform:
    if not isinstance(samples.sampler, Uniform):
        raise TypeError("this pipeline needs a uniform sampler")
    return samples.sampler


def fourier_classes(samples: SampleSet, min_levels: int | None = None) -> list[ResidueClassData]:
    """Split the subsampled data into its residue-class scalar series.

    Each restricted sample is embedded back to length d (zeros off the
    kept coordinates) and transformed; the result is constant on every
    class, and that common value (read off as the class average) is the
    class series entry for that time level.
    """
    sampler = _require_uniform(samples)
    d, m = samples.d, sampler.m
    J = d // m
    required = 2 * m if min_levels is None else min_levels
    if samples.L_total < required:
        raise InsufficientDataError(
            f"need at least {required} time levels, have {samples.L_total}")
    omega = samples.omega
    series = np.empty((samples.L_total, J), dtype=np.complex128)
    for ell in range(samples.L_total):
        z = np.zeros(d, dtype=np.complex128)
        z[omega] = samples.samples[ell]
        z_hat = dft(z)
        for j in range(J):
            series[ell, j] = z_hat[j::J].mean()
    return [ResidueClassData(j, np.arange(j, d, J), series[:, j].copy()) for j in range(J)]


def projection_check(m: int, d: int, z) -> dict:
    """Materialize the class-averaging projections and verify their algebra.

    Test-support operation: builds each rank-1 projection E_j that averages
    a length-d vector over residue class j, and returns the worst
    idempotence/orthogonality error, the error of sum_j E_j against the
    Fourier-conjugated subsampling operator, and E_j z's common value per
    class.
    """
    if d < 1 or m < 1 or d % m:
        raise DimensionError(f"need m | d, got m={m}, d={d}")
    z = as_vector(z, "probe vector")
    if z.size != d:
        raise DimensionError(f"probe vector has length {z.size}, expected {d}")
    J = d // m
    projections = []
    for j in range(J):
        E = np.zeros((d, d), dtype=np.complex128)
        cls = np.arange(j, d, J)
        E[np.ix_(cls, cls)] = 1.0 / m
        projections.append(E)
    idem = 0.0
    for a, Ea in enumerate(projections):
        for b, Eb in enumerate(projections):
            target = Eb if a == b else np.zeros_like(Eb)
            idem = max(idem, float(np.max(np.abs(Ea @ Eb - target))))
    k = np.arange(d)
    fwd = np.exp(-2j * np.pi * np.outer(k, k) / d)
    keep = np.zeros((d, d))
    keep[np.arange(0, d, m), np.arange(0, d, m)] = 1.0
    conjugated = fwd @ keep @ (np.conj(fwd) / d)
    resolution = float(np.max(np.abs(sum(projections) - conjugated)))
    class_values = np.array([z[j::J].mean() for j in range(J)], dtype=np.complex128)
    return {"idempotence_error": idem, "resolution_error": resolution,
            "class_values": class_values}


def recover_spectrum_invariant(samples: SampleSet,
                               dedup_rel: float = config.DEDUP_REL,
                               tol: float = config.TAU_SOLVE) -> SpectrumEstimate:
    """Spectrum of an unknown circulant operator from 2m uniform samples.

    Runs the scalar annihilator per residue class (degree bound m, m row
    blocks) and merges the per-class roots. A class whose series is
    numerically zero legitimately contributes nothing (the signal's
    spectrum misses that class); a nonzero class with no annihilator is a
    hard failure, raised after all classes are processed with the partial
    estimate attached.
    """
    sampler = _require_uniform(samples)
    m = sampler.m
    classes = fourier_classes(samples)
    scale = float(np.max(np.abs(samples.samples)))
    per_source: dict = {}
    residuals: dict = {}
    failures: dict = {}
    hard: list[int] = []
    worst = 0.0
    for cls in classes:
        try:
            ann = scalar_annihilator(cls.series[:2 * m], m, rows=m, tol=tol, zero_scale=scale)
        except NoAnnihilator as exc:
            failures[cls.j] = str(exc)
            worst = max(worst, exc.best_residual)
            if float(np.max(np.abs(cls.series))) >= max(config.ZERO_FLOOR, config.ZERO_REL * scale):
                hard.append(cls.j)
            else:
                per_source[cls.j] = np.zeros(0, dtype=np.complex128)
            continue
        per_source[cls.j] = poly_roots(ann.poly)
        residuals[cls.j] = ann.relative_residual
    merged, tol_used = merge_roots(per_source.values(), dedup_rel)
    estimate = SpectrumEstimate(per_source, merged, tol_used, residuals, failures)
    if hard:
        err = NoAnnihilator(
            f"classes {hard} produced no annihilator of degree <= {m}", worst)
        err.partial = estimate
        raise err
    return estimate


def order_symmetric_decreasing(estimate: SpectrumEstimate, d: int,
                               real_tol: float = 1e-8) -> FilterEstimate:
    """Assign recovered spectral values to frequencies assuming the
    transfer function is real, symmetric, and decreasing.

    The (d+1)/2 deduplicated values are sorted in decreasing order onto
    frequencies 0..(d-1)/2 and mirrored onto the conjugate half. Imaginary
    parts below ``real_tol`` (relative to the spectral scale) are dropped;
    larger ones are an error, never silently truncated.
    """
    if d < 1 or d % 2 == 0:
        raise DimensionError(f"symmetric ordering needs odd d, got {d}")
    roots = np.asarray(estimate.merged, dtype=np.complex128)
    if roots.size == 0:
        raise AmbiguousOrdering("no spectral values to order")
    scale = float(np.max(np.abs(roots)))
    if float(np.max(np.abs(roots.imag))) > real_tol * (scale if scale > 0 else 1.0):
        raise NotSymmetricReal(
            f"spectral values have imaginary parts up to {np.max(np.abs(roots.imag)):.3e}; "
            "the symmetric decreasing assumption does not apply")
    half = (d + 1) // 2
    if roots.size != half:
        raise AmbiguousOrdering(
            f"expected {half} distinct spectral values for d={d}, got {roots.size} "
            "(degenerate filter: repeated half-spectrum values)")
    vals = np.sort(roots.real)[::-1]
    if np.any(np.diff(vals) >= 0):
        raise AmbiguousOrdering("spectral values are not strictly decreasing after "
                                "projection to the real axis")
    a_hat = np.concatenate([vals, vals[1:][::-1]]).astype(np.complex128)
    return FilterEstimate(a_hat, dft(a_hat, inverse=True), "symmetric_decreasing")


def recover_signal(samples: SampleSet, filt: FilterEstimate,
                   node_tol: float = config.TAU_NODE,
                   tol: float = config.TAU_SOLVE) -> np.ndarray:
    """Recover the driving signal given the transfer function.

    Per class j the m node values transfer(j + i*J) must be pairwise
    distinct; the m x m node-power system then yields the signal's
    transform on that class, and the inverse DFT assembles the signal.
    A class with repeated nodes (always the one containing frequency 0
    when the transfer function is symmetric) raises UnderDetermined.
    """
    sampler = _require_uniform(samples)
    d, m = samples.d, sampler.m
    if filt.a_hat.size != d:
        raise DimensionError(f"filter length {filt.a_hat.size} does not match d={d}")
    classes = fourier_classes(samples, min_levels=m)
    scale = float(np.max(np.abs(filt.a_hat)))
    x_hat = np.zeros(d, dtype=np.complex128)
    for cls in classes:
        nodes = filt.a_hat[cls.indices]
        if m > 1:
            gap = np.abs(nodes[:, None] - nodes[None, :])
            gap[np.diag_indices_from(gap)] = np.inf
            if float(gap.min()) <= node_tol * (scale if scale > 0 else 1.0):
                raise UnderDetermined(
                    f"class {cls.j} has repeated transfer values; its aliased signal "
                    "components cannot be separated", class_id=cls.j)
        powers = nodes[None, :] ** np.arange(m)[:, None] / m
        res = least_squares(powers, cls.series[:m])
        if res.relative_residual >= tol:
            raise RecoveryError(
                f"class {cls.j} alias system is inconsistent with the supplied filter "
                f"(residual {res.relative_residual:.3e})")
        x_hat[cls.indices] = res.solution
    return dft(x_hat, inverse=True)


def recover_operator(samples: SampleSet, assume_symmetric_decreasing: bool = False,
                     dedup_rel: float = config.DEDUP_REL,
                     tol: float = config.TAU_SOLVE):
    """Recover the spectrum and, position information permitting, the
    operator itself.

    m = 1 pins every transfer value to its frequency directly (class j is
    frequency j), so the operator is returned without any ordering
    assumption. Otherwise the operator is only recoverable under the
    symmetric decreasing assumption; without it the unordered spectrum is
    returned with no operator. Returns (operator or None, estimate).
    """
    sampler = _require_uniform(samples)
    estimate = recover_spectrum_invariant(samples, dedup_rel=dedup_rel, tol=tol)
    d = samples.d
    if sampler.m == 1:
        a_hat = np.empty(d, dtype=np.complex128)
        for j in range(d):
            roots = estimate.per_source.get(j, np.zeros(0))
            if roots.size != 1:
                raise RecoveryError(
                    f"frequency {j} is unrecoverable: its class produced {roots.size} roots "
                    "(the signal's transform may vanish there)")
            a_hat[j] = roots[0]
        return Circulant(dft(a_hat, inverse=True)), estimate
    if assume_symmetric_decreasing:
        filt = order_symmetric_decreasing(estimate, d)
        return Circulant(filt.taps), estimate
    return None, estimate
