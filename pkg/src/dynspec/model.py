"""Signals, evolution operators, samplers, and forward simulation.

A signal is a 1-D complex ndarray of length d. Evolution operators come in
three interchangeable representations (circulant filter, diagonalizable
factorization, dense matrix); ``apply`` agrees across representations of
the same operator to ~1e-10. This module also hosts the test-side oracles
that look at the operator itself (eigenvalue grouping, spectral
projectors, observable spectrum); the recovery pipelines never call them.

Conventions, fixed once for the whole library: the cyclic convolution is
(a * x)(n) = sum_k a(k) x(n - k), and the "shift" operator advances the
signal, (Bx)(n) = x(n + 1 mod d), which is the circulant with filter
delta_{d-1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import ConditioningError, DimensionError
from .numerics import as_matrix, as_vector, dft

_COND_LIMIT = 1e12


def _check_signal(x, d: int) -> np.ndarray:
    arr = as_vector(x, "signal")
    if arr.size != d:
        raise DimensionError(f"signal length {arr.size} does not match operator dimension {d}")
    return arr


def require_well_conditioned(U: np.ndarray, limit: float = _COND_LIMIT) -> None:
    """Raise ConditioningError when U is numerically singular."""
    cond = np.linalg.cond(U)
    if not np.isfinite(cond) or cond > limit:
        raise ConditioningError(f"matrix condition number {cond:.3e} exceeds {limit:.1e}")


@dataclass(frozen=True, eq=False)
class Circulant:
    """Cyclic convolution by a fixed filter: x -> taps * x."""

    taps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "taps", as_vector(self.taps, "filter taps"))

    @property
    def dim(self) -> int:
        return self.taps.size

    def transfer(self) -> np.ndarray:
        """The filter's DFT; these are the operator's eigenvalues."""
        return dft(self.taps)

    def apply(self, x) -> np.ndarray:
        x = _check_signal(x, self.dim)
        return dft(dft(self.taps) * dft(x), inverse=True)

    def to_dense(self) -> "Dense":
        idx = (np.arange(self.dim)[:, None] - np.arange(self.dim)[None, :]) % self.dim
        return Dense(self.taps[idx])

    def to_diagonalizable(self) -> "Diagonalizable":
        d = self.dim
        fwd = np.exp(-2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d)
        # the eigenbasis is the inverse DFT matrix
        return Diagonalizable(np.conj(fwd) / d, self.transfer())


@dataclass(frozen=True, eq=False)
class Diagonalizable:
    """Operator given by its eigenbasis: U diag(eigs) U^{-1}."""

    U: np.ndarray
    eigs: np.ndarray

    def __post_init__(self):
        U = as_matrix(self.U, "eigenbasis")
        eigs = as_vector(self.eigs, "eigenvalues")
        if U.shape[0] != U.shape[1] or U.shape[0] != eigs.size:
            raise DimensionError(f"eigenbasis must be square of size {eigs.size}, got {U.shape}")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "eigs", eigs)

    @property
    def dim(self) -> int:
        return self.eigs.size

    def apply(self, x) -> np.ndarray:
        x = _check_signal(x, self.dim)
        try:
            coords = np.linalg.solve(self.U, x)
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(f"eigenbasis is singular: {exc}") from exc
        return self.U @ (self.eigs * coords)

    def to_dense(self) -> "Dense":
        try:
            u_inv = np.linalg.inv(self.U)
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(f"eigenbasis is singular: {exc}") from exc
        return Dense((self.U * self.eigs) @ u_inv)


@dataclass(frozen=True, eq=False)
class Dense:
    """Operator as a plain d x d matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        M = as_matrix(self.matrix, "operator matrix")
        if M.shape[0] != M.shape[1]:
            raise DimensionError(f"operator matrix must be square, got {M.shape}")
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, x) -> np.ndarray:
        return self.matrix @ _check_signal(x, self.dim)

    def to_dense(self) -> "Dense":
        return self


EvolutionOperator = Circulant | Diagonalizable | Dense


def apply(op: EvolutionOperator, x) -> np.ndarray:
    """Advance a signal one time step."""
    return op.apply(x)


def shift_operator(d: int) -> Circulant:
    """The advancing cyclic shift (Bx)(n) = x(n + 1 mod d)."""
    taps = np.zeros(d, dtype=np.complex128)
    taps[d - 1] = 1.0
    return Circulant(taps)


def as_diagonalizable(op: EvolutionOperator) -> Diagonalizable:
    """View an operator in factored form.

    Dense operators are rejected: the library never eigendecomposes an
    unknown matrix, it only reads factorizations the caller constructed.
    """
    if isinstance(op, Diagonalizable):
        return op
    if isinstance(op, Circulant):
        return op.to_diagonalizable()
    raise TypeError(f"need a circulant or diagonalizable operator, got {type(op).__name__}")


@dataclass(frozen=True)
class IndexSet:
    """Ideal sampler keeping an explicit set of coordinates."""

    omega: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.omega)
        if len(idx) == 0:
            raise DimensionError("sampling set must be nonempty")
        if len(set(idx)) != len(idx):
            raise DimensionError(f"sampling indices must be distinct, got {idx}")
        if min(idx) < 0:
            raise DimensionError(f"sampling indices must be nonnegative, got {idx}")
        object.__setattr__(self, "omega", tuple(sorted(idx)))

    def indices(self, d: int) -> np.ndarray:
        if self.omega[-1] >= d:
            raise DimensionError(f"sampling indices {self.omega} out of range for d={d}")
        return np.array(self.omega, dtype=int)


@dataclass(frozen=True)
class Uniform:
    """Ideal sampler keeping every m-th coordinate; m must divide d."""

    m: int

    def __post_init__(self):
        if int(self.m) < 1:
            raise DimensionError(f"subsampling step must be positive, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    def indices(self, d: int) -> np.ndarray:
        if d % self.m:
            raise DimensionError(f"subsampling step {self.m} does not divide d={d}")
        return np.arange(0, d, self.m)


Sampler = IndexSet | Uniform


def _omega_indices(omega, d: int) -> np.ndarray:
    if isinstance(omega, (IndexSet, Uniform)):
        return omega.indices(d)
    return IndexSet(tuple(int(i) for i in omega)).indices(d)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Restricted dynamical samples on a fixed sampler.

    ``samples[l]`` holds the state at time l at the sampled positions only,
    so the array is (L_total, |omega|), time-major with no gaps.
    """

    d: int
    sampler: Sampler
    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise DimensionError(f"samples must be a (L_total, |omega|) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DimensionError("samples contain non-finite values")
        idx = self.sampler.indices(self.d)
        if arr.shape[1] != idx.size:
            raise DimensionError(f"{arr.shape[1]} values per time level, expected {idx.size}")
        object.__setattr__(self, "samples", arr)

    @property
    def L_total(self) -> int:
        return int(self.samples.shape[0])

    @property
    def omega(self) -> np.ndarray:
        return self.sampler.indices(self.d)

    def series(self, i: int) -> np.ndarray:
        """Scalar time series observed at one sampled coordinate."""
        om = self.omega
        pos = int(np.searchsorted(om, i))
        if pos >= om.size or om[pos] != i:
            raise DimensionError(f"coordinate {i} is not sampled")
        return self.samples[:, pos]


def simulate(op: EvolutionOperator, x, sampler: Sampler, L_total: int) -> SampleSet:
    """Generate dynamical samples by iterated application of the operator,
    restricted to the sampler. No operator powers are formed."""
    if L_total < 1:
        raise DimensionError("need at least one time level")
    state = _check_signal(x, op.dim)
    idx = sampler.indices(op.dim)
    out = np.empty((L_total, idx.size), dtype=np.complex128)
    for ell in range(L_total):
        out[ell] = state[idx]
        if ell + 1 < L_total:
            state = op.apply(state)
    return SampleSet(op.dim, sampler, out)


def group_eigenvalues(eigs, tau_eig: float = config.TAU_EIG):
    """Cluster numerically equal eigenvalues.

    Returns (values, groups): cluster means and member index lists, in
    first-appearance order. The matching radius is ``tau_eig`` relative to
    the largest modulus.
    """
    eigs = as_vector(eigs, "eigenvalues")
    scale = float(np.max(np.abs(eigs)))
    tol = tau_eig * (scale if scale > 0 else 1.0)
    reps: list[complex] = []
    groups: list[list[int]] = []
    for i, lam in enumerate(eigs):
        for g, rep in enumerate(reps):
            if abs(lam - rep) <= tol:
                groups[g].append(i)
                break
        else:
            reps.append(complex(lam))
            groups.append([i])
    values = np.array([np.mean(eigs[g]) for g in groups], dtype=np.complex128)
    return values, groups


@dataclass(frozen=True, eq=False)
class SpectralProjectorSet:
    """Orthogonal projectors of the diagonal factor, one per distinct
    eigenvalue: mutually annihilating idempotents summing to the identity."""

    eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...]


def spectral_projectors(op: EvolutionOperator, tau_eig: float = config.TAU_EIG) -> SpectralProjectorSet:
    """Group the eigenvalues at ``tau_eig`` and build the corresponding
    coordinate projectors of the diagonal factor."""
    diag = as_diagonalizable(op)
    values, groups = group_eigenvalues(diag.eigs, tau_eig)
    projs = []
    for g in groups:
        P = np.zeros((diag.dim, diag.dim), dtype=np.complex128)
        P[g, g] = 1.0
        projs.append(P)
    return SpectralProjectorSet(values, tuple(projs))


def observable_spectrum_oracle(op: EvolutionOperator, omega,
                               tau_eig: float = config.TAU_EIG,
                               tau_obs: float = config.TAU_OBS) -> np.ndarray:
    """Ground-truth observable spectrum as seen from the coordinates omega.

    An eigenvalue is observable when the block of the eigenbasis with rows
    in omega and columns in its eigen-group has Frobenius norm above
    ``tau_obs`` times the Frobenius norm of the whole eigenbasis. This is
    the oracle the recovery pipelines are tested against; they never call
    it themselves.
    """
    diag = as_diagonalizable(op)
    require_well_conditioned(diag.U)
    idx = _omega_indices(omega, diag.dim)
    values, groups = group_eigenvalues(diag.eigs, tau_eig)
    u_norm = float(np.linalg.norm(diag.U))
    out = [v for v, g in zip(values, groups)
           if np.linalg.norm(diag.U[np.ix_(idx, g)]) > tau_obs * u_norm]
    return np.array(out, dtype=np.complex128)


def random_signal(d: int, seed) -> np.ndarray:
    """Seeded i.i.d. complex standard normal signal.

    ``seed`` may be an integer or a numpy Generator; identical seeds give
    identical signals.
    """
    if d < 1:
        raise DimensionError("d must be positive")
    rng = np.random.default_rng(seed)
    return (rng.standard_normal(d) + 1j * rng.standard_normal(d)) / np.sqrt(2)


def make_diffusion_filter(d: int, decay: float) -> Circulant:
    """Circulant operator whose transfer function is real, symmetric about
    frequency 0, and strictly decreasing out to the folding index.

    Built as exp(-decay * k^2) on frequencies 0..(d-1)/2 and mirrored onto
    the conjugate half; d must be odd so the mirroring is unambiguous.
    """
    if d < 1 or d % 2 == 0:
        raise DimensionError(f"diffusion filter requires odd d, got {d}")
    if decay <= 0:
        raise ValueError(f"decay must be positive, got {decay}")
    half = (d - 1) // 2
    head = np.exp(-decay * np.arange(half + 1, dtype=float) ** 2)
    assert np.all(np.diff(head) < 0) or half == 0
    a_hat = np.concatenate([head, head[1:][::-1]]).astype(np.complex128)
    return Circulant(dft(a_hat, inverse=True))


def _min_pairwise_gap(values: np.ndarray) -> float:
    dist = np.abs(values[:, None] - values[None, :])
    dist[np.diag_indices_from(dist)] = np.inf
    return float(dist.min())


def random_circulant(d: int, seed, min_gap: float = 1e-3, max_tries: int = 200) -> Circulant:
    """Random complex filter with pairwise-distinct transfer values,
    normalized so the largest transfer modulus is 1."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        a_hat = (rng.standard_normal(d) + 1j * rng.standard_normal(d)) / np.sqrt(2)
        a_hat /= np.max(np.abs(a_hat))
        if d == 1 or _min_pairwise_gap(a_hat) > min_gap:
            return Circulant(dft(a_hat, inverse=True))
    raise ConditioningError(f"could not draw a filter with transfer gaps above {min_gap}")


def _random_unitary(rng, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_diagonalizable(d: int, seed, eig_gap: float = 1e-3,
                          modulus: tuple[float, float] = (0.9, 1.1),
                          cond: float = 2.0, max_tries: int = 200) -> Diagonalizable:
    """Random diagonalizable operator with controlled conditioning.

    The eigenbasis has condition number exactly ``cond``. Eigenvalue
    moduli are uniform in ``modulus``; phases are jittered around the
    equispaced grid and rotated by a random angle, which keeps pairwise
    gaps near 1/d. Eigenvalues packed much tighter than that are not
    resolvable from the 2d-sample horizon the recovery pipelines use, so
    a uniform-phase draw would routinely produce instances no method
    could handle at the default consistency threshold. ``eig_gap`` is
    still enforced by rejection as an absolute floor.
    """
    rng = np.random.default_rng(seed)
    U = _random_unitary(rng, d) @ np.diag(np.geomspace(1.0, cond, d)) @ _random_unitary(rng, d)
    for _ in range(max_tries):
        phases = (np.arange(d) + rng.uniform(-0.25, 0.25, d)) * 2 * np.pi / d
        eigs = rng.uniform(*modulus, d) * np.exp(1j * (phases + rng.uniform(0, 2 * np.pi)))
        if d == 1 or _min_pairwise_gap(eigs) > eig_gap:
            return Diagonalizable(U, eigs)
    raise ConditioningError(f"could not draw eigenvalues with gaps above {eig_gap}")
