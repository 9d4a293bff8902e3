import numpy as np
import pytest

from dynspec.annihilator import (altered_minimal_polynomial_oracle,
                                 annihilator_from_samples, hankel_system,
                                 minimal_polynomial_oracle, scalar_annihilator)
from dynspec.errors import DimensionError, NoAnnihilator
from dynspec.model import (Circulant, Dense, Diagonalizable, IndexSet,
                           observable_spectrum_oracle, random_circulant,
                           random_diagonalizable, random_signal, simulate)
from dynspec.numerics import poly_divide, poly_roots
from helpers import assert_sets_close, roots_contained


def _partially_observable(d, seed, hidden):
    """Random diagonalizable operator with the given eigencolumns hidden
    from coordinate 0 (zeros in row 0 of the eigenbasis)."""
    B = random_diagonalizable(d, seed)
    U = B.U.copy()
    for j in hidden:
        U[0, j] = 0.0
    return Diagonalizable(U, B.eigs)


# --------------------------------------------------------- vector form

def test_identity_operator_gives_lambda_minus_one():
    taps = np.zeros(5)
    taps[0] = 1
    x = random_signal(5, 0)
    seq = simulate(Circulant(taps), x, IndexSet((0,)), 6).samples
    ann = annihilator_from_samples(seq, 3)
    assert ann.degree == 1
    assert np.allclose(ann.poly.low_coeffs, [-1], atol=1e-12)


def test_zero_operator_gives_lambda():
    x = random_signal(4, 1)
    seq = simulate(Dense(np.zeros((4, 4))), x, IndexSet((0, 1, 2, 3)), 4).samples
    ann = annihilator_from_samples(seq, 2)
    assert ann.degree == 1
    assert np.allclose(ann.poly.low_coeffs, [0], atol=1e-12)


def test_degree_matches_observable_count():
    # oracle: eigendecomposition + observability through coordinate 0
    B = _partially_observable(6, 2, hidden=(2, 4))
    oracle = observable_spectrum_oracle(B, (0,))
    assert oracle.size == 4
    x = random_signal(6, 3)
    seq = simulate(B, x, IndexSet((0,)), 12).samples
    ann = annihilator_from_samples(seq, 6)
    assert ann.degree == oracle.size
    assert roots_contained(poly_roots(ann.poly), B.eigs, 1e-8)


def test_too_few_terms_rejected():
    with pytest.raises(DimensionError):
        annihilator_from_samples(np.ones((5, 2)), 3)


# --------------------------------------------------------- scalar form

def test_constant_sequence():
    ann = scalar_annihilator(np.ones(6), 3)
    assert ann.degree == 1
    assert np.allclose(ann.poly.low_coeffs, [-1], atol=1e-12)


def test_two_exponential_sequence():
    # oracle construction: c_l = 2^l + 3^l has modes exactly {2, 3}
    c = np.array([2.0 ** l + 3.0 ** l for l in range(4)])
    ann = scalar_annihilator(c, 2)
    assert ann.degree == 2
    assert_sets_close(poly_roots(ann.poly), [2, 3], 1e-9)


def test_all_zero_sequence_is_trivial():
    ann = scalar_annihilator(np.zeros(8), 4)
    assert ann.degree == 0
    assert ann.relative_residual == 0.0
    assert poly_roots(ann.poly).size == 0


def test_no_annihilator_when_r_max_too_small():
    # three modes, degree search capped at 2; the extra row blocks make the
    # shortfall visible (with rows == r_max the top-degree system is square
    # and 2*r_max terms can never refute it)
    c = np.array([1.0 + 2.0 ** l + 3.0 ** l for l in range(6)])
    with pytest.raises(NoAnnihilator) as info:
        scalar_annihilator(c, 2, rows=4)
    assert info.value.best_residual > 1e-8


def test_hankel_system_layout():
    M, rhs = hankel_system(np.arange(6, dtype=float), 2, 3)
    assert np.allclose(M, [[0, 1], [1, 2], [2, 3]])
    assert np.allclose(rhs, [-2, -3, -4])


# ------------------------------------------------------------- oracles

def test_minimal_polynomial_identity():
    taps = np.zeros(5)
    taps[0] = 1
    ann = minimal_polynomial_oracle(Circulant(taps))
    assert ann.degree == 1
    assert np.allclose(ann.poly.low_coeffs, [-1], atol=1e-10)


def test_minimal_polynomial_circulant_distinct():
    op = random_circulant(3, 5)
    ann = minimal_polynomial_oracle(op)
    assert ann.degree == 3
    assert_sets_close(poly_roots(ann.poly), op.transfer(), 1e-8)


def test_minimal_polynomial_repeated_eigenvalue_collapses():
    B = Diagonalizable(np.eye(3), [1, 1, 2])
    ann = minimal_polynomial_oracle(B)
    assert ann.degree == 2
    assert np.allclose(ann.poly.low_coeffs, [2, -3], atol=1e-12)  # (l-1)(l-2)


# ---------------------------------------------------------- properties

@pytest.mark.parametrize("seed", range(12))
def test_divisibility_chain(seed):
    rng = np.random.default_rng(seed)
    hidden = tuple(rng.choice(6, size=int(rng.integers(0, 3)), replace=False))
    B = _partially_observable(6, seed + 100, hidden)
    x = random_signal(6, seed + 200)
    seq = simulate(B, x, IndexSet((0,)), 12).samples
    computed = annihilator_from_samples(seq, 6)
    p_full = minimal_polynomial_oracle(B)
    p_altered = altered_minimal_polynomial_oracle(B, (0,))
    for big in (p_full, p_altered):
        _, rem = poly_divide(big.poly, computed.poly)
        assert rem < 1e-7 * np.linalg.norm(big.poly.coeffs_desc())
    _, rem = poly_divide(p_full.poly, p_altered.poly)
    assert rem < 1e-7 * np.linalg.norm(p_full.poly.coeffs_desc())


@pytest.mark.parametrize("seed", range(12))
def test_root_containment(seed):
    B = random_diagonalizable(5, seed)
    x = random_signal(5, seed + 31)
    seq = simulate(B, x, IndexSet((0, 2)), 10).samples
    ann = annihilator_from_samples(seq, 5)
    assert roots_contained(poly_roots(ann.poly), B.eigs, 1e-8)


def test_genericity_100_draws():
    # fixed operator, 100 signals: the degree always equals the oracle's
    B = _partially_observable(5, 77, hidden=(1,))
    expected = observable_spectrum_oracle(B, (0,)).size
    failures = 0
    for seed in range(100):
        x = random_signal(5, 1000 + seed)
        seq = simulate(B, x, IndexSet((0,)), 10).samples
        if annihilator_from_samples(seq, 5).degree != expected:
            failures += 1
    assert failures == 0


def test_row_extension_does_not_change_annihilator():
    B = _partially_observable(6, 5, hidden=(3,))
    x = random_signal(6, 6)
    seq = simulate(B, x, IndexSet((0,)), 12).samples
    full = annihilator_from_samples(seq, 6)  # r_max row blocks
    r = full.degree
    short = annihilator_from_samples(seq[:2 * r], r, rows=r)
    assert short.degree == r
    assert np.max(np.abs(short.poly.low_coeffs - full.poly.low_coeffs)) < 1e-8


def test_sample_count_sharpness():
    # exactly 2r terms suffice: truncation reproduces the same polynomial
    B = random_diagonalizable(5, 9)
    x = random_signal(5, 10)
    seq = simulate(B, x, IndexSet((0,)), 10).samples
    full = annihilator_from_samples(seq, 5)
    r = full.degree
    truncated = annihilator_from_samples(seq[:2 * r], r)
    assert truncated.degree == r
    assert np.max(np.abs(truncated.poly.low_coeffs - full.poly.low_coeffs)) < 1e-8
