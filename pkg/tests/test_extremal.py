import logging

import numpy as np
import pytest

from paraproducts.dyadic import MatrixStepFunction, l2_inner, l2_norm, rademacher
from paraproducts.errors.exceptions import ParameterError, ShapeMismatchError
from paraproducts.extremal import (
    build_witness,
    martingale_tensor_sum,
    pairing_decomposition,
    pairing_decomposition_check,
    rademacher_diagonal,
    rank_one,
    tensor_identity_check,
    triangle_growth,
    triangle_projection,
    triangle_s1_lower_bound,
    witness_pairing,
)
from paraproducts.operators import paraproduct_apply
from paraproducts.random_symbols import random_matrix_function, random_symbol, random_unit_vector
from paraproducts.spectral import schatten_norm
from paraproducts.symbol_norms import bmo_c_norm, linf_norm


# ------------------------------ building blocks ------------------------------ #
def test_rademacher_diagonal_values():
    D = rademacher_diagonal(2)
    diagonals = np.array([np.diag(v).real for v in D.values])
    assert np.array_equal(diagonals, [[1, 1], [1, -1], [-1, 1], [-1, -1]])
    assert np.allclose(D.values @ D.values, np.eye(2))
    with pytest.raises(ParameterError):
        rademacher_diagonal(0)


def test_triangle_projection_keeps_strict_upper_part():
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(triangle_projection(A), [[0.0, 2.0], [0.0, 0.0]])
    with pytest.raises(ShapeMismatchError):
        triangle_projection(np.zeros((2, 3)))


def test_rank_one_conjugates_second_factor():
    x = np.array([1.0, 2.0])
    y = np.array([1j, 0.0])
    assert np.allclose(rank_one(x, y), [[-1j, 0.0], [-2j, 0.0]])


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_tensor_identity(n, rng):
    alpha = random_unit_vector(rng, n)
    beta = random_unit_vector(rng, n)
    assert tensor_identity_check(n, alpha, beta) <= 1e-10


def test_tensor_sum_is_triangle_at_every_atom():
    witness = build_witness(3)
    lhs = martingale_tensor_sum(witness.f, witness.g)
    D = witness.D.values
    assert np.allclose(D @ lhs @ D, witness.M[None], atol=1e-12)


# ------------------------------ witnesses ------------------------------ #
def test_default_witness_for_two():
    witness = build_witness(2)
    assert np.allclose(witness.M, [[0.0, 0.5], [0.0, 0.0]])
    assert witness.pairing_value == pytest.approx(0.5, abs=1e-12)
    assert linf_norm(witness.b) <= 1.0 + 1e-10
    assert witness.warnings == []


def test_single_dimension_witness_pairs_to_zero():
    witness = build_witness(1)
    assert witness.pairing_value == pytest.approx(0.0, abs=1e-12)
    assert linf_norm(witness.b) == pytest.approx(1.0)


def test_basis_pair_attains_one():
    witness = build_witness(2, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    assert witness.pairing_value == pytest.approx(1.0, abs=1e-12)


def test_non_unit_inputs_are_normalised_with_warning(caplog):
    with caplog.at_level(logging.WARNING):
        witness = build_witness(2, np.array([2.0, 0.0]), np.array([0.0, 1.0]))
    assert len(witness.warnings) == 1
    assert np.allclose(witness.alpha, [1.0, 0.0])
    assert any("alpha" in rec.getMessage() for rec in caplog.records)


def test_witness_rejects_bad_vectors():
    with pytest.raises(ParameterError):
        build_witness(2, np.zeros(2))
    with pytest.raises(ShapeMismatchError):
        build_witness(3, np.ones(2))
    with pytest.raises(ParameterError):
        build_witness(0)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_pairing_equals_trace_norm_and_inner_product(n, rng):
    witness = build_witness(n, random_unit_vector(rng, n), random_unit_vector(rng, n))
    assert witness.pairing_value == pytest.approx(schatten_norm(witness.M, 1), rel=1e-10)
    direct = l2_inner(paraproduct_apply(witness.b, witness.f), witness.g).real
    assert witness_pairing(witness.b, witness.f, witness.g) == pytest.approx(direct, abs=1e-12)
    assert linf_norm(witness.b) <= 1.0 + 1e-10
    assert l2_norm(witness.f) == pytest.approx(1.0) and l2_norm(witness.g) == pytest.approx(1.0)


def test_ones_pairing_grows_with_n():
    values = [build_witness(n).pairing_value for n in (2, 4, 8, 16)]
    assert all(b > a for a, b in zip(values, values[1:]))


# ------------------------------ triangle search ------------------------------ #
def test_triangle_bound_small_dimensions():
    assert triangle_s1_lower_bound(1).value == 0.0
    assert triangle_s1_lower_bound(2, starts=2, iterations=50).value == pytest.approx(1.0, abs=1e-9)
    assert triangle_s1_lower_bound(3, starts=2, iterations=50).value >= 1.0 - 1e-12
    with pytest.raises(ParameterError):
        triangle_s1_lower_bound(0)


def test_triangle_bound_is_achieved_by_returned_pair():
    est = triangle_s1_lower_bound(5, starts=2, seed=3, iterations=50)
    a, c = est.notes["alpha"], est.notes["beta"]
    assert np.linalg.norm(a) == pytest.approx(1.0) and np.linalg.norm(c) == pytest.approx(1.0)
    assert est.value == pytest.approx(schatten_norm(triangle_projection(rank_one(a, c)), 1))
    assert est.value >= build_witness(5).pairing_value - 1e-12


def test_triangle_growth_is_nondecreasing():
    rows = triangle_growth([4, 2, 8], starts=2, seed=0, iterations=40)
    assert [r.n for r in rows] == [2, 4, 8]
    for prev, cur in zip(rows, rows[1:]):
        assert cur.value >= prev.value - 1e-12
    assert rows[0].ratio_to_log == pytest.approx(rows[0].value / np.log(3))


# ------------------------------ sweep decomposition ------------------------------ #
@pytest.mark.parametrize("n,K", [(1, 3), (2, 4), (3, 3)])
def test_pairing_decomposition_splits_total(n, K):
    rng = np.random.default_rng(n * 5 + K)
    b = random_symbol(rng, n, K)
    f = random_matrix_function(rng, n, K)
    one, two, total = pairing_decomposition(b, f)
    assert total == pytest.approx(one + two, rel=1e-10)
    assert one <= bmo_c_norm(b) ** 2 * l2_norm(f) ** 2 + 1e-8


def test_pairing_decomposition_on_witness():
    one, two, total = pairing_decomposition_check(3, seed=2)
    assert total == pytest.approx(one + two, rel=1e-10)


def test_pairing_decomposition_shape_checked(rng):
    with pytest.raises(ShapeMismatchError):
        pairing_decomposition(random_symbol(rng, 2, 2), MatrixStepFunction.zeros(2, 3))


def test_pairing_decomposition_of_constant_symbol(rng):
    b = MatrixStepFunction.constant(np.array([[1.0, 2.0], [0.0, 1.0]]), 3)
    assert pairing_decomposition(b, random_matrix_function(rng, 2, 3)) == (0.0, 0.0, 0.0)


def test_pairing_decomposition_single_level_symbol(rng):
    A = np.array([[1.0, 1.0j], [0.5, 0.0]])
    b = MatrixStepFunction.from_scalar(rademacher(1, 3), A)
    one, two, total = pairing_decomposition(b, random_matrix_function(rng, 2, 3))
    assert two == pytest.approx(0.0, abs=1e-12)
    assert total == pytest.approx(one, rel=1e-12)
