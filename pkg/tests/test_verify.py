import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppchoice import _kernels, _tally_py
from ppchoice.construct import construct_broader, plan_minimum_N
from ppchoice.design import complement, difference_from_paired_design, kronecker_inflate
from ppchoice.verify import (
    SizeGuardError,
    brute_force_c_matrix,
    brute_force_lambda,
    broader_c_matrix,
    c_matrix,
    c_matrix_from_difference,
    certify,
    contrast_product,
    interaction_pairs,
    is_positive_definite,
    main_effect_contrasts,
    optimal_nph,
    pair_contrast,
    tally_counts,
    trace_bound,
    treatment_index,
)

from conftest import parse_sets, random_design

try:
    from ppchoice import _tally_ext
except ImportError:  # extension not built
    _tally_ext = None


def classify_pairs(d):
    """Reference tallies from the type definitions, one string pair at a time."""
    n = d.n
    e1p, e1m = np.zeros((n, n), int), np.zeros((n, n), int)
    e2p, e2m = np.zeros((n, n), int), np.zeros((n, n), int)
    e3p, e3m = np.zeros((n, n, n), int), np.zeros((n, n, n), int)
    for block in d.levels:
        rows = ["".join(map(str, r)) for r in block]
        for a, b in itertools.combinations(rows, 2):
            for h, k in itertools.permutations(range(n), 2):
                pair = {a[h] + a[k], b[h] + b[k]}
                e1p[h, k] += pair == {"00", "11"}
                e1m[h, k] += pair == {"01", "10"}
                e2p[h, k] += pair == {"01", "11"}
                e2m[h, k] += pair == {"00", "10"}
            for h in range(n):
                if a[h] == b[h]:
                    continue
                zero, one = (a, b) if a[h] == "0" else (b, a)
                for k, l in itertools.permutations([r for r in range(n) if r != h], 2):
                    e3p[h, k, l] += zero[k] != zero[l] and one[k] == one[l]
                    e3m[h, k, l] += zero[k] == zero[l] and one[k] != one[l]
    return dict(eta1_plus=e1p, eta1_minus=e1m, eta2_plus=e2p, eta2_minus=e2m, eta3_plus=e3p, eta3_minus=e3m)


def assert_tallies_equal(got, want):
    assert set(got) == set(want)
    for key in want:
        np.testing.assert_array_equal(got[key], want[key], err_msg=key)


def test_single_set_eta1():
    c = tally_counts(parse_sets([("00", "11")]))
    assert (c.eta1_plus[0, 1], c.eta1_minus[0, 1]) == (1, 0)
    c = tally_counts(parse_sets([("01", "10")]))
    assert (c.eta1_plus[0, 1], c.eta1_minus[0, 1]) == (0, 1)


def test_tallies_match_reference_on_reference_designs(sat85_design, d5):
    for d in (sat85_design, d5, construct_broader(d5)):
        assert_tallies_equal(_kernels.tally(d.levels), classify_pairs(d))


def test_eta1_balanced_on_optimal_design(sat85_design):
    c = tally_counts(sat85_design)
    assert np.array_equal(c.eta1_plus, c.eta1_minus)
    assert c.component_pairs == 8


def test_eta1_bounded_by_component_pairs(rng):
    d = random_design(rng, 9, 6, 4, 3)
    c = tally_counts(d)
    assert ((c.eta1_plus + c.eta1_minus) <= d.params.component_pairs).all()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 7), st.integers(2, 5), st.integers(1, 6))
def test_python_kernel_matches_reference(seed, n, m, N):
    rng = np.random.default_rng(seed)
    rho = int(rng.integers(1, n + 1))
    m = min(m, 2**rho)
    d = random_design(rng, N, n, m, rho)
    assert_tallies_equal(_tally_py.tally(d.levels), classify_pairs(d))


@pytest.mark.skipif(_tally_ext is None, reason="compiled kernel not built")
@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 9), st.integers(2, 6), st.integers(0, 12), st.booleans())
def test_compiled_kernel_matches_python(seed, n, m, N, broader):
    rng = np.random.default_rng(seed)
    rho = int(rng.integers(1, n + 1))
    m = min(m, 2**rho)
    d = random_design(rng, N, n, m, rho)
    assert_tallies_equal(_tally_ext.tally(d.levels, broader), _tally_py.tally(d.levels, broader))


def test_kernel_backend_is_reported():
    assert _kernels.BACKEND in ("cython", "python")


def test_c_matrix_values(sat85_design, d5):
    C = c_matrix(sat85_design)
    assert C.is_diagonal() and C.trace() == Fraction(5, 256)
    assert C[0, 0] == Fraction(5, 8 * 256)
    assert c_matrix(d5).trace() == Fraction(6 * 24, 256 * 25)
    C = c_matrix(parse_sets([("00", "11")]))
    assert C[0, 1] == Fraction(1, 4) and not C.is_diagonal()


def test_trace_bound_and_nph():
    d = parse_sets([("00", "11")])
    assert trace_bound(d.params) == Fraction(2, 4)
    assert optimal_nph(4) == {2}
    assert optimal_nph(5) == {2, 3}


def test_c_matrix_equals_difference_form(sat85_X, sat85_design):
    assert c_matrix(sat85_design) == c_matrix_from_difference(sat85_X)
    for n, rho in [(10, 3), (6, 3), (7, 4)]:
        d = plan_minimum_N(n, rho).build()
        X = difference_from_paired_design(d)
        np.testing.assert_allclose(c_matrix(d).to_float(), X.T @ X / (d.N * 2**n), atol=1e-12)


def test_lambda_small_cases():
    lam = brute_force_lambda(parse_sets([("0", "1")], rho=1))
    np.testing.assert_array_equal(lam.toarray(), np.array([[1, -1], [-1, 1]]) / 4)


def test_lambda_row_sums_vanish(d5, rng):
    for d in (d5, random_design(rng, 5, 6, 3, 4)):
        lam = brute_force_lambda(d)
        assert not np.asarray(lam.star.sum(axis=1)).any()
        assert (lam.star != lam.star.T).nnz == 0


def test_lambda_counts_repeated_sets():
    one = brute_force_lambda(parse_sets([("01", "10")]))
    two = brute_force_lambda(parse_sets([("01", "10"), ("01", "10")]))
    np.testing.assert_array_equal(one.toarray(), two.toarray())
    assert two.star[1, 2] == -2


def test_treatment_index_lexicographic():
    assert treatment_index(np.array([[0, 0, 1], [1, 0, 0], [1, 1, 1]])).tolist() == [1, 4, 7]
    B = main_effect_contrasts(2)
    assert B.tolist() == [[-1, -1, 1, 1], [-1, 1, -1, 1]]
    assert interaction_pairs(3) == [(0, 1), (0, 2), (1, 2)]


def test_size_guard():
    d = parse_sets([("1" * 13, "0" * 13)])
    with pytest.raises(SizeGuardError):
        brute_force_lambda(d)


def test_brute_force_matches_counting(sat85_design, d5, rng):
    designs = [sat85_design, d5, construct_broader(d5)]
    designs += [random_design(rng, int(rng.integers(1, 8)), 5, int(rng.integers(2, 5)), 3) for _ in range(6)]
    for d in designs:
        assert brute_force_c_matrix(d) == c_matrix(d)


def test_pair_contrast_cases():
    assert pair_contrast([0, 1], [1, 0], (0,), (1,)) == -4
    assert pair_contrast([0, 1], [1, 1], (0,), (0, 1)) == 4
    assert pair_contrast([1, 0, 1], [1, 1, 0], (0,), (1, 2)) == 0


def test_contrast_product_relates_to_tallies(d5):
    c = tally_counts(d5)
    n = d5.n
    for h, k in itertools.permutations(range(n), 2):
        assert contrast_product((h,), (k,), d5) == 4 * (c.eta1_plus[h, k] - c.eta1_minus[h, k])
        assert contrast_product((h,), (h, k), d5) == 4 * (c.eta2_plus[h, k] - c.eta2_minus[h, k])
    for h in range(n):
        for k, l in itertools.combinations([r for r in range(n) if r != h], 2):
            assert contrast_product((h,), (k, l), d5) == 4 * (c.eta3_plus[h, k, l] - c.eta3_minus[h, k, l])


def test_contrast_product_matches_lambda_star(d5):
    lam = brute_force_lambda(d5)
    B = main_effect_contrasts(8)
    inter = B[2] * B[5]
    assert contrast_product((0,), (2, 5), d5) == int(B[0] @ (lam.star @ inter))
    assert contrast_product((1,), (4,), d5) == int(B[1] @ (lam.star @ B[4]))


def test_certificates_on_reference_designs(sat85_design, d5):
    assert certify(sat85_design).passed
    assert certify(d5).passed
    alone = certify(d5, "broader")
    assert not alone.passed and alone.diagonal and alone.max_trace
    assert alone.unbalanced_eta2 or alone.unbalanced_eta3
    assert certify(construct_broader(d5), "broader").passed


def test_certificate_reports_failures():
    d = parse_sets([("00", "11")])
    cert = certify(d)
    assert not cert.passed and cert.unbalanced_eta1 == ((0, 1),)
    text = "\n".join(cert.lines())
    assert "result: FAIL" in text and "(1,2)" in text
    bad = parse_sets([("000", "011", "101", "110")])
    cert = certify(bad)
    assert cert.max_trace and not cert.bad_nph
    unbalanced = parse_sets([("000", "001", "010", "011")])
    assert certify(unbalanced).bad_nph == ((0, 0, 4),)
    with pytest.raises(ValueError):
        certify(d, "other")


def test_certificate_implies_scalar_c(rng):
    for n, rho in [(6, 3), (8, 5), (10, 3), (7, 4)]:
        d = plan_minimum_N(n, rho).build()
        cert = certify(d)
        assert cert.passed
        C = cert.c_matrix.to_fractions()
        assert all(C[h][k] == (cert.trace / n if h == k else 0) for h in range(n) for k in range(n))


def test_complement_invariance(sat85_design, d5, rng):
    designs = [sat85_design, d5, construct_broader(d5), random_design(rng, 6, 6, 3, 4)]
    for d in designs:
        for model in ("main", "broader"):
            a, b = certify(d, model), certify(complement(d), model)
            assert a.passed == b.passed
            assert a.c_matrix == b.c_matrix


def test_broader_c_matrix_optimal_design(d5):
    info = broader_c_matrix(construct_broader(d5), check_ginverse=True)
    assert np.abs(info.cross).max() < 1e-12
    np.testing.assert_allclose(info.c, info.main_c, atol=1e-12)
    assert info.trace() == pytest.approx(6 * 24 / (256 * 25), abs=1e-12)
    assert info.ginverse_discrepancy < 1e-9


def test_broader_c_matrix_drops_for_unbalanced(d5):
    info = broader_c_matrix(d5)
    assert info.trace() < np.trace(info.main_c) - 1e-6


def test_broader_trace_never_exceeds_main(rng):
    for _ in range(6):
        d = random_design(rng, int(rng.integers(2, 7)), 5, int(rng.integers(2, 5)), 3)
        info = broader_c_matrix(d, check_ginverse=True, seed=int(rng.integers(1000)))
        assert info.trace() <= np.trace(info.main_c) + 1e-9
        assert info.ginverse_discrepancy < 1e-7


def test_positive_definite():
    assert is_positive_definite(np.eye(3))
    assert not is_positive_definite(np.diag([1.0, 0.0]))
    assert not is_positive_definite(np.zeros((0, 0)))


def test_kronecker_certificates(sat85_design):
    big = kronecker_inflate(sat85_design, 2)
    assert certify(big).passed
    assert certify(big).trace == Fraction(5, 2**16)
