import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppchoice.design import (
    ChoiceSet,
    DesignError,
    PartialDesign,
    complement,
    difference_from_paired_design,
    kronecker_inflate,
    paired_design_from_difference,
    stack,
    validate_structure,
)
from ppchoice.verify import certify

from conftest import parse_sets


def test_paired_from_difference_first_rows():
    d = paired_design_from_difference(np.array([[1, 1, 1, 1, 1, 0, 0, 0]]))
    s = d.sets[0]
    assert s.profiles.tolist() == [[1, 1, 1, 1, 1, 0, 0, 0], [0] * 8]
    assert s.active.tolist() == [True] * 5 + [False] * 3
    assert s.render() == ["11111***", "00000***"]

    d = paired_design_from_difference(np.array([[1, -1, 1, -1, 0, 1, 0, 0]]))
    assert d.sets[0].render() == ["1010*1**", "0101*0**"]
    assert d.levels[0].tolist() == [[1, 0, 1, 0, 0, 1, 0, 0], [0, 1, 0, 1, 0, 0, 0, 0]]


def test_paired_from_difference_fixed_level_one():
    d = paired_design_from_difference(np.array([[1, -1, 0]]), fixed_level=1)
    assert d.levels[0].tolist() == [[1, 0, 1], [0, 1, 1]]


def test_paired_from_difference_rejects_malformed_rows():
    with pytest.raises(DesignError, match="row 1 has 0 nonzero"):
        paired_design_from_difference(np.zeros((1, 1), dtype=int), rho=1)
    with pytest.raises(DesignError, match="row 2"):
        paired_design_from_difference(np.array([[1, 1, 0], [1, 0, 0]]), rho=2)
    with pytest.raises(DesignError):
        paired_design_from_difference(np.array([[2, 0]]), rho=1)


def test_sat85_matches_reference_design(sat85_X, sat85_design):
    d = paired_design_from_difference(sat85_X)
    assert d == sat85_design
    assert np.array_equal(difference_from_paired_design(sat85_design), sat85_X)


def test_difference_sign_flips_under_option_swap():
    d = parse_sets([("00000***", "11111***")])
    assert difference_from_paired_design(d).tolist() == [[-1, -1, -1, -1, -1, 0, 0, 0]]


def test_difference_requires_paired(d5):
    with pytest.raises(DesignError, match="m=2"):
        difference_from_paired_design(d5)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_difference_round_trip(data):
    n = data.draw(st.integers(1, 9))
    rho = data.draw(st.integers(1, n))
    N = data.draw(st.integers(1, 6))
    rows = []
    for _ in range(N):
        support = data.draw(st.permutations(range(n)))[:rho]
        signs = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=rho, max_size=rho))
        row = [0] * n
        for p, s in zip(support, signs):
            row[p] = s
        rows.append(row)
    X = np.array(rows)
    level = data.draw(st.sampled_from([0, 1]))
    assert np.array_equal(difference_from_paired_design(paired_design_from_difference(X, rho, level)), X)


def test_complement_flips_every_level():
    d = parse_sets([("11111***", "00000***")])
    c = complement(d)
    assert c.levels[0].tolist() == [[0, 0, 0, 0, 0, 1, 1, 1], [1] * 8]
    assert np.array_equal(c.active, d.active)


def test_complement_is_involution(d5):
    assert complement(complement(d5)) == d5
    assert complement(d5) != d5


def test_complement_mirrored_pair_level_counts(d5):
    both = stack(d5, complement(d5))
    zeros = (both.levels == 0).sum(axis=1)
    # each set and its mirror together show level 0 exactly m times per factor
    assert (zeros[:8] + zeros[8:] == d5.m).all()


def test_stack_counts_and_mismatch(d5, sat85_design):
    assert stack(d5, complement(d5)).N == 16
    assert stack(d5, d5).N == 16
    with pytest.raises(DesignError, match="different"):
        stack(d5, sat85_design)


def test_stack_self_doubles_counts(sat85_design):
    doubled = stack(sat85_design, sat85_design)
    assert certify(doubled).passed
    single = certify(sat85_design).c_matrix
    assert doubled.N == 2 * sat85_design.N
    np.testing.assert_array_equal(certify(doubled).c_matrix.to_float(), single.to_float())


def test_kronecker_identity_and_shape(sat85_design, d5):
    assert kronecker_inflate(d5, 1) == d5
    big = kronecker_inflate(d5, 3)
    assert (big.N, big.n, big.m, big.rho) == (24, 24, 5, 6)
    with pytest.raises(DesignError):
        kronecker_inflate(d5, 0)


def test_kronecker_difference_is_block_diagonal(sat85_X):
    d = paired_design_from_difference(sat85_X)
    X2 = difference_from_paired_design(kronecker_inflate(d, 2))
    assert np.array_equal(X2, np.kron(np.eye(2, dtype=int), sat85_X))
    assert np.array_equal(X2.T @ X2, 5 * np.eye(16, dtype=int))


def test_kronecker_padding_levels(d5):
    big = kronecker_inflate(d5, 2, fixed_level=1)
    assert (big.levels[:8, :, 8:] == 1).all()
    per_set = kronecker_inflate(d5, 2, fixed_level=[0, 1] * 4)
    assert (per_set.levels[1, :, 8:] == 1).all() and (per_set.levels[8, :, :8] == 0).all()
    with pytest.raises(DesignError):
        kronecker_inflate(d5, 2, fixed_level=2)


def test_validate_accepts_reference_design(d5):
    assert validate_structure(d5).ok


def test_validate_reports_duplicates_from_bad_generator(d5):
    # options 3 and 4 replaced by A1+g, A2+g with g = 11000000 (only last two sets shown in print)
    rows = [list(r) for r in [
        ("**001100", "**110011", "**001100", "**110011", "**110000"),
        ("**011001", "**100110", "**011001", "**100110", "**100101"),
    ]]
    report = validate_structure(parse_sets(rows))
    dups = report.by_kind("duplicate")
    assert {(i.set_index, i.detail) for i in dups} == {
        (0, "options 1 and 3 are identical"), (0, "options 2 and 4 are identical"),
        (1, "options 1 and 3 are identical"), (1, "options 2 and 4 are identical"),
    }


def test_validate_reports_constancy_and_mask_size():
    levels = np.array([[[1, 0, 0], [0, 1, 1]]])
    active = np.array([[True, True, False]])
    report = validate_structure(PartialDesign(levels, active, 2))
    assert [(i.kind, i.set_index, i.position) for i in report.issues] == [("constancy", 0, 2)]
    report = validate_structure(PartialDesign(levels, active, 3))
    assert {i.kind for i in report.issues} == {"mask-size", "constancy"}


def test_design_rejects_bad_shapes():
    with pytest.raises(DesignError):
        PartialDesign(np.zeros((2, 3)), np.zeros((2, 3)), 1)
    with pytest.raises(DesignError):
        PartialDesign(np.zeros((1, 2, 3)), np.zeros((1, 4)), 1)
    with pytest.raises(DesignError):
        PartialDesign(np.full((1, 2, 3), 2), np.ones((1, 3)), 3)
    with pytest.raises(DesignError):
        PartialDesign(np.zeros((1, 2, 3)), np.ones((1, 3)), 4)


def test_design_is_immutable(d5):
    with pytest.raises(ValueError):
        d5.levels[0, 0, 0] = 1
    s = d5.sets[0]
    assert isinstance(s, ChoiceSet) and s.m == 5
