"""Tests for hyperbolic cross frequency sets."""

import io
from itertools import product

import numpy as np
import pytest

from lattice_approx.core.exceptions import PreconditionError, ResourceLimitError
from lattice_approx.core.fourier_core import CoefficientVector
from lattice_approx.core.index_sets import (
    FrequencySet,
    SetKind,
    cross_cardinality,
    difference_set,
    hc_weight,
    hnorm,
    hyperbolic_cross,
    read_frequency_set,
    write_frequency_set,
)


def brute_force_cross(N, d, nonneg=False):
    lo = 0 if nonneg else -N
    return {
        k for k in product(range(lo, N + 1), repeat=d) if np.prod([max(1, abs(v)) for v in k]) <= N
    }


class TestHcWeight:
    """Test the hyperbolic weight."""

    @pytest.mark.parametrize("k,expected", [((0, 0), 1), ((-8, 1), 8), ((2, -4), 8), ((5,), 5)])
    def test_examples(self, k, expected):
        assert hc_weight(k) == expected

    def test_vectorized(self):
        weights = hc_weight(np.array([[0, 0], [3, -2], [-1, 7]]))
        assert weights.tolist() == [1, 6, 7]

    def test_multiplicative_over_concatenation(self):
        a, b = (3, 0, -2), (-5, 4)
        assert hc_weight(a + b) == hc_weight(a) * hc_weight(b)


class TestHyperbolicCross:
    """Test enumeration of the hyperbolic cross."""

    def test_one_dimensional_size(self):
        for N in (1, 2, 8, 140):
            assert len(hyperbolic_cross(N, 1)) == 2 * N + 1

    def test_one_dimensional_members(self):
        I = hyperbolic_cross(8, 1)
        assert [k for (k,) in I] == list(range(-8, 9))

    def test_sizes_in_two_dimensions(self):
        assert len(hyperbolic_cross(8, 2, nonneg=True)) == 37
        assert len(hyperbolic_cross(8, 2)) == 113

    @pytest.mark.parametrize("N,d", [(1, 1), (5, 2), (16, 2), (7, 3), (16, 3)])
    def test_matches_brute_force(self, N, d):
        for nonneg in (False, True):
            I = hyperbolic_cross(N, d, nonneg=nonneg)
            assert set(I) == brute_force_cross(N, d, nonneg)

    @pytest.mark.parametrize("N,d", [(6, 2), (16, 3)])
    def test_nonneg_is_filtered_full_cross(self, N, d):
        full = hyperbolic_cross(N, d)
        nonneg = hyperbolic_cross(N, d, nonneg=True)
        assert set(nonneg) == {k for k in full if min(k) >= 0}

    def test_sign_flip_symmetry(self):
        I = hyperbolic_cross(12, 3)
        members = set(I)
        for k in members:
            for signs in product((1, -1), repeat=3):
                assert tuple(s * v for s, v in zip(signs, k)) in members

    def test_lexicographic_order(self):
        I = hyperbolic_cross(10, 3)
        rows = [tuple(r) for r in I.indices.tolist()]
        assert rows == sorted(rows)
        assert len(rows) == len(set(rows))

    def test_kind_and_refinement(self):
        assert hyperbolic_cross(4, 2).kind == SetKind.FULL_CROSS
        nonneg = hyperbolic_cross(4, 2, nonneg=True)
        assert nonneg.kind == SetKind.NONNEG_CROSS
        assert nonneg.N == 4

    def test_high_dimension_is_feasible(self):
        I = hyperbolic_cross(30, 7, nonneg=True)
        assert len(I) == cross_cardinality(30, 7, nonneg=True)
        assert I.indices.min() >= 0
        assert np.all(hc_weight(I.indices) <= 30)

    def test_cardinality_without_enumeration(self):
        assert cross_cardinality(8, 2) == 113
        assert cross_cardinality(8, 2, nonneg=True) == 37

    def test_resource_cap(self):
        with pytest.raises(ResourceLimitError) as exc_info:
            hyperbolic_cross(50, 4, max_cardinality=1000)
        assert exc_info.value.limit == 1000
        assert exc_info.value.size > 1000

    @pytest.mark.parametrize("N,d", [(0, 2), (3, 0)])
    def test_invalid_arguments(self, N, d):
        with pytest.raises(PreconditionError):
            hyperbolic_cross(N, d)


class TestFrequencySet:
    """Test the FrequencySet type."""

    def test_from_indices_sorts_and_deduplicates(self):
        I = FrequencySet.from_indices([(1, 0), (0, 0), (1, 0), (-1, 2)])
        assert list(I) == [(-1, 2), (0, 0), (1, 0)]

    def test_membership_and_position(self):
        I = hyperbolic_cross(3, 2)
        assert (3, 0) in I
        assert (2, 2) not in I
        assert I.indices[I.position((1, -3))].tolist() == [1, -3]
        with pytest.raises(KeyError):
            I.position((2, 2))

    def test_nonneg_kind_rejects_negative_components(self):
        with pytest.raises(PreconditionError):
            FrequencySet(np.array([[0, -1]]), kind=SetKind.NONNEG_CROSS)

    def test_empty_set_rejected(self):
        with pytest.raises(PreconditionError):
            FrequencySet.from_indices(np.empty((0, 2), dtype=np.int64))

    def test_symmetrized_nonneg_cross_is_full_cross(self):
        for N, d in [(8, 2), (10, 3)]:
            assert hyperbolic_cross(N, d, nonneg=True).symmetrized() == hyperbolic_cross(N, d)

    def test_descriptor_identifies_contents(self):
        a = hyperbolic_cross(8, 2)
        b = hyperbolic_cross(8, 2, nonneg=True).symmetrized()
        assert a.descriptor == b.descriptor
        assert a.descriptor != hyperbolic_cross(9, 2).descriptor

    def test_equality_and_hash(self):
        a = FrequencySet.from_indices([(0,), (2,)])
        b = FrequencySet.from_indices([(2,), (0,)])
        assert a == b
        assert hash(a) == hash(b)

    def test_indices_are_read_only(self):
        I = hyperbolic_cross(2, 1)
        with pytest.raises(ValueError):
            I.indices[0, 0] = 5


class TestDifferenceSet:
    """Test difference sets."""

    def test_examples(self):
        assert list(difference_set(FrequencySet.from_indices([(0,)]))) == [(0,)]
        assert [k for (k,) in difference_set(FrequencySet.from_indices([(0,), (1,)]))] == [-1, 0, 1]
        D = difference_set(hyperbolic_cross(2, 1))
        assert [k for (k,) in D] == list(range(-4, 5))

    def test_contains_set_and_is_symmetric(self, cross_2d):
        D = difference_set(cross_2d)
        members = set(D)
        assert set(cross_2d) <= members
        assert all(tuple(-v for v in k) in members for k in members)

    def test_matches_brute_force(self):
        I = hyperbolic_cross(4, 2, nonneg=True)
        expected = {tuple(a - b for a, b in zip(k1, k2)) for k1 in I for k2 in I}
        assert set(difference_set(I)) == expected

    def test_pair_cap(self, cross_2d):
        with pytest.raises(ResourceLimitError):
            difference_set(cross_2d, max_pairs=100)


class TestHnorm:
    """Test the truncated H^beta norm."""

    def test_single_zero_coefficient(self):
        support = FrequencySet.from_indices([(0,)])
        for beta in (0.0, 1.0, 2.5):
            assert hnorm(CoefficientVector(support, [1.0]), beta) == pytest.approx(1.0)

    def test_weighted_coefficient(self):
        support = FrequencySet.from_indices([(2,)])
        assert hnorm(CoefficientVector(support, [1.0]), 1.0) == pytest.approx(2.0)

    def test_beta_zero_is_l2(self, rng):
        I = hyperbolic_cross(6, 2)
        values = rng.standard_normal(len(I))
        assert hnorm(CoefficientVector(I, values), 0.0) == pytest.approx(np.linalg.norm(values))

    def test_grows_with_beta(self, rng):
        I = hyperbolic_cross(6, 2)
        coeffs = CoefficientVector(I, rng.standard_normal(len(I)))
        assert hnorm(coeffs, 0.5) <= hnorm(coeffs, 1.0) <= hnorm(coeffs, 2.0)

    def test_negative_beta_rejected(self):
        support = FrequencySet.from_indices([(0,)])
        with pytest.raises(PreconditionError):
            hnorm(CoefficientVector(support, [1.0]), -1.0)


class TestTextFormat:
    """Test the line-based frequency set format."""

    def test_header_and_lines(self):
        buffer = io.StringIO()
        write_frequency_set(hyperbolic_cross(1, 2, nonneg=True), buffer)
        assert buffer.getvalue().splitlines() == ["2 1 nonneg-cross", "0 0", "0 1", "1 0", "1 1"]

    def test_file_round_trip(self, tmp_path):
        I = hyperbolic_cross(9, 3)
        path = tmp_path / "cross.txt"
        write_frequency_set(I, path)
        loaded = read_frequency_set(path)
        assert loaded == I
        assert loaded.kind == SetKind.FULL_CROSS
        assert loaded.N == 9

    def test_custom_set_without_refinement(self):
        buffer = io.StringIO()
        write_frequency_set(FrequencySet.from_indices([(3, -1)]), buffer)
        assert buffer.getvalue().startswith("2 - custom\n")

    def test_malformed_lines(self):
        with pytest.raises(PreconditionError):
            read_frequency_set(io.StringIO("2 4 custom\n1 2 3\n"))
        with pytest.raises(PreconditionError):
            read_frequency_set(io.StringIO("2 4\n"))
