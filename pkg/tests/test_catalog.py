import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cachecontracts.catalog import (
    CachePlacement,
    FileCatalog,
    cached_prefix_mask,
    cp_demand,
    placement_from_allocation,
    spread_demand,
    zipf_popularity,
)
from cachecontracts.network import UserRecord

from conftest import catalog_with

# 1 / sum(n^-0.2, n=1..100) by direct summation
ZIPF100_TOP = 0.02031345174321424


class TestZipf:
    def test_alpha_zero_uniform(self):
        assert np.allclose(zipf_popularity(4, 0.0), [0.25] * 4, atol=1e-15)

    def test_two_files_alpha_one(self):
        assert np.allclose(zipf_popularity(2, 1.0), [2 / 3, 1 / 3], atol=1e-15)

    def test_hundred_files_top_probability(self):
        pop = zipf_popularity(100, 0.2)
        assert pop[0] == pytest.approx(ZIPF100_TOP, rel=1e-12)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            zipf_popularity(0, 0.2)
        with pytest.raises(ValueError):
            zipf_popularity(10, -0.1)

    @given(file_count=st.integers(1, 10_000), alpha=st.floats(0.0, 4.0))
    @settings(max_examples=60, deadline=None)
    def test_nonincreasing_and_normalized(self, file_count, alpha):
        pop = zipf_popularity(file_count, alpha)
        assert abs(float(pop.sum()) - 1.0) <= 1e-9
        assert np.all(np.diff(pop) <= 1e-18)


class TestPlacement:
    def test_zero_allocation_all_zero(self):
        catalog = catalog_with([0.5, 0.3, 0.2])
        placement = placement_from_allocation(catalog, 0.0, 2)
        assert not placement.beta.any()

    def test_full_allocation_all_one(self):
        catalog = catalog_with([0.5, 0.3, 0.2])
        placement = placement_from_allocation(catalog, 2 * 3.0, 2)
        assert placement.beta.all()

    def test_share_fits_two_most_popular(self):
        catalog = catalog_with([0.5, 0.3, 0.2])
        placement = placement_from_allocation(catalog, 2 * 2.0, 2)
        assert placement.beta.tolist() == [[1, 1, 0], [1, 1, 0]]

    def test_rejects_negative_allocation(self):
        with pytest.raises(ValueError):
            placement_from_allocation(catalog_with([1.0]), -1.0, 1)

    @given(shares=st.tuples(st.floats(0, 20), st.floats(0, 20)))
    @settings(max_examples=80, deadline=None)
    def test_monotone_in_allocation(self, shares):
        catalog = catalog_with(zipf_popularity(7, 0.9), sizes=[2, 1, 3, 1, 2, 1, 1])
        lo, hi = sorted(shares)
        beta_lo = placement_from_allocation(catalog, lo, 2).beta
        beta_hi = placement_from_allocation(catalog, hi, 2).beta
        assert np.all(beta_hi >= beta_lo)

    @given(rho=st.floats(0, 30))
    @settings(max_examples=80, deadline=None)
    def test_cached_bytes_within_share(self, rho):
        sizes = [2.0, 1.0, 3.0, 1.5]
        catalog = catalog_with(zipf_popularity(4, 1.1), sizes=sizes)
        placement = placement_from_allocation(catalog, rho, 3)
        cached = placement.cached_bits(catalog.sizes)
        assert np.all(cached <= rho / 3 + 1e-12)

    def test_beta_entries_binary(self):
        with pytest.raises(ValueError):
            CachePlacement(cp=0, beta=np.array([[0.5]]))


def _users_on_sbs(count, sbs, cp=0, start_id=0):
    return [UserRecord(user_id=start_id + i, serving_sbs=sbs,
                       subscriptions=frozenset({cp})) for i in range(count)]


class TestDemand:
    def test_zero_type_no_traffic(self):
        catalog = catalog_with(zipf_popularity(5, 0.7))
        demand = cp_demand(catalog, 0.0, _users_on_sbs(3, 0), 2)
        assert not demand.any()

    def test_single_user_unit_popularity(self):
        catalog = catalog_with([1.0])
        demand = cp_demand(catalog, 5.0, _users_on_sbs(1, 0), 1)
        assert demand.tolist() == [[5]]

    def test_hundred_file_fixture(self):
        """Direct evaluation of theta * popularity * subscribers, rounded."""
        catalog = catalog_with(zipf_popularity(100, 0.2))
        users = _users_on_sbs(4, 0)
        # theta=3 rounds every entry to zero with this flat popularity
        assert not cp_demand(catalog, 3.0, users, 1).any()
        heavy = cp_demand(catalog, 150.0, users, 1)
        assert heavy[0, :8].tolist() == [12, 11, 10, 9, 9, 9, 8, 8]
        assert int(heavy.sum()) == 599

    def test_linear_before_rounding(self):
        catalog = catalog_with(zipf_popularity(6, 0.4))
        users = _users_on_sbs(2, 0)
        base = 2.0 * catalog.popularity * 2
        scaled = cp_demand(catalog, 4.0, users, 1)
        assert np.array_equal(scaled[0], np.floor(2 * base + 0.5).astype(np.int64))

    def test_rejects_negative_theta(self):
        with pytest.raises(ValueError):
            cp_demand(catalog_with([1.0]), -1.0, [], 1)

    def test_ties_round_up(self):
        # theta * pop * n = 0.5 exactly
        catalog = catalog_with([1.0])
        demand = cp_demand(catalog, 0.5, _users_on_sbs(1, 0), 1)
        assert demand.tolist() == [[1]]


class TestSpreadDemand:
    def test_even_split_with_remainder_to_low_ids(self):
        out = spread_demand(np.array([5, 2]), [4, 2, 3])
        assert out[2].tolist() == [2, 1]
        assert out[3].tolist() == [2, 1]
        assert out[4].tolist() == [1, 0]

    def test_empty_subscribers_require_zero_demand(self):
        assert spread_demand(np.array([0, 0]), []) == {}
        with pytest.raises(ValueError):
            spread_demand(np.array([1]), [])
