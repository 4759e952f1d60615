import numpy as np
import pytest

from cachecontracts.catalog import FileCatalog
from cachecontracts.network import NetworkTopology, UserRecord
from cachecontracts.scenario import ScenarioConfig, build_scenario


def single_link_topology(bandwidth=1.0, gain=1.0, noise=1.0, backhaul_bandwidth=1.5,
                         backhaul_gain=1.0, backhaul_power=1.0, budget=1.0):
    """One MBS feeding one SBS that serves one user."""
    return NetworkTopology(
        mbs_count=1,
        sbs_count=1,
        users=(UserRecord(user_id=0, serving_sbs=0, subscriptions=frozenset({0})),),
        channel_gain_sbs=np.array([[gain]]),
        channel_gain_mbs_sbs=np.array([[backhaul_gain]]),
        channel_gain_cross_mbs=np.array([[0.0]]),
        bandwidth_sbs=np.array([[bandwidth]]),
        bandwidth_mbs=np.array([[backhaul_bandwidth]]),
        noise_power=noise,
        sbs_power_budget=budget,
        mbs_power=np.array([[backhaul_power]]),
        sbs_storage_capacity=10.0,
        sbs_to_mbs=np.array([0]),
    )


def two_cell_topology(requests_u0=(2, 1), requests_u1=(0, 3)):
    """Two SBSs, two users, one CP with two files; the hand-sum fixture."""
    users = (
        UserRecord(user_id=0, serving_sbs=0, subscriptions=frozenset({0}),
                   request_profile={0: np.array(requests_u0, dtype=np.int64)}),
        UserRecord(user_id=1, serving_sbs=1, subscriptions=frozenset({0}),
                   request_profile={0: np.array(requests_u1, dtype=np.int64)}),
    )
    return NetworkTopology(
        mbs_count=1,
        sbs_count=2,
        users=users,
        channel_gain_sbs=np.array([[1.0, 0.3], [0.2, 0.8]]),
        channel_gain_mbs_sbs=np.array([[1.0, 1.0]]),
        channel_gain_cross_mbs=np.array([[0.0, 0.0]]),
        bandwidth_sbs=np.ones((2, 2)),
        bandwidth_mbs=np.full((1, 2), 1.5),
        noise_power=1.0,
        sbs_power_budget=1.0,
        mbs_power=np.ones((1, 2)),
        sbs_storage_capacity=10.0,
        sbs_to_mbs=np.array([0, 0]),
    )


def small_config(**overrides) -> ScenarioConfig:
    base = dict(
        seed=77, cp_count=2, type_grid=(2.0, 6.0), true_types=(2.0, 6.0),
        file_count=6, zipf_alpha=0.8, file_size=1.0,
        sbs_count=2, mbs_count=1, user_counts=(2, 2),
        storage_capacity_bits=8.0, grid_step=2.0,
        bandwidth_hz=1.0, backhaul_bandwidth_hz=0.6, noise_power_w=0.5,
        layout="random", gain_serving=1.0, gain_cross_sbs=0.25,
        gain_backhaul=1.0, gain_cross_mbs=0.1,
    )
    base.update(overrides)
    return ScenarioConfig(**base)


@pytest.fixture(scope="session")
def pair_scenario():
    """The frozen 2-CP fixture scenario (seed 77)."""
    return build_scenario(small_config())


def catalog_with(popularity, sizes=None, cp=0) -> FileCatalog:
    popularity = np.asarray(popularity, dtype=float)
    if sizes is None:
        sizes = np.ones_like(popularity)
    return FileCatalog(cp=cp, sizes=np.asarray(sizes, dtype=float), popularity=popularity)
