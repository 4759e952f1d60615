"""Seeded scenario families used by the verification and trend suites.

These are desk-scale instances: small enough for the exhaustive solver to
act as the oracle, varied enough (layouts, type profiles, popularity
steepness) to exercise the mechanism. All of them derive deterministically
from fixed seeds.
"""

from __future__ import annotations

from .scenario import ScenarioConfig

_TYPE_COMBOS = [
    (0, 1, 2), (2, 1, 0), (1, 2, 2), (0, 2, 1), (2, 2, 1),
    (1, 1, 2), (2, 0, 2), (1, 2, 0), (0, 1, 1), (2, 1, 2),
]


def ic_corpus(count: int = 20) -> list[ScenarioConfig]:
    """3-CP, 3-type, 6-level instances with binding storage and interference."""
    configs = []
    for i in range(count):
        grid = (0.0, 4.0, 8.0) if i % 2 == 0 else (1.0, 4.0, 9.0)
        combo = _TYPE_COMBOS[i % len(_TYPE_COMBOS)]
        configs.append(ScenarioConfig(
            seed=1000 + i,
            cp_count=3,
            type_grid=grid,
            true_types=tuple(grid[c] for c in combo),
            file_count=8,
            zipf_alpha=0.2 if i % 3 == 0 else 0.6,
            file_size=1.0,
            sbs_count=2,
            mbs_count=1,
            user_counts=(3, 3, 3),
            storage_capacity_bits=10.0,
            grid_step=2.0,
            sbs_power_w=1.0,
            mbs_power_w=1.0,
            bandwidth_hz=1.0,
            backhaul_bandwidth_hz=0.6,
            noise_power_w=0.5,
            layout="random",
            gain_serving=1.0,
            gain_cross_sbs=0.25,
            gain_backhaul=1.0,
            gain_cross_mbs=0.1,
        ))
    return configs


def allocation_corpus(count: int = 20) -> list[tuple[ScenarioConfig, bool]]:
    """Small instances for oracle-vs-matching checks.

    Returns (config, decoupled) pairs. Decoupled instances put each CP on
    its own SBS with zero cross-cluster gain, a steep popularity so that
    demand rounding leaves only two requested files per CP, and enough
    capacity for every standalone request; there the matching must
    reproduce the oracle exactly.
    """
    out = []
    for i in range(count):
        decoupled = i % 2 == 0
        cp_count = 2 + (i // 2) % 3
        if decoupled:
            # One SBS per CP; two requested files fit in one grid step.
            config = ScenarioConfig(
                seed=2000 + i, cp_count=cp_count, type_grid=(2.0,),
                true_types=(2.0,) * cp_count,
                file_count=6, zipf_alpha=2.0, file_size=1.0,
                sbs_count=cp_count, mbs_count=1, user_counts=(2,) * cp_count,
                storage_capacity_bits=float(2 * cp_count * cp_count),
                grid_step=float(2 * cp_count),
                bandwidth_hz=1.0, backhaul_bandwidth_hz=0.6, noise_power_w=0.5,
                layout="clustered", gain_serving=1.0, gain_cross_sbs=0.0,
                gain_backhaul=1.0, gain_cross_mbs=0.0,
            )
        else:
            grid = {2: (2.0, 6.0), 3: (1.0, 4.0, 8.0), 4: (1.0, 4.0, 8.0)}[cp_count]
            types = tuple(grid[j % len(grid)] for j in range(cp_count))
            sbs = 3 if i % 4 == 1 else 4
            config = ScenarioConfig(
                seed=2000 + i, cp_count=cp_count, type_grid=grid, true_types=types,
                file_count=8, zipf_alpha=1.2, file_size=1.0,
                sbs_count=sbs, mbs_count=1, user_counts=(2,) * cp_count,
                storage_capacity_bits=float(5 * sbs), grid_step=float(sbs),
                bandwidth_hz=1.0, backhaul_bandwidth_hz=0.6, noise_power_w=0.5,
                layout="random", gain_serving=1.0, gain_cross_sbs=0.2,
                gain_backhaul=1.0, gain_cross_mbs=0.1,
            )
        out.append((config, decoupled))
    return out


def symmetric_corpus(count: int = 10) -> list[ScenarioConfig]:
    """CP-exchangeable instances (identical catalogs, users, channels) where
    only the type values differ, for the price monotonicity check."""
    configs = []
    for i in range(count):
        grid = (0.0, 2.0, 9.0) if i % 2 == 0 else (1.0, 3.0, 9.0)
        configs.append(ScenarioConfig(
            seed=3000 + i,
            cp_count=3,
            type_grid=grid,
            true_types=grid,
            file_count=8,
            zipf_alpha=0.2 if i % 2 == 0 else 0.4,
            file_size=1.0,
            sbs_count=2,
            mbs_count=1,
            user_counts=(2, 2, 2),
            storage_capacity_bits=8.0,
            grid_step=2.0,
            bandwidth_hz=1.0,
            backhaul_bandwidth_hz=0.6,
            noise_power_w=0.5,
            layout="symmetric",
            gain_serving=1.0,
            gain_cross_sbs=0.2,
            gain_backhaul=1.0,
            gain_cross_mbs=0.1,
        ))
    return configs


def trend_corpus(count: int = 6) -> list[ScenarioConfig]:
    """Scarce, strongly coupled 3-CP instances with distinct types, used for
    the misreport-backhaul and equal-split comparison trends."""
    configs = []
    for i in range(count):
        grid = (0.0, 4.0, 8.0)
        configs.append(ScenarioConfig(
            seed=4000 + i,
            cp_count=3,
            type_grid=grid,
            true_types=(grid[i % 3], grid[(i + 1) % 3], grid[(i + 2) % 3]),
            file_count=8,
            zipf_alpha=0.6,
            file_size=1.0,
            sbs_count=2,
            mbs_count=1,
            user_counts=(3, 3, 3),
            storage_capacity_bits=8.0,
            grid_step=2.0,
            bandwidth_hz=1.0,
            backhaul_bandwidth_hz=0.5,
            noise_power_w=0.5,
            layout="random",
            gain_serving=1.0,
            gain_cross_sbs=0.3,
            gain_backhaul=1.0,
            gain_cross_mbs=0.1,
        ))
    return configs


def scaling_template() -> ScenarioConfig:
    """Template for the CP-count / popularity-steepness study.

    Symmetric layout so that added CPs are structural clones of the
    incumbents: growing the population changes competition, not the draw of
    the physical network.
    """
    return ScenarioConfig(
        seed=1,
        cp_count=2,
        type_grid=(2.0, 4.0),
        true_types=(4.0, 2.0),
        file_count=10,
        zipf_alpha=0.2,
        file_size=1.0,
        sbs_count=4,
        mbs_count=1,
        user_counts=(2, 2),
        storage_capacity_bits=8.0,
        grid_step=4.0,
        bandwidth_hz=1.0,
        backhaul_bandwidth_hz=0.6,
        noise_power_w=0.5,
        layout="symmetric",
        gain_serving=1.0,
        gain_cross_sbs=0.2,
        gain_backhaul=1.0,
        gain_cross_mbs=0.1,
    )
