"""Scenario configuration, deterministic materialization, and fast evaluation.

A scenario file (JSON, UTF-8) plus its seed fully determines a run: channel
gains, catalogs, user placement, and demand are all derived from the seed
with a fixed draw order, so identical inputs give bit-identical scenarios.

The ``Scenario`` object also hosts the batched evaluator used by the
allocation solvers: given per-CP storage levels it computes cache
placements, the power split, interference, and request-weighted rates for
many candidate allocations at once. The power split weights each user by
the cached popularity mass it subscribes to, so the whole rate environment
is a function of the storage allocation alone; CP types enter only through
the request counts that weight the rate sums.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .catalog import (
    FileCatalog,
    cached_prefix_mask,
    cp_demand,
    placement_from_allocation,
    spread_demand,
)
from .network import NetworkTopology, UserRecord, backhaul_rate

_LN2 = float(np.log(2.0))

LAYOUTS = ("random", "symmetric", "clustered")


class ScenarioError(ValueError):
    """Raised for unparseable or invalid scenario configurations."""


def storage_cost(theta: float) -> float:
    """MNO storage cost ln(1 + theta) for a CP of traffic type theta."""
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    return math.log1p(theta)


@dataclass(frozen=True)
class ScenarioConfig:
    """All knobs for one run. Defaults mirror the reference setup:
    5 CPs spanning five traffic levels (the lowest carries no traffic),
    100 files under a Zipf(0.2) popularity, 10 SBSs fed by 1 MBS, 1 Gbit of
    total storage, 1 W per SBS, and 100 MHz access bandwidth. Type values
    are request-rate multipliers; they must be large enough that
    theta * popularity * subscribers rounds to nonzero request counts.
    """

    seed: int = 1
    cp_count: int = 5
    type_grid: tuple[float, ...] = (0.0, 50.0, 100.0, 150.0, 200.0)
    true_types: tuple[float, ...] = (0.0, 50.0, 100.0, 150.0, 200.0)
    file_count: int = 100
    zipf_alpha: float = 0.2
    file_size: float = 1e7
    sbs_count: int = 10
    mbs_count: int = 1
    user_counts: tuple[int, ...] = (4, 4, 4, 4, 4)
    storage_capacity_bits: float = 1e9
    sbs_power_w: float = 1.0
    mbs_power_w: float = 1.0
    bandwidth_hz: float = 1e8
    backhaul_bandwidth_hz: float = 1e7
    noise_power_w: float = 4e-13
    grid_step: float | None = None
    rate_scale: float = 1.0
    price_caps: tuple[float, ...] | None = None
    layout: str = "random"
    gain_serving: float = 1.0
    gain_cross_sbs: float = 0.05
    gain_backhaul: float = 1.0
    gain_cross_mbs: float = 0.05
    channel_overrides: dict | None = None

    def violations(self) -> list[str]:
        problems = []
        grid = tuple(self.type_grid)
        if self.cp_count < 1:
            problems.append("cp_count must be >= 1")
        if len(grid) < 1:
            problems.append("type_grid must be nonempty")
        elif any(b <= a for a, b in zip(grid, grid[1:])):
            problems.append("type_grid must be strictly ascending")
        if grid and grid[0] < 0:
            problems.append("type_grid values must be nonnegative")
        if len(grid) > self.cp_count:
            problems.append("type_grid has more types than CPs")
        if len(self.true_types) != self.cp_count:
            problems.append("true_types must have one entry per CP")
        else:
            for k, theta in enumerate(self.true_types):
                if theta not in grid:
                    problems.append(f"true_types[{k}]={theta} is not on the type grid")
        if self.file_count < 1:
            problems.append("file_count must be >= 1")
        if self.zipf_alpha < 0:
            problems.append("zipf_alpha must be nonnegative")
        if not self.file_size > 0:
            problems.append("file_size must be positive")
        if self.sbs_count < 1:
            problems.append("sbs_count must be >= 1")
        if self.mbs_count < 1:
            problems.append("mbs_count must be >= 1")
        if len(self.user_counts) != self.cp_count:
            problems.append("user_counts must have one entry per CP")
        elif any(n < 1 for n in self.user_counts):
            problems.append("user_counts entries must be >= 1")
        if not self.storage_capacity_bits > 0:
            problems.append("storage_capacity_bits must be positive")
        for name in ("sbs_power_w", "mbs_power_w", "bandwidth_hz", "backhaul_bandwidth_hz",
                     "noise_power_w", "rate_scale"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be positive")
        if self.grid_step is not None:
            if not self.grid_step > 0:
                problems.append("grid_step must be positive")
            elif self.grid_step > self.storage_capacity_bits:
                problems.append("grid_step must not exceed storage_capacity_bits")
        if self.price_caps is not None:
            if len(self.price_caps) != self.cp_count:
                problems.append("price_caps must have one entry per CP")
            elif any(cap < 0 for cap in self.price_caps):
                problems.append("price_caps entries must be nonnegative")
        if self.layout not in LAYOUTS:
            problems.append(f"layout must be one of {LAYOUTS}")
        if self.layout == "symmetric" and len(set(self.user_counts)) > 1:
            problems.append("symmetric layout requires equal user_counts")
        if self.layout == "clustered" and self.sbs_count % self.cp_count != 0:
            problems.append("clustered layout requires sbs_count divisible by cp_count")
        for name in ("gain_serving", "gain_cross_sbs", "gain_backhaul", "gain_cross_mbs"):
            if getattr(self, name) < 0:
                problems.append(f"{name} must be nonnegative")
        return problems

    def validate(self) -> None:
        problems = self.violations()
        if problems:
            raise ScenarioError("invalid scenario config: " + "; ".join(problems))

    @property
    def effective_grid_step(self) -> float:
        if self.grid_step is not None:
            return float(self.grid_step)
        return float(self.storage_capacity_bits) / 20.0

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ScenarioError("scenario config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ScenarioError("unknown config fields: " + ", ".join(unknown))
        numeric = {"seed", "cp_count", "file_count", "zipf_alpha", "file_size",
                   "sbs_count", "mbs_count", "storage_capacity_bits", "sbs_power_w",
                   "mbs_power_w", "bandwidth_hz", "backhaul_bandwidth_hz",
                   "noise_power_w", "grid_step", "rate_scale"}
        sequences = {"type_grid", "true_types", "user_counts", "price_caps"}
        optional = {"grid_step", "price_caps", "channel_overrides"}
        problems = []
        kwargs = dict(data)
        for name, value in data.items():
            if value is None and name not in optional:
                problems.append(f"field {name} must not be null")
            elif name in numeric and value is not None and not isinstance(value, (int, float)):
                problems.append(f"field {name} must be a number")
            elif name in sequences and value is not None:
                if not isinstance(value, (list, tuple)):
                    problems.append(f"field {name} must be a list")
                else:
                    kwargs[name] = tuple(value)
        if problems:
            raise ScenarioError("invalid scenario config: " + "; ".join(problems))
        config = cls(**kwargs)
        config.validate()
        return config

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


def _draw_gains(rng: np.random.Generator, shape: tuple[int, ...], scale: float) -> np.ndarray:
    # Rayleigh fading: |h|^2 is exponential with the class mean as scale.
    return scale * rng.standard_exponential(shape)


def _apply_overrides(config: ScenarioConfig, built: dict) -> list[str]:
    problems = []
    over = config.channel_overrides or {}
    allowed = {"channel_gain_sbs", "channel_gain_mbs_sbs", "channel_gain_cross_mbs",
               "serving_sbs", "sbs_to_mbs"}
    unknown = sorted(set(over) - allowed)
    if unknown:
        problems.append("unknown channel_overrides keys: " + ", ".join(unknown))
    shapes = {
        "channel_gain_sbs": built["channel_gain_sbs"].shape,
        "channel_gain_mbs_sbs": built["channel_gain_mbs_sbs"].shape,
        "channel_gain_cross_mbs": built["channel_gain_cross_mbs"].shape,
        "serving_sbs": built["serving_sbs"].shape,
        "sbs_to_mbs": built["sbs_to_mbs"].shape,
    }
    for key in allowed & set(over):
        arr = np.asarray(over[key], dtype=np.intp if key in ("serving_sbs", "sbs_to_mbs") else float)
        if arr.shape != shapes[key]:
            problems.append(f"channel_overrides.{key} must have shape {shapes[key]}")
            continue
        built[key] = arr
    return problems


def build_scenario(config: ScenarioConfig) -> "Scenario":
    """Materialize a scenario deterministically from its config and seed."""
    config.validate()
    C, S, M = config.cp_count, config.sbs_count, config.mbs_count
    U = int(sum(config.user_counts))
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))

    # Draw order is fixed: serving assignment first, then the gain matrices.
    cp_of_user = np.repeat(np.arange(C), config.user_counts)
    if config.layout == "random":
        serving = rng.integers(0, S, size=U).astype(np.intp)
    elif config.layout == "symmetric":
        per_cp = config.user_counts[0]
        serving = np.array([i % S for i in range(per_cp)] * C, dtype=np.intp)
    else:  # clustered
        per_cluster = S // C
        serving = np.array(
            [cp_of_user[j] * per_cluster + pos % per_cluster
             for j, pos in enumerate(_position_within_cp(cp_of_user))],
            dtype=np.intp,
        )

    if config.layout == "symmetric":
        per_cp = config.user_counts[0]
        block = rng.standard_exponential((S, per_cp))
        raw = np.tile(block, (1, C))
    else:
        raw = rng.standard_exponential((S, U))
    scale = np.full((S, U), config.gain_cross_sbs)
    scale[serving, np.arange(U)] = config.gain_serving
    channel_gain_sbs = raw * scale

    channel_gain_mbs_sbs = _draw_gains(rng, (M, S), config.gain_backhaul)
    channel_gain_cross_mbs = _draw_gains(rng, (M, S), config.gain_cross_mbs)

    built = {
        "channel_gain_sbs": channel_gain_sbs,
        "channel_gain_mbs_sbs": channel_gain_mbs_sbs,
        "channel_gain_cross_mbs": channel_gain_cross_mbs,
        "serving_sbs": serving,
        "sbs_to_mbs": np.array([s % M for s in range(S)], dtype=np.intp),
    }
    problems = _apply_overrides(config, built)
    if problems:
        raise ScenarioError("invalid scenario config: " + "; ".join(problems))

    catalogs = tuple(
        FileCatalog.uniform_sizes(k, config.file_count, config.file_size, config.zipf_alpha)
        for k in range(C)
    )

    users = []
    for j in range(U):
        users.append(
            UserRecord(
                user_id=j,
                serving_sbs=int(built["serving_sbs"][j]),
                subscriptions=frozenset({int(cp_of_user[j])}),
                request_profile={},
            )
        )

    # Per-user request profiles at the true types: per-SBS demand spread
    # evenly over that SBS's subscribers, remainders to the lowest user ids.
    profiles: dict[int, dict[int, np.ndarray]] = {j: {} for j in range(U)}
    for k in range(C):
        demand = cp_demand(catalogs[k], config.true_types[k], users, S)
        for s in range(S):
            uids = [u.user_id for u in users if u.serving_sbs == s and k in u.subscriptions]
            for uid, counts in spread_demand(demand[s], uids).items():
                profiles[uid][k] = counts
    users = tuple(
        UserRecord(
            user_id=u.user_id,
            serving_sbs=u.serving_sbs,
            subscriptions=u.subscriptions,
            request_profile=profiles[u.user_id],
        )
        for u in users
    )

    topology = NetworkTopology(
        mbs_count=M,
        sbs_count=S,
        users=users,
        channel_gain_sbs=built["channel_gain_sbs"],
        channel_gain_mbs_sbs=built["channel_gain_mbs_sbs"],
        channel_gain_cross_mbs=built["channel_gain_cross_mbs"],
        bandwidth_sbs=np.full((S, U), config.bandwidth_hz),
        bandwidth_mbs=np.full((M, S), config.backhaul_bandwidth_hz),
        noise_power=float(config.noise_power_w),
        sbs_power_budget=float(config.sbs_power_w),
        mbs_power=np.full((M, S), config.mbs_power_w),
        sbs_storage_capacity=float(config.storage_capacity_bits),
        sbs_to_mbs=built["sbs_to_mbs"],
    )
    issues = topology.violations()
    if issues:
        raise ScenarioError("invalid scenario config: " + "; ".join(issues))
    return Scenario(config=config, topology=topology, catalogs=catalogs)


def _position_within_cp(cp_of_user: np.ndarray) -> list[int]:
    seen: dict[int, int] = {}
    positions = []
    for cp in cp_of_user:
        positions.append(seen.get(int(cp), 0))
        seen[int(cp)] = positions[-1] + 1
    return positions


def load_scenario(path) -> "Scenario":
    """Parse and materialize a scenario from a JSON config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file {path} is not valid JSON: {exc.msg} "
                            f"(line {exc.lineno}, column {exc.colno})")
    return build_scenario(ScenarioConfig.from_dict(data))


@dataclass
class _LevelTables:
    """Per-grid precomputation: cached masks and request aggregates."""

    levels: np.ndarray                     # [L] storage values
    masks: list[np.ndarray]                # per cp: [L, F_k] bool
    pop_mass: np.ndarray                   # [C, L] cached popularity mass
    req_cached: np.ndarray                 # [C, K, U, L] cached request mass
    req_total: np.ndarray                  # [C, K, U]
    bits_cached: np.ndarray                # [C, K, U, L] cached request volume (bits)
    bits_total: np.ndarray                 # [C, K, U]


@dataclass
class Scenario:
    """A materialized scenario plus the cached arrays for fast evaluation."""

    config: ScenarioConfig
    topology: NetworkTopology
    catalogs: tuple[FileCatalog, ...]

    def __post_init__(self):
        topo = self.topology
        self.cp_count = self.config.cp_count
        self.user_count = topo.user_count
        self.serving = topo.serving_index()
        self.sub_mask = np.zeros((self.cp_count, self.user_count), dtype=bool)
        for j, rec in enumerate(topo.users):
            for k in rec.subscriptions:
                self.sub_mask[k, j] = True
        self.gain = np.asarray(topo.channel_gain_sbs, dtype=float)
        self.gain_serving = self.gain[self.serving, np.arange(self.user_count)]
        self.bandwidth = np.asarray(topo.bandwidth_sbs, dtype=float)[
            self.serving, np.arange(self.user_count)
        ]
        self.noise = float(topo.noise_power)
        self.budget = float(topo.sbs_power_budget)
        self.capacity = float(topo.sbs_storage_capacity)
        self.rate_scale = float(self.config.rate_scale)
        self.type_grid = np.asarray(self.config.type_grid, dtype=float)
        self.true_types = np.asarray(self.config.true_types, dtype=float)
        self.backhaul_by_sbs = np.array(
            [backhaul_rate(topo, int(topo.sbs_to_mbs[s]), s) for s in range(topo.sbs_count)]
        )
        self._onehot = np.zeros((self.user_count, topo.sbs_count))
        self._onehot[np.arange(self.user_count), self.serving] = 1.0
        self._request_tables: dict[tuple[int, float], np.ndarray] = {}
        self._level_tables: dict[tuple[float, ...], _LevelTables] = {}

    # ------------------------------------------------------------------
    # demand
    # ------------------------------------------------------------------

    def request_table(self, cp: int, theta: float) -> np.ndarray:
        """[user x file] integer request counts for one CP at one type value."""
        key = (cp, float(theta))
        table = self._request_tables.get(key)
        if table is None:
            demand = cp_demand(self.catalogs[cp], theta, self.topology.users, self.topology.sbs_count)
            table = np.zeros((self.user_count, self.catalogs[cp].file_count), dtype=np.int64)
            for s in range(self.topology.sbs_count):
                uids = [u.user_id for u in self.topology.users
                        if u.serving_sbs == s and cp in u.subscriptions]
                for uid, counts in spread_demand(demand[s], uids).items():
                    table[uid] = counts
            table.setflags(write=False)
            self._request_tables[key] = table
        return table

    def type_index(self, theta: float) -> int:
        hits = np.flatnonzero(self.type_grid == float(theta))
        if len(hits) != 1:
            raise ValueError(f"type {theta} is not on the type grid")
        return int(hits[0])

    # ------------------------------------------------------------------
    # environment shared by both evaluation paths
    # ------------------------------------------------------------------

    def _env_from_load(self, load: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Access rates and backhaul-capped rates per user, batched.

        ``load`` is [A x user]: the cached popularity mass each user
        subscribes to. Each SBS splits its power budget over its users in
        proportion to this load; an SBS with zero load radiates nothing.
        """
        totals = load @ self._onehot                       # [A, S]
        radiated = np.where(totals > 0.0, self.budget, 0.0)
        totals_serv = totals[:, self.serving]              # [A, U]
        with np.errstate(invalid="ignore"):
            power = np.where(totals_serv > 0.0, self.budget * load / totals_serv, 0.0)
        interference = radiated @ self.gain - radiated[:, self.serving] * self.gain_serving
        sinr = power * self.gain_serving / (self.noise + interference)
        access = self.bandwidth * np.log1p(sinr) / _LN2
        capped = np.minimum(access, self.backhaul_by_sbs[self.serving])
        return access, capped

    # ------------------------------------------------------------------
    # arbitrary-allocation path
    # ------------------------------------------------------------------

    def masks_for_rho(self, rho) -> list[np.ndarray]:
        rho = np.asarray(rho, dtype=float)
        if rho.shape != (self.cp_count,):
            raise ValueError("rho must have one entry per CP")
        if np.any(rho < 0):
            raise ValueError("rho entries must be nonnegative")
        S = self.topology.sbs_count
        return [cached_prefix_mask(self.catalogs[k], rho[k] / S) for k in range(self.cp_count)]

    def placements_for_rho(self, rho):
        rho = np.asarray(rho, dtype=float)
        return [placement_from_allocation(self.catalogs[k], float(rho[k]), self.topology.sbs_count)
                for k in range(self.cp_count)]

    def user_load_for_masks(self, masks: list[np.ndarray]) -> np.ndarray:
        load = np.zeros((1, self.user_count))
        for k in range(self.cp_count):
            mass = float(self.catalogs[k].popularity @ masks[k])
            load[0] += mass * self.sub_mask[k]
        return load

    def rates_for_rho(self, rho, valuation_types) -> np.ndarray:
        """Per-CP request-weighted rates (bit/s) at an arbitrary allocation.

        ``valuation_types`` gives the type value whose demand weights each
        CP's rate sum; the power split and interference depend on the
        allocation only.
        """
        masks = self.masks_for_rho(rho)
        access, capped = self._env_from_load(self.user_load_for_masks(masks))
        rates = np.zeros(self.cp_count)
        for k in range(self.cp_count):
            req = self.request_table(k, float(valuation_types[k])).astype(float)
            cached = req @ masks[k].astype(float)
            total = req.sum(axis=1)
            rates[k] = float(np.sum(cached * access[0] + (total - cached) * capped[0]))
        return rates

    def backhaul_bits_for_rho(self, rho, valuation_types) -> np.ndarray:
        """Per-CP request volume (bits) that must transit the backhaul."""
        masks = self.masks_for_rho(rho)
        out = np.zeros(self.cp_count)
        for k in range(self.cp_count):
            req = self.request_table(k, float(valuation_types[k])).astype(float)
            sized = req * self.catalogs[k].sizes[None, :]
            out[k] = float(sized.sum() - (sized @ masks[k].astype(float)).sum())
        return out

    # ------------------------------------------------------------------
    # grid-level batched path
    # ------------------------------------------------------------------

    def level_tables(self, grid) -> _LevelTables:
        key = tuple(float(v) for v in grid.levels)
        cached = self._level_tables.get(key)
        if cached is not None:
            return cached
        S = self.topology.sbs_count
        levels = np.asarray(grid.levels, dtype=float)
        L = len(levels)
        K = len(self.type_grid)
        masks = []
        pop_mass = np.zeros((self.cp_count, L))
        req_cached = np.zeros((self.cp_count, K, self.user_count, L))
        req_total = np.zeros((self.cp_count, K, self.user_count))
        bits_cached = np.zeros_like(req_cached)
        bits_total = np.zeros_like(req_total)
        for k in range(self.cp_count):
            mk = np.stack([cached_prefix_mask(self.catalogs[k], lv / S) for lv in levels])
            masks.append(mk)
            mk_f = mk.astype(float).T                     # [F, L]
            pop_mass[k] = self.catalogs[k].popularity @ mk_f
            for t, theta in enumerate(self.type_grid):
                req = self.request_table(k, float(theta)).astype(float)
                req_cached[k, t] = req @ mk_f
                req_total[k, t] = req.sum(axis=1)
                sized = req * self.catalogs[k].sizes[None, :]
                bits_cached[k, t] = sized @ mk_f
                bits_total[k, t] = sized.sum(axis=1)
        tables = _LevelTables(levels, masks, pop_mass, req_cached, req_total,
                              bits_cached, bits_total)
        self._level_tables[key] = tables
        return tables

    def rates_for_levels(self, grid, level_idx: np.ndarray, type_idx) -> np.ndarray:
        """Per-CP rates for a batch of allocations given as grid level indices.

        ``level_idx`` is [A x C]; ``type_idx`` holds one type-grid index per
        CP selecting the demand that weights its rate sum. Returns [A x C].
        """
        tables = self.level_tables(grid)
        level_idx = np.atleast_2d(np.asarray(level_idx, dtype=np.intp))
        A = level_idx.shape[0]
        load = np.zeros((A, self.user_count))
        for k in range(self.cp_count):
            load += tables.pop_mass[k, level_idx[:, k]][:, None] * self.sub_mask[k][None, :]
        access, capped = self._env_from_load(load)
        rates = np.zeros((A, self.cp_count))
        for k in range(self.cp_count):
            t = int(type_idx[k])
            cached = tables.req_cached[k, t][:, level_idx[:, k]].T    # [A, U]
            total = tables.req_total[k, t][None, :]
            rates[:, k] = np.sum(cached * access + (total - cached) * capped, axis=1)
        return rates

    def welfare_terms_for_levels(self, grid, level_idx: np.ndarray, declared_types) -> np.ndarray:
        """Per-CP welfare terms rate_scale * r_k - cost(theta_k), batched [A x C]."""
        type_idx = [self.type_index(t) for t in declared_types]
        rates = self.rates_for_levels(grid, level_idx, type_idx)
        costs = np.array([storage_cost(float(t)) for t in declared_types])
        return self.rate_scale * rates - costs[None, :]

    def welfare_terms_for_rho(self, rho, declared_types, participants=None) -> np.ndarray:
        """Per-CP welfare terms at an arbitrary allocation; non-participants
        contribute zero and must hold no storage."""
        active = _participant_mask(self.cp_count, participants)
        rho = np.asarray(rho, dtype=float)
        if np.any(rho[~active] != 0.0):
            raise ValueError("non-participants must hold no storage")
        rates = self.rates_for_rho(rho, self.true_types_if_none(declared_types))
        terms = np.zeros(self.cp_count)
        for k in range(self.cp_count):
            if active[k]:
                terms[k] = self.rate_scale * rates[k] - storage_cost(float(declared_types[k]))
        return terms

    def true_types_if_none(self, declared_types):
        return self.true_types if declared_types is None else list(declared_types)

    # ------------------------------------------------------------------
    # structure checks
    # ------------------------------------------------------------------

    def cp_blocks(self) -> list[np.ndarray] | None:
        """User index blocks per CP when each user has a single subscription."""
        blocks = []
        for k in range(self.cp_count):
            members = np.flatnonzero(self.sub_mask[k])
            if len(members) == 0:
                return None
            blocks.append(members)
        counts = self.sub_mask.sum(axis=0)
        if np.any(counts != 1):
            return None
        return blocks

    def is_cp_symmetric(self) -> bool:
        """True when CPs are exchangeable up to their type values.

        Requires equal user counts per CP, identical catalogs, and user
        blocks whose serving pattern, channel gains, and bandwidths repeat
        identically across CPs.
        """
        blocks = self.cp_blocks()
        if blocks is None or self.cp_count < 2:
            return False
        sizes = {len(b) for b in blocks}
        if len(sizes) != 1:
            return False
        base = self.catalogs[0]
        for cat in self.catalogs[1:]:
            if not (np.array_equal(base.sizes, cat.sizes)
                    and np.array_equal(base.popularity, cat.popularity)):
                return False
        ref = blocks[0]
        for block in blocks[1:]:
            if not np.array_equal(self.serving[block], self.serving[ref]):
                return False
            if not np.array_equal(self.gain[:, block], self.gain[:, ref]):
                return False
            if not np.array_equal(self.bandwidth[block], self.bandwidth[ref]):
                return False
        return True


def _participant_mask(cp_count: int, participants) -> np.ndarray:
    if participants is None:
        return np.ones(cp_count, dtype=bool)
    mask = np.zeros(cp_count, dtype=bool)
    for k in participants:
        if not 0 <= k < cp_count:
            raise ValueError(f"participant index {k} out of range")
        mask[k] = True
    return mask
