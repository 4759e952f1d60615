"""Snapshot rate model for a two-tier small-cell network.

Macro base stations (MBSs) feed small base stations (SBSs) over backhaul
links; SBSs serve users over access links. All rates are Shannon rates with
base-2 logarithms, in bit/s. The time average of the underlying link model
is collapsed to a deterministic snapshot, so every function here is a pure
function of its explicit arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_LN2 = float(np.log(2.0))


def shannon_rate(bandwidth_hz: float, signal_w: float, noise_plus_interference_w: float) -> float:
    """Base-2 Shannon rate w * log2(1 + S / (N + I)) in bit/s."""
    if noise_plus_interference_w <= 0.0:
        raise ValueError("noise plus interference must be positive")
    return bandwidth_hz * np.log1p(signal_w / noise_plus_interference_w) / _LN2


@dataclass(frozen=True)
class UserRecord:
    """One subscriber terminal, attached to exactly one SBS.

    ``request_profile`` maps a CP index to an integer request count per file
    of that CP's catalog. A user with at least one request for a CP must be
    subscribed to that CP.
    """

    user_id: int
    serving_sbs: int
    subscriptions: frozenset[int] = field(default_factory=frozenset)
    request_profile: dict[int, np.ndarray] = field(default_factory=dict)

    def violations(self) -> list[str]:
        problems = []
        for cp, counts in self.request_profile.items():
            counts = np.asarray(counts)
            if not np.issubdtype(counts.dtype, np.integer):
                problems.append(f"user {self.user_id}: request counts for cp {cp} must be integers")
            elif np.any(counts < 0):
                problems.append(f"user {self.user_id}: negative request count for cp {cp}")
            if np.any(np.asarray(counts) > 0) and cp not in self.subscriptions:
                problems.append(
                    f"user {self.user_id}: requests files of cp {cp} without a subscription"
                )
        return problems

    def requests_for(self, cp: int) -> np.ndarray | None:
        return self.request_profile.get(cp)


@dataclass(frozen=True)
class NetworkTopology:
    """Static description of the two-tier network for one snapshot.

    Shapes: ``channel_gain_sbs`` and ``bandwidth_sbs`` are [sbs x user];
    ``channel_gain_mbs_sbs``, ``channel_gain_cross_mbs``, ``bandwidth_mbs``
    and ``mbs_power`` are [mbs x sbs]. Gains are dimensionless linear power
    gains, bandwidths in Hz, powers in W, storage in bits.
    """

    mbs_count: int
    sbs_count: int
    users: tuple[UserRecord, ...]
    channel_gain_sbs: np.ndarray
    channel_gain_mbs_sbs: np.ndarray
    channel_gain_cross_mbs: np.ndarray
    bandwidth_sbs: np.ndarray
    bandwidth_mbs: np.ndarray
    noise_power: float
    sbs_power_budget: float
    mbs_power: np.ndarray
    sbs_storage_capacity: float
    sbs_to_mbs: np.ndarray

    @property
    def user_count(self) -> int:
        return len(self.users)

    def serving_index(self) -> np.ndarray:
        return np.array([u.serving_sbs for u in self.users], dtype=np.intp)

    def violations(self) -> list[str]:
        problems = []
        s, u, m = self.sbs_count, len(self.users), self.mbs_count
        if s < 1:
            problems.append("sbs_count must be >= 1")
        if m < 1:
            problems.append("mbs_count must be >= 1")

        def check_shape(name, arr, shape):
            if np.asarray(arr).shape != shape:
                problems.append(f"{name} must have shape {shape}, got {np.asarray(arr).shape}")
                return False
            return True

        if check_shape("channel_gain_sbs", self.channel_gain_sbs, (s, u)):
            if np.any(self.channel_gain_sbs < 0):
                problems.append("channel_gain_sbs entries must be nonnegative")
        if check_shape("channel_gain_mbs_sbs", self.channel_gain_mbs_sbs, (m, s)):
            if np.any(self.channel_gain_mbs_sbs < 0):
                problems.append("channel_gain_mbs_sbs entries must be nonnegative")
        if check_shape("channel_gain_cross_mbs", self.channel_gain_cross_mbs, (m, s)):
            if np.any(self.channel_gain_cross_mbs < 0):
                problems.append("channel_gain_cross_mbs entries must be nonnegative")
        if check_shape("bandwidth_sbs", self.bandwidth_sbs, (s, u)):
            if np.any(self.bandwidth_sbs <= 0):
                problems.append("bandwidth_sbs entries must be positive")
        if check_shape("bandwidth_mbs", self.bandwidth_mbs, (m, s)):
            if np.any(self.bandwidth_mbs <= 0):
                problems.append("bandwidth_mbs entries must be positive")
        if check_shape("mbs_power", self.mbs_power, (m, s)):
            if np.any(self.mbs_power < 0):
                problems.append("mbs_power entries must be nonnegative")
        if not self.noise_power > 0:
            problems.append("noise_power must be positive")
        if not self.sbs_power_budget > 0:
            problems.append("sbs_power_budget must be positive")
        if not self.sbs_storage_capacity > 0:
            problems.append("sbs_storage_capacity must be positive")
        if check_shape("sbs_to_mbs", self.sbs_to_mbs, (s,)):
            if np.any((self.sbs_to_mbs < 0) | (self.sbs_to_mbs >= m)):
                problems.append("sbs_to_mbs entries must be valid MBS indices")
        for rec in self.users:
            if not 0 <= rec.serving_sbs < s:
                problems.append(f"user {rec.user_id}: serving_sbs {rec.serving_sbs} out of range")
            problems.extend(rec.violations())
        return problems

    def validate(self) -> None:
        problems = self.violations()
        if problems:
            raise ValueError("invalid topology: " + "; ".join(problems))


def power_matrix_from_loads(topology: NetworkTopology, loads: np.ndarray) -> np.ndarray:
    """Split each SBS power budget across its users proportionally to load.

    ``loads`` holds one nonnegative traffic weight per user. Returns the full
    [sbs x user] power map used by the rate functions: the entry for a user's
    serving SBS is that user's share of the SBS budget, and every other entry
    is the total power radiated by that SBS (what a non-served user
    overhears). An SBS with zero total load radiates nothing.
    """
    loads = np.asarray(loads, dtype=float)
    if loads.shape != (topology.user_count,):
        raise ValueError("loads must have one entry per user")
    if np.any(loads < 0):
        raise ValueError("loads must be nonnegative")
    serving = topology.serving_index()
    totals = np.zeros(topology.sbs_count)
    np.add.at(totals, serving, loads)
    budget = topology.sbs_power_budget
    radiated = np.where(totals > 0.0, budget, 0.0)
    matrix = np.tile(radiated[:, None], (1, topology.user_count))
    with np.errstate(invalid="ignore"):
        shares = np.where(totals[serving] > 0.0, budget * loads / totals[serving], 0.0)
    matrix[serving, np.arange(topology.user_count)] = shares
    return matrix


def interference_at_user(topology: NetworkTopology, user: int, powers: np.ndarray) -> float:
    """Aggregate interference (W) at a user from every non-serving SBS."""
    powers = np.asarray(powers, dtype=float)
    if powers.shape != (topology.sbs_count, topology.user_count):
        raise ValueError("powers must be an [sbs x user] map")
    if np.any(powers < 0):
        raise ValueError("powers must be nonnegative")
    serving = topology.users[user].serving_sbs
    gains = topology.channel_gain_sbs[:, user]
    total = float(np.dot(powers[:, user], gains))
    return total - float(powers[serving, user] * gains[serving])


def sbs_user_rate(
    topology: NetworkTopology,
    sbs: int,
    user: int,
    powers: np.ndarray,
    interference: float,
) -> float:
    """Access-link rate (bit/s) from an SBS to one of its users."""
    if topology.users[user].serving_sbs != sbs:
        raise ValueError(f"user {user} is not associated with SBS {sbs}")
    if interference < 0:
        raise ValueError("interference must be nonnegative")
    p = float(np.asarray(powers)[sbs, user])
    if p < 0:
        raise ValueError("transmit power must be nonnegative")
    signal = p * topology.channel_gain_sbs[sbs, user]
    return float(
        shannon_rate(topology.bandwidth_sbs[sbs, user], signal, topology.noise_power + interference)
    )


def backhaul_rate(topology: NetworkTopology, mbs: int, sbs: int) -> float:
    """Backhaul rate (bit/s) from an MBS to an attached SBS.

    Cross-tier interference comes from every other MBS transmitting toward
    the same SBS, through the cross-MBS gain matrix.
    """
    if topology.sbs_to_mbs[sbs] != mbs:
        raise ValueError(f"SBS {sbs} is not attached to MBS {mbs}")
    cross = 0.0
    for other in range(topology.mbs_count):
        if other != mbs:
            cross += topology.mbs_power[other, sbs] * topology.channel_gain_cross_mbs[other, sbs]
    signal = topology.mbs_power[mbs, sbs] * topology.channel_gain_mbs_sbs[mbs, sbs]
    return float(
        shannon_rate(topology.bandwidth_mbs[mbs, sbs], signal, topology.noise_power + cross)
    )


def effective_user_rate(
    topology: NetworkTopology,
    user: int,
    file: int,
    cp: int,
    placement,
    powers: np.ndarray,
    interference: float,
) -> float:
    """Rate (bit/s) at which a user obtains one file of one CP.

    A cached file is served straight from the SBS at the access-link rate.
    An uncached file must transit the backhaul first, so its rate is the
    minimum of the access-link and backhaul rates.
    """
    if placement.cp != cp:
        raise ValueError(f"placement belongs to cp {placement.cp}, not cp {cp}")
    if not 0 <= file < placement.file_count:
        raise ValueError(f"file {file} is not in the catalog of cp {cp}")
    sbs = topology.users[user].serving_sbs
    access = sbs_user_rate(topology, sbs, user, powers, interference)
    if placement.beta[sbs, file]:
        return access
    mbs = int(topology.sbs_to_mbs[sbs])
    return min(access, backhaul_rate(topology, mbs, sbs))


def cp_total_rate(
    topology: NetworkTopology,
    cp: int,
    placement,
    powers: np.ndarray,
    requests: dict[int, np.ndarray] | None = None,
) -> float:
    """Request-weighted total rate (bit/s) over all of a CP's subscribers.

    Each (user, file) term is the effective rate for that file multiplied by
    the user's request count. ``requests`` may override the per-user request
    profiles stored on the topology (keyed by user_id); otherwise the stored
    profiles are used.
    """
    total = 0.0
    for idx, rec in enumerate(topology.users):
        if cp not in rec.subscriptions:
            continue
        counts = requests.get(rec.user_id) if requests is not None else rec.requests_for(cp)
        if counts is None:
            continue
        counts = np.asarray(counts)
        if not counts.any():
            continue
        interference = interference_at_user(topology, idx, powers)
        for f in np.flatnonzero(counts):
            total += counts[f] * effective_user_rate(
                topology, idx, int(f), cp, placement, powers, interference
            )
    return total
