"""Storage allocation solvers: exhaustive oracle and deferred-acceptance matching.

The welfare-maximizing storage split (the NP-hard step of contract design)
is solved two ways: a brute-force enumeration over a discrete storage grid,
used as the exact oracle on small instances, and a swap-based
deferred-acceptance procedure in which CPs propose storage requests, the
MNO accepts the welfare-maximizing feasible subset, and rejected CPs shrink
their requests one grid step at a time until the outcome is swap-stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BRUTE_FORCE_GUARD = 10_000_000
EXACT_SUBSET_LIMIT = 20


class InstanceTooLargeError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed the guard."""


@dataclass(frozen=True)
class StorageGrid:
    """Admissible storage levels {0, step, 2*step, ...} up to capacity."""

    step: float
    levels: tuple[float, ...]

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if not self.levels or self.levels[0] != 0.0:
            raise ValueError("grid levels must start at 0")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("grid levels must be strictly ascending")

    @classmethod
    def from_capacity(cls, capacity: float, step: float) -> "StorageGrid":
        if not capacity > 0:
            raise ValueError("capacity must be positive")
        if not 0 < step <= capacity:
            raise ValueError("step must be in (0, capacity]")
        count = int(np.floor(capacity / step + 1e-12))
        return cls(step=float(step), levels=tuple(float(i * step) for i in range(count + 1)))

    @classmethod
    def from_scenario(cls, scenario, step: float | None = None) -> "StorageGrid":
        step = scenario.config.effective_grid_step if step is None else step
        return cls.from_capacity(scenario.capacity, step)

    def __len__(self) -> int:
        return len(self.levels)


@dataclass
class AllocationOutcome:
    """A solved storage split with its recomputed welfare."""

    rho: np.ndarray
    welfare: float
    rounds: int
    method: str
    converged: bool = True

    def violations(self, capacity: float) -> list[str]:
        problems = []
        if np.any(self.rho < 0):
            problems.append("allocations must be nonnegative")
        if float(self.rho.sum()) > capacity * (1 + 1e-12):
            problems.append("total allocation exceeds capacity")
        return problems


def _active_mask(scenario, participants) -> np.ndarray:
    if participants is None:
        return np.ones(scenario.cp_count, dtype=bool)
    mask = np.zeros(scenario.cp_count, dtype=bool)
    for k in participants:
        mask[int(k)] = True
    return mask


def _welfare_for_level_batch(scenario, grid, level_idx, declared_types, active) -> np.ndarray:
    terms = scenario.welfare_terms_for_levels(grid, level_idx, declared_types)
    return terms[:, active].sum(axis=1)


def _recomputed_welfare(scenario, grid, level_idx_row, declared_types, active) -> float:
    rho = np.asarray(grid.levels, dtype=float)[level_idx_row]
    rho = np.where(active, rho, 0.0)
    participants = [k for k in range(scenario.cp_count) if active[k]]
    terms = scenario.welfare_terms_for_rho(rho, declared_types, participants)
    return float(terms.sum())


def brute_force_allocation(scenario, declared_types, grid: StorageGrid,
                           participants=None) -> AllocationOutcome:
    """Enumerate every feasible grid allocation and return the welfare-maximal one.

    Ties are broken toward the lexicographically smallest allocation vector.
    Non-participants are pinned to zero storage and excluded from the
    welfare sum. Raises ``InstanceTooLargeError`` above the enumeration guard.
    """
    active = _active_mask(scenario, participants)
    active_idx = np.flatnonzero(active)
    levels = np.asarray(grid.levels, dtype=float)
    L, n = len(levels), len(active_idx)
    C = scenario.cp_count

    if n == 0:
        rho_idx = np.zeros(C, dtype=np.intp)
        welfare = _recomputed_welfare(scenario, grid, rho_idx, declared_types, active)
        return AllocationOutcome(rho=np.zeros(C), welfare=welfare, rounds=0, method="brute_force")

    total = L ** n
    if total > BRUTE_FORCE_GUARD:
        raise InstanceTooLargeError(
            f"{L} levels over {n} CPs gives {total} allocations (guard {BRUTE_FORCE_GUARD})"
        )

    capacity = scenario.capacity
    best_welfare = -np.inf
    best_idx = None
    chunk = 65536
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        combo = np.stack(np.unravel_index(flat, (L,) * n), axis=1).astype(np.intp)
        feasible = levels[combo].sum(axis=1) <= capacity
        if not feasible.any():
            continue
        combo = combo[feasible]
        level_idx = np.zeros((len(combo), C), dtype=np.intp)
        level_idx[:, active_idx] = combo
        welfare = _welfare_for_level_batch(scenario, grid, level_idx, declared_types, active)
        pos = int(np.argmax(welfare))
        # flat order is lexicographic, so the first maximum is the lex-smallest.
        if welfare[pos] > best_welfare:
            best_welfare = float(welfare[pos])
            best_idx = level_idx[pos].copy()

    welfare = _recomputed_welfare(scenario, grid, best_idx, declared_types, active)
    rho = np.where(active, levels[best_idx], 0.0)
    return AllocationOutcome(rho=rho, welfare=welfare, rounds=0, method="brute_force")


def standalone_request(scenario, cp: int, others_allocation, declared_types,
                       grid: StorageGrid) -> float:
    """Grid level maximizing one CP's welfare term with the others held fixed.

    Ties break toward the smaller level.
    """
    idx = _standalone_index(scenario, cp, np.asarray(others_allocation, dtype=float),
                            declared_types, grid)
    return float(grid.levels[idx])


def _standalone_index(scenario, cp: int, others_rho: np.ndarray, declared_types,
                      grid: StorageGrid) -> int:
    levels = np.asarray(grid.levels, dtype=float)
    best_idx, best_term = 0, -np.inf
    for i, level in enumerate(levels):
        rho = others_rho.copy()
        rho[cp] = level
        rates = scenario.rates_for_rho(rho, list(declared_types))
        term = scenario.rate_scale * rates[cp]
        if term > best_term + 0.0:
            best_term, best_idx = float(term), i
    return best_idx


def _best_subset(scenario, grid, proposal_idx, declared_types, active) -> tuple[np.ndarray, float]:
    """Welfare-maximizing feasible subset of the current proposals.

    Exact enumeration up to ``EXACT_SUBSET_LIMIT`` proposers, greedy by
    welfare-per-bit beyond that. Returns (accept mask over CPs, welfare).
    """
    levels = np.asarray(grid.levels, dtype=float)
    proposers = [k for k in np.flatnonzero(active) if proposal_idx[k] > 0]
    C = scenario.cp_count
    if len(proposers) <= EXACT_SUBSET_LIMIT:
        count = 1 << len(proposers)
        rows = np.zeros((count, C), dtype=np.intp)
        for bit, k in enumerate(proposers):
            members = (np.arange(count) >> bit) & 1
            rows[members == 1, k] = proposal_idx[k]
        feasible = levels[rows].sum(axis=1) <= scenario.capacity
        rows = rows[feasible]
        welfare = _welfare_for_level_batch(scenario, grid, rows, declared_types, active)
        pos = int(np.argmax(welfare))
        accept = np.zeros(C, dtype=bool)
        accept[rows[pos] > 0] = True
        return accept, float(welfare[pos])

    # Greedy fallback for very wide instances.
    accept = np.zeros(C, dtype=bool)
    current = np.zeros(C, dtype=np.intp)
    current_welfare = _welfare_for_level_batch(
        scenario, grid, current[None, :], declared_types, active)[0]
    order = sorted(proposers, key=lambda k: -1.0 / max(levels[proposal_idx[k]], 1e-300))
    remaining = scenario.capacity
    for k in order:
        size = levels[proposal_idx[k]]
        if size > remaining:
            continue
        trial = current.copy()
        trial[k] = proposal_idx[k]
        welfare = _welfare_for_level_batch(
            scenario, grid, trial[None, :], declared_types, active)[0]
        if welfare > current_welfare:
            current, current_welfare = trial, welfare
            accept[k] = True
            remaining -= size
    return accept, float(current_welfare)


def _improving_swap(scenario, grid, proposal_idx, accept, declared_types, active):
    """One accepted/rejected proposal exchange that raises welfare, if any."""
    levels = np.asarray(grid.levels, dtype=float)
    current = np.where(accept, proposal_idx, 0)
    base = _welfare_for_level_batch(scenario, grid, current[None, :], declared_types, active)[0]
    accepted = [k for k in np.flatnonzero(accept)]
    rejected = [k for k in np.flatnonzero(active) if not accept[k] and proposal_idx[k] > 0]
    for a in accepted:
        for r in rejected:
            trial = current.copy()
            trial[a] = 0
            trial[r] = proposal_idx[r]
            if levels[trial].sum() > scenario.capacity:
                continue
            welfare = _welfare_for_level_batch(
                scenario, grid, trial[None, :], declared_types, active)[0]
            if welfare > base + abs(base) * 1e-12 + 1e-12:
                return a, r
    return None


def _preferred_level_move(scenario, grid, allocation_idx, declared_types, active):
    """A single-CP re-proposal that the CP prefers and the MNO welcomes.

    The outcome is only stable once no CP prefers a different feasible
    storage level that also raises social welfare; this probes every
    (CP, level) move against the current allocation and returns the
    welfare-best one, or None.
    """
    levels = np.asarray(grid.levels, dtype=float)
    base_terms = scenario.welfare_terms_for_levels(
        grid, allocation_idx[None, :], declared_types)[0]
    base = float(base_terms[active].sum())
    candidates = []
    own_before = []
    for k in np.flatnonzero(active):
        for idx in range(len(levels)):
            if idx == allocation_idx[k]:
                continue
            trial = allocation_idx.copy()
            trial[k] = idx
            if levels[trial].sum() > scenario.capacity:
                continue
            candidates.append((k, idx, trial))
            own_before.append(base_terms[k])
    if not candidates:
        return None
    rows = np.stack([trial for _, _, trial in candidates])
    terms = scenario.welfare_terms_for_levels(grid, rows, declared_types)
    welfare = terms[:, active].sum(axis=1)
    tol = abs(base) * 1e-12 + 1e-12
    best = None
    for pos, (k, idx, _) in enumerate(candidates):
        if welfare[pos] <= base + tol:
            continue
        if terms[pos, k] <= own_before[pos] + tol:
            continue
        if best is None or welfare[pos] > welfare[best]:
            best = pos
    if best is None:
        return None
    k, idx, _ = candidates[best]
    return k, idx


def swap_deferred_acceptance(scenario, declared_types, grid: StorageGrid,
                             max_rounds: int | None = None,
                             participants=None) -> AllocationOutcome:
    """Deferred-acceptance storage matching with swap-stability.

    Each round every unallocated or rejected CP proposes the storage level
    that maximizes its own welfare term given the current allocation of the
    others, shrunk by one grid level per rejection it has absorbed; the MNO
    then accepts the feasible subset of proposals that maximizes social
    welfare and rejects the rest. The procedure stops when proposals and the
    accepted set are stable, no accepted/rejected pair exchange improves
    welfare, and no CP prefers a different feasible level that would also
    raise welfare; non-convergence within ``max_rounds`` returns the last
    iterate flagged unconverged.
    """
    if max_rounds is None:
        max_rounds = len(grid) * scenario.cp_count + scenario.cp_count ** 2
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    active = _active_mask(scenario, participants)
    levels = np.asarray(grid.levels, dtype=float)
    C = scenario.cp_count

    rejections = np.zeros(C, dtype=int)
    proposal_idx = np.zeros(C, dtype=np.intp)
    accept = np.zeros(C, dtype=bool)
    prev = None
    converged = False
    rounds = 0

    while rounds < max_rounds:
        rounds += 1
        current_rho = np.where(accept, levels[proposal_idx], 0.0)
        for k in np.flatnonzero(active):
            if accept[k]:
                continue
            wanted = _standalone_index(scenario, k, current_rho, declared_types, grid)
            proposal_idx[k] = max(wanted - rejections[k], 0)
        accept, _ = _best_subset(scenario, grid, proposal_idx, declared_types, active)
        accept |= active & (proposal_idx == 0)

        state = (tuple(proposal_idx), tuple(accept))
        if state == prev:
            swap = _improving_swap(scenario, grid, proposal_idx, accept, declared_types, active)
            if swap is not None:
                out_cp, in_cp = swap
                accept[out_cp] = False
                accept[in_cp] = True
                rejections[out_cp] += 1
                prev = (tuple(proposal_idx), tuple(accept))
                continue
            allocation_idx = np.where(accept & active, proposal_idx, 0).astype(np.intp)
            move = _preferred_level_move(scenario, grid, allocation_idx, declared_types, active)
            if move is None:
                converged = True
                break
            move_cp, move_idx = move
            proposal_idx[move_cp] = move_idx
            accept[move_cp] = True
        else:
            rejected = active & ~accept & (proposal_idx > 0)
            rejections[rejected] += 1
        prev = (tuple(proposal_idx), tuple(accept))

    final_idx = np.where(accept & active, proposal_idx, 0).astype(np.intp)
    rho = levels[final_idx] * active
    participants_list = [k for k in range(C) if active[k]]
    welfare = float(
        scenario.welfare_terms_for_rho(rho, declared_types, participants_list).sum()
    )
    return AllocationOutcome(rho=rho, welfare=welfare, rounds=rounds,
                             method="matching", converged=converged)
