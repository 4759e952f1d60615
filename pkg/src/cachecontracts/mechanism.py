"""Contract design and feasibility verification.

The MNO solves the welfare-maximizing storage split for the declared types,
then charges each CP the externality its presence imposes on the others:
the price is the others' best achievable welfare without the CP minus the
welfare they actually obtain with it present. Verifiers check individual
rationality, incentive compatibility, weak budget balance, and price
monotonicity against exhaustive sweeps of counterfactual declarations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .allocation import (
    AllocationOutcome,
    StorageGrid,
    brute_force_allocation,
    swap_deferred_acceptance,
)
from .scenario import Scenario, storage_cost

__all__ = [
    "storage_cost",
    "CPTypeVector",
    "ContractBundle",
    "WelfareReport",
    "DesignResult",
    "MechanismSolver",
    "social_welfare",
    "vcg_price",
    "design_contracts",
    "verify_ir",
    "verify_ic",
    "verify_budget_balance",
    "verify_price_monotonicity",
]

REL_TOL = 1e-9       # arithmetic identities
OPT_TOL = 1e-6       # optimizer-dependent comparisons

BRUTE_FORCE = "brute_force"
MATCHING = "matching"


def _close_enough(margin: float, scale: float = 1.0) -> bool:
    return margin >= -max(REL_TOL, REL_TOL * abs(scale))


@dataclass(frozen=True)
class CPTypeVector:
    """True and declared traffic types over a discrete ascending type grid."""

    true_types: tuple[float, ...]
    declared_types: tuple[float, ...]
    type_grid: tuple[float, ...]

    def __post_init__(self):
        problems = []
        grid = self.type_grid
        if any(b <= a for a, b in zip(grid, grid[1:])):
            problems.append("type_grid must be strictly ascending")
        if len(grid) > len(self.true_types):
            problems.append("type grid has more types than CPs")
        if len(self.declared_types) != len(self.true_types):
            problems.append("declared_types must match true_types in length")
        for theta in self.declared_types:
            if theta not in grid:
                problems.append(f"declared type {theta} is not on the grid")
        if any(t < 0 for t in self.true_types):
            problems.append("true types must be nonnegative")
        if problems:
            raise ValueError("invalid type vector: " + "; ".join(problems))


@dataclass(frozen=True)
class ContractBundle:
    """Price charged and storage granted to one CP."""

    cp: int
    price: float
    storage: float


@dataclass(frozen=True)
class WelfareReport:
    """Per-CP economics for one allocation outcome, with exact identities."""

    rates: np.ndarray
    costs: np.ndarray
    prices: np.ndarray
    utilities: np.ndarray
    mno_utility: float
    social_welfare: float

    @classmethod
    def build(cls, rates, costs, prices) -> "WelfareReport":
        rates = np.asarray(rates, dtype=float)
        costs = np.asarray(costs, dtype=float)
        prices = np.asarray(prices, dtype=float)
        return cls(
            rates=rates,
            costs=costs,
            prices=prices,
            utilities=rates - prices,
            mno_utility=float((prices - costs).sum()),
            social_welfare=float((rates - costs).sum()),
        )


def social_welfare(scenario: Scenario, allocation, declared_types, participants=None) -> float:
    """Total welfare sum(rate value - storage cost) over the participants.

    Rates are evaluated in the environment generated by the participants'
    cached content alone: non-participants must hold no storage, so they
    add neither load nor interference. An infeasible allocation is an error.
    """
    rho = np.asarray(allocation, dtype=float)
    if rho.shape != (scenario.cp_count,):
        raise ValueError("allocation must have one entry per CP")
    if np.any(rho < 0):
        raise ValueError("infeasible allocation: negative storage")
    if float(rho.sum()) > scenario.capacity * (1 + 1e-12):
        raise ValueError("infeasible allocation: total storage exceeds capacity")
    terms = scenario.welfare_terms_for_rho(rho, list(declared_types), participants)
    return float(terms.sum())


def vcg_price(scenario: Scenario, cp: int, declared_types, optimal_allocation_with,
              optimal_welfare_without: float) -> float:
    """Externality price: others' best welfare without the CP minus their
    welfare at the full optimum with the CP present."""
    rho = np.asarray(optimal_allocation_with, dtype=float)
    if rho.shape != (scenario.cp_count,):
        raise ValueError("optimal allocation must have one entry per CP")
    if not 0 <= cp < scenario.cp_count:
        raise ValueError(f"cp index {cp} out of range")
    terms = scenario.welfare_terms_for_rho(rho, list(declared_types), None)
    others_with = float(terms.sum() - terms[cp])
    return float(optimal_welfare_without) - others_with


class MechanismSolver:
    """Caches allocation solves keyed by participants and declared types.

    Verification sweeps revisit the same declaration profiles many times;
    the cache makes exhaustive sweeps affordable.
    """

    def __init__(self, scenario: Scenario, grid: StorageGrid | None = None,
                 method: str = BRUTE_FORCE):
        if method not in (BRUTE_FORCE, MATCHING):
            raise ValueError(f"unknown method {method!r}")
        self.scenario = scenario
        self.grid = grid if grid is not None else StorageGrid.from_scenario(scenario)
        self.method = method
        self._cache: dict = {}

    def solve(self, declared_types, participants=None) -> AllocationOutcome:
        declared = tuple(float(t) for t in declared_types)
        if participants is None:
            participants = tuple(range(self.scenario.cp_count))
        participants = tuple(sorted(int(k) for k in participants))
        key = (participants, tuple(declared[k] for k in participants))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.method == BRUTE_FORCE:
            outcome = brute_force_allocation(self.scenario, declared, self.grid, participants)
        else:
            outcome = swap_deferred_acceptance(self.scenario, declared, self.grid,
                                               participants=participants)
        self._cache[key] = outcome
        return outcome


@dataclass
class DesignResult:
    """Contracts plus the allocation and welfare bookkeeping behind them."""

    declared_types: tuple[float, ...]
    bundles: list[ContractBundle]
    report: WelfareReport
    outcome: AllocationOutcome
    welfare_without: np.ndarray
    method: str

    @property
    def rho(self) -> np.ndarray:
        return self.outcome.rho

    @property
    def prices(self) -> np.ndarray:
        return self.report.prices


def design_contracts(scenario: Scenario, declared_types, grid: StorageGrid | None = None,
                     method: str = BRUTE_FORCE,
                     solver: MechanismSolver | None = None) -> DesignResult:
    """Design one contract bundle per CP for a declared type profile.

    Solves the welfare-maximizing storage split over the grid, then prices
    each CP at its externality. The ``without`` optimizations use the same
    solver method as the main solve.
    """
    declared = tuple(float(t) for t in declared_types)
    CPTypeVector(true_types=tuple(scenario.true_types), declared_types=declared,
                 type_grid=tuple(scenario.type_grid))
    if solver is None:
        solver = MechanismSolver(scenario, grid, method)
    outcome = solver.solve(declared)

    cp_count = scenario.cp_count
    welfare_without = np.zeros(cp_count)
    prices = np.zeros(cp_count)
    for k in range(cp_count):
        others = [j for j in range(cp_count) if j != k]
        welfare_without[k] = solver.solve(declared, others).welfare
        prices[k] = vcg_price(scenario, k, declared, outcome.rho, welfare_without[k])

    rates = scenario.rate_scale * scenario.rates_for_rho(outcome.rho, declared)
    costs = np.array([storage_cost(t) for t in declared])
    report = WelfareReport.build(rates, costs, prices)
    bundles = [ContractBundle(cp=k, price=float(prices[k]), storage=float(outcome.rho[k]))
               for k in range(cp_count)]
    total = float(outcome.rho.sum())
    if total > scenario.capacity * (1 + 1e-12):
        raise ValueError("designed allocation exceeds storage capacity")
    return DesignResult(declared_types=declared, bundles=bundles, report=report,
                        outcome=outcome, welfare_without=welfare_without,
                        method=solver.method)


def misreport_utility(scenario: Scenario, cp: int, design: DesignResult) -> float:
    """Utility a CP realizes under a (possibly misreported) design.

    The allocation and price come from the declared profile; the CP's own
    rate is weighted by the demand of its true type.
    """
    vtypes = list(design.declared_types)
    vtypes[cp] = float(scenario.true_types[cp])
    rate = scenario.rates_for_rho(design.rho, vtypes)[cp]
    return float(scenario.rate_scale * rate - design.prices[cp])


def _others_profiles(scenario: Scenario, cp: int, others_profiles, limit: int = 729):
    """Declared-type profiles for everyone but ``cp``; exhaustive when small."""
    if others_profiles is not None:
        return [tuple(p) for p in others_profiles]
    others = [j for j in range(scenario.cp_count) if j != cp]
    grid = [float(t) for t in scenario.type_grid]
    total = len(grid) ** len(others)
    if total <= limit:
        return [tuple(p) for p in itertools.product(grid, repeat=len(others))]
    rng = np.random.default_rng(np.random.SeedSequence([scenario.config.seed, 0x1C]))
    picks = rng.integers(0, len(grid), size=(64, len(others)))
    return [tuple(grid[i] for i in row) for row in picks]


def _profile_with(scenario: Scenario, cp: int, own: float, others: tuple) -> tuple:
    declared = []
    pos = 0
    for j in range(scenario.cp_count):
        if j == cp:
            declared.append(float(own))
        else:
            declared.append(float(others[pos]))
            pos += 1
    return tuple(declared)


@dataclass(frozen=True)
class IRResult:
    passed: np.ndarray          # per CP
    margins: np.ndarray         # per CP, worst-case utility
    profile_count: int

    @property
    def all_passed(self) -> bool:
        return bool(self.passed.all())


def verify_ir(scenario: Scenario, solver: MechanismSolver | None = None,
              others_profiles=None) -> IRResult:
    """Ex-post individual rationality under truthful play.

    For every CP and every counterfactual declaration profile of the other
    CPs, the truthful CP's utility must be nonnegative (within tolerance).
    """
    if solver is None:
        solver = MechanismSolver(scenario)
    cp_count = scenario.cp_count
    margins = np.full(cp_count, np.inf)
    count = 0
    for k in range(cp_count):
        profiles = _others_profiles(scenario, k, others_profiles)
        count = len(profiles)
        for prof in profiles:
            declared = _profile_with(scenario, k, scenario.true_types[k], prof)
            design = design_contracts(scenario, declared, solver=solver)
            margins[k] = min(margins[k], misreport_utility(scenario, k, design))
    passed = np.array([_close_enough(m) for m in margins])
    return IRResult(passed=passed, margins=margins, profile_count=count)


@dataclass(frozen=True)
class ICResult:
    table: list                 # rows: dict per (others profile, declaration)
    worst_gain: float           # max utility improvement from any misreport
    passed: bool


def verify_ic(scenario: Scenario, cp: int, solver: MechanismSolver | None = None,
              others_profiles=None, tolerance: float = REL_TOL) -> ICResult:
    """Sweep every unilateral misreport of one CP over the type grid.

    For each counterfactual profile of the others, truth-telling must be a
    best declaration within tolerance. Returns the full sweep table.
    """
    if solver is None:
        solver = MechanismSolver(scenario)
    true_own = float(scenario.true_types[cp])
    rows = []
    worst = -np.inf
    for prof in _others_profiles(scenario, cp, others_profiles):
        utilities = {}
        for declared_own in scenario.type_grid:
            declared = _profile_with(scenario, cp, declared_own, prof)
            design = design_contracts(scenario, declared, solver=solver)
            utilities[float(declared_own)] = misreport_utility(scenario, cp, design)
        truthful = utilities[true_own]
        for declared_own, utility in utilities.items():
            rows.append({
                "cp": cp,
                "true_type": true_own,
                "declared_type": declared_own,
                "others": prof,
                "utility": utility,
                "truthful": declared_own == true_own,
            })
            worst = max(worst, utility - truthful)
    scale = max(abs(r["utility"]) for r in rows) if rows else 1.0
    return ICResult(table=rows, worst_gain=float(worst),
                    passed=worst <= max(tolerance, tolerance * scale))


def verify_budget_balance(scenario: Scenario, design: DesignResult) -> tuple[float, float, bool]:
    """Weak budget balance at a truthful design.

    Returns (sum of prices, MNO utility, weakly balanced flag). The MNO
    utility is reported but not asserted against zero.
    """
    total = float(design.report.prices.sum())
    return total, design.report.mno_utility, _close_enough(total)


def verify_price_monotonicity(scenario: Scenario, solver: MechanismSolver | None = None) -> bool:
    """Prices nondecreasing in type across otherwise-identical CPs.

    Only meaningful when the CPs are exchangeable up to their types; a
    non-symmetric scenario is rejected.
    """
    if not scenario.is_cp_symmetric():
        raise ValueError("price monotonicity is only checked on CP-symmetric scenarios")
    if solver is None:
        solver = MechanismSolver(scenario)
    design = design_contracts(scenario, tuple(scenario.true_types), solver=solver)
    prices = design.report.prices
    types = scenario.true_types
    scale = max(1.0, float(np.abs(prices).max()))
    for k in range(scenario.cp_count):
        for l in range(scenario.cp_count):
            if types[k] >= types[l] and prices[k] < prices[l] - REL_TOL * scale - REL_TOL:
                return False
    return True
