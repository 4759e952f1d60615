"""Contract-based caching incentives for small-cell networks.

A numpy library that models a two-tier cellular network in which a mobile
network operator sells edge-cache storage to content providers. It computes
welfare-maximizing storage allocations (exhaustively or via swap-based
deferred acceptance), prices each provider at the externality its presence
imposes on the others, and verifies the resulting contracts for individual
rationality, incentive compatibility, weak budget balance, and price
monotonicity.
"""

from .allocation import (
    AllocationOutcome,
    InstanceTooLargeError,
    StorageGrid,
    brute_force_allocation,
    standalone_request,
    swap_deferred_acceptance,
)
from .catalog import (
    CachePlacement,
    FileCatalog,
    cp_demand,
    placement_from_allocation,
    zipf_popularity,
)
from .mechanism import (
    BRUTE_FORCE,
    MATCHING,
    ContractBundle,
    CPTypeVector,
    DesignResult,
    MechanismSolver,
    WelfareReport,
    design_contracts,
    misreport_utility,
    social_welfare,
    storage_cost,
    vcg_price,
    verify_budget_balance,
    verify_ic,
    verify_ir,
    verify_price_monotonicity,
)
from .network import (
    NetworkTopology,
    UserRecord,
    backhaul_rate,
    cp_total_rate,
    effective_user_rate,
    interference_at_user,
    power_matrix_from_loads,
    sbs_user_rate,
)
from .scenario import Scenario, ScenarioConfig, ScenarioError, build_scenario, load_scenario

__version__ = "0.1.0"

__all__ = [
    "AllocationOutcome", "InstanceTooLargeError", "StorageGrid",
    "brute_force_allocation", "standalone_request", "swap_deferred_acceptance",
    "CachePlacement", "FileCatalog", "cp_demand", "placement_from_allocation",
    "zipf_popularity",
    "BRUTE_FORCE", "MATCHING", "ContractBundle", "CPTypeVector", "DesignResult",
    "MechanismSolver", "WelfareReport", "design_contracts", "misreport_utility",
    "social_welfare", "storage_cost", "vcg_price", "verify_budget_balance",
    "verify_ic", "verify_ir", "verify_price_monotonicity",
    "NetworkTopology", "UserRecord", "backhaul_rate", "cp_total_rate",
    "effective_user_rate", "interference_at_user", "power_matrix_from_loads",
    "sbs_user_rate",
    "Scenario", "ScenarioConfig", "ScenarioError", "build_scenario", "load_scenario",
    "__version__",
]
