"""BD-RIS assisted MIMO design on U_s."""
from .channels import (MimoChannel, Scenario, gen_channels, h_eq,
                       los_components, noise_power_dbm, path_loss_db,
                       read_scenario, write_scenario)
from .costs import (MseCost, RateCost, SumGainCost, mse_cost, mse_matrix,
                    rate_cost, sumgain_cost)
from .lowrank import (LowRankReduction, complete_full_rank, compress, expand,
                      lift, low_cost_baseline, low_rank_reduce)

__all__ = [
    "MimoChannel", "Scenario", "gen_channels", "h_eq", "los_components",
    "noise_power_dbm", "path_loss_db", "read_scenario", "write_scenario",
    "MseCost", "RateCost", "SumGainCost", "mse_cost", "mse_matrix",
    "rate_cost", "sumgain_cost", "LowRankReduction", "complete_full_rank",
    "compress", "expand", "lift", "low_cost_baseline", "low_rank_reduce",
]
