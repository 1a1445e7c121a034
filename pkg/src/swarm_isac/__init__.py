"""Drone detection with swarm-repeater-assisted monostatic MIMO ISAC.

Channel and signal models, closed-form and Monte-Carlo SINR, Dinkelbach
optimization of repeater gains, and an energy-detector ROC harness.
"""

from .channel import ChannelSet, PathGains, path_gains, realize_channels, steering
from .config import baseline_scenario, parse_config, scenario_from_params
from .detection import RocCurve, build_roc, run_hypothesis_mc, test_statistic
from .geometry import Layout, Scenario, build_layout
from .optimizer import OptimizerResult, brute_force_oracle, dinkelbach, optimize, power_split
from .signal import PowerSplit, make_precoders, receive_ap, receive_ue, solve_repeater_tx
from .sinr import (SinrReport, sensing_sinr_approx, sensing_sinr_mc, sinr_report,
                   user_sinr_closed)

__version__ = "0.1.0"

__all__ = [
    "ChannelSet", "Layout", "OptimizerResult", "PathGains", "PowerSplit", "RocCurve", "Scenario",
    "SinrReport",    "baseline_scenario", "brute_force_oracle", "build_layout", "build_roc", "dinkelbach",
    "make_precoders", "optimize", "parse_config", "path_gains", "power_split", "realize_channels",
    "receive_ap", "receive_ue", "run_hypothesis_mc", "scenario_from_params", "sensing_sinr_approx",
    "sensing_sinr_mc", "sinr_report", "solve_repeater_tx", "steering", "test_statistic", "user_sinr_closed",
]
