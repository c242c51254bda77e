"""Calibrate command: fourth-order emission weight for a target source fidelity."""

from dickesim.commands import reported_errors, verbose_line
from dickesim.experiment.photonics import calibrate_fourth_order_weight, default_tree, source_fidelity
from dickesim.types import SourceConfig
from dickesim.utils.config import config_path, load_run_config, update_run_config
from dickesim.utils.formatter import format_output

CALIBRATION_FIDELITY = 0.654


def run_calibrate(
    target_fidelity: float = CALIBRATION_FIDELITY,
    config_path_option: str | None = None,
    save: bool = False,
    fmt: str = "pretty",
    verbose: bool = False,
) -> float:
    with reported_errors("calibrating"):
        config = load_run_config(config_path_option)
        tree = config.tree or default_tree()
        weight = calibrate_fourth_order_weight(target_fidelity, tree, config.source.efficiency)
        source = SourceConfig(order_weights={3: 1.0, 4: weight}, efficiency=config.source.efficiency)
        achieved = source_fidelity(source, tree)
        verbose_line(verbose, f"fourth-order weight {weight:.6g} gives fidelity {achieved:.6f}")
        if save:
            target = config_path(config_path_option)
            if target is None:
                raise ValueError("No config file to save into (use --config)")
            update_run_config(
                target, {"source": {"order_weights": {"3": 1.0, "4": weight}, "efficiency": source.efficiency}}
            )

    print(format_output([{"name": "order_weight_4", "value": weight, "fidelity": achieved}], fmt))
    return weight
