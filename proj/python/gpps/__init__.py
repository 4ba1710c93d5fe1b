from ._gpps import (
    Grid,
    Model,
    NumericalAlarm,
    __version__,
    blowup_criterion,
    classify_regime,
    energy,
    estimate_cb,
    evolve,
    gaussian_init,
    groundstate,
    reduction_study,
    run_config,
    symbol_u1d,
    symbol_u1d_quadrature,
    symbol_u2d,
    symbol_u2d_quadrature,
)

__all__ = [
    "Grid",
    "Model",
    "NumericalAlarm",
    "__version__",
    "blowup_criterion",
    "classify_regime",
    "energy",
    "estimate_cb",
    "evolve",
    "gaussian_init",
    "groundstate",
    "reduction_study",
    "run_config",
    "symbol_u1d",
    "symbol_u1d_quadrature",
    "symbol_u2d",
    "symbol_u2d_quadrature",
]
