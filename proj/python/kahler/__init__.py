"""Product Kahler surfaces, Lagrangian immersions and verification suites."""

from ._kahler import (
    ConfigError,
    Expr,
    KahlerError,
    Product,
    Surface,
    builtin_configs,
    config_json,
    integrate_curve,
    run_suite,
    stability_probe,
    suites,
)

__all__ = [
    "ConfigError",
    "Expr",
    "KahlerError",
    "Product",
    "Surface",
    "builtin_configs",
    "config_json",
    "integrate_curve",
    "run_suite",
    "stability_probe",
    "suites",
]
