"""Python bindings for cltlab."""

from ._cltlab import (
    Error,
    check_conditions,
    chi_mixture_marginal,
    psi,
    psi_gaussian_ratio_scan,
    random_subspace,
    sample_body,
    set_max_threads,
    thin_shell_fraction,
    verify_sandwich,
)

__all__ = [
    "Error",
    "check_conditions",
    "chi_mixture_marginal",
    "psi",
    "psi_gaussian_ratio_scan",
    "random_subspace",
    "sample_body",
    "set_max_threads",
    "thin_shell_fraction",
    "verify_sandwich",
]
