# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
import numpy as np

from anisoqed.misc.dataframe import DataFrame, ftos


def pretty_print_dictionary(d, fp=4):
    """Print a dictionary with formatted values.

    Nested dictionaries are printed indented, arrays by their shape.

    Parameters
    ----------
    d : dict
    fp : int, optional
        Number of decimal places for floating-point values, by default 4.
    """
    _print(d, fp, indent=0)


def _print(d, fp, indent):
    pad = " " * indent
    for k, v in d.items():
        if isinstance(v, dict):
            print(f"{pad}{k:>15s}:")
            _print(v, fp, indent + 4)
            continue
        if isinstance(v, np.ndarray):
            if v.size == 1:
                v = v.item()
            else:
                print(f"{pad}{k:>15s}: array{v.shape}")
                continue
        if isinstance(v, complex):
            print(f"{pad}{k:>15s}: {ftos(v.real, fp)} {'+' if v.imag >= 0 else '-'} {ftos(abs(v.imag), fp)}j")
        elif isinstance(v, float):
            print(f"{pad}{k:>15s}: {ftos(v, fp)}")
        else:
            print(f"{pad}{k:>15s}: {v}")


def branch_table(branches):
    """DataFrame of (rho, omega, lambda_count) per dispersion branch."""
    return DataFrame(
        [[b.rho, b.omega, b.lambda_count] for b in branches],
        ["rho", "omega", "lambdas"],
        [f"branch{b.rho}" for b in branches],
    )


def decay_summary(result):
    """Console summary of a DecayResult."""
    print("Decay rate")
    print("----------")
    pretty_print_dictionary(
        {
            "gamma": result.gamma,
            "population_rate": result.population_rate,
            "gamma/gamma0": result.gamma_over_free_space,
            "error_estimate": result.error_estimate,
            "converged": result.converged,
            "slot_0": result.branch_contributions[0],
            "slot_1": result.branch_contributions[1],
        }
    )


def fit_summary(fit, reference=None):
    """Console summary of a DecayFit, compared with `reference` when given."""
    print("Decay fit")
    print("---------")
    d = {
        "gamma_fit": fit.gamma_fit,
        "delta_omega_fit": fit.delta_omega_fit,
        "residual": fit.residual,
    }
    if reference is not None:
        d["gamma_reference"] = reference
        d["rel_deviation"] = abs(fit.gamma_fit - reference) / reference
    pretty_print_dictionary(d)
