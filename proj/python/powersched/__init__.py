"""Energy-aware scheduling of hard real-time jobs on sleep-capable processors.

Thin wrapper over the C++ core. Energies and ratios come back as exact
rational strings; feed them to fractions.Fraction for arithmetic.
"""

from ._core import (
    DEFAULT_PAIR_LAMBDA,
    Job,
    adversary_duel,
    check_anchor_invariants,
    check_trace,
    condition_edf,
    generate_feasible,
    opt_energy_exact,
    opt_lower_bound,
    ratio_experiment,
    simulate,
)

__all__ = [
    "DEFAULT_PAIR_LAMBDA",
    "Job",
    "adversary_duel",
    "check_anchor_invariants",
    "check_trace",
    "condition_edf",
    "generate_feasible",
    "opt_energy_exact",
    "opt_lower_bound",
    "ratio_experiment",
    "simulate",
]
