"""DC power flow via phase-estimation linear solvers."""

from ._core import (
    QpfError,
    System,
    bundled_system,
    failure_bound_single,
    lemma_check,
    qubit_budget,
    run_acceptance,
    solve_classical,
    solve_hhl,
    solve_hmpea,
    solve_hspea,
    success_bound_multi,
    sweep,
    system_from_grid,
    system_from_matrix,
)

__all__ = [
    "QpfError",
    "System",
    "bundled_system",
    "failure_bound_single",
    "lemma_check",
    "qubit_budget",
    "run_acceptance",
    "solve_classical",
    "solve_hhl",
    "solve_hmpea",
    "solve_hspea",
    "success_bound_multi",
    "sweep",
    "system_from_grid",
    "system_from_matrix",
]
