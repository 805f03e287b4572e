"""Two-size restricted assignment scheduling toolkit.

Thin wrapper over the C++ core. All instance/schedule documents are JSON
strings; rationals are written as "a/b".
"""

from resched._core import (  # noqa: F401
    __version__,
    brute_force_opt,
    check_canonical,
    chernoff_bound,
    generate_random,
    generate_vertex_cover,
    is_delta_good,
    makespan,
    matching_baseline,
    run_experiment,
    solve,
    to_canonical,
    validate_instance,
)
