#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from bregman_proximal_gradient import DomainError, SolverConfig, fit_rate_slope, gen_doptimal, reference_optimum, run_solver

import logging
import sys


# Demonstration
if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    ITERATIONS = int(sys.argv[1]) if (len(sys.argv) > 1) else 1000

    A = SolverConfig.ALGORITHM

    # Random D-optimal design instance on the simplex, paired with Burg's entropy (L = 1).
    instance = gen_doptimal(80, 200, seed=1)
    problem, x0 = instance.problem, instance.x0

    _, F_star = reference_optimum(problem, x0, max_iter=ITERATIONS)

    configs = [SolverConfig(A.BPG, max_iter=ITERATIONS),
               SolverConfig(A.BPG_LS, max_iter=ITERATIONS),
               SolverConfig(A.ABPG, gamma=2.0, max_iter=ITERATIONS),
               SolverConfig(A.ABPG_G, gamma=2.0, max_iter=ITERATIONS),
               SolverConfig(A.ABPG_G, gamma=2.0, max_iter=ITERATIONS, restart=True)]

    print("{:<12}{:>16}{:>10}{:>12}".format("algorithm", "final gap", "slope", "grad calls"))
    print("─" * 50)

    for cfg in configs:
        trace = run_solver(problem, cfg, x0)
        gaps = trace.iterate_gaps(F_star)

        try:
            slope = "{:.2f}".format(fit_rate_slope(gaps, ITERATIONS // 10, ITERATIONS))
        except DomainError:
            # The gap reached zero inside the window.
            slope = "-"

        print("{:<12}{:>16.3e}{:>10}{:>12}".format(cfg.label, gaps[-1], slope, trace.rows[-1].grad_calls))
