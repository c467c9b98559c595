#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from bregman_proximal_gradient import SolverConfig, gen_poisson, geo_mean_gain, run_abpg_g

import math


def print_row(row):
    """Progress hook: called once per iteration with the freshly recorded trace row."""
    if (row.k % 50 == 0) or (row.inner > 3):
        print("{:>6}{:>20.12f}{:>10.4f}{:>12.4f}{:>12}{:>8}".format(row.k,
                                                                   row.F,
                                                                   row.theta,
                                                                   row.G,
                                                                   "-" if math.isnan(row.Ghat) else "{:.4f}".format(row.Ghat),
                                                                   row.inner))


# Demonstration
if __name__ == "__main__":
    # Poisson inverse problem on the orthant with Burg's entropy; the gain adapts to the local curvature.
    instance = gen_poisson(200, 100, seed=1)

    cfg = SolverConfig(SolverConfig.ALGORITHM.ABPG_G, gamma=2.0, rho=1.5, G_min=1e-3, max_iter=500)

    print("{:>6}{:>20}{:>10}{:>12}{:>12}{:>8}".format("k", "F", "theta", "G", "Ghat", "trials"))

    trace = run_abpg_g(instance.problem, cfg, instance.x0, on_iteration=print_row)

    print()
    print("weighted geometric mean of the gains: {:.4f}".format(geo_mean_gain(trace.column("G"), cfg.gamma)))
    print("gradient calls: {} for {} iterations".format(trace.rows[-1].grad_calls, len(trace)))
