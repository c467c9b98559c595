#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from .assisting_modules.errors import (AdaptationError, BregmanError, ConfigurationError, DegenerateStepError, DomainError,
                                       InstanceError, LibsvmParseError, RootFindingError, UnboundedSubproblemError)
from .assisting_modules.feasible_set import FEASIBLE_SET
from .methods.composite_problem import CompositeProblem
from .methods.harness import Certificate, certificate_series, cli_main, fit_rate_slope, geo_mean_gain, read_trace_csv, write_trace_csv
from .methods.instances import (Instance, InstanceSpec, check_relative_smoothness, gen_doptimal, gen_doptimal_libsvm,
                                gen_least_squares, gen_poisson, gen_relentropy, load_instance, load_libsvm, save_instance)
from .methods.kernels import BregmanKernel, TripleGain
from .methods.objectives import Objective, Regularizer
from .methods.solvers import (SolverConfig, SolverTrace, TraceRow, oracle_call_bound, reference_optimum, run_abda, run_abpg,
                              run_abpg_e, run_abpg_g, run_bpg, run_bpg_ls, run_solver, run_with_restart)
from .methods.stepsize import (ThetaSequence, theta_explicit, theta_next_gain_equality, theta_next_gain_explicit,
                               theta_next_root)
from .methods.subproblems import DualAvgQuery, ProxQuery, dual_avg_step, prox_step
