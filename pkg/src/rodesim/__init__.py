"""Noise-driven ODE simulation and Euler strong-convergence benchmarks.

The package splits along the natural seams of a convergence study:

- :mod:`rodesim.core` -- uniform meshes, path containers, splittable
  random streams;
- :mod:`rodesim.noise` -- exact samplers for the driving processes
  (Wiener, OU, geometric BM, oscillating linear diffusion, compound
  Poisson, Poisson step, self-exciting intensity, transport signals,
  fractional BM);
- :mod:`rodesim.solver` -- the fixed-step Euler integrator;
- :mod:`rodesim.exact` -- reference-path strategies;
- :mod:`rodesim.models` -- ready-made benchmark systems;
- :mod:`rodesim.convergence` -- the Monte-Carlo strong-error estimator,
  the log-log power-law fit, and its confidence interval;
- :mod:`rodesim.cli` -- the config-driven experiment runner.
"""

from .core import (ConfigurationError, DivergenceError, GenerationError, SamplePath,
                   TimeMesh, coarsen, make_mesh, substream)
from .noise import (Beta, CompoundPoisson, Constant, Exponential, FractionalBM, Gamma,
                    GeometricBM, HawkesExpDecay, LinearItoHomogeneous, Normal,
                    OrnsteinUhlenbeck, PoissonStep, Transport, TransportForm, Uniform,
                    Wiener, sample_compound_poisson, sample_fbm, sample_gbm, sample_hawkes,
                    sample_linear_ito, sample_noise, sample_noise_bundle, sample_ou,
                    sample_poisson_step, sample_transport, sample_wiener)
from .solver import Rhs, euler_solve
from .exact import TargetStrategy, exact_linear_homogeneous, fine_euler_target
from .models import (MODELS, ErrorNorm, ModelSpec, SpatialPairing, draw_x0,
                     model_all_noise_linear_system, model_earthquake, model_fbm_linear,
                     model_fisher_kpp, model_linear_homogeneous,
                     model_population_dynamics, model_risk, model_toggle_switch,
                     risk_surplus)
from .convergence import (ErrorTable, ExperimentPlan, FitResult, RunningMoments,
                          confidence_interval, expected_order, figure_paths,
                          fit_power_law, fit_table, plan_for, run_experiment)

__version__ = "0.1.0"
