"""Lattice discretizations of Fourier multipliers and their resolvent convergence."""

from .errors import (AliasingError, ConfigError, DegenerateDataError, DomainError,
                     ExperimentError, FourlatError, IllConditionedWindowError, NumericError,
                     ParameterError, ShapeError, SolverError, SpectralParameterError)
from .harness import ExperimentConfig, ExperimentReport, RateReport, emit, fit_rate, ingest, run
from .lattice import ContinuumProxy, LatticeField, LatticeGrid, dft, discretize, embed
from .potentials import (PotentialSpec, cos_potential, sech2_potential, sin_power_potential,
                         zero_potential)
from .resolvent import (ErrorOperator, Operator, ResolventProbe, apply_resolvent,
                        error_norm_fiber, error_norm_power, potential_commutator_norm,
                        y_blowup_scan)
from .riesz import BumpProfile, RieszPair, biorthogonality_defect, build_pair
from .spectra import SpectrumSet, Window, hausdorff, local_hausdorff, spectrum
from .symbols import (ClassI, ClassII, ClassIII, Symbol, bilaplacian, fraclap, laplacian,
                      predicted_rate, pseudorel)

__version__ = "0.1.0"
