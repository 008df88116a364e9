"""Discrete Sommerfeld diffraction problems on the square lattice.

Rigid constraint (Dirichlet) and crack (Neumann) along the negative x axis,
solved as truncated Wiener-Hopf/Toeplitz systems and compared with the
continuum half-plane solutions in discrete Sobolev norms.
"""
from .errors import LatticeSommerfeldError
from .lattice import (BoundaryKind, Frequency, LatticeSite, ProblemConfig, dispersion_sigma,
                      incident_wave, load_config, macroscopic_coords, solve_wavenumber)
from .green import GreenTable, build_green_table, green_quadrature, green_reduced
from .kernels import (HalfLineSeq, KernelCoeffs, build_forcing, discrete_symbol, eval_symbols,
                      kernel_coeffs, kernel_zeros)
from .toeplitz import SolveReport, solve_dirichlet_with_tip, solve_half_line, solve_problem
from .continuum import continuum_residual, continuum_symbol, solve_continuum_trace
from .sobolev import GridSeq, dft, norm_s, prolong, restrict, weight
from .direct import extract_traces, solve_direct
from .harness import emit_kernel_report, run_convergence, validate_cross

__version__ = "0.1.0"
