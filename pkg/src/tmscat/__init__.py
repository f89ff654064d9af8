"""Transfer-operator scattering in two and three dimensions.

Numeric transfer operators for arbitrary smooth 2D potentials by
momentum-space evolution, exact closed forms for point potentials and for a
slab with a surface line defect, angular scattering amplitudes, and
spectral-singularity (laser / coherent-perfect-absorber threshold) analysis.
"""

from .errors import (AccuracyWarning, ConsistencyError, DivergenceError,
                     NearResonanceError, NoRootError, ResourceLimitError,
                     SpectralSingularityError, TmscatError,
                     UnsupportedEvaluationError)
from .grid import (MomentumGrid, SpectralAmplitude, barycentric_interpolate,
                   build_grid, chebyshev_barycentric_weights, quadrature)
from .potentials import (Delta2D, Delta3D, GaussianBump, Slab, SlabWithDefect,
                         SumPotential, fourier_y, is_x_singular,
                         is_y_independent, potential_from_document,
                         potential_from_json, potential_to_document,
                         potential_to_json, uniform_part, x_support)
from .operators import (ScatteringResult, SingularityFlag, TransferOperator,
                        amplitude, compose, identity_operator, scattering_result,
                        solve_outgoing)
from .evolution import (EvolutionConfig, HamiltonianBlock, auto_config,
                        effective_hamiltonian, evolve_transfer, potential_kernel)
from .closedforms import (DefectAmplitudes, DefectParams, SingularitySearch,
                          SlabParams, born2d_amplitude, delta2d_amplitude,
                          delta2d_operator, slab_defect_amplitudes, slab_entries,
                          slab_operator, slab_xyz, slab_y, spectral_singularity,
                          threshold_gain, threshold_gain_curve, wire_modes)
from .threed import (DiscGrid, SpectralAmplitude3D, TransferOperator3D,
                     amplitude3d, build_disc_grid, compose_3d, delta3d_amplitude,
                     delta3d_operator, disc_quadrature, effective_hamiltonian_3d,
                     evolve_transfer_3d, identity_operator_3d, scattering_length,
                     solve_outgoing_3d)
from .oracle import (ConvergenceReport, Transfer1D, born1_transfer,
                     convergence_report, transfer_1d)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
