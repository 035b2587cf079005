"""abfield: vector-potential modes, loop-integral phases, generalized Stokes
checks, classical ramp dynamics, and Meissner screening for an ideal
solenoid, with a scenario-driving CLI."""

from .circulation import LoopIntegralResult, PhaseResult, ab_phase, loop_integral
from .constants import E_CHARGE, ELECTRON_MASS, H_PLANCK, HBAR, MU_0
from .dynamics import (AngularImpulseResult, ParticleState, RampSchedule,
                       TrajectoryRecord, angular_impulse, induced_e_field,
                       integrate_trajectory, lorentz_force)
from .geometry import (AnnularMesh, Arc, CylPoint, ParametricLoop, Point3,
                       cart_from_cyl, circle_arc, compose_loops, cyl_from_cart,
                       line_arc, make_circle_loop, mesh_annulus, mesh_disk)
from .modes import (GridField, ScalarGauge, VectorField, curl_cylindrical,
                    curl_field, helmholtz_project, longitudinal_from_current,
                    quadrature_a_field, scalar_mode, solenoid_a_field,
                    solenoid_bore_b_field, solenoid_longitudinal_analytic,
                    spectral_divergence)
from .screening import (ScenarioField, ShieldSpec, build_scenario, london_profile_fd,
                        penetration_length, screened_solenoid_profile)
from .sources import SolenoidSpec, SurfaceCurrent, surface_current_samples
from .stokes import (MisuseReport, StokesReport, demonstrate_misuse, surface_flux,
                     verify_generalized_stokes)

__version__ = "0.1.0"
