import math

import numpy as np
import pytest

from abfield import Point3, ShieldSpec, SolenoidSpec, make_circle_loop

# The workhorse configuration: a = 0.01 m, n = 1e4 /m, I = 1 A. Derived
# reference values for it, frozen from hand arithmetic:
#   A_phi(rho = 0.02)         = mu0 n I a^2 / (2 rho) = pi * 1e-5 T m
#   circulation (axis loop)   = mu0 n I a^2 pi = 4 pi^2 1e-7 T m^2
#   bore field                = mu0 n I = 0.012566370614359173 T
CIRCULATION = 4.0 * math.pi ** 2 * 1e-7
A_PHI_AT_002 = math.pi * 1e-5
BORE_FIELD = 0.012566370614359173
BORE_FLUX = 3.947841760435744e-06

ZHAT = np.array([0.0, 0.0, 1.0])


@pytest.fixture
def spec():
    return SolenoidSpec(a=0.01, n=1e4, current=1.0)


@pytest.fixture
def shield():
    return ShieldSpec(inner_radius=0.011, outer_radius=0.013, lambda_p=5e-4)


@pytest.fixture
def axis_loop():
    """Counterclockwise circle of radius 0.02 about the z-axis."""
    return make_circle_loop(Point3(0.0, 0.0, 0.0), 0.02, ZHAT, +1, 64)
