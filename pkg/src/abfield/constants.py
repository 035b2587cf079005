"""Physical constants used throughout (SI units).

MU_0 is the exact pre-2019 value 4*pi*1e-7; the remaining constants are
CODATA 2018. Scenario configs may override charge/hbar for unit-system
experiments, so library functions take them as arguments where relevant
and only default to these values.
"""

import math

MU_0 = 4.0 * math.pi * 1e-7        # vacuum permeability (T*m/A)
HBAR = 1.054571817e-34             # reduced Planck constant (J*s)
E_CHARGE = 1.602176634e-19         # elementary charge (C), positive
H_PLANCK = 6.62607015e-34          # Planck constant (J*s)
ELECTRON_MASS = 9.1093837015e-31   # electron rest mass (kg)
