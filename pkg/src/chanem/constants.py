"""Physical constants shared across the package."""

# Propagation speed used for all delay and Doppler arithmetic.
SPEED_OF_LIGHT = 2.998e8  # m/s

# CODATA vacuum permittivity.
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m
