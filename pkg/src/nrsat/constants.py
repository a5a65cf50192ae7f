"""Physical constants and rounded link-budget reference values."""

SPEED_OF_LIGHT = 2.99792458e8  # m/s
MU_EARTH = 398600.4418  # km^3/s^2
EARTH_RADIUS_KM = 6371.0

# Rounded values used throughout the budgets. Keeping -174 and -228.6 as
# exact constants (instead of deriving them from k*290 K) is what makes the
# kelvin- and dBm-domain rows of a ledger agree to the printed decimals.
THERMAL_NOISE_DBM_HZ = -174.0
BOLTZMANN_DBW_K_HZ = -228.6

FCC_PEAK_EIRP_DBM = 43.0
