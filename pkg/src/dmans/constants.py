"""Physical constants and unit conversions used across the package.

Internal microphysics works in natural units (MeV for energies and momenta,
MeV^4 for energy densities before conversion).  Tables carry baryon density
in fm^-3 and energy density / pressure in MeV/fm^3.  Stellar structure works
in geometrized units with lengths in km.
"""

import math

# hbar*c in MeV fm; fixes the MeV <-> fm bookkeeping everywhere
HBARC = 197.32698

# lepton masses, MeV
M_ELECTRON = 0.511
M_MUON = 105.658

# geometrized-unit conversions (project-wide, bit-identical across modules)
#   G*Msun/c^2 in km, G*Msun/c^3 in seconds, MeV/fm^3 -> km^-2
MSUN_KM = 1.476625
MSUN_S = 4.925490e-6
MEVFM3_TO_KM2 = 1.32379e-6

# speed of light, km/s (converts geometric km^-1 frequencies to rad/s)
C_KM_S = 2.99792458e5

# GeV^4 -> MeV/fm^3 for the dark-matter Fermi gas (momenta kept in GeV)
GEV4_TO_MEVFM3 = 1.0e12 / HBARC**3

PI2 = math.pi**2
