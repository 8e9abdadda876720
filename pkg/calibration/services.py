"""
Physical constants and the single calibration constant k0 = sqrt(2·m·e)/ħ.

Energies are in eV, potentials in volts and lengths in nm everywhere in the
project, so every wavenumber is k0·sqrt(energy) in nm⁻¹.
"""

import enum
import math
from dataclasses import dataclass, replace

from scipy import constants as sp

from tunnel_circuits.exceptions import DomainError

# CODATA values as shipped with scipy
ELECTRON_MASS = sp.m_e  # kg
ELEMENTARY_CHARGE = sp.e  # C
REDUCED_PLANCK = sp.hbar  # J·s

METRES_PER_NANOMETRE = sp.nano

# The tables are consistent with a wavenumber exactly 1000x below the SI value
PAPER_EFFECTIVE_SCALE = 1e-3


class ConstantsMode(str, enum.Enum):
    SI = 'si'
    PAPER_EFFECTIVE = 'paper'
    CUSTOM = 'custom'


def si_k0():
    """sqrt(2·m_e·e)/ħ in nm⁻¹·eV^(−1/2)."""
    per_metre = math.sqrt(2.0 * ELECTRON_MASS * ELEMENTARY_CHARGE) / REDUCED_PLANCK
    return per_metre * METRES_PER_NANOMETRE


@dataclass(frozen=True)
class ConstantsProfile:
    electron_mass: float
    elementary_charge: float
    reduced_planck: float
    k0: float
    mode: ConstantsMode

    def __post_init__(self):
        if not self.k0 > 0:
            raise DomainError(f"k0 must be positive, got {self.k0!r}")

    def scaled(self, factor):
        """Same constants with k0 multiplied by ``factor``; lengths then scale by 1/factor."""
        if not factor > 0:
            raise DomainError(f"scale factor must be positive, got {factor!r}")
        return replace(self, k0=self.k0 * factor, mode=ConstantsMode.CUSTOM)


def make_profile(mode):
    mode = ConstantsMode(mode)
    if mode is ConstantsMode.CUSTOM:
        raise DomainError("custom profiles are built with ConstantsProfile.scaled()")
    k0 = si_k0()
    if mode is ConstantsMode.PAPER_EFFECTIVE:
        k0 *= PAPER_EFFECTIVE_SCALE
    return ConstantsProfile(
        electron_mass=ELECTRON_MASS,
        elementary_charge=ELEMENTARY_CHARGE,
        reduced_planck=REDUCED_PLANCK,
        k0=k0,
        mode=mode,
    )


def wavenumber(profile, energy):
    """Propagation constant k = k0·sqrt(E) in the zero-potential region."""
    if not energy > 0:
        raise DomainError(f"energy must be positive, got {energy!r}")
    return profile.k0 * math.sqrt(energy)


def decay_constant(profile, energy, potential):
    """Evanescent rate β = k0·sqrt(V − E) inside a square barrier."""
    if not energy > 0:
        raise DomainError(f"energy must be positive, got {energy!r}")
    if not energy < potential:
        raise DomainError("energy must be below barrier potential")
    return profile.k0 * math.sqrt(potential - energy)
