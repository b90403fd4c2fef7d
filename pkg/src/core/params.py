"""
src/core/params.py

THE PARAMETER MODEL
-------------------
Mode frequencies, damping rates, couplings and bath occupancies of the
cavity / magnon / phonon system, plus the (|zeta|, phi) squeezing record.

All rates are stored in units of the mechanical frequency (omega_b = 1 by
default). Damping rates are amplitude (half-width) rates.
"""

import math
from dataclasses import dataclass, asdict, fields, replace
from typing import Dict

import numpy as np

from src.core.errors import ParameterError

RATE_FIELDS = ("omega_b", "delta_a", "delta_m", "gamma_a", "gamma_b", "gamma_m", "g", "G_mag")
OCCUPANCY_FIELDS = ("n_a", "n_b", "n_m")


def wrap_phase(phi: float) -> float:
    """Fold an angle into the principal range (-pi, pi]."""
    if not math.isfinite(phi):
        raise ParameterError(f"phase must be finite, got {phi}")
    wrapped = math.remainder(phi, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True)
class SystemParams:
    delta_a: float
    delta_m: float
    gamma_a: float
    gamma_b: float
    gamma_m: float
    g: float
    G_mag: float
    n_a: float
    n_b: float
    n_m: float
    omega_b: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or isinstance(value, bool):
                raise ParameterError(f"{f.name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(f"{f.name} must be finite, got {value}")
            object.__setattr__(self, f.name, float(value))

        for name in ("omega_b", "gamma_a", "gamma_b", "gamma_m"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be strictly positive, got {getattr(self, name)}")
        for name in ("g", "G_mag") + OCCUPANCY_FIELDS:
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def weak_coupling_ok(self) -> bool:
        # perturbative in |G| / omega_b
        return self.G_mag < self.omega_b

    @property
    def gamma_m_eff(self) -> float:
        """gamma'_m = gamma_m + g^2/gamma_a, the cavity-broadened magnon linewidth."""
        return self.gamma_m + self.g ** 2 / self.gamma_a

    def with_values(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def red_sideband(cls, gamma_m: float, **overrides) -> "SystemParams":
        """
        Fixed parameter set of the spectrum / phonon-number panels:
        n_b = 100, n_a = n_m = 0, G = 0.1, gamma_a = 1, g = 0, gamma_b = 1e-5,
        with the detunings at the red sideband (Delta_a = Delta_m = omega_b).
        """
        base = cls(
            delta_a=1.0,
            delta_m=1.0,
            gamma_a=1.0,
            gamma_b=1e-5,
            gamma_m=gamma_m,
            g=0.0,
            G_mag=0.1,
            n_a=0.0,
            n_b=100.0,
            n_m=0.0,
        )
        return replace(base, **overrides)

    @classmethod
    def from_si(cls, omega_b_hz: float, **values_hz) -> "SystemParams":
        """
        Build a normalized parameter set from ordinary frequencies in Hz.
        Rates are divided by omega_b_hz; occupancies pass through unchanged.
        """
        if not omega_b_hz > 0:
            raise ParameterError(f"omega_b_hz must be strictly positive, got {omega_b_hz}")
        normalized = {}
        for name, value in values_hz.items():
            if name == "omega_b":
                raise ParameterError("omega_b is fixed by omega_b_hz in SI input")
            normalized[name] = value / omega_b_hz if name in RATE_FIELDS else value
        return cls(omega_b=1.0, **normalized)


@dataclass(frozen=True)
class SqueezingParams:
    zeta_abs: float
    phi: float = 0.0

    def __post_init__(self):
        zeta_abs = float(self.zeta_abs)
        if not math.isfinite(zeta_abs) or zeta_abs < 0:
            raise ParameterError(f"zeta_abs must be finite and non-negative, got {self.zeta_abs}")
        object.__setattr__(self, "zeta_abs", zeta_abs)
        object.__setattr__(self, "phi", wrap_phase(float(self.phi)))

    @property
    def complex(self) -> complex:
        return complex(self.zeta_abs * np.exp(1j * self.phi))

    @classmethod
    def from_complex(cls, zeta: complex) -> "SqueezingParams":
        return cls(zeta_abs=abs(zeta), phi=float(np.angle(zeta)))

    @classmethod
    def none(cls) -> "SqueezingParams":
        return cls(zeta_abs=0.0, phi=0.0)
