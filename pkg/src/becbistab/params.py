"""Physical parameters of the hybrid BEC / moving-mirror cavity and their derived coefficients.

All frequencies are stored as angular frequencies in rad/s.  Laboratory values
quoted as ``X x 2pi kHz`` are multiplied out by :func:`derive_from_experiment`;
couplings quoted without the 2pi factor are taken as printed.
"""

import dataclasses
import json
import math
from dataclasses import dataclass, field

from .exceptions import ParameterError, SingularFactorError

TWO_PI = 2.0 * math.pi
HBAR = 1.054571817e-34  # J s

CONVENTIONS = ("steady", "dynamics")

# unit name -> multiplier to rad/s
UNITS = {
    "Hz": 1.0,
    "kHz": 1e3,
    "MHz": 1e6,
    "2pi*Hz": TWO_PI,
    "2pi*kHz": TWO_PI * 1e3,
    "2pi*MHz": TWO_PI * 1e6,
}


@dataclass(frozen=True)
class SystemParams:
    """Mean-field model parameters (rad/s).

    ``gamma_sm`` is used both as the condensate damping in the equations of
    motion and as the damping inside the steady-state factor
    ``1 - gamma_sm / (4 omega_r)``.
    """

    eta: float
    eta_eff: float
    kappa: float
    delta: float
    omega_m: float
    omega_r: float
    xi: float
    xi_sm: float
    gamma_m: float = 0.0
    gamma_sm: float = 0.0

    def __post_init__(self):
        for name in FIELDS:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ParameterError(name, f"expected a real number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(name, "must be finite")
            object.__setattr__(self, name, float(value))
        for name in ("kappa", "omega_m", "omega_r"):
            if getattr(self, name) <= 0:
                raise ParameterError(name, "must be positive")
        for name in ("eta", "eta_eff", "gamma_m", "gamma_sm"):
            if getattr(self, name) < 0:
                raise ParameterError(name, "must be non-negative")
        if self.gamma_sm == 4.0 * self.omega_r:
            raise SingularFactorError(
                "gamma_sm", "gamma_sm/(4 omega_r) = 1 makes the steady-state factor vanish")

    @property
    def big_omega(self):
        """Condensate side-mode frequency 4 omega_r."""
        return 4.0 * self.omega_r

    @property
    def mirror_period(self):
        return TWO_PI / self.omega_m

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def with_ratios(self, **ratios):
        """Override fields given as multiples of kappa, e.g. ``with_ratios(eta=40.0)``."""
        return self.replace(**{k: v * self.kappa for k, v in ratios.items()})

    def as_dict(self):
        return {name: getattr(self, name) for name in FIELDS}


FIELDS = tuple(f.name for f in dataclasses.fields(SystemParams))


@dataclass(frozen=True)
class DerivedCoefficients:
    b_shift: float
    c_gain: float
    q_per_photon: float
    qq_per_photon: float

    def as_dict(self):
        return dataclasses.asdict(self)


def steady_factor(params):
    """Return ``1 - gamma_sm / (4 omega_r)``."""
    factor = 1.0 - params.gamma_sm / params.big_omega
    if factor == 0.0:
        raise SingularFactorError("gamma_sm", "steady-state factor 1 - gamma_sm/(4 omega_r) is zero")
    return factor


def derived(params):
    """Per-photon position shifts and the cubic's detuning-pull and gain coefficients."""
    factor = steady_factor(params)
    q_per_photon = params.xi / params.omega_m
    qq_per_photon = params.xi_sm / (params.big_omega * factor)
    b_shift = params.xi * q_per_photon + params.xi_sm * qq_per_photon
    c_gain = (params.eta_eff * qq_per_photon) ** 2
    return DerivedCoefficients(b_shift, c_gain, q_per_photon, qq_per_photon)


def signed_delta(params, convention):
    """Detuning entering ``Delta + xi q - xi_sm Q`` for the chosen sign convention.

    The steady-state expressions carry ``Delta - xi q + xi_sm Q``; squared, that is
    the dynamics form with the detuning sign flipped.
    """
    if convention == "dynamics":
        return params.delta
    if convention == "steady":
        return -params.delta
    raise ParameterError("sign_convention", f"expected one of {CONVENTIONS}, got {convention!r}")


# --- laboratory inputs -------------------------------------------------------

@dataclass(frozen=True)
class ExperimentalInputs:
    """Laboratory quantities, SI units with angular frequencies in rad/s."""

    n_atoms: float
    u0: float
    cavity_length: float
    wavelength: float
    power_in: float
    omega_c: float
    omega_p: float
    kappa: float
    omega_r: float
    omega_m: float
    xi: float
    xi_sm: float
    delta: float
    eta_eff: float = 0.0
    gamma_m: float = 0.0
    gamma_sm: float = 0.0
    notes: tuple = field(default=(), compare=False)


def pump_coupling(power_in, kappa, omega_p):
    """|eta| = sqrt(P kappa / (hbar omega_p))."""
    return math.sqrt(power_in * kappa / (HBAR * omega_p))


def derive_from_experiment(raw):
    for name in ("n_atoms", "u0", "cavity_length", "wavelength", "power_in", "omega_c",
                 "omega_p", "kappa", "omega_r", "omega_m", "xi", "xi_sm", "delta"):
        value = getattr(raw, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ParameterError(name, f"must be a positive finite number, got {value!r}")
    return SystemParams(
        eta=pump_coupling(raw.power_in, raw.kappa, raw.omega_p),
        eta_eff=raw.eta_eff,
        kappa=raw.kappa,
        delta=raw.delta,
        omega_m=raw.omega_m,
        omega_r=raw.omega_r,
        xi=raw.xi,
        xi_sm=raw.xi_sm,
        gamma_m=raw.gamma_m,
        gamma_sm=raw.gamma_sm,
    )


PAPER_2015_INPUTS = ExperimentalInputs(
    n_atoms=2.3e4,
    u0=3.1 * UNITS["2pi*MHz"],
    cavity_length=1.25e-4,
    wavelength=780e-9,
    power_in=0.0164e-3,
    omega_c=15.3e14 * TWO_PI,
    omega_p=3.8e14 * TWO_PI,
    kappa=1.3 * UNITS["2pi*kHz"],
    omega_r=3.8 * UNITS["2pi*kHz"],
    omega_m=15.2 * UNITS["2pi*MHz"],
    xi=3.8 * UNITS["MHz"],
    xi_sm=4.4 * UNITS["MHz"],
    delta=0.52 * UNITS["2pi*MHz"],
    notes=(
        "atom number printed as '2.3x4'; read as 2.3e4",
        "cavity length printed without unit; read as metres",
        "xi and xi_sm printed without 2pi; used as rad/s as printed",
        "gamma_m and gamma_sm not given; default 0",
    ),
)

PRESETS = {"paper-2015": PAPER_2015_INPUTS}

# Pump strength and detuning of the temporal-dynamics figure.
FIG5_ETA = 18.4 * UNITS["2pi*MHz"]
FIG5_DELTA = 0.52 * UNITS["2pi*MHz"]


def preset(name):
    try:
        raw = PRESETS[name]
    except KeyError:
        raise ParameterError("preset", f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None
    return derive_from_experiment(raw)


def preset_notes(name):
    return PRESETS[name].notes


# --- unit handling -----------------------------------------------------------

def to_rad_per_s(value, unit):
    try:
        return float(value) * UNITS[unit]
    except KeyError:
        raise ParameterError("unit", f"unknown unit {unit!r}; expected one of {list(UNITS)}") from None


def to_display(value, unit="2pi*kHz"):
    """Express a rad/s value in ``unit`` (inverse of :func:`to_rad_per_s`)."""
    if unit not in UNITS:
        raise ParameterError("unit", f"unknown unit {unit!r}")
    return value / UNITS[unit]


def params_from_mapping(mapping, base=None):
    """Build SystemParams from a config mapping.

    Each value is a number in rad/s or ``{"value": x, "unit": u}``.  A ``preset``
    key selects the base parameter set that the remaining keys override.
    """
    mapping = dict(mapping)
    name = mapping.pop("preset", None)
    if name is not None:
        base = preset(name)
    values = base.as_dict() if base is not None else {}
    for key, value in mapping.items():
        if key not in FIELDS:
            raise ParameterError(key, "unknown parameter")
        if isinstance(value, dict):
            if set(value) != {"value", "unit"}:
                raise ParameterError(key, "unit object needs exactly 'value' and 'unit'")
            value = to_rad_per_s(value["value"], value["unit"])
        values[key] = value
    missing = [f for f in FIELDS[:8] if f not in values]
    if missing:
        raise ParameterError(missing[0], "missing required parameter")
    return SystemParams(**values)


def load_params(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParameterError("config", f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ParameterError("config", "top level must be an object")
    return params_from_mapping(data)
