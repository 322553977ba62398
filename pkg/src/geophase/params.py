"""Physical parameters, initial-state parametrizations and model validation.

Frequencies are usually quoted in units of ``omega1`` (e.g. ``cutoff = 20``
means ``Lambda = 20 Omega_1``), but ``omega1`` stays an explicit field.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Union

import numpy as np


class ValidationError(ValueError):
    """Raised for out-of-domain or mutually inconsistent parameters."""


class Regime(enum.Enum):
    ISOLATED = "isolated"
    CHI_ONLY = "chi-only"
    OHMIC_BOTH_COUPLED = "ohmic"
    OHMIC_SPIN2_UNCOUPLED = "ohmic-spin2-uncoupled"

    @classmethod
    def parse(cls, value: Union[str, "Regime"]) -> "Regime":
        if isinstance(value, Regime):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {
            "isolated": cls.ISOLATED,
            "chi-only": cls.CHI_ONLY,
            "chionly": cls.CHI_ONLY,
            "chi": cls.CHI_ONLY,
            "ohmic": cls.OHMIC_BOTH_COUPLED,
            "ohmic-both-coupled": cls.OHMIC_BOTH_COUPLED,
            "ohmicbothcoupled": cls.OHMIC_BOTH_COUPLED,
            "ohmic-spin2-uncoupled": cls.OHMIC_SPIN2_UNCOUPLED,
            "ohmicspin2uncoupled": cls.OHMIC_SPIN2_UNCOUPLED,
            "spin2-uncoupled": cls.OHMIC_SPIN2_UNCOUPLED,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValidationError(f"unknown regime {value!r}") from None

    @classmethod
    def infer(cls, gamma0: float, chi: float) -> "Regime":
        if gamma0 == 0.0 and chi == 0.0:
            return cls.ISOLATED
        if gamma0 == 0.0:
            return cls.CHI_ONLY
        return cls.OHMIC_BOTH_COUPLED


@dataclass(frozen=True)
class SystemParams:
    omega1: float = 1.0
    omega2: float = 1.0
    chi: float = 0.0
    gamma0: float = 0.0
    cutoff: float = 20.0


@dataclass(frozen=True)
class EntangledInit:
    """Entangled two-spin state with weight ``lambda0`` and Bloch-ball angle ``theta0``."""

    lambda0: float
    theta0: float

    @property
    def lambda1(self) -> float:
        return 1.0 - self.lambda0

    def coefficients(self) -> tuple[complex, complex, complex, complex]:
        """Amplitudes (alpha, beta, zeta, delta) on |00>, |01>, |10>, |11>."""
        s0 = math.sqrt(self.lambda0)
        s1 = math.sqrt(self.lambda1)
        c = math.cos(self.theta0 / 2)
        s = math.sin(self.theta0 / 2)
        return (s0 * c + 0j, -s1 * s + 0j, s0 * s + 0j, s1 * c + 0j)


@dataclass(frozen=True)
class ProductInit:
    """Product state; ``p`` is the |1> weight of spin 1, ``q`` that of spin 2."""

    p: float
    q: float

    @classmethod
    def from_theta0(cls, theta0: float, q: float) -> "ProductInit":
        return cls(p=p_from_theta0(theta0), q=q)

    @property
    def theta0(self) -> float:
        return theta0_from_p(self.p)

    def coefficients(self) -> tuple[complex, complex, complex, complex]:
        a1, b1 = math.sqrt(1 - self.p), math.sqrt(self.p)
        a2, b2 = math.sqrt(1 - self.q), math.sqrt(self.q)
        return (a1 * a2 + 0j, a1 * b2 + 0j, b1 * a2 + 0j, b1 * b2 + 0j)


InitialState = Union[EntangledInit, ProductInit]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on ``[0, cycles * tau]`` with ``steps`` intervals per cycle."""

    tau: float = 2 * math.pi
    cycles: int = 1
    steps: int = 512

    def __post_init__(self):
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValidationError("tau must be positive")
        if self.cycles < 1:
            raise ValidationError("cycles must be >= 1")
        if self.steps < 16:
            raise ValidationError("steps must be >= 16")

    @classmethod
    def quasi_cycle(cls, omega1: float = 1.0, cycles: int = 1, steps: int = 512) -> "TimeGrid":
        return cls(tau=2 * math.pi / omega1, cycles=cycles, steps=steps)

    @property
    def t_final(self) -> float:
        return self.tau * self.cycles

    @property
    def intervals(self) -> int:
        return self.steps * self.cycles

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.intervals + 1)

    def refined(self, factor: int = 2) -> "TimeGrid":
        return replace(self, steps=self.steps * factor)


@dataclass(frozen=True)
class ValidatedModel:
    params: SystemParams
    init: InitialState
    regime: Regime
    omega_r: float = field(init=False)
    concurrence: float | None = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "omega_r", 2 * self.params.chi - self.params.gamma0 * self.params.cutoff)
        c = concurrence(self.init) if isinstance(self.init, EntangledInit) else None
        object.__setattr__(self, "concurrence", c)

    @property
    def is_entangled(self) -> bool:
        return isinstance(self.init, EntangledInit)

    @property
    def default_tau(self) -> float:
        return 2 * math.pi / self.params.omega1


def concurrence(init: EntangledInit) -> float:
    """Concurrence ``2 sqrt(lambda0 (1 - lambda0))`` of the entangled family."""
    lam = init.lambda0
    return 2.0 * math.sqrt(max(lam * (1.0 - lam), 0.0))


def lambda0_from_concurrence(c: float) -> float:
    """Inverse of :func:`concurrence` on the ``lambda0 <= 1/2`` branch."""
    if not 0.0 <= c <= 1.0:
        raise ValidationError(f"concurrence {c} out of [0,1]")
    return (1.0 - math.sqrt(max(1.0 - c * c, 0.0))) / 2.0


def p_from_theta0(theta0: float) -> float:
    return math.cos(theta0 / 2) ** 2


def theta0_from_p(p: float) -> float:
    return 2.0 * math.acos(math.sqrt(min(max(p, 0.0), 1.0)))


def _check_unit(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{name} out of [0,1]: {value}")


def validate(params: SystemParams, init: InitialState, regime: Regime | str | None = None) -> ValidatedModel:
    """Check every field and the regime/parameter consistency.

    ``regime=None`` infers the narrowest regime compatible with ``gamma0`` and
    ``chi``.
    """
    for f in fields(params):
        v = getattr(params, f.name)
        if not math.isfinite(v):
            raise ValidationError(f"{f.name} must be finite")
    if params.omega1 <= 0:
        raise ValidationError("omega1 must be > 0")
    if params.gamma0 < 0:
        raise ValidationError("gamma0 must be >= 0")
    if params.cutoff <= 0:
        raise ValidationError("cutoff must be > 0")

    if isinstance(init, EntangledInit):
        _check_unit("lambda0", init.lambda0)
        if not (0.0 <= init.theta0 <= math.pi):
            raise ValidationError(f"theta0 out of [0,pi]: {init.theta0}")
    elif isinstance(init, ProductInit):
        _check_unit("p", init.p)
        _check_unit("q", init.q)
    else:
        raise ValidationError(f"unsupported initial state {init!r}")

    regime = Regime.infer(params.gamma0, params.chi) if regime is None else Regime.parse(regime)
    if regime is Regime.ISOLATED and (params.gamma0 != 0 or params.chi != 0):
        raise ValidationError("isolated regime requires gamma0 = 0 and chi = 0")
    if regime is Regime.CHI_ONLY and params.gamma0 != 0:
        raise ValidationError("chi-only regime requires gamma0 = 0")
    return ValidatedModel(params=params, init=init, regime=regime)


CONFIG_KEYS = {
    "omega1": float,
    "omega2": float,
    "chi": float,
    "gamma0": float,
    "cutoff": float,
    "lambda0": float,
    "concurrence": float,
    "theta0": float,
    "p": float,
    "q": float,
    "regime": str,
    "tau_cycles": int,
    "steps": int,
}


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ValidationError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](_eval_number(value) if CONFIG_KEYS[key] is float else value)
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def load_config(path: str | Path) -> dict:
    return parse_config(Path(path).read_text())


def _eval_number(text: str) -> float:
    """Float literal, optionally written with ``pi`` (``pi/5``, ``2*pi``)."""
    s = text.strip().lower().replace(" ", "")
    if "pi" not in s:
        return float(s)
    num, _, den = s.partition("/")
    num = num.replace("*", "")
    coef = num.replace("pi", "") or "1"
    value = float(coef) * math.pi
    return value / float(den) if den else value


def model_from_mapping(values: dict) -> ValidatedModel:
    """Build and validate a model from flat keys (config file or CLI flags)."""
    params = SystemParams(
        **{k: float(values[k]) for k in ("omega1", "omega2", "chi", "gamma0", "cutoff") if values.get(k) is not None}
    )
    entangled_keys = values.get("lambda0") is not None or values.get("concurrence") is not None
    if values.get("p") is not None or (values.get("q") is not None and not entangled_keys):
        if values.get("p") is not None:
            p = float(values["p"])
        elif values.get("theta0") is not None:
            p = p_from_theta0(float(values["theta0"]))
        else:
            raise ValidationError("product state needs p or theta0")
        init: InitialState = ProductInit(p=p, q=float(values.get("q") if values.get("q") is not None else 0.5))
    else:
        if values.get("lambda0") is not None:
            lam = float(values["lambda0"])
        elif values.get("concurrence") is not None:
            lam = lambda0_from_concurrence(float(values["concurrence"]))
        else:
            raise ValidationError("entangled state needs lambda0 or concurrence")
        init = EntangledInit(lambda0=lam, theta0=float(values.get("theta0") or 0.0))
    return validate(params, init, values.get("regime"))
