"""Eurocode 7 partial-factor machinery and the ULS footing workflow.

Covers the four EN 1997-1 Design Approach presets (Annex A partial
factors), characteristic-to-design parameter reduction, design action
assembly including foundation self-weight, the ULS bearing check against
the Annex D card, and the bisection search for the required width.

Groundwater handling follows standard practice: effective overburden uses
total stress above the water table and buoyant weight below; the unit
weight entering the 0.5*gamma*B*N_gamma term interpolates linearly between
buoyant and total weight while the water table lies within one footing
width below the base. The scenario's ``surcharge_model`` can neglect the
overburden term entirely ("none"), the conservative convention some worked
examples adopt.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Optional

from .cards import MethodCard
from .catalog import Catalog
from .engine import EvaluationRequest, EvaluationTrace, evaluate_card
from .errors import InvalidGeometry, NoBracket, SchemaError, UnknownDesignApproach
from .units import parse_quantity

GAMMA_WATER = 9.81  # kN/m^3

EC7_CARD_ID = "BEARING_CAPACITY_EUROCODE7"

DESIGN_APPROACHES = ("DA1-C1", "DA1-C2", "DA2", "DA3")

SURCHARGE_MODELS = ("effective_overburden", "none")


@dataclass(frozen=True)
class PartialFactorSet:
    """The EN 1997-1 partial factors for one Design Approach."""

    design_approach: str
    gamma_G: float
    gamma_Q: float
    gamma_phi: float
    gamma_c: float
    gamma_cu: float
    gamma_gamma: float
    gamma_R: float
    sets: str = ""  # e.g. "A2+M2+R1"

    def wire_dict(self) -> dict:
        """The six-factor partials object used on the tool wire."""
        return {
            "gamma_G": self.gamma_G,
            "gamma_Q": self.gamma_Q,
            "gamma_phi": self.gamma_phi,
            "gamma_c": self.gamma_c,
            "gamma_gamma": self.gamma_gamma,
            "gamma_R": self.gamma_R,
        }


# EN 1997-1 Annex A, combined per Design Approach:
#   A1: gamma_G 1.35, gamma_Q 1.5      A2: gamma_G 1.0, gamma_Q 1.3
#   M1: all material factors 1.0       M2: gamma_phi = gamma_c = 1.25, gamma_cu = 1.4
#   R1: 1.0   R2: 1.4   R3: 1.0
_PRESETS = {
    "DA1-C1": PartialFactorSet("DA1-C1", 1.35, 1.5, 1.0, 1.0, 1.0, 1.0, 1.0, "A1+M1+R1"),
    "DA1-C2": PartialFactorSet("DA1-C2", 1.0, 1.3, 1.25, 1.25, 1.4, 1.0, 1.0, "A2+M2+R1"),
    "DA2": PartialFactorSet("DA2", 1.35, 1.5, 1.0, 1.0, 1.0, 1.0, 1.4, "A1+M1+R2"),
    "DA3": PartialFactorSet("DA3", 1.35, 1.5, 1.25, 1.25, 1.4, 1.0, 1.0, "A1+M2+R3"),
}


def get_ec7_preset_partials(design_approach: str) -> PartialFactorSet:
    """Partial factor preset for DA1-C1, DA1-C2, DA2, or DA3."""
    try:
        return _PRESETS[design_approach]
    except KeyError:
        raise UnknownDesignApproach(design_approach) from None


@dataclass(frozen=True)
class SoilParameters:
    """Characteristic or design soil parameters (angles in radians)."""

    phi_prime: float
    c_prime: float
    gamma: float
    c_u: Optional[float] = None


def derive_design_parameters(char: SoilParameters,
                             pf: PartialFactorSet) -> SoilParameters:
    """Reduce characteristic soil parameters to design values.

    phi'_d = atan(tan(phi'_k)/gamma_phi); cohesions and unit weight divide
    by their factors.
    """
    return SoilParameters(
        phi_prime=math.atan(math.tan(char.phi_prime) / pf.gamma_phi),
        c_prime=char.c_prime / pf.gamma_c,
        gamma=char.gamma / pf.gamma_gamma,
        c_u=None if char.c_u is None else char.c_u / pf.gamma_cu,
    )


@dataclass(frozen=True)
class FootingScenario:
    """A strip/rectangular footing design situation.

    All values are card-normalized: metres, kPa, kN, kN/m^3, radians.
    ``B`` may be None while the width is the design unknown.
    """

    L: float
    D_f: float
    phi_prime_k: float
    c_prime_k: float
    gamma_k: float
    groundwater_depth: float
    G_k_col: float
    Q_k: float
    gamma_sw: float
    B: Optional[float] = None
    e: float = 0.0
    c_u_k: Optional[float] = None
    surcharge_model: str = "effective_overburden"
    name: str = ""
    jrc_verified: bool = False

    def __post_init__(self):
        for label, value in (("L", self.L), ("D_f", self.D_f)):
            if value <= 0:
                raise SchemaError(f"$.{label}", "must be positive")
        if self.B is not None and self.B <= 0:
            raise SchemaError("$.B", "must be positive")
        if self.e < 0:
            raise SchemaError("$.e", "must be non-negative")
        if self.surcharge_model not in SURCHARGE_MODELS:
            raise SchemaError("$.surcharge_model",
                              f"must be one of {SURCHARGE_MODELS}")

    @property
    def characteristic_soil(self) -> SoilParameters:
        return SoilParameters(self.phi_prime_k, self.c_prime_k, self.gamma_k,
                              self.c_u_k)


_QUANTITY_FIELDS = {
    # field -> card unit the magnitude is normalized to
    "B": "m", "L": "m", "D_f": "m", "e": "m",
    "phi_prime_k": "radians",
    "c_prime_k": "kPa", "c_u_k": "kPa",
    "gamma_k": "kN/m^3", "gamma_sw": "kN/m^3",
    "groundwater_depth": "m",
    "G_k_col": "kN", "Q_k": "kN",
}

_REQUIRED_FIELDS = ("L", "D_f", "phi_prime_k", "c_prime_k", "gamma_k",
                    "groundwater_depth", "G_k_col", "Q_k", "gamma_sw")


def load_scenario(json_text: str) -> FootingScenario:
    """Parse a scenario file: unit-tagged strings for every physical field."""
    from .units import convert, default_registry

    try:
        raw = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise SchemaError("$", "scenario must be a JSON object")
    registry = default_registry()
    values: dict = {}
    for key in _REQUIRED_FIELDS:
        if key not in raw:
            raise SchemaError(f"$.{key}", "missing required field")
    for key, unit_name in _QUANTITY_FIELDS.items():
        if key not in raw or raw[key] is None:
            continue
        value = raw[key]
        if isinstance(value, str):
            q = parse_quantity(value, registry)
            if q.unit.name == "dimensionless":
                values[key] = q.magnitude
            else:
                values[key] = convert(q, registry.resolve(unit_name)).magnitude
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            values[key] = float(value)
        else:
            raise SchemaError(f"$.{key}", "expected a unit-tagged string or number")
    if "surcharge_model" in raw:
        values["surcharge_model"] = raw["surcharge_model"]
    if "name" in raw:
        values["name"] = raw["name"]
    if "jrc_verified" in raw:
        values["jrc_verified"] = bool(raw["jrc_verified"])
    return FootingScenario(**values)


def load_bundled_scenario(name: str = "jrc_a3") -> FootingScenario:
    text = resources.files("geocard").joinpath(
        f"data/scenarios/{name}.json").read_text("utf-8")
    return load_scenario(text)


def bundled_scenario_path(name: str = "jrc_a3") -> str:
    return str(resources.files("geocard").joinpath(f"data/scenarios/{name}.json"))


# ------------------------------------------------------------ groundwater ----

def effective_overburden(scenario: FootingScenario, gamma_d: float) -> float:
    """Design effective overburden pressure at founding level (kPa)."""
    if scenario.surcharge_model == "none":
        return 0.0
    d_w = scenario.groundwater_depth
    depth = scenario.D_f
    if d_w >= depth:
        return gamma_d * depth
    return gamma_d * d_w + (gamma_d - GAMMA_WATER) * (depth - d_w)


def effective_unit_weight_below_base(scenario: FootingScenario,
                                     gamma_d: float, B: float) -> float:
    """Unit weight for the self-weight term, water-table interpolated."""
    below = scenario.groundwater_depth - scenario.D_f
    buoyant = gamma_d - GAMMA_WATER
    if below <= 0:
        return buoyant
    if below >= B:
        return gamma_d
    return buoyant + (below / B) * (gamma_d - buoyant)


# ------------------------------------------------------------- ULS check ----

@dataclass(frozen=True)
class UlsCheckResult:
    design_approach: str
    B: float
    B_effective: float
    V_d: float
    R_d: float
    utilization: float
    passed: bool
    design_parameters: dict
    partial_factors: PartialFactorSet
    trace: EvaluationTrace
    drainage: str

    def to_dict(self) -> dict:
        util = self.utilization if math.isfinite(self.utilization) else None
        return {
            "design_approach": self.design_approach,
            "drainage": self.drainage,
            "B": self.B,
            "B_effective": self.B_effective,
            "V_d": self.V_d,
            "R_d": self.R_d,
            "utilization": util,
            "pass": self.passed,
            "design_parameters": {k: self.design_parameters[k]
                                  for k in sorted(self.design_parameters)},
            "partial_factors": self.partial_factors.wire_dict(),
            "trace": self.trace.to_dict(),
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)


def compute_design_action(scenario: FootingScenario, pf: PartialFactorSet,
                          B: float) -> float:
    """V_d = gamma_G (G_k,col + W) + gamma_Q Q_k with W = gamma_sw B D_f L."""
    W = scenario.gamma_sw * B * scenario.D_f * scenario.L
    return pf.gamma_G * (scenario.G_k_col + W) + pf.gamma_Q * scenario.Q_k


def check_footing_uls_ec7(scenario: FootingScenario, design_approach: str,
                          B: float, card: MethodCard | None = None,
                          catalog: Catalog | None = None,
                          drainage: str = "drained") -> UlsCheckResult:
    """ULS bearing check at a trial width against the Annex D card."""
    pf = get_ec7_preset_partials(design_approach)
    if B <= 0:
        raise InvalidGeometry(f"width must be positive, got {B:g}")
    B_eff = B - 2.0 * scenario.e
    if B_eff <= 0:
        raise InvalidGeometry(
            f"effective width B - 2e = {B_eff:g} m is not positive")
    if card is None:
        card = _ec7_card(catalog)

    design = derive_design_parameters(scenario.characteristic_soil, pf)
    q_d = effective_overburden(scenario, design.gamma)
    gamma_eff = effective_unit_weight_below_base(scenario, design.gamma, B_eff)

    if drainage not in ("drained", "undrained"):
        raise SchemaError("$.drainage", "must be 'drained' or 'undrained'")
    if drainage == "undrained" and design.c_u is None:
        raise SchemaError("$.c_u_k", "scenario lacks undrained strength c_u_k")

    inputs = {
        "phi_prime_d": design.phi_prime,
        "c_prime_d": design.c_prime,
        "c_u_d": design.c_u if design.c_u is not None else 0.0,
        "gamma": gamma_eff,
        "q": q_d,
        "B": B_eff,
        "L": scenario.L,
    }
    trace = evaluate_card(card, EvaluationRequest(
        card_id=EC7_CARD_ID, variant_id=drainage, inputs=inputs))
    q_ult = trace.outputs["q_ult"].magnitude
    R_d = q_ult * B_eff * scenario.L / pf.gamma_R
    V_d = compute_design_action(scenario, pf, B)
    utilization = V_d / R_d if R_d > 0 else math.inf
    return UlsCheckResult(
        design_approach=design_approach,
        B=B,
        B_effective=B_eff,
        V_d=V_d,
        R_d=R_d,
        utilization=utilization,
        passed=utilization <= 1.0 + 1e-12,
        design_parameters={
            "phi_prime_d": design.phi_prime,
            "c_prime_d": design.c_prime,
            "c_u_d": design.c_u,
            "gamma_d": design.gamma,
            "q_d": q_d,
            "gamma_eff": gamma_eff,
        },
        partial_factors=pf,
        trace=trace,
        drainage=drainage,
    )


@dataclass(frozen=True)
class WidthDesignResult:
    design_approach: str
    B_req: float
    check: UlsCheckResult
    iterations: int

    def to_dict(self) -> dict:
        return {
            "design_approach": self.design_approach,
            "B_req": self.B_req,
            "iterations": self.iterations,
            "check": self.check.to_dict(),
        }


def design_footing_width_ec7(scenario: FootingScenario, design_approach: str,
                             tolerance: float = 1e-3,
                             B_lo: float = 0.1, B_hi: float = 20.0,
                             card: MethodCard | None = None,
                             catalog: Catalog | None = None,
                             drainage: str = "drained") -> WidthDesignResult:
    """Bisection on utilization(B) - 1 for the required footing width.

    Stops when |utilization - 1| < tolerance or the bracket is under 1 mm.
    The bracket [B_lo, B_hi] expands automatically (up to fixed limits)
    when utilization does not cross 1 inside it.
    """
    if card is None:
        card = _ec7_card(catalog)

    min_b = max(2.0 * scenario.e + 1e-6, 1e-4)

    def utilization(width: float) -> float:
        return check_footing_uls_ec7(scenario, design_approach, width,
                                     card=card, drainage=drainage).utilization

    lo = max(B_lo, min_b)
    hi = max(B_hi, lo)
    f_lo = utilization(lo) - 1.0
    f_hi = utilization(hi) - 1.0
    expansions = 0
    while f_lo <= 0.0 and lo > min_b and expansions < 12:
        lo = max(lo / 2.0, min_b)
        f_lo = utilization(lo) - 1.0
        expansions += 1
    while f_hi >= 0.0 and expansions < 24:
        hi *= 2.0
        f_hi = utilization(hi) - 1.0
        expansions += 1
    if f_lo <= 0.0 or f_hi >= 0.0:
        raise NoBracket(lo, hi)

    iterations = 0
    mid = 0.5 * (lo + hi)
    f_mid = utilization(mid) - 1.0
    while abs(f_mid) >= tolerance and (hi - lo) >= 1e-3:
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
        f_mid = utilization(mid) - 1.0
        iterations += 1
        if iterations > 200:
            break
    check = check_footing_uls_ec7(scenario, design_approach, mid,
                                  card=card, drainage=drainage)
    return WidthDesignResult(design_approach=design_approach, B_req=mid,
                             check=check, iterations=iterations)


def _ec7_card(catalog: Catalog | None) -> MethodCard:
    if catalog is not None:
        return catalog.get_method(EC7_CARD_ID)
    from .catalog import load_catalog
    return load_catalog().get_method(EC7_CARD_ID)


def scenario_at_width(scenario: FootingScenario, B: float) -> FootingScenario:
    return replace(scenario, B=B)
