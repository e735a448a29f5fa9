"""Physical quantities, units, and dimensional compatibility checks.

Dimensions are exponent vectors over four bases: length, mass, time, and
angle. Angle is tracked as its own pseudo-dimension so that degree/radian
conversion is always explicit — a quantity tagged ``deg`` can never be
silently consumed where ``radians`` are expected.

The registry is a flat table of named units, each with a dimension and a
scale factor to the coherent SI value of that dimension. It is loaded from
a JSON table (a bundled default ships with the package) and is immutable
after construction, so all operations here are pure and thread-safe.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping, Union

from .errors import DimensionMismatch, MalformedQuantity, UnknownUnit

BASES = ("length", "mass", "time", "angle")


@dataclass(frozen=True)
class Dimension:
    """Signed rational exponents over the base dimensions."""

    length: Fraction = Fraction(0)
    mass: Fraction = Fraction(0)
    time: Fraction = Fraction(0)
    angle: Fraction = Fraction(0)

    def __mul__(self, other: "Dimension") -> "Dimension":
        return Dimension(
            self.length + other.length,
            self.mass + other.mass,
            self.time + other.time,
            self.angle + other.angle,
        )

    def __truediv__(self, other: "Dimension") -> "Dimension":
        return Dimension(
            self.length - other.length,
            self.mass - other.mass,
            self.time - other.time,
            self.angle - other.angle,
        )

    def __pow__(self, exponent) -> "Dimension":
        p = Fraction(exponent).limit_denominator(1000)
        return Dimension(self.length * p, self.mass * p, self.time * p, self.angle * p)

    def is_dimensionless(self) -> bool:
        return not (self.length or self.mass or self.time or self.angle)

    def is_angle_like(self) -> bool:
        """Pure angle or dimensionless: admissible to transcendental functions."""
        return not (self.length or self.mass or self.time)

    def __str__(self) -> str:
        parts = []
        for base in BASES:
            exp = getattr(self, base)
            if exp:
                parts.append(base if exp == 1 else f"{base}^{exp}")
        return "·".join(parts) if parts else "dimensionless"


DIMENSIONLESS = Dimension()
ANGLE = Dimension(angle=Fraction(1))
LENGTH = Dimension(length=Fraction(1))
PRESSURE = Dimension(length=Fraction(-1), mass=Fraction(1), time=Fraction(-2))
FORCE = Dimension(length=Fraction(1), mass=Fraction(1), time=Fraction(-2))


@dataclass(frozen=True)
class Unit:
    """A named unit: dimension plus scale factor to coherent SI."""

    name: str
    dimension: Dimension
    scale: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError(f"unit {self.name!r} must have positive scale")

    def __str__(self) -> str:
        return self.name


def check_dimension(lhs: Dimension, rhs: Dimension) -> bool:
    """True iff the exponent vectors are equal."""
    return lhs == rhs


@dataclass(frozen=True)
class Quantity:
    """A magnitude tagged with a unit; the numeric currency between modules."""

    magnitude: float
    unit: Unit

    @property
    def dimension(self) -> Dimension:
        return self.unit.dimension

    def to(self, target: Unit) -> "Quantity":
        return convert(self, target)

    def __add__(self, other: "Quantity") -> "Quantity":
        if not isinstance(other, Quantity):
            return NotImplemented
        other = convert(other, self.unit)
        return Quantity(self.magnitude + other.magnitude, self.unit)

    def __sub__(self, other: "Quantity") -> "Quantity":
        if not isinstance(other, Quantity):
            return NotImplemented
        other = convert(other, self.unit)
        return Quantity(self.magnitude - other.magnitude, self.unit)

    def __mul__(self, other: Union["Quantity", float, int]) -> "Quantity":
        if isinstance(other, (int, float)):
            return Quantity(self.magnitude * other, self.unit)
        unit = Unit(
            name=f"{self.unit.name}*{other.unit.name}",
            dimension=self.unit.dimension * other.unit.dimension,
            scale=self.unit.scale * other.unit.scale,
        )
        return Quantity(self.magnitude * other.magnitude, unit)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["Quantity", float, int]) -> "Quantity":
        if isinstance(other, (int, float)):
            return Quantity(self.magnitude / other, self.unit)
        unit = Unit(
            name=f"{self.unit.name}/{other.unit.name}",
            dimension=self.unit.dimension / other.unit.dimension,
            scale=self.unit.scale / other.unit.scale,
        )
        return Quantity(self.magnitude / other.magnitude, unit)

    def __str__(self) -> str:
        return format_quantity(self)


def convert(q: Quantity, target: Unit) -> Quantity:
    """Re-express ``q`` in ``target`` units, preserving the physical value."""
    if q.unit.dimension != target.dimension:
        raise DimensionMismatch(q.unit.dimension, target.dimension,
                                f"{q.unit.name} -> {target.name}")
    if q.unit == target:
        return q
    return Quantity(q.magnitude * q.unit.scale / target.scale, target)


class UnitRegistry:
    """Immutable name -> Unit table with a small alias map."""

    def __init__(self, units: Iterable[Unit], aliases: Mapping[str, str] = ()):
        self._units = {u.name: u for u in units}
        self._aliases = dict(aliases or {})
        for alias, canonical in self._aliases.items():
            if canonical not in self._units:
                raise UnknownUnit(canonical)

    def resolve(self, name: str) -> Unit:
        key = self._aliases.get(name, name)
        try:
            return self._units[key]
        except KeyError:
            raise UnknownUnit(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._units or name in self._aliases

    def names(self) -> list[str]:
        return sorted(self._units)

    @property
    def dimensionless(self) -> Unit:
        return self._units["dimensionless"]

    @classmethod
    def from_json(cls, text: str) -> "UnitRegistry":
        table = json.loads(text)
        units = []
        for entry in table["units"]:
            exps = entry.get("dimension", {})
            dim = Dimension(**{
                base: Fraction(exps.get(base, 0)) for base in BASES
            })
            units.append(Unit(entry["name"], dim, float(entry["scale"])))
        return cls(units, table.get("aliases", {}))

    @classmethod
    def bundled(cls) -> "UnitRegistry":
        text = resources.files("geocard").joinpath("data/units.json").read_text("utf-8")
        return cls.from_json(text)


_NUMBER_RE = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)\s*(.*)$")


def split_quantity_text(text: str) -> tuple[float, str]:
    """Split ``"<number> <unit-name>"`` into (magnitude, unit name).

    The unit name is the empty string for a bare number; callers that
    distinguish bare numbers from explicitly dimensionless quantities
    need this distinction, which Quantity no longer carries.
    """
    if not isinstance(text, str):
        raise MalformedQuantity(repr(text))
    match = _NUMBER_RE.match(text)
    if not match or not match.group(1):
        raise MalformedQuantity(text)
    return float(match.group(1)), match.group(2).strip()


def parse_quantity(text: str, registry: "UnitRegistry | None" = None) -> Quantity:
    """Parse ``"<number> <unit-name>"``; a bare number is dimensionless.

    Unit names are case-sensitive registry names or documented aliases
    (``deg``/``degree``, ``kN/m^3`` = ``kN/m³``). Compound unit expressions
    such as ``"kN*m"`` are not part of the format and raise UnknownUnit.
    """
    registry = registry or default_registry()
    magnitude, unit_name = split_quantity_text(text)
    if not unit_name:
        return Quantity(magnitude, registry.dimensionless)
    return Quantity(magnitude, registry.resolve(unit_name))


def format_quantity(q: Quantity) -> str:
    """Inverse of parse_quantity on registry units."""
    if q.unit.dimension.is_dimensionless() and q.unit.name == "dimensionless":
        return repr(q.magnitude)
    return f"{q.magnitude!r} {q.unit.name}"


_DEFAULT: "UnitRegistry | None" = None


def default_registry() -> UnitRegistry:
    """The bundled registry, loaded once per process."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = UnitRegistry.bundled()
    return _DEFAULT
