"""Method card data model, JSON loading, and load-time validation.

A card that loads without error is safe to hand to the engine: every
expression has parsed against the allowlist, every symbol is a declared
variable, every unit resolves in the registry, and structural rules
(roles, defaults, variant coverage, duplicate targets) have been checked.
Dimensional consistency is a separate pass — ``validate_dimensions`` —
that reports findings rather than raising, so a validator CLI can list
every problem in one run.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

from . import expression as ex
from .errors import DuplicateKey, SchemaError, UndeclaredSymbol
from .units import Dimension, DIMENSIONLESS, UnitRegistry, default_registry

ROLES = ("input", "output", "intermediate", "param")

_ID_RE = re.compile(r"^[A-Z][A-Z0-9_]*$")
_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class VariableSpec:
    key: str
    name: str
    role: str
    unit: str
    description: Optional[str] = None
    default: Optional[float] = None


@dataclass(frozen=True)
class EquationSpec:
    target: str
    sympy: str
    condition: Optional[str] = None
    description: Optional[str] = None
    expr: ex.ExprNode = field(compare=False, default=None, repr=False)
    condition_expr: Optional[ex.ExprNode] = field(compare=False, default=None, repr=False)


@dataclass(frozen=True)
class VariantSpec:
    id: str
    title: str
    equations: tuple


@dataclass(frozen=True)
class Source:
    title: str
    url: Optional[str] = None


@dataclass(frozen=True)
class MethodCard:
    id: str
    title: str
    category: str
    description: str
    variables: tuple
    variants: tuple
    assumptions: tuple
    applicability: tuple
    sources: tuple

    def variable(self, key: str) -> VariableSpec:
        for var in self.variables:
            if var.key == key:
                return var
        raise KeyError(key)

    def variant(self, variant_id: str):
        for var in self.variants:
            if var.id == variant_id:
                return var
        return None

    def variables_by_role(self, role: str) -> list[VariableSpec]:
        return [v for v in self.variables if v.role == role]

    def to_dict(self) -> dict:
        """JSON-ready form; load_card(json.dumps(card.to_dict())) == card."""
        out = {
            "id": self.id,
            "title": self.title,
            "category": self.category,
            "description": self.description,
            "variables": [],
            "variants": [],
            "assumptions": list(self.assumptions),
            "applicability": list(self.applicability),
            "sources": [],
        }
        for v in self.variables:
            entry = {"key": v.key, "name": v.name, "role": v.role, "unit": v.unit}
            if v.description is not None:
                entry["description"] = v.description
            if v.default is not None:
                entry["default"] = v.default
            out["variables"].append(entry)
        for variant in self.variants:
            eqs = []
            for eq in variant.equations:
                entry = {"target": eq.target, "sympy": eq.sympy}
                if eq.condition is not None:
                    entry["condition"] = eq.condition
                if eq.description is not None:
                    entry["description"] = eq.description
                eqs.append(entry)
            out["variants"].append({"id": variant.id, "title": variant.title,
                                    "equations": eqs})
        for s in self.sources:
            entry = {"title": s.title}
            if s.url is not None:
                entry["url"] = s.url
            out["sources"].append(entry)
        return out


# ------------------------------------------------------------------ loading ----

def _require(obj: dict, key: str, kind, path: str):
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing required field")
    value = obj[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"{path}.{key}", f"expected a number, got {type(value).__name__}")
        return float(value)
    if not isinstance(value, kind):
        raise SchemaError(f"{path}.{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _optional_str(obj: dict, key: str, path: str) -> Optional[str]:
    if key not in obj or obj[key] is None:
        return None
    if not isinstance(obj[key], str):
        raise SchemaError(f"{path}.{key}", "expected string")
    return obj[key]


def load_card(json_text: str, registry: UnitRegistry | None = None) -> MethodCard:
    """Deserialize and fully validate one method card."""
    registry = registry or default_registry()
    try:
        raw = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise SchemaError("$", "card must be a JSON object")

    card_id = _require(raw, "id", str, "$")
    if not _ID_RE.match(card_id):
        raise SchemaError("$.id", f"{card_id!r} is not UPPER_SNAKE")
    title = _require(raw, "title", str, "$")
    category = _require(raw, "category", str, "$")
    description = _require(raw, "description", str, "$")

    # Variables
    raw_vars = _require(raw, "variables", list, "$")
    variables: list[VariableSpec] = []
    seen_keys: set[str] = set()
    for i, entry in enumerate(raw_vars):
        path = f"$.variables[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(path, "expected object")
        key = _require(entry, "key", str, path)
        if not _KEY_RE.match(key):
            raise SchemaError(f"{path}.key", f"{key!r} is not a valid symbol")
        if key in ex.CONSTANTS or key == "True" or key in ex.ALLOWED_FUNCTIONS:
            raise SchemaError(f"{path}.key", f"{key!r} is a reserved name")
        if key in seen_keys:
            raise DuplicateKey(key, f"variables of card {card_id}")
        seen_keys.add(key)
        role = _require(entry, "role", str, path)
        if role not in ROLES:
            raise SchemaError(f"{path}.role", f"{role!r} not one of {ROLES}")
        unit_name = _require(entry, "unit", str, path)
        registry.resolve(unit_name)  # raises UnknownUnit
        default = None
        if "default" in entry and entry["default"] is not None:
            default = _require(entry, "default", float, path)
        if role == "param" and default is None:
            raise SchemaError(f"{path}.default", f"param {key!r} requires a default")
        if role != "param" and default is not None:
            raise SchemaError(f"{path}.default", f"role {role!r} forbids a default")
        variables.append(VariableSpec(
            key=key,
            name=_require(entry, "name", str, path),
            role=role,
            unit=unit_name,
            description=_optional_str(entry, "description", path),
            default=default,
        ))
    declared = {v.key for v in variables}
    assignable = {v.key for v in variables if v.role in ("output", "intermediate")}
    outputs = {v.key for v in variables if v.role == "output"}

    # Variants
    raw_variants = _require(raw, "variants", list, "$")
    if not raw_variants:
        raise SchemaError("$.variants", "card must declare at least one variant")
    variants: list[VariantSpec] = []
    seen_variant_ids: set[str] = set()
    for i, entry in enumerate(raw_variants):
        path = f"$.variants[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(path, "expected object")
        vid = _require(entry, "id", str, path)
        if vid in seen_variant_ids:
            raise DuplicateKey(vid, f"variants of card {card_id}")
        seen_variant_ids.add(vid)
        vtitle = _require(entry, "title", str, path)
        raw_eqs = _require(entry, "equations", list, path)
        equations: list[EquationSpec] = []
        unconditioned: set[str] = set()
        for j, eq_entry in enumerate(raw_eqs):
            eq_path = f"{path}.equations[{j}]"
            if not isinstance(eq_entry, dict):
                raise SchemaError(eq_path, "expected object")
            target = _require(eq_entry, "target", str, eq_path)
            if target not in declared:
                raise UndeclaredSymbol(target, target)
            if target not in assignable:
                raise SchemaError(f"{eq_path}.target",
                                  f"{target!r} has role {_role_of(variables, target)!r}; "
                                  "equation targets must be output or intermediate")
            text = _require(eq_entry, "sympy", str, eq_path)
            expr = ex.parse(text)  # ParseError/Disallowed* propagate
            for symbol in ex.free_symbols(expr):
                if symbol not in declared:
                    raise UndeclaredSymbol(target, symbol)
            condition_text = _optional_str(eq_entry, "condition", eq_path)
            condition_expr = None
            if condition_text is not None:
                condition_expr = ex.parse_condition(condition_text)
                for symbol in ex.free_symbols(condition_expr):
                    if symbol not in declared:
                        raise UndeclaredSymbol(target, symbol)
            else:
                if target in unconditioned:
                    raise SchemaError(
                        f"{eq_path}.target",
                        f"{target!r} has more than one unconditioned equation")
                unconditioned.add(target)
            equations.append(EquationSpec(
                target=target,
                sympy=text,
                condition=condition_text,
                description=_optional_str(eq_entry, "description", eq_path),
                expr=expr,
                condition_expr=condition_expr,
            ))
        covered = {eq.target for eq in equations}
        missing = outputs - covered
        if missing:
            raise SchemaError(f"{path}.equations",
                              f"output(s) {sorted(missing)} have no equation in "
                              f"variant {vid!r}")
        variants.append(VariantSpec(id=vid, title=vtitle, equations=tuple(equations)))

    # Lists and sources
    assumptions = tuple(_str_list(raw, "assumptions"))
    applicability = tuple(_str_list(raw, "applicability"))
    raw_sources = _require(raw, "sources", list, "$")
    if not raw_sources:
        raise SchemaError("$.sources", "sources must be non-empty")
    sources = []
    for i, entry in enumerate(raw_sources):
        path = f"$.sources[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(path, "expected object")
        sources.append(Source(title=_require(entry, "title", str, path),
                              url=_optional_str(entry, "url", path)))

    return MethodCard(
        id=card_id, title=title, category=category, description=description,
        variables=tuple(variables), variants=tuple(variants),
        assumptions=assumptions, applicability=applicability,
        sources=tuple(sources),
    )


def _role_of(variables, key):
    for v in variables:
        if v.key == key:
            return v.role
    return None


def _str_list(raw: dict, key: str) -> list[str]:
    value = raw.get(key, [])
    if not isinstance(value, list) or any(not isinstance(s, str) for s in value):
        raise SchemaError(f"$.{key}", "expected a list of strings")
    return value


# ------------------------------------------------------- dimensional audit ----

@dataclass(frozen=True)
class DimensionFinding:
    variant_id: str
    target: str
    message: str

    def __str__(self) -> str:
        return f"[{self.variant_id}] {self.target}: {self.message}"


_TRANSCENDENTAL = frozenset({"sin", "cos", "tan", "cot", "asin", "acos",
                             "atan", "exp", "log"})


def _compatible(d1: Dimension, d2: Dimension) -> bool:
    """Equal dimensions, or an angle/dimensionless pairing.

    Angle is a pseudo-dimension: ``pi/4 + phi/2`` and ``phi > 0`` are
    legitimate card algebra even though pi/4 and 0 are bare numbers, so
    angle and dimensionless mix in additive and comparison positions.
    Conversion (units.convert) stays strict.
    """
    if d1 == d2:
        return True
    return d1.is_angle_like() and d2.is_angle_like()


def _join(d1: Dimension, d2: Dimension) -> Dimension:
    """Result dimension of an additive mix; angle wins over dimensionless."""
    return d1 if not d1.is_dimensionless() else d2


class _DimensionChecker:
    def __init__(self, card: MethodCard, registry: UnitRegistry):
        self.card = card
        self.registry = registry
        self.var_dims = {
            v.key: registry.resolve(v.unit).dimension for v in card.variables
        }
        self.findings: list[DimensionFinding] = []

    def check(self) -> list[DimensionFinding]:
        for variant in self.card.variants:
            for eq in variant.equations:
                self._check_equation(variant.id, eq)
        return self.findings

    def _check_equation(self, variant_id: str, eq: EquationSpec) -> None:
        report = lambda msg: self.findings.append(
            DimensionFinding(variant_id, eq.target, msg))
        result = self._dim(eq.expr, report)
        target_dim = self.var_dims[eq.target]
        if result is not None and not _compatible(result, target_dim):
            report(f"expression has dimension {result}, target declares {target_dim}")
        if eq.condition_expr is not None:
            self._dim(eq.condition_expr, report)

    def _dim(self, node, report) -> Optional[Dimension]:
        """Propagate dimensions; None means already-reported poison."""
        if isinstance(node, ex.Number):
            return DIMENSIONLESS
        if isinstance(node, ex.Constant):
            return DIMENSIONLESS
        if isinstance(node, ex.BoolLiteral):
            return DIMENSIONLESS
        if isinstance(node, ex.Symbol):
            return self.var_dims[node.name]
        if isinstance(node, ex.Unary):
            return self._dim(node.operand, report)
        if isinstance(node, ex.Binary):
            left = self._dim(node.left, report)
            right = self._dim(node.right, report)
            if left is None or right is None:
                return None
            if node.op in ("+", "-"):
                if not _compatible(left, right):
                    report(f"cannot {('add', 'subtract')[node.op == '-']} "
                           f"{left} and {right} in {ex.to_text(node)}")
                    return None
                return _join(left, right)
            if node.op == "*":
                return left * right
            if node.op == "/":
                return left / right
            # ** : dimensionless base stays dimensionless; a dimensioned
            # base needs a literal exponent to produce a typed result.
            if left.is_dimensionless():
                if not right.is_dimensionless():
                    report(f"exponent has dimension {right} in {ex.to_text(node)}")
                    return None
                return DIMENSIONLESS
            exponent = node.right
            if isinstance(exponent, ex.Unary):
                exponent = exponent.operand
            if not isinstance(exponent, ex.Number):
                report(f"dimensioned base requires a numeric literal exponent "
                       f"in {ex.to_text(node)}")
                return None
            power = -exponent.value if isinstance(node.right, ex.Unary) else exponent.value
            return left ** power
        if isinstance(node, ex.Call):
            arg_dims = [self._dim(a, report) for a in node.args]
            if any(d is None for d in arg_dims):
                return None
            if node.func in _TRANSCENDENTAL:
                for d, a in zip(arg_dims, node.args):
                    if not d.is_angle_like():
                        report(f"{node.func} argument {ex.to_text(a)} has "
                               f"dimension {d}; needs angle or dimensionless")
                        return None
                return DIMENSIONLESS
            if node.func == "atan2":
                if not _compatible(arg_dims[0], arg_dims[1]):
                    report(f"atan2 arguments have dimensions {arg_dims[0]} "
                           f"and {arg_dims[1]}")
                    return None
                return DIMENSIONLESS
            if node.func == "sqrt":
                return arg_dims[0] ** 0.5
            if node.func == "Abs":
                return arg_dims[0]
            if node.func in ("Min", "Max"):
                first = arg_dims[0]
                for d in arg_dims[1:]:
                    if not _compatible(first, d):
                        report(f"{node.func} arguments mix {first} and {d}")
                        return None
                    first = _join(first, d)
                return first
            raise AssertionError(node.func)
        if isinstance(node, ex.Piecewise):
            branch_dim: Optional[Dimension] = None
            for value, condition in node.branches:
                self._dim(condition, report)
                d = self._dim(value, report)
                if d is None:
                    continue
                if branch_dim is None:
                    branch_dim = d
                elif not _compatible(branch_dim, d):
                    report(f"Piecewise branches mix {branch_dim} and {d}")
                    return None
                else:
                    branch_dim = _join(branch_dim, d)
            return branch_dim
        if isinstance(node, ex.Comparison):
            left = self._dim(node.left, report)
            right = self._dim(node.right, report)
            if left is not None and right is not None and not _compatible(left, right):
                report(f"comparison mixes {left} and {right} in {ex.to_text(node)}")
            return DIMENSIONLESS
        raise TypeError(f"not an ExprNode: {node!r}")


def validate_dimensions(card: MethodCard,
                        registry: UnitRegistry | None = None) -> list[DimensionFinding]:
    """Unit-dimension audit of every equation in every variant.

    Numeric literals count as dimensionless (published formulas embed
    dimensionless empirical constants); a literal standing in for a
    dimensional constant is a card-authoring error this pass cannot see.
    """
    registry = registry or default_registry()
    return _DimensionChecker(card, registry).check()
