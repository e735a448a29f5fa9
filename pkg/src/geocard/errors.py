"""Exception hierarchy shared across the package.

Every failure mode a caller is expected to handle has its own class, so
tool layers (CLI, MCP server) can map errors to structured payloads
without string matching.
"""

from __future__ import annotations


class GeocardError(Exception):
    """Base class for all errors raised by this package.

    The engine may attach ``partial_trace`` (an EvaluationTrace of the
    steps completed before the fault) and ``failed_step`` (target,
    expression, resolved inputs) so the failing step stays auditable.
    """

    code = "error"
    partial_trace = None
    failed_step = None

    def payload(self) -> dict:
        """Structured form used by the CLI and server error paths."""
        body = {"error": self.code, "message": str(self)}
        if self.failed_step is not None:
            body["step"] = self.failed_step
        if self.partial_trace is not None:
            body["partial_trace"] = self.partial_trace.to_dict()
        return body


# ---------------------------------------------------------------- units ----

class UnitError(GeocardError):
    code = "unit_error"


class UnknownUnit(UnitError):
    code = "unknown_unit"

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown unit: {name!r}")


class MalformedQuantity(UnitError):
    code = "malformed_quantity"

    def __init__(self, text: str):
        self.text = text
        super().__init__(f"cannot parse quantity from {text!r}")


class DimensionMismatch(UnitError):
    code = "dimension_mismatch"

    def __init__(self, source, target, context: str = ""):
        self.source = source
        self.target = target
        where = f" ({context})" if context else ""
        super().__init__(f"incompatible dimensions: {source} vs {target}{where}")


# ----------------------------------------------------------- expressions ----

class ExpressionError(GeocardError):
    code = "expression_error"


class ParseError(ExpressionError):
    code = "parse_error"

    def __init__(self, position: int, message: str):
        self.position = position
        super().__init__(f"parse error at position {position}: {message}")


class DisallowedFunction(ExpressionError):
    code = "disallowed_function"

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"function not in allowlist: {name!r}")


class DisallowedSyntax(ExpressionError):
    code = "disallowed_syntax"

    def __init__(self, description: str):
        self.description = description
        super().__init__(f"disallowed syntax: {description}")


class UnboundSymbol(ExpressionError):
    code = "unbound_symbol"

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"symbol {name!r} is not bound in the environment")


class MathDomain(ExpressionError):
    code = "math_domain"

    def __init__(self, message: str):
        super().__init__(message)


class NoBranchTaken(ExpressionError):
    code = "no_branch_taken"

    def __init__(self):
        super().__init__("no Piecewise condition evaluated to true")


# ------------------------------------------------------------------ cards ----

class CardError(GeocardError):
    code = "card_error"


class SchemaError(CardError):
    code = "schema_error"

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class UndeclaredSymbol(CardError):
    code = "undeclared_symbol"

    def __init__(self, target: str, symbol: str):
        self.target = target
        self.symbol = symbol
        super().__init__(
            f"equation for {target!r} references undeclared symbol {symbol!r}"
        )


class DuplicateKey(CardError):
    code = "duplicate_key"

    def __init__(self, key: str, where: str):
        self.key = key
        super().__init__(f"duplicate key {key!r} in {where}")


# ----------------------------------------------------------------- engine ----

class EngineError(GeocardError):
    code = "engine_error"


class MissingInput(EngineError):
    code = "missing_input"

    def __init__(self, keys):
        self.keys = sorted(keys)
        super().__init__(f"missing required input(s): {', '.join(self.keys)}")


class UnexpectedInput(EngineError):
    code = "unexpected_input"

    def __init__(self, keys):
        self.keys = sorted(keys)
        super().__init__(f"unexpected input key(s): {', '.join(self.keys)}")


class UnresolvedVariable(EngineError):
    code = "unresolved_variable"

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"variable {key!r} cannot be computed from the given inputs")


class NonConvergence(EngineError):
    code = "non_convergence"

    def __init__(self, cycle_keys, iterations: int, residual: float):
        self.cycle_keys = sorted(cycle_keys)
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"fixed-point iteration over {{{', '.join(self.cycle_keys)}}} did not "
            f"converge after {iterations} iterations (residual {residual:.3e})"
        )


class ConditionConflict(EngineError):
    code = "condition_conflict"

    def __init__(self, target: str):
        self.target = target
        super().__init__(f"multiple equation conditions satisfied for target {target!r}")


# ---------------------------------------------------------------- catalog ----

class UnknownMethod(GeocardError):
    code = "unknown_method"

    def __init__(self, card_id: str):
        self.card_id = card_id
        super().__init__(f"unknown method card: {card_id!r}")


class UnknownVariant(GeocardError):
    code = "unknown_variant"

    def __init__(self, card_id: str, variant_id: str):
        self.card_id = card_id
        self.variant_id = variant_id
        super().__init__(f"card {card_id!r} has no variant {variant_id!r}")


# -------------------------------------------------------------------- ec7 ----

class UnknownDesignApproach(GeocardError):
    code = "unknown_design_approach"

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"unknown design approach: {label!r}")


class InvalidGeometry(GeocardError):
    code = "invalid_geometry"

    def __init__(self, message: str):
        super().__init__(message)


class NoBracket(GeocardError):
    code = "no_bracket"

    def __init__(self, lo: float, hi: float):
        self.lo = lo
        self.hi = hi
        super().__init__(
            f"utilization does not cross 1.0 for widths in [{lo:g} m, {hi:g} m]"
        )


# ------------------------------------------------------------------ skills ----

class UnknownSkill(GeocardError):
    code = "unknown_skill"

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown skill: {name!r}")
