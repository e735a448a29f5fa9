"""Card execution: dependency-ordered evaluation with a full audit trace.

Solving is staged. Stage 1 makes repeated passes over the variant's
equations, assigning any target whose free symbols are all bound and whose
condition (if any) holds; each productive pass binds at least one target,
so it terminates in at most |equations| passes. Stage 2 handles targets
left over because they form a dependency cycle: plain fixed-point
iteration from 1.0 in card units, re-evaluating the cycle equations in
listed order until the largest relative change drops below 1e-9 (hard cap
200 iterations). Anything still unassigned is an error, never a silent
omission — the trace must cover every intermediate and output variable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from . import expression as ex
from .cards import EquationSpec, MethodCard
from .errors import (
    ConditionConflict,
    GeocardError,
    MissingInput,
    NonConvergence,
    UnexpectedInput,
    UnknownMethod,
    UnknownVariant,
    UnresolvedVariable,
)
from .units import (
    Quantity,
    UnitRegistry,
    convert,
    default_registry,
    format_quantity,
    split_quantity_text,
)

FIXED_POINT_TOL = 1e-9
FIXED_POINT_MAX_ITER = 200

InputValue = Union[Quantity, float, int, str]


@dataclass(frozen=True)
class EvaluationRequest:
    card_id: str
    variant_id: str
    inputs: Mapping[str, InputValue]
    overrides: Mapping[str, InputValue] = field(default_factory=dict)


@dataclass(frozen=True)
class TraceStep:
    index: int
    target: str
    expression: str
    inputs: dict
    result: Quantity
    description: Optional[str]
    method: str  # "direct" | "iterative"

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "target": self.target,
            "expression": self.expression,
            "inputs": {k: self.inputs[k] for k in sorted(self.inputs)},
            "value": self.result.magnitude,
            "unit": self.result.unit.name,
            "description": self.description,
            "method": self.method,
        }


@dataclass(frozen=True)
class EvaluationTrace:
    card_id: str
    variant_id: str
    request_inputs: dict
    request_overrides: dict
    steps: tuple
    outputs: dict  # key -> Quantity
    sources: tuple
    diagnostics: dict

    def to_dict(self) -> dict:
        """Canonical serialization: request, steps, outputs, sources, diagnostics."""
        return {
            "request": {
                "card": self.card_id,
                "variant": self.variant_id,
                "inputs": {k: self.request_inputs[k] for k in sorted(self.request_inputs)},
                "overrides": {k: self.request_overrides[k]
                              for k in sorted(self.request_overrides)},
            },
            "steps": [s.to_dict() for s in self.steps],
            "outputs": {
                k: {"value": self.outputs[k].magnitude, "unit": self.outputs[k].unit.name}
                for k in sorted(self.outputs)
            },
            "sources": [
                {"title": s.title, "url": s.url} for s in self.sources
            ],
            "diagnostics": self.diagnostics,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)


def _echo_value(value: InputValue):
    if isinstance(value, Quantity):
        return format_quantity(value)
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float, str)):
        return value
    return str(value)


def normalize_inputs(card: MethodCard, raw: Mapping[str, InputValue],
                     registry: UnitRegistry | None = None) -> dict[str, float]:
    """Convert every supplied value to the card's declared unit magnitude.

    Accepts Quantity objects, unit-tagged strings ("38 deg"), and bare
    numbers; bare numbers are trusted as already card-normalized.
    """
    registry = registry or default_registry()
    required = {v.key for v in card.variables if v.role == "input"}
    supplied = set(raw)
    missing = required - supplied
    if missing:
        raise MissingInput(missing)
    extra = supplied - required
    if extra:
        raise UnexpectedInput(extra)
    return {key: _normalize_one(card, key, raw[key], registry) for key in raw}


def _normalize_one(card: MethodCard, key: str, value: InputValue,
                   registry: UnitRegistry) -> float:
    if isinstance(value, bool):
        raise UnexpectedInput([key])
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        magnitude, unit_name = split_quantity_text(value)
        if not unit_name:
            # Bare number in string form: card-normalized, like a bare real.
            return magnitude
        value = Quantity(magnitude, registry.resolve(unit_name))
    target_unit = registry.resolve(card.variable(key).unit)
    return convert(value, target_unit).magnitude


class _Runner:
    def __init__(self, card: MethodCard, request: EvaluationRequest,
                 registry: UnitRegistry):
        self.card = card
        self.request = request
        self.registry = registry
        self.steps: list[TraceStep] = []
        self.env: dict[str, float] = {}
        self.cycles: list[dict] = []

    # -- helpers -------------------------------------------------------------

    def _unit_of(self, key: str):
        return self.registry.resolve(self.card.variable(key).unit)

    def _partial_trace(self) -> EvaluationTrace:
        return self._trace(outputs={})

    def _trace(self, outputs: dict) -> EvaluationTrace:
        return EvaluationTrace(
            card_id=self.card.id,
            variant_id=self.request.variant_id,
            request_inputs={k: _echo_value(v) for k, v in self.request.inputs.items()},
            request_overrides={k: _echo_value(v) for k, v in self.request.overrides.items()},
            steps=tuple(self.steps),
            outputs=outputs,
            sources=self.card.sources,
            diagnostics={"iterative_cycles": self.cycles},
        )

    def _attach(self, exc: GeocardError, eq: Optional[EquationSpec]) -> GeocardError:
        """Attach the partial trace and failing step to a fault, in place."""
        exc.partial_trace = self._partial_trace()
        if eq is not None:
            exc.failed_step = {
                "target": eq.target,
                "expression": eq.sympy,
                "inputs": {k: self.env[k] for k in sorted(
                    ex.free_symbols(eq.expr) & self.env.keys())},
            }
        return exc

    def _eval(self, node, eq: Optional[EquationSpec]) -> float:
        try:
            return ex.evaluate(node, self.env)
        except GeocardError as exc:
            raise self._attach(exc, eq)

    def _choose_equation(self, target: str,
                         equations: list[EquationSpec]) -> Optional[EquationSpec]:
        """Pick the applicable equation for a target, or None to postpone.

        Raises ConditionConflict when more than one condition holds.
        """
        conditioned = [eq for eq in equations if eq.condition_expr is not None]
        fallback = next((eq for eq in equations if eq.condition_expr is None), None)
        for eq in conditioned:
            if not ex.free_symbols(eq.condition_expr) <= self.env.keys():
                return None  # cannot decide yet
        satisfied = [eq for eq in conditioned
                     if self._eval(eq.condition_expr, eq)]
        if len(satisfied) > 1:
            raise self._attach(ConditionConflict(target), satisfied[1])
        if satisfied:
            return satisfied[0]
        if fallback is not None:
            return fallback
        raise self._attach(UnresolvedVariable(target), equations[0])

    def _record(self, eq: EquationSpec, value: float, method: str) -> None:
        used = {k: self.env[k] for k in sorted(ex.free_symbols(eq.expr))
                if k in self.env}
        self.env[eq.target] = value
        self.steps.append(TraceStep(
            index=len(self.steps),
            target=eq.target,
            expression=eq.sympy,
            inputs=used,
            result=Quantity(value, self._unit_of(eq.target)),
            description=eq.description,
            method=method,
        ))

    # -- main ----------------------------------------------------------------

    def run(self) -> EvaluationTrace:
        card, request = self.card, self.request
        variant = card.variant(request.variant_id)
        if variant is None:
            raise UnknownVariant(card.id, request.variant_id)

        self.env.update(normalize_inputs(card, request.inputs, self.registry))
        for var in card.variables_by_role("param"):
            self.env[var.key] = float(var.default)
        if request.overrides:
            params = {v.key for v in card.variables_by_role("param")}
            bad = set(request.overrides) - params
            if bad:
                raise UnexpectedInput(bad)
            for key, value in request.overrides.items():
                self.env[key] = _normalize_one(card, key, value, self.registry)

        order: list[str] = []
        pending: dict[str, list[EquationSpec]] = {}
        for eq in variant.equations:
            if eq.target not in pending:
                pending[eq.target] = []
                order.append(eq.target)
            pending[eq.target].append(eq)

        # Stage 1: dependency resolution by repeated passes.
        progress = True
        while progress and pending:
            progress = False
            for target in order:
                if target not in pending:
                    continue
                equations = pending[target]
                if not self._conditions_decidable(equations):
                    continue
                chosen = self._choose_equation(target, equations)
                if chosen is None:
                    continue
                if ex.free_symbols(chosen.expr) <= self.env.keys():
                    value = self._eval(chosen.expr, chosen)
                    self._record(chosen, value, "direct")
                    del pending[target]
                    progress = True

        # Stage 2: fixed-point iteration over a residual cycle.
        if pending:
            self._solve_cycle(order, pending)

        outputs = {v.key: Quantity(self.env[v.key], self._unit_of(v.key))
                   for v in card.variables_by_role("output")}
        return self._trace(outputs)

    def _conditions_decidable(self, equations: list[EquationSpec]) -> bool:
        return all(
            eq.condition_expr is None
            or ex.free_symbols(eq.condition_expr) <= self.env.keys()
            for eq in equations
        )

    def _solve_cycle(self, order: list[str],
                     pending: dict[str, list[EquationSpec]]) -> None:
        cycle = [t for t in order if t in pending]
        producible = self.env.keys() | pending.keys()
        for target in cycle:
            for eq in pending[target]:
                needed = ex.free_symbols(eq.expr)
                if eq.condition_expr is not None:
                    needed |= ex.free_symbols(eq.condition_expr)
                unmet = needed - producible
                if unmet:
                    raise self._attach(UnresolvedVariable(sorted(unmet)[0]), eq)

        for target in cycle:
            self.env[target] = 1.0

        residual = float("inf")
        iterations = 0
        chosen: dict[str, EquationSpec] = {}
        for iterations in range(1, FIXED_POINT_MAX_ITER + 1):
            residual = 0.0
            for target in cycle:
                eq = self._choose_equation(target, pending[target])
                chosen[target] = eq
                old = self.env[target]
                new = self._eval(eq.expr, eq)
                if not math.isfinite(new):
                    raise self._attach(
                        NonConvergence(cycle, iterations, math.inf), eq)
                denom = max(abs(old), abs(new))
                change = 0.0 if denom == 0.0 else abs(new - old) / denom
                residual = max(residual, change)
                self.env[target] = new
            if residual < FIXED_POINT_TOL:
                break
        else:
            raise self._attach(
                NonConvergence(cycle, FIXED_POINT_MAX_ITER, residual),
                pending[cycle[0]][0])

        for target in cycle:
            eq = chosen[target]
            self._record(eq, self.env[target], "iterative")
        self.cycles.append({
            "variables": cycle,
            "iterations": iterations,
            "residual": residual,
        })
        pending.clear()


def evaluate_card(card: MethodCard, request: EvaluationRequest,
                  registry: UnitRegistry | None = None) -> EvaluationTrace:
    """Evaluate one variant of a card and return the complete audit trace."""
    if card.id != request.card_id:
        raise UnknownMethod(request.card_id)
    return _Runner(card, request, registry or default_registry()).run()
