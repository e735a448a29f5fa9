"""Markdown calculation reports rendered from evaluation traces.

Reports show 4 significant figures; the JSON trace remains the lossless
record. Every number printed here comes from the trace, and the source
list is copied verbatim from the card so the reference list is generated,
not hand-maintained.
"""

from __future__ import annotations

from .cards import MethodCard
from .engine import EvaluationTrace


def format_sig(value: float, figures: int = 4) -> str:
    """Format to a fixed number of significant figures, trimming exponents
    for magnitudes a report reader expects in plain notation."""
    if value == 0:
        return "0"
    text = f"{value:.{figures}g}"
    if "e" in text or "E" in text:
        mantissa, _, exponent = text.partition("e")
        exp = int(exponent)
        if -4 < exp < 7:
            text = f"{value:.{max(figures - exp - 1, 0)}f}".rstrip("0").rstrip(".")
    return text


def render_report(trace: EvaluationTrace, card: MethodCard) -> str:
    """Render a trace as a Markdown calculation report."""
    variant = card.variant(trace.variant_id)
    lines = [
        f"# {card.title}",
        "",
        f"Method card: `{card.id}`, variant `{trace.variant_id}`"
        + (f" ({variant.title})" if variant else ""),
        "",
        "## Inputs",
        "",
    ]
    for key in sorted(trace.request_inputs):
        lines.append(f"- `{key}` = {trace.request_inputs[key]}")
    if trace.request_overrides:
        lines.append("")
        lines.append("Parameter overrides:")
        for key in sorted(trace.request_overrides):
            lines.append(f"- `{key}` = {trace.request_overrides[key]}")

    lines += ["", "## Calculation Steps", ""]
    for step in trace.steps:
        unit = step.result.unit.name
        unit_text = "" if unit == "dimensionless" else f" {unit}"
        lines.append(f"### Step {step.index + 1}: `{step.target}`")
        if step.description:
            lines.append(f"*{step.description}*")
        lines.append("")
        lines.append(f"    {step.target} = {step.expression}")
        if step.inputs:
            substituted = ", ".join(
                f"{k} = {format_sig(v)}" for k, v in sorted(step.inputs.items()))
            lines.append(f"    with {substituted}")
        marker = " (fixed-point iteration)" if step.method == "iterative" else ""
        lines.append(f"    {step.target} = {format_sig(step.result.magnitude)}"
                     f"{unit_text}{marker}")
        lines.append("")

    lines += ["## Outputs", ""]
    for key in sorted(trace.outputs):
        q = trace.outputs[key]
        unit_text = "" if q.unit.name == "dimensionless" else f" {q.unit.name}"
        lines.append(f"- **{key}** = {format_sig(q.magnitude)}{unit_text}")

    if trace.diagnostics.get("iterative_cycles"):
        lines += ["", "## Solver Diagnostics", ""]
        for cycle in trace.diagnostics["iterative_cycles"]:
            lines.append(
                f"- fixed-point cycle over {{{', '.join(cycle['variables'])}}}: "
                f"{cycle['iterations']} iterations, residual "
                f"{cycle['residual']:.2e}")

    if card.assumptions:
        lines += ["", "## Assumptions", ""]
        lines += [f"- {a}" for a in card.assumptions]
    if card.applicability:
        lines += ["", "## Applicability", ""]
        lines += [f"- {a}" for a in card.applicability]

    lines += ["", "## Sources", ""]
    for i, source in enumerate(trace.sources, start=1):
        entry = f"{i}. {source.title}"
        if source.url:
            entry += f" <{source.url}>"
        lines.append(entry)
    lines.append("")
    return "\n".join(lines)
