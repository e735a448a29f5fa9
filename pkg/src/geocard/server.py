"""MCP tool server: JSON-RPC 2.0 over stdio, newline-delimited.

One message per line in both directions (responses are compact JSON, so
they never contain raw newlines). Requests are processed strictly in
arrival order; every calculation tool is pure over the immutable catalog
and skill library, so identical transcripts replay byte-for-byte. The only
mutable state is the in-memory session default map, which fills missing
scalar inputs and never overrides an explicit argument or selects a
card/variant/skill.
"""

from __future__ import annotations

import json
import sys
import time
from typing import Optional, TextIO

from . import __version__
from .catalog import Catalog, load_catalog
from .ec7 import (
    check_footing_uls_ec7,
    design_footing_width_ec7,
    get_ec7_preset_partials,
    load_scenario,
)
from .engine import EvaluationRequest, evaluate_card
from .errors import GeocardError
from .skills import SkillLibrary, load_skills

PROTOCOL_VERSION = "2024-11-05"
SERVER_NAME = "geocard"

INSTRUCTIONS = (
    "This server exposes verified geotechnical method cards, Eurocode 7 "
    "design workflows, and analysis skills. Follow a skill-first workflow: "
    "when given an engineering problem, first call geo_recommend_skills "
    "with a short problem description, then load the top match with "
    "geo_get_skill (include_references=true) and follow its procedure "
    "before invoking any calculation tool. Calculation results include a "
    "complete trace (inputs, every intermediate step, outputs, sources); "
    "surface that trace to the user rather than recomputing values. "
    "Prefer unit-tagged inputs (e.g. \"30 deg\", \"18 kN/m^3\") via "
    "geo_evaluate_with_units so the engine performs unit conversion."
)

# JSON-RPC error codes
PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603


def _schema(properties: dict, required: list) -> dict:
    return {
        "type": "object",
        "properties": properties,
        "required": required,
        "additionalProperties": False,
    }


TOOLS: list[dict] = [
    {
        "name": "geo_list_methods",
        "description": "List the method cards in the catalog (id, title, "
                       "category, variant ids), optionally filtered by exact "
                       "category string.",
        "inputSchema": _schema(
            {"category": {"type": "string"}}, []),
    },
    {
        "name": "geo_get_method",
        "description": "Retrieve one complete method card for inspection: "
                       "variables, variants, equations, assumptions, "
                       "applicability, sources.",
        "inputSchema": _schema(
            {"id": {"type": "string"}}, ["id"]),
    },
    {
        "name": "geo_evaluate",
        "description": "Evaluate a card variant with numeric inputs already "
                       "normalized to the card's declared units. Returns the "
                       "full evaluation trace.",
        "inputSchema": _schema(
            {
                "card": {"type": "string"},
                "variant": {"type": "string"},
                "inputs": {"type": "object"},
                "overrides": {"type": "object"},
            },
            ["card", "variant", "inputs"]),
    },
    {
        "name": "geo_evaluate_with_units",
        "description": "Evaluate a card variant with unit-tagged string "
                       "inputs (e.g. \"30 deg\"); values are converted to "
                       "the card's units before evaluation. Returns the full "
                       "evaluation trace.",
        "inputSchema": _schema(
            {
                "card": {"type": "string"},
                "variant": {"type": "string"},
                "inputs": {"type": "object"},
                "overrides": {"type": "object"},
            },
            ["card", "variant", "inputs"]),
    },
    {
        "name": "geo_list_skills",
        "description": "List available analysis skills (name, description, "
                       "category, version).",
        "inputSchema": _schema({}, []),
    },
    {
        "name": "geo_recommend_skills",
        "description": "Rank analysis skills by relevance to a problem "
                       "description. Call this before any calculation tool.",
        "inputSchema": _schema(
            {"query": {"type": "string"}, "limit": {"type": "integer"}},
            ["query"]),
    },
    {
        "name": "geo_get_skill",
        "description": "Retrieve a skill's full instructions, optionally "
                       "with its reference documents.",
        "inputSchema": _schema(
            {"name": {"type": "string"},
             "include_references": {"type": "boolean"}},
            ["name"]),
    },
    {
        "name": "geo_get_ec7_preset_partials",
        "description": "Standard EN 1997-1 partial factor set for a Design "
                       "Approach (DA1-C1, DA1-C2, DA2, DA3).",
        "inputSchema": _schema(
            {"design_approach": {"type": "string"}}, ["design_approach"]),
    },
    {
        "name": "geo_check_footing_uls_ec7",
        "description": "Eurocode 7 ULS bearing check of a footing scenario "
                       "at a given width: derives design parameters, "
                       "evaluates the Annex D card, returns V_d, R_d, "
                       "utilization, and the full trace.",
        "inputSchema": _schema(
            {
                "scenario": {"type": "object"},
                "design_approach": {"type": "string"},
                "B": {"type": ["number", "string"]},
                "drainage": {"type": "string"},
            },
            ["scenario", "design_approach", "B"]),
    },
    {
        "name": "geo_design_footing_width_ec7",
        "description": "Search (bisection) for the footing width where the "
                       "Eurocode 7 utilization reaches 1.0 for a Design "
                       "Approach; returns the width and the converged check.",
        "inputSchema": _schema(
            {
                "scenario": {"type": "object"},
                "design_approach": {"type": "string"},
                "tolerance": {"type": "number"},
                "drainage": {"type": "string"},
            },
            ["scenario", "design_approach"]),
    },
    {
        "name": "geo_session_set_defaults",
        "description": "Store session default values for scalar card inputs "
                       "(unit-tagged strings or numbers). Defaults fill "
                       "missing inputs in later evaluate calls; explicit "
                       "arguments always win. Defaults never select cards, "
                       "variants, or skills.",
        "inputSchema": _schema(
            {"defaults": {"type": "object"}}, ["defaults"]),
    },
    {
        "name": "geo_health",
        "description": "Diagnostic health check: catalog and skill load "
                       "status, counts, and server version.",
        "inputSchema": _schema({}, []),
    },
]

_TYPE_CHECKS = {
    "string": lambda v: isinstance(v, str),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "boolean": lambda v: isinstance(v, bool),
    "object": lambda v: isinstance(v, dict),
}


def validate_arguments(schema: dict, arguments: dict) -> Optional[str]:
    """Return a complaint string when arguments violate the schema."""
    if not isinstance(arguments, dict):
        return "arguments must be an object"
    for key in schema["required"]:
        if key not in arguments:
            return f"missing required argument {key!r}"
    for key, value in arguments.items():
        if key not in schema["properties"]:
            return f"unexpected argument {key!r}"
        declared = schema["properties"][key].get("type")
        types = declared if isinstance(declared, list) else [declared]
        if not any(_TYPE_CHECKS[t](value) for t in types):
            return f"argument {key!r} must be of type {' or '.join(types)}"
    return None


class SessionContext:
    def __init__(self, session_id: str = "default"):
        self.session_id = session_id
        self.defaults: dict = {}
        self.created_at = time.time()  # internal only; never serialized


class McpServer:
    """Dispatches MCP requests over newline-delimited JSON-RPC."""

    def __init__(self, catalog: Catalog | None = None,
                 skills: SkillLibrary | None = None):
        self.catalog = catalog if catalog is not None else load_catalog()
        self.skills = skills if skills is not None else load_skills()
        self.session = SessionContext()
        self._handlers = {
            "geo_list_methods": self._tool_list_methods,
            "geo_get_method": self._tool_get_method,
            "geo_evaluate": self._tool_evaluate,
            "geo_evaluate_with_units": self._tool_evaluate_with_units,
            "geo_list_skills": self._tool_list_skills,
            "geo_recommend_skills": self._tool_recommend_skills,
            "geo_get_skill": self._tool_get_skill,
            "geo_get_ec7_preset_partials": self._tool_preset_partials,
            "geo_check_footing_uls_ec7": self._tool_check_uls,
            "geo_design_footing_width_ec7": self._tool_design_width,
            "geo_session_set_defaults": self._tool_set_defaults,
            "geo_health": self._tool_health,
        }

    # ---------------------------------------------------------- transport ----

    def serve(self, stdin: TextIO = None, stdout: TextIO = None) -> None:
        """Run until stdin closes."""
        stdin = stdin if stdin is not None else sys.stdin
        stdout = stdout if stdout is not None else sys.stdout
        for line in stdin:
            line = line.strip()
            if not line:
                continue
            try:
                message = json.loads(line)
            except json.JSONDecodeError:
                self._write(stdout, {
                    "jsonrpc": "2.0", "id": None,
                    "error": {"code": PARSE_ERROR, "message": "parse error"},
                })
                continue
            response = self.handle_message(message)
            if response is not None:
                self._write(stdout, response)

    @staticmethod
    def _write(stdout: TextIO, obj: dict) -> None:
        stdout.write(json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n")
        stdout.flush()

    # ----------------------------------------------------------- dispatch ----

    def handle_message(self, message) -> Optional[dict]:
        """Handle one decoded message; None for notifications."""
        if not isinstance(message, dict) or message.get("jsonrpc") != "2.0":
            if isinstance(message, dict) and "id" not in message:
                return None
            return self._error(message.get("id") if isinstance(message, dict) else None,
                               INVALID_REQUEST, "invalid request")
        is_notification = "id" not in message
        msg_id = message.get("id")
        method = message.get("method")
        params = message.get("params") or {}

        if method == "initialize":
            result = {
                "protocolVersion": PROTOCOL_VERSION,
                "capabilities": {"tools": {}},
                "serverInfo": {"name": SERVER_NAME, "version": __version__},
                "instructions": INSTRUCTIONS,
            }
            return None if is_notification else self._result(msg_id, result)
        if method == "notifications/initialized":
            return None
        if method == "ping":
            return None if is_notification else self._result(msg_id, {})
        if method == "tools/list":
            return None if is_notification else self._result(
                msg_id, {"tools": TOOLS})
        if method == "tools/call":
            if is_notification:
                return None
            return self._call_tool(msg_id, params)
        if is_notification:
            return None
        return self._error(msg_id, METHOD_NOT_FOUND, f"method not found: {method}")

    def _call_tool(self, msg_id, params) -> dict:
        if not isinstance(params, dict) or not isinstance(params.get("name"), str):
            return self._error(msg_id, INVALID_PARAMS, "params.name must be a string")
        name = params["name"]
        descriptor = next((t for t in TOOLS if t["name"] == name), None)
        if descriptor is None or name not in self._handlers:
            return self._error(msg_id, INVALID_PARAMS, f"unknown tool: {name}")
        arguments = params.get("arguments") or {}
        complaint = validate_arguments(descriptor["inputSchema"], arguments)
        if complaint is not None:
            return self._error(msg_id, INVALID_PARAMS, complaint)
        try:
            body = self._handlers[name](arguments)
        except GeocardError as exc:
            return self._result(msg_id, {
                "content": [{"type": "text",
                             "text": json.dumps(exc.payload(), indent=2)}],
                "isError": True,
            })
        except Exception as exc:  # defensive: never crash the transport
            return self._error(msg_id, INTERNAL_ERROR,
                               f"{type(exc).__name__}: {exc}")
        return self._result(msg_id, {
            "content": [{"type": "text", "text": json.dumps(body, indent=2)}],
            "isError": False,
        })

    @staticmethod
    def _result(msg_id, result) -> dict:
        return {"jsonrpc": "2.0", "id": msg_id, "result": result}

    @staticmethod
    def _error(msg_id, code: int, message: str) -> dict:
        return {"jsonrpc": "2.0", "id": msg_id,
                "error": {"code": code, "message": message}}

    # ------------------------------------------------------------ handlers ----

    def _tool_list_methods(self, args) -> dict:
        return {"methods": self.catalog.list_methods(args.get("category"))}

    def _tool_get_method(self, args) -> dict:
        return self.catalog.get_method(args["id"]).to_dict()

    def _merged_inputs(self, card_id: str, given: dict) -> dict:
        """Session defaults fill missing input keys; arguments always win."""
        card = self.catalog.get_method(card_id)
        merged = dict(given)
        for var in card.variables_by_role("input"):
            if var.key not in merged and var.key in self.session.defaults:
                merged[var.key] = self.session.defaults[var.key]
        return merged

    def _tool_evaluate(self, args) -> dict:
        card = self.catalog.get_method(args["card"])
        request = EvaluationRequest(
            card_id=args["card"],
            variant_id=args["variant"],
            inputs=self._merged_inputs(args["card"], args["inputs"]),
            overrides=args.get("overrides") or {},
        )
        return evaluate_card(card, request).to_dict()

    _tool_evaluate_with_units = _tool_evaluate

    def _tool_list_skills(self, args) -> dict:
        return {"skills": self.skills.list_skills()}

    def _tool_recommend_skills(self, args) -> dict:
        limit = args.get("limit", 5)
        matches = self.skills.recommend_skills(args["query"], limit)
        return {"matches": [m.to_dict() for m in matches]}

    def _tool_get_skill(self, args) -> dict:
        include = args.get("include_references", False)
        return self.skills.get_skill(args["name"], include).to_dict(include)

    def _tool_preset_partials(self, args) -> dict:
        pf = get_ec7_preset_partials(args["design_approach"])
        return {
            "design_approach": pf.design_approach,
            "partials": pf.wire_dict(),
            "description": f"Standard EN 1997-1 partial factors for "
                           f"{pf.design_approach}",
        }

    @staticmethod
    def _parse_width(value) -> float:
        if isinstance(value, str):
            from .units import convert, default_registry, parse_quantity
            registry = default_registry()
            q = parse_quantity(value, registry)
            if q.unit.name == "dimensionless":
                return q.magnitude
            return convert(q, registry.resolve("m")).magnitude
        return float(value)

    def _tool_check_uls(self, args) -> dict:
        scenario = load_scenario(json.dumps(args["scenario"]))
        result = check_footing_uls_ec7(
            scenario, args["design_approach"], self._parse_width(args["B"]),
            catalog=self.catalog, drainage=args.get("drainage", "drained"))
        return result.to_dict()

    def _tool_design_width(self, args) -> dict:
        scenario = load_scenario(json.dumps(args["scenario"]))
        result = design_footing_width_ec7(
            scenario, args["design_approach"],
            tolerance=args.get("tolerance", 1e-3),
            catalog=self.catalog, drainage=args.get("drainage", "drained"))
        return result.to_dict()

    def _tool_set_defaults(self, args) -> dict:
        for key, value in args["defaults"].items():
            if not isinstance(value, (str, int, float)) or isinstance(value, bool):
                raise GeocardError(
                    f"default for {key!r} must be a number or unit-tagged string")
            self.session.defaults[key] = value
        return {
            "session_id": self.session.session_id,
            "defaults": {k: self.session.defaults[k]
                         for k in sorted(self.session.defaults)},
        }

    def _tool_health(self, args) -> dict:
        diagnostics = list(self.catalog.diagnostics) + list(self.skills.diagnostics)
        warnings = list(self.catalog.warnings) + list(self.skills.warnings)
        healthy = (self.catalog.ok and self.skills.ok
                   and len(self.catalog.cards) >= 1 and len(self.skills.skills) >= 1)
        return {
            "status": "ok" if healthy else "degraded",
            "cards": len(self.catalog.cards),
            "skills": len(self.skills.skills),
            "version": __version__,
            "diagnostics": diagnostics,
            "warnings": warnings,
        }


def serve(stdin: TextIO = None, stdout: TextIO = None,
          catalog: Catalog | None = None,
          skills: SkillLibrary | None = None) -> None:
    """Construct a server over the given streams and run until EOF."""
    McpServer(catalog=catalog, skills=skills).serve(stdin, stdout)
