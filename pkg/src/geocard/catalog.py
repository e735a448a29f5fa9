"""Card discovery, indexing, and retrieval.

Bundled cards live in ``geocard/data/catalog``. Setting GEOCARD_CATALOG_DIR
prepends a user directory whose cards shadow bundled ids (shadowing is
reported in the load diagnostics). A card only enters the index if it
passes both load_card and the dimensional audit; broken files become
diagnostics instead of crashes so one bad card cannot take down the
catalog.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .cards import MethodCard, load_card, validate_dimensions
from .errors import GeocardError, UnknownMethod
from .units import UnitRegistry, default_registry

CATALOG_ENV_VAR = "GEOCARD_CATALOG_DIR"


@dataclass
class Catalog:
    cards: dict = field(default_factory=dict)       # id -> MethodCard
    paths: dict = field(default_factory=dict)       # id -> source path string
    diagnostics: list = field(default_factory=list)  # load failures
    warnings: list = field(default_factory=list)     # e.g. shadowed ids

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def list_methods(self, category_filter: Optional[str] = None) -> list[dict]:
        out = []
        for card_id in sorted(self.cards):
            card = self.cards[card_id]
            if category_filter is not None and card.category != category_filter:
                continue
            out.append({
                "id": card.id,
                "title": card.title,
                "category": card.category,
                "variants": [v.id for v in card.variants],
            })
        return out

    def get_method(self, card_id: str) -> MethodCard:
        try:
            return self.cards[card_id]
        except KeyError:
            raise UnknownMethod(card_id) from None

    def _ingest(self, name: str, text: str, origin: str,
                registry: UnitRegistry, shadow_allowed: bool) -> None:
        try:
            card = load_card(text, registry)
        except GeocardError as exc:
            self.diagnostics.append(f"{origin}: {exc}")
            return
        findings = validate_dimensions(card, registry)
        if findings:
            for finding in findings:
                self.diagnostics.append(f"{origin}: {card.id}: {finding}")
            return
        if card.id in self.cards:
            if shadow_allowed:
                self.warnings.append(
                    f"{origin}: {card.id} shadows a bundled card")
            else:
                self.diagnostics.append(
                    f"{origin}: duplicate card id {card.id}")
                return
        self.cards[card.id] = card
        self.paths[card.id] = origin


def load_catalog(extra_dir: "str | os.PathLike | None" = None,
                 registry: UnitRegistry | None = None,
                 include_bundled: bool = True) -> Catalog:
    """Build the catalog from the bundled tree plus an optional user dir.

    ``extra_dir`` defaults to $GEOCARD_CATALOG_DIR when set; user cards
    shadow bundled ids.
    """
    registry = registry or default_registry()
    catalog = Catalog()
    if include_bundled:
        root = resources.files("geocard").joinpath("data/catalog")
        for entry in sorted(root.iterdir(), key=lambda e: e.name):
            if entry.name.endswith(".json"):
                catalog._ingest(entry.name, entry.read_text("utf-8"),
                                f"bundled:{entry.name}", registry,
                                shadow_allowed=False)
    if extra_dir is None:
        extra_dir = os.environ.get(CATALOG_ENV_VAR)
    if extra_dir:
        user_root = Path(extra_dir)
        if not user_root.is_dir():
            catalog.diagnostics.append(f"{user_root}: not a directory")
        else:
            for path in sorted(user_root.glob("*.json")):
                catalog._ingest(path.name, path.read_text("utf-8"),
                                str(path), registry, shadow_allowed=True)
    return catalog
