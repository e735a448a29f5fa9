# Method cards: declarative JSON records with load-time validation.
#
# A card declares variables (with roles and units), equation variants,
# assumptions, applicability limits, and literature sources. Loading
# validates everything up front; the dimensional audit then proves each
# equation is unit-consistent before it can ever be evaluated.

import json

from geocard import load_card, load_catalog, validate_dimensions
from geocard.errors import GeocardError

catalog = load_catalog()
print("catalog:")
for entry in catalog.list_methods():
    print(f"  {entry['id']:32s} variants: {', '.join(entry['variants'])}")

card = catalog.get_method("BEARING_CAPACITY_TERZAGHI")
print("\nvariables of", card.id)
for var in card.variables:
    print(f"  {var.key:10s} {var.role:12s} [{var.unit}]")

print("\nstrip variant equations:")
for eq in card.variant("general_shear_failure_strip").equations:
    print(f"  {eq.target} = {eq.sympy}")

print("\nsources:")
for source in card.sources:
    print(" ", source.title)

print("\ndimensional audit:", validate_dimensions(card) or "clean")

# Editing an equation to reference an undeclared symbol is caught at load.
broken = card.to_dict()
broken["variants"][0]["equations"][0]["sympy"] = "exp(pi*tan(D_f))"
try:
    load_card(json.dumps(broken))
except GeocardError as exc:
    print("\nbroken edit rejected:", exc)

# So is breaking the units: a length expression cannot fill a kPa target.
broken = card.to_dict()
broken["variants"][0]["equations"][3]["sympy"] = "B"
findings = validate_dimensions(load_card(json.dumps(broken)))
print("dimension findings after bad edit:", findings[0])
