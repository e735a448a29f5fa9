# Agent Skills: analysis procedures served as structured Markdown.
#
# Skills are not executed by this package; they are documents an AI
# assistant loads and follows. Discovery is deterministic lexical
# ranking over name, description, and category.

from geocard import load_skills

library = load_skills()

print("installed skills:")
for entry in library.list_skills():
    print(f"  {entry['name']} v{entry['version']} [{entry['category']}]")

print("\nsearch: 'bearing capacity strip footing eurocode'")
for match in library.recommend_skills("bearing capacity strip footing eurocode"):
    print(f"  {match.name}  score={match.score:.3f}  terms={match.matched_terms}")

skill = library.get_skill("shallow-foundation-bearing-capacity",
                          include_references=True)
print("\nsection headings of the skill body:")
for line in skill.body.splitlines():
    if line.startswith("## "):
        print(" ", line[3:])

print("\nreference documents:")
for ref in skill.references:
    print(f"  {ref.filename} ({len(ref.text)} chars)")
