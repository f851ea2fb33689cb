"""
Scoring annotator agreement and a model against the consensus
=============================================================

"""

from disimpact import AgreementTable, cohen_kappa, human_consensus, consistency, fleiss_kappa

# Three annotators labeled six posts with impact-category codes. The
# first four rows agree fully, the last two carry one dissenting vote.
table = AgreementTable(
    items=("post1", "post2", "post3", "post4", "post5", "post6"),
    annotator_ids=("ann_a", "ann_b", "ann_c"),
    labels=(
        (1, 1, 1),
        (3, 3, 3),
        (7, 7, 7),
        (9, 9, 9),
        (1, 1, 2),
        (3, 5, 5),
    ),
)

# Consistency is the blunt instrument: the share of unanimous items.
print(f"consistency:  {consistency(table):.4f}")

# Fleiss' kappa corrects that for the agreement expected by chance
# given how often each label was used overall.
print(f"fleiss kappa: {fleiss_kappa(table):.4f}")

# A strict majority settles each item; even a 2-of-3 vote resolves.
labels = human_consensus(table)
resolved = [c.label for c in labels if c.resolved]
print("consensus:   ", resolved)

# Score a separate model against that consensus with Cohen's kappa.
model = [1, 3, 7, 9, 1, 4]
matches = sum(1 for got, want in zip(model, resolved) if got == want)
print(f"model hits:   {matches}/{len(resolved)}")
print(f"cohen kappa:  {cohen_kappa(model, resolved):.4f}")
