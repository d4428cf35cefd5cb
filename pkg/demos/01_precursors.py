"""
Finding precursors
==================

Four users, six items.  ``u`` is the user we want recommendations for.
A candidate precursor rated at least one of u's items strictly earlier;
a precursor is a candidate whose count of such items reaches the mean count.
"""

# %%
from timepop import Interaction, build_dataset, candidate_precursors, precursor_set

records = [
    Interaction("u", "i1", 5.0, 10), Interaction("u", "i2", 4.0, 20),
    Interaction("u", "i3", 4.0, 30), Interaction("u", "i4", 3.0, 40),
    Interaction("u2", "i1", 4.0, 5), Interaction("u2", "i2", 5.0, 15), Interaction("u2", "i5", 4.0, 25),
    Interaction("u3", "i1", 3.0, 12), Interaction("u3", "i4", 4.0, 45), Interaction("u3", "i6", 2.0, 50),
    Interaction("u4", "i3", 5.0, 25), Interaction("u4", "i6", 4.0, 55),
]
ds = build_dataset(records)
print(ds)

# %%
# u3 shares i1 and i4 with u but rated both later, so it is not a candidate.
for entry in candidate_precursors(ds, "u"):
    print(entry)

# %%
ps = precursor_set(ds, "u")
print("tau =", ps.tau)             # (2 + 1) / 2
print("precursors =", set(ps.precursors))

# %%
# A fixed threshold instead of the automatic mean
print(set(precursor_set(ds, "u", 1.0).precursors))
