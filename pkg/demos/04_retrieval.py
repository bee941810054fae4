"""
Reading the imprint back out
============================

A control pulse with the signal's own duration pushes the imprint all the way
out; it leaves as a signal pulse with a pi phase shift.  Efficiency compares
output and input signal energy, and r compares their shapes.
"""
from lambda_imprint import Case, retrieval_config, run_retrieval

print(f"{'case':16s} steps    eta       r    inverted")
for steps in (1, 2):
    for case in Case:
        res = run_retrieval(retrieval_config(case, steps), steps)
        m = res.retrieval
        print(f"{case.value:16s} {steps:5d} {100 * m.eta:6.1f}%  {m.r:.4f}   {m.inverted}")

# In two steps the shorter first control already flipped the imprint, so the
# pushed-out signal comes back upright.
