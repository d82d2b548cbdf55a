"""Which errors limit the Bell-basis measurement?

Each error source is halved in turn (gate sources also halve their gate
time) and the change in the total error gives its share.  Readout dominates
for one qubit; the two-qubit gate share grows with system size.
"""

from crossverify import NoiseModel
from crossverify.analysis import SOURCES, error_budget

print("n  total error  " + "  ".join(f"{s:>12}" for s in SOURCES))
for n in (1, 2, 3):
    b = error_budget(NoiseModel(), n)
    print(f"{n}  {b.error:11.4f}  " + "  ".join(f"{b[s]:12.3f}" for s in SOURCES))

# a perfect readout leaves only the gates
b = error_budget(NoiseModel(eps_ro=0.0), 1)
print("without readout error:", {k: round(v, 3) for k, v in b.fractions.items()})
