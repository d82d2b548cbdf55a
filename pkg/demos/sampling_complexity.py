"""How many repetitions does each protocol need?

From one large dataset we bootstrap the variance of the overlap estimate at
several subsample sizes, fit a power law, and solve for the size that reaches
a variance of 1e-3.  Counting single-shot measurements, local protocols grow
exponentially with qubit number while BBM stays far cheaper.
"""

from crossverify import NoiseModel
from crossverify.analysis import scaling_fit, scaling_point

nm = NoiseModel()
# smaller datasets than a full study, so this runs in well under a minute
sizes = {"qst": 2000, "rm": 2000, "bbm": 30_000}

for protocol in ("qst", "rm", "bbm"):
    counts = []
    for n in (1, 2, 3):
        p = scaling_point(protocol, n, nm, seed=3, repetitions=sizes[protocol], resamples=50)
        counts.append(p.measurements)
        print(f"{protocol} n={n}: variance ~ {p.curve.amplitude:.3g} N^-{p.curve.exponent:.2f}, "
              f"{p.repetitions} rounds, {p.measurements} measurements")
    model = "quadratic" if protocol == "bbm" else "exponential"
    print(f"  {model} fit:", {k: round(v, 3) for k, v in scaling_fit((1, 2, 3), counts, model).items()})
