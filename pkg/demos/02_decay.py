"""
Two-anchor temporal decay
=========================

A precursor's rating of item i at time t_i is weighted by
exp(-beta * dT) with dT = |t0 - 2*t_last + t_i| in days, where t_last is the
precursor's most recent activity and t0 is "now".
"""

# %%
import numpy as np

from timepop import DecayParams, decay_weight, delta_t_days

DAY = 86400
t0 = 400 * DAY

cases = {
    "recent user, recent item": (t0, t0),
    "old user, recent item": (100 * DAY, 100 * DAY),
    "recent user, old item": (t0, 100 * DAY),
    "old user, old item": (200 * DAY, 20 * DAY),
}
for name, (last, rated) in cases.items():
    d = delta_t_days(t0, last, rated)
    print(f"{name:26s} dT = {d:6.1f} days  weight = {decay_weight(d):.4f}")

# %%
# When the gap since last activity equals the rating's age at that time, the
# two anchors cancel and the formula yields 0.
print(delta_t_days(300 * DAY, 200 * DAY, 100 * DAY))

# %%
days = np.arange(0, 801, 100)
for kind in ("exp", "linear", "none"):
    p = DecayParams(1 / 200, kind)
    print(kind.ljust(6), np.round([decay_weight(float(d), p) for d in days], 3))

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    grid = np.linspace(0, 800, 200)
    for beta in (1 / 50, 1 / 200, 1 / 800):
        plt.plot(grid, np.exp(-beta * grid), label=f"beta = 1/{round(1 / beta)}")
    plt.xlabel("dT (days)")
    plt.ylabel("weight")
    plt.legend()
    plt.savefig("decay.png", dpi=100)
