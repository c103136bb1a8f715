# %% [markdown]
# # Classifying projections
#
# A projection sends a prefix ending at time `r` to a single later time.
# Its conditional mean, estimated by Monte Carlo, is compared with the
# prefix's last value: clearly below is a supermartingale, clearly above a
# submartingale, and within `z` standard errors it is martingale-consistent.

# %%
import numpy as np

from martproj.classifier import classify_projection, cond_expectation
from martproj.dynamics import MARTINGALE_LAW, SUB_LAW, SUPER_LAW
from martproj.grid import Path, TimeGrid, Window
from martproj.streams import RandomSource
from martproj.transforms import Hold, Multiplicative

grid = TimeGrid([0.0, 1.0, 2.0, 3.0])
prefix = Path(Window(grid, 0.0, 2.0), [1.0, 1.7, 2.5])
end = Window(grid, 3.0, 3.0)
src = RandomSource(11)

# %%
for name, law in [("uniform(0.2, 0.8)", SUPER_LAW), ("uniform(0.5, 1.5)", MARTINGALE_LAW),
                  ("uniform(0.9, 1.6)", SUB_LAW)]:
    v = classify_projection(Multiplicative(prefix.window, end, law), prefix, 50_000, 3.0,
                            src.child(name))
    print(f"{name:18s} mean={v.estimate.mean:.4f} +- {v.estimate.std_error:.4f}"
          f"  vs {v.reference}:  {v.label.value} (strict={v.strict})")

# %% [markdown]
# Holding the last value is a martingale with zero spread, so the estimate
# is exact and the verdict is never strict.

# %%
est = cond_expectation(Hold(prefix.window, end), prefix, 50_000, src)
print(est)

# %% [markdown]
# ## Weight vectors
#
# For a vector of weights every component gets its own label; the overall
# label is their common value.

# %%
wprefix = Path(Window(grid, 0.0, 1.0), [[0.5, 0.5], [0.3, 0.7]])
v = classify_projection(Multiplicative(wprefix.window, Window(grid, 2.0, 2.0), SUPER_LAW),
                        wprefix, 50_000, 3.0, src.child("weights"))
print(v.label.value, [c.value for c in v.components], np.round(v.estimate.mean, 4))
