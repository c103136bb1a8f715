# %% [markdown]
# # Law consistency
#
# A family of transforms is consistent with a process when the transform of
# a prefix has the same law as the process continued from that prefix. A
# two-sample Kolmogorov-Smirnov test at the 5% level compares the two.

# %%
from martproj.classifier import law_consistency_check
from martproj.dynamics import MARTINGALE_LAW, SUB_LAW, MultiplicativeProcess
from martproj.grid import Path, TimeGrid, Window
from martproj.streams import RandomSource
from martproj.transforms import Multiplicative

grid = TimeGrid([0.0, 1.0, 2.0])
prefix = Path(Window(grid, 0.0, 1.0), [1.0, 1.3])
end = Window(grid, 2.0, 2.0)
process = MultiplicativeProcess(MARTINGALE_LAW)
src = RandomSource(99)

# %%
for name, law in [("matched", MARTINGALE_LAW), ("shifted", SUB_LAW)]:
    family = Multiplicative(prefix.window, end, law)
    reps = [law_consistency_check(process, family, prefix, 2.0, 10_000, src.child(name, i))
            for i in range(100)]
    passed = sum(r.passed for r in reps)
    print(f"{name}: {passed}/100 trials pass, first KS stat {reps[0].ks_stat:.4f}"
          f" (critical {reps[0].critical:.4f})")
