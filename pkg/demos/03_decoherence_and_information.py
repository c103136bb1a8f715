# %% [markdown]
# # Decoherence and information growth
#
# A pure state with weights `pi_q` and fixed phases has off-diagonal density
# magnitudes `sqrt(pi_i pi_j)`. Multiplying each weight by an independent
# factor `U` shrinks the expected magnitudes whenever `E[U] <= 1`, and the
# expected information `sum pi log pi` grows when `E[U] >= 1`.

# %%
import numpy as np

from martproj.dynamics import MARTINGALE_LAW, SUB_LAW, SUPER_LAW
from martproj.grid import uniform_grid
from martproj.quantum import (PureStateSnapshot, density_coordinates, expected_information_step,
                              information_gain_floor, run_full_trajectory, shannon_wiener)
from martproj.streams import RandomSource

src = RandomSource(3)
grid = uniform_grid(0.0, 10.0, 10)

# %%
state = PureStateSnapshot([0.25, 0.75], [0.0, np.pi / 2])
print(np.round(density_coordinates(state).coords, 6))

# %% [markdown]
# ## One trajectory per law class
#
# Each step is checked against the realized weights one step earlier, with a
# margin of three standard errors.

# %%
for clause, law, w0 in [("super", SUPER_LAW, [0.25] * 4), ("sub", SUB_LAW, [0.5] * 4),
                        ("martingale", MARTINGALE_LAW, [0.25] * 4)]:
    rep = run_full_trajectory(4, grid, law, w0, [0.0] * 4, 50_000, src.child(clause), clause)
    ok = sum(st["pass"] for st in rep.steps)
    print(f"{clause:10s} {ok}/{len(rep.steps)} steps certified;"
          f" S from {rep.information[0]:.3f} to {rep.information[-1]:.3f}")

# %% [markdown]
# ## Where information growth needs large enough weights
#
# Per weight the expected change in `pi log pi` is
# `pi (E[U log U] + (E[U] - 1) log pi)`. For a mean > 1 law this is negative
# below a floor, because `x log x` decreases on `(0, 1/e)`. Unit-mean laws
# have no floor.

# %%
floor = information_gain_floor(SUB_LAW)
print(f"floor for uniform(0.9, 1.6): {floor:.4f}")
for p in (0.5 * floor, floor, 2 * floor):
    w = [p] * 4
    est = expected_information_step(w, SUB_LAW, 200_000, src.child("floor", int(p * 1e6)))
    print(f"pi={p:.4f}: expected change {est.mean - shannon_wiener(w):+.5f} +- {est.std_error:.5f}")
