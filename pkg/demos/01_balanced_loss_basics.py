"""Why the standard MSE ignores rare categories, and what the balanced
MSE does about it.

We build a single categorical variable with a 90/10 split, encode it
one-hot, and look at how much each category can contribute to the loss.
"""

import numpy as np

from mixedae.losses import balanced_mse_loss, compute_balance_weights, mse_loss
from mixedae.tabular import Column, Dataset, Schema, encode, fit_encoder

rng = np.random.default_rng(0)

schema = Schema((Column("color", ("common", "rare")),))
codes = np.array([0] * 90 + [1] * 10)
data = Dataset(schema, {"color": codes})
enc = fit_encoder(data)
onehot = encode(data, enc).values

print("category counts:", dict(zip(("common", "rare"), enc.category_counts["color"])))

# A lazy reconstruction that always predicts the majority category.
lazy = np.tile([1.0, 0.0], (100, 1))

value, _ = mse_loss(lazy, onehot)
print(f"\nstandard MSE of the always-'common' reconstruction: {value:.4f}")
print("-> only the 10 rare rows are wrong, so the loss barely notices.")

weights = compute_balance_weights(enc)
print("\nbalance weights (target=1):", np.round(weights.w_one, 3))
print("balance weights (target=0):", np.round(weights.w_zero, 3))
print("-> errors on the rare category weigh", end=" ")
print(f"{weights.w_one[1] / weights.w_one[0]:.0f}x more than on the common one.")

bvalue, _ = balanced_mse_loss(lazy, onehot, weights)
print(f"\nbalanced MSE of the same reconstruction: {bvalue:.4f}")
print(f"({bvalue / value:.1f}x the standard value: ignoring the rare class is no longer cheap)")

# The weighted error mass of a variable is capped at n, split evenly
# across its categories, which is what makes variables comparable.
n = enc.n
worst = np.where(onehot == 1.0, 0.0, 1.0)  # every entry maximally wrong
wmat = np.where(onehot == 1.0, weights.w_one, weights.w_zero)
block = float((wmat * (onehot - worst) ** 2).sum())
print(f"\nfully-wrong weighted block SSE = {block:.1f} (the bound is n = {n})")
