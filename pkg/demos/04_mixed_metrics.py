"""The evaluation toolkit for mixed data: MSEM, the mixed correlation
matrix, and its distance between an original and a distorted copy.
"""

import numpy as np

from mixedae import metrics
from mixedae.tabular import Dataset, generate_synthetic

data = generate_synthetic("balanced", n=1000, seed=5)
features = Dataset(data.schema, dict(data.columns))

m = metrics.mixed_correlation(features)
print("mixed correlation matrix (entry statistic depends on the pair):")
print("        " + "  ".join(f"{n:>6}" for n in m.schema_names))
for i, name in enumerate(m.schema_names):
    print(f"{name:>6}  " + "  ".join(f"{v:6.2f}" for v in m.values[i]))
print("\nentry kinds: X-X Spearman rho, Q-Q Cramer's V, X-Q eta squared")

# Distort one column and watch the distance react.
rng = np.random.default_rng(0)
shuffled = dict(features.columns)
shuffled["Q1"] = rng.permutation(features.column("Q1"))
distorted = Dataset(features.schema, shuffled)
print(f"\nMC distance to itself:          {metrics.mc_distance(features, features):.3f}")
print(f"MC distance after shuffling Q1: {metrics.mc_distance(features, distorted):.3f}")

# MSEM punishes categorical mistakes through balanced accuracy.
majority = Dataset(
    features.schema,
    {
        c.name: (
            np.full(features.n, np.argmax(np.bincount(features.column(c.name))))
            if c.is_categorical
            else np.full(features.n, features.column(c.name).mean())
        )
        for c in features.schema.columns
    },
)
print(f"\nMSEM of an all-majority/mean predictor: {metrics.msem(features, majority):.3f}")
print("(each categorical variable contributes 1 - 0.5 = 0.5 before averaging)")

# Silhouette on two obvious blobs.
blob = np.vstack([rng.normal(0, 0.3, (50, 2)), rng.normal(8, 0.3, (50, 2))])
labels = np.array([0] * 50 + [1] * 50)
print(f"\nsilhouette of two tight blobs: {metrics.silhouette(blob, labels):.3f}")
