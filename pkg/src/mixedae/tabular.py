"""Mixed tabular data: schemas, CSV I/O, one-hot encoding, synthetic data.

A :class:`Dataset` is column-oriented: numeric columns are float vectors,
categorical columns are integer code vectors indexing into the schema's
category list. :class:`EncoderState` holds everything fitted on a training
split — numeric (min, max) ranges and per-category counts — and is the
single source of the balance weights used by the losses.

All values are immutable after construction; datasets and encoder states
are safe to share across threads and processes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ConstantNumeric,
    DataError,
    EmptyCategory,
    FractionOutOfRange,
    InvalidContext,
    MissingValue,
    SchemaMismatch,
    ShapeError,
    UnknownCategory,
)
from .rng import gaussian, make_rng


# ----------------------------------------------------------------------
# Schema and Dataset
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Column:
    """One column: numeric when ``categories`` is None, categorical otherwise."""

    name: str
    categories: tuple[str, ...] | None = None

    @property
    def is_categorical(self) -> bool:
        return self.categories is not None

    def __post_init__(self) -> None:
        if self.categories is not None:
            if len(self.categories) < 2:
                raise DataError(f"column {self.name!r} needs >= 2 categories")
            if len(set(self.categories)) != len(self.categories):
                raise DataError(f"column {self.name!r} has duplicate categories")


@dataclass(frozen=True)
class Schema:
    """Ordered column definitions for a mixed table."""

    columns: tuple[Column, ...]

    def __post_init__(self) -> None:
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names in schema")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def p(self) -> int:
        """Number of variables (not encoded width)."""
        return len(self.columns)

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def numeric_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if not c.is_categorical)

    def categorical_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.is_categorical)

    @property
    def encoded_width(self) -> int:
        return sum(len(c.categories) if c.is_categorical else 1 for c in self.columns)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    """Column store over a :class:`Schema`, with an optional numeric target."""

    schema: Schema
    columns: dict[str, np.ndarray]
    y: np.ndarray | None = None
    target_name: str = "y"

    def __post_init__(self) -> None:
        if set(self.columns) != set(self.schema.names):
            raise SchemaMismatch("column dict does not match schema names")
        lengths = {len(v) for v in self.columns.values()}
        if self.y is not None:
            lengths.add(len(self.y))
        if len(lengths) > 1:
            raise ShapeError(f"columns have differing lengths: {sorted(lengths)}")
        cols = {}
        for c in self.schema.columns:
            v = self.columns[c.name]
            if c.is_categorical:
                v = np.asarray(v, dtype=np.int64)
                if v.size and (v.min() < 0 or v.max() >= len(c.categories)):
                    raise DataError(f"category code out of range in {c.name!r}")
            else:
                v = np.asarray(v, dtype=np.float64)
            cols[c.name] = _freeze(v)
        object.__setattr__(self, "columns", cols)
        if self.y is not None:
            object.__setattr__(self, "y", _freeze(np.asarray(self.y, dtype=np.float64)))

    @property
    def n(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    def take(self, indices: np.ndarray) -> "Dataset":
        """Row subset (used by :func:`split`)."""
        return Dataset(
            schema=self.schema,
            columns={k: v[indices] for k, v in self.columns.items()},
            y=None if self.y is None else self.y[indices],
            target_name=self.target_name,
        )

    def equals(self, other: "Dataset", numeric_tol: float = 0.0) -> bool:
        """Exact equality; ``numeric_tol`` allows float round-off on numerics
        (categorical codes always compare exactly)."""
        if self.schema != other.schema or self.target_name != other.target_name:
            return False

        def close(a: np.ndarray, b: np.ndarray) -> bool:
            if numeric_tol == 0.0:
                return bool(np.array_equal(a, b))
            return bool(np.allclose(a, b, rtol=numeric_tol, atol=numeric_tol))

        for c in self.schema.columns:
            a, b = self.columns[c.name], other.columns[c.name]
            ok = np.array_equal(a, b) if c.is_categorical else close(a, b)
            if not ok:
                return False
        if (self.y is None) != (other.y is None):
            return False
        return self.y is None or close(self.y, other.y)


# ----------------------------------------------------------------------
# Encoder
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FeatureRef:
    """One encoded column: a numeric variable, or one category of a variable."""

    column: str
    category: int | None  # None for numeric features
    name: str


@dataclass(frozen=True)
class EncoderState:
    """Scaling ranges and category counts fitted on a training split."""

    schema: Schema
    n: int
    numeric_range: dict[str, tuple[float, float]]
    category_counts: dict[str, np.ndarray]
    features: tuple[FeatureRef, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.features:
            object.__setattr__(self, "features", _feature_refs(self.schema))
        counts = {k: _freeze(np.asarray(v, dtype=np.int64)) for k, v in self.category_counts.items()}
        object.__setattr__(self, "category_counts", counts)

    @property
    def width(self) -> int:
        """Encoded width P."""
        return len(self.features)

    def frequencies(self, column: str) -> np.ndarray:
        """f_kq = n_kq / n for one categorical variable."""
        return self.category_counts[column] / self.n

    def feature_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def feature_frequencies(self) -> np.ndarray:
        """Per encoded feature: f_kq for one-hot columns, NaN for numerics."""
        out = np.full(self.width, np.nan)
        for j, f in enumerate(self.features):
            if f.category is not None:
                out[j] = self.category_counts[f.column][f.category] / self.n
        return out

    def categorical_groups(self) -> list[np.ndarray]:
        """Encoded-column index arrays, one per categorical variable."""
        groups: dict[str, list[int]] = {}
        for j, f in enumerate(self.features):
            if f.category is not None:
                groups.setdefault(f.column, []).append(j)
        return [np.asarray(groups[name]) for name in self.schema.categorical_names()]

    def group_slice(self, column: str) -> slice:
        idx = [j for j, f in enumerate(self.features) if f.column == column]
        return slice(idx[0], idx[-1] + 1)


def _feature_refs(schema: Schema) -> tuple[FeatureRef, ...]:
    refs = []
    for c in schema.columns:
        if c.is_categorical:
            refs.extend(
                FeatureRef(c.name, k, f"{c.name}={cat}") for k, cat in enumerate(c.categories)
            )
        else:
            refs.append(FeatureRef(c.name, None, c.name))
    return tuple(refs)


@dataclass(frozen=True)
class EncodedMatrix:
    """n x P real matrix in the encoder's working space."""

    values: np.ndarray
    encoder: EncoderState

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != self.encoder.width:
            raise ShapeError(
                f"expected n x {self.encoder.width} matrix, got {v.shape}"
            )
        object.__setattr__(self, "values", _freeze(v))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def fit_encoder(train: Dataset) -> EncoderState:
    """Fit numeric ranges and category counts on the training split only.

    Raises :class:`EmptyCategory` when a schema category never occurs in
    ``train`` (the split cannot support balance weights) and
    :class:`ConstantNumeric` for constant numeric columns.
    """
    if train.n < 2:
        raise DataError("fit_encoder needs at least 2 rows")
    ranges: dict[str, tuple[float, float]] = {}
    counts: dict[str, np.ndarray] = {}
    for c in train.schema.columns:
        v = train.column(c.name)
        if c.is_categorical:
            cnt = np.bincount(v, minlength=len(c.categories))
            if (cnt == 0).any():
                missing = [c.categories[k] for k in np.flatnonzero(cnt == 0)]
                raise EmptyCategory(
                    f"categories {missing} of {c.name!r} absent from the training split"
                )
            counts[c.name] = cnt
        else:
            lo, hi = float(v.min()), float(v.max())
            if hi <= lo:
                raise ConstantNumeric(f"numeric column {c.name!r} is constant")
            ranges[c.name] = (lo, hi)
    return EncoderState(train.schema, train.n, ranges, counts)


def encode(data: Dataset, enc: EncoderState) -> EncodedMatrix:
    """Min-max scale numerics (clipped to [0, 1]) and one-hot categoricals."""
    if data.schema != enc.schema:
        raise SchemaMismatch("dataset schema differs from encoder schema")
    out = np.zeros((data.n, enc.width))
    j = 0
    for c in data.schema.columns:
        v = data.column(c.name)
        if c.is_categorical:
            p_q = len(c.categories)
            out[np.arange(data.n), j + v] = 1.0
            j += p_q
        else:
            lo, hi = enc.numeric_range[c.name]
            out[:, j] = np.clip((v - lo) / (hi - lo), 0.0, 1.0)
            j += 1
    return EncodedMatrix(out, enc)


def decode(m: EncodedMatrix, enc: EncoderState) -> Dataset:
    """Hard-decode: inverse affine for numerics, per-variable argmax for categoricals.

    Argmax ties resolve to the lowest category index, so the output is
    deterministic and one-hot valid by construction.
    """
    if m.width != enc.width:
        raise ShapeError(f"matrix width {m.width} != encoder width {enc.width}")
    cols: dict[str, np.ndarray] = {}
    j = 0
    for c in enc.schema.columns:
        if c.is_categorical:
            p_q = len(c.categories)
            cols[c.name] = np.argmax(m.values[:, j : j + p_q], axis=1)
            j += p_q
        else:
            lo, hi = enc.numeric_range[c.name]
            cols[c.name] = lo + m.values[:, j] * (hi - lo)
            j += 1
    return Dataset(enc.schema, cols)


# ----------------------------------------------------------------------
# CSV and schema sidecar
# ----------------------------------------------------------------------

def _parse_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def read_csv(
    path: str | Path,
    schema: Schema | None = None,
    *,
    categorical: tuple[str, ...] = (),
    target: str | None = None,
) -> Dataset:
    """Read a comma-separated file with one header row.

    With ``schema=None`` the kinds are inferred: a column is categorical
    iff any cell fails to parse as a number or its name is listed in
    ``categorical``; category order is first-appearance order. ``target``
    names a numeric column returned as ``Dataset.y`` instead of a feature.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = list(reader)
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ShapeError(f"{path}: row {i + 2} has {len(row)} cells, expected {width}")
        for name, cell in zip(header, row):
            if cell == "":
                raise MissingValue(f"{path}: empty cell in column {name!r}, row {i + 2}")

    raw = {name: [row[k] for row in rows] for k, name in enumerate(header)}
    y = None
    if target is not None:
        if target not in raw:
            raise DataError(f"{path}: target column {target!r} not found")
        y_cells = raw.pop(target)
        y = np.array([_coerce_number(c, target) for c in y_cells])
        header = [h for h in header if h != target]

    if schema is None:
        schema = _infer_schema(header, raw, categorical)
    else:
        if list(schema.names) != header:
            raise SchemaMismatch(
                f"{path}: header {header} does not match schema {list(schema.names)}"
            )

    cols: dict[str, np.ndarray] = {}
    for c in schema.columns:
        cells = raw[c.name]
        if c.is_categorical:
            index = {cat: k for k, cat in enumerate(c.categories)}
            codes = np.empty(len(cells), dtype=np.int64)
            for i, cell in enumerate(cells):
                if cell not in index:
                    raise UnknownCategory(
                        f"{path}: value {cell!r} not a category of {c.name!r}"
                    )
                codes[i] = index[cell]
            cols[c.name] = codes
        else:
            cols[c.name] = np.array([_coerce_number(cell, c.name) for cell in cells])
    return Dataset(schema, cols, y=y, target_name=target or "y")


def _coerce_number(cell: str, name: str) -> float:
    v = _parse_float(cell)
    if v is None:
        raise DataError(f"column {name!r}: cell {cell!r} is not numeric")
    return v


def _infer_schema(header: list[str], raw: dict[str, list[str]], categorical: tuple[str, ...]) -> Schema:
    cols = []
    for name in header:
        cells = raw[name]
        is_cat = name in categorical or any(_parse_float(c) is None for c in cells)
        if is_cat:
            cats = tuple(dict.fromkeys(cells))  # first-appearance order
            cols.append(Column(name, cats))
        else:
            cols.append(Column(name))
    return Schema(tuple(cols))


def write_csv(data: Dataset, path: str | Path) -> None:
    """Inverse of :func:`read_csv`; categorical cells are category text."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = list(data.schema.names)
        if data.y is not None:
            header.append(data.target_name)
        writer.writerow(header)
        for i in range(data.n):
            row = []
            for c in data.schema.columns:
                v = data.column(c.name)[i]
                row.append(c.categories[v] if c.is_categorical else repr(float(v)))
            if data.y is not None:
                row.append(repr(float(data.y[i])))
            writer.writerow(row)


def save_schema_sidecar(schema: Schema, path: str | Path, target: str | None = None) -> None:
    """One line per column: ``name,kind[,cat1|cat2|...]``."""
    with open(path, "w", encoding="utf-8") as fh:
        for c in schema.columns:
            if c.is_categorical:
                fh.write(f"{c.name},categorical,{'|'.join(c.categories)}\n")
            else:
                fh.write(f"{c.name},numeric\n")
        if target is not None:
            fh.write(f"{target},target\n")


def load_schema_sidecar(path: str | Path) -> tuple[Schema, str | None]:
    cols: list[Column] = []
    target = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",", 2)
            name, kind = parts[0], parts[1]
            if kind == "numeric":
                cols.append(Column(name))
            elif kind == "categorical":
                if len(parts) != 3:
                    raise DataError(f"{path}: categorical {name!r} lists no categories")
                cols.append(Column(name, tuple(parts[2].split("|"))))
            elif kind == "target":
                target = name
            else:
                raise DataError(f"{path}: unknown column kind {kind!r}")
    return Schema(tuple(cols)), target


# ----------------------------------------------------------------------
# Synthetic data
# ----------------------------------------------------------------------

CONTEXTS = ("imbalanced", "balanced", "majority")

# Gaussian features: name -> (mean, std).
SYNTHETIC_NUMERICS: dict[str, tuple[float, float]] = {
    "X1": (0.0, 1.0),
    "X2": (10.0, 2.0),
    "X3": (10.0, 2.0),
}

# Multinomial features: name -> ((category, probability), ...). Category
# labels carry their percentage; repeated percentages get letter suffixes.
SYNTHETIC_CATEGORICALS: dict[str, tuple[tuple[str, float], ...]] = {
    "Q1": (("Q1.70", 0.70), ("Q1.30", 0.30)),
    "Q2": (
        ("Q2.10", 0.10), ("Q2.20", 0.20), ("Q2.29", 0.29),
        ("Q2.31", 0.31), ("Q2.02", 0.02), ("Q2.08", 0.08),
    ),
    "Q3": (("Q3.60", 0.60), ("Q3.20", 0.20), ("Q3.17", 0.17), ("Q3.03", 0.03)),
    "Q4": (
        ("Q4.10", 0.10), ("Q4.10b", 0.10), ("Q4.10c", 0.10), ("Q4.10d", 0.10),
        ("Q4.10e", 0.10), ("Q4.15", 0.15), ("Q4.05", 0.05), ("Q4.30", 0.30),
    ),
    "Q5": (
        ("Q5.25", 0.25), ("Q5.25b", 0.25), ("Q5.10", 0.10), ("Q5.10b", 0.10),
        ("Q5.05", 0.05), ("Q5.05b", 0.05), ("Q5.05c", 0.05), ("Q5.05d", 0.05),
        ("Q5.09", 0.09), ("Q5.01", 0.01),
    ),
}

# Which indicator each of the six categorical coefficients multiplies,
# per context. The first three coefficients belong to X1..X3 and are
# zeroed in the majority context.
_CONTEXT_INDICATORS: dict[str, tuple[tuple[str, str], ...]] = {
    "imbalanced": (
        ("Q1", "Q1.30"), ("Q2", "Q2.02"), ("Q3", "Q3.03"),
        ("Q4", "Q4.05"), ("Q5", "Q5.01"), ("Q5", "Q5.05"),
    ),
    "balanced": (
        ("Q1", "Q1.70"), ("Q2", "Q2.29"), ("Q3", "Q3.60"),
        ("Q4", "Q4.30"), ("Q5", "Q5.25"), ("Q5", "Q5.10"),
    ),
}
_CONTEXT_INDICATORS["majority"] = _CONTEXT_INDICATORS["balanced"]

Y_NOISE_STD = 0.5


def synthetic_schema() -> Schema:
    cols = [Column(name) for name in SYNTHETIC_NUMERICS]
    cols += [
        Column(name, tuple(cat for cat, _ in spec))
        for name, spec in SYNTHETIC_CATEGORICALS.items()
    ]
    return Schema(tuple(cols))


def generate_synthetic(
    context: str,
    n: int,
    seed: int,
    coeffs: tuple[float, ...] | None = None,
) -> Dataset:
    """Draw the 3-numeric / 5-categorical benchmark sample with target.

    The target is ``y ~ N(mu, 0.5)`` where ``mu`` is a linear combination
    of features selected by ``context``: "imbalanced" loads the numerics
    plus minority categories, "balanced" the numerics plus majority
    categories, and "majority" the majority categories only. ``coeffs``
    supplies the nine linear coefficients (default all 1.0).

    Draw order is fixed (X1, X2, X3, Q1..Q5, noise), so a seed pins
    every value bit-for-bit.
    """
    if context not in CONTEXTS:
        raise InvalidContext(f"context must be one of {CONTEXTS}, got {context!r}")
    if n < 1:
        raise DataError("n must be >= 1")
    coeffs = tuple(coeffs) if coeffs is not None else (1.0,) * 9
    if len(coeffs) != 9:
        raise DataError(f"coeffs must have length 9, got {len(coeffs)}")

    rng = make_rng(seed)
    schema = synthetic_schema()
    cols: dict[str, np.ndarray] = {}
    for name, (mean, std) in SYNTHETIC_NUMERICS.items():
        cols[name] = mean + std * gaussian(rng, n)
    for name, spec in SYNTHETIC_CATEGORICALS.items():
        cum = np.cumsum([p for _, p in spec])
        cum[-1] = 1.0  # absorb float round-off in the last cell
        cols[name] = np.searchsorted(cum, rng.random(n), side="right").astype(np.int64)

    mu = np.zeros(n)
    if context != "majority":
        for k, name in enumerate(SYNTHETIC_NUMERICS):
            mu += coeffs[k] * cols[name]
    for k, (var, cat) in enumerate(_CONTEXT_INDICATORS[context]):
        cat_index = [c for c, _ in SYNTHETIC_CATEGORICALS[var]].index(cat)
        mu += coeffs[3 + k] * (cols[var] == cat_index)
    y = mu + Y_NOISE_STD * gaussian(rng, n)
    return Dataset(schema, cols, y=y)


def split(data: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Uniform random partition without replacement, deterministic per seed."""
    if not 0.0 < test_fraction < 1.0:
        raise FractionOutOfRange(f"test_fraction must be in (0, 1), got {test_fraction}")
    test_n = int(round(data.n * test_fraction))
    if test_n == 0 or test_n == data.n:
        raise FractionOutOfRange(
            f"test_fraction {test_fraction} leaves an empty split for n={data.n}"
        )
    perm = make_rng(seed).permutation(data.n)
    test_idx = np.sort(perm[:test_n])
    train_idx = np.sort(perm[test_n:])
    return data.take(train_idx), data.take(test_idx)


def schema_hash(schema: Schema) -> str:
    """Stable hex digest of a schema, for checkpoint headers."""
    import hashlib

    parts = []
    for c in schema.columns:
        parts.append(c.name)
        parts.append("|".join(c.categories) if c.is_categorical else "<numeric>")
    return hashlib.sha256("\x1f".join(parts).encode()).hexdigest()[:16]


def schema_to_dict(schema: Schema) -> list[dict]:
    return [
        {"name": c.name, "categories": list(c.categories) if c.categories else None}
        for c in schema.columns
    ]


def schema_from_dict(items: list[dict]) -> Schema:
    return Schema(
        tuple(
            Column(d["name"], tuple(d["categories"]) if d["categories"] else None)
            for d in items
        )
    )


def encoder_to_dict(enc: EncoderState) -> dict:
    return {
        "schema": schema_to_dict(enc.schema),
        "n": enc.n,
        "numeric_range": {k: list(v) for k, v in enc.numeric_range.items()},
        "category_counts": {k: v.tolist() for k, v in enc.category_counts.items()},
    }


def encoder_from_dict(d: dict) -> EncoderState:
    return EncoderState(
        schema=schema_from_dict(d["schema"]),
        n=int(d["n"]),
        numeric_range={k: (float(a), float(b)) for k, (a, b) in d["numeric_range"].items()},
        category_counts={k: np.asarray(v, dtype=np.int64) for k, v in d["category_counts"].items()},
    )
