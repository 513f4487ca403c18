"""Schema, CSV, encoding and synthetic-data tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedae import errors, tabular
from mixedae.tabular import (
    Column,
    Dataset,
    EncodedMatrix,
    Schema,
    decode,
    encode,
    fit_encoder,
    generate_synthetic,
    read_csv,
    split,
    write_csv,
)


def small_schema():
    return Schema((Column("a"), Column("b", ("x", "y"))))


def small_dataset(n=3):
    return Dataset(small_schema(), {"a": np.arange(n, dtype=float), "b": np.arange(n) % 2})


class TestSchema:
    def test_duplicate_names_rejected(self):
        with pytest.raises(errors.DataError):
            Schema((Column("a"), Column("a")))

    def test_single_category_rejected(self):
        with pytest.raises(errors.DataError):
            Column("q", ("only",))

    def test_duplicate_categories_rejected(self):
        with pytest.raises(errors.DataError):
            Column("q", ("x", "x"))

    def test_encoded_width(self):
        s = Schema((Column("a"), Column("b", ("x", "y", "z"))))
        assert s.encoded_width == 4


class TestReadCsv:
    def test_inference(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("a,b\n1,x\n2,y\n3,x\n")
        d = read_csv(p)
        assert d.n == 3
        assert d.schema.p == 2
        assert d.schema.column("b").categories == ("x", "y")
        assert not d.schema.column("a").is_categorical

    def test_write_read_round_trip(self, tmp_path):
        d = generate_synthetic("balanced", 50, seed=3)
        p = tmp_path / "round.csv"
        write_csv(d, p)
        back = read_csv(p, d.schema, target="y")
        assert back.equals(d)

    def test_adults_style_shape(self, tmp_path):
        # 14 variables: 11 categorical and 3 numerical
        cat_names = [f"c{i}" for i in range(11)]
        num_names = ["n0", "n1", "n2"]
        header = ",".join(cat_names + num_names)
        rows = [
            ",".join(["v0"] * 11 + ["1.5", "2.5", "3.5"]),
            ",".join(["v1"] * 11 + ["4.5", "5.5", "6.5"]),
        ]
        p = tmp_path / "adults.csv"
        p.write_text(header + "\n" + "\n".join(rows * 2) + "\n")
        d = read_csv(p)
        assert len(d.schema.numeric_names()) == 3
        assert len(d.schema.categorical_names()) == 11

    def test_missing_value(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("a,b\n1,x\n,y\n")
        with pytest.raises(errors.MissingValue):
            read_csv(p)

    def test_unknown_category(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("a,b\n1,x\n2,zzz\n")
        with pytest.raises(errors.UnknownCategory):
            read_csv(p, small_schema())

    def test_ragged_rows(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("a,b\n1,x\n2\n")
        with pytest.raises(errors.ShapeError):
            read_csv(p)

    def test_header_mismatch(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("z,b\n1,x\n")
        with pytest.raises(errors.SchemaMismatch):
            read_csv(p, small_schema())

    def test_categorical_cells_are_text(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(small_dataset(), p)
        lines = p.read_text().splitlines()
        assert lines[0] == "a,b"
        assert lines[1].split(",")[1] == "x"


class TestSidecar:
    def test_round_trip(self, tmp_path):
        schema = generate_synthetic("balanced", 5, seed=0).schema
        p = tmp_path / "s.schema"
        tabular.save_schema_sidecar(schema, p, target="y")
        back, target = tabular.load_schema_sidecar(p)
        assert back == schema
        assert target == "y"


class TestFitEncoder:
    def test_counting(self):
        d = Dataset(small_schema(), {"a": [1.0, 2.0, 3.0], "b": [0, 0, 1]})
        enc = fit_encoder(d)
        assert enc.category_counts["b"].tolist() == [2, 1]
        assert enc.frequencies("b")[0] == pytest.approx(2 / 3)

    def test_numeric_range(self):
        d = Dataset(small_schema(), {"a": [2.0, 4.0, 6.0], "b": [0, 1, 0]})
        assert fit_encoder(d).numeric_range["a"] == (2.0, 6.0)

    def test_empty_category(self):
        d = Dataset(small_schema(), {"a": [1.0, 2.0], "b": [0, 0]})
        with pytest.raises(errors.EmptyCategory):
            fit_encoder(d)

    def test_constant_numeric(self):
        d = Dataset(small_schema(), {"a": [1.0, 1.0], "b": [0, 1]})
        with pytest.raises(errors.ConstantNumeric):
            fit_encoder(d)

    def test_seventy_thirty_frequency(self):
        # Q1 is drawn 70/30; the fitted frequency should sit near 0.7.
        d = generate_synthetic("imbalanced", 2000, seed=11)
        enc = fit_encoder(d)
        assert 0.65 <= enc.frequencies("Q1")[0] <= 0.75

    def test_frequencies_sum_to_one_exactly(self):
        import math

        d = generate_synthetic("imbalanced", 500, seed=5)
        enc = fit_encoder(d)
        for name in d.schema.categorical_names():
            # exact at the count level; correctly-rounded sum is exactly 1.0
            assert enc.category_counts[name].sum() == enc.n
            assert math.fsum(enc.frequencies(name)) == 1.0


class TestEncodeDecode:
    def test_affine_map(self):
        d = Dataset(small_schema(), {"a": [2.0, 4.0, 6.0], "b": [0, 1, 0]})
        enc = fit_encoder(d)
        m = encode(d, enc)
        assert m.values[1, 0] == 0.5

    def test_one_hot(self):
        schema = Schema((Column("q", ("x", "y", "z")),))
        d = Dataset(schema, {"q": [1, 0]})
        enc = tabular.EncoderState(schema, 2, {}, {"q": np.array([1, 1])})
        m = encode(d, enc)
        assert m.values[0].tolist() == [0.0, 1.0, 0.0]

    def test_clipping(self):
        d = Dataset(small_schema(), {"a": [2.0, 6.0], "b": [0, 1]})
        enc = fit_encoder(d)
        test = Dataset(small_schema(), {"a": [8.0, -1.0], "b": [0, 1]})
        m = encode(test, enc)
        assert m.values[0, 0] == 1.0
        assert m.values[1, 0] == 0.0

    def test_schema_mismatch(self):
        d = small_dataset()
        enc = fit_encoder(d)
        other = Dataset(Schema((Column("a"),)), {"a": [1.0, 2.0]})
        with pytest.raises(errors.SchemaMismatch):
            encode(other, enc)

    def test_round_trip(self):
        d = generate_synthetic("imbalanced", 300, seed=2)
        features = Dataset(d.schema, dict(d.columns))
        enc = fit_encoder(features)
        back = decode(encode(features, enc), enc)
        # categorical codes are exact; numerics round-trip to float precision
        assert back.equals(features, numeric_tol=1e-12)

    def test_argmax_decoding(self):
        schema = Schema((Column("q", ("x", "y", "z")),))
        enc = tabular.EncoderState(schema, 2, {}, {"q": np.array([1, 1])})
        m = EncodedMatrix(np.array([[0.2, 0.9, 0.1]]), enc)
        assert decode(m, enc).column("q")[0] == 1

    def test_tie_breaks_low(self):
        schema = Schema((Column("q", ("x", "y")),))
        enc = tabular.EncoderState(schema, 2, {}, {"q": np.array([1, 1])})
        m = EncodedMatrix(np.array([[0.5, 0.5]]), enc)
        assert decode(m, enc).column("q")[0] == 0

    def test_encode_decode_encode_idempotent(self):
        d = generate_synthetic("balanced", 200, seed=9)
        features = Dataset(d.schema, dict(d.columns))
        enc = fit_encoder(features)
        m1 = encode(features, enc)
        m2 = encode(decode(m1, enc), enc)
        assert np.allclose(m1.values, m2.values, atol=1e-12)
        # a second pass is an exact fixed point of the projection
        m3 = encode(decode(m2, enc), enc)
        assert np.array_equal(m2.values, m3.values)

    def test_one_hot_groups_sum_to_one(self):
        d = generate_synthetic("majority", 100, seed=4)
        enc = fit_encoder(d)
        m = encode(d, enc)
        for g in enc.categorical_groups():
            assert np.array_equal(m.values[:, g].sum(axis=1), np.ones(d.n))

    def test_scaled_training_values_in_unit_interval(self):
        d = generate_synthetic("imbalanced", 100, seed=4)
        enc = fit_encoder(d)
        m = encode(d, enc)
        assert m.values.min() >= 0.0 and m.values.max() <= 1.0


class TestGenerateSynthetic:
    def test_schema_shape(self):
        d = generate_synthetic("imbalanced", 10, seed=0)
        assert len(d.schema.numeric_names()) == 3
        assert len(d.schema.categorical_names()) == 5
        assert d.schema.encoded_width == 33
        assert d.y is not None

    def test_invalid_context(self):
        with pytest.raises(errors.InvalidContext):
            generate_synthetic("nope", 10, seed=0)

    def test_bad_coeffs(self):
        with pytest.raises(errors.DataError):
            generate_synthetic("imbalanced", 10, seed=0, coeffs=(1.0,) * 5)

    def test_imbalanced_mu_includes_three_percent_category(self):
        # with only the Q3 coefficient active, y separates on membership
        coeffs = (0, 0, 0, 0, 0, 1.0, 0, 0, 0)
        d = generate_synthetic("imbalanced", 60000, seed=1, coeffs=coeffs)
        q3 = d.schema.column("Q3")
        rare = q3.categories.index("Q3.03")
        member = d.column("Q3") == rare
        assert member.sum() > 100
        gap = d.y[member].mean() - d.y[~member].mean()
        assert gap == pytest.approx(1.0, abs=0.05)

    def test_majority_mu_has_no_numeric_terms(self):
        d = generate_synthetic("majority", 50000, seed=2)
        for name in ("X1", "X2", "X3"):
            r = np.corrcoef(d.column(name), d.y)[0, 1]
            assert abs(r) < 0.02
        # the same coefficients in the balanced context do load the numerics
        d2 = generate_synthetic("balanced", 50000, seed=2)
        assert abs(np.corrcoef(d2.column("X1"), d2.y)[0, 1]) > 0.2

    def test_rare_cell_monte_carlo(self):
        d = generate_synthetic("imbalanced", 200000, seed=7)
        q5 = d.schema.column("Q5")
        rare = q5.categories.index("Q5.01")
        freq = np.mean(d.column("Q5") == rare)
        assert 0.008 <= freq <= 0.012

    def test_seed_determinism(self):
        a = generate_synthetic("imbalanced", 500, seed=42)
        b = generate_synthetic("imbalanced", 500, seed=42)
        c = generate_synthetic("imbalanced", 500, seed=43)
        assert a.equals(b)
        assert a.schema == c.schema
        assert not a.equals(c)


class TestSplit:
    def test_forty_percent(self):
        d = generate_synthetic("imbalanced", 2000, seed=0)
        train, test = split(d, 0.4, seed=1)
        assert test.n == 800 and train.n == 1200

    def test_degenerate_fraction(self):
        d = small_dataset(3)
        with pytest.raises(errors.FractionOutOfRange):
            split(d, 0.01, seed=0)  # rounds to an empty test split
        with pytest.raises(errors.FractionOutOfRange):
            split(d, 1.5, seed=0)

    def test_deterministic(self):
        d = generate_synthetic("balanced", 100, seed=0)
        a1, b1 = split(d, 0.3, seed=5)
        a2, b2 = split(d, 0.3, seed=5)
        assert a1.equals(a2) and b1.equals(b2)

    def test_partition(self):
        d = generate_synthetic("balanced", 100, seed=0)
        train, test = split(d, 0.3, seed=5)
        merged = np.sort(np.concatenate([train.column("X1"), test.column("X1")]))
        assert np.array_equal(merged, np.sort(d.column("X1")))


@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=30),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_round_trip_property(n, seed):
    rng = np.random.default_rng(seed)
    schema = Schema((Column("a"), Column("b", ("u", "v", "w"))))
    d = Dataset(
        schema,
        {"a": rng.normal(size=n), "b": rng.integers(0, 3, size=n)},
    )
    try:
        enc = fit_encoder(d)
    except (errors.EmptyCategory, errors.ConstantNumeric):
        return
    assert decode(encode(d, enc), enc).equals(d, numeric_tol=1e-12)
