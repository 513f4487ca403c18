"""Experiment orchestration: proxy predictors, clustering, k-fold runs.

The downstream evaluation uses deterministic built-in proxies instead of
an autoML ensemble: closed-form ridge regression for continuous targets
and fixed-step logistic regression for classification. The claims under
test are orderings between loss arms, which survive the predictor swap.

Each run draws its own train/test split; within a run every loss arm
shares the same split, the same model seed, and the same held-out target
vector. All sub-seeds derive from the master seed via
:func:`mixedae.rng.derive_seed`, so any single run can be reproduced in
isolation.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import metrics, models, tabular
from .errors import ConfigError, DataError, MixedAEError
from .models import (
    AutoencoderConfig,
    LearningCurves,
    LossSpec,
    TrainedAutoencoder,
    VAEConfig,
    parse_loss,
)
from .rng import derive_seed, make_rng
from .tabular import Dataset, encode, fit_encoder, split

TASKS = ("regression", "binary", "multiclass", "unsupervised")

RIDGE_LAMBDA = 1e-4
LOGISTIC_STEPS = 2000
LOGISTIC_LR = 1.0
LOGISTIC_LAMBDA = 1e-4

BASELINE = "baseline"


# ----------------------------------------------------------------------
# Proxy predictors
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RidgeModel:
    coef: np.ndarray
    intercept: float

    def predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef + self.intercept


def ridge_fit(X: np.ndarray, y: np.ndarray, lam: float) -> RidgeModel:
    """Closed-form ridge with an unregularized intercept."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    if lam > 0.0:
        coef = np.linalg.solve(Xc.T @ Xc + lam * np.eye(X.shape[1]), Xc.T @ yc)
    else:
        coef = np.linalg.lstsq(Xc, yc, rcond=None)[0]
    return RidgeModel(coef, float(y_mean - x_mean @ coef))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


@dataclass(frozen=True)
class LogisticModel:
    coef: np.ndarray
    intercept: float

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(X @ self.coef + self.intercept)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)


def logistic_fit(
    X: np.ndarray,
    y: np.ndarray,
    steps: int = LOGISTIC_STEPS,
    lr: float = LOGISTIC_LR,
    lam: float = LOGISTIC_LAMBDA,
) -> LogisticModel:
    """Full-batch gradient descent on L2-regularized log-loss.

    The intercept is unregularized. Works with zero feature columns, in
    which case the fitted probability converges to the base rate.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    coef = np.zeros(d)
    intercept = 0.0
    for _ in range(steps):
        p = _sigmoid(X @ coef + intercept)
        err = p - y
        coef -= lr * (X.T @ err / n + lam * coef)
        intercept -= lr * float(err.mean())
    return LogisticModel(coef, intercept)


# ----------------------------------------------------------------------
# K-means
# ----------------------------------------------------------------------

@dataclass
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    inertia_history: list[float]


def _pairwise_sq(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        np.sum(points * points, axis=1)[:, None]
        + np.sum(centers * centers, axis=1)[None, :]
        - 2.0 * points @ centers.T
    )
    return np.maximum(d2, 0.0)


def kmeans(points: np.ndarray, k: int, seed: int, max_iter: int = 100) -> KMeansResult:
    """Lloyd iterations from a k-means++ start; empty clusters reseed to
    the farthest point. Inertia is non-increasing across iterations."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k < 1 or k > n:
        raise ConfigError(f"k must be in [1, {n}], got {k}")
    rng = make_rng(seed)

    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest = _pairwise_sq(points, centers[:1])[:, 0]
    for j in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            centers[j] = points[rng.integers(n)]
        else:
            r = rng.random() * total
            centers[j] = points[np.searchsorted(np.cumsum(closest), r)]
        closest = np.minimum(closest, _pairwise_sq(points, centers[j : j + 1])[:, 0])

    labels = np.zeros(n, dtype=np.int64)
    history: list[float] = []
    for _ in range(max_iter):
        d2 = _pairwise_sq(points, centers)
        new_labels = d2.argmin(axis=1)
        for j in range(k):
            members = new_labels == j
            if members.any():
                centers[j] = points[members].mean(axis=0)
            else:
                far = d2[np.arange(n), new_labels].argmax()
                centers[j] = points[far]
                new_labels[far] = j
        history.append(float(d2[np.arange(n), new_labels].sum()))
        if (new_labels == labels).all() and len(history) > 1:
            break
        labels = new_labels
    inertia = float(_pairwise_sq(points, centers)[np.arange(n), labels].sum())
    return KMeansResult(labels, centers, inertia, history)


# ----------------------------------------------------------------------
# Experiment configuration and report
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DataSource:
    """Synthetic context or CSV-backed dataset."""

    kind: str = "synthetic"  # synthetic | csv
    context: str = "imbalanced"
    n: int = 2000
    coeffs: tuple[float, ...] = (1.0,) * 9
    path: str | None = None
    schema_path: str | None = None
    target: str | None = None

    @property
    def label(self) -> str:
        return self.context if self.kind == "synthetic" else Path(self.path or "csv").stem


@dataclass(frozen=True)
class ExperimentConfig:
    source: DataSource = field(default_factory=DataSource)
    task: str = "regression"
    runs: int = 5
    test_fraction: float = 0.4
    epochs: tuple[int, ...] = (1000,)
    losses: tuple[str, ...] = ("standard", "balanced")
    dim_z: int = 10
    batch_size: int = 128
    learning_rate: float = 1e-4
    seed: int = 0
    clusters: int = 4
    vae: VAEConfig | None = None

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        for loss in self.losses:
            parse_loss(loss)  # validates


@dataclass(frozen=True)
class ReportRow:
    run: int
    epochs: int
    loss: str
    metric: str
    value: float


@dataclass
class ExperimentReport:
    context: str
    rows: list[ReportRow]
    curves: dict[tuple[int, int, str], LearningCurves] = field(default_factory=dict)

    def values(self, metric: str, loss: str, epochs: int | None = None) -> np.ndarray:
        out = [
            r.value
            for r in self.rows
            if r.metric == metric
            and r.loss == loss
            and (epochs is None or r.epochs == epochs)
        ]
        return np.asarray(out)

    def aggregates(self) -> dict[tuple[int, str, str], tuple[float, float]]:
        """(epochs, loss, metric) -> (mean, std over runs)."""
        cells: dict[tuple[int, str, str], list[float]] = {}
        for r in self.rows:
            cells.setdefault((r.epochs, r.loss, r.metric), []).append(r.value)
        return {
            key: (float(np.mean(v)), float(np.std(v))) for key, v in sorted(cells.items())
        }

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["run", "context", "epochs", "loss", "metric", "value"])
            for r in sorted(self.rows, key=lambda r: (r.run, r.epochs, r.loss, r.metric)):
                writer.writerow([r.run, self.context, r.epochs, r.loss, r.metric, repr(r.value)])

    def write_summary(self, path: str | Path) -> None:
        tree: dict = {}
        for (epochs, loss, metric), (mean, std) in self.aggregates().items():
            tree.setdefault(str(epochs), {}).setdefault(loss, {})[metric] = {
                "mean": mean,
                "std": std,
            }
        Path(path).write_text(json.dumps({"context": self.context, "metrics": tree}, indent=2, sort_keys=True))

    def write_curves(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for (run, epochs, loss) in sorted(self.curves):
            models.curves_to_csv(
                self.curves[(run, epochs, loss)],
                directory / f"run_{run}_{loss.replace(':', '_')}.csv",
                epochs_label=epochs,
            )


def load_report_csv(path: str | Path) -> ExperimentReport:
    rows = []
    context = ""
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            context = rec["context"]
            rows.append(
                ReportRow(
                    run=int(rec["run"]),
                    epochs=int(rec["epochs"]),
                    loss=rec["loss"],
                    metric=rec["metric"],
                    value=float(rec["value"]),
                )
            )
    return ExperimentReport(context, rows)


# ----------------------------------------------------------------------
# Downstream scoring
# ----------------------------------------------------------------------

def load_source(source: DataSource, seed: int) -> Dataset:
    if source.kind == "synthetic":
        return tabular.generate_synthetic(source.context, source.n, seed, source.coeffs)
    if source.kind == "csv":
        if source.path is None:
            raise ConfigError("csv source needs a path")
        schema = None
        target = source.target
        if source.schema_path:
            schema, sidecar_target = tabular.load_schema_sidecar(source.schema_path)
            target = target or sidecar_target
        return tabular.read_csv(source.path, schema, target=target)
    raise ConfigError(f"unknown data source kind {source.kind!r}")


def _downstream_metrics(
    task: str,
    X_train: np.ndarray,
    y_train: np.ndarray | None,
    X_test: np.ndarray,
    y_test: np.ndarray | None,
    suffix: str,
) -> dict[str, float]:
    """Fit the task proxy on (X_train, y_train), score on the test side."""
    out: dict[str, float] = {}
    if task == "regression":
        model = ridge_fit(X_train, y_train, RIDGE_LAMBDA)
        err = metrics.prediction_error(y_test, model.predict(X_test))
        out[f"y_mse_{suffix}"] = err.mse
        out[f"y_mae_{suffix}"] = err.mae
        out[f"y_rmse_{suffix}"] = err.rmse
    elif task == "binary":
        model = logistic_fit(X_train, (y_train > 0.5).astype(float))
        scores = model.predict_proba(X_test)
        truth = y_test > 0.5
        cls = metrics.classification_scores(truth, scores >= 0.5)
        out[f"f1_{suffix}"] = cls.f1
        out[f"balacc_{suffix}"] = cls.balanced_accuracy
        out[f"acc_{suffix}"] = cls.accuracy
        out[f"auc_{suffix}"] = metrics.rank_auc(truth, scores)
    elif task == "multiclass":
        classes = np.unique(np.concatenate([y_train, y_test])).astype(int)
        scores = np.column_stack(
            [
                logistic_fit(X_train, (y_train.astype(int) == c).astype(float)).predict_proba(X_test)
                for c in classes
            ]
        )
        pred = classes[scores.argmax(axis=1)]
        out[f"acc_{suffix}"] = float(np.mean(pred == y_test.astype(int)))
    return out


def _needs_target(task: str) -> bool:
    return task in ("regression", "binary", "multiclass")


def _run_once(data: Dataset, cfg: ExperimentConfig, run: int) -> tuple[list[ReportRow], dict]:
    split_seed = derive_seed(cfg.seed, run, 0)
    try:
        train, test = split(data, cfg.test_fraction, split_seed)
        enc = fit_encoder(train)
        X_train = encode(train, enc)
        X_test = encode(test, enc)
        rows: list[ReportRow] = []
        curves: dict[tuple[int, int, str], LearningCurves] = {}

        baseline: dict[str, float] = {}
        if _needs_target(cfg.task):
            baseline.update(
                _downstream_metrics(cfg.task, X_train.values, train.y, X_test.values, test.y, "recon")
            )
        if cfg.task == "unsupervised":
            km = kmeans(X_train.values, cfg.clusters, derive_seed(cfg.seed, run, 3))
            baseline["silhouette"] = metrics.silhouette(X_train.values, km.labels)
        rows.extend(ReportRow(run, 0, BASELINE, k, v) for k, v in baseline.items())

        model_seed = derive_seed(cfg.seed, run, 1)
        for epochs in cfg.epochs:
            for loss_text in cfg.losses:
                ae_cfg = AutoencoderConfig(
                    dim_z=cfg.dim_z,
                    epochs=epochs,
                    batch_size=cfg.batch_size,
                    learning_rate=cfg.learning_rate,
                    loss=parse_loss(loss_text),
                    seed=model_seed,
                )
                model = models.train_autoencoder(X_train, ae_cfg)
                curves[(run, epochs, loss_text)] = model.curves

                cell: dict[str, float] = {}
                recon_test = models.reconstruct(model, test)
                cell["msem"] = metrics.msem(test, recon_test, enc)
                cell["mc"] = metrics.mc_distance(test, recon_test)

                if _needs_target(cfg.task):
                    recon_train = models.reconstruct(model, train)
                    cell.update(
                        _downstream_metrics(
                            cfg.task,
                            encode(recon_train, enc).values,
                            train.y,
                            X_test.values,
                            test.y,
                            "recon",
                        )
                    )
                    cell.update(
                        _downstream_metrics(
                            cfg.task,
                            models.latent(model, train),
                            train.y,
                            models.latent(model, test),
                            test.y,
                            "latent",
                        )
                    )
                if cfg.task == "unsupervised":
                    z = models.latent(model, train)
                    km = kmeans(z, cfg.clusters, derive_seed(cfg.seed, run, 3))
                    cell["silhouette"] = metrics.silhouette(z, km.labels)
                rows.extend(ReportRow(run, epochs, loss_text, k, v) for k, v in cell.items())
        return rows, curves
    except MixedAEError as e:
        raise type(e)(f"run {run} (split seed {split_seed}): {e}") from e


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentReport:
    """Split / encode / train each loss arm / score, repeated ``runs`` times.

    One failed run aborts the whole experiment with the failing run and
    seed in the message. With ``jobs > 1`` the runs execute in separate
    processes; assembly is keyed, so completion order does not matter.
    """
    data = load_source(cfg.source, derive_seed(cfg.seed, 0))
    if _needs_target(cfg.task) and data.y is None:
        raise DataError(f"task {cfg.task!r} needs a target column")
    rows: list[ReportRow] = []
    curves: dict[tuple[int, int, str], LearningCurves] = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_run_once, data, cfg, r): r for r in range(cfg.runs)}
            results = {futures[f]: f.result() for f in futures}
        for r in range(cfg.runs):
            got_rows, got_curves = results[r]
            rows.extend(got_rows)
            curves.update(got_curves)
    else:
        for r in range(cfg.runs):
            got_rows, got_curves = _run_once(data, cfg, r)
            rows.extend(got_rows)
            curves.update(got_curves)
    rows.sort(key=lambda r: (r.run, r.epochs, r.loss, r.metric))
    return ExperimentReport(cfg.source.label, rows, curves)


# ----------------------------------------------------------------------
# VAE experiment
# ----------------------------------------------------------------------

def _vae_run_once(data: Dataset, cfg: ExperimentConfig, run: int) -> list[ReportRow]:
    split_seed = derive_seed(cfg.seed, run, 0)
    vae_base = cfg.vae if cfg.vae is not None else VAEConfig()
    try:
        train, test = split(data, cfg.test_fraction, split_seed)
        enc = fit_encoder(train)
        X_train = encode(train, enc)
        X_test = encode(test, enc)
        rows: list[ReportRow] = []

        baseline: dict[str, float] = {}
        if _needs_target(cfg.task):
            baseline.update(
                _downstream_metrics(cfg.task, X_train.values, train.y, X_test.values, test.y, "gen")
            )
        rows.extend(ReportRow(run, 0, BASELINE, k, v) for k, v in baseline.items())

        for loss_text in cfg.losses:
            vae_cfg = replace(
                vae_base, loss=parse_loss(loss_text), seed=derive_seed(cfg.seed, run, 1)
            )
            model = models.train_vae(X_train, train.y, vae_cfg)

            cell: dict[str, float] = {}
            recon_test = models.vae_reconstruct(model, test)
            cell["msem"] = metrics.msem(test, recon_test, enc)

            generated = models.vae_generate(model, train.n, derive_seed(cfg.seed, run, 2))
            if _needs_target(cfg.task):
                gen_y = generated.y
                if cfg.task == "binary":
                    gen_y = (gen_y > 0.5).astype(float)
                elif cfg.task == "multiclass":
                    hi = int(train.y.max())
                    gen_y = np.clip(np.round(gen_y), 0, hi)
                cell.update(
                    _downstream_metrics(
                        cfg.task, encode(generated, enc).values, gen_y, X_test.values, test.y, "gen"
                    )
                )
            rows.extend(
                ReportRow(run, vae_cfg.epochs, loss_text, k, v) for k, v in cell.items()
            )
        return rows
    except MixedAEError as e:
        raise type(e)(f"run {run} (split seed {split_seed}): {e}") from e


def vae_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentReport:
    """Per loss arm: train a VAE, generate a synthetic train-sized sample,
    fit proxies on it, and score against the real held-out test split."""
    data = load_source(cfg.source, derive_seed(cfg.seed, 0))
    if data.y is None:
        raise DataError("the VAE experiment needs a target column")
    rows: list[ReportRow] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_vae_run_once, data, cfg, r): r for r in range(cfg.runs)}
            results = {futures[f]: f.result() for f in futures}
        for r in range(cfg.runs):
            rows.extend(results[r])
    else:
        for r in range(cfg.runs):
            rows.extend(_vae_run_once(data, cfg, r))
    rows.sort(key=lambda r: (r.run, r.epochs, r.loss, r.metric))
    return ExperimentReport(cfg.source.label, rows)
