"""Autoencoder and VAE construction, training, and sampling.

The autoencoder narrows from the encoded width ``p`` in steps of
``q = p // 10`` down to the latent width, mirrored back up, with Tanh
after every layer including the last. Since Tanh cannot reach the
extreme one-hot targets 0 and 1 exactly, reconstructions are read
through a fixed affine output adapter: a network output ``o`` means the
reconstruction ``(o - 0.05) / 0.9``, so perfect reconstruction of [0, 1]
targets is attainable at outputs 0.05 and 0.95. The losses therefore
always see raw encoded targets. The cross-entropy path skips the
adapter and treats raw outputs as logits (softmax scores play the role
of the reconstruction).

The VAE mirrors the same idea with a single Tanh hidden layer on each
side, linear mu/logvar/output heads, a width-1 target head, and the
analytic Gaussian KL term with weight 1.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import nn, tabular
from .errors import ConfigError, ConstantNumeric, DegenerateWidth, NonFinite, ShapeError
from .losses import (
    LossWeights,
    balanced_mse_loss,
    blended_loss,
    compute_balance_weights,
    cross_entropy_loss,
    mse_loss,
)
from .nn import Network, adam_step, backward, forward
from .rng import derive_seed, gaussian, make_rng
from .tabular import Dataset, EncodedMatrix, EncoderState, encode, decode

# Reachable band for [0, 1] targets under a final Tanh.
OUT_LOW = 0.05
OUT_HIGH = 0.95
_SPAN = OUT_HIGH - OUT_LOW

LOSS_KINDS = ("standard", "balanced", "blended", "ce")


@dataclass(frozen=True)
class LossSpec:
    kind: str
    alpha: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in LOSS_KINDS:
            raise ConfigError(f"unknown loss {self.kind!r}; expected one of {LOSS_KINDS}")
        if self.kind == "blended":
            if self.alpha is None or not 0.0 <= self.alpha <= 1.0:
                raise ConfigError(f"blended loss needs alpha in [0, 1], got {self.alpha}")

    @property
    def needs_weights(self) -> bool:
        return self.kind in ("balanced", "blended")

    @property
    def label(self) -> str:
        return f"blended:{self.alpha:g}" if self.kind == "blended" else self.kind


def parse_loss(text: str) -> LossSpec:
    """Parse ``standard | balanced | blended:alpha | ce``."""
    if text.startswith("blended:"):
        try:
            return LossSpec("blended", float(text.split(":", 1)[1]))
        except ValueError:
            raise ConfigError(f"bad blended alpha in {text!r}") from None
    return LossSpec(text)


@dataclass
class AutoencoderConfig:
    dim_z: int = 10
    epochs: int = 1000
    batch_size: int = 128
    learning_rate: float = 1e-4
    loss: LossSpec = dataclasses.field(default_factory=lambda: LossSpec("standard"))
    seed: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.loss, str):
            self.loss = parse_loss(self.loss)
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be >= 1")


@dataclass
class LearningCurves:
    """Per-encoded-feature training MSE at the 10 epoch checkpoints."""

    checkpoints: np.ndarray          # epoch numbers, length 10
    feature_names: tuple[str, ...]
    errors: np.ndarray               # 10 x P


@dataclass
class TrainedAutoencoder:
    encoder_net: Network   # phi
    decoder_net: Network   # psi
    state: EncoderState
    weights: LossWeights | None
    config: AutoencoderConfig
    curves: LearningCurves | None


def checkpoint_epochs(epochs: int) -> list[int]:
    """The 10 logging epochs: ceil(k * epochs / 10) for k = 1..10."""
    return [max(1, -(-k * epochs // 10)) for k in range(1, 11)]


def build_autoencoder(p: int, dim_z: int, seed: int) -> tuple[Network, Network]:
    """Mirror-symmetric Tanh stacks p -> p-q -> p-2q -> p-3q -> dim_z and back."""
    q = p // 10
    widths = [p, p - q, p - 2 * q, p - 3 * q]
    if any(w <= dim_z or w <= 0 for w in widths):
        raise DegenerateWidth(f"widths {widths} must all exceed dim_z={dim_z}")
    enc_dims = widths + [dim_z]
    dec_dims = enc_dims[::-1]
    acts = [nn.TANH] * 4
    phi = nn.init_network(enc_dims, acts, derive_seed(seed, 0))
    psi = nn.init_network(dec_dims, acts, derive_seed(seed, 1))
    return phi, psi


def _loss_fn(spec: LossSpec, weights: LossWeights | None, groups):
    if spec.kind == "standard":
        return mse_loss
    if spec.kind == "balanced":
        return lambda p, t: balanced_mse_loss(p, t, weights)
    if spec.kind == "blended":
        return lambda p, t: blended_loss(spec.alpha, p, t, weights)
    return lambda p, t: cross_entropy_loss(p, t, groups)


def _resolve_weights(
    spec: LossSpec, enc: EncoderState, weights: LossWeights | None
) -> LossWeights | None:
    if not spec.needs_weights:
        return None
    return weights if weights is not None else compute_balance_weights(enc)


def _scores_from_output(output: np.ndarray, spec: LossSpec, groups) -> np.ndarray:
    """Map raw network outputs to reconstruction scores in the data space."""
    if spec.kind != "ce":
        return (output - OUT_LOW) / _SPAN
    scores = output.copy()
    for g in groups:
        logits = output[:, g]
        m = logits.max(axis=1, keepdims=True)
        e = np.exp(logits - m)
        scores[:, g] = e / e.sum(axis=1, keepdims=True)
    return scores


def train_autoencoder(
    train: EncodedMatrix,
    cfg: AutoencoderConfig,
    weights: LossWeights | None = None,
) -> TrainedAutoencoder:
    """Mini-batch Adam on the configured loss with inputs as targets.

    Rows are reshuffled every epoch from the run seed and the final short
    batch is kept, so training is bit-reproducible given (data, config,
    seed). Per-feature training MSE is recorded at each of the 10
    checkpoint epochs. A non-finite loss aborts with :class:`NonFinite`.
    """
    X = train.values
    enc = train.encoder
    weights = _resolve_weights(cfg.loss, enc, weights)
    groups = enc.categorical_groups()
    loss_fn = _loss_fn(cfg.loss, weights, groups)
    use_adapter = cfg.loss.kind != "ce"

    phi, psi = build_autoencoder(train.width, cfg.dim_z, derive_seed(cfg.seed, 0))
    opt_phi = nn.AdamState.for_network(phi)
    opt_psi = nn.AdamState.for_network(psi)
    shuffle = make_rng(derive_seed(cfg.seed, 1))

    checkpoints = checkpoint_epochs(cfg.epochs)
    curve_rows = []
    n = X.shape[0]

    for epoch in range(1, cfg.epochs + 1):
        order = shuffle.permutation(n)
        for start in range(0, n, cfg.batch_size):
            xb = X[order[start : start + cfg.batch_size]]
            t_phi = forward(phi, xb)
            t_psi = forward(psi, t_phi.output)
            out = t_psi.output
            pred = (out - OUT_LOW) / _SPAN if use_adapter else out
            value, d_pred = loss_fn(pred, xb)
            if not np.isfinite(value):
                raise NonFinite(f"loss became non-finite at epoch {epoch}")
            d_out = d_pred / _SPAN if use_adapter else d_pred
            g_psi = backward(psi, t_psi, d_out)
            g_phi = backward(phi, t_phi, g_psi.wrt_input)
            adam_step(opt_phi, phi, g_phi, cfg.learning_rate)
            adam_step(opt_psi, psi, g_psi, cfg.learning_rate)
        if epoch in checkpoints:
            scores = _scores_from_output(
                forward(psi, forward(phi, X).output).output, cfg.loss, groups
            )
            err = np.mean((scores - X) ** 2, axis=0)
            for _ in range(checkpoints.count(epoch)):
                curve_rows.append(err)

    curves = LearningCurves(
        checkpoints=np.asarray(checkpoints),
        feature_names=enc.feature_names(),
        errors=np.vstack(curve_rows),
    )
    return TrainedAutoencoder(phi, psi, enc, weights, cfg, curves)


def reconstruction_scores(model: TrainedAutoencoder, data: Dataset) -> np.ndarray:
    """Soft reconstruction of ``data`` in the encoded working space."""
    m = encode(data, model.state)
    out = forward(model.decoder_net, forward(model.encoder_net, m.values).output).output
    return _scores_from_output(out, model.config.loss, model.state.categorical_groups())


def reconstruct(model: TrainedAutoencoder, data: Dataset) -> Dataset:
    """Encode, push through the autoencoder, hard-decode.

    The original target column, if any, is carried through unchanged
    (the autoencoder never sees it).
    """
    scores = reconstruction_scores(model, data)
    decoded = decode(EncodedMatrix(scores, model.state), model.state)
    if data.y is None:
        return decoded
    return dataclasses.replace(decoded, y=data.y, target_name=data.target_name)


def latent(model: TrainedAutoencoder, data: Dataset) -> np.ndarray:
    """n x dim_z bottleneck representation; entries in (-1, 1)."""
    m = encode(data, model.state)
    return forward(model.encoder_net, m.values).output


# ----------------------------------------------------------------------
# Variational autoencoder
# ----------------------------------------------------------------------

@dataclass
class VAEConfig:
    dim_hidden: int = 20
    dim_z: int = 10
    epochs: int = 1000
    batch_size: int = 256
    learning_rate: float = 1e-3
    loss: LossSpec = dataclasses.field(default_factory=lambda: LossSpec("standard"))
    seed: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.loss, str):
            self.loss = parse_loss(self.loss)
        if self.loss.kind == "ce":
            raise ConfigError("the VAE supports standard/balanced/blended losses only")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be >= 1")


@dataclass
class VAENets:
    """Appendix-style wiring: shared Tanh trunk, linear heads."""

    hl1: Network    # p -> hidden, tanh
    hl21: Network   # hidden -> z, linear (mu head)
    hl22: Network   # hidden -> z, linear (logvar head)
    hl3: Network    # z -> hidden, tanh
    hl41: Network   # hidden -> p, linear (feature head)
    hl42: Network   # hidden -> 1, linear (target head)

    def all(self) -> list[Network]:
        return [self.hl1, self.hl21, self.hl22, self.hl3, self.hl41, self.hl42]


@dataclass
class TrainedVAE:
    nets: VAENets
    state: EncoderState
    weights: LossWeights | None
    config: VAEConfig
    y_range: tuple[float, float]
    loss_checkpoints: np.ndarray  # (epoch, loss) pairs, 10 rows


def build_vae(p: int, dim_hidden: int, dim_z: int, seed: int) -> VAENets:
    def net(dims, act, idx):
        return nn.init_network(dims, [act], derive_seed(seed, idx))

    return VAENets(
        hl1=net([p, dim_hidden], nn.TANH, 0),
        hl21=net([dim_hidden, dim_z], nn.IDENTITY, 1),
        hl22=net([dim_hidden, dim_z], nn.IDENTITY, 2),
        hl3=net([dim_z, dim_hidden], nn.TANH, 3),
        hl41=net([dim_hidden, p], nn.IDENTITY, 4),
        hl42=net([dim_hidden, 1], nn.IDENTITY, 5),
    )


def reparameterize(mu: np.ndarray, logvar: np.ndarray, noise: np.ndarray) -> np.ndarray:
    """mu + exp(0.5 * logvar) * noise."""
    mu = np.asarray(mu, dtype=np.float64)
    logvar = np.asarray(logvar, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    if mu.shape != logvar.shape or mu.shape != noise.shape:
        raise ShapeError("mu, logvar and noise must share a shape")
    return mu + np.exp(0.5 * logvar) * noise


def vae_loss(
    x_pred: np.ndarray,
    x_true: np.ndarray,
    y_pred: np.ndarray,
    y_true: np.ndarray,
    mu: np.ndarray,
    logvar: np.ndarray,
    weights: LossWeights | None,
    loss: LossSpec,
) -> tuple[float, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Reconstruction loss + plain target MSE + analytic KL (weight 1).

    Returns the scalar value and gradients w.r.t. (x_pred, y_pred, mu,
    logvar). All three terms are per-row quantities averaged over the
    batch: the feature block and the width-1 target head contribute
    their (chosen resp. squared) error summed over output entries, and
    the KL term is the usual closed form. Keeping the reconstruction at
    per-row scale stops the KL term from dwarfing it (per-entry means
    collapse the posterior and the latent carries nothing).
    """
    if mu.shape != logvar.shape:
        raise ShapeError("mu and logvar must share a shape")
    width = x_pred.shape[1]
    if loss.kind == "standard":
        vx, gx = mse_loss(x_pred, x_true)
    elif loss.kind == "balanced":
        vx, gx = balanced_mse_loss(x_pred, x_true, weights)
    else:
        vx, gx = blended_loss(loss.alpha, x_pred, x_true, weights)
    vx, gx = vx * width, gx * width
    vy, gy = mse_loss(y_pred, y_true)
    B = mu.shape[0]
    ev = np.exp(logvar)
    kl = float(-0.5 * np.sum(1.0 + logvar - mu * mu - ev) / B)
    g_mu = mu / B
    g_logvar = 0.5 * (ev - 1.0) / B
    return vx + vy + kl, (gx, gy, g_mu, g_logvar)


def train_vae(
    train: EncodedMatrix,
    y: np.ndarray,
    cfg: VAEConfig,
    weights: LossWeights | None = None,
) -> TrainedVAE:
    """Mini-batch Adam over the VAE objective with seeded noise.

    The target is min-max scaled to [0, 1] from the training split so the
    target head's MSE is on the same footing as the feature block; the
    inverse map is applied when generating.
    """
    X = train.values
    enc = train.encoder
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (X.shape[0],):
        raise ShapeError("y must be a vector with one entry per training row")
    y_lo, y_hi = float(y.min()), float(y.max())
    if y_hi <= y_lo:
        raise ConstantNumeric("target column is constant")
    ys = ((y - y_lo) / (y_hi - y_lo))[:, None]

    weights = _resolve_weights(cfg.loss, enc, weights)
    nets = build_vae(train.width, cfg.dim_hidden, cfg.dim_z, derive_seed(cfg.seed, 0))
    opts = [nn.AdamState.for_network(net) for net in nets.all()]
    shuffle = make_rng(derive_seed(cfg.seed, 1))
    noise_rng = make_rng(derive_seed(cfg.seed, 2))

    checkpoints = checkpoint_epochs(cfg.epochs)
    history = []
    n = X.shape[0]

    for epoch in range(1, cfg.epochs + 1):
        order = shuffle.permutation(n)
        last_value = np.nan
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            xb, yb = X[idx], ys[idx]
            t1 = forward(nets.hl1, xb)
            t_mu = forward(nets.hl21, t1.output)
            t_lv = forward(nets.hl22, t1.output)
            mu, logvar = t_mu.output, t_lv.output
            eps = gaussian(noise_rng, mu.shape)
            z = reparameterize(mu, logvar, eps)
            t3 = forward(nets.hl3, z)
            t_x = forward(nets.hl41, t3.output)
            t_y = forward(nets.hl42, t3.output)

            value, (gx, gy, g_mu_kl, g_lv_kl) = vae_loss(
                t_x.output, xb, t_y.output, yb, mu, logvar, weights, cfg.loss
            )
            if not np.isfinite(value):
                raise NonFinite(f"VAE loss became non-finite at epoch {epoch}")
            last_value = value

            g41 = backward(nets.hl41, t_x, gx)
            g42 = backward(nets.hl42, t_y, gy)
            g3 = backward(nets.hl3, t3, g41.wrt_input + g42.wrt_input)
            dz = g3.wrt_input
            d_mu = dz + g_mu_kl
            d_lv = dz * eps * 0.5 * np.exp(0.5 * logvar) + g_lv_kl
            g21 = backward(nets.hl21, t_mu, d_mu)
            g22 = backward(nets.hl22, t_lv, d_lv)
            g1 = backward(nets.hl1, t1, g21.wrt_input + g22.wrt_input)

            for net, opt, g in zip(nets.all(), opts, [g1, g21, g22, g3, g41, g42]):
                adam_step(opt, net, g, cfg.learning_rate)
        if epoch in checkpoints:
            for _ in range(checkpoints.count(epoch)):
                history.append((epoch, last_value))

    return TrainedVAE(nets, enc, weights, cfg, (y_lo, y_hi), np.asarray(history))


def vae_reconstruction_scores(model: TrainedVAE, data: Dataset) -> np.ndarray:
    """Deterministic reconstruction through the mean latent (z = mu)."""
    m = encode(data, model.state)
    h1 = forward(model.nets.hl1, m.values).output
    mu = forward(model.nets.hl21, h1).output
    h3 = forward(model.nets.hl3, mu).output
    return forward(model.nets.hl41, h3).output


def vae_reconstruct(model: TrainedVAE, data: Dataset) -> Dataset:
    scores = vae_reconstruction_scores(model, data)
    decoded = decode(EncodedMatrix(scores, model.state), model.state)
    if data.y is None:
        return decoded
    return dataclasses.replace(decoded, y=data.y, target_name=data.target_name)


def vae_generate(model: TrainedVAE, count: int, seed: int) -> Dataset:
    """Sample z ~ N(0, I), decode, and build a hard dataset with target.

    Categorical cells are drawn from the per-variable distribution given
    by the clipped, normalized decoder scores rather than by argmax:
    winner-take-all decoding collapses each variable to the dominant
    category of its latent region and badly distorts generated category
    frequencies. Numerics and the target are unscaled through the
    training ranges.
    """
    if count < 1:
        raise ConfigError("count must be >= 1")
    rng = make_rng(seed)
    z = gaussian(rng, (count, model.config.dim_z))
    h3 = forward(model.nets.hl3, z).output
    x_scores = forward(model.nets.hl41, h3).output
    y_scaled = forward(model.nets.hl42, h3).output[:, 0]
    enc = model.state
    cols: dict[str, np.ndarray] = {}
    j = 0
    for c in enc.schema.columns:
        if c.is_categorical:
            p_q = len(c.categories)
            s = np.clip(x_scores[:, j : j + p_q], 1e-9, None)
            s /= s.sum(axis=1, keepdims=True)
            u = rng.random(count)
            draw = (np.cumsum(s, axis=1) < u[:, None]).sum(axis=1)
            cols[c.name] = np.minimum(draw, p_q - 1)
            j += p_q
        else:
            lo, hi = enc.numeric_range[c.name]
            cols[c.name] = lo + x_scores[:, j] * (hi - lo)
            j += 1
    y_lo, y_hi = model.y_range
    return Dataset(enc.schema, cols, y=y_lo + y_scaled * (y_hi - y_lo))


# ----------------------------------------------------------------------
# Checkpoints
# ----------------------------------------------------------------------

def save_autoencoder(model: TrainedAutoencoder, path: str | Path) -> None:
    header = {
        "kind": "autoencoder",
        "schema_hash": tabular.schema_hash(model.state.schema),
        "config": {
            "dim_z": model.config.dim_z,
            "epochs": model.config.epochs,
            "batch_size": model.config.batch_size,
            "learning_rate": model.config.learning_rate,
            "loss": model.config.loss.label,
            "seed": model.config.seed,
        },
        "seed": model.config.seed,
        "encoder_state": tabular.encoder_to_dict(model.state),
    }
    nn.write_networks(path, [model.encoder_net, model.decoder_net], header)


def load_autoencoder(path: str | Path) -> TrainedAutoencoder:
    nets, header = nn.read_networks(path)
    if header.get("kind") != "autoencoder":
        raise ConfigError(f"{path}: not an autoencoder checkpoint")
    state = tabular.encoder_from_dict(header["encoder_state"])
    c = header["config"]
    cfg = AutoencoderConfig(
        dim_z=c["dim_z"],
        epochs=c["epochs"],
        batch_size=c["batch_size"],
        learning_rate=c["learning_rate"],
        loss=parse_loss(c["loss"]),
        seed=c["seed"],
    )
    weights = _resolve_weights(cfg.loss, state, None)
    return TrainedAutoencoder(nets[0], nets[1], state, weights, cfg, curves=None)


def curves_to_csv(curves: LearningCurves, path: str | Path, epochs_label: int | None = None) -> None:
    """Write (epochs, checkpoint, feature, error) rows; appends if the file exists."""
    import csv

    path = Path(path)
    new = not path.exists()
    total = epochs_label if epochs_label is not None else int(curves.checkpoints[-1])
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if new:
            writer.writerow(["epochs", "checkpoint", "feature", "error"])
        for row, ck in zip(curves.errors, curves.checkpoints):
            for name, err in zip(curves.feature_names, row):
                writer.writerow([total, int(ck), name, repr(float(err))])
