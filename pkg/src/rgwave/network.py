"""Binary heartbeat classifier with a trainable wavelet projection layer.

Architecture: coefficients c = Psi(eta)^+ f feed one fully connected hidden
layer with a rectifier, then a single sigmoid output.  The loss is binary
cross-entropy plus a projection penalty J = (alpha/s) * sum_i E2(f_i)/||f_i||^2
that keeps the learned wavelets close to the span of the inputs.  The
normalization constant of the mother is recomputed on every forward pass but
treated as a constant during backpropagation.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import optim
from .data import Dataset
from .varpro import (
    Divergence,
    build_feature_matrices,
    pseudoinverse,
    vp_jacobian_batch,
)
from .wavelets import LAMBDA_MIN, EtaVector, SampleGrid, WaveletMatrix, random_eta

MODEL_FORMAT_VERSION = 1
HISTORY_COLUMNS = (
    "epoch",
    "train_loss",
    "val_loss",
    "val_accuracy",
    "val_veb_se",
    "val_veb_pp",
)


class NonFiniteActivation(ArithmeticError):
    """An intermediate value became NaN or infinite during a forward pass."""


class DegenerateSignalWarning(UserWarning):
    """A zero-norm signal was skipped by the projection penalty."""


@dataclass
class NetworkConfig:
    """Hyperparameters; defaults match the reference heartbeat setup."""

    m: int = 10
    p: int = 3
    n: int = 4
    hidden_units: int = 15
    alpha: float = 0.1
    learning_rate: float = 1e-3
    epochs: int = 50
    batch_size: int = 32
    seed: int = 0
    lambda_min: float = LAMBDA_MIN
    init_scheme: str = "random"
    mother: str = "rgw"
    veb_weight: float = 1.0
    patience: int = 20

    def __post_init__(self):
        if min(self.m, self.n, self.hidden_units, self.epochs, self.batch_size) < 1:
            raise ValueError("m, n, hidden_units, epochs and batch_size must be >= 1")
        if self.p < 0:
            raise ValueError("p must be >= 0")
        # alpha = 0 and learning_rate = 0 are degenerate but well defined
        # (pure cross-entropy; no parameter movement), so only negatives are
        # rejected.
        if self.alpha < 0 or self.learning_rate < 0:
            raise ValueError("alpha and learning_rate must be nonnegative")
        if self.lambda_min < LAMBDA_MIN:
            raise ValueError(f"lambda_min must be at least {LAMBDA_MIN}")
        if self.init_scheme not in ("random", "spread"):
            raise ValueError(f"unknown init_scheme {self.init_scheme!r}")
        if self.mother not in ("rgw", "ricker"):
            raise ValueError(f"unknown mother {self.mother!r}")
        if self.veb_weight <= 0:
            raise ValueError("veb_weight must be positive")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkConfig":
        return cls(**data)


@dataclass
class HistoryRow:
    epoch: int
    train_loss: float
    val_loss: float
    val_accuracy: float
    val_veb_se: float
    val_veb_pp: float


@dataclass
class ModelState:
    config: NetworkConfig
    eta: EtaVector
    hidden_weights: np.ndarray
    hidden_bias: np.ndarray
    output_weights: np.ndarray
    output_bias: float
    signal_length: int
    history: list[HistoryRow] = field(default_factory=list)

    @property
    def grid(self) -> SampleGrid:
        return SampleGrid.signal(self.signal_length)


@dataclass
class ForwardCache:
    psi: WaveletMatrix
    pinv: np.ndarray
    coefficients: np.ndarray
    hidden_pre: np.ndarray
    hidden_post: np.ndarray
    logits: np.ndarray
    probabilities: np.ndarray


@dataclass
class Gradients:
    eta: np.ndarray
    hidden_weights: np.ndarray
    hidden_bias: np.ndarray
    output_weights: np.ndarray
    output_bias: float


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    exp_z = np.exp(z[~positive])
    out[~positive] = exp_z / (1.0 + exp_z)
    return out


def init_model(config: NetworkConfig, signal_length: int) -> ModelState:
    """Seeded parameter initialization.

    ``random`` draws scales log-uniformly on [0.1, 1.5], translations
    uniformly on [0, 2], zeros on [0.5, 2.5], pole reals on [-1, 1] and raw
    imaginaries on [0.5, 1.5].  ``spread`` places scales and translations on
    deterministic lattices instead, which is occasionally more robust for
    very small m.
    """
    rng = np.random.default_rng(config.seed)
    if config.init_scheme == "random":
        eta = random_eta(
            rng,
            config.m,
            config.p,
            config.n,
            scale_range=(0.1, 1.5),
            translation_range=(0.0, 2.0),
            zero_range=(0.5, 2.5),
            pole_real_range=(-1.0, 1.0),
            pole_imag_range=(0.5, 1.5),
            log_scales=True,
        )
    else:
        eta = EtaVector(
            scales=np.geomspace(0.15, 1.2, config.m),
            translations=np.linspace(0.1, 1.9, config.m),
            zeros=np.linspace(0.8, 2.0, config.p) if config.p else np.empty(0),
            pole_reals=np.linspace(-0.5, 0.5, config.n),
            pole_imags_raw=np.full(config.n, 1.0),
        )
    hidden_weights = rng.normal(0.0, math.sqrt(2.0 / config.m), size=(config.hidden_units, config.m))
    output_weights = rng.normal(0.0, math.sqrt(1.0 / config.hidden_units), size=config.hidden_units)
    return ModelState(
        config=config,
        eta=eta,
        hidden_weights=hidden_weights,
        hidden_bias=np.zeros(config.hidden_units),
        output_weights=output_weights,
        output_bias=0.0,
        signal_length=signal_length,
    )


def _forward_batch(
    model: ModelState, signals: np.ndarray, norm_constant: float | None = None
) -> ForwardCache:
    signals = np.asarray(signals, dtype=float)
    if signals.ndim != 2 or signals.shape[1] != model.signal_length:
        raise ValueError(
            f"expected batch of shape (s, {model.signal_length}), got {signals.shape}"
        )
    psi, _ = build_feature_matrices(
        model.eta, model.grid, model.config.mother, norm_constant=norm_constant,
        with_jacobian=False,
    )
    pinv = pseudoinverse(psi)
    coefficients = signals @ pinv.T
    hidden_pre = coefficients @ model.hidden_weights.T + model.hidden_bias
    hidden_post = np.maximum(hidden_pre, 0.0)
    logits = hidden_post @ model.output_weights + model.output_bias
    probabilities = _sigmoid(logits)
    for name, values in (
        ("coefficients", coefficients),
        ("hidden activations", hidden_pre),
        ("output probabilities", probabilities),
    ):
        if not np.all(np.isfinite(values)):
            raise NonFiniteActivation(f"non-finite {name} in forward pass")
    return ForwardCache(
        psi=psi,
        pinv=pinv,
        coefficients=coefficients,
        hidden_pre=hidden_pre,
        hidden_post=hidden_post,
        logits=logits,
        probabilities=probabilities,
    )


def forward(model: ModelState, f, norm_constant: float | None = None):
    """Probability of the positive (ectopic) class for one signal, plus cache."""
    cache = _forward_batch(model, np.asarray(f, dtype=float)[None, :], norm_constant)
    return float(cache.probabilities[0]), cache


def _bce_terms(logits: np.ndarray, labels: np.ndarray, veb_weight: float) -> np.ndarray:
    # softplus(z) - y z is the numerically stable form of the cross-entropy.
    weights = np.where(labels == 1, veb_weight, 1.0)
    return weights * (np.logaddexp(0.0, logits) - labels * logits)


def _projection_penalty(
    cache: ForwardCache, signals: np.ndarray, alpha: float
) -> tuple[float, np.ndarray]:
    """J value and per-sample weights alpha / (s * ||f_i||^2), zero where skipped."""
    s = signals.shape[0]
    norms2 = np.sum(signals * signals, axis=1)
    weights = np.zeros(s)
    usable = norms2 > 0.0
    if not np.all(usable):
        warnings.warn(
            f"{int(np.sum(~usable))} zero-norm signal(s) skipped by the projection penalty",
            DegenerateSignalWarning,
            stacklevel=3,
        )
    weights[usable] = alpha / (s * norms2[usable])
    residuals = signals - cache.coefficients @ cache.psi.values.T
    energies = np.sum(residuals * residuals, axis=1)
    return float(np.sum(weights * energies)), weights


def loss(model: ModelState, batch, norm_constant: float | None = None) -> float:
    """Mean weighted cross-entropy plus the projection penalty."""
    signals, labels = _batch_arrays(batch)
    cache = _forward_batch(model, signals, norm_constant)
    bce = float(np.mean(_bce_terms(cache.logits, labels, model.config.veb_weight)))
    penalty, _ = _projection_penalty(cache, signals, model.config.alpha)
    return bce + penalty


def _batch_arrays(batch) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(batch, Dataset):
        signals, labels = batch.signals(), batch.labels()
    else:
        signals, labels = batch
    signals = np.asarray(signals, dtype=float)
    labels = np.asarray(labels)
    if signals.ndim != 2 or labels.shape != (signals.shape[0],):
        raise ValueError("batch must pair (s, N) signals with (s,) labels")
    if not np.all(np.isin(labels, (0, 1))):
        raise ValueError("labels must be 0 or 1")
    return signals, labels.astype(float)


def backward(
    model: ModelState, batch, norm_constant: float | None = None
) -> tuple[Gradients, float]:
    """Analytic gradients of the total loss and its current value.

    The eta gradient flows through both the classifier path (via dc/deta)
    and the projection penalty (via dE2/deta); the normalization constant is
    frozen at its forward-pass value.
    """
    signals, labels = _batch_arrays(batch)
    s = signals.shape[0]
    cache = _forward_batch(model, signals, norm_constant)
    config = model.config

    bce = float(np.mean(_bce_terms(cache.logits, labels, config.veb_weight)))
    penalty, penalty_weights = _projection_penalty(cache, signals, config.alpha)

    sample_weights = np.where(labels == 1.0, config.veb_weight, 1.0)
    d_logits = sample_weights * (cache.probabilities - labels) / s
    d_output_weights = cache.hidden_post.T @ d_logits
    d_output_bias = float(np.sum(d_logits))
    d_hidden_post = d_logits[:, None] * model.output_weights[None, :]
    d_hidden_pre = d_hidden_post * (cache.hidden_pre > 0.0)
    d_hidden_weights = d_hidden_pre.T @ cache.coefficients
    d_hidden_bias = d_hidden_pre.sum(axis=0)
    d_coefficients = d_hidden_pre @ model.hidden_weights

    _, jac = build_feature_matrices(
        model.eta, model.grid, config.mother, norm_constant=norm_constant
    )
    dc_deta, d_energy = vp_jacobian_batch(cache.psi, jac, signals)
    d_eta = np.einsum("sm,smq->q", d_coefficients, dc_deta)
    d_eta += penalty_weights @ d_energy

    grads = Gradients(
        eta=d_eta,
        hidden_weights=d_hidden_weights,
        hidden_bias=d_hidden_bias,
        output_weights=d_output_weights,
        output_bias=d_output_bias,
    )
    return grads, bce + penalty


@dataclass(frozen=True)
class Metrics:
    """Confusion counts and rates with the ectopic class as positive.

    Rates with an empty denominator are reported as 0.0.
    """

    total_accuracy: float
    veb_se: float
    veb_pp: float
    normal_se: float
    normal_pp: float
    true_positive: int
    false_negative: int
    false_positive: int
    true_negative: int

    def as_dict(self) -> dict:
        return {
            "total_accuracy": self.total_accuracy,
            "veb_se": self.veb_se,
            "veb_pp": self.veb_pp,
            "normal_se": self.normal_se,
            "normal_pp": self.normal_pp,
            "true_positive": self.true_positive,
            "false_negative": self.false_negative,
            "false_positive": self.false_positive,
            "true_negative": self.true_negative,
        }


def _rate(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


def metrics_from_predictions(labels: np.ndarray, predicted: np.ndarray) -> Metrics:
    labels = np.asarray(labels).astype(int)
    predicted = np.asarray(predicted).astype(int)
    tp = int(np.sum((labels == 1) & (predicted == 1)))
    fn = int(np.sum((labels == 1) & (predicted == 0)))
    fp = int(np.sum((labels == 0) & (predicted == 1)))
    tn = int(np.sum((labels == 0) & (predicted == 0)))
    return Metrics(
        total_accuracy=_rate(tp + tn, tp + tn + fp + fn),
        veb_se=_rate(tp, tp + fn),
        veb_pp=_rate(tp, tp + fp),
        normal_se=_rate(tn, tn + fp),
        normal_pp=_rate(tn, tn + fn),
        true_positive=tp,
        false_negative=fn,
        false_positive=fp,
        true_negative=tn,
    )


def predict_probabilities(model: ModelState, signals) -> np.ndarray:
    cache = _forward_batch(model, np.asarray(signals, dtype=float))
    return cache.probabilities


def evaluate(model: ModelState, test_set) -> Metrics:
    """Threshold probabilities at 0.5 and tabulate the confusion counts."""
    signals, labels = _batch_arrays(test_set)
    if signals.shape[0] == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    probabilities = predict_probabilities(model, signals)
    return metrics_from_predictions(labels.astype(int), probabilities >= 0.5)


def _snapshot(model: ModelState) -> ModelState:
    return ModelState(
        config=model.config,
        eta=model.eta,
        hidden_weights=model.hidden_weights.copy(),
        hidden_bias=model.hidden_bias.copy(),
        output_weights=model.output_weights.copy(),
        output_bias=model.output_bias,
        signal_length=model.signal_length,
        history=list(model.history),
    )


def train(config: NetworkConfig, train_set, validation_set) -> ModelState:
    """Mini-batch Adam training with early stopping on validation accuracy.

    Args:
        config: hyperparameters; the seed fixes initialization and batching,
            so identical inputs reproduce the training history bit for bit.
        train_set: Dataset or (signals, labels) pair used for updates.
        validation_set: held-out Dataset or pair scored after every epoch.

    Returns:
        The model with the best validation accuracy seen (earliest epoch on
        ties), with the full epoch history attached.

    Raises:
        Divergence: when every batch loss in an epoch is non-finite.
    """
    train_signals, train_labels = _batch_arrays(train_set)
    val_signals, val_labels = _batch_arrays(validation_set)
    if train_signals.shape[0] == 0 or val_signals.shape[0] == 0:
        raise ValueError("training and validation sets must be non-empty")
    if train_signals.shape[1] != val_signals.shape[1]:
        raise ValueError("training and validation signal lengths differ")

    model = init_model(config, train_signals.shape[1])
    rng = np.random.default_rng(config.seed + 1)  # batching stream, separate from init
    states = {
        name: optim.AdamState(learning_rate=config.learning_rate)
        for name in ("eta", "hidden_w", "hidden_b", "output_w", "output_b")
    }

    best: ModelState | None = None
    best_accuracy = -math.inf
    stale_epochs = 0

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(train_signals.shape[0])
        seen = 0
        loss_sum = 0.0
        finite_batches = 0
        total_batches = 0
        for start in range(0, order.size, config.batch_size):
            idx = order[start : start + config.batch_size]
            total_batches += 1
            try:
                grads, batch_loss = backward(
                    model, (train_signals[idx], train_labels[idx])
                )
            except NonFiniteActivation:
                continue
            if not math.isfinite(batch_loss):
                continue
            finite_batches += 1
            loss_sum += batch_loss * idx.size
            seen += idx.size

            new_flat = states["eta"].step(model.eta.to_flat(), grads.eta)
            scales = np.maximum(new_flat[0 : 2 * config.m : 2], config.lambda_min)
            new_flat[0 : 2 * config.m : 2] = scales
            model.eta = EtaVector.from_flat(new_flat, config.m, config.p, config.n)
            model.hidden_weights = states["hidden_w"].step(
                model.hidden_weights, grads.hidden_weights
            )
            model.hidden_bias = states["hidden_b"].step(
                model.hidden_bias, grads.hidden_bias
            )
            model.output_weights = states["output_w"].step(
                model.output_weights, grads.output_weights
            )
            model.output_bias = float(
                states["output_b"].step(
                    np.asarray([model.output_bias]), np.asarray([grads.output_bias])
                )[0]
            )
        if finite_batches == 0:
            raise Divergence(f"all {total_batches} batch losses were non-finite in epoch {epoch}")

        val_loss = loss(model, (val_signals, val_labels))
        val_probabilities = predict_probabilities(model, val_signals)
        val_metrics = metrics_from_predictions(
            val_labels.astype(int), val_probabilities >= 0.5
        )
        row = HistoryRow(
            epoch=epoch,
            train_loss=loss_sum / seen,
            val_loss=val_loss,
            val_accuracy=val_metrics.total_accuracy,
            val_veb_se=val_metrics.veb_se,
            val_veb_pp=val_metrics.veb_pp,
        )
        model.history.append(row)

        if val_metrics.total_accuracy > best_accuracy:
            best_accuracy = val_metrics.total_accuracy
            best = _snapshot(model)
            stale_epochs = 0
        else:
            stale_epochs += 1
            if stale_epochs >= config.patience:
                break

    assert best is not None
    best.history = list(model.history)
    return best


# --- Persistence -----------------------------------------------------------


def save_model(model: ModelState, path) -> None:
    """Versioned JSON snapshot; floats use the shortest lossless repr."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "config": model.config.to_dict(),
        "signal_length": model.signal_length,
        "eta": {
            "scales": model.eta.scales.tolist(),
            "translations": model.eta.translations.tolist(),
            "zeros": model.eta.zeros.tolist(),
            "pole_reals": model.eta.pole_reals.tolist(),
            "pole_imags_raw": model.eta.pole_imags_raw.tolist(),
        },
        "hidden_weights": model.hidden_weights.tolist(),
        "hidden_bias": model.hidden_bias.tolist(),
        "output_weights": model.output_weights.tolist(),
        "output_bias": model.output_bias,
    }
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_model(path) -> ModelState:
    with open(path) as handle:
        payload = json.load(handle)
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    eta = EtaVector(
        scales=payload["eta"]["scales"],
        translations=payload["eta"]["translations"],
        zeros=payload["eta"]["zeros"],
        pole_reals=payload["eta"]["pole_reals"],
        pole_imags_raw=payload["eta"]["pole_imags_raw"],
    )
    return ModelState(
        config=NetworkConfig.from_dict(payload["config"]),
        eta=eta,
        hidden_weights=np.asarray(payload["hidden_weights"], dtype=float),
        hidden_bias=np.asarray(payload["hidden_bias"], dtype=float),
        output_weights=np.asarray(payload["output_weights"], dtype=float),
        output_bias=float(payload["output_bias"]),
        signal_length=int(payload["signal_length"]),
    )


def save_history(history: list[HistoryRow], path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(HISTORY_COLUMNS)
        for row in history:
            writer.writerow(
                [
                    row.epoch,
                    repr(row.train_loss),
                    repr(row.val_loss),
                    repr(row.val_accuracy),
                    repr(row.val_veb_se),
                    repr(row.val_veb_pp),
                ]
            )


def load_history(path) -> list[HistoryRow]:
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if tuple(header) != HISTORY_COLUMNS:
            raise ValueError(f"unexpected history header {header!r}")
        for row in reader:
            rows.append(
                HistoryRow(
                    epoch=int(row[0]),
                    train_loss=float(row[1]),
                    val_loss=float(row[2]),
                    val_accuracy=float(row[3]),
                    val_veb_se=float(row[4]),
                    val_veb_pp=float(row[5]),
                )
            )
    return rows
