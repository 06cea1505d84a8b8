"""Matplotlib renderings saved next to the delimited outputs.

Every helper takes already-computed arrays, writes one PNG, and closes the
figure so batch runs never accumulate state.  The Agg backend keeps this
import-safe on headless machines.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)


def save_wavelet_figure(t, values, path, label: str = "mother wavelet") -> str:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(t, values, lw=1.2)
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.set_xlabel("t")
    ax.set_ylabel("amplitude")
    ax.set_title(label)
    return _finish(fig, path)


def save_reconstruction_figure(t, signal, reconstruction, path, relative_error: float) -> str:
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    top.plot(t, signal, lw=1.0, label="signal")
    top.plot(t, reconstruction, lw=1.0, ls="--", label="reconstruction")
    top.legend(loc="upper right")
    top.set_ylabel("amplitude")
    top.set_title(f"relative L2 error {relative_error:.3e}")
    bottom.plot(t, np.asarray(signal) - np.asarray(reconstruction), lw=0.8, color="crimson")
    bottom.set_xlabel("t")
    bottom.set_ylabel("residual")
    return _finish(fig, path)


def save_scalogram_figure(scales, translations, magnitudes, path) -> str:
    fig, ax = plt.subplots(figsize=(7, 4))
    mesh = ax.pcolormesh(
        np.asarray(translations), np.asarray(scales), np.asarray(magnitudes), shading="nearest"
    )
    fig.colorbar(mesh, ax=ax, label="|coefficient|")
    ax.set_xlabel("translation")
    ax.set_ylabel("scale")
    ax.set_title("scalogram")
    return _finish(fig, path)


def save_gradcheck_figure(block_errors: dict[str, float], tolerance: float, path) -> str:
    names = list(block_errors)
    values = [max(block_errors[name], 1e-300) for name in names]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar(names, values, color="steelblue")
    ax.axhline(tolerance, color="crimson", ls="--", label=f"tolerance {tolerance:g}")
    ax.set_yscale("log")
    ax.set_ylabel("max relative error")
    ax.legend(loc="upper right")
    return _finish(fig, path)


def save_boundcheck_figure(observed, rhs, path) -> str:
    observed = np.asarray(observed, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    fig, ax = plt.subplots(figsize=(7, 3.5))
    k = np.arange(1, observed.size + 1)
    ax.semilogy(k, observed, "o", label="observed")
    ax.semilogy(k, rhs, "s--", label="bound")
    ax.set_xlabel("coefficient")
    ax.set_ylabel("error")
    ax.legend(loc="upper right")
    return _finish(fig, path)


def save_training_figure(history, path) -> str:
    epochs = [row.epoch for row in history]
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.5))
    left.plot(epochs, [row.train_loss for row in history], label="train")
    left.plot(epochs, [row.val_loss for row in history], label="validation")
    left.set_xlabel("epoch")
    left.set_ylabel("loss")
    left.legend(loc="upper right")
    right.plot(epochs, [row.val_accuracy for row in history], label="accuracy")
    right.plot(epochs, [row.val_veb_se for row in history], label="ectopic sensitivity")
    right.set_xlabel("epoch")
    right.set_ylim(-0.02, 1.02)
    right.legend(loc="lower right")
    return _finish(fig, path)


def save_evaluation_figure(metrics, path) -> str:
    counts = np.array(
        [
            [metrics.true_negative, metrics.false_positive],
            [metrics.false_negative, metrics.true_positive],
        ]
    )
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.5))
    left.imshow(counts, cmap="Blues")
    for (i, j), value in np.ndenumerate(counts):
        left.text(j, i, str(value), ha="center", va="center")
    left.set_xticks([0, 1], ["pred normal", "pred ectopic"])
    left.set_yticks([0, 1], ["true normal", "true ectopic"])
    rates = {
        "accuracy": metrics.total_accuracy,
        "ectopic Se": metrics.veb_se,
        "ectopic +P": metrics.veb_pp,
        "normal Se": metrics.normal_se,
        "normal +P": metrics.normal_pp,
    }
    right.bar(list(rates), list(rates.values()), color="seagreen")
    right.set_ylim(0, 1.05)
    right.tick_params(axis="x", rotation=30)
    return _finish(fig, path)
