"""Heartbeat dataset handling: CSV I/O, synthetic beats, normalization.

File schema: one beat per row, ``label`` (0 = normal, 1 = ventricular
ectopic) followed by exactly 300 comma-separated samples, no header.  Real
recordings must be exported to this schema by an external extraction script;
nothing here reads raw waveform databases.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .wavelets import SampleGrid

SAMPLES_PER_RECORD = 300
# Samples are interpreted on this interval, matching the signal grid used by
# the wavelet layers.
RECORD_START = 0.0
RECORD_STOP = 2.0
# Window inspected for atrial (P-bump) activity when separating the classes.
P_WINDOW = (0.38, 0.62)

LABEL_NORMAL = 0
LABEL_VEB = 1
CLASS_NAMES = {"normal": LABEL_NORMAL, "veb": LABEL_VEB}


class ParseError(ValueError):
    """Malformed dataset row; carries 1-based line and column positions."""

    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{message} ({where})")
        self.line = line
        self.column = column


class EmptyDataset(ValueError):
    """File parsed cleanly but contained no records."""


@dataclass(frozen=True, eq=False)
class HeartbeatRecord:
    """One fixed-length beat with its binary label."""

    samples: np.ndarray
    label: int
    source_id: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float).reshape(-1).copy()
        if samples.size != SAMPLES_PER_RECORD:
            raise ValueError(
                f"expected {SAMPLES_PER_RECORD} samples, got {samples.size}"
            )
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must all be finite")
        if self.label not in (LABEL_NORMAL, LABEL_VEB):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "label", int(self.label))


@dataclass(eq=False)
class Dataset:
    records: list[HeartbeatRecord] = field(default_factory=list)
    split_tag: str = "train"

    def __post_init__(self):
        if self.split_tag not in ("train", "test"):
            raise ValueError("split_tag must be 'train' or 'test'")

    def __len__(self) -> int:
        return len(self.records)

    def signals(self) -> np.ndarray:
        return np.array([r.samples for r in self.records])

    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.records], dtype=int)

    def subset(self, indices, split_tag: str | None = None) -> "Dataset":
        return Dataset(
            [self.records[i] for i in indices],
            self.split_tag if split_tag is None else split_tag,
        )


def load_heartbeats(path, format: str = "csv", split_tag: str = "train") -> Dataset:
    """Parse a heartbeat CSV; malformed rows fail loudly with positions."""
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    records: list[HeartbeatRecord] = []
    with open(path, newline="") as handle:
        for lineno, row in enumerate(csv.reader(handle), start=1):
            if not row:
                continue
            if len(row) != 1 + SAMPLES_PER_RECORD:
                raise ParseError(
                    f"expected {1 + SAMPLES_PER_RECORD} fields, got {len(row)}", lineno
                )
            try:
                label = int(row[0])
            except ValueError:
                raise ParseError(f"bad label {row[0]!r}", lineno, column=1) from None
            if label not in (LABEL_NORMAL, LABEL_VEB):
                raise ParseError(f"label must be 0 or 1, got {label}", lineno, column=1)
            samples = np.empty(SAMPLES_PER_RECORD)
            for j, cell in enumerate(row[1:]):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(
                        f"bad sample {cell!r}", lineno, column=j + 2
                    ) from None
                if not np.isfinite(value):
                    raise ParseError("non-finite sample", lineno, column=j + 2)
                samples[j] = value
            records.append(
                HeartbeatRecord(samples, label, source_id=f"{path}:{lineno}")
            )
    if not records:
        raise EmptyDataset(f"no records in {path}")
    return Dataset(records, split_tag)


def save_heartbeats(dataset: Dataset, path) -> None:
    """Write the round-trippable CSV form (shortest lossless float repr)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        for record in dataset.records:
            writer.writerow([record.label] + [repr(float(x)) for x in record.samples])


# --- Synthetic beats -------------------------------------------------------
#
# Morphology constants (Gaussian bump amplitude, center, width on [0, 2]):
#
#   component   normal                 ventricular ectopic
#   P bump      0.20 @ 0.50, w 0.060   absent
#   Q dip      -0.12 @ 0.90, w 0.030  -0.05 @ 0.82, w 0.060
#   R peak      1.00 @ 1.00, w 0.040   0.85 @ 1.00, w 0.100  (>= 2x wider)
#   S dip      -0.18 @ 1.10, w 0.035  -0.50 @ 1.22, w 0.090
#   T bump      0.35 @ 1.50, w 0.120  -0.30 @ 1.55, w 0.140  (discordant)
#
# Every record jitters centers by +-CENTER_JITTER and scales amplitudes and
# widths by uniform factors in [1 - RELATIVE_JITTER, 1 + RELATIVE_JITTER].
# Noise is white Gaussian with standard deviation noise_level * peak.

_NORMAL_BUMPS = (
    (0.20, 0.50, 0.060),
    (-0.12, 0.90, 0.030),
    (1.00, 1.00, 0.040),
    (-0.18, 1.10, 0.035),
    (0.35, 1.50, 0.120),
)
_VEB_BUMPS = (
    (0.0, 0.50, 0.060),
    (-0.05, 0.82, 0.060),
    (0.85, 1.00, 0.100),
    (-0.50, 1.22, 0.090),
    (-0.30, 1.55, 0.140),
)
CENTER_JITTER = 0.02
RELATIVE_JITTER = 0.1


def record_grid() -> SampleGrid:
    return SampleGrid.signal(SAMPLES_PER_RECORD, RECORD_START, RECORD_STOP)


def synthesize_heartbeat(seed: int, klass: str, noise_level: float = 0.05) -> HeartbeatRecord:
    """Deterministic synthetic beat; identical seed and class give identical samples."""
    if klass not in CLASS_NAMES:
        raise ValueError(f"class must be one of {sorted(CLASS_NAMES)}, got {klass!r}")
    if noise_level < 0:
        raise ValueError("noise_level must be nonnegative")
    rng = np.random.default_rng(seed)
    bumps = _NORMAL_BUMPS if klass == "normal" else _VEB_BUMPS
    t = record_grid().points
    clean = np.zeros(SAMPLES_PER_RECORD)
    for amp, center, width in bumps:
        # Draw jitters even for absent bumps so both classes consume the same
        # amount of randomness per record.
        amp_factor = rng.uniform(1.0 - RELATIVE_JITTER, 1.0 + RELATIVE_JITTER)
        center_shift = rng.uniform(-CENTER_JITTER, CENTER_JITTER)
        width_factor = rng.uniform(1.0 - RELATIVE_JITTER, 1.0 + RELATIVE_JITTER)
        if amp == 0.0:
            continue
        a = amp * amp_factor
        c = center + center_shift
        w = width * width_factor
        clean += a * np.exp(-0.5 * ((t - c) / w) ** 2)
    peak = float(np.max(np.abs(clean)))
    noise = rng.standard_normal(SAMPLES_PER_RECORD) * (noise_level * peak)
    return HeartbeatRecord(
        clean + noise, CLASS_NAMES[klass], source_id=f"synthetic-{klass}-{seed}"
    )


def synthesize_dataset(
    seed: int,
    size: int,
    veb_fraction: float = 0.2,
    noise_level: float = 0.05,
    split_tag: str = "train",
) -> Dataset:
    """Deterministic synthetic dataset with the requested class mix."""
    if size < 1:
        raise ValueError("size must be positive")
    if not 0.0 <= veb_fraction <= 1.0:
        raise ValueError("veb_fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    n_veb = round(size * veb_fraction)
    labels = np.array([LABEL_VEB] * n_veb + [LABEL_NORMAL] * (size - n_veb))
    rng.shuffle(labels)
    record_seeds = np.random.SeedSequence(seed).generate_state(size)
    records = [
        synthesize_heartbeat(
            int(record_seeds[i]),
            "veb" if labels[i] == LABEL_VEB else "normal",
            noise_level,
        )
        for i in range(size)
    ]
    return Dataset(records, split_tag)


def p_window_energy_fraction(samples) -> float:
    """Share of signal energy inside the atrial window; separates the classes."""
    samples = np.asarray(samples, dtype=float)
    t = record_grid().points
    window = (t >= P_WINDOW[0]) & (t <= P_WINDOW[1])
    total = float(np.sum(samples * samples))
    if total == 0.0:
        return 0.0
    return float(np.sum(samples[window] ** 2)) / total


def normalize(dataset: Dataset, scheme: str = "zscore") -> Dataset:
    """Per-record normalization; constant records pass through with a warning."""
    if scheme == "none":
        return Dataset(list(dataset.records), dataset.split_tag)
    if scheme != "zscore":
        raise ValueError(f"unknown normalization scheme {scheme!r}")
    normalized = []
    for record in dataset.records:
        std = float(np.std(record.samples))
        if std == 0.0:
            warnings.warn(
                f"record {record.source_id or '<unnamed>'} is constant; left unchanged",
                UserWarning,
                stacklevel=2,
            )
            normalized.append(record)
            continue
        samples = (record.samples - float(np.mean(record.samples))) / std
        normalized.append(HeartbeatRecord(samples, record.label, record.source_id))
    return Dataset(normalized, dataset.split_tag)


def split_dataset(
    dataset: Dataset, validation_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Seeded shuffle split into (train, validation) parts."""
    if not 0.0 < validation_fraction < 1.0:
        raise ValueError("validation_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(dataset))
    n_val = max(1, round(len(dataset) * validation_fraction))
    if n_val >= len(dataset):
        raise ValueError("validation split would consume the whole dataset")
    val_idx = order[:n_val]
    train_idx = order[n_val:]
    return dataset.subset(train_idx), dataset.subset(val_idx)
