"""Sampled-signal data model, SNR math, and transient extraction.

A :class:`Signal` is a real-valued burst capture. The energy trigger in
:func:`extract_transient` emulates an oscilloscope that idles below an
energy threshold and starts capturing once a sliding window reaches it.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import InputTooShort, NoTrigger, ZeroPowerSignal

RFSG_MAGIC = b"RFSG"
RFSG_VERSION = 1

MANIFEST_HEADER = ["path", "device_id", "class", "snr_db"]


class SignalClass(Enum):
    RECOGNIZED = "recognized"
    UAV = "uav"


@dataclass(frozen=True)
class Signal:
    """Immutable real-valued RF burst with provenance metadata.

    ``snr_db`` is the nominal SNR the trace was degraded to; ``None`` marks
    a clean (noiseless) reference. ``padded`` flags a capture whose tail was
    zero-filled by the trigger extractor.
    """

    samples: np.ndarray
    sample_rate: float
    device_id: str = ""
    signal_class: SignalClass = SignalClass.RECOGNIZED
    snr_db: float | None = None
    padded: bool = False

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if not (self.sample_rate > 0):
            raise ValueError("sample_rate must be > 0")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class TriggerConfig:
    """Sliding-window energy trigger parameters (step is always 1 sample)."""

    window_len: int = 64
    energy_threshold: float = 0.05
    capture_len: int = 4096

    def __post_init__(self) -> None:
        if self.window_len <= 0 or self.capture_len <= 0:
            raise ValueError("window_len and capture_len must be > 0")
        if self.energy_threshold < 0:
            raise ValueError("energy_threshold must be >= 0")
        if self.window_len > self.capture_len:
            raise ValueError("window_len must not exceed capture_len")


def mean_power(signal: Signal) -> float:
    """Mean-square power (1/N) * sum(x^2)."""
    x = signal.samples
    return float(np.mean(x * x))


def add_awgn(signal: Signal, target_snr_db: float, seed: int) -> Signal:
    """Add zero-mean Gaussian noise so the trace reaches ``target_snr_db``.

    Noise variance is mean_power(signal) / 10^(snr/10). A target of +inf is
    the documented no-noise sentinel and returns the input unchanged.
    Bit-identical output for a fixed (signal, target, seed).
    """
    if math.isinf(target_snr_db) and target_snr_db > 0:
        return signal
    power = mean_power(signal)
    if power == 0.0:
        raise ZeroPowerSignal("cannot set an SNR on an all-zero signal")
    noise_var = power / 10.0 ** (target_snr_db / 10.0)
    rng = np.random.default_rng(seed)
    noisy = signal.samples + rng.normal(0.0, math.sqrt(noise_var), signal.samples.size)
    return replace(signal, samples=noisy, snr_db=float(target_snr_db))


def _window_energies(x: np.ndarray, window_len: int) -> np.ndarray:
    """Mean-square energy of every length-``window_len`` window, step 1."""
    csum = np.concatenate(([0.0], np.cumsum(x * x)))
    return (csum[window_len:] - csum[:-window_len]) / window_len


def find_trigger(signal: Signal, cfg: TriggerConfig) -> int:
    """First index whose window energy reaches the threshold."""
    x = signal.samples
    if x.size < cfg.window_len:
        raise InputTooShort(f"need at least {cfg.window_len} samples, got {x.size}")
    energies = _window_energies(x, cfg.window_len)
    hits = np.flatnonzero(energies >= cfg.energy_threshold)
    if hits.size == 0:
        raise NoTrigger("no window reached the energy threshold")
    return int(hits[0])


def extract_transient(signal: Signal, cfg: TriggerConfig) -> Signal:
    """Capture ``capture_len`` samples from the first triggering window.

    If the trace ends before the capture is full, the tail is zero-padded and
    the result is flagged ``padded`` so fixed-length inputs reach the wavelet
    stage regardless.
    """
    x = signal.samples
    if x.size < cfg.capture_len:
        raise InputTooShort(
            f"need at least capture_len={cfg.capture_len} samples, got {x.size}"
        )
    start = find_trigger(signal, cfg)
    chunk = x[start : start + cfg.capture_len]
    padded = chunk.size < cfg.capture_len
    if padded:
        chunk = np.concatenate([chunk, np.zeros(cfg.capture_len - chunk.size)])
    return replace(signal, samples=chunk, padded=padded)


# ---------------------------------------------------------------------------
# On-disk formats: RFSG binary traces and the corpus manifest CSV.
# ---------------------------------------------------------------------------

_HEADER_STRUCT = struct.Struct("<4sHdI")  # magic, version, sample_rate, count


def save_signal(signal: Signal, path: str | Path) -> None:
    """Write the RFSG binary format (float32 samples, little-endian)."""
    samples = signal.samples.astype("<f4")
    with open(path, "wb") as fh:
        fh.write(
            _HEADER_STRUCT.pack(RFSG_MAGIC, RFSG_VERSION, signal.sample_rate, samples.size)
        )
        fh.write(samples.tobytes())


def load_signal(
    path: str | Path,
    device_id: str = "",
    signal_class: SignalClass = SignalClass.RECOGNIZED,
    snr_db: float | None = None,
) -> Signal:
    """Read an RFSG file; metadata comes from the manifest, not the file."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER_STRUCT.size)
        if len(header) < _HEADER_STRUCT.size:
            raise ValueError(f"{path}: truncated RFSG header")
        magic, version, sample_rate, count = _HEADER_STRUCT.unpack(header)
        if magic != RFSG_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != RFSG_VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        raw = fh.read(4 * count)
    if len(raw) < 4 * count:
        raise ValueError(f"{path}: expected {count} samples, file truncated")
    samples = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    return Signal(
        samples=samples,
        sample_rate=sample_rate,
        device_id=device_id,
        signal_class=signal_class,
        snr_db=snr_db,
    )


@dataclass(frozen=True)
class ManifestRow:
    path: str
    device_id: str
    signal_class: SignalClass
    snr_db: float | None


def _fmt_snr(snr_db: float | None) -> str:
    return "" if snr_db is None else repr(float(snr_db))


def write_manifest(rows: list[ManifestRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for row in rows:
            writer.writerow(
                [row.path, row.device_id, row.signal_class.value, _fmt_snr(row.snr_db)]
            )


def read_manifest(path: str | Path) -> list[ManifestRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != MANIFEST_HEADER:
            raise ValueError(f"{path}: unexpected manifest header {header}")
        for rec in reader:
            path_col, device_id, cls, snr = rec
            rows.append(
                ManifestRow(
                    path=path_col,
                    device_id=device_id,
                    signal_class=SignalClass(cls),
                    snr_db=None if snr == "" else float(snr),
                )
            )
    return rows
