"""Synthetic burst corpus generation and split protocol.

Stands in for a hardware capture chain: each device profile emits seeded
bursts with a quiet lead-in, a transient amplitude ramp, and a steady-state
modulated carrier, then gets degraded to the configured SNR. Class
separability comes from where each kind parks its energy in normalized
frequency (and how sharp its transient is), which is exactly what the
wavelet-packet variances measure:

* Bluetooth-like: narrowband slow-hopping tone, low band.
* WiFi-like: wideband multi-tone burst, mid band.
* UAV-controller-like: fast-hopping tone, high band, sharp ramp.

Generation is purely seed-driven: every random draw derives from
(master_seed, device_seed, index), so corpora regenerate bit-identically
and noise can be re-applied to clean bursts at any SNR later.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, EmptyEval
from .seeding import derive_seed
from .signals import Signal, SignalClass, add_awgn

DEFAULT_SAMPLE_RATE = 100e6
BASE_AMPLITUDE = 3.0
AMPLITUDE_JITTER = 0.10
WIFI_TONES = 8

# Fraction of signals_per_device that goes to training for recognized
# devices (200 of 300 at the default corpus size).
TRAIN_FRACTION = 2.0 / 3.0


class DeviceKind(Enum):
    BLUETOOTH_LIKE = "bluetooth"
    WIFI_LIKE = "wifi"
    UAV_CONTROLLER_LIKE = "uav_controller"


@dataclass(frozen=True)
class DeviceProfile:
    """Spectral/temporal surrogate for one emitting device."""

    name: str
    kind: DeviceKind
    carrier_frac: float
    bandwidth_frac: float
    hop_period: int | None
    envelope_rise: int
    modulation_index: float
    device_seed: int

    def __post_init__(self) -> None:
        if not (0.0 < self.carrier_frac < 0.5):
            raise ConfigError(f"{self.name}: carrier_frac must be in (0, 0.5)")
        if not (0.0 < self.bandwidth_frac < 0.5):
            raise ConfigError(f"{self.name}: bandwidth_frac must be in (0, 0.5)")
        if self.carrier_frac + self.bandwidth_frac / 2 >= 0.5:
            raise ConfigError(f"{self.name}: band extends past Nyquist")
        if self.hop_period is not None and self.hop_period <= 0:
            raise ConfigError(f"{self.name}: hop_period must be > 0 or None")
        if self.envelope_rise <= 0:
            raise ConfigError(f"{self.name}: envelope_rise must be > 0")
        if self.modulation_index <= 0:
            raise ConfigError(f"{self.name}: modulation_index must be > 0")

    @property
    def signal_class(self) -> SignalClass:
        if self.kind is DeviceKind.UAV_CONTROLLER_LIKE:
            return SignalClass.UAV
        return SignalClass.RECOGNIZED

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "carrier_frac": self.carrier_frac,
            "bandwidth_frac": self.bandwidth_frac,
            "hop_period": self.hop_period,
            "envelope_rise": self.envelope_rise,
            "modulation_index": self.modulation_index,
            "device_seed": self.device_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeviceProfile":
        return cls(
            name=d["name"],
            kind=DeviceKind(d["kind"]),
            carrier_frac=d["carrier_frac"],
            bandwidth_frac=d["bandwidth_frac"],
            hop_period=d["hop_period"],
            envelope_rise=d["envelope_rise"],
            modulation_index=d["modulation_index"],
            device_seed=d["device_seed"],
        )


@dataclass(frozen=True)
class CorpusConfig:
    profiles: tuple[DeviceProfile, ...]
    signals_per_device: int = 300
    snr_db: float = 30.0
    capture_len: int = 4096
    master_seed: int = 0
    lead_len: int = 0  # 0 means the capture_len // 8 default

    def __post_init__(self) -> None:
        object.__setattr__(self, "profiles", tuple(self.profiles))
        if self.signals_per_device <= 0:
            raise ConfigError("signals_per_device must be > 0")
        if self.capture_len <= 0:
            raise ConfigError("capture_len must be > 0")
        if self.lead_len < 0:
            raise ConfigError("lead_len must be >= 0")
        if self.lead_len == 0:
            object.__setattr__(self, "lead_len", max(1, self.capture_len // 8))

    @property
    def burst_len(self) -> int:
        # margin past capture_len keeps a full capture after the trigger
        return self.capture_len + max(1, self.capture_len // 8)

    @property
    def train_per_device(self) -> int:
        return round(self.signals_per_device * TRAIN_FRACTION)

    def to_dict(self) -> dict:
        return {
            "profiles": [p.to_dict() for p in self.profiles],
            "signals_per_device": self.signals_per_device,
            "snr_db": None if math.isinf(self.snr_db) else self.snr_db,
            "capture_len": self.capture_len,
            "master_seed": self.master_seed,
            "lead_len": self.lead_len,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CorpusConfig":
        snr = d["snr_db"]
        return cls(
            profiles=tuple(DeviceProfile.from_dict(p) for p in d["profiles"]),
            signals_per_device=d["signals_per_device"],
            snr_db=math.inf if snr is None else snr,
            capture_len=d["capture_len"],
            master_seed=d["master_seed"],
            lead_len=d["lead_len"],
        )


def default_profiles(capture_len: int = 4096) -> tuple[DeviceProfile, ...]:
    """Default device catalog: 2 Bluetooth + 2 WiFi + 6 UAV controllers.

    Ramp and hop lengths scale with capture_len so miniature corpora used in
    tests keep the same waveform shape.
    """

    def frac(denominator: int) -> int:
        return max(1, capture_len // denominator)

    bt = [
        DeviceProfile("bt_phone", DeviceKind.BLUETOOTH_LIKE, 0.070, 0.030,
                      hop_period=frac(8), envelope_rise=frac(11),
                      modulation_index=0.8, device_seed=101),
        DeviceProfile("bt_watch", DeviceKind.BLUETOOTH_LIKE, 0.110, 0.040,
                      hop_period=frac(10), envelope_rise=frac(12),
                      modulation_index=0.6, device_seed=102),
    ]
    wifi = [
        DeviceProfile("wifi_router_a", DeviceKind.WIFI_LIKE, 0.185, 0.100,
                      hop_period=None, envelope_rise=frac(9),
                      modulation_index=0.7, device_seed=201),
        DeviceProfile("wifi_router_b", DeviceKind.WIFI_LIKE, 0.215, 0.120,
                      hop_period=None, envelope_rise=frac(10),
                      modulation_index=0.9, device_seed=202),
    ]
    uav_carriers = (0.340, 0.360, 0.385, 0.410, 0.430, 0.445)
    uav = [
        DeviceProfile(f"uav_ctrl_{chr(ord('a') + i)}", DeviceKind.UAV_CONTROLLER_LIKE,
                      carrier, 0.060 if i % 2 == 0 else 0.080,
                      hop_period=frac(32) if i < 3 else frac(16),
                      envelope_rise=frac(64) if i % 2 == 0 else frac(32),
                      modulation_index=1.0 + 0.2 * i, device_seed=301 + i)
        for i, carrier in enumerate(uav_carriers)
    ]
    return tuple(bt + wifi + uav)


def _hopped_waveform(profile: DeviceProfile, n: int, rng: np.random.Generator) -> np.ndarray:
    """Frequency-hopped tone with a small in-hop FM wobble."""
    half_bw = profile.bandwidth_frac / 2.0
    fm_dev = 0.25 * half_bw * min(1.0, profile.modulation_index)
    hop_span = half_bw - fm_dev
    hop_period = profile.hop_period or n
    n_hops = n // hop_period + 2
    offsets = rng.uniform(-hop_span, hop_span, n_hops)
    start = int(rng.integers(0, hop_period))  # jittered hop phase
    idx = (np.arange(n) + start) // hop_period
    freq = profile.carrier_frac + offsets[idx]
    wobble_rate = 1.0 / max(8, hop_period // 4)
    wobble_phase = rng.uniform(0.0, 2.0 * np.pi)
    freq = freq + fm_dev * np.sin(2.0 * np.pi * wobble_rate * np.arange(n) + wobble_phase)
    phase0 = rng.uniform(0.0, 2.0 * np.pi)
    return np.sin(2.0 * np.pi * np.cumsum(freq) + phase0)


def _multitone_waveform(profile: DeviceProfile, n: int, rng: np.random.Generator) -> np.ndarray:
    """Wideband burst: several tones across the band with random weights."""
    half_bw = profile.bandwidth_frac / 2.0
    freqs = profile.carrier_frac + np.linspace(-half_bw, half_bw, WIFI_TONES)
    phases = rng.uniform(0.0, 2.0 * np.pi, WIFI_TONES)
    weights = 1.0 + 0.5 * profile.modulation_index * rng.uniform(-1.0, 1.0, WIFI_TONES)
    weights = np.maximum(weights, 0.1)
    t = np.arange(n)
    w = np.zeros(n)
    for f, ph, a in zip(freqs, phases, weights):
        w += a * np.sin(2.0 * np.pi * f * t + ph)
    return w


def gen_burst(profile: DeviceProfile, index: int, cfg: CorpusConfig) -> Signal:
    """One deterministic burst: quiet lead-in, ramp, steady carrier, AWGN.

    Draw order inside the generator is fixed, so outputs are bit-identical
    for the same (master_seed, device_seed, index) regardless of batch size
    or worker count.
    """
    rng = np.random.default_rng(
        derive_seed(cfg.master_seed, profile.device_seed, index, "burst")
    )
    n = cfg.burst_len
    amplitude = BASE_AMPLITUDE * (1.0 + AMPLITUDE_JITTER * rng.uniform(-1.0, 1.0))
    if profile.hop_period is not None:
        w = _hopped_waveform(profile, n, rng)
    else:
        w = _multitone_waveform(profile, n, rng)
    w = w / np.sqrt(np.mean(w * w))

    rise = min(profile.envelope_rise, n)
    envelope = np.ones(n)
    envelope[:rise] = np.arange(1, rise + 1) / rise
    trace = np.concatenate([np.zeros(cfg.lead_len), amplitude * envelope * w])

    clean = Signal(
        samples=trace,
        sample_rate=DEFAULT_SAMPLE_RATE,
        device_id=profile.name,
        signal_class=profile.signal_class,
        snr_db=None,
    )
    if math.isinf(cfg.snr_db):
        return clean
    return add_awgn(clean, cfg.snr_db, noise_seed(cfg, profile, index))


def noise_seed(cfg: CorpusConfig, profile: DeviceProfile, index: int) -> int:
    """Per-signal AWGN seed.

    Deliberately independent of the SNR value: re-noising a clean burst at
    the corpus SNR reproduces the stored corpus trace bit for bit.
    """
    return derive_seed(cfg.master_seed, profile.device_seed, index, "noise")


def _check_class_mix(cfg: CorpusConfig) -> None:
    recognized = sum(1 for p in cfg.profiles if p.signal_class is SignalClass.RECOGNIZED)
    uav = sum(1 for p in cfg.profiles if p.signal_class is SignalClass.UAV)
    if recognized < 2 or uav < 1:
        raise ConfigError(
            f"need >= 2 recognized and >= 1 UAV profiles, got {recognized}/{uav}"
        )


def build_corpus(cfg: CorpusConfig) -> tuple[list[Signal], list[Signal]]:
    """Generate all signals and split them by the semi-supervised protocol.

    Recognized devices contribute their first train_per_device bursts to the
    training set and the remainder to evaluation; UAV devices contribute all
    bursts to evaluation only.
    """
    _check_class_mix(cfg)
    train: list[Signal] = []
    evaluation: list[Signal] = []
    for profile in cfg.profiles:
        for index in range(cfg.signals_per_device):
            sig = gen_burst(profile, index, cfg)
            if (
                profile.signal_class is SignalClass.RECOGNIZED
                and index < cfg.train_per_device
            ):
                train.append(sig)
            else:
                evaluation.append(sig)
    return train, evaluation


def clean_eval_signals(cfg: CorpusConfig) -> list[tuple[Signal, int]]:
    """Noise-free regeneration of the evaluation split.

    Returns (clean signal, noise seed) pairs in the same order as the
    evaluation list of build_corpus; re-noising with the paired seed at the
    corpus SNR reproduces the corpus evaluation signals exactly.
    """
    _check_class_mix(cfg)
    clean_cfg = CorpusConfig(
        profiles=cfg.profiles,
        signals_per_device=cfg.signals_per_device,
        snr_db=math.inf,
        capture_len=cfg.capture_len,
        master_seed=cfg.master_seed,
        lead_len=cfg.lead_len,
    )
    out: list[tuple[Signal, int]] = []
    for profile in cfg.profiles:
        for index in range(cfg.signals_per_device):
            if (
                profile.signal_class is SignalClass.RECOGNIZED
                and index < cfg.train_per_device
            ):
                continue
            out.append(
                (gen_burst(profile, index, clean_cfg), noise_seed(cfg, profile, index))
            )
    return out


def stratified_split_indices(
    labels: list[SignalClass], test_frac: float, seed: int
) -> tuple[list[int], list[int]]:
    """Per-class random split; both halves keep the original ordering."""
    if not labels:
        raise EmptyEval("cannot split an empty evaluation set")
    if not (0.0 < test_frac < 1.0):
        raise ValueError("test_frac must be in (0, 1)")
    rng = np.random.default_rng(seed)
    test_idx: list[int] = []
    val_idx: list[int] = []
    for cls in SignalClass:
        members = [i for i, c in enumerate(labels) if c is cls]
        if not members:
            continue
        order = rng.permutation(len(members))
        n_test = round(test_frac * len(members))
        picked = {members[j] for j in order[:n_test]}
        test_idx.extend(i for i in members if i in picked)
        val_idx.extend(i for i in members if i not in picked)
    return sorted(test_idx), sorted(val_idx)


def split_eval(
    evaluation: list[Signal], test_frac: float, seed: int
) -> tuple[list[Signal], list[Signal]]:
    """Stratified test/validation split of the evaluation signals."""
    test_idx, val_idx = stratified_split_indices(
        [s.signal_class for s in evaluation], test_frac, seed
    )
    return [evaluation[i] for i in test_idx], [evaluation[i] for i in val_idx]


def balanced_indices(
    labels: list[SignalClass], per_class: int, seed: int
) -> list[int]:
    """Pick per_class members of each class (for the balanced SNR-sweep set)."""
    rng = np.random.default_rng(seed)
    chosen: list[int] = []
    for cls in SignalClass:
        members = [i for i, c in enumerate(labels) if c is cls]
        if len(members) < per_class:
            raise ConfigError(
                f"need {per_class} {cls.value} signals for a balanced set, "
                f"got {len(members)}"
            )
        order = rng.permutation(len(members))
        chosen.extend(members[j] for j in order[:per_class])
    return sorted(chosen)
