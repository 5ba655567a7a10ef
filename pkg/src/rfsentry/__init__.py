"""RF burst fingerprinting and UAV-controller anomaly detection.

Pipeline: energy-triggered transient capture -> two-level Haar wavelet
packet transform -> packet-variance fingerprint -> Local Outlier Factor
novelty score against a recognized-signal reference set.
"""

from .errors import RfSentryError
from .features import FeatureVector, fingerprint, rank_features
from .lof import Label, LofModel, Metric, fit
from .signals import Signal, SignalClass, TriggerConfig, add_awgn, extract_transient
from .wpt import PacketSet, wpt2

__version__ = "0.1.0"

__all__ = [
    "FeatureVector",
    "Label",
    "LofModel",
    "Metric",
    "PacketSet",
    "RfSentryError",
    "Signal",
    "SignalClass",
    "TriggerConfig",
    "__version__",
    "add_awgn",
    "extract_transient",
    "fingerprint",
    "fit",
    "rank_features",
    "wpt2",
]
