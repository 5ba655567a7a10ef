"""Command-line front end for the burst-fingerprinting pipeline.

Subcommands cover the full workflow: synthesize a corpus, extract feature
CSVs, train/score/evaluate the detector, and run the neighbor-count and SNR
sweeps. Logs go to stderr; data products go only to files (or stdout where
noted), so commands are pipe-safe. A single --seed flag fans out to
per-stage seeds (see seeding.stage_seed), which keeps every subcommand
deterministic without threading seeds through each flag.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import RfSentryError
from .evaluate import (
    best_k,
    confusion,
    metrics,
    render_snr_svg,
    save_confusion_csv,
    save_metrics_csv,
    save_neighbors_csv,
    save_snr_csv,
    sweep_neighbors,
    sweep_snr,
)
from .features import FeatureTable, fingerprint, load_feature_csv, save_feature_csv
from .lof import DEFAULT_K, DEFAULT_THRESHOLD, LofModel, fit
from .seeding import stage_seed
from .signals import (
    ManifestRow,
    SignalClass,
    TriggerConfig,
    load_signal,
    read_manifest,
    save_signal,
    write_manifest,
)
from .synth import (
    CorpusConfig,
    balanced_indices,
    clean_eval_signals,
    default_profiles,
    gen_burst,
    stratified_split_indices,
)

log = logging.getLogger("rfsentry")

CORPUS_FILE = "corpus.json"
TRAIN_MANIFEST = "train_manifest.csv"
EVAL_MANIFEST = "eval_manifest.csv"


def _atomic(write_fn, path: Path) -> None:
    """Write via a sibling temp file so a failure never leaves a partial file."""
    tmp = path.with_name(path.name + ".tmp")
    write_fn(tmp)
    os.replace(tmp, path)


def _parse_grid(text: str, integral: bool) -> list:
    """Grid syntax: 'start:stop:step' (stop inclusive) or 'v1,v2,...'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be > 0")
        values = []
        v = start
        while v <= stop + 1e-9:
            values.append(v)
            v += step
    else:
        values = [float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ValueError(f"grid {text!r} is empty")
    return [int(round(v)) for v in values] if integral else values


def _require_recognized(table: FeatureTable, what: str) -> None:
    uav = sum(1 for c in table.classes if c is SignalClass.UAV)
    if uav:
        raise RfSentryError(
            f"{what} contains {uav} UAV rows; the detector is semi-supervised "
            "and fits on recognized signals only"
        )


def _trigger_config(args) -> TriggerConfig:
    return TriggerConfig(
        window_len=args.window_len,
        energy_threshold=args.energy_threshold,
        capture_len=args.capture_len,
    )


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def _synth_device(cfg: CorpusConfig, profile_index: int, out_dir: str) -> list:
    """Generate and store every burst for one device; returns manifest rows."""
    profile = cfg.profiles[profile_index]
    rows = []
    for index in range(cfg.signals_per_device):
        sig = gen_burst(profile, index, cfg)
        rel = f"signals/{profile.name}_{index:05d}.rfsg"
        save_signal(sig, Path(out_dir) / rel)
        is_train = (
            profile.signal_class is SignalClass.RECOGNIZED
            and index < cfg.train_per_device
        )
        rows.append(
            (
                "train" if is_train else "eval",
                ManifestRow(
                    path=rel,
                    device_id=sig.device_id,
                    signal_class=sig.signal_class,
                    snr_db=sig.snr_db,
                ),
            )
        )
    return rows


def cmd_synth(args) -> int:
    out = Path(args.out)
    (out / "signals").mkdir(parents=True, exist_ok=True)
    cfg = CorpusConfig(
        profiles=default_profiles(args.capture_len),
        signals_per_device=args.signals_per_device,
        snr_db=args.snr,
        capture_len=args.capture_len,
        master_seed=stage_seed(args.seed, "corpus"),
    )
    per_device: dict[int, list] = {}
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = {
                i: pool.submit(_synth_device, cfg, i, str(out))
                for i in range(len(cfg.profiles))
            }
            per_device = {i: fut.result() for i, fut in futures.items()}
    else:
        per_device = {
            i: _synth_device(cfg, i, str(out)) for i in range(len(cfg.profiles))
        }

    train_rows, eval_rows = [], []
    for i in range(len(cfg.profiles)):
        for split, row in per_device[i]:
            (train_rows if split == "train" else eval_rows).append(row)

    # manifests and config last, atomically: their presence means a complete corpus
    _atomic(lambda p: write_manifest(train_rows, p), out / TRAIN_MANIFEST)
    _atomic(lambda p: write_manifest(eval_rows, p), out / EVAL_MANIFEST)
    doc = {"format": "rfsentry-corpus", "version": 1, "config": cfg.to_dict()}
    _atomic(
        lambda p: Path(p).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n"),
        out / CORPUS_FILE,
    )
    log.info(
        "corpus at %s: %d train + %d eval signals across %d devices",
        out, len(train_rows), len(eval_rows), len(cfg.profiles),
    )
    return 0


def cmd_extract(args) -> int:
    manifest = Path(args.manifest)
    rows = read_manifest(manifest)
    trigger = _trigger_config(args)
    kept, skipped = [], 0
    for row in rows:
        full = Path(row.path)
        if not full.is_absolute():
            full = manifest.parent / full
        try:
            sig = load_signal(
                full,
                device_id=row.device_id,
                signal_class=row.signal_class,
                snr_db=row.snr_db,
            )
            vec = fingerprint(sig, trigger)
        except (RfSentryError, ValueError) as exc:
            skipped += 1
            log.warning("skipping %s: %s", row.path, exc)
            continue
        kept.append((row.device_id, row.signal_class, row.snr_db, vec))
    table = FeatureTable.from_rows(kept)
    _atomic(lambda p: save_feature_csv(table, p), Path(args.out))
    log.info("extracted %d feature rows, skipped %d of %d", len(table), skipped, len(rows))
    return 0


def cmd_train(args) -> int:
    table = load_feature_csv(args.features)
    _require_recognized(table, "training features")
    model = fit(
        table.matrix,
        k=args.k,
        metric=args.metric,
        threshold=args.threshold,
        standardize=not args.no_standardize,
    )
    _atomic(model.save, Path(args.out))
    log.info(
        "trained on %d recognized fingerprints (k=%d, metric=%s, threshold=%g)",
        len(table), args.k, args.metric, args.threshold,
    )
    return 0


def cmd_score(args) -> int:
    import csv

    model = LofModel.load(args.model)
    table = load_feature_csv(args.features)
    scores = model.score_batch(table.matrix)
    labels = model.classify_batch(table.matrix)

    def write(path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["device_id", "class", "snr_db", "score", "label"])
            for i in range(len(table)):
                snr = table.snr_db[i]
                writer.writerow(
                    [
                        table.device_ids[i],
                        table.classes[i].value,
                        "" if snr is None else repr(float(snr)),
                        repr(float(scores[i])),
                        labels[i].value,
                    ]
                )

    _atomic(write, Path(args.out))
    log.info("scored %d fingerprints", len(table))
    return 0


def cmd_eval(args) -> int:
    model = LofModel.load(args.model)
    table = load_feature_csv(args.features)
    preds = model.classify_batch(table.matrix)
    cm = confusion(table.classes, preds)
    m = metrics(cm)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _atomic(lambda p: save_confusion_csv(cm, p), out / "confusion.csv")
    _atomic(lambda p: save_metrics_csv(m, p), out / "metrics.csv")
    log.info(
        "accuracy=%.4f precision=%.4f recall=%.4f f1=%.4f (tp=%d fp=%d fn=%d tn=%d)",
        m.accuracy, m.precision, m.recall, m.f1, cm.tp, cm.fp, cm.fn, cm.tn,
    )
    return 0


def cmd_sweep_n(args) -> int:
    train = load_feature_csv(args.train_features)
    _require_recognized(train, "training features")
    ev = load_feature_csv(args.eval_features)
    test_idx, val_idx = stratified_split_indices(
        ev.classes, args.test_frac, stage_seed(args.seed, "split")
    )
    table = sweep_neighbors(
        train,
        ev.select(val_idx),
        ev.select(test_idx),
        k_grid=_parse_grid(args.k_grid, integral=True),
        metric=args.metric,
        threshold=args.threshold,
        standardize=not args.no_standardize,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _atomic(lambda p: save_neighbors_csv(table, p), out / "neighbors_sweep.csv")
    chosen = best_k(table)
    log.info("neighbor sweep written; best k by validation accuracy = %d", chosen)
    print(chosen)
    return 0


def cmd_sweep_snr(args) -> int:
    corpus_dir = Path(args.corpus)
    doc = json.loads((corpus_dir / CORPUS_FILE).read_text())
    if doc.get("format") != "rfsentry-corpus":
        raise ValueError(f"{corpus_dir / CORPUS_FILE}: not a corpus description")
    cfg = CorpusConfig.from_dict(doc["config"])
    train = load_feature_csv(args.train_features)
    _require_recognized(train, "training features")

    clean = clean_eval_signals(cfg)
    labels = [sig.signal_class for sig, _ in clean]
    picked = balanced_indices(
        labels, args.per_class, stage_seed(cfg.master_seed, "balanced")
    )
    balanced = [clean[i] for i in picked]
    trigger = TriggerConfig(capture_len=cfg.capture_len)
    table = sweep_snr(
        train,
        balanced,
        k_grid=_parse_grid(args.k_grid, integral=True),
        snr_grid=_parse_grid(args.snr_grid, integral=False),
        trigger=trigger,
        metric=args.metric,
        threshold=args.threshold,
        standardize=not args.no_standardize,
        jobs=args.jobs,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _atomic(lambda p: save_snr_csv(table, p), out / "snr_sweep.csv")
    _atomic(lambda p: render_snr_svg(table, p), out / "snr_sweep.svg")
    log.info("SNR sweep written: %d cells", len(table.rows))
    return 0


# ---------------------------------------------------------------------------
# Parser.
# ---------------------------------------------------------------------------


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--metric", choices=["manhattan", "euclidean"],
                   default="manhattan", help="distance metric (default manhattan)")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                   help="outlier decision threshold (default %(default)s)")
    p.add_argument("--no-standardize", action="store_true",
                   help="skip z-scoring features with training statistics")


def _add_trigger_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--capture-len", type=int, default=4096,
                   help="transient capture length in samples (default %(default)s)")
    p.add_argument("--window-len", type=int, default=64,
                   help="energy trigger window length (default %(default)s)")
    p.add_argument("--energy-threshold", type=float, default=0.05,
                   help="mean-square energy trigger level (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfsentry",
        description="UAV-controller burst detection via wavelet-packet "
                    "fingerprints and a Local Outlier Factor novelty model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic RF corpus")
    p.add_argument("--out", required=True, help="corpus output directory")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--snr", type=float, default=30.0,
                   help="corpus SNR in dB; inf disables noise (default 30)")
    p.add_argument("--capture-len", type=int, default=4096,
                   help="transient capture length in samples (default %(default)s)")
    p.add_argument("--signals-per-device", type=int, default=300,
                   help="bursts per device (default %(default)s)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes (default 1; output is identical)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="manifest of signals -> feature CSV")
    p.add_argument("--manifest", required=True, help="manifest CSV")
    p.add_argument("--out", required=True, help="feature CSV to write")
    _add_trigger_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="fit the detector on recognized features")
    p.add_argument("--features", required=True, help="training feature CSV")
    p.add_argument("--out", required=True, help="model JSON to write")
    p.add_argument("--k", type=int, default=DEFAULT_K,
                   help="neighbor count (default %(default)s)")
    _add_model_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="LOF score for each feature row")
    p.add_argument("--model", required=True, help="model JSON")
    p.add_argument("--features", required=True, help="feature CSV to score")
    p.add_argument("--out", required=True, help="score CSV to write")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="confusion matrix + metrics for labeled features")
    p.add_argument("--model", required=True, help="model JSON")
    p.add_argument("--features", required=True, help="labeled feature CSV")
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep-n", help="accuracy vs neighbor count")
    p.add_argument("--train-features", required=True, help="training feature CSV")
    p.add_argument("--eval-features", required=True, help="evaluation feature CSV")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--k-grid", default="10:200:10",
                   help="neighbor grid, start:stop:step or comma list "
                        "(default %(default)s)")
    p.add_argument("--test-frac", type=float, default=0.7,
                   help="test share of the stratified eval split (default %(default)s)")
    p.add_argument("--seed", type=int, default=0,
                   help="master seed for the split (default 0)")
    _add_model_flags(p)
    p.set_defaults(func=cmd_sweep_n)

    p = sub.add_parser("sweep-snr", help="accuracy vs SNR for a 30 dB-trained model")
    p.add_argument("--corpus", required=True,
                   help="corpus directory written by synth (provides clean signals)")
    p.add_argument("--train-features", required=True, help="training feature CSV")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--k-grid", default="100:200:20",
                   help="neighbor grid (default %(default)s)")
    p.add_argument("--snr-grid", default="6:30:2",
                   help="SNR grid in dB (default %(default)s)")
    p.add_argument("--per-class", type=int, default=200,
                   help="balanced set size per class (default %(default)s)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes (default 1; output is identical)")
    _add_model_flags(p)
    p.set_defaults(func=cmd_sweep_snr)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s"
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RfSentryError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
