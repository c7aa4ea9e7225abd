"""Command-line surface: predict, sweep, verify, and categorize.

Every command is a pure function of its input files, flags, and seed;
reruns write byte-identical outputs, with one documented exception (the
wall-clock ``duration_seconds`` field inside ``record.json``).

Exit codes: 0 success, 2 input or configuration error, 3 verification
failure, 4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .classifier import predict_labels
from .core import (
    BinaryDataset,
    EncodedSample,
    RawSample,
    amplitude_encode,
)
from .difficulty import AttributeStats, DifficultyProfile, point_types
from .errors import (
    EmptyClassError,
    HelstromError,
    MissingLabelColumnError,
    MoreThanTwoClassesError,
    ParseError,
    TooFewSamplesError,
    ZeroNormError,
)
from .evaluation import (
    f1_score,
    fold_scores,
    make_grid,
    stratified_kfold,
    sweep_k,
)
from .oracle import run_verification
from .reports import (
    ResultRecord,
    format_verification,
    render_profile_figure,
    render_sweep_figure,
    write_best_json,
    write_profile_json,
    write_record_json,
    write_scores_csv,
    write_sweep_csv,
    write_types_csv,
    write_verify_json,
)

__all__ = [
    "EXIT_OK",
    "EXIT_INPUT",
    "EXIT_VERIFY",
    "EXIT_INTERNAL",
    "RunConfig",
    "RawTable",
    "load_csv",
    "cmd_predict",
    "cmd_sweep",
    "cmd_verify",
    "cmd_categorize",
    "main",
]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERIFY = 3
EXIT_INTERNAL = 4

# Cell spellings (lowercased) read as a missing value.
_MISSING_TOKENS = {"", "?", "na", "n/a", "nan"}


@dataclass(frozen=True)
class RunConfig:
    """Everything a dataset-facing command needs, flags merged over defaults."""

    dataset_path: Path | None = None
    label_column: str | None = None
    positive_class_value: str | None = None
    class_pair: tuple[str, str] | None = None
    categorical_columns: tuple[str, ...] = ()
    folds: int = 5
    seed: int = 42
    k_min: float = 0.25
    k_max: float = 100.0
    k_step: float = 0.25
    output_dir: Path = Path(".")
    emit_svg: bool = False
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.folds < 2:
            raise TooFewSamplesError(f"need at least 2 folds, got {self.folds}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {self.jobs}")
        make_grid(self.k_min, self.k_max, self.k_step)  # validates the grid
        if self.class_pair is not None:
            pair = tuple(self.class_pair)
            if len(pair) != 2 or pair[0] == pair[1]:
                raise ValueError(f"class pair must be two distinct values, got {pair!r}")
            object.__setattr__(self, "class_pair", pair)
        object.__setattr__(self, "categorical_columns", tuple(self.categorical_columns))
        if self.dataset_path is not None:
            object.__setattr__(self, "dataset_path", Path(self.dataset_path))
        object.__setattr__(self, "output_dir", Path(self.output_dir))


@dataclass(frozen=True)
class RawTable:
    """The parsed CSV rows selected for the run, before encoding.

    ``features`` keeps missing values as NaN, so the difficulty profiler
    sees every selected row. ``encoded_row_ids`` lists, in the encoded
    dataset's canonical class0-then-class1 order, the 1-based CSV data row
    each encoded sample came from; rows with missing features are only in
    the raw view and their ids are collected in ``unencoded_row_ids``.
    """

    row_ids: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    feature_columns: tuple[str, ...]
    categorical_indices: tuple[int, ...]
    label_values: tuple[str, str]
    encoded_row_ids: np.ndarray
    unencoded_row_ids: tuple[int, ...] = field(default=())


def _map_labels(values: list[str], config: RunConfig) -> tuple[str, str]:
    """Choose which raw label value becomes class 0 and which class 1."""
    distinct = sorted(set(values))
    if config.class_pair is not None:
        v0, v1 = config.class_pair
        if config.positive_class_value is not None:
            if config.positive_class_value not in (v0, v1):
                raise EmptyClassError(
                    f"positive value {config.positive_class_value!r} is not "
                    f"in the class pair {config.class_pair!r}"
                )
            if config.positive_class_value == v1:
                v0, v1 = v1, v0
        return v0, v1
    if config.positive_class_value is not None:
        pos = config.positive_class_value
        if pos not in distinct:
            raise EmptyClassError(f"positive value {pos!r} not present in the data")
        rest = [v for v in distinct if v != pos]
        if len(rest) != 1:
            raise MoreThanTwoClassesError(
                f"label column holds {len(distinct)} values {distinct!r}; "
                "pass --class-pair to reduce to two"
            )
        return pos, rest[0]
    if len(distinct) != 2:
        raise MoreThanTwoClassesError(
            f"label column holds {len(distinct)} values {distinct!r}; "
            "pass --class-pair to reduce to two"
        )
    return distinct[0], distinct[1]


def load_csv(path: str | Path, config: RunConfig,
             ) -> tuple[BinaryDataset, AttributeStats, RawTable]:
    """Parse a headered CSV into encoded samples, statistics, and raw rows.

    The label column is selected by name; every other column is numeric
    unless flagged categorical. Missing cells become NaN: such rows stay
    in the raw table (the difficulty profiler handles them) but are not
    encoded. Unparseable cells, ragged rows, and zero-norm feature rows
    raise :class:`ParseError` carrying the 1-based data row number.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(0, None, "file has no header row") from None
        if config.label_column is None:
            raise MissingLabelColumnError("no label column configured (--label-col)")
        if config.label_column not in header:
            raise MissingLabelColumnError(
                f"label column {config.label_column!r} not in header {header!r}"
            )
        label_idx = header.index(config.label_column)
        feature_columns = tuple(h for i, h in enumerate(header) if i != label_idx)
        for name in config.categorical_columns:
            if name not in feature_columns:
                raise ParseError(0, name, "categorical column not in header")
        cat_indices = tuple(i for i, h in enumerate(feature_columns)
                            if h in set(config.categorical_columns))

        raw_labels: list[str] = []
        rows: list[list[float]] = []
        row_ids: list[int] = []
        for row_number, cells in enumerate(reader, start=1):
            if not cells:
                continue  # blank line
            if len(cells) != len(header):
                raise ParseError(
                    row_number, None,
                    f"expected {len(header)} cells, got {len(cells)}",
                )
            label = cells[label_idx].strip()
            if label == "":
                raise ParseError(row_number, config.label_column, "empty label")
            values: list[float] = []
            for j, name in enumerate(feature_columns):
                cell_idx = j if j < label_idx else j + 1
                cell = cells[cell_idx].strip()
                if cell.lower() in _MISSING_TOKENS:
                    values.append(float("nan"))
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    raise ParseError(row_number, name,
                                     f"not a number: {cell!r}") from None
            raw_labels.append(label)
            rows.append(values)
            row_ids.append(row_number)

    if not rows:
        raise EmptyClassError(f"{path} holds no data rows")

    value0, value1 = _map_labels(raw_labels, config)
    keep = [i for i, lab in enumerate(raw_labels) if lab in (value0, value1)]
    labels = np.array([0 if raw_labels[i] == value0 else 1 for i in keep], dtype=int)
    features = np.array([rows[i] for i in keep], dtype=float)
    ids = np.array([row_ids[i] for i in keep], dtype=int)
    if not np.any(labels == 0) or not np.any(labels == 1):
        raise EmptyClassError(
            f"class values {value0!r}/{value1!r} leave an empty class"
        )

    stats = AttributeStats.fit(features, labels, cat_indices)

    encoded: dict[int, list[EncodedSample]] = {0: [], 1: []}
    encoded_ids: dict[int, list[int]] = {0: [], 1: []}
    unencoded: list[int] = []
    for i in range(features.shape[0]):
        if np.isnan(features[i]).any():
            unencoded.append(int(ids[i]))
            continue
        try:
            sample = amplitude_encode(RawSample(features[i], int(labels[i])))
        except ZeroNormError:
            raise ParseError(int(ids[i]), None,
                             "zero-norm feature vector cannot be encoded") from None
        encoded[sample.label].append(sample)
        encoded_ids[sample.label].append(int(ids[i]))
    dataset = BinaryDataset(tuple(encoded[0]), tuple(encoded[1]))
    table = RawTable(
        row_ids=ids,
        features=features,
        labels=labels,
        feature_columns=feature_columns,
        categorical_indices=cat_indices,
        label_values=(value0, value1),
        encoded_row_ids=np.array(encoded_ids[0] + encoded_ids[1], dtype=int),
        unencoded_row_ids=tuple(unencoded),
    )
    return dataset, stats, table


def _require_data(config: RunConfig) -> tuple[BinaryDataset, AttributeStats, RawTable]:
    if config.dataset_path is None:
        raise ValueError("no dataset given (--data)")
    if not config.dataset_path.exists():
        raise FileNotFoundError(f"no such file: {config.dataset_path}")
    return load_csv(config.dataset_path, config)


def _dataset_id(config: RunConfig) -> str:
    return config.dataset_path.stem if config.dataset_path else "dataset"


def _warn_skipped(skipped: int) -> None:
    if skipped > 0:
        print(f"warning: {skipped} degenerate cross-class pair evaluations "
              "skipped (identical states carry no sign information)",
              file=sys.stderr)


def cmd_predict(config: RunConfig, k: float) -> int:
    """Cross-validated scores at one k: writes scores.csv and record.json."""
    dataset, _, table = _require_data(config)
    started = time.perf_counter()
    plan = stratified_kfold(dataset, config.folds, config.seed)
    fid, hqcs, skipped = fold_scores(dataset, plan, k)
    fid_labels = predict_labels(fid)
    hqcs_labels = predict_labels(hqcs)
    truth = dataset.labels()
    per_fold = {"FID": [], "HQCS": []}
    for fold in range(plan.fold_count):
        idx = plan.test_indices(fold)
        per_fold["FID"].append(f1_score(truth[idx], fid_labels[idx], positive=0))
        per_fold["HQCS"].append(f1_score(truth[idx], hqcs_labels[idx], positive=0))
    duration = time.perf_counter() - started

    order = np.argsort(table.encoded_row_ids, kind="stable")
    out = config.output_dir
    write_scores_csv(out / "scores.csv",
                     table.encoded_row_ids[order],
                     fid[order], hqcs[order],
                     fid_labels[order], hqcs_labels[order])
    records = [
        ResultRecord(
            dataset_id=_dataset_id(config), classifier_id=name, k=float(k),
            fold_f1=tuple(per_fold[name]),
            mean_f1=float(np.mean(per_fold[name])),
            skipped_pairs=skipped, duration_seconds=duration,
        )
        for name in ("FID", "HQCS")
    ]
    write_record_json(out / "record.json", records)
    _warn_skipped(skipped)
    for record in records:
        print(f"{record.classifier_id}: mean F1 {record.mean_f1:.4f} at k={k:g}")
    print(f"wrote {out / 'scores.csv'} and {out / 'record.json'}")
    return EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    """Full k-grid sweep: writes sweep.csv, best.json, optional sweep.svg."""
    dataset, _, _ = _require_data(config)
    plan = stratified_kfold(dataset, config.folds, config.seed)
    sweep = sweep_k(dataset, plan, config.k_min, config.k_max, config.k_step,
                    positive=0, jobs=config.jobs)
    out = config.output_dir
    write_sweep_csv(out / "sweep.csv", sweep)
    write_best_json(out / "best.json", sweep, _dataset_id(config))
    written = [out / "sweep.csv", out / "best.json"]
    if config.emit_svg:
        render_sweep_figure(sweep, out / "sweep.svg")
        written.append(out / "sweep.svg")
    _warn_skipped(int(sweep.skipped_pairs.sum()))
    bh_k, bh_f1 = sweep.best_hqcs
    bf_k, bf_f1 = sweep.best_fid
    print(f"best HQCS: F1 {bh_f1:.4f} at k={bh_k:g}")
    print(f"best FID:  F1 {bf_f1:.4f} at k={bf_k:g}")
    print("wrote " + ", ".join(str(p) for p in written))
    return EXIT_OK


def cmd_verify(dims: Sequence[int], samples_per_class: int, k_max: int,
               trials: int, seed: int, out_dir: Path | None = None) -> int:
    """Randomized self-test of the fast paths against the oracle."""
    report = run_verification(dims=dims, samples_per_class=samples_per_class,
                              k_max=k_max, trials=trials, seed=seed)
    sys.stdout.write(format_verification(report))
    if out_dir is not None:
        write_verify_json(Path(out_dir) / "verify.json", report)
        print(f"wrote {Path(out_dir) / 'verify.json'}")
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_categorize(config: RunConfig) -> int:
    """Difficulty profile: writes profile.json, types.csv, optional SVG."""
    _, stats, table = _require_data(config)
    types = point_types(table.features, table.labels, stats)
    profile = DifficultyProfile.from_types(list(types))
    out = config.output_dir
    write_profile_json(out / "profile.json", profile, _dataset_id(config))
    write_types_csv(out / "types.csv", table.row_ids, list(types))
    written = [out / "profile.json", out / "types.csv"]
    if config.emit_svg:
        render_profile_figure(profile, out / "profile.svg")
        written.append(out / "profile.svg")
    print(f"safe {profile.safe_pct:.1f}% | borderline {profile.borderline_pct:.1f}% "
          f"| rare {profile.rare_pct:.1f}% | outlier {profile.outlier_pct:.1f}%")
    print("wrote " + ", ".join(str(p) for p in written))
    return EXIT_OK


# --- argument plumbing -----------------------------------------------------

_CONFIG_KEYS = {
    "data", "label-col", "positive", "class-pair", "categorical", "folds",
    "seed", "k-min", "k-max", "k-step", "out", "svg", "jobs",
}

_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


def _read_config_file(path: str | Path) -> dict[str, str]:
    """key=value lines; blank lines and # comments ignored."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise ParseError(lineno, None, f"expected key=value, got {text!r}")
            key, _, value = text.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ParseError(lineno, key, "unknown configuration key")
            values[key] = value.strip()
    return values


def _parse_bool(word: str) -> bool:
    lowered = word.lower()
    if lowered in _TRUE_WORDS:
        return True
    if lowered in _FALSE_WORDS:
        return False
    raise ValueError(f"expected a boolean, got {word!r}")


def _pick(flag_value, file_values: dict[str, str], key: str, convert, default):
    """Flag wins, then config file, then the built-in default."""
    if flag_value is not None:
        return flag_value
    if key in file_values:
        return convert(file_values[key])
    return default


def _split_pair(text: str) -> tuple[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise ValueError(f"expected two comma-separated values, got {text!r}")
    return parts[0], parts[1]


def _split_names(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _split_ints(text: str) -> tuple[int, ...]:
    return tuple(int(p.strip()) for p in text.split(",") if p.strip())


def _build_config(args: argparse.Namespace) -> RunConfig:
    file_values = _read_config_file(args.config) if args.config else {}
    defaults = RunConfig()
    return RunConfig(
        dataset_path=_pick(args.data, file_values, "data", Path, None),
        label_column=_pick(args.label_col, file_values, "label-col", str, None),
        positive_class_value=_pick(args.positive, file_values, "positive", str, None),
        class_pair=_pick(args.class_pair, file_values, "class-pair",
                         _split_pair, None),
        categorical_columns=_pick(args.categorical, file_values, "categorical",
                                  _split_names, ()),
        folds=_pick(args.folds, file_values, "folds", int, defaults.folds),
        seed=_pick(args.seed, file_values, "seed", int, defaults.seed),
        k_min=_pick(args.k_min, file_values, "k-min", float, defaults.k_min),
        k_max=_pick(args.k_max, file_values, "k-max", float, defaults.k_max),
        k_step=_pick(args.k_step, file_values, "k-step", float, defaults.k_step),
        output_dir=_pick(args.out, file_values, "out", Path, defaults.output_dir),
        emit_svg=_pick(args.svg, file_values, "svg", _parse_bool, False),
        jobs=_pick(args.jobs, file_values, "jobs", int, defaults.jobs),
    )


def _add_shared_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="key=value file; flags override its values")
    parser.add_argument("--data", type=Path, metavar="PATH", default=None,
                        help="input CSV with a header row")
    parser.add_argument("--label-col", default=None, metavar="NAME",
                        help="name of the label column")
    parser.add_argument("--class-pair", type=_split_pair, default=None,
                        metavar="V0,V1",
                        help="two raw label values; first becomes class 0")
    parser.add_argument("--positive", default=None, metavar="V0",
                        help="raw label value mapped to class 0 (the F1 target)")
    parser.add_argument("--categorical", type=_split_names, default=None,
                        metavar="C1,C2",
                        help="comma-separated categorical column names")
    parser.add_argument("--folds", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--k-min", type=float, default=None)
    parser.add_argument("--k-max", type=float, default=None)
    parser.add_argument("--k-step", type=float, default=None)
    parser.add_argument("--out", type=Path, default=None, metavar="DIR",
                        help="output directory (default: current directory)")
    parser.add_argument("--svg", action="store_const", const=True, default=None,
                        help="also render figures as SVG")
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker processes for the sweep")


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="helstrom",
        description="Quantum-inspired binary classification and dataset "
                    "difficulty profiling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_predict = sub.add_parser("predict", help="score one k with cross-validation")
    _add_shared_flags(p_predict)
    p_predict.add_argument("--k", type=float, required=True,
                           help="copy count (positive real)")

    p_sweep = sub.add_parser("sweep", help="sweep F1 over a k grid")
    _add_shared_flags(p_sweep)

    p_cat = sub.add_parser("categorize", help="difficulty-profile a dataset")
    _add_shared_flags(p_cat)

    p_verify = sub.add_parser("verify",
                              help="self-test fast classifiers against the oracle")
    p_verify.add_argument("--dims", type=_split_ints, default=(2, 3, 4),
                          metavar="D1,D2", help="feature dimensions to draw from")
    p_verify.add_argument("--samples-per-class", type=int, default=3)
    p_verify.add_argument("--k-max", type=int, default=3,
                          help="largest integer copy count tested")
    p_verify.add_argument("--trials", type=int, default=100)
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--out", type=Path, default=None, metavar="DIR",
                          help="also write verify.json here")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.dims, args.samples_per_class, args.k_max,
                              args.trials, args.seed, args.out)
        config = _build_config(args)
        if args.command == "predict":
            return cmd_predict(config, args.k)
        if args.command == "sweep":
            return cmd_sweep(config)
        if args.command == "categorize":
            return cmd_categorize(config)
        raise AssertionError(f"unhandled command {args.command!r}")
    except (HelstromError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
