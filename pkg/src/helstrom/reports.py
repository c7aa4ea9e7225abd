"""Report writers: delimited tables, JSON records, and SVG figures.

All writers are atomic (write to a sibling temp file, then rename) and
deterministic: identical inputs produce identical bytes. Floats are
serialised with ``repr``, the shortest round-trip form. Figures are SVG
with the timestamp and hash salt pinned, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .difficulty import DifficultyProfile, POINT_TYPES
from .errors import LengthMismatchError
from .evaluation import SweepResult
from .oracle import VerificationReport

__all__ = [
    "SCHEMA_VERSION",
    "ResultRecord",
    "atomic_write_text",
    "write_scores_csv",
    "write_record_json",
    "write_sweep_csv",
    "write_best_json",
    "write_profile_json",
    "write_types_csv",
    "write_verify_json",
    "format_verification",
    "render_sweep_figure",
    "render_profile_figure",
]

SCHEMA_VERSION = 1

# Fixed salt so matplotlib's internal element ids do not vary run to run.
_SVG_HASHSALT = "helstrom"


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write text to ``path`` via a temp file and rename, never in place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value: float) -> str:
    return repr(float(value))


def _csv_line(cells: Sequence[str]) -> str:
    return ",".join(cells) + "\n"


@dataclass(frozen=True)
class ResultRecord:
    """One classifier's cross-validated result on one dataset."""

    dataset_id: str
    classifier_id: str
    k: float
    fold_f1: tuple[float, ...]
    mean_f1: float
    skipped_pairs: int
    duration_seconds: float

    def as_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "classifier_id": self.classifier_id,
            "k": self.k,
            "fold_f1": list(self.fold_f1),
            "mean_f1": self.mean_f1,
            "skipped_pairs": self.skipped_pairs,
            "duration_seconds": self.duration_seconds,
        }


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_scores_csv(path: str | Path, row_ids: Sequence[int],
                     fid_scores: np.ndarray, hqcs_scores: np.ndarray,
                     fid_labels: np.ndarray, hqcs_labels: np.ndarray) -> None:
    """Per-sample scores and predicted labels, one row per input row id."""
    columns = [np.asarray(c) for c in
               (row_ids, fid_scores, hqcs_scores, fid_labels, hqcs_labels)]
    if len({c.shape[0] for c in columns}) != 1:
        raise LengthMismatchError("score columns must be equally long")
    lines = [_csv_line(["row_id", "fid_score", "hqcs_score",
                        "fid_label", "hqcs_label"])]
    for rid, fs, hs, fl, hl in zip(*columns):
        lines.append(_csv_line([str(int(rid)), _fmt(fs), _fmt(hs),
                                str(int(fl)), str(int(hl))]))
    atomic_write_text(path, "".join(lines))


def write_record_json(path: str | Path, records: Sequence[ResultRecord]) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "records": [r.as_dict() for r in records],
    }
    atomic_write_text(path, _dump_json(payload))


def write_sweep_csv(path: str | Path, sweep: SweepResult) -> None:
    """Grid row per line: k, both mean F1 curves, then per-fold columns."""
    folds = sweep.fold_count
    header = (["k", "f1_hqcs_mean", "f1_fid_mean"]
              + [f"f1_hqcs_fold{i}" for i in range(1, folds + 1)]
              + [f"f1_fid_fold{i}" for i in range(1, folds + 1)])
    lines = [_csv_line(header)]
    for j, k in enumerate(sweep.k_grid):
        cells = [_fmt(k), _fmt(sweep.f1_hqcs[j]), _fmt(sweep.f1_fid[j])]
        cells += [_fmt(sweep.per_fold_hqcs[i, j]) for i in range(folds)]
        cells += [_fmt(sweep.per_fold_fid[i, j]) for i in range(folds)]
        lines.append(_csv_line(cells))
    atomic_write_text(path, "".join(lines))


def write_best_json(path: str | Path, sweep: SweepResult, dataset_id: str) -> None:
    bh_k, bh_f1 = sweep.best_hqcs
    bf_k, bf_f1 = sweep.best_fid
    payload = {
        "schema_version": SCHEMA_VERSION,
        "dataset_id": dataset_id,
        "best_hqcs": {"k": bh_k, "f1": bh_f1},
        "best_fid": {"k": bf_k, "f1": bf_f1},
        "skipped_pairs_total": int(sweep.skipped_pairs.sum()),
    }
    atomic_write_text(path, _dump_json(payload))


def write_profile_json(path: str | Path, profile: DifficultyProfile,
                       dataset_id: str) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "dataset_id": dataset_id,
        "safe_pct": profile.safe_pct,
        "borderline_pct": profile.borderline_pct,
        "rare_pct": profile.rare_pct,
        "outlier_pct": profile.outlier_pct,
    }
    atomic_write_text(path, _dump_json(payload))


def write_types_csv(path: str | Path, row_ids: Sequence[int],
                    types: Sequence[str]) -> None:
    if len(row_ids) != len(types):
        raise LengthMismatchError("one type per row id required")
    lines = [_csv_line(["row_id", "point_type"])]
    for rid, t in zip(row_ids, types):
        lines.append(_csv_line([str(int(rid)), str(t)]))
    atomic_write_text(path, "".join(lines))


def format_verification(report: VerificationReport) -> str:
    """Human-readable multi-line summary of a verification run."""
    lines = [
        f"verification trials: {report.trials}",
        f"pair eigenvalue max deviation: {report.pair_max_deviation:.3e}",
        "pair spectra with exactly two non-zero eigenvalues: "
        + ("yes" if report.pairs_all_two_eigenvalues else "NO"),
        f"HQCS fast-vs-naive max deviation: {report.hqcs_max_deviation:.3e}",
        f"FID fast-vs-naive max deviation: {report.fid_max_deviation:.3e}",
    ]
    if report.vacuous:
        lines.append("warning: zero trials requested, result is vacuous")
    for failure in report.failures:
        lines.append(f"FAIL: {failure}")
    lines.append("verification: " + ("PASS" if report.passed else "FAIL"))
    return "\n".join(lines) + "\n"


def write_verify_json(path: str | Path, report: VerificationReport) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "trials": report.trials,
        "pair_max_deviation": report.pair_max_deviation,
        "pairs_all_two_eigenvalues": report.pairs_all_two_eigenvalues,
        "hqcs_max_deviation": report.hqcs_max_deviation,
        "fid_max_deviation": report.fid_max_deviation,
        "failures": list(report.failures),
        "vacuous": report.vacuous,
        "passed": report.passed,
    }
    atomic_write_text(path, _dump_json(payload))


def _figure(width: float, height: float):
    import matplotlib
    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt
    matplotlib.rcParams["svg.hashsalt"] = _SVG_HASHSALT
    # Keep labels as text elements, not glyph outlines: smaller files and
    # byte-stable output that does not depend on the font rasteriser.
    matplotlib.rcParams["svg.fonttype"] = "none"
    return plt.figure(figsize=(width, height), dpi=100)


def _save_svg(fig, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    os.close(fd)
    try:
        # Date=None drops the creation timestamp so reruns are identical.
        fig.savefig(tmp, format="svg", metadata={"Date": None})
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        import matplotlib.pyplot as plt
        plt.close(fig)


def render_sweep_figure(sweep: SweepResult, path: str | Path) -> None:
    """Line chart of both mean F1 curves over k, best points annotated."""
    fig = _figure(8.0, 4.5)
    ax = fig.add_subplot(111)
    ax.plot(sweep.k_grid, sweep.f1_hqcs, label="HQCS", linewidth=1.2)
    ax.plot(sweep.k_grid, sweep.f1_fid, label="FID", linewidth=1.2,
            linestyle="--")
    for (k, f1), marker in ((sweep.best_hqcs, "o"), (sweep.best_fid, "s")):
        ax.plot([k], [f1], marker=marker, color="black", markersize=4)
        ax.annotate(f"k={k:g}, F1={f1:.3f}", xy=(k, f1),
                    xytext=(4, 4), textcoords="offset points", fontsize=8)
    ax.set_xlabel("k")
    ax.set_ylabel("F1")
    ax.set_ylim(-0.02, 1.05)
    ax.legend(loc="lower right")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save_svg(fig, path)


def render_profile_figure(profile: DifficultyProfile, path: str | Path) -> None:
    """Bar chart of the four difficulty-type percentages."""
    fig = _figure(6.0, 4.0)
    ax = fig.add_subplot(111)
    values = profile.as_tuple()
    positions = range(len(POINT_TYPES))
    ax.bar(positions, values, color="#4878a8")
    for x, v in zip(positions, values):
        ax.annotate(f"{v:.1f}", xy=(x, v), xytext=(0, 3),
                    textcoords="offset points", ha="center", fontsize=9)
    ax.set_xticks(list(positions))
    ax.set_xticklabels(POINT_TYPES)
    ax.set_ylabel("share of points (%)")
    ax.set_ylim(0, 105)
    fig.tight_layout()
    _save_svg(fig, path)
