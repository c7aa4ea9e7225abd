"""Export the Iris and Wine datasets bundled with scikit-learn to CSV.

Writes data/iris.csv and data/wine.csv in the layout the CLI and the
acceptance tests expect (see docs/data_guide.md). Run from the repo root:

    python scripts/export_sklearn_datasets.py [output_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

from sklearn.datasets import load_iris, load_wine


def _clean(name: str) -> str:
    return (name.replace(" (cm)", "").replace(" ", "_")
                .replace("/", "_").lower())


def export_iris(out_dir: Path) -> Path:
    data = load_iris()
    path = out_dir / "iris.csv"
    with open(path, "w", encoding="utf-8", newline="") as handle:
        cols = [_clean(n) for n in data.feature_names] + ["species"]
        handle.write(",".join(cols) + "\n")
        for row, target in zip(data.data, data.target):
            cells = [repr(float(v)) for v in row]
            cells.append(data.target_names[target])
            handle.write(",".join(cells) + "\n")
    return path


def export_wine(out_dir: Path) -> Path:
    data = load_wine()
    path = out_dir / "wine.csv"
    with open(path, "w", encoding="utf-8", newline="") as handle:
        cols = [_clean(n) for n in data.feature_names] + ["class"]
        handle.write(",".join(cols) + "\n")
        for row, target in zip(data.data, data.target):
            cells = [repr(float(v)) for v in row]
            cells.append(data.target_names[target])
            handle.write(",".join(cells) + "\n")
    return path


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    out_dir.mkdir(parents=True, exist_ok=True)
    for path in (export_iris(out_dir), export_wine(out_dir)):
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
