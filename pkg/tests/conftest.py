"""Shared fixtures and small builders for the test suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from helstrom import BinaryDataset, EncodedSample

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = ROOT / "data"

# One line per acceptance criterion, echoed after the test summary so the
# verdicts are visible even though pytest captures in-test prints.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def unit(values, label: int = 0) -> EncodedSample:
    """Normalize a raw vector into an EncodedSample."""
    arr = np.asarray(values, dtype=float)
    return EncodedSample(arr / np.linalg.norm(arr), label)


def random_unit(rng: np.random.Generator, dim: int, label: int = 0) -> EncodedSample:
    vec = rng.standard_normal(dim)
    return EncodedSample(vec / np.linalg.norm(vec), label)


def random_dataset(rng: np.random.Generator, dim: int, m_a: int,
                   m_b: int) -> BinaryDataset:
    return BinaryDataset(
        tuple(random_unit(rng, dim, 0) for _ in range(m_a)),
        tuple(random_unit(rng, dim, 1) for _ in range(m_b)),
    )


def separable_dataset(per_class: int = 10, dim: int = 4,
                      noise: float = 0.05, seed: int = 9) -> BinaryDataset:
    """Two tight clusters around orthogonal axes; trivially separable."""
    rng = np.random.default_rng(seed)
    class0 = []
    class1 = []
    for _ in range(per_class):
        v0 = np.zeros(dim)
        v0[0] = 1.0
        v0 += noise * rng.standard_normal(dim)
        class0.append(EncodedSample(v0 / np.linalg.norm(v0), 0))
        v1 = np.zeros(dim)
        v1[1] = 1.0
        v1 += noise * rng.standard_normal(dim)
        class1.append(EncodedSample(v1 / np.linalg.norm(v1), 1))
    return BinaryDataset(tuple(class0), tuple(class1))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def _load_export_script():
    import importlib.util
    spec = importlib.util.spec_from_file_location(
        "export_sklearn_datasets", ROOT / "scripts" / "export_sklearn_datasets.py"
    )
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture(scope="session")
def iris_csv() -> Path:
    path = DATA_DIR / "iris.csv"
    if not path.exists():
        DATA_DIR.mkdir(parents=True, exist_ok=True)
        _load_export_script().export_iris(DATA_DIR)
    return path


@pytest.fixture(scope="session")
def wine_csv() -> Path:
    path = DATA_DIR / "wine.csv"
    if not path.exists():
        DATA_DIR.mkdir(parents=True, exist_ok=True)
        _load_export_script().export_wine(DATA_DIR)
    return path


def optional_dataset(name: str) -> Path | None:
    """Path of an externally sourced benchmark CSV, or None when absent."""
    path = DATA_DIR / f"{name}.csv"
    return path if path.exists() else None


@pytest.fixture(scope="session")
def toy_csv(tmp_path_factory) -> Path:
    """70-row two-cluster CSV used by CLI tests."""
    rng = np.random.default_rng(3)
    lines = ["f1,f2,f3,target"]
    for _ in range(30):
        v = rng.normal([3.0, 0.0, 0.0], 0.4)
        lines.append(f"{v[0]:.4f},{v[1]:.4f},{v[2]:.4f},pos")
    for _ in range(40):
        v = rng.normal([0.0, 3.0, 0.0], 0.4)
        lines.append(f"{v[0]:.4f},{v[1]:.4f},{v[2]:.4f},neg")
    path = tmp_path_factory.mktemp("data") / "toy.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
