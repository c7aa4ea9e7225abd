"""Quantum-inspired binary classification via Helstrom-centroid simulation.

The package provides:

* amplitude encoding and overlap primitives (:mod:`helstrom.core`),
* the linear-time HQCS and FID classifiers (:mod:`helstrom.classifier`),
* a brute-force tensor-product oracle validating them (:mod:`helstrom.oracle`),
* stratified cross-validation and copy-count sweeps (:mod:`helstrom.evaluation`),
* HVDM-based dataset difficulty profiling (:mod:`helstrom.difficulty`),
* report writers and a CLI (:mod:`helstrom.reports`, :mod:`helstrom.cli`).
"""

from .core import (
    BinaryDataset,
    EncodedSample,
    RawSample,
    amplitude_encode,
    overlap,
)
from .classifier import (
    CLASSIFIER_IDS,
    FID,
    HQCS,
    OverlapCache,
    ScoreReport,
    build_overlap_cache,
    fid_pair_score,
    fid_score,
    fid_score_kernel_form,
    fid_scores,
    fidelity_kernel,
    hqcs_score,
    hqcs_scores,
    pair_eigenvalue,
    predict,
    predict_labels,
    score_report,
)
from .oracle import (
    DensityMatrix,
    HelstromOperator,
    build_centroid,
    centroid_sign_score,
    fid_score_naive,
    helstrom_operator,
    hqc_score_naive,
    kron_power,
    run_verification,
    verify_decomposition,
    verify_pair_eigenvalues,
)
from .evaluation import (
    FoldPlan,
    SweepResult,
    cross_validate,
    f1_score,
    nonmonotonicity_check,
    stratified_kfold,
    sweep_k,
)
from .difficulty import (
    AttributeStats,
    DifficultyProfile,
    categorize,
    classify_point_type,
    hvdm_distance,
    point_types,
)
from .errors import HelstromError

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "HelstromError",
    "RawSample",
    "EncodedSample",
    "BinaryDataset",
    "amplitude_encode",
    "overlap",
    "HQCS",
    "FID",
    "CLASSIFIER_IDS",
    "OverlapCache",
    "ScoreReport",
    "build_overlap_cache",
    "fidelity_kernel",
    "pair_eigenvalue",
    "fid_pair_score",
    "fid_score",
    "fid_scores",
    "fid_score_kernel_form",
    "hqcs_score",
    "hqcs_scores",
    "predict",
    "predict_labels",
    "score_report",
    "DensityMatrix",
    "HelstromOperator",
    "kron_power",
    "build_centroid",
    "helstrom_operator",
    "hqc_score_naive",
    "fid_score_naive",
    "centroid_sign_score",
    "verify_pair_eigenvalues",
    "verify_decomposition",
    "run_verification",
    "FoldPlan",
    "SweepResult",
    "stratified_kfold",
    "f1_score",
    "cross_validate",
    "sweep_k",
    "nonmonotonicity_check",
    "AttributeStats",
    "DifficultyProfile",
    "hvdm_distance",
    "classify_point_type",
    "point_types",
    "categorize",
]
