"""Linear-probe evaluation, ablations and robustness sweeps."""

from acdgcl.evaluation.ablation import (
    ABLATION_FILE,
    ABLATION_HEADER,
    ABLATION_VARIANTS,
    AblationResult,
    run_ablation,
    variant_config,
    write_ablation_csv,
)
from acdgcl.evaluation.embed import EmbeddingTable, embed_dataset
from acdgcl.evaluation.errors import ProbeError, SweepError
from acdgcl.evaluation.probe import (
    EvalReport,
    LinearClassifier,
    evaluate_checkpoint,
    evaluate_table,
    fit_classifier,
    linear_probe,
)
from acdgcl.evaluation.sweep import (
    SWEEP_HEADER,
    SweepAxis,
    SweepRow,
    config_for,
    parse_axis,
    parse_values,
    run_robustness_sweep,
    write_sweep_csv,
)

__all__ = [
    "ABLATION_FILE",
    "ABLATION_HEADER",
    "ABLATION_VARIANTS",
    "SWEEP_HEADER",
    "AblationResult",
    "EmbeddingTable",
    "EvalReport",
    "LinearClassifier",
    "ProbeError",
    "SweepAxis",
    "SweepError",
    "SweepRow",
    "config_for",
    "embed_dataset",
    "evaluate_checkpoint",
    "evaluate_table",
    "fit_classifier",
    "linear_probe",
    "parse_axis",
    "parse_values",
    "run_ablation",
    "run_robustness_sweep",
    "variant_config",
    "write_ablation_csv",
    "write_sweep_csv",
]
