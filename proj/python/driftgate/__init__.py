"""Dataset-shift detection and shift-aware training plans for tabular binary
classification.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from driftgate._core import (  # noqa: F401
    AdversarialReport,
    BoostParams,
    Dataset,
    DriftgateError,
    ExperimentReport,
    Model,
    StrategyOutcome,
    TrainingPlan,
    __version__,
    adversarial_validate,
    auc,
    augmented_cv_plan,
    baseline_cv_plan,
    build_adversarial_dataset,
    chrono_cv_plan,
    chrono_holdout_plan,
    emit_report,
    encode_loan_status,
    execute_plan,
    filtered_cv_plan,
    fit,
    generate_shifted,
    ks_statistic,
    load_csv,
    load_dataset,
    preprocess_lending_club,
    psi,
    psi_from_scores,
    run_grid,
    save_dataset,
    select_top_rows,
    split_by_month,
    summarize,
    verdict,
    weighted_plan,
    write_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
