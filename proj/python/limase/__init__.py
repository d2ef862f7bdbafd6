"""Local surrogate Shapley explanations for black-box models."""

from ._limase import (
    CallableModel,
    DataError,
    Dataset,
    DecisionTree,
    InvalidArgument,
    LimaseError,
    Mlp,
    Model,
    ModelError,
    RandomForest,
    explain,
    feature_importance,
    fit_tree,
    force_plot_svg,
    forest_shap,
    kernel_shap,
    load_model,
    make_synthetic,
    submodular_pick,
    summary_plot_svg,
    train_forest,
    train_mlp,
    tree_shap,
)

__all__ = [
    "CallableModel",
    "DataError",
    "Dataset",
    "DecisionTree",
    "InvalidArgument",
    "LimaseError",
    "Mlp",
    "Model",
    "ModelError",
    "RandomForest",
    "explain",
    "feature_importance",
    "fit_tree",
    "force_plot_svg",
    "forest_shap",
    "kernel_shap",
    "load_model",
    "make_synthetic",
    "submodular_pick",
    "summary_plot_svg",
    "train_forest",
    "train_mlp",
    "tree_shap",
]
