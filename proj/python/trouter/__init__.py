"""Task-type-aware LLM routing: cost/utility arithmetic, taxonomy handling,
near-duplicate filtering, and trained-router inference."""

from trouter._trouter import (
    HashProjectionEmbedder,
    PreferenceWeights,
    Router,
    RouterError,
    TaskProfile,
    Taxonomy,
    compute_cost,
    cosine_similarity,
    dedup_indices,
    elbo_check,
    exact_posterior,
    largest,
    render_judge_prompt,
    render_qa_prompt,
    select_best,
    smallest,
    train_files,
    utility,
)

__all__ = [
    "HashProjectionEmbedder",
    "PreferenceWeights",
    "Router",
    "RouterError",
    "TaskProfile",
    "Taxonomy",
    "compute_cost",
    "cosine_similarity",
    "dedup_indices",
    "elbo_check",
    "exact_posterior",
    "largest",
    "render_judge_prompt",
    "render_qa_prompt",
    "select_best",
    "smallest",
    "train_files",
    "utility",
]
