#pragma once

#include "clutter/retrieval.hpp"

namespace clutter {

struct PmbsConfig : RetrievalConfig {
    /// Environments per batch; 0 means four per pool worker.
    std::size_t n_envs = 0;

    PmbsConfig() {
        policy = SelectionPolicy{ScoreVariant::ucb_virtual, 0.3, 3, 0};
        max_expansions = 0;
        time_budget_s = 60.0;
    }
};

std::size_t resolve_env_count(std::size_t n_envs, const WorkerPool* pool);

/// Parallel tree search with batched simulation: selection with virtual loss, batched
/// expansion, leaf-parallel rollouts, max-reward backups and early-stop levels.
StepResult pmbs_step(const SceneState& state, const PmbsConfig& cfg, WorkerPool* pool = nullptr);

}  // namespace clutter
