#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clutter/remp.hpp"
#include "clutter/scenegen.hpp"

namespace clutter {

/// Every tunable of the planners and the harness, loadable from a JSON config file.
struct HarnessConfig {
    RetrievalConfig retrieval;
    /// Parallel retrieval environments; 0 = four per worker.
    std::size_t n_envs = 0;
    RempRun remp;
    /// Worker threads; 0 = hardware concurrency.
    std::size_t threads = 0;
};

/// Applies the keys present in `j` on top of `cfg`; unknown keys are rejected by name.
void apply_config(HarnessConfig& cfg, const nlohmann::json& j);
HarnessConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const HarnessConfig& cfg);

/// Command-line overrides shared by the subcommands.
struct RunOverrides {
    std::optional<double> budget_s;
    std::optional<std::size_t> envs;
    std::optional<std::uint64_t> seed;
    /// Rearrangement only; applied after `budget_s`.
    std::optional<double> step_budget_s;
    std::optional<std::string> episode_mode;
};
void apply_overrides(HarnessConfig& cfg, const RunOverrides& o);

bool is_retrieval_mode(const std::string& mode);
bool is_rearrangement_mode(const std::string& mode);

/// One episode of `mode` on `scene` with every planner seed derived from `seed`.
EpisodeResult run_episode(const Scene& scene, const std::string& mode, const HarnessConfig& cfg, std::uint64_t seed,
                          WorkerPool* pool = nullptr);

struct BenchRow {
    EpisodeMetrics metrics;
    std::uint64_t seed = 0;
};

struct BenchOptions {
    std::vector<std::string> modes;
    int trials = 1;
    std::uint64_t seed = 0;
    HarnessConfig config;
    /// Called after every episode (for progress output).
    std::function<void(const BenchRow&)> on_row;
};

/// Seed of one (case, trial): independent of mode so modes face identical randomness.
std::uint64_t trial_seed(std::uint64_t root, const std::string& case_id, int trial);

/// Runs every (case, mode, trial) whose mode fits the case kind, sequentially.
std::vector<BenchRow> run_benchmark(const Suite& suite, const BenchOptions& opts, WorkerPool* pool = nullptr);

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{"case_id",   "trial",          "mode",           "seed",
                                               "actions",   "planning_time_s", "completed",     "grasp_attempts",
                                               "grasp_successes"};
    return cols;
}

/// Header, one row per episode, then one "MEAN" row per mode in first-seen order.
void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

/// Standalone SVG of the scene; with a log, numbered arrows for the executed pushes
/// and moves in execution order. Goals, when present, are drawn as dashed ghosts.
std::string render_svg(const Scene& scene, const std::vector<EpisodeEvent>& log = {});
void render_svg(const Scene& scene, const std::vector<EpisodeEvent>& log, const std::filesystem::path& path);

/// JSON form of an episode log (actions in order with planning times).
nlohmann::json episode_to_json(const EpisodeResult& r);
/// Inverse of episode_to_json for the event list; throws ParseError naming the field.
std::vector<EpisodeEvent> episode_log_from_json(const nlohmann::json& j);

}  // namespace clutter
