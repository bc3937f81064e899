#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "clutter/grasp.hpp"
#include "clutter/motion_planner.hpp"
#include "clutter/sampling.hpp"
#include "clutter/search_tree.hpp"

namespace clutter {

class PlanningError : public Error {
public:
    using Error::Error;
};

struct RetrievalConfig {
    double gamma = 0.8;
    int d_T = 7;  // tree depth cap
    int d_s = 3;  // rollout depth
    /// Threshold at which a simulated state counts as graspable.
    double r_c = 0.9;
    /// Threshold at which the episode grasps instead of planning a push.
    double r_g = 0.8;
    /// Rollouts stop once the grasp score reaches this value.
    double r_gp = 1.0;
    /// Bonus weight of the grasp score in state rewards.
    double delta = 0.2;
    /// Drop the delta term (strict 0/1 terminal rewards).
    bool binary_reward = false;
    /// Expansion budget per planning step; 0 means unlimited.
    int max_expansions = 150;
    /// Wall-clock budget per planning step in seconds; 0 means unlimited.
    double time_budget_s = 0.0;
    int max_episode_actions = 16;
    /// Greedy planner grasps right away above this score.
    double greedy_grasp_threshold = 0.7;
    SelectionPolicy policy{ScoreVariant::ucb1, 0.3, 3, 0};
    std::uint64_t seed = 0;
    SamplerConfig sampler;
    PushSimConfig physics;
    GripperModel gripper;
};

/// 0 when out of bounds; otherwise 1 (if graspable at r_c) plus delta * score.
double retrieval_reward(double grasp_score, bool out_of_bounds, const RetrievalConfig& cfg);

/// Scores a push by its simulated successor; values lie in [0, 1 + delta].
using PriorFn = std::function<double(const SceneState& before, const PushAction& push, const SceneState& after)>;

/// 1 - (obstacle area within 1.5 target diameters of the target centroid) / (disc area),
/// evaluated on the successor.
double clearance_prior(const SceneState& after);
PriorFn default_prior();

struct RetrievalPayload {
    std::shared_ptr<const SceneState> state;
    double grasp_score = 0.0;
    bool graspable = false;
    /// Guided search: simulated successor for every untried action, in the same order.
    std::vector<std::shared_ptr<const SceneState>> successors;
    std::vector<double> priors;
};

using RetrievalTree = SearchTree<PushAction, RetrievalPayload>;

struct StepResult {
    std::optional<PushAction> action;
    /// No root child carried any reward; the action is the child with the best grasp score.
    bool least_bad = false;
    bool early_stopped = false;
    bool exhausted = false;
    int expansions = 0;
    int iterations = 0;
    double elapsed_s = 0.0;
};

/// Simulation request for one newly expanded node.
struct RolloutRequest {
    std::shared_ptr<const SceneState> state;
    int horizon = 0;
    /// Reward of the node's own state; the result never drops below it.
    double base_reward = 0.0;
};

struct SimulationReport {
    std::vector<double> rewards;
    std::vector<int> rollouts;
    /// Node served by each environment at the first lockstep step (-1 when idle).
    std::vector<int> initial_assignment;
    int lockstep_steps = 0;
    int env_steps = 0;
};

/// Rollouts for a batch of nodes on `n_envs` environments advanced in lockstep.
/// Environments are dealt round-robin over the nodes that need simulation, so spare
/// environments replicate rollouts; an environment whose rollout ends early starts a
/// new one for the same node while lockstep steps remain. Each rollout draws from
/// its own stream seeded by (seed, iteration, environment, rollout ordinal).
/// A node's reward is the max over its rollouts and its base reward.
SimulationReport simulate_batch(const std::vector<RolloutRequest>& requests, std::size_t n_envs,
                                std::uint64_t iteration, const RetrievalConfig& cfg, WorkerPool* pool = nullptr,
                                const PriorFn* prior = nullptr);

/// One planning step of tree search from `root`. The serial loop expands one node
/// per iteration; the batched loop selects up to n_envs nodes per iteration with
/// virtual loss and simulates them together. Both share every other component, so
/// the batched loop with one environment reproduces the serial tree exactly.
class RetrievalSearch {
public:
    RetrievalSearch(const SceneState& root, const RetrievalConfig& cfg, PriorFn prior = {});

    StepResult run_serial();
    StepResult run_batched(std::size_t n_envs, WorkerPool* pool = nullptr);

    const RetrievalTree& tree() const { return tree_; }
    int es_level() const { return es_level_; }
    std::optional<int> min_graspable_depth() const { return min_graspable_depth_; }
    int depth_cap() const { return depth_cap_; }

private:
    struct Expansion;

    Expansion expand(int parent, const RetrievalTree::Selection& sel) const;
    int attach(int parent, const RetrievalTree::Selection& sel, Expansion&& e);
    RolloutRequest rollout_request(int node) const;
    void lower_depth_cap(int depth);
    void advance_es_level();
    bool should_stop(const StepResult& r, double elapsed) const;
    StepResult finish(StepResult r) const;
    RetrievalPayload make_payload(std::shared_ptr<const SceneState> state, bool expandable,
                                  std::vector<PushAction>& untried) const;

    RetrievalConfig cfg_;
    PriorFn prior_;
    bool guided_ = false;
    RetrievalTree tree_;
    int depth_cap_;
    int es_level_ = 1;
    std::optional<int> min_graspable_depth_;
};

/// Serial tree search with the configured policy.
StepResult serial_mcts_step(const SceneState& state, const RetrievalConfig& cfg);

/// Prior-guided search: guided scoring (m = 3, C = 0), untried actions sorted by prior,
/// prior-weighted rollouts, tree depth capped at 3, final action by prior + best reward.
StepResult guided_mcts_step(const SceneState& state, const RetrievalConfig& cfg, PriorFn prior = default_prior());

using RetrievalDecision = std::variant<GraspAction, PushAction>;

/// One-step lookahead: push when gamma * (successor grasp score) beats the current
/// score, grasp otherwise. nullopt when a push is wanted but none can be sampled.
std::optional<RetrievalDecision> greedy_lookahead_step(const SceneState& state, const RetrievalConfig& cfg,
                                                       WorkerPool* pool = nullptr);

enum class RetrievalMode { greedy, serial, guided, pmbs };
std::string to_string(RetrievalMode m);
RetrievalMode retrieval_mode_from_string(const std::string& s);

struct EpisodeMetrics {
    std::string case_id;
    int trial = 0;
    std::string mode;
    int actions = 0;
    double planning_time_s = 0.0;
    bool completed = false;
    int grasp_attempts = 0;
    int grasp_successes = 0;
};

struct EpisodeEvent {
    std::variant<GraspAction, PushAction, PickPlaceAction, PushTrajectory> action;
    double planning_time_s = 0.0;
    bool success = true;
};

struct EpisodeResult {
    EpisodeMetrics metrics;
    std::vector<EpisodeEvent> log;
    SceneState final_state;
};

/// Retrieval settings for the episode runner; n_envs is used by the parallel planner
/// (0 = four per worker).
struct RetrievalRun {
    RetrievalMode mode = RetrievalMode::pmbs;
    RetrievalConfig cfg;
    std::size_t n_envs = 0;
};

/// Perceive, check for a grasp, plan, act; until the target is grasped, something
/// leaves the workspace, the planner fails, or the action limit is reached. A grasp
/// succeeds iff its configuration is collision-free.
EpisodeResult run_retrieval_episode(const SceneState& state, const RetrievalRun& run, WorkerPool* pool = nullptr);

}  // namespace clutter
