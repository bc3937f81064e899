#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "clutter/motion_planner.hpp"
#include "clutter/retrieval.hpp"

namespace clutter {

struct RempRewardConfig {
    double r_o = 0.7;
    /// At-goal reward multiplier for push-only objects.
    double push_only_multiplier = 1.1;
    double beta = 0.5;
    double gamma = 0.9;
    double pick_place_fixed_cost = 0.10;
    double push_fixed_cost = 0.20;
};

/// Reward for one object sitting at its goal.
double object_goal_reward(const ObjectState& obj, const RempRewardConfig& cfg);
/// R_o: summed rewards of the objects at their goals.
double at_goal_reward(const SceneState& state, const RempGoal& goal, const RempRewardConfig& cfg);
/// R_g = 2 * r_o * (number of objects with a goal).
double goal_reward(const RempGoal& goal, const RempRewardConfig& cfg);

/// max(0, R - cost_so_far - base_reward), with R = R_g when every object is at its goal
/// and R = R_o otherwise.
double state_reward(const SceneState& state, const RempGoal& goal, double cost_so_far, double base_reward,
                    const RempRewardConfig& cfg);

/// max(beta * max(R_1..R_{m-1}), R_m) * gamma^m; 0 for an empty trace.
double rollout_return(std::span<const double> trace, const RempRewardConfig& cfg);

struct ThetaSchedule {
    double c0 = -0.106;
    double c1 = 0.231;
    double c2 = -0.013;
    double floor = 0.2;
};

/// Probability of a uniformly random rollout action at depth d.
double theta_sim(int depth, const ThetaSchedule& s = {});

/// An action with its motion resolved: pick-n-place, or a dragged trajectory.
using ResolvedAction = std::variant<PickPlaceAction, PushTrajectory>;

int resolved_object(const ResolvedAction& a);
double action_cost(const ResolvedAction& a, const RempRewardConfig& cfg);
SceneState apply_resolved(const SceneState& state, const ResolvedAction& a);

/// Resolves a sampled action on `state`; pushes are planned with RRT-connect using `rrt`.
std::optional<ResolvedAction> resolve_action(const SceneState& state, const RempAction& a, const RrtConfig& rrt);
std::optional<ResolvedAction> resolve_action(const SceneState& state, const RempAction& a, double rrt_time_s,
                                             std::uint64_t seed);

struct HbfsConfig {
    RempRewardConfig reward;
    SamplerConfig sampler;
    double rrt_time_s = 0.2;
    int rrt_max_samples = 20000;
    /// Independent seeded instances; the cheapest proposal wins.
    int instances = 1;
    /// Fractions tried along the segment toward the goal in tier 2.
    int segment_steps = 20;
    int random_attempts = 200;
    std::uint64_t seed = 0;
};

struct HbfsChoice {
    ResolvedAction action;
    double cost = 0.0;
    int tier = 0;
};

/// One best-first decision: tier 1 moves an object straight to a free goal, tier 2
/// clears an occupied goal, tier 3 takes a random sampled action.
std::optional<HbfsChoice> hbfs_step(const SceneState& state, const RempGoal& goal, const HbfsConfig& cfg,
                                    WorkerPool* pool = nullptr);

enum class EpisodeMode { step, full };
std::string to_string(EpisodeMode m);
EpisodeMode episode_mode_from_string(const std::string& s);

struct PmmrConfig {
    RempRewardConfig reward;
    ThetaSchedule theta;
    SamplerConfig sampler;
    SelectionPolicy policy{ScoreVariant::ucb_virtual, 1.5, 3, 100};
    double step_budget_s = 40.0;
    /// Expansion budget per planning step; 0 means unlimited.
    int max_expansions = 0;
    std::size_t n_envs = 0;
    /// Depth cap; 0 means 2N + 2 for N objects.
    int max_depth = 0;
    EpisodeMode episode_mode = EpisodeMode::step;
    double rrt_tree_time_s = 0.2;
    double rrt_rollout_time_s = 0.05;
    double rrt_final_time_s = 2.0;
    /// Once any goal-reaching plan is known, search stops after this fraction of the budget.
    double goal_plan_patience = 0.25;
    std::uint64_t seed = 0;
};

struct RempPayload {
    std::shared_ptr<const SceneState> state;
    double cost = 0.0;
    double reward = 0.0;
    bool at_goal = false;
    /// Resolved motion of the edge from the parent.
    std::optional<ResolvedAction> resolved;
};

using RempTree = SearchTree<RempAction, RempPayload>;

struct PmmrPlan {
    std::vector<ResolvedAction> actions;
    bool reaches_goal = false;
    int expansions = 0;
    double elapsed_s = 0.0;
};

/// Parallel tree search over rearrangement actions. `plan` holds the best action
/// sequence found: the cheapest goal-reaching one (shortest first) when known,
/// otherwise the chain of best children from the root.
class PmmrSearch {
public:
    PmmrSearch(const SceneState& root, const RempGoal& goal, const PmmrConfig& cfg);

    PmmrPlan run(WorkerPool* pool = nullptr);
    const RempTree& tree() const { return tree_; }
    int depth_cap() const { return depth_cap_; }
    double base_reward() const { return base_reward_; }

private:
    struct Expansion;
    Expansion expand(const RempTree::Selection& sel, std::uint64_t seed) const;
    double simulate(int node, std::uint64_t seed) const;
    std::vector<RempAction> untried_for(const SceneState& state, std::uint64_t seed) const;
    std::vector<ResolvedAction> path_to(int node) const;

    RempGoal goal_;
    PmmrConfig cfg_;
    RempTree tree_;
    int depth_cap_ = 0;
    int lower_bound_ = 0;
    double base_reward_ = 0.0;
    std::optional<int> best_goal_node_;
};

struct RempRun {
    enum class Planner { hbfs, pmmr } planner = Planner::pmmr;
    PmmrConfig pmmr;
    HbfsConfig hbfs;
    int max_actions = 20;
};

/// Plans and executes until every object is at its goal, more than max_actions would
/// be needed, or the planner has nothing to offer.
EpisodeResult run_rearrangement_episode(const SceneState& state, const RempGoal& goal, const RempRun& run,
                                        WorkerPool* pool = nullptr);

}  // namespace clutter
