#include "clutter/remp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "clutter/pmbs.hpp"
#include "clutter/rng.hpp"

namespace clutter {

double object_goal_reward(const ObjectState& obj, const RempRewardConfig& cfg) {
    return obj.movability() == Movability::push_only ? cfg.push_only_multiplier * cfg.r_o : cfg.r_o;
}

double at_goal_reward(const SceneState& state, const RempGoal& goal, const RempRewardConfig& cfg) {
    double r = 0.0;
    for (const ObjectState& o : state.objects) {
        if (goal.poses.count(o.id()) && goal.object_at_goal(o)) r += object_goal_reward(o, cfg);
    }
    return r;
}

double goal_reward(const RempGoal& goal, const RempRewardConfig& cfg) {
    return 2.0 * cfg.r_o * static_cast<double>(goal.poses.size());
}

double state_reward(const SceneState& state, const RempGoal& goal, double cost_so_far, double base_reward,
                    const RempRewardConfig& cfg) {
    const double r = goal.reached(state) ? goal_reward(goal, cfg) : at_goal_reward(state, goal, cfg);
    return std::max(0.0, r - cost_so_far - base_reward);
}

double rollout_return(std::span<const double> trace, const RempRewardConfig& cfg) {
    if (trace.empty()) return 0.0;
    const std::size_t m = trace.size();
    double v = trace[m - 1];
    if (m > 1) v = std::max(v, cfg.beta * *std::max_element(trace.begin(), trace.end() - 1));
    return v * std::pow(cfg.gamma, static_cast<double>(m));
}

double theta_sim(int depth, const ThetaSchedule& s) {
    const double d = depth;
    return std::max(s.c0 + s.c1 * d + s.c2 * d * d, s.floor);
}

int resolved_object(const ResolvedAction& a) {
    return std::visit([](const auto& x) { return x.object_id; }, a);
}

double action_cost(const ResolvedAction& a, const RempRewardConfig& cfg) {
    if (const auto* pp = std::get_if<PickPlaceAction>(&a)) {
        return distance(pp->pick.position(), pp->place.position()) + cfg.pick_place_fixed_cost;
    }
    return std::get<PushTrajectory>(a).path_length() + cfg.push_fixed_cost;
}

SceneState apply_resolved(const SceneState& state, const ResolvedAction& a) {
    if (const auto* pp = std::get_if<PickPlaceAction>(&a)) return apply_pick_place(state, pp->object_id, pp->place);
    const auto& t = std::get<PushTrajectory>(a);
    return apply_push_trajectory(state, t.object_id, t.waypoints);
}

std::optional<ResolvedAction> resolve_action(const SceneState& state, const RempAction& a, double rrt_time_s,
                                             std::uint64_t seed) {
    RrtConfig rc;
    rc.time_limit_s = rrt_time_s;
    rc.seed = seed;
    return resolve_action(state, a, rc);
}

std::optional<ResolvedAction> resolve_action(const SceneState& state, const RempAction& a, const RrtConfig& rrt) {
    const int id = action_object(a);
    const ObjectState* obj = state.find(id);
    if (!obj || !placement_is_free(state, id, action_target_pose(a))) return std::nullopt;
    if (const auto* pp = std::get_if<PickPlaceAction>(&a)) {
        if (obj->movability() != Movability::pick_or_push) return std::nullopt;
        return PickPlaceAction{id, obj->pose(), pp->place};
    }
    try {
        if (auto t = rrt_connect(state, id, std::get<PushRequest>(a).final_pose, rrt)) return *t;
    } catch (const InvalidAction&) {
    }
    return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RempAction request_for(const ObjectState& obj, const Pose2& target) {
    if (obj.movability() == Movability::pick_or_push) return PickPlaceAction{obj.id(), obj.pose(), target};
    return PushRequest{obj.id(), target};
}

Pose2 lerp_pose(const Pose2& a, const Pose2& b, double t) {
    return Pose2(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, a.theta + normalize_angle(b.theta - a.theta) * t);
}

bool overlaps_region(std::span<const ConvexPolygon> a, std::span<const ConvexPolygon> b) {
    return separation(a, b) < kClearanceTolerance;
}

struct Candidate {
    ResolvedAction action;
    double cost;
};

void keep_cheapest(std::optional<Candidate>& best, std::optional<ResolvedAction> a, const RempRewardConfig& cfg) {
    if (!a) return;
    const double c = action_cost(*a, cfg);
    if (!best || c < best->cost) best = Candidate{std::move(*a), c};
}

std::optional<HbfsChoice> hbfs_instance(const SceneState& state, const RempGoal& goal, const HbfsConfig& cfg,
                                        std::uint64_t seed) {
    Rng rng(seed);
    auto resolve = [&](const RempAction& a) {
        RrtConfig rc;
        rc.time_limit_s = cfg.rrt_time_s;
        rc.max_samples = cfg.rrt_max_samples;
        rc.seed = rng.bits();
        return resolve_action(state, a, rc);
    };
    const auto displaced = goal.displaced(state);
    if (displaced.empty()) return std::nullopt;

    // Tier 1: straight to a free goal.
    std::optional<Candidate> best;
    for (int id : displaced) {
        const Pose2& gp = goal.poses.at(id);
        if (!placement_is_free(state, id, gp)) continue;
        keep_cheapest(best, resolve(request_for(state.at(id), gp)), cfg.reward);
    }
    if (best) return HbfsChoice{std::move(best->action), best->cost, 1};

    // Tier 2: move the occupiers of a goal toward their own goals.
    const Rect& ws = state.workspace;
    for (int id : displaced) {
        const auto goal_fp = state.at(id).footprint_at(goal.poses.at(id));
        for (const ObjectState& occ : state.objects) {
            if (occ.id() == id || !overlaps_region(goal_fp, occ.footprint())) continue;
            auto acceptable = [&](const Pose2& p) {
                return placement_is_free(state, occ.id(), p) && !overlaps_region(goal_fp, occ.footprint_at(p));
            };
            auto git = goal.poses.find(occ.id());
            const Pose2 aim = git == goal.poses.end() ? occ.pose() : git->second;
            std::optional<ResolvedAction> moved;
            for (int k = cfg.segment_steps; k >= 1 && !moved; --k) {
                const Pose2 p = lerp_pose(occ.pose(), aim, static_cast<double>(k) / cfg.segment_steps);
                if (acceptable(p)) moved = resolve(request_for(occ, p));
            }
            for (int k = 0; k < cfg.random_attempts && !moved; ++k) {
                const Pose2 p(rng.uniform(ws.min_x, ws.max_x), rng.uniform(ws.min_y, ws.max_y), rng.uniform(-kPi, kPi));
                if (acceptable(p)) moved = resolve(request_for(occ, p));
            }
            keep_cheapest(best, std::move(moved), cfg.reward);
        }
    }
    if (best) return HbfsChoice{std::move(best->action), best->cost, 2};

    // Tier 3: any sampled action.
    SamplerConfig sc = cfg.sampler;
    sc.rng_seed = rng.bits();
    const auto actions = sample_remp_actions(state, goal, RempTier::expansion, sc);
    for (int k = 0; k < cfg.random_attempts && !actions.empty(); ++k) {
        const RempAction& a = actions[rng.index(actions.size())];
        if (auto r = resolve(a)) {
            const double c = action_cost(*r, cfg.reward);
            return HbfsChoice{std::move(*r), c, 3};
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<HbfsChoice> hbfs_step(const SceneState& state, const RempGoal& goal, const HbfsConfig& cfg,
                                    WorkerPool* pool) {
    const int w = std::max(cfg.instances, 1);
    std::vector<std::optional<HbfsChoice>> out(static_cast<std::size_t>(w));
    auto run = [&](std::size_t i) { out[i] = hbfs_instance(state, goal, cfg, derive_seed(cfg.seed, {i})); };
    if (pool && w > 1) {
        pool->parallel_for(out.size(), run);
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) run(i);
    }
    std::optional<HbfsChoice> best;
    for (auto& c : out) {
        if (c && (!best || c->cost < best->cost)) best = std::move(c);
    }
    return best;
}

std::string to_string(EpisodeMode m) { return m == EpisodeMode::step ? "step" : "full"; }

EpisodeMode episode_mode_from_string(const std::string& s) {
    if (s == "step") return EpisodeMode::step;
    if (s == "full") return EpisodeMode::full;
    throw std::invalid_argument("unknown episode mode '" + s + "'");
}

struct PmmrSearch::Expansion {
    RempPayload payload;
    std::vector<RempAction> untried;
    bool terminal = false;
};

PmmrSearch::PmmrSearch(const SceneState& root, const RempGoal& goal, const PmmrConfig& cfg)
    : goal_(goal), cfg_(cfg), tree_(static_cast<std::size_t>(std::max({cfg.policy.m, cfg.policy.q_top_k, 100}))) {
    depth_cap_ = cfg.max_depth > 0 ? cfg.max_depth : 2 * static_cast<int>(goal.poses.size()) + 2;
    lower_bound_ = static_cast<int>(goal.displaced(root).size());
    base_reward_ = at_goal_reward(root, goal, cfg.reward);
    RempPayload p;
    p.state = std::make_shared<const SceneState>(root);
    p.at_goal = goal.reached(root);
    p.reward = state_reward(root, goal, 0.0, base_reward_, cfg.reward);
    auto untried = p.at_goal ? std::vector<RempAction>{} : untried_for(root, derive_seed(cfg.seed, {0}));
    const bool terminal = p.at_goal;
    tree_.add_root(std::move(p), std::move(untried), 0.0, terminal);
    if (terminal) best_goal_node_ = 0;
}

std::vector<RempAction> PmmrSearch::untried_for(const SceneState& state, std::uint64_t seed) const {
    SamplerConfig sc = cfg_.sampler;
    sc.rng_seed = seed;
    return sample_remp_actions(state, goal_, RempTier::expansion, sc);
}

PmmrSearch::Expansion PmmrSearch::expand(const RempTree::Selection& sel, std::uint64_t seed) const {
    const auto& parent = tree_.node(sel.node);
    Expansion e;
    auto resolved = resolve_action(*parent.payload.state, sel.action, cfg_.rrt_tree_time_s, derive_seed(seed, {1}));
    if (!resolved) {
        // Unreachable placement: a dead end worth nothing.
        e.payload.state = parent.payload.state;
        e.payload.cost = parent.payload.cost;
        e.terminal = true;
        return e;
    }
    auto next = std::make_shared<const SceneState>(apply_resolved(*parent.payload.state, *resolved));
    e.payload.cost = parent.payload.cost + action_cost(*resolved, cfg_.reward);
    e.payload.at_goal = goal_.reached(*next);
    e.payload.reward = state_reward(*next, goal_, e.payload.cost, base_reward_, cfg_.reward);
    e.payload.resolved = std::move(resolved);
    e.terminal = e.payload.at_goal || parent.depth + 1 >= depth_cap_;
    if (!e.terminal) e.untried = untried_for(*next, derive_seed(seed, {2}));
    e.payload.state = std::move(next);
    return e;
}

double PmmrSearch::simulate(int node, std::uint64_t seed) const {
    const auto& nd = tree_.node(node);
    std::vector<double> trace{nd.payload.reward};
    if (nd.terminal) return rollout_return(trace, cfg_.reward);
    Rng rng(seed);
    SceneState s = *nd.payload.state;
    double cost = nd.payload.cost;
    for (int depth = nd.depth; depth < depth_cap_ && !goal_.reached(s); ++depth) {
        SamplerConfig sc = cfg_.sampler;
        sc.rng_seed = rng.bits();
        const auto actions = sample_remp_actions(s, goal_, RempTier::simulation, sc);
        if (actions.empty()) break;
        std::vector<std::size_t> to_goal;
        for (std::size_t i = 0; i < actions.size(); ++i) {
            const int id = action_object(actions[i]);
            auto git = goal_.poses.find(id);
            if (git != goal_.poses.end() && !goal_.object_at_goal(s.at(id)) && action_target_pose(actions[i]) == git->second) {
                to_goal.push_back(i);
            }
        }
        std::optional<ResolvedAction> step;
        for (int attempt = 0; attempt < 4 && !step; ++attempt) {
            std::size_t pick;
            if (!to_goal.empty() && !rng.bernoulli(theta_sim(depth, cfg_.theta))) {
                pick = to_goal[rng.index(to_goal.size())];
            } else {
                pick = rng.index(actions.size());
            }
            step = resolve_action(s, actions[pick], cfg_.rrt_rollout_time_s, rng.bits());
        }
        if (!step) break;
        cost += action_cost(*step, cfg_.reward);
        s = apply_resolved(s, *step);
        trace.push_back(state_reward(s, goal_, cost, base_reward_, cfg_.reward));
    }
    return rollout_return(trace, cfg_.reward);
}

std::vector<ResolvedAction> PmmrSearch::path_to(int node) const {
    std::vector<ResolvedAction> out;
    for (int a = node; a > 0; a = tree_.node(a).parent) out.push_back(*tree_.node(a).payload.resolved);
    std::reverse(out.begin(), out.end());
    return out;
}

PmmrPlan PmmrSearch::run(WorkerPool* pool) {
    const auto t0 = Clock::now();
    PmmrPlan plan;
    const std::size_t n_envs = resolve_env_count(cfg_.n_envs, pool);
    auto done = [&] {
        const double el = seconds_since(t0);
        if (tree_.exhausted()) return true;
        if (cfg_.max_expansions > 0 && plan.expansions >= cfg_.max_expansions) return true;
        if (cfg_.max_expansions <= 0 && el >= cfg_.step_budget_s) return true;
        if (cfg_.max_expansions > 0 && cfg_.step_budget_s > 0.0 && el >= cfg_.step_budget_s) return true;
        if (!best_goal_node_) return false;
        if (tree_.node(*best_goal_node_).depth <= lower_bound_) return true;
        return el >= cfg_.goal_plan_patience * cfg_.step_budget_s;
    };
    for (std::uint64_t iteration = 0; !done(); ++iteration) {
        std::size_t batch = n_envs;
        if (cfg_.max_expansions > 0) batch = std::min(batch, static_cast<std::size_t>(cfg_.max_expansions - plan.expansions));
        const auto sels = tree_.select_batch(cfg_.policy, batch);
        if (sels.empty()) break;
        std::vector<Expansion> exps(sels.size());
        auto expand_one = [&](std::size_t i) { exps[i] = expand(sels[i], derive_seed(cfg_.seed, {iteration, i})); };
        if (pool) {
            pool->parallel_for(sels.size(), expand_one);
        } else {
            for (std::size_t i = 0; i < sels.size(); ++i) expand_one(i);
        }
        std::vector<int> ids;
        for (std::size_t i = 0; i < sels.size(); ++i) {
            Expansion& e = exps[i];
            const bool at_goal = e.payload.at_goal;
            const int id = tree_.add_child(sels[i].node, sels[i].action, std::move(e.payload), std::move(e.untried),
                                           0.0, e.terminal);
            ids.push_back(id);
            if (at_goal) {
                const auto& cand = tree_.node(id);
                if (!best_goal_node_) {
                    best_goal_node_ = id;
                } else {
                    const auto& cur = tree_.node(*best_goal_node_);
                    if (cand.depth < cur.depth || (cand.depth == cur.depth && cand.payload.cost < cur.payload.cost)) {
                        best_goal_node_ = id;
                    }
                }
            }
        }
        plan.expansions += static_cast<int>(ids.size());
        std::vector<double> values(ids.size());
        auto sim_one = [&](std::size_t i) { values[i] = simulate(ids[i], derive_seed(cfg_.seed, {iteration, i, 3})); };
        if (pool) {
            pool->parallel_for(ids.size(), sim_one);
        } else {
            for (std::size_t i = 0; i < ids.size(); ++i) sim_one(i);
        }
        for (std::size_t i = 0; i < ids.size(); ++i) tree_.backpropagate(ids[i], values[i], BackupMode::sum, 1.0);
    }

    if (best_goal_node_) {
        plan.actions = path_to(*best_goal_node_);
        plan.reaches_goal = true;
    } else {
        SelectionPolicy exploit = cfg_.policy;
        exploit.c = 0.0;
        for (int cur = 0;;) {
            std::optional<int> best;
            double best_v = -std::numeric_limits<double>::infinity();
            for (int c : tree_.node(cur).children) {
                const auto& ch = tree_.node(c);
                if (!ch.payload.resolved) continue;
                const double v = exploitation_value(exploit, ch.stats());
                if (!best || v > best_v) {
                    best = c;
                    best_v = v;
                }
            }
            if (!best) break;
            plan.actions.push_back(*tree_.node(*best).payload.resolved);
            cur = *best;
        }
    }
    plan.elapsed_s = seconds_since(t0);
    return plan;
}

EpisodeResult run_rearrangement_episode(const SceneState& state, const RempGoal& goal, const RempRun& run,
                                        WorkerPool* pool) {
    EpisodeResult res;
    res.metrics.mode = run.planner == RempRun::Planner::hbfs ? "hbfs" : "pmmr";
    SceneState s = state;
    std::vector<ResolvedAction> queued;
    while (!goal.reached(s) && res.metrics.actions < run.max_actions) {
        const auto step = static_cast<std::uint64_t>(res.metrics.actions);
        const auto t0 = Clock::now();
        std::optional<ResolvedAction> next;
        if (run.planner == RempRun::Planner::hbfs) {
            HbfsConfig hc = run.hbfs;
            hc.seed = derive_seed(run.hbfs.seed, {step});
            if (auto c = hbfs_step(s, goal, hc, pool)) next = std::move(c->action);
        } else {
            if (queued.empty()) {
                PmmrConfig pc = run.pmmr;
                pc.seed = derive_seed(run.pmmr.seed, {step});
                PmmrSearch search(s, goal, pc);
                PmmrPlan plan = search.run(pool);
                if (plan.reaches_goal || run.pmmr.episode_mode == EpisodeMode::full) {
                    queued = std::move(plan.actions);
                } else if (!plan.actions.empty()) {
                    queued.push_back(std::move(plan.actions.front()));
                }
            }
            if (!queued.empty()) {
                next = std::move(queued.front());
                queued.erase(queued.begin());
            }
        }
        double dt = seconds_since(t0);
        if (!next) {
            res.metrics.planning_time_s += dt;
            break;
        }
        // Final resolution: a stale or invalid trajectory is re-planned with the long limit.
        if (auto* traj = std::get_if<PushTrajectory>(&*next); traj && !validate_trajectory(s, *traj)) {
            const auto t1 = Clock::now();
            RrtConfig rc;
            rc.time_limit_s = run.pmmr.rrt_final_time_s;
            rc.seed = derive_seed(run.pmmr.seed, {step, 7});
            std::optional<PushTrajectory> fresh;
            try {
                fresh = rrt_connect(s, traj->object_id, traj->waypoints.back(), rc);
            } catch (const InvalidAction&) {
            }
            dt += seconds_since(t1);
            if (!fresh) {
                res.metrics.planning_time_s += dt;
                break;
            }
            *traj = std::move(*fresh);
            queued.clear();
        }
        res.metrics.planning_time_s += dt;
        try {
            s = apply_resolved(s, *next);
        } catch (const InvalidAction&) {
            break;
        }
        ++res.metrics.actions;
        std::visit([&](const auto& a) { res.log.push_back({a, dt, true}); }, *next);
    }
    res.metrics.completed = goal.reached(s);
    res.final_state = std::move(s);
    return res;
}

}  // namespace clutter
