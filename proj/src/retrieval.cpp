#include <chrono>

#include "clutter/pmbs.hpp"
#include "clutter/rng.hpp"

namespace clutter {

std::optional<RetrievalDecision> greedy_lookahead_step(const SceneState& state, const RetrievalConfig& cfg,
                                                       WorkerPool* pool) {
    if (!state.target_id) throw ValidationError("retrieval needs a target_id");
    const int target = *state.target_id;
    const double current = grasp_score(state, target, cfg.gripper);
    auto grasp_decision = [&]() -> std::optional<RetrievalDecision> {
        if (auto g = best_grasp(state, target, cfg.gripper)) return RetrievalDecision{*g};
        return std::nullopt;
    };
    if (current > cfg.greedy_grasp_threshold) return grasp_decision();

    const auto pushes = sample_retrieval_pushes(state, cfg.sampler);
    std::vector<double> values(pushes.size(), -1.0);
    auto evaluate = [&](std::size_t i) {
        try {
            const SceneState next = step_push(state, pushes[i], cfg.physics);
            values[i] = next.out_of_bounds ? 0.0 : cfg.gamma * grasp_score(next, target, cfg.gripper);
        } catch (const InvalidAction&) {
        }
    };
    if (pool) {
        pool->parallel_for(pushes.size(), evaluate);
    } else {
        for (std::size_t i = 0; i < pushes.size(); ++i) evaluate(i);
    }
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pushes.size(); ++i) {
        if (values[i] >= 0.0 && (!best || values[i] > values[*best])) best = i;
    }
    if (best && values[*best] > current) return RetrievalDecision{pushes[*best]};
    if (auto g = grasp_decision()) return g;
    // Nothing to grasp: attempt the grasp anyway when pushing cannot help either way,
    // otherwise fall back to the best push.
    if (best) return RetrievalDecision{pushes[*best]};
    if (cfg.gamma == 0.0) return RetrievalDecision{GraspAction{state.at(target).centroid(), 0, cfg.gripper.angle_count}};
    return std::nullopt;
}

std::string to_string(RetrievalMode m) {
    switch (m) {
        case RetrievalMode::greedy: return "greedy";
        case RetrievalMode::serial: return "serial";
        case RetrievalMode::guided: return "guided";
        case RetrievalMode::pmbs: return "pmbs";
    }
    return "?";
}

RetrievalMode retrieval_mode_from_string(const std::string& s) {
    if (s == "greedy") return RetrievalMode::greedy;
    if (s == "serial") return RetrievalMode::serial;
    if (s == "guided") return RetrievalMode::guided;
    if (s == "pmbs") return RetrievalMode::pmbs;
    throw std::invalid_argument("unknown retrieval mode '" + s + "'");
}

EpisodeResult run_retrieval_episode(const SceneState& state, const RetrievalRun& run, WorkerPool* pool) {
    using Clock = std::chrono::steady_clock;
    if (!state.target_id) throw ValidationError("retrieval needs a target_id");
    const int target = *state.target_id;
    EpisodeResult res;
    res.metrics.mode = to_string(run.mode);
    SceneState s = state;

    while (res.metrics.actions < run.cfg.max_episode_actions) {
        RetrievalConfig cfg = run.cfg;
        cfg.seed = derive_seed(run.cfg.seed, {static_cast<std::uint64_t>(res.metrics.actions)});
        const auto t0 = Clock::now();
        std::optional<RetrievalDecision> decision;
        if (run.mode == RetrievalMode::greedy) {
            decision = greedy_lookahead_step(s, cfg, pool);
        } else if (is_graspable(s, target, cfg.r_g, cfg.gripper)) {
            if (auto g = best_grasp(s, target, cfg.gripper)) decision = RetrievalDecision{*g};
        } else {
            StepResult step;
            if (run.mode == RetrievalMode::serial) {
                step = serial_mcts_step(s, cfg);
            } else if (run.mode == RetrievalMode::guided) {
                step = guided_mcts_step(s, cfg);
            } else {
                PmbsConfig p;
                static_cast<RetrievalConfig&>(p) = cfg;
                if (p.policy.variant == ScoreVariant::ucb1) p.policy.variant = ScoreVariant::ucb_virtual;
                p.n_envs = run.n_envs;
                step = pmbs_step(s, p, pool);
            }
            if (step.action) decision = RetrievalDecision{*step.action};
        }
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        res.metrics.planning_time_s += dt;
        if (!decision) break;

        ++res.metrics.actions;
        if (const auto* g = std::get_if<GraspAction>(&*decision)) {
            ++res.metrics.grasp_attempts;
            const bool ok = grasp_is_feasible(s, target, *g, cfg.gripper);
            res.log.push_back({*g, dt, ok});
            if (ok) {
                ++res.metrics.grasp_successes;
                res.metrics.completed = true;
                break;
            }
            continue;
        }
        const PushAction& push = std::get<PushAction>(*decision);
        try {
            s = step_push(s, push, cfg.physics);
        } catch (const InvalidAction&) {
            res.log.push_back({push, dt, false});
            break;
        }
        res.log.push_back({push, dt, !s.out_of_bounds});
        if (s.out_of_bounds) break;
    }
    res.final_state = std::move(s);
    return res;
}

}  // namespace clutter
