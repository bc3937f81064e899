#include "clutter/pmbs.hpp"

#include <algorithm>
#include <cmath>

#include "clutter/rng.hpp"

namespace clutter {

namespace {

constexpr int kGuidedRolloutCandidates = 4;

struct Env {
    int request = -1;
    std::uint64_t ordinal = 0;
    Rng rng{0};
    SceneState state;
    int t = 0;
    int horizon = 0;
    double best = 0.0;
    bool active = false;
    // Per-step scratch.
    std::optional<PushAction> action;
    std::optional<SceneState> chosen;  // guided rollouts simulate while choosing
};

template <class F>
void for_each_index(WorkerPool* pool, std::size_t n, F&& f) {
    if (pool) {
        pool->parallel_for(n, f);
    } else {
        for (std::size_t i = 0; i < n; ++i) f(i);
    }
}

}  // namespace

SimulationReport simulate_batch(const std::vector<RolloutRequest>& requests, std::size_t n_envs,
                                std::uint64_t iteration, const RetrievalConfig& cfg, WorkerPool* pool,
                                const PriorFn* prior) {
    n_envs = std::max<std::size_t>(n_envs, 1);
    SimulationReport rep;
    rep.rewards.resize(requests.size());
    rep.rollouts.assign(requests.size(), 0);
    rep.initial_assignment.assign(n_envs, -1);
    std::vector<int> pending;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        rep.rewards[i] = requests[i].base_reward;
        if (requests[i].horizon > 0 && requests[i].state && !requests[i].state->out_of_bounds) {
            pending.push_back(static_cast<int>(i));
        }
    }

    // More nodes than environments are served in consecutive waves.
    for (std::size_t wave = 0; wave * n_envs < pending.size(); ++wave) {
        const std::size_t first = wave * n_envs;
        const std::size_t k = std::min(n_envs, pending.size() - first);
        std::vector<Env> envs(n_envs);
        int max_h = 0;
        auto start = [&](std::size_t e, int request, int steps_left) {
            Env& env = envs[e];
            env.request = request;
            env.rng = Rng(derive_seed(cfg.seed, {iteration, wave, e, env.ordinal}));
            env.state = *requests[static_cast<std::size_t>(request)].state;
            env.t = 0;
            env.horizon = std::min(requests[static_cast<std::size_t>(request)].horizon, steps_left);
            env.best = 0.0;
            env.active = env.horizon > 0;
        };
        for (std::size_t e = 0; e < n_envs; ++e) {
            const int request = pending[first + e % k];
            max_h = std::max(max_h, requests[static_cast<std::size_t>(request)].horizon);
            if (wave == 0) rep.initial_assignment[e] = request;
        }
        for (std::size_t e = 0; e < n_envs; ++e) start(e, pending[first + e % k], max_h);

        for (int step = 0; step < max_h; ++step) {
            std::vector<std::size_t> live;
            for (std::size_t e = 0; e < n_envs; ++e) {
                if (envs[e].active) live.push_back(e);
            }
            if (live.empty()) break;
            ++rep.lockstep_steps;
            rep.env_steps += static_cast<int>(live.size());

            // Choose the next push in every environment.
            for_each_index(pool, live.size(), [&](std::size_t i) {
                Env& env = envs[live[i]];
                env.action.reset();
                env.chosen.reset();
                const auto pushes = sample_retrieval_pushes(env.state, cfg.sampler);
                if (pushes.empty()) return;
                if (!prior) {
                    env.action = pushes[env.rng.index(pushes.size())];
                    return;
                }
                double best = -1.0;
                for (int c = 0; c < kGuidedRolloutCandidates; ++c) {
                    const PushAction& a = pushes[env.rng.index(pushes.size())];
                    try {
                        SceneState next = step_push(env.state, a, cfg.physics);
                        const double v = (*prior)(env.state, a, next);
                        if (v > best) {
                            best = v;
                            env.action = a;
                            env.chosen = std::move(next);
                        }
                    } catch (const InvalidAction&) {
                    }
                }
            });

            // Advance all environments that pushed in one simulator batch.
            SimBatch batch;
            std::vector<std::optional<PushAction>> actions;
            std::vector<std::size_t> stepped;
            for (std::size_t e : live) {
                if (envs[e].action && !envs[e].chosen) {
                    batch.states.push_back(envs[e].state);
                    actions.push_back(envs[e].action);
                    stepped.push_back(e);
                }
            }
            std::vector<std::optional<SceneState>> results(stepped.size());
            try {
                SimBatch out = step_batch(batch, actions, cfg.physics, pool);
                for (std::size_t j = 0; j < stepped.size(); ++j) results[j] = std::move(out.states[j]);
            } catch (const InvalidAction&) {
                for (std::size_t j = 0; j < stepped.size(); ++j) {
                    try {
                        results[j] = step_push(batch.states[j], *actions[j], cfg.physics);
                    } catch (const InvalidAction&) {
                    }
                }
            }
            for (std::size_t j = 0; j < stepped.size(); ++j) {
                if (results[j]) {
                    envs[stepped[j]].chosen = std::move(results[j]);
                } else {
                    envs[stepped[j]].action.reset();
                }
            }

            // Score the successors.
            for_each_index(pool, live.size(), [&](std::size_t i) {
                Env& env = envs[live[i]];
                if (!env.chosen) {
                    env.active = false;
                    return;
                }
                env.state = std::move(*env.chosen);
                env.chosen.reset();
                ++env.t;
                const double score = grasp_score(env.state, *env.state.target_id, cfg.gripper);
                const double r = std::pow(cfg.gamma, env.t) * retrieval_reward(score, env.state.out_of_bounds, cfg);
                env.best = std::max(env.best, r);
                if (env.state.out_of_bounds || is_graspable(score, cfg.r_c) || score >= cfg.r_gp ||
                    env.t >= env.horizon) {
                    env.active = false;
                }
            });

            // Fold finished rollouts and re-purpose their environments.
            for (std::size_t e : live) {
                Env& env = envs[e];
                if (env.active) continue;
                const auto req = static_cast<std::size_t>(env.request);
                rep.rewards[req] = std::max(rep.rewards[req], env.best);
                ++rep.rollouts[req];
                if (step + 1 < max_h) {
                    ++env.ordinal;
                    start(e, env.request, max_h - step - 1);
                }
            }
        }
        // Rollouts cut by the lockstep limit still count.
        for (Env& env : envs) {
            if (!env.active) continue;
            const auto req = static_cast<std::size_t>(env.request);
            rep.rewards[req] = std::max(rep.rewards[req], env.best);
            ++rep.rollouts[req];
        }
    }
    return rep;
}

std::size_t resolve_env_count(std::size_t n_envs, const WorkerPool* pool) {
    if (n_envs > 0) return n_envs;
    return 4 * (pool ? pool->size() : 1);
}

StepResult pmbs_step(const SceneState& state, const PmbsConfig& cfg, WorkerPool* pool) {
    RetrievalSearch search(state, cfg);
    return search.run_batched(resolve_env_count(cfg.n_envs, pool), pool);
}

}  // namespace clutter
