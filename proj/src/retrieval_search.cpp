#include <algorithm>
#include <chrono>
#include <numeric>

#include "clutter/pmbs.hpp"

namespace clutter {

double retrieval_reward(double grasp_score, bool out_of_bounds, const RetrievalConfig& cfg) {
    if (out_of_bounds) return 0.0;
    const double base = is_graspable(grasp_score, cfg.r_c) ? 1.0 : 0.0;
    return cfg.binary_reward ? base : base + cfg.delta * grasp_score;
}

namespace {

double polygon_area(const std::vector<Vec2>& pts) {
    double a = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) a += cross(pts[i], pts[(i + 1) % pts.size()]);
    return a / 2.0;
}

constexpr int kDiscSides = 48;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

double clearance_prior(const SceneState& after) {
    if (!after.target_id || after.out_of_bounds) return 0.0;
    const ObjectState& target = after.at(*after.target_id);
    const Vec2 c = target.centroid();
    const double r = 1.5 * 2.0 * target.shape().radius();
    // Circumscribed polygon: its edges are tangent to the disc.
    const double apothem = r;
    double covered = 0.0;
    for (const ObjectState& o : after.objects) {
        if (o.id() == target.id() || !o.bounds().overlaps(Rect{c.x - r, c.y - r, c.x + r, c.y + r})) continue;
        for (const ConvexPolygon& part : o.footprint()) {
            std::vector<Vec2> pts(part.vertices().begin(), part.vertices().end());
            for (int k = 0; k < kDiscSides && !pts.empty(); ++k) {
                const Vec2 n = unit_from_angle(2.0 * kPi * k / kDiscSides);
                pts = clip_to_slab(pts, n, -std::numeric_limits<double>::infinity(), dot(n, c) + apothem);
            }
            if (pts.size() >= 3) covered += polygon_area(pts);
        }
    }
    const double disc = kDiscSides * apothem * apothem * std::tan(kPi / kDiscSides);
    return std::clamp(1.0 - covered / disc, 0.0, 1.0);
}

PriorFn default_prior() {
    return [](const SceneState&, const PushAction&, const SceneState& after) { return clearance_prior(after); };
}

struct RetrievalSearch::Expansion {
    RetrievalPayload payload;
    std::vector<PushAction> untried;
    double reward = 0.0;
    bool terminal = false;
    double prior = 0.0;
};

RetrievalSearch::RetrievalSearch(const SceneState& root, const RetrievalConfig& cfg, PriorFn prior)
    : cfg_(cfg),
      prior_(std::move(prior)),
      guided_(cfg.policy.variant == ScoreVariant::guided),
      tree_(static_cast<std::size_t>(std::max(cfg.policy.m, 100))),
      depth_cap_(cfg.d_T) {
    if (!root.target_id) throw ValidationError("retrieval needs a target_id");
    if (guided_ && !prior_) prior_ = default_prior();
    std::vector<PushAction> untried;
    auto payload = make_payload(std::make_shared<const SceneState>(root), depth_cap_ > 0, untried);
    const double reward = retrieval_reward(payload.grasp_score, root.out_of_bounds, cfg_);
    tree_.add_root(std::move(payload), std::move(untried), reward, false);
}

RetrievalPayload RetrievalSearch::make_payload(std::shared_ptr<const SceneState> state, bool expandable,
                                               std::vector<PushAction>& untried) const {
    RetrievalPayload p;
    p.grasp_score = grasp_score(*state, *state->target_id, cfg_.gripper);
    p.graspable = is_graspable(p.grasp_score, cfg_.r_c);
    p.state = std::move(state);
    untried.clear();
    if (!expandable || p.state->out_of_bounds) return p;
    untried = sample_retrieval_pushes(*p.state, cfg_.sampler);
    if (!guided_) return p;

    std::vector<std::shared_ptr<const SceneState>> next(untried.size());
    std::vector<double> priors(untried.size(), 0.0);
    for (std::size_t i = 0; i < untried.size(); ++i) {
        try {
            next[i] = std::make_shared<const SceneState>(step_push(*p.state, untried[i], cfg_.physics));
            priors[i] = prior_(*p.state, untried[i], *next[i]);
        } catch (const InvalidAction&) {
            next[i] = nullptr;
        }
    }
    std::vector<std::size_t> order(untried.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return priors[a] > priors[b]; });
    std::vector<PushAction> sorted;
    for (std::size_t i : order) {
        sorted.push_back(untried[i]);
        p.successors.push_back(next[i]);
        p.priors.push_back(priors[i]);
    }
    untried = std::move(sorted);
    return p;
}

RetrievalSearch::Expansion RetrievalSearch::expand(int parent, const RetrievalTree::Selection& sel) const {
    const RetrievalTree::Node& pn = tree_.node(parent);
    std::shared_ptr<const SceneState> next;
    double prior = 0.0;
    if (guided_ && sel.action_index < pn.payload.successors.size()) {
        next = pn.payload.successors[sel.action_index];
        prior = pn.payload.priors[sel.action_index];
    } else {
        try {
            next = std::make_shared<const SceneState>(step_push(*pn.payload.state, sel.action, cfg_.physics));
        } catch (const InvalidAction&) {
        }
    }
    Expansion e;
    e.prior = prior;
    if (!next) {
        // A push that cannot be executed leads nowhere.
        e.payload.state = pn.payload.state;
        e.terminal = true;
        return e;
    }
    const int depth = pn.depth + 1;
    e.payload = make_payload(next, depth < depth_cap_, e.untried);
    e.terminal = e.payload.graspable || next->out_of_bounds;
    if (e.terminal) e.untried.clear();
    e.reward = retrieval_reward(e.payload.grasp_score, next->out_of_bounds, cfg_);
    return e;
}

int RetrievalSearch::attach(int parent, const RetrievalTree::Selection& sel, Expansion&& e) {
    const bool graspable = e.payload.graspable && !e.payload.state->out_of_bounds;
    const int id = tree_.add_child(parent, sel.action, std::move(e.payload), std::move(e.untried), e.reward,
                                   e.terminal, e.prior);
    const int depth = tree_.node(id).depth;
    if (graspable) {
        if (!min_graspable_depth_ || depth < *min_graspable_depth_) min_graspable_depth_ = depth;
        lower_depth_cap(depth);
    }
    if (depth >= depth_cap_ && !tree_.node(id).fully_expanded()) tree_.close(id);
    return id;
}

void RetrievalSearch::lower_depth_cap(int depth) {
    if (depth >= depth_cap_) return;
    depth_cap_ = depth;
    for (std::size_t i = 0; i < tree_.size(); ++i) {
        const auto& nd = tree_.node(static_cast<int>(i));
        if (nd.depth >= depth_cap_ && !nd.fully_expanded()) tree_.close(static_cast<int>(i));
    }
}

RolloutRequest RetrievalSearch::rollout_request(int node) const {
    const auto& nd = tree_.node(node);
    RolloutRequest req;
    req.state = nd.payload.state;
    req.base_reward = nd.node_reward;
    req.horizon = nd.terminal ? 0 : std::max(0, std::min(cfg_.d_s, depth_cap_ - nd.depth));
    return req;
}

void RetrievalSearch::advance_es_level() {
    while (es_level_ < cfg_.d_T) {
        const int level = es_level_ - 1;
        bool done = true;
        for (const auto& nd : tree_.nodes()) {
            if (nd.depth == level && !nd.terminal && !nd.fully_expanded()) {
                done = false;
                break;
            }
        }
        if (!done) break;
        ++es_level_;
    }
}

bool RetrievalSearch::should_stop(const StepResult& r, double elapsed) const {
    if (cfg_.max_expansions > 0 && r.expansions >= cfg_.max_expansions) return true;
    if (cfg_.max_expansions <= 0 && cfg_.time_budget_s <= 0.0) return true;
    if (cfg_.time_budget_s > 0.0 && elapsed >= cfg_.time_budget_s) return true;
    if (tree_.exhausted()) return true;
    return min_graspable_depth_ && *min_graspable_depth_ <= es_level_;
}

StepResult RetrievalSearch::finish(StepResult r) const {
    r.exhausted = tree_.exhausted();
    r.early_stopped = min_graspable_depth_ && *min_graspable_depth_ <= es_level_;
    SelectionPolicy exploit = cfg_.policy;
    exploit.c = 0.0;
    if (exploit.variant == ScoreVariant::uct_top_m) exploit.m = 1;
    const auto best = tree_.best_child(0, exploit);
    if (!best) {
        r.least_bad = true;
        return r;
    }
    const auto& root = tree_.node(0);
    const bool any_reward = std::any_of(root.children.begin(), root.children.end(),
                                        [&](int c) { return tree_.node(c).rewards.max() > 0.0; });
    int chosen = *best;
    if (!any_reward) {
        r.least_bad = true;
        for (int c : root.children) {
            if (tree_.node(c).payload.grasp_score > tree_.node(chosen).payload.grasp_score) chosen = c;
        }
    }
    r.action = tree_.node(chosen).action;
    return r;
}

StepResult RetrievalSearch::run_serial() {
    const auto t0 = Clock::now();
    StepResult r;
    advance_es_level();
    const PriorFn* prior = guided_ ? &prior_ : nullptr;
    while (!should_stop(r, seconds_since(t0))) {
        auto sel = tree_.select_leaf(cfg_.policy);
        if (!sel) break;
        const int id = attach(sel->node, *sel, expand(sel->node, *sel));
        ++r.expansions;
        const auto rep = simulate_batch({rollout_request(id)}, 1, static_cast<std::uint64_t>(r.iterations), cfg_,
                                        nullptr, prior);
        tree_.backpropagate(id, rep.rewards[0], BackupMode::max, cfg_.gamma);
        advance_es_level();
        ++r.iterations;
    }
    r.elapsed_s = seconds_since(t0);
    return finish(r);
}

StepResult RetrievalSearch::run_batched(std::size_t n_envs, WorkerPool* pool) {
    const auto t0 = Clock::now();
    StepResult r;
    n_envs = std::max<std::size_t>(n_envs, 1);
    advance_es_level();
    const PriorFn* prior = guided_ ? &prior_ : nullptr;
    while (!should_stop(r, seconds_since(t0))) {
        std::size_t batch = n_envs;
        if (cfg_.max_expansions > 0) {
            batch = std::min(batch, static_cast<std::size_t>(cfg_.max_expansions - r.expansions));
        }
        const auto sels = tree_.select_batch(cfg_.policy, batch);
        if (sels.empty()) break;

        // Batched expansion: all successor states in one simulator batch.
        std::vector<Expansion> exps(sels.size());
        std::vector<std::size_t> to_sim;
        for (std::size_t i = 0; i < sels.size(); ++i) {
            const auto& pn = tree_.node(sels[i].node);
            if (!(guided_ && sels[i].action_index < pn.payload.successors.size())) to_sim.push_back(i);
        }
        std::vector<std::shared_ptr<const SceneState>> next(sels.size());
        if (!to_sim.empty()) {
            SimBatch batch_in;
            std::vector<std::optional<PushAction>> actions;
            for (std::size_t i : to_sim) {
                batch_in.states.push_back(*tree_.node(sels[i].node).payload.state);
                actions.emplace_back(sels[i].action);
            }
            try {
                SimBatch out = step_batch(batch_in, actions, cfg_.physics, pool);
                for (std::size_t k = 0; k < to_sim.size(); ++k) {
                    next[to_sim[k]] = std::make_shared<const SceneState>(std::move(out.states[k]));
                }
            } catch (const InvalidAction&) {
                // Fall back to per-node expansion, which marks the failing pushes.
            }
        }
        auto work = [&](std::size_t i) {
            const auto& sel = sels[i];
            if (!next[i]) {
                exps[i] = expand(sel.node, sel);
                return;
            }
            const auto& pn = tree_.node(sel.node);
            Expansion e;
            e.payload = make_payload(next[i], pn.depth + 1 < depth_cap_, e.untried);
            e.terminal = e.payload.graspable || next[i]->out_of_bounds;
            if (e.terminal) e.untried.clear();
            e.reward = retrieval_reward(e.payload.grasp_score, next[i]->out_of_bounds, cfg_);
            exps[i] = std::move(e);
        };
        if (pool) {
            pool->parallel_for(sels.size(), work);
        } else {
            for (std::size_t i = 0; i < sels.size(); ++i) work(i);
        }

        std::vector<int> ids;
        for (std::size_t i = 0; i < sels.size(); ++i) ids.push_back(attach(sels[i].node, sels[i], std::move(exps[i])));
        r.expansions += static_cast<int>(ids.size());
        std::vector<RolloutRequest> reqs;
        for (int id : ids) reqs.push_back(rollout_request(id));
        const auto rep = simulate_batch(reqs, n_envs, static_cast<std::uint64_t>(r.iterations), cfg_, pool, prior);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            tree_.backpropagate(ids[i], rep.rewards[i], BackupMode::max, cfg_.gamma);
        }
        advance_es_level();
        ++r.iterations;
    }
    r.elapsed_s = seconds_since(t0);
    return finish(r);
}

StepResult serial_mcts_step(const SceneState& state, const RetrievalConfig& cfg) {
    RetrievalSearch search(state, cfg);
    return search.run_serial();
}

StepResult guided_mcts_step(const SceneState& state, const RetrievalConfig& cfg, PriorFn prior) {
    RetrievalConfig g = cfg;
    g.policy = SelectionPolicy{ScoreVariant::guided, 0.0, 3, 0};
    g.d_T = std::min(g.d_T, 3);
    RetrievalSearch search(state, g, std::move(prior));
    return search.run_serial();
}

}  // namespace clutter
