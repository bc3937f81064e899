#include "clutter/harness.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "clutter/rng.hpp"

namespace clutter {

using nlohmann::json;

namespace {

/// Reads known keys of one config object and rejects the rest by name.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError("config: " + path_ + ": expected an object");
    }

    template <class T>
    void get(const std::string& key, T& out) {
        auto it = j_.find(key);
        if (it == j_.end()) return;
        seen_.insert(key);
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ValidationError("config: " + name(key) + ": wrong type");
        }
    }

    template <class E>
    void get_enum(const std::string& key, E& out, E (*parse)(const std::string&)) {
        std::string s;
        get(key, s);
        if (!seen_.count(key)) return;
        try {
            out = parse(s);
        } catch (const std::exception& e) {
            throw ValidationError("config: " + name(key) + ": " + e.what());
        }
    }

    std::optional<Section> sub(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end()) return std::nullopt;
        seen_.insert(key);
        return Section(*it, name(key));
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ValidationError("config: unknown key " + name(key));
        }
    }

private:
    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_policy(Section s, SelectionPolicy& p) {
    s.get_enum("variant", p.variant, &score_variant_from_string);
    // "inf" selects pure exploration.
    json c;
    s.get("c", c);
    if (c.is_number()) {
        p.c = c.get<double>();
    } else if (c == "inf") {
        p.c = std::numeric_limits<double>::infinity();
    } else if (!c.is_null()) {
        throw ValidationError("config: policy.c: expected a number or \"inf\"");
    }
    s.get("m", p.m);
    s.get("q_top_k", p.q_top_k);
    s.finish();
}

void read_sampler(Section s, SamplerConfig& c) {
    s.get("n_contour", c.n_contour);
    s.get("use_pca_pushes", c.use_pca_pushes);
    s.get("push_distance", c.push_distance);
    s.get("pusher_radius", c.pusher_radius);
    s.get("start_gap", c.start_gap);
    s.get("retraction_step", c.retraction_step);
    s.get("max_retraction", c.max_retraction);
    s.get("n_place_random", c.n_place_random);
    s.get("n_place_near", c.n_place_near);
    s.get("grid_enabled", c.grid_enabled);
    s.get("near_sigma", c.near_sigma);
    s.get("near_sigma_angle", c.near_sigma_angle);
    s.finish();
}

void read_reward(Section s, RempRewardConfig& r) {
    s.get("r_o", r.r_o);
    s.get("push_only_multiplier", r.push_only_multiplier);
    s.get("beta", r.beta);
    s.get("gamma", r.gamma);
    s.get("pick_place_fixed_cost", r.pick_place_fixed_cost);
    s.get("push_fixed_cost", r.push_fixed_cost);
    s.finish();
}

json policy_json(const SelectionPolicy& p) {
    json c = std::isinf(p.c) ? json("inf") : json(p.c);
    return {{"variant", to_string(p.variant)}, {"c", c}, {"m", p.m}, {"q_top_k", p.q_top_k}};
}

json sampler_json(const SamplerConfig& c) {
    return {{"n_contour", c.n_contour},         {"use_pca_pushes", c.use_pca_pushes},
            {"push_distance", c.push_distance}, {"pusher_radius", c.pusher_radius},
            {"start_gap", c.start_gap},         {"retraction_step", c.retraction_step},
            {"max_retraction", c.max_retraction}, {"n_place_random", c.n_place_random},
            {"n_place_near", c.n_place_near},   {"grid_enabled", c.grid_enabled},
            {"near_sigma", c.near_sigma},       {"near_sigma_angle", c.near_sigma_angle}};
}

json reward_json(const RempRewardConfig& r) {
    return {{"r_o", r.r_o},
            {"push_only_multiplier", r.push_only_multiplier},
            {"beta", r.beta},
            {"gamma", r.gamma},
            {"pick_place_fixed_cost", r.pick_place_fixed_cost},
            {"push_fixed_cost", r.push_fixed_cost}};
}

}  // namespace

void apply_config(HarnessConfig& cfg, const json& j) {
    Section root(j, "");
    root.get("threads", cfg.threads);
    if (auto s = root.sub("retrieval")) {
        RetrievalConfig& r = cfg.retrieval;
        s->get("gamma", r.gamma);
        s->get("d_T", r.d_T);
        s->get("d_s", r.d_s);
        s->get("r_c", r.r_c);
        s->get("r_g", r.r_g);
        s->get("r_gp", r.r_gp);
        s->get("delta", r.delta);
        s->get("binary_reward", r.binary_reward);
        s->get("max_expansions", r.max_expansions);
        s->get("time_budget_s", r.time_budget_s);
        s->get("max_episode_actions", r.max_episode_actions);
        s->get("greedy_grasp_threshold", r.greedy_grasp_threshold);
        s->get("n_envs", cfg.n_envs);
        if (auto p = s->sub("policy")) read_policy(*p, r.policy);
        if (auto g = s->sub("gripper")) {
            GripperModel& gm = r.gripper;
            g->get("finger_width", gm.finger_width);
            g->get("finger_thickness", gm.finger_thickness);
            g->get("stroke", gm.stroke);
            g->get("clearance", gm.clearance);
            g->get("angle_count", gm.angle_count);
            g->get("contour_candidates", gm.contour_candidates);
            g->finish();
        }
        if (auto p = s->sub("physics")) {
            PushSimConfig& ps = r.physics;
            p->get("pusher_radius", ps.pusher_radius);
            p->get("substep", ps.substep);
            p->get("rotation_gain", ps.rotation_gain);
            p->get("projection_iterations", ps.projection_iterations);
            p->get("settle_iterations", ps.settle_iterations);
            p->get("penetration_tolerance", ps.penetration_tolerance);
            p->finish();
        }
        if (auto p = s->sub("sampler")) read_sampler(*p, r.sampler);
        s->finish();
    }
    if (auto s = root.sub("rearrangement")) {
        s->get("max_actions", cfg.remp.max_actions);
        if (auto p = s->sub("pmmr")) {
            PmmrConfig& pc = cfg.remp.pmmr;
            p->get("step_budget_s", pc.step_budget_s);
            p->get("max_expansions", pc.max_expansions);
            p->get("n_envs", pc.n_envs);
            p->get("max_depth", pc.max_depth);
            p->get_enum("episode_mode", pc.episode_mode, &episode_mode_from_string);
            p->get("rrt_tree_time_s", pc.rrt_tree_time_s);
            p->get("rrt_rollout_time_s", pc.rrt_rollout_time_s);
            p->get("rrt_final_time_s", pc.rrt_final_time_s);
            p->get("goal_plan_patience", pc.goal_plan_patience);
            if (auto q = p->sub("policy")) read_policy(*q, pc.policy);
            if (auto q = p->sub("reward")) read_reward(*q, pc.reward);
            if (auto q = p->sub("sampler")) read_sampler(*q, pc.sampler);
            if (auto q = p->sub("theta")) {
                q->get("c0", pc.theta.c0);
                q->get("c1", pc.theta.c1);
                q->get("c2", pc.theta.c2);
                q->get("floor", pc.theta.floor);
                q->finish();
            }
            p->finish();
        }
        if (auto p = s->sub("hbfs")) {
            HbfsConfig& hc = cfg.remp.hbfs;
            p->get("rrt_time_s", hc.rrt_time_s);
            p->get("rrt_max_samples", hc.rrt_max_samples);
            p->get("instances", hc.instances);
            p->get("segment_steps", hc.segment_steps);
            p->get("random_attempts", hc.random_attempts);
            if (auto q = p->sub("reward")) read_reward(*q, hc.reward);
            if (auto q = p->sub("sampler")) read_sampler(*q, hc.sampler);
            p->finish();
        }
        s->finish();
    }
    root.finish();
}

HarnessConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    HarnessConfig cfg;
    try {
        apply_config(cfg, j);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return cfg;
}

json config_to_json(const HarnessConfig& cfg) {
    const RetrievalConfig& r = cfg.retrieval;
    const GripperModel& g = r.gripper;
    const PushSimConfig& p = r.physics;
    const PmmrConfig& pc = cfg.remp.pmmr;
    const HbfsConfig& hc = cfg.remp.hbfs;
    return {
        {"threads", cfg.threads},
        {"retrieval",
         {{"gamma", r.gamma},
          {"d_T", r.d_T},
          {"d_s", r.d_s},
          {"r_c", r.r_c},
          {"r_g", r.r_g},
          {"r_gp", r.r_gp},
          {"delta", r.delta},
          {"binary_reward", r.binary_reward},
          {"max_expansions", r.max_expansions},
          {"time_budget_s", r.time_budget_s},
          {"max_episode_actions", r.max_episode_actions},
          {"greedy_grasp_threshold", r.greedy_grasp_threshold},
          {"n_envs", cfg.n_envs},
          {"policy", policy_json(r.policy)},
          {"gripper",
           {{"finger_width", g.finger_width},
            {"finger_thickness", g.finger_thickness},
            {"stroke", g.stroke},
            {"clearance", g.clearance},
            {"angle_count", g.angle_count},
            {"contour_candidates", g.contour_candidates}}},
          {"physics",
           {{"pusher_radius", p.pusher_radius},
            {"substep", p.substep},
            {"rotation_gain", p.rotation_gain},
            {"projection_iterations", p.projection_iterations},
            {"settle_iterations", p.settle_iterations},
            {"penetration_tolerance", p.penetration_tolerance}}},
          {"sampler", sampler_json(r.sampler)}}},
        {"rearrangement",
         {{"max_actions", cfg.remp.max_actions},
          {"pmmr",
           {{"step_budget_s", pc.step_budget_s},
            {"max_expansions", pc.max_expansions},
            {"n_envs", pc.n_envs},
            {"max_depth", pc.max_depth},
            {"episode_mode", to_string(pc.episode_mode)},
            {"rrt_tree_time_s", pc.rrt_tree_time_s},
            {"rrt_rollout_time_s", pc.rrt_rollout_time_s},
            {"rrt_final_time_s", pc.rrt_final_time_s},
            {"goal_plan_patience", pc.goal_plan_patience},
            {"policy", policy_json(pc.policy)},
            {"reward", reward_json(pc.reward)},
            {"sampler", sampler_json(pc.sampler)},
            {"theta", {{"c0", pc.theta.c0}, {"c1", pc.theta.c1}, {"c2", pc.theta.c2}, {"floor", pc.theta.floor}}}}},
          {"hbfs",
           {{"rrt_time_s", hc.rrt_time_s},
            {"rrt_max_samples", hc.rrt_max_samples},
            {"instances", hc.instances},
            {"segment_steps", hc.segment_steps},
            {"random_attempts", hc.random_attempts},
            {"reward", reward_json(hc.reward)},
            {"sampler", sampler_json(hc.sampler)}}}}}};
}

void apply_overrides(HarnessConfig& cfg, const RunOverrides& o) {
    if (o.budget_s) {
        cfg.retrieval.time_budget_s = *o.budget_s;
        cfg.retrieval.max_expansions = 0;
        cfg.remp.pmmr.step_budget_s = *o.budget_s;
        cfg.remp.pmmr.max_expansions = 0;
    }
    if (o.envs) {
        cfg.n_envs = *o.envs;
        cfg.remp.pmmr.n_envs = *o.envs;
    }
    if (o.seed) {
        cfg.retrieval.seed = *o.seed;
        cfg.remp.pmmr.seed = *o.seed;
        cfg.remp.hbfs.seed = *o.seed;
    }
    if (o.step_budget_s) {
        cfg.remp.pmmr.step_budget_s = *o.step_budget_s;
        cfg.remp.pmmr.max_expansions = 0;
    }
    if (o.episode_mode) cfg.remp.pmmr.episode_mode = episode_mode_from_string(*o.episode_mode);
}

bool is_retrieval_mode(const std::string& mode) {
    return mode == "greedy" || mode == "serial" || mode == "guided" || mode == "pmbs";
}

bool is_rearrangement_mode(const std::string& mode) { return mode == "hbfs" || mode == "pmmr"; }

EpisodeResult run_episode(const Scene& scene, const std::string& mode, const HarnessConfig& cfg, std::uint64_t seed,
                          WorkerPool* pool) {
    EpisodeResult res;
    if (is_retrieval_mode(mode)) {
        validate(scene, SceneKind::retrieval);
        RetrievalRun run;
        run.mode = retrieval_mode_from_string(mode);
        run.cfg = cfg.retrieval;
        run.cfg.seed = seed;
        run.n_envs = cfg.n_envs;
        res = run_retrieval_episode(scene.state, run, pool);
    } else if (is_rearrangement_mode(mode)) {
        validate(scene, SceneKind::rearrangement);
        RempRun run = cfg.remp;
        run.planner = mode == "hbfs" ? RempRun::Planner::hbfs : RempRun::Planner::pmmr;
        run.pmmr.seed = seed;
        run.hbfs.seed = seed;
        res = run_rearrangement_episode(scene.state, scene.goal(), run, pool);
    } else {
        throw std::invalid_argument("unknown mode: " + mode);
    }
    res.metrics.case_id = scene.case_id;
    return res;
}

std::uint64_t trial_seed(std::uint64_t root, const std::string& case_id, int trial) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : case_id) h = (h ^ ch) * 0x100000001b3ULL;
    return derive_seed(root, {h, static_cast<std::uint64_t>(trial)});
}

std::vector<BenchRow> run_benchmark(const Suite& suite, const BenchOptions& opts, WorkerPool* pool) {
    std::vector<BenchRow> rows;
    for (const SuiteEntry& e : suite.cases) {
        const Scene scene = load_scene(suite.dir / e.file);
        for (const std::string& mode : opts.modes) {
            const bool fits = e.kind == "retrieval" ? is_retrieval_mode(mode) : is_rearrangement_mode(mode);
            if (!fits) continue;
            for (int t = 0; t < opts.trials; ++t) {
                BenchRow row;
                row.seed = trial_seed(opts.seed, e.case_id, t);
                row.metrics = run_episode(scene, mode, opts.config, row.seed, pool).metrics;
                row.metrics.case_id = e.case_id;
                row.metrics.trial = t;
                row.metrics.mode = mode;
                if (opts.on_row) opts.on_row(row);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
    out << std::setprecision(17);
    struct Sum {
        int count = 0;
        double actions = 0, time = 0, completed = 0, attempts = 0, successes = 0;
    };
    std::vector<std::string> order;
    std::map<std::string, Sum> sums;
    for (const BenchRow& r : rows) {
        const EpisodeMetrics& m = r.metrics;
        out << m.case_id << ',' << m.trial << ',' << m.mode << ',' << r.seed << ',' << m.actions << ','
            << m.planning_time_s << ',' << (m.completed ? 1 : 0) << ',' << m.grasp_attempts << ','
            << m.grasp_successes << "\n";
        if (!sums.count(m.mode)) order.push_back(m.mode);
        Sum& s = sums[m.mode];
        ++s.count;
        s.actions += m.actions;
        s.time += m.planning_time_s;
        s.completed += m.completed ? 1.0 : 0.0;
        s.attempts += m.grasp_attempts;
        s.successes += m.grasp_successes;
    }
    for (const std::string& mode : order) {
        const Sum& s = sums[mode];
        const double n = s.count;
        out << "MEAN,," << mode << ",," << s.actions / n << ',' << s.time / n << ',' << s.completed / n << ','
            << s.attempts / n << ',' << s.successes / n << "\n";
    }
}

void write_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_csv(out, rows);
}

namespace {

constexpr double kPixelsPerMeter = 2000.0;

struct SvgWriter {
    std::ostringstream os;
    double height;

    double px(double x) const { return x * kPixelsPerMeter; }
    double py(double y) const { return height - y * kPixelsPerMeter; }

    void polygon(const ConvexPolygon& poly, const std::string& attrs) {
        os << "  <polygon points=\"";
        bool first = true;
        for (const Vec2& v : poly.vertices()) {
            os << (first ? "" : " ") << px(v.x) << ',' << py(v.y);
            first = false;
        }
        os << "\" " << attrs << "/>\n";
    }

    void arrow(Vec2 a, Vec2 b, const std::string& cls, int label) {
        os << "  <line class=\"" << cls << "\" x1=\"" << px(a.x) << "\" y1=\"" << py(a.y) << "\" x2=\"" << px(b.x)
           << "\" y2=\"" << py(b.y) << "\" stroke=\"#1f6fb2\" stroke-width=\"2\" marker-end=\"url(#head)\"/>\n";
        os << "  <text class=\"step-label\" x=\"" << px(a.x) + 3 << "\" y=\"" << py(a.y) - 3
           << "\" font-size=\"12\" fill=\"#1f6fb2\">" << label << "</text>\n";
    }
};

}  // namespace

std::string render_svg(const Scene& scene, const std::vector<EpisodeEvent>& log) {
    const SceneState& s = scene.state;
    SvgWriter w;
    w.height = s.workspace.max_y * kPixelsPerMeter;
    const double width = s.workspace.max_x * kPixelsPerMeter;
    w.os << std::setprecision(6);
    w.os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << w.height
         << "\" viewBox=\"0 0 " << width << ' ' << w.height << "\">\n";
    w.os << "  <defs><marker id=\"head\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" "
            "orient=\"auto\"><path d=\"M0,0 L8,4 L0,8 z\" fill=\"#1f6fb2\"/></marker></defs>\n";
    w.os << "  <rect class=\"workspace\" x=\"" << w.px(s.workspace.min_x) << "\" y=\"" << w.py(s.workspace.max_y)
         << "\" width=\"" << s.workspace.width() * kPixelsPerMeter << "\" height=\""
         << s.workspace.height() * kPixelsPerMeter << "\" fill=\"#fafafa\" stroke=\"#333\" stroke-width=\"2\"/>\n";
    for (const auto& [id, pose] : scene.goals) {
        const ObjectState* o = s.find(id);
        if (!o) continue;
        for (const ConvexPolygon& part : o->footprint_at(pose)) {
            w.polygon(part, "class=\"goal\" fill=\"none\" stroke=\"#27ae60\" stroke-dasharray=\"4,3\"");
        }
    }
    for (const ObjectState& o : s.objects) {
        const bool target = s.target_id && *s.target_id == o.id();
        const bool push_only = o.movability() == Movability::push_only;
        const std::string attrs = target ? "class=\"target\" fill=\"#e74c3c\" stroke=\"#7b1010\" stroke-width=\"3\""
                                  : push_only ? "class=\"object push-only\" fill=\"#9b8ec4\" stroke=\"#444\""
                                              : "class=\"object\" fill=\"#b0b0b0\" stroke=\"#444\"";
        for (const ConvexPolygon& part : o.footprint()) w.polygon(part, attrs);
        const Vec2 c = o.centroid();
        w.os << "  <text class=\"object-id\" x=\"" << w.px(c.x) << "\" y=\"" << w.py(c.y)
             << "\" font-size=\"10\" text-anchor=\"middle\">" << o.id() << "</text>\n";
    }
    int step = 0;
    for (const EpisodeEvent& e : log) {
        std::visit(
            [&](const auto& a) {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, PushAction>) {
                    w.arrow(a.start, a.end(), "push-arrow", ++step);
                } else if constexpr (std::is_same_v<T, PushTrajectory>) {
                    if (a.waypoints.size() >= 2) {
                        w.arrow(a.waypoints.front().position(), a.waypoints.back().position(), "push-arrow", ++step);
                    }
                } else if constexpr (std::is_same_v<T, PickPlaceAction>) {
                    w.arrow(a.pick.position(), a.place.position(), "move-arrow", ++step);
                } else {
                    ++step;
                }
            },
            e.action);
    }
    w.os << "</svg>\n";
    return w.os.str();
}

void render_svg(const Scene& scene, const std::vector<EpisodeEvent>& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << render_svg(scene, log);
}

json episode_to_json(const EpisodeResult& r) {
    json events = json::array();
    for (const EpisodeEvent& e : r.log) {
        json ev = std::visit(
            [](const auto& a) -> json {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, PushAction>) {
                    return {{"type", "push"},
                            {"start", {a.start.x, a.start.y}},
                            {"direction", {a.direction.x, a.direction.y}},
                            {"distance", a.distance}};
                } else if constexpr (std::is_same_v<T, GraspAction>) {
                    return {{"type", "grasp"},
                            {"center", {a.center.x, a.center.y}},
                            {"angle_index", a.angle_index},
                            {"angle_count", a.angle_count}};
                } else if constexpr (std::is_same_v<T, PickPlaceAction>) {
                    return {{"type", "pick_place"},
                            {"object_id", a.object_id},
                            {"pick", pose_to_json(a.pick)},
                            {"place", pose_to_json(a.place)}};
                } else {
                    json wps = json::array();
                    for (const Pose2& p : a.waypoints) wps.push_back(pose_to_json(p));
                    return {{"type", "push_trajectory"}, {"object_id", a.object_id}, {"waypoints", std::move(wps)}};
                }
            },
            e.action);
        ev["planning_time_s"] = e.planning_time_s;
        ev["success"] = e.success;
        events.push_back(std::move(ev));
    }
    const EpisodeMetrics& m = r.metrics;
    return {{"case_id", m.case_id},
            {"mode", m.mode},
            {"trial", m.trial},
            {"actions", m.actions},
            {"planning_time_s", m.planning_time_s},
            {"completed", m.completed},
            {"grasp_attempts", m.grasp_attempts},
            {"grasp_successes", m.grasp_successes},
            {"events", std::move(events)}};
}

std::vector<EpisodeEvent> episode_log_from_json(const json& j) {
    if (!j.is_object() || !j.contains("events") || !j["events"].is_array()) {
        throw ParseError("episode: events: expected an array");
    }
    auto vec = [](const json& v, const std::string& where) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw ParseError(where + ": expected [x, y]");
        }
        return Vec2{v[0].get<double>(), v[1].get<double>()};
    };
    auto pose = [](const json& v, const std::string& where) {
        if (!v.is_object() || !v.contains("x") || !v.contains("y") || !v.contains("theta")) {
            throw ParseError(where + ": expected {x, y, theta}");
        }
        return Pose2(v["x"].get<double>(), v["y"].get<double>(), v["theta"].get<double>());
    };
    std::vector<EpisodeEvent> out;
    const json& events = j["events"];
    for (std::size_t i = 0; i < events.size(); ++i) {
        const std::string where = "events[" + std::to_string(i) + "]";
        const json& e = events[i];
        try {
            const std::string type = e.at("type").get<std::string>();
            EpisodeEvent ev;
            if (type == "push") {
                ev.action = PushAction{vec(e.at("start"), where + ".start"), vec(e.at("direction"), where + ".direction"),
                                       e.at("distance").get<double>()};
            } else if (type == "grasp") {
                ev.action = GraspAction{vec(e.at("center"), where + ".center"), e.at("angle_index").get<int>(),
                                        e.at("angle_count").get<int>()};
            } else if (type == "pick_place") {
                ev.action = PickPlaceAction{e.at("object_id").get<int>(), pose(e.at("pick"), where + ".pick"),
                                            pose(e.at("place"), where + ".place")};
            } else if (type == "push_trajectory") {
                PushTrajectory t;
                t.object_id = e.at("object_id").get<int>();
                for (const json& w : e.at("waypoints")) t.waypoints.push_back(pose(w, where + ".waypoints"));
                ev.action = std::move(t);
            } else {
                throw ParseError(where + ".type: unknown event type " + type);
            }
            ev.planning_time_s = e.value("planning_time_s", 0.0);
            ev.success = e.value("success", true);
            out.push_back(std::move(ev));
        } catch (const json::exception& ex) {
            throw ParseError(where + ": " + ex.what());
        }
    }
    return out;
}

}  // namespace clutter
