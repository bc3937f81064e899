#include "clutter/scenegen.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "clutter/remp.hpp"
#include "clutter/rng.hpp"

namespace clutter {

using nlohmann::json;

namespace {

std::shared_ptr<const Shape> box(double w, double h) {
    return std::make_shared<const Shape>(Shape::from_parts({ConvexPolygon::rectangle(w, h)}));
}

std::shared_ptr<const Shape> random_shape(Rng& rng, double lo, double hi, double l_chance) {
    const double r = rng.uniform();
    if (r < l_chance) {
        const double a = rng.uniform(lo, hi);
        const double b = rng.uniform(lo, hi);
        const double t = rng.uniform(lo * 0.5, lo);
        // Two arms sharing a corner square; the second arm starts where the first ends.
        return std::make_shared<const Shape>(Shape::from_parts(
            {ConvexPolygon::rectangle(a, t, {a / 2.0, t / 2.0}),
             ConvexPolygon::rectangle(t, b - t, {t / 2.0, t + (b - t) / 2.0})}));
    }
    if (r < l_chance + (1.0 - l_chance) * 0.55) return box(rng.uniform(lo, hi), rng.uniform(lo, hi));
    const int sides = 4 + static_cast<int>(rng.index(5));
    return std::make_shared<const Shape>(
        Shape::from_parts({ConvexPolygon::regular(sides, rng.uniform(lo, hi) / 2.0, {}, rng.uniform(0.0, kPi))}));
}

/// Pose that puts the shape's centroid at `c`.
Pose2 centroid_pose(const Shape& shape, Vec2 c, double theta) {
    const Vec2 off = rotate(shape.centroid(), theta);
    return Pose2(c.x - off.x, c.y - off.y, theta);
}

bool fits(const SceneState& s, const Shape& shape, const Pose2& pose, double clearance) {
    const auto fp = transform(shape, pose);
    return contains(s.workspace, fp) && footprint_is_free(s, fp, std::nullopt, clearance);
}

/// Marches outward from the target along `dir` and stops at the first free pose.
std::optional<Pose2> pack_along(const SceneState& s, const Shape& shape, Vec2 origin, Vec2 dir, double theta,
                                double gap) {
    for (double r = 0.0; r < s.workspace.width(); r += 0.001) {
        const Pose2 p = centroid_pose(shape, origin + dir * r, theta);
        const auto fp = transform(shape, p);
        if (!contains(s.workspace, fp)) {
            if (!s.workspace.contains(origin + dir * r)) return std::nullopt;
            continue;
        }
        if (footprint_is_free(s, fp, std::nullopt, gap)) return p;
    }
    return std::nullopt;
}

std::optional<Scene> try_retrieval(Rng& rng, int n, const RetrievalGenConfig& cfg) {
    Scene scene;
    SceneState& s = scene.state;
    s.workspace = Rect::from_size(cfg.workspace_size, cfg.workspace_size);
    const Vec2 c = s.workspace.center();
    auto target = rng.bernoulli(0.7) ? box(rng.uniform(0.024, 0.04), rng.uniform(0.035, 0.06))
                                     : random_shape(rng, 0.03, 0.045, 0.0);
    s.objects.emplace_back(0, target, centroid_pose(*target, c, rng.uniform(-kPi, kPi)));
    s.target_id = 0;
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    for (int k = 0; k < n; ++k) {
        auto shape = random_shape(rng, 0.02, 0.06, 0.1);
        std::optional<Pose2> pose;
        for (int tries = 0; tries < 20 && !pose; ++tries) {
            const double jitter = rng.uniform(-0.4, 0.4) * kPi / n;
            const double phi = phase + 2.0 * kPi * k / n + jitter;
            pose = pack_along(s, *shape, c, unit_from_angle(phi), rng.uniform(-kPi, kPi),
                              rng.uniform(cfg.min_gap, cfg.max_gap));
        }
        if (!pose) return std::nullopt;
        s.objects.emplace_back(k + 1, std::move(shape), *pose);
    }
    if (is_graspable(s, 0, cfg.graspable_threshold, cfg.gripper)) return std::nullopt;
    return scene;
}

std::optional<Scene> try_rearrangement(Rng& rng, int n, const RearrangementGenConfig& cfg, std::uint64_t seed) {
    Scene scene;
    SceneState& s = scene.state;
    s.workspace = Rect::from_size(cfg.workspace_width, cfg.workspace_height);
    const Rect& ws = s.workspace;
    constexpr double kSpacing = 0.005;
    for (int id = 0; id < n; ++id) {
        auto shape = random_shape(rng, 0.03, 0.08, 0.1);
        const Movability mov = rng.bernoulli(cfg.push_only_fraction) ? Movability::push_only : Movability::pick_or_push;
        std::optional<Pose2> pose;
        for (int tries = 0; tries < 200 && !pose; ++tries) {
            const Pose2 p(rng.uniform(ws.min_x, ws.max_x), rng.uniform(ws.min_y, ws.max_y), rng.uniform(-kPi, kPi));
            if (fits(s, *shape, p, kSpacing)) pose = p;
        }
        if (!pose) return std::nullopt;
        s.objects.emplace_back(id, std::move(shape), *pose, mov);
    }
    SceneState goals = s;
    goals.objects.clear();
    for (const ObjectState& o : s.objects) {
        std::optional<Pose2> pose;
        for (int tries = 0; tries < 200 && !pose; ++tries) {
            Vec2 at{rng.uniform(ws.min_x, ws.max_x), rng.uniform(ws.min_y, ws.max_y)};
            if (n > 1 && rng.bernoulli(cfg.goal_overlap_bias)) {
                std::size_t j = rng.index(static_cast<std::size_t>(n - 1));
                if (static_cast<int>(j) >= o.id()) ++j;
                const Vec2 other = s.objects[j].centroid();
                at = {other.x + 0.02 * rng.normal(), other.y + 0.02 * rng.normal()};
            }
            const Pose2 p = centroid_pose(o.shape(), at, rng.uniform(-kPi, kPi));
            if (distance(p.position(), o.pose().position()) < 0.05) continue;
            if (fits(goals, o.shape(), p, kSpacing)) pose = p;
        }
        if (!pose) return std::nullopt;
        goals.objects.emplace_back(o.id(), o.shape_ptr(), *pose, o.movability());
        scene.goals[o.id()] = *pose;
    }
    validate(scene, SceneKind::rearrangement);

    HbfsConfig hc;
    hc.rrt_time_s = 1e6;
    hc.rrt_max_samples = cfg.filter_rrt_samples;
    hc.seed = derive_seed(seed, {0xf1});
    RempRun run;
    run.planner = RempRun::Planner::hbfs;
    run.hbfs = hc;
    run.max_actions = n;
    const EpisodeResult r = run_rearrangement_episode(s, scene.goal(), run);
    if (r.metrics.completed && rng.bernoulli(cfg.trivial_discard_probability)) return std::nullopt;
    return scene;
}

std::string case_name(const std::string& prefix, int i) {
    std::ostringstream os;
    os << prefix << '_';
    if (i < 10) os << '0';
    os << i;
    return os.str();
}

}  // namespace

Scene generate_retrieval_scene(std::uint64_t seed, int n_objects, const RetrievalGenConfig& cfg) {
    if (n_objects < 1) throw GenerationError("retrieval scenes need at least one obstacle");
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(attempt)}));
        if (auto scene = try_retrieval(rng, n_objects, cfg)) {
            scene->state.rng_seed = seed;
            validate(*scene, SceneKind::retrieval);
            return std::move(*scene);
        }
    }
    throw GenerationError("retrieval packing failed after " + std::to_string(cfg.max_attempts) + " attempts");
}

Scene generate_rearrangement_scene(std::uint64_t seed, int n_objects, const RearrangementGenConfig& cfg) {
    if (n_objects < 1) throw GenerationError("rearrangement scenes need at least one object");
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(attempt)});
        Rng rng(s);
        if (auto scene = try_rearrangement(rng, n_objects, cfg, s)) {
            scene->state.rng_seed = seed;
            return std::move(*scene);
        }
    }
    throw GenerationError("rearrangement sampling failed after " + std::to_string(cfg.max_attempts) + " attempts");
}

std::vector<Scene> hard_retrieval_cases() {
    const double ws = 0.288;
    const Vec2 c{ws / 2.0, ws / 2.0};
    auto make = [&](const std::string& id, const std::string& note) {
        Scene sc;
        sc.case_id = id;
        sc.note = "hand-authored approximation: " + note;
        sc.state.workspace = Rect::from_size(ws, ws);
        sc.state.target_id = 0;
        return sc;
    };
    auto put = [](Scene& sc, std::shared_ptr<const Shape> shape, double x, double y, double theta = 0.0) {
        const int id = static_cast<int>(sc.state.objects.size());
        sc.state.objects.emplace_back(id, std::move(shape), Pose2(x, y, theta));
    };
    std::vector<Scene> out;

    {
        Scene sc = make("hard_walled", "target boxed in by two long walls and two end caps");
        put(sc, box(0.03, 0.05), c.x, c.y);
        put(sc, box(0.02, 0.12), c.x - 0.028, c.y);
        put(sc, box(0.02, 0.12), c.x + 0.028, c.y);
        put(sc, box(0.034, 0.02), c.x, c.y + 0.038);
        put(sc, box(0.034, 0.02), c.x, c.y - 0.038);
        out.push_back(std::move(sc));
    }
    {
        Scene sc = make("hard_ring", "target inside a tight ring of eight hexagonal objects");
        put(sc, box(0.03, 0.03), c.x, c.y);
        auto hex = std::make_shared<const Shape>(Shape::from_parts({ConvexPolygon::regular(6, 0.016)}));
        for (int k = 0; k < 8; ++k) {
            const Vec2 p = c + unit_from_angle(2.0 * kPi * k / 8.0) * 0.045;
            put(sc, hex, p.x, p.y);
        }
        out.push_back(std::move(sc));
    }
    {
        Scene sc = make("hard_corner", "target in a workspace corner with blockers on the open sides");
        put(sc, box(0.03, 0.045), 0.03, 0.04);
        put(sc, box(0.02, 0.09), 0.058, 0.05);
        put(sc, box(0.045, 0.02), 0.0235, 0.076);
        put(sc, box(0.03, 0.03), 0.085, 0.11);
        out.push_back(std::move(sc));
    }
    {
        Scene sc = make("hard_corridor", "target in a narrow corridor between two rows with capped ends");
        put(sc, box(0.05, 0.028), c.x, c.y);
        for (int k = -2; k <= 2; ++k) {
            put(sc, box(0.035, 0.025), c.x + 0.037 * k, c.y + 0.0275);
            put(sc, box(0.035, 0.025), c.x + 0.037 * k, c.y - 0.0275);
        }
        put(sc, box(0.02, 0.026), c.x - 0.037, c.y);
        put(sc, box(0.02, 0.026), c.x + 0.037, c.y);
        out.push_back(std::move(sc));
    }
    {
        Scene sc = make("hard_l_pocket", "target cupped by an L-shaped object, blocked on the open sides");
        put(sc, box(0.03, 0.04), c.x, c.y);
        auto ell = std::make_shared<const Shape>(Shape::from_parts(
            {ConvexPolygon::rectangle(0.08, 0.02, {0.04, 0.01}), ConvexPolygon::rectangle(0.02, 0.06, {0.01, 0.05})}));
        put(sc, ell, c.x - 0.038, c.y - 0.043);
        put(sc, box(0.02, 0.07), c.x + 0.028, c.y + 0.014);
        put(sc, box(0.034, 0.02), c.x, c.y + 0.033);
        out.push_back(std::move(sc));
    }
    {
        Scene sc = make("hard_double_wall", "target behind two layers of walls on both long sides");
        put(sc, box(0.028, 0.05), c.x, c.y);
        for (double side : {-1.0, 1.0}) {
            put(sc, box(0.012, 0.1), c.x + side * 0.0225, c.y);
            put(sc, box(0.012, 0.1), c.x + side * 0.0375, c.y);
        }
        put(sc, box(0.03, 0.015), c.x, c.y + 0.035);
        put(sc, box(0.03, 0.015), c.x, c.y - 0.035);
        out.push_back(std::move(sc));
    }
    for (Scene& sc : out) {
        sc.state.sort_objects();
        validate(sc, SceneKind::retrieval);
    }
    return out;
}

Suite generate_suite(const std::filesystem::path& dir, const SuiteSpec& spec, const RetrievalGenConfig& rcfg,
                     const RearrangementGenConfig& mcfg) {
    std::filesystem::create_directories(dir);
    Suite suite;
    suite.dir = dir;
    auto add = [&](Scene& sc, const std::string& kind) {
        const std::string file = sc.case_id + ".json";
        save_scene(sc, dir / file);
        suite.cases.push_back({sc.case_id, kind, file, static_cast<int>(sc.state.objects.size()), sc.note});
    };
    for (int i = 0; i < spec.retrieval_cases; ++i) {
        const std::uint64_t s = derive_seed(spec.seed, {1, static_cast<std::uint64_t>(i)});
        const int n = rcfg.min_objects + static_cast<int>(Rng(s).index(
                                             static_cast<std::size_t>(rcfg.max_objects - rcfg.min_objects + 1)));
        Scene sc = generate_retrieval_scene(s, n, rcfg);
        sc.case_id = case_name("retrieval", i);
        sc.note = "generated";
        add(sc, "retrieval");
    }
    if (spec.hard_cases) {
        for (Scene& sc : hard_retrieval_cases()) add(sc, "retrieval");
    }
    int idx = 0;
    for (int n = spec.rearrangement_min_objects; n <= spec.rearrangement_max_objects; ++n) {
        for (int k = 0; k < spec.rearrangement_per_count; ++k, ++idx) {
            const std::uint64_t s = derive_seed(spec.seed, {2, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)});
            Scene sc = generate_rearrangement_scene(s, n, mcfg);
            sc.case_id = case_name("rearrange_n" + std::to_string(n), k);
            sc.note = "generated";
            add(sc, "rearrangement");
        }
    }
    save_manifest(suite);
    return suite;
}

void save_manifest(const Suite& suite) {
    json cases = json::array();
    for (const SuiteEntry& e : suite.cases) {
        cases.push_back(
            {{"case_id", e.case_id}, {"kind", e.kind}, {"file", e.file}, {"n_objects", e.n_objects}, {"note", e.note}});
    }
    json j{{"format_version", kSceneFormatVersion}, {"cases", std::move(cases)}};
    std::ofstream out(suite.dir / "manifest.json");
    if (!out) throw Error("cannot write " + (suite.dir / "manifest.json").string());
    out << j.dump(2) << "\n";
}

Suite load_suite(const std::filesystem::path& dir) {
    Suite suite;
    suite.dir = dir;
    const auto path = dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!j.contains("cases") || !j["cases"].is_array()) throw ParseError(path.string() + ": cases: expected an array");
    for (std::size_t i = 0; i < j["cases"].size(); ++i) {
        const json& c = j["cases"][i];
        const std::string where = path.string() + ": cases[" + std::to_string(i) + "]";
        if (!c.is_object() || !c.contains("case_id") || !c.contains("kind") || !c.contains("file")) {
            throw ParseError(where + ": case_id, kind and file are required");
        }
        SuiteEntry e;
        e.case_id = c["case_id"].get<std::string>();
        e.kind = c["kind"].get<std::string>();
        if (e.kind != "retrieval" && e.kind != "rearrangement") throw ValidationError(where + ".kind: unknown kind");
        e.file = c["file"].get<std::string>();
        e.n_objects = c.value("n_objects", 0);
        e.note = c.value("note", "");
        suite.cases.push_back(std::move(e));
    }
    return suite;
}

}  // namespace clutter
