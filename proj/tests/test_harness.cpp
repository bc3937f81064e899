#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "grasp_oracle.hpp"
#include "test_support.hpp"

using namespace clutter;
using namespace testing_support;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("clutter_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + needle.size())) ++n;
    return n;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

Scene small_retrieval_scene() {
    Scene sc;
    sc.case_id = "unit";
    sc.state = one_push_scene();
    sc.state.rng_seed = 12;
    return sc;
}

}  // namespace

TEST_CASE("scene files round-trip exactly") {
    Scene sc = generate_retrieval_scene(4, 7);
    sc.case_id = "rt";
    sc.note = "round trip";
    const std::string text = dump_scene(sc);
    const Scene back = parse_scene(text);
    CHECK(dump_scene(back) == text);
    CHECK(back.state.objects.size() == sc.state.objects.size());
    for (std::size_t i = 0; i < sc.state.objects.size(); ++i) {
        CHECK(back.state.objects[i].pose() == sc.state.objects[i].pose());
        CHECK(back.state.objects[i].movability() == sc.state.objects[i].movability());
    }
    CHECK(back.state.target_id == sc.state.target_id);

    Scene rr = generate_rearrangement_scene(9, 5);
    const auto dir = scratch("roundtrip");
    save_scene(rr, dir / "r.json");
    const Scene loaded = load_scene(dir / "r.json", SceneKind::rearrangement);
    CHECK(dump_scene(loaded) == dump_scene(rr));
    CHECK(loaded.goals == rr.goals);
}

TEST_CASE("scene validation names the offending field") {
    Scene sc = small_retrieval_scene();
    auto j = to_json(sc);
    j["objects"][1]["pose"]["x"] = j["objects"][0]["pose"]["x"];
    j["objects"][1]["pose"]["y"] = j["objects"][0]["pose"]["y"];
    CHECK_THROWS_AS(scene_from_json(j), ValidationError);

    auto nt = to_json(sc);
    nt["target_id"] = nullptr;
    CHECK_NOTHROW(scene_from_json(nt));
    CHECK(error_of([&] { scene_from_json(nt, SceneKind::retrieval); }).find("target_id") != std::string::npos);

    auto bad_theta = to_json(sc);
    bad_theta["objects"][1]["pose"]["theta"] = "north";
    const std::string msg = error_of([&] { scene_from_json(bad_theta); });
    CHECK(msg.find("objects[1].pose.theta") != std::string::npos);

    auto no_goals = to_json(sc);
    CHECK(error_of([&] { scene_from_json(no_goals, SceneKind::rearrangement); }).find("goals") != std::string::npos);

    Scene rr = generate_rearrangement_scene(2, 4);
    auto clash = to_json(rr);
    clash["goals"]["1"] = clash["goals"]["0"];
    CHECK(error_of([&] { scene_from_json(clash); }).find("goals") != std::string::npos);

    const std::string broken = dump_scene(sc).substr(0, 40);
    const std::string perr = error_of([&] { parse_scene(broken); });
    CHECK(perr.find("line") != std::string::npos);
    CHECK_THROWS_AS(parse_scene(broken), ParseError);

    const auto dir = scratch("validate");
    { std::ofstream(dir / "bad.json") << broken; }
    CHECK(error_of([&] { load_scene(dir / "bad.json"); }).find("bad.json") != std::string::npos);
    CHECK_THROWS(load_scene(dir / "missing.json"));
}

TEST_CASE("scene generation is deterministic and adversarial") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const int n = 4 + static_cast<int>(seed);
        const Scene a = generate_retrieval_scene(seed, n);
        CHECK(dump_scene(a) == dump_scene(generate_retrieval_scene(seed, n)));
        // n obstacles around the target.
        CHECK(a.state.objects.size() == static_cast<std::size_t>(n) + 1);
        CHECK_NOTHROW(validate(a, SceneKind::retrieval));
        CHECK_FALSE(is_graspable(naive_grasp_score(a.state, *a.state.target_id), 0.8));
    }
    for (const Scene& h : hard_retrieval_cases()) {
        CHECK_NOTHROW(validate(h, SceneKind::retrieval));
        CHECK(naive_grasp_score(h.state, *h.state.target_id) < 0.8);
        CHECK_FALSE(h.note.empty());
    }
    CHECK(hard_retrieval_cases().size() == 6);
}

TEST_CASE("suite generation: 20 + 6 retrieval cases and 25 rearrangement cases over counts 4-8") {
    const auto dir = scratch("suite");
    SuiteSpec spec;
    spec.seed = 3;
    const Suite suite = generate_suite(dir, spec);
    std::map<int, int> per_count;
    int retrieval = 0;
    for (const SuiteEntry& e : suite.cases) {
        if (e.kind == "retrieval") {
            ++retrieval;
            CHECK_NOTHROW(load_scene(dir / e.file, SceneKind::retrieval));
        } else {
            ++per_count[e.n_objects];
            const Scene s = load_scene(dir / e.file, SceneKind::rearrangement);
            CHECK(s.state.objects.size() == static_cast<std::size_t>(e.n_objects));
        }
    }
    CHECK(retrieval == 26);
    CHECK(per_count == std::map<int, int>{{4, 5}, {5, 5}, {6, 5}, {7, 5}, {8, 5}});
    const Suite back = load_suite(dir);
    REQUIRE(back.cases.size() == suite.cases.size());
    for (std::size_t i = 0; i < back.cases.size(); ++i) CHECK(back.cases[i].case_id == suite.cases[i].case_id);

    // Same seed, same bytes.
    const auto dir2 = scratch("suite2");
    generate_suite(dir2, spec);
    for (const SuiteEntry& e : suite.cases) {
        std::ifstream a(dir / e.file), b(dir2 / e.file);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
    }
}

TEST_CASE("benchmark CSV: header only, row counts and recomputed means") {
    std::ostringstream empty;
    write_csv(empty, {});
    const auto header_only = parse_csv(empty.str());
    REQUIRE(header_only.size() == 1);
    CHECK(header_only[0] == csv_columns());

    const auto dir = scratch("bench");
    Suite suite;
    suite.dir = dir;
    Scene sc = small_retrieval_scene();
    save_scene(sc, dir / "unit.json");
    suite.cases.push_back({"unit", "retrieval", "unit.json", 2, ""});
    BenchOptions opts;
    opts.modes = {"greedy", "serial", "hbfs"};
    opts.trials = 5;
    opts.seed = 1;
    opts.config.retrieval.max_expansions = 20;
    int seen = 0;
    opts.on_row = [&](const BenchRow&) { ++seen; };
    const auto rows = run_benchmark(suite, opts);
    CHECK(rows.size() == 10);
    CHECK(seen == 10);
    for (const BenchRow& r : rows) {
        CHECK(r.seed == trial_seed(1, "unit", r.metrics.trial));
        CHECK(r.metrics.grasp_successes <= r.metrics.grasp_attempts);
    }

    std::ostringstream out;
    write_csv(out, rows);
    const auto table = parse_csv(out.str());
    REQUIRE(table.size() == 1 + 10 + 2);
    std::map<std::string, std::pair<double, int>> sums;
    for (std::size_t i = 1; i <= 10; ++i) {
        REQUIRE(table[i].size() == csv_columns().size());
        auto& s = sums[table[i][2]];
        s.first += std::stod(table[i][4]);
        ++s.second;
    }
    CHECK(sums.size() == 2);
    for (std::size_t i = 11; i < table.size(); ++i) {
        CHECK(table[i][0] == "MEAN");
        const auto& s = sums.at(table[i][2]);
        CHECK(s.second == 5);
        CHECK(std::stod(table[i][4]) == doctest::Approx(s.first / s.second));
    }
    CHECK(table[11][2] == "greedy");
    CHECK(table[12][2] == "serial");

    // Same seeds, one worker: identical action logs.
    const auto again = run_benchmark(suite, opts);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(again[i].metrics.actions == rows[i].metrics.actions);
        CHECK(again[i].metrics.completed == rows[i].metrics.completed);
    }
}

TEST_CASE("episode logs round-trip through JSON") {
    Scene sc = small_retrieval_scene();
    HarnessConfig cfg;
    cfg.retrieval.max_expansions = 20;
    const EpisodeResult r = run_episode(sc, "serial", cfg, 5);
    const auto j = episode_to_json(r);
    const auto log = episode_log_from_json(j);
    REQUIRE(log.size() == r.log.size());
    for (std::size_t i = 0; i < log.size(); ++i) {
        CHECK(log[i].action.index() == r.log[i].action.index());
        CHECK(log[i].success == r.log[i].success);
    }
    CHECK_THROWS_AS(run_episode(sc, "pmmr", cfg, 1), std::exception);
}

TEST_CASE("render_svg: workspace only, highlighted target, numbered arrows") {
    Scene blank;
    blank.state = empty_scene();
    const std::string svg = render_svg(blank);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(count_of(svg, "class=\"workspace\"") == 1);
    CHECK(count_of(svg, "<polygon") == 0);
    CHECK(count_of(svg, "push-arrow") == 0);

    Scene sc = small_retrieval_scene();
    const std::string with_target = render_svg(sc);
    CHECK(count_of(with_target, "class=\"target\"") == 1);
    CHECK(count_of(with_target, "class=\"object\"") == 1);
    std::smatch m;
    const std::string t = with_target.substr(with_target.find("class=\"target\""));
    const std::string o = with_target.substr(with_target.find("class=\"object\""));
    const std::regex stroke("stroke=\"([^\"]+)\"");
    REQUIRE(std::regex_search(t, m, stroke));
    const std::string ts = m[1];
    REQUIRE(std::regex_search(o, m, stroke));
    CHECK(ts != m[1].str());

    std::vector<EpisodeEvent> log;
    SceneState s = sc.state;
    for (int k = 0; k < 3; ++k) {
        const auto pushes = sample_retrieval_pushes(s);
        log.push_back({pushes[static_cast<std::size_t>(k)], 0.0, true});
    }
    const std::string arrows = render_svg(sc, log);
    CHECK(count_of(arrows, "<line class=\"push-arrow\"") == 3);
    CHECK(count_of(arrows, "class=\"step-label\"") == 3);
    const auto p1 = arrows.find(">1</text>"), p2 = arrows.find(">2</text>"), p3 = arrows.find(">3</text>");
    REQUIRE(p1 != std::string::npos);
    REQUIRE(p2 != std::string::npos);
    REQUIRE(p3 != std::string::npos);
    CHECK(p1 < p2);
    CHECK(p2 < p3);

    Scene rr = generate_rearrangement_scene(1, 4);
    std::size_t parts = 0;
    for (const ObjectState& o : rr.state.objects) parts += o.shape().parts().size();
    CHECK(count_of(render_svg(rr), "class=\"goal\"") == parts);
}

TEST_CASE("config files: known keys applied, unknown keys rejected by name") {
    HarnessConfig cfg;
    apply_config(cfg, nlohmann::json::parse(R"({"retrieval": {"gamma": 0.5, "policy": {"c": "inf"}},
                                                "rearrangement": {"max_actions": 12, "pmmr": {"step_budget_s": 3}}})"));
    CHECK(cfg.retrieval.gamma == 0.5);
    CHECK(std::isinf(cfg.retrieval.policy.c));
    CHECK(cfg.remp.max_actions == 12);
    CHECK(cfg.remp.pmmr.step_budget_s == 3.0);
    const std::string e = error_of([&] { apply_config(cfg, nlohmann::json::parse(R"({"retrieval": {"gama": 1}})")); });
    CHECK(e.find("retrieval.gama") != std::string::npos);

    HarnessConfig round;
    apply_config(round, config_to_json(cfg));
    CHECK(config_to_json(round) == config_to_json(cfg));

    RunOverrides o;
    o.budget_s = 2.5;
    o.envs = 6;
    o.seed = 9;
    apply_overrides(cfg, o);
    CHECK(cfg.retrieval.time_budget_s == 2.5);
    CHECK(cfg.retrieval.max_expansions == 0);
    CHECK(cfg.remp.pmmr.step_budget_s == 2.5);
    CHECK(cfg.n_envs == 6);
}
