#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "clutter/harness.hpp"

using namespace clutter;

namespace {

struct Common {
    std::string scene;
    std::string mode;
    std::optional<double> budget_s;
    std::optional<std::size_t> envs;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string config;
    std::optional<double> step_budget_s;
    std::optional<std::string> episode_mode;
};

std::string env_name(const std::string& flag) {
    std::string s = "CLUTTER_";
    for (char c : flag) s += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

void add_run_flags(CLI::App* app, Common& c) {
    app->add_option("--budget-s", c.budget_s, "Planning budget per step in seconds")->envname(env_name("budget-s"));
    app->add_option("--envs", c.envs, "Parallel simulation environments (0 = four per worker)")
        ->envname(env_name("envs"));
    app->add_option("--seed", c.seed, "Root random seed")->envname(env_name("seed"));
    app->add_option("--config", c.config, "JSON config file")->envname(env_name("config"));
}

void add_rearrange_flags(CLI::App* app, Common& c) {
    app->add_option("--step-budget-s", c.step_budget_s, "Rearrangement planning budget per step in seconds")
        ->envname(env_name("step-budget-s"));
    app->add_option("--episode-mode", c.episode_mode, "Replan after every action (step) or execute the whole plan (full)")
        ->check(CLI::IsMember({"step", "full"}))
        ->envname(env_name("episode-mode"));
}

HarnessConfig resolve_config(const Common& c) {
    HarnessConfig cfg = c.config.empty() ? HarnessConfig{} : load_config(c.config);
    apply_overrides(cfg, {c.budget_s, c.envs, c.seed, c.step_budget_s, c.episode_mode});
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write failed for " + path);
}

int plan(const Common& c, SceneKind kind, const std::string& svg) {
    const bool retrieval = kind == SceneKind::retrieval;
    if (retrieval ? !is_retrieval_mode(c.mode) : !is_rearrangement_mode(c.mode)) {
        std::cerr << "error: mode " << c.mode << " does not apply to " << (retrieval ? "retrieval" : "rearrangement")
                  << "\n";
        return 2;
    }
    HarnessConfig cfg = resolve_config(c);
    const Scene scene = load_scene(c.scene, kind);
    WorkerPool pool(cfg.threads ? cfg.threads : WorkerPool::default_threads());
    const std::uint64_t seed = c.seed.value_or(retrieval ? cfg.retrieval.seed : cfg.remp.pmmr.seed);
    EpisodeResult r = run_episode(scene, c.mode, cfg, seed, &pool);
    nlohmann::json j = episode_to_json(r);
    j["seed"] = seed;
    write_text(c.out, j.dump(2) + "\n");
    if (!svg.empty()) render_svg(scene, r.log, svg);
    std::cerr << r.metrics.case_id << " " << c.mode << ": " << (r.metrics.completed ? "completed" : "failed") << " in "
              << r.metrics.actions << " actions, " << r.metrics.planning_time_s << " s planning\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabletop retrieval and rearrangement planners"};
    app.require_subcommand(1);

    Common gen;
    SuiteSpec spec;
    bool no_hard = false;
    auto* gen_cmd = app.add_subcommand("gen-scenes", "Generate the benchmark suite");
    gen_cmd->add_option("--out", gen.out, "Suite directory")->required()->envname(env_name("out"));
    gen_cmd->add_option("--seed", gen.seed, "Root random seed")->envname(env_name("seed"));
    gen_cmd->add_option("--retrieval-cases", spec.retrieval_cases, "Generated retrieval cases");
    gen_cmd->add_option("--per-count", spec.rearrangement_per_count, "Rearrangement cases per object count");
    gen_cmd->add_option("--min-objects", spec.rearrangement_min_objects, "Smallest rearrangement object count");
    gen_cmd->add_option("--max-objects", spec.rearrangement_max_objects, "Largest rearrangement object count");
    gen_cmd->add_flag("--no-hard", no_hard, "Skip the hand-authored retrieval cases");

    auto* plan_cmd = app.add_subcommand("plan", "Run one episode on a scene");
    plan_cmd->require_subcommand(1);
    Common ret, rea;
    std::string ret_svg, rea_svg;
    auto* ret_cmd = plan_cmd->add_subcommand("retrieve", "Retrieve the target from clutter");
    auto* rea_cmd = plan_cmd->add_subcommand("rearrange", "Rearrange objects to their goals");
    for (auto [cmd, c, svg, def] : {std::tuple{ret_cmd, &ret, &ret_svg, "pmbs"}, std::tuple{rea_cmd, &rea, &rea_svg, "pmmr"}}) {
        c->mode = def;
        cmd->add_option("--scene", c->scene, "Scene file")->required()->envname(env_name("scene"));
        cmd->add_option("--mode", c->mode, "Planner")
            ->check(CLI::IsMember({"greedy", "serial", "guided", "pmbs", "hbfs", "pmmr"}))
            ->envname(env_name("mode"));
        cmd->add_option("--out", c->out, "Episode log (JSON); stdout when omitted")->envname(env_name("out"));
        cmd->add_option("--svg", *svg, "Also render the executed episode");
        add_run_flags(cmd, *c);
    }

    Common bench;
    std::vector<std::string> modes;
    int trials = 1;
    bool quiet = false;
    auto* bench_cmd = app.add_subcommand("bench", "Benchmark planners over a suite");
    bench_cmd->add_option("--suite,--scene", bench.scene, "Suite directory (with manifest.json)")
        ->required()
        ->envname(env_name("scene"));
    bench_cmd->add_option("--mode", modes, "Planners (repeat or comma-separate)")
        ->delimiter(',')
        ->check(CLI::IsMember({"greedy", "serial", "guided", "pmbs", "hbfs", "pmmr"}))
        ->envname(env_name("mode"));
    bench_cmd->add_option("--trials", trials, "Trials per case and mode")->check(CLI::NonNegativeNumber);
    bench_cmd->add_option("--out", bench.out, "CSV path; stdout when omitted")->envname(env_name("out"));
    bench_cmd->add_flag("--quiet", quiet, "No per-episode progress on stderr");
    add_run_flags(bench_cmd, bench);

    add_rearrange_flags(rea_cmd, rea);

    Common render;
    std::string log_path;
    add_rearrange_flags(bench_cmd, bench);

    auto* render_cmd = app.add_subcommand("render", "Render a scene (and optionally an episode) to SVG");
    render_cmd->add_option("--scene", render.scene, "Scene file")->required()->envname(env_name("scene"));
    render_cmd->add_option("--log", log_path, "Episode log from `plan`");
    render_cmd->add_option("--out", render.out, "SVG path; stdout when omitted")->envname(env_name("out"));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_cmd) {
            spec.seed = gen.seed.value_or(0);
            spec.hard_cases = !no_hard;
            const Suite suite = generate_suite(gen.out, spec);
            std::cerr << "wrote " << suite.cases.size() << " cases to " << gen.out << "\n";
        } else if (*ret_cmd) {
            return plan(ret, SceneKind::retrieval, ret_svg);
        } else if (*rea_cmd) {
            return plan(rea, SceneKind::rearrangement, rea_svg);
        } else if (*bench_cmd) {
            if (modes.empty()) modes = {"greedy", "serial", "guided", "pmbs", "hbfs", "pmmr"};
            BenchOptions opts;
            opts.modes = modes;
            opts.trials = trials;
            opts.seed = bench.seed.value_or(0);
            opts.config = resolve_config(bench);
            if (!quiet) {
                opts.on_row = [](const BenchRow& r) {
                    std::cerr << r.metrics.case_id << " " << r.metrics.mode << " #" << r.metrics.trial << ": "
                              << (r.metrics.completed ? "completed" : "failed") << ", " << r.metrics.actions
                              << " actions\n";
                };
            }
            const Suite suite = load_suite(bench.scene);
            WorkerPool pool(opts.config.threads ? opts.config.threads : WorkerPool::default_threads());
            const auto rows = run_benchmark(suite, opts, &pool);
            std::ostringstream csv;
            write_csv(csv, rows);
            write_text(bench.out, csv.str());
            if (!bench.out.empty() && bench.out != "-") {
                nlohmann::json meta{{"seed", opts.seed}, {"trials", trials}, {"modes", modes},
                                    {"config", config_to_json(opts.config)}};
                write_text(bench.out + ".meta.json", meta.dump(2) + "\n");
            }
        } else if (*render_cmd) {
            const Scene scene = load_scene(render.scene);
            std::vector<EpisodeEvent> log;
            if (!log_path.empty()) {
                std::ifstream in(log_path);
                if (!in) throw Error("cannot open " + log_path);
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(in);
                } catch (const nlohmann::json::parse_error& e) {
                    throw ParseError(log_path + ": " + e.what());
                }
                log = episode_log_from_json(j);
            }
            write_text(render.out, render_svg(scene, log));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
