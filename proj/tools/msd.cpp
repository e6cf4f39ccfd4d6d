// Command line front end: plan, generate, train, rollout, eval, experiment.

#include "msd/errors.hpp"
#include "msd/experiment.hpp"
#include "msd/io.hpp"
#include "msd/scheme_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace msd;

namespace {

struct PipelineOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::string schemes;
};

void add_pipeline_options(CLI::App* cmd, PipelineOptions& o) {
    cmd->add_option("--config", o.config, "experiment JSON config (default: <out-dir>/config.json if present)");
    cmd->add_option("--seed", o.seed, "master seed, overrides the config");
    cmd->add_option("--out-dir", o.out_dir, "artifact directory")->capture_default_str();
    cmd->add_option("--schemes", o.schemes, "comma separated schemes, overrides the config");
}

ExperimentConfig resolve_config(const PipelineOptions& o) {
    ExperimentConfig c;
    if (!o.config.empty()) {
        c = load_experiment_config(o.config);
    } else if (fs::exists(fs::path(o.out_dir) / artifact::kConfig)) {
        c = load_experiment_config(fs::path(o.out_dir) / artifact::kConfig);
    }
    if (o.seed) c.seed = *o.seed;
    if (!o.schemes.empty()) {
        c.schemes.clear();
        std::stringstream ss(o.schemes);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) c.schemes.push_back(item);
    }
    try {
        validate(c);
    } catch (const std::exception& e) {
        throw StageError("config", e.what());
    }
    return c;
}

void save_config(const ExperimentConfig& c, const fs::path& dir) {
    fs::create_directories(dir);
    write_json(dir / artifact::kConfig, to_json(c));
}

void print_rows(const std::vector<MetricRow>& rows) {
    std::cout << "scheme,metric,bucket,value\n";
    for (const auto& r : rows) std::cout << r.scheme << ',' << r.metric << ',' << r.bucket << ',' << r.value << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiscale inference schemes for diffusion forecasting"};
    app.require_subcommand(1);

    // plan
    auto* plan = app.add_subcommand("plan", "plan a scheme, validate it and draw it");
    std::string scheme_name = "multiscale";
    int horizon = 9, k = 3, total = 0;
    std::vector<int> template_horizons;
    std::string json_out, svg_out;
    plan->add_option("--scheme", scheme_name, "multiscale, multiscale:pastN, autoregressive or hierarchy2")
        ->capture_default_str();
    plan->add_option("--horizon", horizon, "scheme horizon H")->capture_default_str();
    plan->add_option("--k", k, "new steps per call")->capture_default_str();
    plan->add_option("--templates", template_horizons, "template horizons (default: all templates up to H)")
        ->delimiter(',');
    plan->add_option("--total", total, "repeat the scheme until this many steps are covered");
    plan->add_option("--json", json_out, "write the scheme as JSON");
    plan->add_option("--svg", svg_out, "write an SVG diagram");

    PipelineOptions generate_opts, train_opts, rollout_opts, eval_opts, experiment_opts;
    auto* generate = app.add_subcommand("generate", "generate training, test and target data");
    add_pipeline_options(generate, generate_opts);
    auto* train_cmd = app.add_subcommand("train", "train the denoiser");
    add_pipeline_options(train_cmd, train_opts);
    auto* rollout_cmd = app.add_subcommand("rollout", "roll out every scheme on the test trajectories");
    add_pipeline_options(rollout_cmd, rollout_opts);
    auto* eval_cmd = app.add_subcommand("eval", "score rollouts against the target ensembles");
    add_pipeline_options(eval_cmd, eval_opts);
    auto* experiment = app.add_subcommand("experiment", "run generate, train, rollout and eval");
    add_pipeline_options(experiment, experiment_opts);
    bool print_config = false;
    experiment->add_flag("--print-config", print_config, "print the resolved config and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*plan) {
            const auto spec = parse_scheme_spec(scheme_name);
            const auto templates = template_horizons.empty() ? standard_templates(horizon, k)
                                                             : templates_for_horizons(template_horizons, k);
            auto s = plan_scheme(spec, horizon, k, templates);
            if (total > s.horizon) s = extend_scheme(s, total);
            const auto report = validate_scheme(s);
            std::cout << render_scheme_text(s);
            for (std::size_t n = 0; n < s.actions.size(); ++n) {
                std::cout << "action " << n + 1 << ": C = {";
                const auto c = s.conditioned(n);
                for (std::size_t i = 0; i < c.size(); ++i) std::cout << (i ? "," : "") << c[i];
                std::cout << "} I = {";
                const auto g = s.generated(n);
                for (std::size_t i = 0; i < g.size(); ++i) std::cout << (i ? "," : "") << g[i];
                std::cout << "}\n";
            }
            std::cout << "validation: " << (report.ok() ? "ok" : report.message) << '\n';
            if (!json_out.empty()) write_json(json_out, scheme_to_json(s));
            if (!svg_out.empty()) write_text(svg_out, render_scheme_svg(s));
            return report.ok() ? 0 : 1;
        }
        if (*generate) {
            const auto c = resolve_config(generate_opts);
            save_config(c, generate_opts.out_dir);
            stage_generate(c, generate_opts.out_dir);
        } else if (*train_cmd) {
            stage_train(resolve_config(train_opts), train_opts.out_dir);
        } else if (*rollout_cmd) {
            stage_rollout(resolve_config(rollout_opts), rollout_opts.out_dir);
        } else if (*eval_cmd) {
            const auto c = resolve_config(eval_opts);
            print_rows(stage_eval(c, eval_opts.out_dir));
        } else if (*experiment) {
            const auto c = resolve_config(experiment_opts);
            if (print_config) {
                std::cout << to_json(c).dump(2) << '\n';
                return 0;
            }
            const auto rows = run_experiment(c, experiment_opts.out_dir);
            print_rows(rows);
            std::cout << summarize(c, rows).dump(2) << '\n';
        }
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const PlanningError& e) {
        std::cerr << "error: plan: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
