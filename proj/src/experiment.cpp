#include "msd/experiment.hpp"

#include "msd/errors.hpp"
#include "msd/rollout.hpp"
#include "msd/scheme_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace msd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Seed streams derived from the master seed.
enum Stream : std::uint64_t { kTrainData = 1, kTestData = 2, kTargetNoise = 3, kModelInit = 4, kTraining = 5, kRollout = 6 };

template <class F>
auto tagged(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown field '" + key + "' in " + where);
}

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

json synthetic_json(const SinusoidConfig& s) {
    return {{"length", s.length},       {"period", s.period},       {"amplitude", s.amplitude},
            {"noise_std", s.noise_std}, {"present_index", s.present_index}};
}

SinusoidConfig synthetic_from(const json& j) {
    check_keys(j, {"length", "period", "amplitude", "noise_std", "present_index"}, "synthetic");
    SinusoidConfig s;
    read_field(j, "length", s.length);
    read_field(j, "period", s.period);
    read_field(j, "amplitude", s.amplitude);
    read_field(j, "noise_std", s.noise_std);
    read_field(j, "present_index", s.present_index);
    return s;
}

json train_json(const TrainConfig& t) {
    return {{"epochs", t.epochs},
            {"steps_per_epoch", t.steps_per_epoch},
            {"batch_size", t.batch_size},
            {"learning_rate", t.learning_rate},
            {"lr_final_fraction", t.lr_final_fraction},
            {"beta1", t.beta1},
            {"beta2", t.beta2},
            {"adam_eps", t.adam_eps},
            {"sigma_min", t.sigma_min},
            {"sigma_max", t.sigma_max},
            {"mask_sampling", std::string(to_string(t.mask_sampling))},
            {"weighting", std::string(to_string(t.weighting))}};
}

TrainConfig train_from(const json& j) {
    check_keys(j,
               {"epochs", "steps_per_epoch", "batch_size", "learning_rate", "lr_final_fraction", "beta1", "beta2",
                "adam_eps", "sigma_min", "sigma_max", "mask_sampling", "weighting"},
               "train");
    TrainConfig t;
    read_field(j, "epochs", t.epochs);
    read_field(j, "steps_per_epoch", t.steps_per_epoch);
    read_field(j, "batch_size", t.batch_size);
    read_field(j, "learning_rate", t.learning_rate);
    read_field(j, "lr_final_fraction", t.lr_final_fraction);
    read_field(j, "beta1", t.beta1);
    read_field(j, "beta2", t.beta2);
    read_field(j, "adam_eps", t.adam_eps);
    read_field(j, "sigma_min", t.sigma_min);
    read_field(j, "sigma_max", t.sigma_max);
    std::string name;
    if (j.contains("mask_sampling")) {
        read_field(j, "mask_sampling", name);
        t.mask_sampling = parse_mask_sampling(name);
    }
    if (j.contains("weighting")) {
        read_field(j, "weighting", name);
        t.weighting = parse_loss_weighting(name);
    }
    return t;
}

std::vector<Trajectory> table_to_trajectories(const SeriesTable& t, int present_index) {
    std::vector<Trajectory> out;
    for (std::size_t i = 0; i < t.rows; ++i) {
        const auto r = t.row(i);
        out.push_back(Trajectory{std::vector<double>(r.begin(), r.end()), present_index});
    }
    return out;
}

SeriesTable trajectories_to_table(const std::vector<Trajectory>& ts) {
    SeriesTable t;
    t.rows = ts.size();
    t.length = ts.empty() ? 0 : ts.front().values.size();
    for (const auto& tr : ts) {
        if (tr.values.size() != t.length) throw DomainError("trajectories differ in length");
        t.values.insert(t.values.end(), tr.values.begin(), tr.values.end());
    }
    return t;
}

std::vector<SchemeSpec> scheme_specs(const ExperimentConfig& c) {
    std::vector<SchemeSpec> out;
    for (const auto& s : c.schemes) out.push_back(parse_scheme_spec(s));
    return out;
}

std::vector<TrainingPair> pairs_for(const ExperimentConfig& c, const std::vector<SchemeSpec>& specs) {
    const auto templates = experiment_templates(c);
    std::vector<TrainingPair> pairs;
    for (const auto& s : specs) merge_training_pairs(pairs, training_pairs(plan_scheme(s, c.horizon, c.k, templates)));
    return pairs;
}

double population_std(const std::vector<Trajectory>& ts) {
    double sum = 0.0, n = 0.0;
    for (const auto& t : ts)
        for (double v : t.values) sum += v, n += 1.0;
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& t : ts)
        for (double v : t.values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n);
}

MlpDenoiser train_model(const ExperimentConfig& c, const std::vector<Trajectory>& raw,
                        const std::vector<TrainingPair>& pairs, const fs::path& path) {
    double value_scale = population_std(raw);
    if (!(value_scale > 0.0)) value_scale = 1.0;
    auto data = raw;
    for (auto& t : data)
        for (auto& v : t.values) v /= value_scale;
    int time_scale = 1;
    for (const auto& p : pairs)
        for (int o : p.offsets) time_scale = std::max(time_scale, std::abs(o));
    auto model = MlpDenoiser::initialized(2 * c.k + 1, c.hidden, derive_seed(c.seed, kModelInit), 1.0, time_scale);
    model.set_value_scale(value_scale);
    TrainConfig tc = c.train;
    tc.seed = derive_seed(c.seed, kTraining);
    const auto result = train(model, data, pairs, tc);
    save_checkpoint(path, model);
    json pj = json::array();
    for (const auto& p : pairs) pj.push_back({{"offsets", p.offsets}, {"mask", p.mask}});
    write_json(sidecar_path(path), {{"epoch_loss", result.epoch_loss},
                                    {"smoothed_loss", result.smoothed_loss},
                                    {"value_scale", value_scale},
                                    {"time_scale", time_scale},
                                    {"parameters", model.params().size()},
                                    {"training_pairs", pj}});
    return model;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

SchemeSpec parse_scheme_spec(std::string_view text) {
    SchemeSpec s;
    s.name = std::string(text);
    const auto colon = text.find(':');
    s.kind = std::string(text.substr(0, colon));
    if (s.kind != "multiscale" && s.kind != "autoregressive" && s.kind != "hierarchy2")
        throw ConfigError("unknown scheme '" + s.name + "'");
    if (colon != std::string_view::npos) {
        const auto opt = text.substr(colon + 1);
        if (s.kind != "multiscale" || opt.substr(0, 4) != "past" || opt.size() == 4)
            throw ConfigError("unknown scheme option in '" + s.name + "'");
        int past = 0;
        for (char ch : opt.substr(4)) {
            if (ch < '0' || ch > '9') throw ConfigError("bad past limit in '" + s.name + "'");
            past = past * 10 + (ch - '0');
        }
        if (past < 1) throw ConfigError("past limit must be >= 1 in '" + s.name + "'");
        s.past = past;
    }
    return s;
}

InferenceScheme plan_scheme(const SchemeSpec& spec, int horizon, int k, const std::vector<Template>& templates) {
    if (spec.kind == "multiscale") return plan_multiscale(horizon, k, templates, spec.past);
    if (spec.kind == "autoregressive") return plan_autoregressive(horizon, k);
    if (spec.kind == "hierarchy2") return plan_hierarchy2(horizon, k);
    throw ConfigError("unknown scheme '" + spec.name + "'");
}

std::string scheme_file_stem(std::string_view name) {
    std::string s(name);
    for (char& ch : s)
        if (ch == ':' || ch == '/' || ch == ' ') ch = '_';
    return s;
}

void validate(const ExperimentConfig& c) {
    validate(c.synthetic);
    validate(c.train);
    validate(c.schedule);
    if (c.n_train < 1 || c.n_test < 1 || c.n_ensemble < 1) throw ConfigError("n_train, n_test and n_ensemble must be >= 1");
    if (c.k < 1 || c.horizon < c.k) throw ConfigError("need horizon >= k >= 1");
    if (!horizon_reachable(c.horizon, c.k))
        throw ConfigError("horizon " + std::to_string(c.horizon) + " cannot be covered with k = " + std::to_string(c.k));
    if (c.total < 1) throw ConfigError("total must be >= 1");
    if (c.schemes.empty()) throw ConfigError("no schemes requested");
    std::set<std::string> stems;
    for (const auto& s : c.schemes) {
        parse_scheme_spec(s);
        if (!stems.insert(scheme_file_stem(s)).second) throw ConfigError("scheme '" + s + "' is listed twice");
    }
    if (c.hidden.empty()) throw ConfigError("the denoiser needs at least one hidden layer");
    const auto buckets = experiment_buckets(c);
    if (buckets.empty()) throw ConfigError("no horizon buckets");
    for (const auto& b : buckets)
        if (b.hi > c.total) throw ConfigError("bucket " + b.label() + " reaches past total = " + std::to_string(c.total));
    if (c.synthetic.present_index < c.horizon)
        throw ConfigError("present_index must leave at least horizon observed steps before the present");
}

json to_json(const ExperimentConfig& c) {
    return {{"seed", c.seed},
            {"synthetic", synthetic_json(c.synthetic)},
            {"n_train", c.n_train},
            {"n_test", c.n_test},
            {"k", c.k},
            {"horizon", c.horizon},
            {"template_horizons", c.template_horizons},
            {"schemes", c.schemes},
            {"total", c.total},
            {"buckets", c.buckets},
            {"n_ensemble", c.n_ensemble},
            {"hidden", c.hidden},
            {"train", train_json(c.train)},
            {"separate_models", c.separate_models},
            {"sampler",
             {{"method", std::string(to_string(c.sampler))},
              {"steps", c.schedule.steps},
              {"sigma_min", c.schedule.sigma_min},
              {"sigma_max", c.schedule.sigma_max},
              {"rho", c.schedule.rho}}}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
    check_keys(j,
               {"seed", "synthetic", "n_train", "n_test", "k", "horizon", "template_horizons", "schemes", "total",
                "buckets", "n_ensemble", "hidden", "train", "separate_models", "sampler"},
               "experiment config");
    ExperimentConfig c;
    read_field(j, "seed", c.seed);
    if (j.contains("synthetic")) c.synthetic = synthetic_from(j.at("synthetic"));
    read_field(j, "n_train", c.n_train);
    read_field(j, "n_test", c.n_test);
    read_field(j, "k", c.k);
    read_field(j, "horizon", c.horizon);
    read_field(j, "template_horizons", c.template_horizons);
    read_field(j, "schemes", c.schemes);
    read_field(j, "total", c.total);
    read_field(j, "buckets", c.buckets);
    read_field(j, "n_ensemble", c.n_ensemble);
    read_field(j, "hidden", c.hidden);
    if (j.contains("train")) c.train = train_from(j.at("train"));
    read_field(j, "separate_models", c.separate_models);
    if (j.contains("sampler")) {
        const auto& s = j.at("sampler");
        check_keys(s, {"method", "steps", "sigma_min", "sigma_max", "rho"}, "sampler");
        std::string method;
        if (s.contains("method")) {
            read_field(s, "method", method);
            c.sampler = parse_sampler_method(method);
        }
        read_field(s, "steps", c.schedule.steps);
        read_field(s, "sigma_min", c.schedule.sigma_min);
        read_field(s, "sigma_max", c.schedule.sigma_max);
        read_field(s, "rho", c.schedule.rho);
    }
    return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
    try {
        return experiment_config_from_json(read_json(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::vector<Template> experiment_templates(const ExperimentConfig& c) {
    if (c.template_horizons.empty()) return standard_templates(c.horizon, c.k);
    return templates_for_horizons(c.template_horizons, c.k);
}

std::vector<HorizonBucket> experiment_buckets(const ExperimentConfig& c) {
    std::vector<HorizonBucket> out;
    for (const auto& b : c.buckets) out.push_back(parse_bucket(b));
    return out;
}

std::vector<MetricRow> evaluate_ensembles(const std::string& scheme, const SeriesTable& pred,
                                          const SeriesTable& target, int n_test, int present_index,
                                          const std::vector<HorizonBucket>& buckets) {
    if (n_test < 1 || pred.rows % static_cast<std::uint64_t>(n_test) != 0 ||
        target.rows % static_cast<std::uint64_t>(n_test) != 0 || pred.rows == 0 || target.rows == 0)
        throw DomainError("ensembles do not split into " + std::to_string(n_test) + " trajectories");
    if (pred.length != target.length) throw DomainError("predicted and target ensembles differ in length");
    const std::size_t np = pred.rows / static_cast<std::size_t>(n_test);
    const std::size_t nt = target.rows / static_cast<std::size_t>(n_test);
    const int total = static_cast<int>(pred.length) - present_index - 1;

    std::vector<MetricRow> rows;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        const auto steps = bucket_steps(buckets, b);
        if (steps.empty() || steps.back() > total)
            throw DomainError("bucket " + buckets[b].label() + " is outside the rollout");
        double w1 = 0.0, spec = 0.0;
        for (int i = 0; i < n_test; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            std::vector<double> a, c;
            a.reserve(np * steps.size());
            c.reserve(nt * steps.size());
            for (std::size_t m = 0; m < np; ++m)
                for (int t : steps) a.push_back(pred.row(iu * np + m)[static_cast<std::size_t>(present_index + t)]);
            for (std::size_t m = 0; m < nt; ++m)
                for (int t : steps) c.push_back(target.row(iu * nt + m)[static_cast<std::size_t>(present_index + t)]);
            w1 += wasserstein_1d(a, c);
            if (steps.size() >= 2) {
                const auto seg_start = static_cast<std::size_t>(present_index + steps.front());
                auto mean_profile = [&](const SeriesTable& tab, std::size_t n) {
                    SpectrumProfile acc;
                    for (std::size_t m = 0; m < n; ++m) {
                        const auto p = power_spectrum_1d(tab.row(iu * n + m).subspan(seg_start, steps.size()));
                        if (m == 0) {
                            acc = p;
                        } else {
                            for (std::size_t k = 0; k < p.bins(); ++k) acc.power[k] += p.power[k];
                        }
                    }
                    for (auto& v : acc.power) v /= static_cast<double>(n);
                    return acc;
                };
                spec += spectrum_mae(mean_profile(pred, np), mean_profile(target, nt));
            }
        }
        rows.push_back({scheme, "wasserstein", buckets[b].label(), w1 / n_test});
        if (steps.size() >= 2) rows.push_back({scheme, "spectrum_mae", buckets[b].label(), spec / n_test});
    }
    return rows;
}

void write_metrics_csv(const fs::path& path, const std::vector<MetricRow>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "scheme,metric,bucket,value\n";
    for (const auto& r : rows) os << r.scheme << ',' << r.metric << ',' << r.bucket << ',' << format_value(r.value) << '\n';
    if (!os) throw IoError("failed writing " + path.string());
}

std::vector<MetricRow> read_metrics_csv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line) || line != "scheme,metric,bucket,value")
        throw IoError(path.string() + ": missing metrics header");
    std::vector<MetricRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        MetricRow r;
        std::string value;
        if (!std::getline(ss, r.scheme, ',') || !std::getline(ss, r.metric, ',') || !std::getline(ss, r.bucket, ',') ||
            !std::getline(ss, value))
            throw IoError(path.string() + ": malformed row '" + line + "'");
        try {
            r.value = std::stod(value);
        } catch (const std::exception&) {
            throw IoError(path.string() + ": bad value '" + value + "'");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

fs::path artifact::model(const fs::path& dir, std::string_view scheme, bool separate) {
    return separate ? dir / ("model_" + scheme_file_stem(scheme) + ".bin") : dir / kModel;
}

fs::path artifact::rollout(const fs::path& dir, std::string_view scheme) {
    return dir / ("rollout_" + scheme_file_stem(scheme) + ".bin");
}

void stage_generate(const ExperimentConfig& c, const fs::path& dir) {
    tagged("generate", [&] {
        validate(c);
        fs::create_directories(dir);
        const auto train_seed = derive_seed(c.seed, kTrainData);
        const auto test_seed = derive_seed(c.seed, kTestData);
        write_series(dir / artifact::kTrain, trajectories_to_table(generate_dataset(c.synthetic, c.n_train, train_seed)));
        write_json(sidecar_path(dir / artifact::kTrain),
                   {{"synthetic", synthetic_json(c.synthetic)}, {"base_seed", train_seed}, {"rows", c.n_train}});

        const auto test = generate_dataset(c.synthetic, c.n_test, test_seed);
        write_series(dir / artifact::kTest, trajectories_to_table(test));
        std::vector<double> phases;
        for (int i = 0; i < c.n_test; ++i) phases.push_back(dataset_member_config(c.synthetic, i, test_seed).phase);
        write_json(sidecar_path(dir / artifact::kTest), {{"synthetic", synthetic_json(c.synthetic)},
                                                         {"base_seed", test_seed},
                                                         {"rows", c.n_test},
                                                         {"phases", phases}});

        // Target ensemble: observed past, then the true trend plus fresh noise.
        const int past = c.synthetic.present_index;
        SeriesTable target;
        target.rows = static_cast<std::uint64_t>(c.n_test) * static_cast<std::uint64_t>(c.n_ensemble);
        target.length = static_cast<std::uint64_t>(past + 1 + c.total);
        const auto noise_seed = derive_seed(c.seed, kTargetNoise);
        for (int i = 0; i < c.n_test; ++i) {
            const auto member_cfg = dataset_member_config(c.synthetic, i, test_seed);
            for (int m = 0; m < c.n_ensemble; ++m) {
                CounterRng rng(derive_seed(derive_seed(noise_seed, static_cast<std::uint64_t>(i)),
                                           static_cast<std::uint64_t>(m)));
                for (int k = 0; k <= past; ++k) target.values.push_back(test[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(k)]);
                for (int t = 1; t <= c.total; ++t)
                    target.values.push_back(sinusoid_trend(member_cfg, past + t) + c.synthetic.noise_std * rng.normal());
            }
        }
        write_series(dir / artifact::kTarget, target);
        write_json(sidecar_path(dir / artifact::kTarget),
                   {{"n_test", c.n_test}, {"n_ensemble", c.n_ensemble}, {"present_index", past}, {"total", c.total}});
    });
}

void stage_train(const ExperimentConfig& c, const fs::path& dir) {
    tagged("train", [&] {
        validate(c);
        const auto data = table_to_trajectories(read_series(dir / artifact::kTrain), c.synthetic.present_index);
        const auto specs = scheme_specs(c);
        if (c.separate_models) {
            for (const auto& s : specs) train_model(c, data, pairs_for(c, {s}), artifact::model(dir, s.name, true));
        } else {
            train_model(c, data, pairs_for(c, specs), artifact::model(dir, "", false));
        }
    });
}

void stage_rollout(const ExperimentConfig& c, const fs::path& dir) {
    tagged("rollout", [&] {
        validate(c);
        const auto test = read_series(dir / artifact::kTest);
        if (test.rows != static_cast<std::uint64_t>(c.n_test))
            throw ConfigError("test set has " + std::to_string(test.rows) + " trajectories, config expects " +
                              std::to_string(c.n_test));
        const int past = c.synthetic.present_index;
        const auto templates = experiment_templates(c);
        std::vector<MlpDenoiser> shared;
        if (!c.separate_models) shared.push_back(load_checkpoint(artifact::model(dir, "", false)));

        for (const auto& spec : scheme_specs(c)) {
            const auto scheme = plan_scheme(spec, c.horizon, c.k, templates);
            const auto full = c.total > scheme.horizon ? extend_scheme(scheme, c.total) : scheme;
            if (const auto report = validate_scheme(full); !report.ok())
                throw PlanningError("scheme " + spec.name + " fails validation: " + report.message, report.indices);
            const MlpDenoiser model = c.separate_models ? load_checkpoint(artifact::model(dir, spec.name, true)) : shared.front();
            if (model.window() != 2 * c.k + 1) throw ConfigError("checkpoint window does not match k");

            SeriesTable out;
            out.rows = static_cast<std::uint64_t>(c.n_test) * static_cast<std::uint64_t>(c.n_ensemble);
            out.length = static_cast<std::uint64_t>(past + 1 + c.total);
            std::size_t calls = 0;
            json provenance = json::array();
            for (int i = 0; i < c.n_test; ++i) {
                const auto row = test.row(static_cast<std::size_t>(i));
                RolloutRequest req;
                req.scheme = scheme;
                req.observed = Trajectory{std::vector<double>(row.begin(), row.begin() + past + 1), past};
                req.total = c.total;
                req.n_ensemble = c.n_ensemble;
                req.sampler.schedule = c.schedule;
                req.sampler.method = c.sampler;
                req.sampler.seed = derive_seed(derive_seed(c.seed, kRollout), static_cast<std::uint64_t>(i));
                req.value_scale = model.value_scale();
                const auto e = run(model, req);
                calls += e.sampler_calls;
                for (const auto& m : e.members) out.values.insert(out.values.end(), m.values.begin(), m.values.end());
                if (i == 0)
                    for (const auto& p : e.provenance) provenance.push_back({p.action, p.block});
            }
            const auto path = artifact::rollout(dir, spec.name);
            write_series(path, out);
            write_json(sidecar_path(path), {{"scheme", spec.name},
                                            {"plan", scheme_to_json(scheme)},
                                            {"n_test", c.n_test},
                                            {"n_ensemble", c.n_ensemble},
                                            {"present_index", past},
                                            {"total", c.total},
                                            {"sampler_calls", calls},
                                            {"provenance", provenance}});
        }
    });
}

std::vector<MetricRow> stage_eval(const ExperimentConfig& c, const fs::path& dir) {
    return tagged("eval", [&] {
        validate(c);
        const auto target = read_series(dir / artifact::kTarget);
        const auto buckets = experiment_buckets(c);
        std::vector<MetricRow> rows;
        for (const auto& name : c.schemes) {
            const auto pred = read_series(artifact::rollout(dir, name));
            const auto more = evaluate_ensembles(name, pred, target, c.n_test, c.synthetic.present_index, buckets);
            rows.insert(rows.end(), more.begin(), more.end());
        }
        write_metrics_csv(dir / artifact::kResults, rows);
        write_json(dir / artifact::kSummary, summarize(c, rows));
        return rows;
    });
}

std::vector<MetricRow> run_experiment(const ExperimentConfig& c, const fs::path& dir) {
    tagged("config", [&] {
        validate(c);
        fs::create_directories(dir);
        write_json(dir / artifact::kConfig, to_json(c));
    });
    stage_generate(c, dir);
    stage_train(c, dir);
    stage_rollout(c, dir);
    return stage_eval(c, dir);
}

json summarize(const ExperimentConfig& c, const std::vector<MetricRow>& rows) {
    const auto far = experiment_buckets(c).back().label();
    json w = json::object(), s = json::object();
    for (const auto& r : rows) {
        if (r.bucket != far) continue;
        if (r.metric == "wasserstein") w[r.scheme] = r.value;
        if (r.metric == "spectrum_mae") s[r.scheme] = r.value;
    }
    json out = {{"far_bucket", far}, {"wasserstein", w}, {"spectrum_mae", s}};
    if (w.contains("autoregressive") && w.contains("multiscale") && w["multiscale"].get<double>() > 0.0)
        out["ratio_autoregressive_to_multiscale"] = w["autoregressive"].get<double>() / w["multiscale"].get<double>();
    return out;
}

}  // namespace msd
