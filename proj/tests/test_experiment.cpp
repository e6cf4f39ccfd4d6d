#include "doctest.h"

#include "msd/errors.hpp"
#include "msd/experiment.hpp"
#include "msd/rollout.hpp"
#include "msd/scheme_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace msd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

ExperimentConfig tiny_config() {
    ExperimentConfig c;
    c.n_train = 32;
    c.n_test = 2;
    c.n_ensemble = 4;
    c.total = 18;
    c.buckets = {"1:4", "4:9", "9:18"};
    c.hidden = {16, 16};
    c.train.epochs = 2;
    c.train.steps_per_epoch = 10;
    c.train.batch_size = 8;
    c.schedule.steps = 10;
    c.seed = 5;
    return c;
}

SeriesTable constant_table(std::uint64_t rows, std::uint64_t length, double v) {
    return SeriesTable{rows, length, std::vector<double>(rows * length, v)};
}

}  // namespace

TEST_CASE("scheme names") {
    const auto m = parse_scheme_spec("multiscale");
    CHECK(m.kind == "multiscale");
    CHECK(m.past == -1);
    const auto p = parse_scheme_spec("multiscale:past3");
    CHECK(p.kind == "multiscale");
    CHECK(p.past == 3);
    CHECK(parse_scheme_spec("hierarchy2").kind == "hierarchy2");
    CHECK_THROWS_AS(parse_scheme_spec("diagonal"), ConfigError);
    CHECK_THROWS_AS(parse_scheme_spec("autoregressive:past3"), ConfigError);
    CHECK_THROWS_AS(parse_scheme_spec("multiscale:pastx"), ConfigError);
    CHECK_THROWS_AS(parse_scheme_spec("multiscale:past0"), ConfigError);
    CHECK(scheme_file_stem("multiscale:past3") == "multiscale_past3");

    const auto past3 = plan_scheme(p, 9, 3, standard_templates(9, 3));
    CHECK(max_lookback(past3) <= 3);
    CHECK(validate_scheme(past3).ok());
    CHECK(plan_scheme(parse_scheme_spec("autoregressive"), 9, 3, {}).actions.size() == 3);
}

TEST_CASE("config json round trip and validation") {
    ExperimentConfig c = tiny_config();
    c.schemes = {"multiscale", "hierarchy2"};
    c.train.weighting = LossWeighting::uniform;
    c.sampler = SamplerMethod::euler_maruyama;
    const auto back = experiment_config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(back.schemes == c.schemes);
    CHECK(back.train.weighting == LossWeighting::uniform);

    const auto defaults = experiment_config_from_json(nlohmann::json::object());
    CHECK(defaults.total == 36);
    CHECK(defaults.synthetic.noise_std == 0.5);
    CHECK(defaults.schemes.size() == 3);

    CHECK_THROWS_AS(experiment_config_from_json({{"totl", 3}}), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json({{"train", {{"epoch", 3}}}}), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json({{"total", "many"}}), ConfigError);

    auto bad = tiny_config();
    bad.buckets = {"1:4", "4:40"};
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = tiny_config();
    bad.horizon = 10;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = tiny_config();
    bad.schemes = {"multiscale", "multiscale"};
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = tiny_config();
    bad.n_ensemble = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("evaluation of identical and shifted ensembles") {
    const std::vector<HorizonBucket> buckets{parse_bucket("1:2"), parse_bucket("2:4")};
    const auto a = constant_table(6, 7, 1.0);
    for (const auto& r : evaluate_ensembles("x", a, a, 2, 2, buckets)) CHECK(r.value == 0.0);

    CounterRng rng(3);
    SeriesTable noisy{6, 7, {}};
    for (int i = 0; i < 42; ++i) noisy.values.push_back(rng.normal());
    for (const auto& r : evaluate_ensembles("x", noisy, noisy, 3, 2, buckets)) CHECK(r.value == 0.0);

    auto shifted = noisy;
    for (auto& v : shifted.values) v += 0.7;
    const auto rows = evaluate_ensembles("x", shifted, noisy, 3, 2, buckets);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].metric == "wasserstein");
    CHECK(rows[0].bucket == "1:2");
    CHECK(std::abs(rows[0].value - 0.7) < 1e-12);
    CHECK(std::abs(rows[2].value - 0.7) < 1e-12);

    // Fewer target members than predicted ones is allowed.
    const auto small = constant_table(3, 7, 0.0);
    CHECK(evaluate_ensembles("x", constant_table(6, 7, 2.0), small, 3, 2, buckets)[0].value == doctest::Approx(2.0));
    CHECK_THROWS_AS(evaluate_ensembles("x", a, constant_table(6, 8, 1.0), 2, 2, buckets), DomainError);
    CHECK_THROWS_AS(evaluate_ensembles("x", a, a, 4, 2, buckets), DomainError);
    const std::vector<HorizonBucket> too_far{parse_bucket("1:9")};
    CHECK_THROWS_AS(evaluate_ensembles("x", a, a, 2, 2, too_far), DomainError);
}

TEST_CASE("metrics csv round trip") {
    TempDir dir("msd_test_csv");
    const std::vector<MetricRow> rows{{"multiscale", "wasserstein", "1:4", 0.125}, {"ar", "spectrum_mae", "4:16", 2.5}};
    write_metrics_csv(dir.path / "r.csv", rows);
    CHECK(slurp(dir.path / "r.csv") == "scheme,metric,bucket,value\nmultiscale,wasserstein,1:4,0.125\nar,spectrum_mae,4:16,2.5\n");
    const auto back = read_metrics_csv(dir.path / "r.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[1].value == 2.5);
    {
        std::ofstream os(dir.path / "bad.csv");
        os << "a,b\n";
    }
    CHECK_THROWS_AS(read_metrics_csv(dir.path / "bad.csv"), IoError);
}

TEST_CASE("experiment is deterministic and matches the staged pipeline") {
    TempDir a("msd_test_exp_a"), b("msd_test_exp_b"), staged("msd_test_exp_staged");
    const auto c = tiny_config();
    const auto rows = run_experiment(c, a.path);
    run_experiment(c, b.path);
    CHECK(slurp(a.path / artifact::kResults) == slurp(b.path / artifact::kResults));
    CHECK(slurp(a.path / artifact::kSummary) == slurp(b.path / artifact::kSummary));
    CHECK(rows.size() == 3 * 3 * 2);

    stage_generate(c, staged.path);
    stage_train(c, staged.path);
    stage_rollout(c, staged.path);
    stage_eval(c, staged.path);
    CHECK(slurp(a.path / artifact::kResults) == slurp(staged.path / artifact::kResults));
    CHECK(slurp(a.path / artifact::kModel) == slurp(staged.path / artifact::kModel));

    auto other = c;
    other.seed = 6;
    TempDir d("msd_test_exp_d");
    run_experiment(other, d.path);
    CHECK(slurp(a.path / artifact::kResults) != slurp(d.path / artifact::kResults));

    // Rollout artifacts: layout, observed past, provenance and call count.
    const auto pred = read_series(artifact::rollout(a.path, "multiscale"));
    const auto test = read_series(a.path / artifact::kTest);
    CHECK(pred.rows == 2 * 4);
    CHECK(pred.length == 60 + 18);
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t t = 0; t < 60; ++t) CHECK(pred.row(4 + m)[t] == test.row(1)[t]);
    for (double v : pred.values) CHECK(std::isfinite(v));
    const auto side = read_json(sidecar_path(artifact::rollout(a.path, "multiscale")));
    CHECK(side["sampler_calls"] == 2 * 4 * 6);
    CHECK(side["provenance"].size() == 18);
    CHECK(scheme_from_json(side["plan"]).horizon == 9);
}

TEST_CASE("eval of a rollout equal to the target gives zero distance") {
    TempDir dir("msd_test_exp_eval");
    auto c = tiny_config();
    c.schemes = {"autoregressive"};
    stage_generate(c, dir.path);
    fs::copy_file(dir.path / artifact::kTarget, artifact::rollout(dir.path, "autoregressive"));
    for (const auto& r : stage_eval(c, dir.path)) CHECK(r.value == 0.0);
}

TEST_CASE("a single ensemble member and separate models both run") {
    TempDir dir("msd_test_exp_single");
    auto c = tiny_config();
    c.n_ensemble = 1;
    c.separate_models = true;
    c.schemes = {"multiscale", "hierarchy2"};
    const auto rows = run_experiment(c, dir.path);
    for (const auto& r : rows) CHECK(std::isfinite(r.value));
    CHECK(fs::exists(artifact::model(dir.path, "hierarchy2", true)));
    CHECK(!fs::exists(dir.path / artifact::kModel));
}

TEST_CASE("zero-weight checkpoint rolls out as the skip path") {
    TempDir dir("msd_test_exp_zero");
    auto c = tiny_config();
    c.schemes = {"multiscale"};
    stage_generate(c, dir.path);
    MlpDenoiser zero(7, c.hidden, 1.0, 9.0);
    zero.set_value_scale(0.8);
    save_checkpoint(dir.path / artifact::kModel, zero);
    stage_rollout(c, dir.path);
    const auto pred = read_series(artifact::rollout(dir.path, "multiscale"));
    for (double v : pred.values) CHECK(std::isfinite(v));

    // With data_std = 1 the skip path is the N(0, 1) posterior mean, so the
    // first window matches the analytic denoiser in normalized units.
    const auto test = read_series(dir.path / artifact::kTest);
    const auto s = plan_multiscale(9, 3, standard_templates(9, 3));
    const auto win = s.window(0);
    MaskedSample w{std::vector<double>(7, 0.0), s.actions[0].cond_mask, win};
    for (std::size_t i = 0; i < 4; ++i) w.values[i] = test.row(0)[static_cast<std::size_t>(59 + win[i])] / 0.8;
    SamplerConfig cfg;
    cfg.schedule = c.schedule;
    cfg.seed = rollout_seed(derive_seed(derive_seed(c.seed, 6), 0), 0, 0);
    const auto out = sample(GaussianDenoiser(1.0), w, cfg);
    for (std::size_t i = 4; i < 7; ++i)
        CHECK(pred.row(0)[static_cast<std::size_t>(59 + win[i])] == doctest::Approx(out[i] * 0.8));
}

TEST_CASE("stage errors name the stage") {
    TempDir dir("msd_test_exp_err");
    const auto c = tiny_config();
    try {
        stage_train(c, dir.path);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "train");
        CHECK(std::string(e.what()).find("train.bin") != std::string::npos);
    }
    CHECK_THROWS_AS(stage_rollout(c, dir.path), StageError);
    CHECK_THROWS_AS(stage_eval(c, dir.path), StageError);
    auto bad = c;
    bad.total = 0;
    CHECK_THROWS_AS(stage_generate(bad, dir.path), StageError);
}
