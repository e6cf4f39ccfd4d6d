#pragma once

#include "msd/denoiser.hpp"
#include "msd/diffusion.hpp"
#include "msd/io.hpp"
#include "msd/metrics.hpp"
#include "msd/scheme.hpp"
#include "msd/synthetic.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace msd {

/// A scheme name as used on the command line: "multiscale",
/// "multiscale:pastN", "autoregressive" or "hierarchy2".
struct SchemeSpec {
    std::string name;
    std::string kind;
    int past = -1;  // multiscale lookback limit, -1 = none
};

SchemeSpec parse_scheme_spec(std::string_view text);

// One block of horizon `horizon`.
InferenceScheme plan_scheme(const SchemeSpec& spec, int horizon, int k, const std::vector<Template>& templates);

// File-name friendly form of a scheme name ("multiscale:past3" -> "multiscale_past3").
std::string scheme_file_stem(std::string_view name);

struct ExperimentConfig {
    std::uint64_t seed = 0;
    SinusoidConfig synthetic;
    int n_train = 512;
    int n_test = 16;
    int k = 3;
    int horizon = 9;
    std::vector<int> template_horizons;  // empty = every template up to the horizon
    std::vector<std::string> schemes{"multiscale", "multiscale:past3", "autoregressive"};
    int total = 36;
    std::vector<std::string> buckets{"1:4", "4:16", "16:36"};
    int n_ensemble = 128;
    std::vector<int> hidden{128, 128, 128};
    TrainConfig train;
    bool separate_models = false;  // one denoiser per scheme instead of a shared one
    NoiseSchedule schedule;
    SamplerMethod sampler = SamplerMethod::adams_bashforth_2;
};

void validate(const ExperimentConfig& c);

nlohmann::json to_json(const ExperimentConfig& c);
// Missing fields keep their defaults; unknown fields raise ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

std::vector<Template> experiment_templates(const ExperimentConfig& c);
std::vector<HorizonBucket> experiment_buckets(const ExperimentConfig& c);

/// Error raised by a pipeline stage, tagged with the stage name.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct MetricRow {
    std::string scheme;
    std::string metric;
    std::string bucket;
    double value = 0.0;
};

/// Compares a predicted ensemble with a target ensemble of the same layout:
/// n_test blocks of n_ensemble rows, each row past + future. Per test
/// trajectory, W1 compares the values of all members over the bucket's steps
/// pooled together; the spectrum error compares member-averaged 1D spectra
/// of the bucket segment. Both are averaged over test trajectories.
std::vector<MetricRow> evaluate_ensembles(const std::string& scheme, const SeriesTable& pred,
                                          const SeriesTable& target, int n_test, int present_index,
                                          const std::vector<HorizonBucket>& buckets);

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics_csv(const std::filesystem::path& path);

// Stage artifacts inside the output directory.
namespace artifact {
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kTrain = "train.bin";
inline constexpr const char* kTest = "test.bin";
inline constexpr const char* kTarget = "target.bin";
inline constexpr const char* kModel = "model.bin";
inline constexpr const char* kResults = "results.csv";
inline constexpr const char* kSummary = "summary.json";
std::filesystem::path model(const std::filesystem::path& dir, std::string_view scheme, bool separate);
std::filesystem::path rollout(const std::filesystem::path& dir, std::string_view scheme);
}  // namespace artifact

/// generate: training and held-out trajectories, and the target ensemble
/// (true future trend plus fresh noise) for each held-out trajectory.
void stage_generate(const ExperimentConfig& c, const std::filesystem::path& dir);
/// train: one denoiser on the union of the schemes' (window, mask) pairs,
/// or one per scheme when separate_models is set.
void stage_train(const ExperimentConfig& c, const std::filesystem::path& dir);
/// rollout: n_ensemble members per held-out trajectory and scheme.
void stage_rollout(const ExperimentConfig& c, const std::filesystem::path& dir);
/// eval: results.csv and summary.json.
std::vector<MetricRow> stage_eval(const ExperimentConfig& c, const std::filesystem::path& dir);

// All stages in order; writes config.json first.
std::vector<MetricRow> run_experiment(const ExperimentConfig& c, const std::filesystem::path& dir);

// Far-bucket W1 per scheme plus the autoregressive / multiscale ratio when
// both are present.
nlohmann::json summarize(const ExperimentConfig& c, const std::vector<MetricRow>& rows);

}  // namespace msd
