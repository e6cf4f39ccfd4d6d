#pragma once

#include "msd/diffusion.hpp"
#include "msd/scheme.hpp"
#include "msd/synthetic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace msd {

/// Preconditioned multilayer perceptron denoiser for windows of 2K+1 steps.
///
/// Network input per window: c_in * x_in, the 0/1 mask, time offsets divided
/// by `time_scale`, and c_noise = ln(sigma) / 4. Hidden layers use SiLU. The
/// output is D = c_skip * x_in + c_out * net(...) with
///   c_skip = sd^2 / (sigma^2 + sd^2), c_out = sigma sd / sqrt(sigma^2 + sd^2),
///   c_in = 1 / sqrt(sigma^2 + sd^2), sd = data_std.
///
/// Parameters live in one flat vector: for each layer the weight matrix
/// (out x in, column-major) followed by the bias.
class MlpDenoiser final : public DenoiserModel {
public:
    MlpDenoiser(int window, std::vector<int> hidden, double data_std = 1.0, double time_scale = 1.0);

    // Weights ~ N(0, 1/fan_in), biases zero, output layer zero.
    static MlpDenoiser initialized(int window, std::vector<int> hidden, std::uint64_t seed, double data_std = 1.0,
                                   double time_scale = 1.0);

    using DenoiserModel::denoise;
    Eigen::MatrixXd denoise(const Eigen::MatrixXd& x_in, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& mask,
                            const Eigen::MatrixXd& time_indices) const override;

    int window() const noexcept { return window_; }
    int input_dim() const noexcept { return 3 * window_ + 1; }
    // [input, hidden..., output]
    const std::vector<int>& layer_widths() const noexcept { return widths_; }
    std::size_t layers() const noexcept { return widths_.size() - 1; }

    std::vector<double>& params() noexcept { return params_; }
    const std::vector<double>& params() const noexcept { return params_; }

    double data_std() const noexcept { return data_std_; }
    double time_scale() const noexcept { return time_scale_; }
    // Scale dividing raw trajectory values before they reach the model.
    double value_scale() const noexcept { return value_scale_; }
    void set_value_scale(double s) noexcept { value_scale_ = s; }

    Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
    Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
    std::size_t weight_offset(std::size_t layer) const noexcept { return offsets_[layer]; }

    struct Preconditioning {
        double c_skip;
        double c_out;
        double c_in;
        double c_noise;
    };
    Preconditioning preconditioning(double sigma) const;

    // Network input matrix (input_dim x batch).
    Eigen::MatrixXd network_input(const Eigen::MatrixXd& x_in, const Eigen::VectorXd& sigma,
                                  const Eigen::MatrixXd& mask, const Eigen::MatrixXd& time_indices) const;

private:
    int window_;
    std::vector<int> widths_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
    double data_std_;
    double time_scale_;
    double value_scale_ = 1.0;
};

std::vector<double> forward(const MlpDenoiser& d, std::span<const double> x_in, double sigma,
                            const std::vector<bool>& mask, std::span<const int> time_indices);

/// One training minibatch; columns are samples. The network sees
/// (1 - m) * (clean + sigma * eps) + m * clean.
struct TrainBatch {
    Eigen::MatrixXd clean;
    Eigen::MatrixXd eps;
    Eigen::MatrixXd mask;
    Eigen::MatrixXd time_indices;
    Eigen::VectorXd sigma;
    Eigen::VectorXd weight;  // per-sample loss weight; empty means 1
};

struct LossGradient {
    double loss = 0.0;
    std::vector<double> grad;
};

// Batch mean of weight_b * mean_i (D_ib - clean_ib)^2.
double batch_loss(const MlpDenoiser& d, const TrainBatch& batch);

// Loss and its exact gradient with respect to d.params().
LossGradient backward(const MlpDenoiser& d, const TrainBatch& batch);

enum class MaskSampling { scheme_templates, uniform_random };
enum class LossWeighting { uniform, edm };

std::string_view to_string(MaskSampling m) noexcept;
MaskSampling parse_mask_sampling(std::string_view name);
std::string_view to_string(LossWeighting w) noexcept;
LossWeighting parse_loss_weighting(std::string_view name);

struct TrainConfig {
    int epochs = 40;
    int steps_per_epoch = 200;
    int batch_size = 64;
    double learning_rate = 1e-3;
    double lr_final_fraction = 0.05;  // cosine decay target
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double sigma_min = 0.01;  // training noise levels, log-uniform
    double sigma_max = 80.0;
    std::uint64_t seed = 0;
    MaskSampling mask_sampling = MaskSampling::scheme_templates;
    LossWeighting weighting = LossWeighting::edm;
};

void validate(const TrainConfig& c);

/// A window and conditioning mask the model is trained on.
struct TrainingPair {
    std::vector<int> offsets;
    std::vector<bool> mask;

    friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

// Distinct (window offsets, mask) pairs used by the scheme's actions.
std::vector<TrainingPair> training_pairs(const InferenceScheme& s);
void merge_training_pairs(std::vector<TrainingPair>& into, const std::vector<TrainingPair>& more);

struct TrainResult {
    std::vector<double> epoch_loss;     // mean minibatch loss per epoch
    std::vector<double> smoothed_loss;  // exponential moving average of epoch_loss
};

/// Adam on the weighted masked denoising loss. Each sample draws a
/// trajectory, a training pair, a window position, sigma (log-uniform) and
/// noise from the seeded generator. Dataset values are used as given.
TrainResult train(MlpDenoiser& d, const std::vector<Trajectory>& dataset, const std::vector<TrainingPair>& pairs,
                  const TrainConfig& cfg);

// Draws one batch exactly as train() does.
TrainBatch draw_batch(const MlpDenoiser& d, const std::vector<Trajectory>& dataset,
                      const std::vector<TrainingPair>& pairs, const TrainConfig& cfg, CounterRng& rng);

/// Checkpoint: magic "MSDC", u32 version, u32 layer count + 1, u32 widths...,
/// f64 data_std, f64 time_scale, f64 value_scale, u64 parameter count, then
/// the parameters, all little-endian.
void save_checkpoint(const std::filesystem::path& path, const MlpDenoiser& d);
MlpDenoiser load_checkpoint(const std::filesystem::path& path);

}  // namespace msd
