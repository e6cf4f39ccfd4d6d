#pragma once

#include "msd/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace msd {

/// Power-law interpolation between sigma_max and sigma_min:
/// sigma_i = (smax^(1/rho) + i/(steps-1) (smin^(1/rho) - smax^(1/rho)))^rho.
struct NoiseSchedule {
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    int steps = 100;
    double rho = 7.0;

    std::vector<double> levels() const;
};

void validate(const NoiseSchedule& s);

/// A window of a trajectory. mask[i] marks clean conditioning entries;
/// time_indices are the window offsets fed to the denoiser.
struct MaskedSample {
    std::vector<double> values;
    std::vector<bool> mask;
    std::vector<int> time_indices;

    std::size_t size() const noexcept { return values.size(); }
};

void validate(const MaskedSample& s);

enum class SamplerMethod { euler_maruyama, adams_bashforth_2 };

std::string_view to_string(SamplerMethod m) noexcept;
SamplerMethod parse_sampler_method(std::string_view name);

struct SamplerConfig {
    NoiseSchedule schedule;
    SamplerMethod method = SamplerMethod::adams_bashforth_2;
    std::uint64_t seed = 0;
};

/// D(x, sigma, m): estimate of clean data from a noisy window.
///
/// Batched: every matrix has one column per window (rows = window entries),
/// `sigma` one entry per column. `mask` is 0/1. Implementations must be
/// safe to call concurrently.
class DenoiserModel {
public:
    virtual ~DenoiserModel() = default;

    virtual Eigen::MatrixXd denoise(const Eigen::MatrixXd& x_in, const Eigen::VectorXd& sigma,
                                    const Eigen::MatrixXd& mask, const Eigen::MatrixXd& time_indices) const = 0;

    std::vector<double> denoise(std::span<const double> x_in, double sigma, const std::vector<bool>& mask,
                                std::span<const int> time_indices) const;
};

/// Exact posterior mean for i.i.d. N(0, tau^2) data: tau^2 / (tau^2 + sigma^2) * x.
class GaussianDenoiser final : public DenoiserModel {
public:
    explicit GaussianDenoiser(double tau = 1.0) : tau_(tau) {}

    using DenoiserModel::denoise;
    Eigen::MatrixXd denoise(const Eigen::MatrixXd& x_in, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& mask,
                            const Eigen::MatrixXd& time_indices) const override;

    double tau() const noexcept { return tau_; }

private:
    double tau_;
};

struct NoisedSample {
    std::vector<double> noisy;
    std::vector<double> eps;
};

NoisedSample add_noise(std::span<const double> x, double sigma, CounterRng& rng);

// (1 - m) * (x + sigma eps) + m * x
std::vector<double> conditional_input(std::span<const double> x, std::span<const double> eps, double sigma,
                                      const std::vector<bool>& mask);

// Masked denoising loss for one noise draw, averaged over entries.
double conditional_loss(const DenoiserModel& d, const MaskedSample& sample, double sigma, CounterRng& rng);

// Unmasked denoising loss for one noise draw.
double denoising_loss(const DenoiserModel& d, std::span<const double> x, std::span<const int> time_indices,
                      double sigma, CounterRng& rng);

// (D(x_s, sigma, m) - x_s) / sigma^2
std::vector<double> score_from_denoiser(const DenoiserModel& d, std::span<const double> x_s, double sigma,
                                        const std::vector<bool>& mask, std::span<const int> time_indices);

/// Reverse-SDE sampling of the unmasked entries of each window, integrating
/// in u = sigma^2: x <- x + du * score + sqrt(du) z (Euler-Maruyama) or with a
/// variable-step two-step Adams-Bashforth drift. The last step goes to
/// sigma = 0 without noise. Masked entries are reset to their clean values
/// after every step. Window i draws its noise from CounterRng(seeds[i]).
std::vector<std::vector<double>> sample_batch(const DenoiserModel& d, std::span<const MaskedSample> windows,
                                              std::span<const std::uint64_t> seeds, const NoiseSchedule& schedule,
                                              SamplerMethod method);

std::vector<double> sample(const DenoiserModel& d, const MaskedSample& cond, const SamplerConfig& cfg);

}  // namespace msd
