#include "msd/diffusion.hpp"

#include "msd/errors.hpp"

#include <cmath>
#include <string>

namespace msd {

namespace {

Eigen::MatrixXd column(std::span<const double> v) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
    return m;
}

Eigen::MatrixXd column(const std::vector<bool>& v) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i] ? 1.0 : 0.0;
    return m;
}

Eigen::MatrixXd column(std::span<const int> v) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
    return m;
}

std::vector<double> to_vector(const Eigen::MatrixXd& m, Eigen::Index col) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, col);
    return out;
}

double mean_squared_error(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

}  // namespace

std::vector<double> NoiseSchedule::levels() const {
    validate(*this);
    std::vector<double> out(static_cast<std::size_t>(steps));
    const double hi = std::pow(sigma_max, 1.0 / rho);
    const double lo = std::pow(sigma_min, 1.0 / rho);
    for (int i = 0; i < steps; ++i)
        out[static_cast<std::size_t>(i)] = std::pow(hi + static_cast<double>(i) / (steps - 1) * (lo - hi), rho);
    out.front() = sigma_max;
    out.back() = sigma_min;
    return out;
}

void validate(const NoiseSchedule& s) {
    if (!(s.sigma_min > 0.0)) throw DomainError("sigma_min must be > 0");
    if (!(s.sigma_max > s.sigma_min)) throw DomainError("sigma_max must exceed sigma_min");
    if (s.steps < 2) throw DomainError("noise schedule needs at least 2 steps");
    if (!(s.rho > 0.0)) throw DomainError("rho must be > 0");
}

void validate(const MaskedSample& s) {
    if (s.values.size() != s.mask.size() || s.values.size() != s.time_indices.size())
        throw DomainError("masked sample fields differ in length");
    if (s.values.empty()) throw DomainError("masked sample is empty");
}

std::string_view to_string(SamplerMethod m) noexcept {
    return m == SamplerMethod::euler_maruyama ? "euler_maruyama" : "adams_bashforth_2";
}

SamplerMethod parse_sampler_method(std::string_view name) {
    if (name == "euler_maruyama") return SamplerMethod::euler_maruyama;
    if (name == "adams_bashforth_2") return SamplerMethod::adams_bashforth_2;
    throw DomainError("unknown sampler method '" + std::string(name) + "'");
}

std::vector<double> DenoiserModel::denoise(std::span<const double> x_in, double sigma, const std::vector<bool>& mask,
                                           std::span<const int> time_indices) const {
    if (mask.size() != x_in.size() || time_indices.size() != x_in.size())
        throw DomainError("denoiser inputs differ in length");
    Eigen::VectorXd s(1);
    s(0) = sigma;
    return to_vector(denoise(column(x_in), s, column(mask), column(time_indices)), 0);
}

Eigen::MatrixXd GaussianDenoiser::denoise(const Eigen::MatrixXd& x_in, const Eigen::VectorXd& sigma,
                                          const Eigen::MatrixXd&, const Eigen::MatrixXd&) const {
    Eigen::MatrixXd out = x_in;
    const double t2 = tau_ * tau_;
    for (Eigen::Index c = 0; c < out.cols(); ++c) out.col(c) *= t2 / (t2 + sigma(c) * sigma(c));
    return out;
}

NoisedSample add_noise(std::span<const double> x, double sigma, CounterRng& rng) {
    if (!(sigma >= 0.0)) throw DomainError("noise level must be >= 0");
    NoisedSample out{std::vector<double>(x.size()), std::vector<double>(x.size())};
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.eps[i] = rng.normal();
        out.noisy[i] = x[i] + sigma * out.eps[i];
    }
    return out;
}

std::vector<double> conditional_input(std::span<const double> x, std::span<const double> eps, double sigma,
                                      const std::vector<bool>& mask) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = mask[i] ? x[i] : x[i] + sigma * eps[i];
    return out;
}

double conditional_loss(const DenoiserModel& d, const MaskedSample& sample, double sigma, CounterRng& rng) {
    validate(sample);
    const auto noised = add_noise(sample.values, sigma, rng);
    const auto input = conditional_input(sample.values, noised.eps, sigma, sample.mask);
    return mean_squared_error(d.denoise(input, sigma, sample.mask, sample.time_indices), sample.values);
}

double denoising_loss(const DenoiserModel& d, std::span<const double> x, std::span<const int> time_indices,
                      double sigma, CounterRng& rng) {
    const auto noised = add_noise(x, sigma, rng);
    const std::vector<bool> none(x.size(), false);
    return mean_squared_error(d.denoise(noised.noisy, sigma, none, time_indices), x);
}

std::vector<double> score_from_denoiser(const DenoiserModel& d, std::span<const double> x_s, double sigma,
                                        const std::vector<bool>& mask, std::span<const int> time_indices) {
    if (!(sigma > 0.0)) throw DomainError("score needs sigma > 0");
    auto out = d.denoise(x_s, sigma, mask, time_indices);
    const double s2 = sigma * sigma;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] - x_s[i]) / s2;
    return out;
}

std::vector<std::vector<double>> sample_batch(const DenoiserModel& d, std::span<const MaskedSample> windows,
                                              std::span<const std::uint64_t> seeds, const NoiseSchedule& schedule,
                                              SamplerMethod method) {
    if (seeds.size() != windows.size()) throw DomainError("one seed per window is required");
    std::vector<std::vector<double>> out;
    out.reserve(windows.size());
    std::vector<Eigen::Index> active;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        validate(windows[i]);
        if (windows[i].size() != windows.front().size()) throw DomainError("batched windows must share a size");
        out.push_back(windows[i].values);
        for (bool m : windows[i].mask) {
            if (!m) {
                active.push_back(static_cast<Eigen::Index>(i));
                break;
            }
        }
    }
    if (active.empty()) return out;

    const auto levels = schedule.levels();
    const auto rows = static_cast<Eigen::Index>(windows.front().size());
    const auto cols = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd clean(rows, cols), mask(rows, cols), times(rows, cols), x(rows, cols);
    std::vector<CounterRng> rngs;
    rngs.reserve(active.size());
    for (Eigen::Index c = 0; c < cols; ++c) {
        const auto& w = windows[static_cast<std::size_t>(active[static_cast<std::size_t>(c)])];
        rngs.emplace_back(seeds[static_cast<std::size_t>(active[static_cast<std::size_t>(c)])]);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const auto i = static_cast<std::size_t>(r);
            clean(r, c) = w.values[i];
            mask(r, c) = w.mask[i] ? 1.0 : 0.0;
            times(r, c) = w.time_indices[i];
            const double z = rngs.back().normal();
            x(r, c) = w.mask[i] ? w.values[i] : levels.front() * z;
        }
    }

    Eigen::MatrixXd prev_drift;
    double prev_du = 0.0;
    Eigen::VectorXd sigma(cols);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double s = levels[i];
        const double s_next = i + 1 < levels.size() ? levels[i + 1] : 0.0;
        sigma.setConstant(s);
        const Eigen::MatrixXd denoised = d.denoise(x, sigma, mask, times);
        Eigen::MatrixXd drift = (denoised - x) / (s * s);
        const double du = s * s - s_next * s_next;
        if (method == SamplerMethod::adams_bashforth_2 && i > 0) {
            const double r = du / prev_du;
            x += du * ((1.0 + 0.5 * r) * drift - 0.5 * r * prev_drift);
        } else {
            x += du * drift;
        }
        const double noise_scale = s_next > 0.0 ? std::sqrt(du) : 0.0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            auto& rng = rngs[static_cast<std::size_t>(c)];
            for (Eigen::Index r = 0; r < rows; ++r) {
                if (mask(r, c) != 0.0) {
                    x(r, c) = clean(r, c);
                } else if (noise_scale > 0.0) {
                    x(r, c) += noise_scale * rng.normal();
                }
            }
        }
        if (!x.allFinite())
            throw DivergenceError("sampler produced non-finite values at step " + std::to_string(i), static_cast<int>(i));
        prev_drift = std::move(drift);
        prev_du = du;
    }

    for (Eigen::Index c = 0; c < cols; ++c) {
        auto& dst = out[static_cast<std::size_t>(active[static_cast<std::size_t>(c)])];
        const auto& w = windows[static_cast<std::size_t>(active[static_cast<std::size_t>(c)])];
        for (Eigen::Index r = 0; r < rows; ++r)
            if (!w.mask[static_cast<std::size_t>(r)]) dst[static_cast<std::size_t>(r)] = x(r, c);
    }
    return out;
}

std::vector<double> sample(const DenoiserModel& d, const MaskedSample& cond, const SamplerConfig& cfg) {
    const std::uint64_t seed = cfg.seed;
    return sample_batch(d, std::span<const MaskedSample>(&cond, 1), std::span<const std::uint64_t>(&seed, 1),
                        cfg.schedule, cfg.method)
        .front();
}

}  // namespace msd
