#include "msd/denoiser.hpp"

#include "msd/errors.hpp"
#include "msd/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

namespace msd {

namespace {

constexpr std::array<char, 4> kCheckpointMagic{'M', 'S', 'D', 'C'};
constexpr std::uint32_t kCheckpointVersion = 1;

Eigen::MatrixXd silu(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) { return v / (1.0 + std::exp(-v)); });
}

Eigen::MatrixXd silu_grad(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) {
        const double s = 1.0 / (1.0 + std::exp(-v));
        return s * (1.0 + v * (1.0 - s));
    });
}

struct ForwardCache {
    std::vector<Eigen::MatrixXd> activations;  // activations[0] = network input
    std::vector<Eigen::MatrixXd> pre;          // pre-activation per layer
    Eigen::MatrixXd x_in;
    Eigen::VectorXd c_skip;
    Eigen::VectorXd c_out;
    Eigen::MatrixXd output;  // D
};

ForwardCache run_forward(const MlpDenoiser& d, const Eigen::MatrixXd& x_in, const Eigen::VectorXd& sigma,
                         const Eigen::MatrixXd& mask, const Eigen::MatrixXd& time_indices) {
    ForwardCache c;
    c.x_in = x_in;
    c.activations.push_back(d.network_input(x_in, sigma, mask, time_indices));
    for (std::size_t l = 0; l < d.layers(); ++l) {
        Eigen::MatrixXd z = d.weight(l) * c.activations.back();
        z.colwise() += d.bias(l);
        if (l + 1 < d.layers()) c.activations.push_back(silu(z));
        c.pre.push_back(std::move(z));
    }
    const auto cols = x_in.cols();
    c.c_skip.resize(cols);
    c.c_out.resize(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const auto p = d.preconditioning(sigma(j));
        c.c_skip(j) = p.c_skip;
        c.c_out(j) = p.c_out;
    }
    c.output = x_in * c.c_skip.asDiagonal();
    c.output += c.pre.back() * c.c_out.asDiagonal();
    return c;
}

Eigen::MatrixXd batch_input(const TrainBatch& b) {
    Eigen::MatrixXd noisy = b.clean + b.eps * b.sigma.asDiagonal();
    return (b.mask.array() * b.clean.array() + (1.0 - b.mask.array()) * noisy.array()).matrix();
}

void check_batch(const MlpDenoiser& d, const TrainBatch& b) {
    const auto w = static_cast<Eigen::Index>(d.window());
    const auto n = b.clean.cols();
    if (b.clean.rows() != w || b.eps.rows() != w || b.mask.rows() != w || b.time_indices.rows() != w ||
        b.eps.cols() != n || b.mask.cols() != n || b.time_indices.cols() != n || b.sigma.size() != n ||
        (b.weight.size() != 0 && b.weight.size() != n) || n == 0)
        throw DomainError("training batch dimensions do not match the denoiser");
}

double weighted_loss(const TrainBatch& b, const Eigen::MatrixXd& residual) {
    const auto n = residual.cols();
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double w = b.weight.size() ? b.weight(j) : 1.0;
        s += w * residual.col(j).squaredNorm() / static_cast<double>(residual.rows());
    }
    return s / static_cast<double>(n);
}

}  // namespace

MlpDenoiser::MlpDenoiser(int window, std::vector<int> hidden, double data_std, double time_scale)
    : window_(window), data_std_(data_std), time_scale_(time_scale) {
    if (window < 1) throw DomainError("denoiser window must be >= 1");
    if (!(data_std > 0.0) || !(time_scale > 0.0)) throw DomainError("data_std and time_scale must be positive");
    widths_.push_back(input_dim());
    for (int h : hidden) {
        if (h < 1) throw DomainError("hidden widths must be >= 1");
        widths_.push_back(h);
    }
    widths_.push_back(window);
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        offsets_.push_back(total);
        total += static_cast<std::size_t>(widths_[l]) * static_cast<std::size_t>(widths_[l + 1]) +
                 static_cast<std::size_t>(widths_[l + 1]);
    }
    params_.assign(total, 0.0);
}

MlpDenoiser MlpDenoiser::initialized(int window, std::vector<int> hidden, std::uint64_t seed, double data_std,
                                     double time_scale) {
    MlpDenoiser d(window, std::move(hidden), data_std, time_scale);
    CounterRng rng(seed);
    for (std::size_t l = 0; l + 1 < d.layers(); ++l) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(d.widths_[l]));
        const auto count = static_cast<std::size_t>(d.widths_[l]) * static_cast<std::size_t>(d.widths_[l + 1]);
        for (std::size_t i = 0; i < count; ++i) d.params_[d.offsets_[l] + i] = scale * rng.normal();
    }
    return d;
}

Eigen::Map<const Eigen::MatrixXd> MlpDenoiser::weight(std::size_t layer) const {
    return {params_.data() + offsets_[layer], widths_[layer + 1], widths_[layer]};
}

Eigen::Map<const Eigen::VectorXd> MlpDenoiser::bias(std::size_t layer) const {
    const auto w = static_cast<std::size_t>(widths_[layer + 1]) * static_cast<std::size_t>(widths_[layer]);
    return {params_.data() + offsets_[layer] + w, widths_[layer + 1]};
}

MlpDenoiser::Preconditioning MlpDenoiser::preconditioning(double sigma) const {
    const double sd2 = data_std_ * data_std_;
    const double total = sigma * sigma + sd2;
    // The noise embedding is floored so sigma = 0 stays finite.
    const double c_noise = 0.25 * std::log(std::max(sigma, 1e-12));
    return {sd2 / total, sigma * data_std_ / std::sqrt(total), 1.0 / std::sqrt(total), c_noise};
}

Eigen::MatrixXd MlpDenoiser::network_input(const Eigen::MatrixXd& x_in, const Eigen::VectorXd& sigma,
                                           const Eigen::MatrixXd& mask, const Eigen::MatrixXd& time_indices) const {
    const auto w = static_cast<Eigen::Index>(window_);
    const auto n = x_in.cols();
    if (x_in.rows() != w || mask.rows() != w || time_indices.rows() != w || mask.cols() != n ||
        time_indices.cols() != n || sigma.size() != n)
        throw DomainError("denoiser input has shape " + std::to_string(x_in.rows()) + "x" + std::to_string(n) +
                          ", expected window " + std::to_string(window_));
    Eigen::MatrixXd z(input_dim(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto p = preconditioning(sigma(j));
        z.col(j).segment(0, w) = p.c_in * x_in.col(j);
        z(3 * w, j) = p.c_noise;
    }
    z.middleRows(w, w) = mask;
    z.middleRows(2 * w, w) = time_indices / time_scale_;
    return z;
}

Eigen::MatrixXd MlpDenoiser::denoise(const Eigen::MatrixXd& x_in, const Eigen::VectorXd& sigma,
                                     const Eigen::MatrixXd& mask, const Eigen::MatrixXd& time_indices) const {
    return run_forward(*this, x_in, sigma, mask, time_indices).output;
}

std::vector<double> forward(const MlpDenoiser& d, std::span<const double> x_in, double sigma,
                            const std::vector<bool>& mask, std::span<const int> time_indices) {
    if (x_in.size() != static_cast<std::size_t>(d.window()))
        throw DomainError("input length " + std::to_string(x_in.size()) + " does not match denoiser window " +
                          std::to_string(d.window()));
    return d.denoise(x_in, sigma, mask, time_indices);
}

double batch_loss(const MlpDenoiser& d, const TrainBatch& batch) {
    check_batch(d, batch);
    const auto c = run_forward(d, batch_input(batch), batch.sigma, batch.mask, batch.time_indices);
    return weighted_loss(batch, c.output - batch.clean);
}

LossGradient backward(const MlpDenoiser& d, const TrainBatch& batch) {
    check_batch(d, batch);
    const auto c = run_forward(d, batch_input(batch), batch.sigma, batch.mask, batch.time_indices);
    const Eigen::MatrixXd residual = c.output - batch.clean;
    const auto n = residual.cols();

    LossGradient out;
    out.loss = weighted_loss(batch, residual);
    out.grad.assign(d.params().size(), 0.0);

    // d loss / d net output
    Eigen::VectorXd col_scale(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double w = batch.weight.size() ? batch.weight(j) : 1.0;
        col_scale(j) = 2.0 * w * c.c_out(j) / (static_cast<double>(residual.rows()) * static_cast<double>(n));
    }
    Eigen::MatrixXd delta = residual * col_scale.asDiagonal();

    for (std::size_t l = d.layers(); l-- > 0;) {
        const auto rows = d.layer_widths()[l + 1];
        const auto cols = d.layer_widths()[l];
        Eigen::Map<Eigen::MatrixXd> gw(out.grad.data() + d.weight_offset(l), rows, cols);
        Eigen::Map<Eigen::VectorXd> gb(out.grad.data() + d.weight_offset(l) + static_cast<std::size_t>(rows) * cols,
                                       rows);
        gw.noalias() = delta * c.activations[l].transpose();
        gb = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd upstream = d.weight(l).transpose() * delta;
            delta = upstream.cwiseProduct(silu_grad(c.pre[l - 1]));
        }
    }
    return out;
}

std::string_view to_string(MaskSampling m) noexcept {
    return m == MaskSampling::scheme_templates ? "scheme_templates" : "uniform_random";
}

MaskSampling parse_mask_sampling(std::string_view name) {
    if (name == "scheme_templates") return MaskSampling::scheme_templates;
    if (name == "uniform_random") return MaskSampling::uniform_random;
    throw DomainError("unknown mask sampling '" + std::string(name) + "'");
}

std::string_view to_string(LossWeighting w) noexcept { return w == LossWeighting::edm ? "edm" : "uniform"; }

LossWeighting parse_loss_weighting(std::string_view name) {
    if (name == "edm") return LossWeighting::edm;
    if (name == "uniform") return LossWeighting::uniform;
    throw DomainError("unknown loss weighting '" + std::string(name) + "'");
}

void validate(const TrainConfig& c) {
    if (c.epochs < 0 || c.steps_per_epoch < 1) throw DomainError("epochs must be >= 0 and steps_per_epoch >= 1");
    if (c.batch_size < 1) throw DomainError("batch_size must be >= 1");
    if (!(c.learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
    if (!(c.sigma_min > 0.0) || !(c.sigma_max > c.sigma_min)) throw DomainError("invalid training noise range");
    if (!(c.beta1 >= 0.0 && c.beta1 < 1.0) || !(c.beta2 >= 0.0 && c.beta2 < 1.0)) throw DomainError("invalid betas");
}

std::vector<TrainingPair> training_pairs(const InferenceScheme& s) {
    std::vector<TrainingPair> out;
    for (const auto& a : s.actions) {
        TrainingPair p{s.templates.at(a.template_id), a.cond_mask};
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
    }
    return out;
}

void merge_training_pairs(std::vector<TrainingPair>& into, const std::vector<TrainingPair>& more) {
    for (const auto& p : more)
        if (std::find(into.begin(), into.end(), p) == into.end()) into.push_back(p);
}

TrainBatch draw_batch(const MlpDenoiser& d, const std::vector<Trajectory>& dataset,
                      const std::vector<TrainingPair>& pairs, const TrainConfig& cfg, CounterRng& rng) {
    const auto w = static_cast<Eigen::Index>(d.window());
    const auto n = static_cast<Eigen::Index>(cfg.batch_size);
    TrainBatch b{Eigen::MatrixXd(w, n), Eigen::MatrixXd(w, n), Eigen::MatrixXd(w, n),
                 Eigen::MatrixXd(w, n), Eigen::VectorXd(n),    Eigen::VectorXd(n)};
    const double log_lo = std::log(cfg.sigma_min);
    const double log_hi = std::log(cfg.sigma_max);
    const double sd2 = d.data_std() * d.data_std();
    std::vector<std::size_t> order(static_cast<std::size_t>(w));
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& traj = dataset[rng.below(dataset.size())];
        const auto& pair = pairs[rng.below(pairs.size())];
        const int lo = -pair.offsets.front();
        const int hi = traj.length() - 1 - pair.offsets.back();
        const int pos = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
        for (Eigen::Index i = 0; i < w; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            b.clean(i, j) = traj.values[static_cast<std::size_t>(pos + pair.offsets[ui])];
            b.time_indices(i, j) = pair.offsets[ui];
            b.mask(i, j) = pair.mask[ui] ? 1.0 : 0.0;
        }
        if (cfg.mask_sampling == MaskSampling::uniform_random) {
            const auto keep = static_cast<std::size_t>(std::count(pair.mask.begin(), pair.mask.end(), true));
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            for (std::size_t i = 0; i < keep; ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);
            b.mask.col(j).setZero();
            for (std::size_t i = 0; i < keep; ++i) b.mask(static_cast<Eigen::Index>(order[i]), j) = 1.0;
        }
        const double sigma = std::exp(rng.uniform(log_lo, log_hi));
        b.sigma(j) = sigma;
        b.weight(j) = cfg.weighting == LossWeighting::edm ? (sigma * sigma + sd2) / (sigma * sigma * sd2) : 1.0;
        for (Eigen::Index i = 0; i < w; ++i) b.eps(i, j) = rng.normal();
    }
    return b;
}

TrainResult train(MlpDenoiser& d, const std::vector<Trajectory>& dataset, const std::vector<TrainingPair>& pairs,
                  const TrainConfig& cfg) {
    validate(cfg);
    if (dataset.empty()) throw ConfigError("training dataset is empty");
    if (pairs.empty()) throw ConfigError("no training windows given");
    for (const auto& p : pairs) {
        if (p.offsets.size() != static_cast<std::size_t>(d.window()) || p.mask.size() != p.offsets.size())
            throw ConfigError("training window size does not match the denoiser");
        const int span = p.offsets.back() - p.offsets.front() + 1;
        for (const auto& t : dataset) {
            if (t.length() < span) {
                std::string w;
                for (int o : p.offsets) w += (w.empty() ? "" : ",") + std::to_string(o);
                throw ConfigError("trajectory of length " + std::to_string(t.length()) + " is too short for template {" +
                                  w + "}");
            }
        }
    }

    TrainResult result;
    CounterRng rng(cfg.seed);
    auto& theta = d.params();
    std::vector<double> m(theta.size(), 0.0);
    std::vector<double> v(theta.size(), 0.0);
    const double total_steps = static_cast<double>(cfg.epochs) * cfg.steps_per_epoch;
    long step = 0;
    double ema = 0.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double sum = 0.0;
        for (int s = 0; s < cfg.steps_per_epoch; ++s, ++step) {
            const auto batch = draw_batch(d, dataset, pairs, cfg, rng);
            const auto lg = backward(d, batch);
            sum += lg.loss;
            const double progress = static_cast<double>(step) / total_steps;
            const double lr = cfg.learning_rate * (cfg.lr_final_fraction + (1.0 - cfg.lr_final_fraction) * 0.5 *
                                                                               (1.0 + std::cos(std::numbers::pi * progress)));
            const double t = static_cast<double>(step + 1);
            const double bc1 = 1.0 - std::pow(cfg.beta1, t);
            const double bc2 = 1.0 - std::pow(cfg.beta2, t);
            for (std::size_t i = 0; i < theta.size(); ++i) {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * lg.grad[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * lg.grad[i] * lg.grad[i];
                theta[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.adam_eps);
            }
        }
        const double mean = sum / cfg.steps_per_epoch;
        ema = epoch == 0 ? mean : 0.7 * ema + 0.3 * mean;
        result.epoch_loss.push_back(mean);
        result.smoothed_loss.push_back(ema);
    }
    return result;
}

void save_checkpoint(const std::filesystem::path& path, const MlpDenoiser& d) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
    le::put_u32(os, kCheckpointVersion);
    le::put_u32(os, static_cast<std::uint32_t>(d.layer_widths().size()));
    for (int w : d.layer_widths()) le::put_u32(os, static_cast<std::uint32_t>(w));
    le::put_f64(os, d.data_std());
    le::put_f64(os, d.time_scale());
    le::put_f64(os, d.value_scale());
    le::put_u64(os, d.params().size());
    for (double p : d.params()) le::put_f64(os, p);
    if (!os) throw IoError("failed writing " + path.string());
}

MlpDenoiser load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint " + path.string());
    try {
        std::array<char, 4> magic{};
        if (!is.read(magic.data(), magic.size()) || magic != kCheckpointMagic)
            throw IoError("not a checkpoint (bad magic)");
        if (const auto v = le::get_u32(is); v != kCheckpointVersion)
            throw IoError("unsupported checkpoint version " + std::to_string(v));
        const auto count = le::get_u32(is);
        if (count < 2 || count > 64) throw IoError("implausible layer count");
        std::vector<int> widths;
        for (std::uint32_t i = 0; i < count; ++i) widths.push_back(static_cast<int>(le::get_u32(is)));
        const double data_std = le::get_f64(is);
        const double time_scale = le::get_f64(is);
        const double value_scale = le::get_f64(is);
        const int window = widths.back();
        if (widths.front() != 3 * window + 1) throw IoError("input width does not match the window");
        MlpDenoiser d(window, std::vector<int>(widths.begin() + 1, widths.end() - 1), data_std, time_scale);
        d.set_value_scale(value_scale);
        if (le::get_u64(is) != d.params().size()) throw IoError("parameter count does not match layer widths");
        for (double& p : d.params()) p = le::get_f64(is);
        if (is.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes after parameters");
        return d;
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    } catch (const DomainError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace msd
