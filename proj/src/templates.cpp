#include "msd/templates.hpp"

#include "msd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace msd {

namespace {

constexpr double kAlphaTol = 1e-9;

void check_spec(const TemplateSpec& spec) {
    if (!(spec.alpha >= 1.0) || !std::isfinite(spec.alpha))
        throw DomainError("template alpha must be >= 1, got " + std::to_string(spec.alpha));
    if (spec.k < 1) throw DomainError("template k must be >= 1, got " + std::to_string(spec.k));
}

int truncate_offset(double t) { return static_cast<int>(std::floor(t)); }

// Smallest alpha in [lo, hi] with floor(t_position(alpha)) >= target, assuming
// the predicate holds at hi.
double bisect_position(int position, int target, int k, double lo, double hi) {
    auto reaches = [&](double a) {
        return truncate_offset(continuous_offsets(a, k)[position - 1]) >= target;
    };
    if (reaches(lo)) return lo;
    while (hi - lo > kAlphaTol) {
        const double mid = 0.5 * (lo + hi);
        if (reaches(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

Template::Template(std::vector<int> indices, TemplateSpec spec)
    : indices_(std::move(indices)), spec_(spec) {
    if (indices_.size() != static_cast<std::size_t>(2 * spec_.k + 1))
        throw DomainError("template must hold 2K+1 offsets");
    if (!std::is_sorted(indices_.begin(), indices_.end()) ||
        std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
        throw DomainError("template offsets must be strictly increasing");
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (indices_[i] != -indices_[indices_.size() - 1 - i])
            throw DomainError("template offsets must be symmetric about 0");
    }
}

std::vector<double> continuous_offsets(double alpha, int k) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k));
    double t = 0.0;
    for (int j = 0; j < k; ++j) {
        t += std::pow(alpha, j);
        out.push_back(t);
    }
    return out;
}

Template build_template(const TemplateSpec& spec) {
    check_spec(spec);
    const auto positive = continuous_offsets(spec.alpha, spec.k);
    std::vector<int> indices(static_cast<std::size_t>(2 * spec.k + 1));
    indices[static_cast<std::size_t>(spec.k)] = 0;
    for (int j = 0; j < spec.k; ++j) {
        const int t = truncate_offset(positive[static_cast<std::size_t>(j)]);
        indices[static_cast<std::size_t>(spec.k + 1 + j)] = t;
        indices[static_cast<std::size_t>(spec.k - 1 - j)] = -t;
    }
    return Template(std::move(indices), spec);
}

int template_horizon(const Template& t) noexcept { return t.horizon(); }

double solve_alpha_for_horizon(int h, int k) {
    if (k < 1) throw DomainError("k must be >= 1");
    if (h < k)
        throw DomainError("horizon " + std::to_string(h) + " is below the uniform window horizon " +
                          std::to_string(k));
    if (h == k) return 1.0;
    if (k == 1) throw DomainError("with k = 1 every template has horizon 1");
    return bisect_position(k, h, k, 1.0, static_cast<double>(h));
}

std::vector<int> shift_indices(std::span<const int> indices, int s) {
    std::vector<int> out(indices.begin(), indices.end());
    for (int& t : out) t += s;
    return out;
}

std::vector<Template> enumerate_templates(int k, double alpha_max) {
    check_spec({alpha_max, k});
    std::vector<double> alphas{1.0, alpha_max};
    const auto top = continuous_offsets(alpha_max, k);
    // Offset j (1-based) equals j at alpha = 1; it jumps to m at the smallest
    // alpha where floor(t_j) >= m.
    for (int j = 2; j <= k; ++j) {
        const int last = truncate_offset(top[static_cast<std::size_t>(j - 1)]);
        for (int m = j + 1; m <= last; ++m) alphas.push_back(bisect_position(j, m, k, 1.0, alpha_max));
    }
    std::sort(alphas.begin(), alphas.end());

    std::vector<Template> out;
    for (double a : alphas) {
        Template t = build_template({a, k});
        if (out.empty() || !(out.back() == t)) out.push_back(std::move(t));
    }
    return out;
}

std::vector<Template> standard_templates(int horizon, int k) {
    return enumerate_templates(k, solve_alpha_for_horizon(horizon, k));
}

std::vector<Template> templates_for_horizons(std::span<const int> horizons, int k) {
    std::vector<Template> out;
    out.reserve(horizons.size());
    for (int h : horizons) out.push_back(build_template({solve_alpha_for_horizon(h, k), k}));
    return out;
}

}  // namespace msd
