#pragma once

#include <span>
#include <vector>

namespace msd {

struct TemplateSpec {
    double alpha = 1.0;  // scale factor between successive increments, >= 1
    int k = 1;           // half-budget: K future and K past offsets
};

/// Symmetric multiscale set of 2K+1 integer offsets around the present.
///
/// Positive offsets follow t_0 = 0, t_{j+1} = t_j + alpha^j accumulated in
/// floating point, then truncated toward zero. Negative offsets mirror the
/// positive side.
class Template {
public:
    Template(std::vector<int> indices, TemplateSpec spec);

    const std::vector<int>& indices() const noexcept { return indices_; }
    const TemplateSpec& spec() const noexcept { return spec_; }
    int k() const noexcept { return spec_.k; }
    int horizon() const noexcept { return indices_.back(); }
    std::size_t size() const noexcept { return indices_.size(); }

    friend bool operator==(const Template& a, const Template& b) noexcept {
        return a.indices_ == b.indices_;
    }

private:
    std::vector<int> indices_;
    TemplateSpec spec_;
};

Template build_template(const TemplateSpec& spec);

int template_horizon(const Template& t) noexcept;

// Smallest alpha (to 1e-9) whose template reaches horizon h exactly.
double solve_alpha_for_horizon(int h, int k);

std::vector<int> shift_indices(std::span<const int> indices, int s);

// Continuous (pre-truncation) positive offsets t_1..t_K.
std::vector<double> continuous_offsets(double alpha, int k);

/// Every distinct template reachable with alpha in [1, alpha_max], in order
/// of increasing alpha (hence non-decreasing horizon).
std::vector<Template> enumerate_templates(int k, double alpha_max);

// enumerate_templates up to the alpha that reaches `horizon`.
std::vector<Template> standard_templates(int horizon, int k);

// One template per requested horizon (each via solve_alpha_for_horizon).
std::vector<Template> templates_for_horizons(std::span<const int> horizons, int k);

}  // namespace msd
