#include "msd/metrics.hpp"

#include "msd/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>

namespace msd {

namespace {

constexpr double kPowerFloor = 1e-12;

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer fftw_buffer(std::size_t n) {
    return FftwBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

// Forward DFT of real data, rows x cols (rows = 1 for 1D).
std::vector<double> squared_magnitudes(std::span<const double> values, int rows, int cols) {
    const auto n = values.size();
    auto in = fftw_buffer(n);
    auto out = fftw_buffer(n);
    for (std::size_t i = 0; i < n; ++i) {
        in[i][0] = values[i];
        in[i][1] = 0.0;
    }
    fftw_plan plan = rows == 1 ? fftw_plan_dft_1d(cols, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE)
                               : fftw_plan_dft_2d(rows, cols, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<double> mag2(n);
    for (std::size_t i = 0; i < n; ++i) mag2[i] = out[i][0] * out[i][0] + out[i][1] * out[i][1];
    return mag2;
}

int signed_frequency(int i, int n) { return i <= n / 2 ? i : i - n; }

void finish_profile(SpectrumProfile& p) {
    for (std::size_t b = 0; b < p.power.size(); ++b)
        if (p.count[b] > 0) p.power[b] /= static_cast<double>(p.count[b]);
}

double diff_x(const Field2D& f, int r, int c) {
    const int n = f.cols();
    if (c == 0) return f(r, 1) - f(r, 0);
    if (c == n - 1) return f(r, n - 1) - f(r, n - 2);
    return 0.5 * (f(r, c + 1) - f(r, c - 1));
}

double diff_y(const Field2D& f, int r, int c) {
    const int n = f.rows();
    if (r == 0) return f(1, c) - f(0, c);
    if (r == n - 1) return f(n - 1, c) - f(n - 2, c);
    return 0.5 * (f(r + 1, c) - f(r - 1, c));
}

double mean_of(const Field2D& f) {
    const auto v = f.values();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

Field2D::Field2D(int rows, int cols, double pixel_area)
    : Field2D(rows, cols, std::vector<double>(static_cast<std::size_t>(std::max(rows, 0) * std::max(cols, 0)), 0.0),
              pixel_area) {}

Field2D::Field2D(int rows, int cols, std::vector<double> values, double pixel_area)
    : rows_(rows), cols_(cols), pixel_area_(pixel_area), values_(std::move(values)) {
    if (rows < 2 || cols < 2) throw DomainError("fields need at least 2 rows and 2 columns");
    if (!(pixel_area > 0.0)) throw DomainError("pixel area must be positive");
    if (values_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw DomainError("field value count does not match its shape");
}

VectorField2D::VectorField2D(Field2D x, Field2D y, Field2D z) : bx(std::move(x)), by(std::move(y)), bz(std::move(z)) {
    if (bx.rows() != by.rows() || bx.rows() != bz.rows() || bx.cols() != by.cols() || bx.cols() != bz.cols())
        throw DomainError("vector field components differ in shape");
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("wasserstein_1d needs non-empty samples");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const std::size_t n = x.size();
    const std::size_t m = y.size();
    if (n == m) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(x[i] - y[i]);
        return s / static_cast<double>(n);
    }
    // Quantile functions are constant on [i/n, (i+1)/n) and [j/m, (j+1)/m);
    // breakpoints are compared on the common grid 1/(n m).
    double s = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t u = 0;  // current position in units of 1/(n m)
    while (i < n && j < m) {
        const std::size_t end_x = (i + 1) * m;
        const std::size_t end_y = (j + 1) * n;
        const std::size_t end = std::min(end_x, end_y);
        s += static_cast<double>(end - u) * std::abs(x[i] - y[j]);
        u = end;
        if (end == end_x) ++i;
        if (end == end_y) ++j;
    }
    return s / (static_cast<double>(n) * static_cast<double>(m));
}

SpectrumProfile isotropic_spectrum(const Field2D& f) {
    const int rows = f.rows();
    const int cols = f.cols();
    const auto mag2 = squared_magnitudes(f.values(), rows, cols);
    const double n = static_cast<double>(f.size());
    const double max_r = std::hypot(rows / 2, cols / 2);
    const auto bins = static_cast<std::size_t>(std::lround(max_r)) + 1;
    SpectrumProfile p{std::vector<double>(bins, 0.0), std::vector<std::size_t>(bins, 0),
                      static_cast<std::size_t>(std::min(rows, cols) / 2)};
    for (int r = 0; r < rows; ++r) {
        const int ky = signed_frequency(r, rows);
        for (int c = 0; c < cols; ++c) {
            const int kx = signed_frequency(c, cols);
            const auto bin = static_cast<std::size_t>(std::lround(std::hypot(kx, ky)));
            p.power[bin] += mag2[static_cast<std::size_t>(r * cols + c)] / n;
            p.count[bin] += 1;
        }
    }
    finish_profile(p);
    return p;
}

SpectrumProfile power_spectrum_1d(std::span<const double> values) {
    if (values.size() < 2) throw DomainError("power_spectrum_1d needs at least 2 samples");
    const int n = static_cast<int>(values.size());
    const auto mag2 = squared_magnitudes(values, 1, n);
    const auto bins = static_cast<std::size_t>(n / 2) + 1;
    SpectrumProfile p{std::vector<double>(bins, 0.0), std::vector<std::size_t>(bins, 0), bins - 1};
    for (int i = 0; i < n; ++i) {
        const auto bin = static_cast<std::size_t>(std::abs(signed_frequency(i, n)));
        p.power[bin] += mag2[static_cast<std::size_t>(i)] / n;
        p.count[bin] += 1;
    }
    finish_profile(p);
    return p;
}

double spectrum_mae(const SpectrumProfile& a, const SpectrumProfile& b, SpectrumScale scale) {
    if (a.bins() != b.bins() || a.bins() == 0) throw DomainError("spectrum profiles differ in bin count");
    const std::size_t last = std::min({a.nyquist, b.nyquist, a.bins() - 1});
    double s = 0.0;
    for (std::size_t i = 0; i <= last; ++i) {
        if (scale == SpectrumScale::log10)
            s += std::abs(std::log10(a.power[i] + kPowerFloor) - std::log10(b.power[i] + kPowerFloor));
        else
            s += std::abs(a.power[i] - b.power[i]);
    }
    return s / static_cast<double>(last + 1);
}

double usflux(const Field2D& bz) {
    double s = 0.0;
    for (double v : bz.values()) s += std::abs(v);
    return s * bz.pixel_area();
}

Field2D gradient_magnitude(const Field2D& f) {
    Field2D g(f.rows(), f.cols(), f.pixel_area());
    for (int r = 0; r < f.rows(); ++r)
        for (int c = 0; c < f.cols(); ++c) g(r, c) = std::hypot(diff_x(f, r, c), diff_y(f, r, c));
    return g;
}

double mean_gbt(const VectorField2D& v) {
    Field2D total(v.bz.rows(), v.bz.cols(), v.bz.pixel_area());
    for (int r = 0; r < total.rows(); ++r)
        for (int c = 0; c < total.cols(); ++c) {
            const double x = v.bx(r, c);
            const double y = v.by(r, c);
            const double z = v.bz(r, c);
            total(r, c) = std::sqrt(x * x + y * y + z * z);
        }
    return mean_of(gradient_magnitude(total));
}

double mean_gbz(const Field2D& bz) { return mean_of(gradient_magnitude(bz)); }

double nmae(std::span<const double> pred, std::span<const double> obs) {
    if (pred.size() != obs.size()) throw DomainError("nmae needs equal-length inputs");
    if (obs.empty()) throw DomainError("nmae needs at least one value");
    double s = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (obs[i] == 0.0) throw DomainError("nmae observation " + std::to_string(i) + " is zero");
        s += std::abs(pred[i] - obs[i]) / std::abs(obs[i]);
    }
    return s / static_cast<double>(obs.size());
}

std::string HorizonBucket::label() const { return std::to_string(lo) + ":" + std::to_string(hi); }

HorizonBucket parse_bucket(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw DomainError("bucket must look like lo:hi");
    HorizonBucket b;
    try {
        b = {std::stoi(std::string(text.substr(0, colon))), std::stoi(std::string(text.substr(colon + 1)))};
    } catch (const std::exception&) {
        throw DomainError("bucket must look like lo:hi, got '" + std::string(text) + "'");
    }
    if (b.lo < 1 || b.hi < b.lo) throw DomainError("bucket bounds must satisfy 1 <= lo <= hi");
    return b;
}

std::vector<int> bucket_steps(const std::vector<HorizonBucket>& buckets, std::size_t i) {
    const auto& b = buckets.at(i);
    std::vector<int> steps;
    for (int t = (i == 0 ? b.lo : b.lo + 1); t <= b.hi; ++t) steps.push_back(t);
    return steps;
}

}  // namespace msd
