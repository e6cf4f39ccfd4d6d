#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace msd {

/// Row-major scalar field with a uniform pixel area.
class Field2D {
public:
    Field2D(int rows, int cols, double pixel_area = 1.0);
    Field2D(int rows, int cols, std::vector<double> values, double pixel_area = 1.0);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    double pixel_area() const noexcept { return pixel_area_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator()(int r, int c) { return values_[static_cast<std::size_t>(r * cols_ + c)]; }
    double operator()(int r, int c) const { return values_[static_cast<std::size_t>(r * cols_ + c)]; }

    std::span<const double> values() const noexcept { return values_; }

private:
    int rows_;
    int cols_;
    double pixel_area_;
    std::vector<double> values_;
};

struct VectorField2D {
    Field2D bx;
    Field2D by;
    Field2D bz;

    VectorField2D(Field2D x, Field2D y, Field2D z);
};

/// Power per radial wavenumber bin. `power[i]` is the mean of |F_k|^2 / N
/// over the `count[i]` DFT coefficients whose rounded |k| equals i, so
/// sum_i power[i] * count[i] equals the sum of squared samples.
struct SpectrumProfile {
    std::vector<double> power;
    std::vector<std::size_t> count;
    // Last bin compared by spectrum_mae; the default compares every bin.
    std::size_t nyquist = std::numeric_limits<std::size_t>::max();

    std::size_t bins() const noexcept { return power.size(); }
};

enum class SpectrumScale { log10, linear };

double wasserstein_1d(std::span<const double> a, std::span<const double> b);

SpectrumProfile isotropic_spectrum(const Field2D& f);

// One-sided spectrum of a real sequence: bin i pools frequencies +i and -i.
SpectrumProfile power_spectrum_1d(std::span<const double> values);

/// Mean absolute difference over bins 0..nyquist, on log10(power + 1e-12)
/// by default.
double spectrum_mae(const SpectrumProfile& a, const SpectrumProfile& b,
                    SpectrumScale scale = SpectrumScale::log10);

double usflux(const Field2D& bz);
double mean_gbt(const VectorField2D& v);
double mean_gbz(const Field2D& bz);

// Mean of |pred_i - obs_i| / |obs_i|.
double nmae(std::span<const double> pred, std::span<const double> obs);

// Per-pixel |grad f| with central differences inside and one-sided
// differences on the border.
Field2D gradient_magnitude(const Field2D& f);

/// Future-step window "lo:hi". The first bucket of a list covers lo..hi, later
/// buckets cover lo+1..hi, so 1:4, 4:16, 16:32 partition 1..32.
struct HorizonBucket {
    int lo = 1;
    int hi = 1;

    std::string label() const;
};

HorizonBucket parse_bucket(std::string_view text);
std::vector<int> bucket_steps(const std::vector<HorizonBucket>& buckets, std::size_t i);

}  // namespace msd
