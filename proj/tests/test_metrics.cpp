#include "doctest.h"

#include "msd/errors.hpp"
#include "msd/metrics.hpp"
#include "msd/rng.hpp"
#include "msd/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace msd;

namespace {

std::vector<double> normals(std::uint64_t seed, int n, double shift = 0.0) {
    CounterRng rng(seed);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.normal() + shift;
    return v;
}

double sum_squares(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return s;
}

double parseval_total(const SpectrumProfile& p) {
    double s = 0;
    for (std::size_t i = 0; i < p.bins(); ++i) s += p.power[i] * static_cast<double>(p.count[i]);
    return s;
}

Field2D ramp(int rows, int cols, double a, double b) {
    Field2D f(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) f(r, c) = a * c + b * r;
    return f;
}

}  // namespace

TEST_CASE("wasserstein identities") {
    const auto a = normals(1, 500);
    CHECK(wasserstein_1d(a, a) == 0.0);

    const std::vector<double> zeros(10, 0.0), cs(10, -2.25);
    CHECK(std::abs(wasserstein_1d(zeros, cs) - 2.25) < 1e-12);

    std::vector<double> shifted = a;
    for (auto& x : shifted) x += 0.7;
    CHECK(std::abs(wasserstein_1d(shifted, a) - 0.7) < 1e-12);

    CHECK_THROWS_AS(wasserstein_1d(std::vector<double>{}, a), DomainError);
}

TEST_CASE("wasserstein with unequal sample sizes") {
    // Quantile functions: a is 0 on [0,1/2), 1 on [1/2,1); b is 0,0,1 on thirds.
    // They differ on [1/2, 2/3) by 1.
    const std::vector<double> a{0, 1}, b{0, 0, 1};
    CHECK(std::abs(wasserstein_1d(a, b) - 1.0 / 6.0) < 1e-12);
    // Duplicating every sample leaves the distribution unchanged.
    const auto x = normals(3, 7), y = normals(4, 5, 0.3);
    std::vector<double> x2 = x;
    x2.insert(x2.end(), x.begin(), x.end());
    CHECK(std::abs(wasserstein_1d(x2, y) - wasserstein_1d(x, y)) < 1e-12);
    const std::vector<double> point{2.0};
    CHECK(std::abs(wasserstein_1d(point, std::vector<double>{1, 2, 3}) - 2.0 / 3.0) < 1e-12);
}

TEST_CASE("wasserstein metric axioms on random samples") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto a = normals(3 * s, 40), b = normals(3 * s + 1, 55, 0.5), c = normals(3 * s + 2, 33, -0.2);
        const double ab = wasserstein_1d(a, b);
        CHECK(ab >= 0.0);
        CHECK(std::abs(ab - wasserstein_1d(b, a)) < 1e-12);
        CHECK(ab <= wasserstein_1d(a, c) + wasserstein_1d(c, b) + 1e-12);
        CHECK(ab > 0.0);
    }
}

TEST_CASE("isotropic spectrum of simple fields") {
    FieldParams p;
    p.value = 2.0;
    const auto c = isotropic_spectrum(generate_test_field2d(FieldKind::constant, 8, p));
    CHECK(c.power[0] == doctest::Approx(4.0 * 64));
    for (std::size_t i = 1; i < c.bins(); ++i) CHECK(c.power[i] < 1e-20);
    CHECK(c.nyquist == 4);

    for (int q : {1, 2, 5}) {
        p.value = 1.0;
        p.wavenumber = q;
        const auto s = isotropic_spectrum(generate_test_field2d(FieldKind::sinusoid_x, 16, p));
        for (std::size_t i = 0; i < s.bins(); ++i)
            if (static_cast<int>(i) != q) CHECK(s.power[i] < 1e-10);
        CHECK(s.power[static_cast<std::size_t>(q)] > 0.0);
    }
}

TEST_CASE("parseval holds for both spectra") {
    FieldParams p;
    p.seed = 77;
    for (int n : {4, 9, 16}) {
        const auto f = generate_test_field2d(FieldKind::gaussian_noise, n, p);
        CHECK(std::abs(parseval_total(isotropic_spectrum(f)) - sum_squares(f.values())) < 1e-10);
    }
    Field2D rect(5, 12, normals(8, 60));
    CHECK(std::abs(parseval_total(isotropic_spectrum(rect)) - sum_squares(rect.values())) < 1e-10);
    for (int n : {2, 7, 64}) {
        const auto v = normals(static_cast<std::uint64_t>(n), n);
        CHECK(std::abs(parseval_total(power_spectrum_1d(v)) - sum_squares(v)) < 1e-10);
    }
}

TEST_CASE("one dimensional spectrum") {
    const std::vector<double> flat(10, 3.0);
    const auto c = power_spectrum_1d(flat);
    CHECK(c.bins() == 6);
    CHECK(c.power[0] == doctest::Approx(90.0));
    for (std::size_t i = 1; i < c.bins(); ++i) CHECK(c.power[i] < 1e-20);

    std::vector<double> tone(32);
    for (int i = 0; i < 32; ++i) tone[static_cast<std::size_t>(i)] = std::sin(2 * std::numbers::pi * 4 * i / 32.0);
    const auto t = power_spectrum_1d(tone);
    for (std::size_t i = 0; i < t.bins(); ++i) {
        if (i == 4)
            CHECK(t.power[i] == doctest::Approx(8.0));
        else
            CHECK(t.power[i] < 1e-20);
    }
    CHECK_THROWS_AS(power_spectrum_1d(std::vector<double>{1.0}), DomainError);
}

TEST_CASE("white noise spectrum is flat at the variance") {
    const int n = 32, draws = 1000;
    const double sd = 1.5;
    std::vector<double> mean(static_cast<std::size_t>(n / 2 + 1), 0.0);
    for (int d = 0; d < draws; ++d) {
        auto v = normals(1000 + static_cast<std::uint64_t>(d), n);
        for (auto& x : v) x *= sd;
        const auto s = power_spectrum_1d(v);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += s.power[i] / draws;
    }
    for (double m : mean) CHECK(m == doctest::Approx(sd * sd).epsilon(0.1));
}

TEST_CASE("spectrum mae") {
    SpectrumProfile a{{1, 2, 3, 4, 5, 6, 7, 8}, std::vector<std::size_t>(8, 1)};
    CHECK(spectrum_mae(a, a) == 0.0);
    auto b = a;
    for (auto& x : b.power) x *= 10;
    CHECK(spectrum_mae(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    b = a;
    b.power[5] *= 10;
    CHECK(spectrum_mae(a, b) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(spectrum_mae(a, b, SpectrumScale::linear) == doctest::Approx(54.0 / 8));

    SpectrumProfile short_profile{{1, 2}, {1, 1}};
    CHECK_THROWS_AS(spectrum_mae(a, short_profile), DomainError);

    // Bins past the Nyquist bin do not count.
    a.nyquist = b.nyquist = 3;
    CHECK(spectrum_mae(a, b) == 0.0);
}

TEST_CASE("unsigned flux") {
    Field2D f(4, 5, 0.5);
    CHECK(usflux(f) == 0.0);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 5; ++c) f(r, c) = -1.5;
    CHECK(std::abs(usflux(f) - 1.5 * 20 * 0.5) < 1e-12);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 5; ++c) f(r, c) = ((r + c) % 2 ? 1.5 : -1.5);
    CHECK(std::abs(usflux(f) - 1.5 * 20 * 0.5) < 1e-12);
}

TEST_CASE("gradient metrics on constant and linear fields") {
    Field2D k(6, 6, std::vector<double>(36, 4.0));
    CHECK(mean_gbz(k) == 0.0);
    CHECK(mean_gbt(VectorField2D(k, k, k)) == 0.0);

    const auto r = ramp(6, 7, 0.8, 0.0);
    const auto g = gradient_magnitude(r);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 7; ++j) CHECK(std::abs(g(i, j) - 0.8) < 1e-12);
    Field2D zero(6, 7);
    CHECK(std::abs(mean_gbt(VectorField2D(zero, zero, r)) - 0.8) < 1e-12);

    const auto rb = ramp(5, 5, 3.0, -4.0);
    CHECK(std::abs(mean_gbz(rb) - 5.0) < 1e-12);
    auto twice = rb;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) twice(i, j) *= 2;
    CHECK(std::abs(mean_gbz(twice) - 2 * mean_gbz(rb)) < 1e-12);
}

TEST_CASE("mean_gbt sees only the field strength") {
    Field2D bx(8, 8), by(8, 8), bz(8, 8);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            const double a = 0.3 * r + 0.7 * c;
            bx(r, c) = 2 * std::cos(a);
            by(r, c) = 2 * std::sin(a);
        }
    CHECK(mean_gbz(bx) > 0.0);
    CHECK(mean_gbt(VectorField2D(bx, by, bz)) < 1e-12);
}

TEST_CASE("gradient metrics are positive for non-constant fields") {
    FieldParams p;
    for (std::uint64_t s = 0; s < 10; ++s) {
        p.seed = s;
        const auto f = generate_test_field2d(FieldKind::gaussian_noise, 6, p);
        CHECK(mean_gbz(f) > 0.0);
        CHECK(mean_gbt(VectorField2D(f, f, f)) > 0.0);
    }
    Field2D checker(6, 6);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) checker(r, c) = (r + c) % 2 ? 1.0 : -1.0;
    CHECK(mean_gbz(checker) > 0.0);
}

TEST_CASE("nmae") {
    const std::vector<double> obs{1.5, -2.0, 8.0};
    CHECK(nmae(obs, obs) == 0.0);
    std::vector<double> scaled = obs;
    for (auto& x : scaled) x *= 1.1;
    CHECK(std::abs(nmae(scaled, obs) - 0.1) < 1e-12);
    CHECK(nmae(std::vector<double>{2, 4}, std::vector<double>{1, 8}) == 0.75);
    CHECK_THROWS_AS(nmae(std::vector<double>{1, 2}, std::vector<double>{1, 0}), DomainError);
    CHECK_THROWS_AS(nmae(std::vector<double>{1}, std::vector<double>{1, 2}), DomainError);
}

TEST_CASE("field shape checks") {
    CHECK_THROWS_AS(Field2D(1, 5), DomainError);
    CHECK_THROWS_AS(Field2D(3, 3, 0.0), DomainError);
    CHECK_THROWS_AS(Field2D(3, 3, std::vector<double>(8)), DomainError);
    CHECK_THROWS_AS(VectorField2D(Field2D(3, 3), Field2D(3, 4), Field2D(3, 3)), DomainError);
}

TEST_CASE("horizon buckets") {
    const std::vector<HorizonBucket> b{parse_bucket("1:4"), parse_bucket("4:16"), parse_bucket("16:32")};
    CHECK(b[1].label() == "4:16");
    CHECK(bucket_steps(b, 0) == std::vector<int>{1, 2, 3, 4});
    CHECK(bucket_steps(b, 1).front() == 5);
    CHECK(bucket_steps(b, 1).size() == 12);
    CHECK(bucket_steps(b, 2).back() == 32);
    CHECK_THROWS_AS(parse_bucket("4"), DomainError);
    CHECK_THROWS_AS(parse_bucket("a:b"), DomainError);
    CHECK_THROWS_AS(parse_bucket("5:2"), DomainError);
}
