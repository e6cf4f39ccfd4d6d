#pragma once

#include "msd/metrics.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace msd {

struct SinusoidConfig {
    int length = 120;
    double period = 60.0;
    double amplitude = 1.0;
    double phase = 1.5707963267948966;  // negative trend peak at t = period / 2
    double noise_std = 0.5;
    std::uint64_t seed = 0;
    int present_index = 59;
};

void validate(const SinusoidConfig& c);

/// Values indexed by array position; time t relative to the present is
/// stored at `present_index + t`.
struct Trajectory {
    std::vector<double> values;
    int present_index = 0;

    double at(int t) const { return values.at(static_cast<std::size_t>(present_index + t)); }
    int length() const noexcept { return static_cast<int>(values.size()); }
    int future_length() const noexcept { return length() - present_index - 1; }
};

// Deterministic trend amplitude * sin(2 pi i / period + phase) at array index i.
double sinusoid_trend(const SinusoidConfig& c, double i);

Trajectory generate_sinusoid(const SinusoidConfig& c);

// Config of dataset member i: random phase in [0, 2 pi) and an independent
// noise seed, both derived from base_seed.
SinusoidConfig dataset_member_config(const SinusoidConfig& c, int i, std::uint64_t base_seed);

std::vector<Trajectory> generate_dataset(const SinusoidConfig& c, int n, std::uint64_t base_seed);

enum class FieldKind { constant, sinusoid_x, gaussian_noise };

FieldKind parse_field_kind(std::string_view name);

struct FieldParams {
    double value = 1.0;      // constant level / tone amplitude / noise std
    int wavenumber = 1;      // sinusoid_x cycles across the width
    std::uint64_t seed = 0;  // gaussian_noise
    double pixel_area = 1.0;
};

Field2D generate_test_field2d(FieldKind kind, int size, const FieldParams& p = {});

}  // namespace msd
