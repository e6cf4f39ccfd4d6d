#include "msd/synthetic.hpp"

#include "msd/errors.hpp"
#include "msd/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace msd {

void validate(const SinusoidConfig& c) {
    if (c.length < 1) throw DomainError("sinusoid length must be >= 1");
    if (!(c.period > 0.0)) throw DomainError("sinusoid period must be > 0");
    if (!(c.noise_std >= 0.0)) throw DomainError("noise_std must be >= 0");
    if (c.present_index < 0 || c.present_index >= c.length)
        throw DomainError("present_index must lie inside the trajectory");
}

double sinusoid_trend(const SinusoidConfig& c, double i) {
    return c.amplitude * std::sin(2.0 * std::numbers::pi * i / c.period + c.phase);
}

Trajectory generate_sinusoid(const SinusoidConfig& c) {
    validate(c);
    CounterRng rng(c.seed);
    Trajectory out;
    out.present_index = c.present_index;
    out.values.resize(static_cast<std::size_t>(c.length));
    for (int i = 0; i < c.length; ++i) {
        const double noise = rng.normal();
        out.values[static_cast<std::size_t>(i)] = sinusoid_trend(c, i) + c.noise_std * noise;
    }
    return out;
}

SinusoidConfig dataset_member_config(const SinusoidConfig& c, int i, std::uint64_t base_seed) {
    SinusoidConfig m = c;
    CounterRng phase_rng(derive_seed(base_seed, 2 * static_cast<std::uint64_t>(i)));
    m.phase = phase_rng.uniform(0.0, 2.0 * std::numbers::pi);
    m.seed = derive_seed(base_seed, 2 * static_cast<std::uint64_t>(i) + 1);
    return m;
}

std::vector<Trajectory> generate_dataset(const SinusoidConfig& c, int n, std::uint64_t base_seed) {
    if (n < 1) throw DomainError("dataset size must be >= 1");
    validate(c);
    std::vector<Trajectory> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(generate_sinusoid(dataset_member_config(c, i, base_seed)));
    return out;
}

FieldKind parse_field_kind(std::string_view name) {
    if (name == "constant") return FieldKind::constant;
    if (name == "sinusoid_x") return FieldKind::sinusoid_x;
    if (name == "gaussian_noise") return FieldKind::gaussian_noise;
    throw DomainError("unknown field kind '" + std::string(name) + "'");
}

Field2D generate_test_field2d(FieldKind kind, int size, const FieldParams& p) {
    if (size < 4) throw DomainError("test fields need size >= 4");
    Field2D f(size, size, p.pixel_area);
    CounterRng rng(p.seed);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            switch (kind) {
                case FieldKind::constant: f(r, c) = p.value; break;
                case FieldKind::sinusoid_x:
                    f(r, c) = p.value * std::cos(2.0 * std::numbers::pi * p.wavenumber * c / size);
                    break;
                case FieldKind::gaussian_noise: f(r, c) = p.value * rng.normal(); break;
            }
        }
    }
    return f;
}

}  // namespace msd
