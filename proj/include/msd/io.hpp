#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace msd {

/// Dense rows x length table of doubles.
///
/// On disk: magic "MSDS", u32 version, u64 rows, u64 length, then
/// rows * length IEEE-754 doubles, row-major, all little-endian.
struct SeriesTable {
    std::uint64_t rows = 0;
    std::uint64_t length = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values).subspan(i * length, length);
    }
    std::span<double> row(std::size_t i) { return std::span<double>(values).subspan(i * length, length); }
};

inline constexpr std::uint32_t kSeriesVersion = 1;

void write_series(const std::filesystem::path& path, const SeriesTable& table);
SeriesTable read_series(const std::filesystem::path& path);

// "<path>.json" next to a binary artifact.
std::filesystem::path sidecar_path(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// Long format: row, t, value with t = column - present_index.
void write_series_csv(const std::filesystem::path& path, const SeriesTable& table, int present_index);

namespace le {
void put_u32(std::ostream& os, std::uint32_t v);
void put_u64(std::ostream& os, std::uint64_t v);
void put_f64(std::ostream& os, double v);
std::uint32_t get_u32(std::istream& is);
std::uint64_t get_u64(std::istream& is);
double get_f64(std::istream& is);
}  // namespace le

}  // namespace msd
