#include "msd/io.hpp"

#include "msd/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>

namespace msd {

namespace {

constexpr std::array<char, 4> kSeriesMagic{'M', 'S', 'D', 'S'};

template <typename T>
void put_le(std::ostream& os, T v) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw IoError("unexpected end of file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
}

}  // namespace

namespace le {
void put_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
void put_u64(std::ostream& os, std::uint64_t v) { put_le(os, v); }
void put_f64(std::ostream& os, double v) { put_le(os, v); }
std::uint32_t get_u32(std::istream& is) { return get_le<std::uint32_t>(is); }
std::uint64_t get_u64(std::istream& is) { return get_le<std::uint64_t>(is); }
double get_f64(std::istream& is) { return get_le<double>(is); }
}  // namespace le

void write_series(const std::filesystem::path& path, const SeriesTable& table) {
    if (table.values.size() != table.rows * table.length) throw DomainError("series table shape mismatch");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(kSeriesMagic.data(), kSeriesMagic.size());
    le::put_u32(os, kSeriesVersion);
    le::put_u64(os, table.rows);
    le::put_u64(os, table.length);
    for (double v : table.values) le::put_f64(os, v);
    if (!os) throw IoError("failed writing " + path.string());
}

SeriesTable read_series(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    try {
        std::array<char, 4> magic{};
        if (!is.read(magic.data(), magic.size()) || magic != kSeriesMagic)
            throw IoError("not a series file (bad magic)");
        const auto version = le::get_u32(is);
        if (version != kSeriesVersion) throw IoError("unsupported series version " + std::to_string(version));
        SeriesTable t;
        t.rows = le::get_u64(is);
        t.length = le::get_u64(is);
        const auto size = std::filesystem::file_size(path);
        if (t.length != 0 && t.rows > (size / 8) / t.length) throw IoError("series header larger than file");
        t.values.resize(t.rows * t.length);
        for (double& v : t.values) v = le::get_f64(is);
        if (is.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes after series data");
        return t;
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    auto p = path;
    p += ".json";
    return p;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_series_csv(const std::filesystem::path& path, const SeriesTable& table, int present_index) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "row,t,value\n" << std::setprecision(17);
    for (std::size_t r = 0; r < table.rows; ++r) {
        const auto row = table.row(r);
        for (std::size_t i = 0; i < row.size(); ++i)
            os << r << ',' << static_cast<long>(i) - present_index << ',' << row[i] << '\n';
    }
}

}  // namespace msd
