#include "doctest.h"

#include "msd/errors.hpp"
#include "msd/io.hpp"
#include "msd/scheme_io.hpp"
#include "msd/templates.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace msd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "msd_test_io") { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

}  // namespace

TEST_CASE("series files round trip") {
    TempDir dir;
    SeriesTable t{2, 3, {1.5, -2.0, 0.0, 1e-300, std::numeric_limits<double>::max(), -0.25}};
    write_series(dir.path / "a.bin", t);
    const auto back = read_series(dir.path / "a.bin");
    CHECK(back.rows == 2);
    CHECK(back.length == 3);
    CHECK(back.values == t.values);
    CHECK(back.row(1)[1] == std::numeric_limits<double>::max());
    CHECK(fs::file_size(dir.path / "a.bin") == 4 + 4 + 8 + 8 + 6 * 8);

    const auto bytes = slurp(dir.path / "a.bin");
    CHECK(bytes.substr(0, 4) == "MSDS");
    CHECK(static_cast<unsigned char>(bytes[4]) == 1);
    CHECK(static_cast<unsigned char>(bytes[8]) == 2);
    // 1.5 little-endian: 00 00 00 00 00 00 f8 3f
    CHECK(static_cast<unsigned char>(bytes[30]) == 0xf8);
    CHECK(static_cast<unsigned char>(bytes[31]) == 0x3f);
}

TEST_CASE("corrupt series files are reported") {
    TempDir dir;
    CHECK_THROWS_AS(read_series(dir.path / "missing.bin"), IoError);
    {
        std::ofstream os(dir.path / "magic.bin", std::ios::binary);
        os << "XXXX0000";
    }
    CHECK_THROWS_AS(read_series(dir.path / "magic.bin"), IoError);
    SeriesTable t{1, 4, {1, 2, 3, 4}};
    write_series(dir.path / "t.bin", t);
    fs::resize_file(dir.path / "t.bin", fs::file_size(dir.path / "t.bin") - 1);
    CHECK_THROWS_AS(read_series(dir.path / "t.bin"), IoError);
    write_series(dir.path / "u.bin", t);
    {
        std::ofstream os(dir.path / "u.bin", std::ios::binary | std::ios::app);
        os << "extra";
    }
    CHECK_THROWS_AS(read_series(dir.path / "u.bin"), IoError);
    SeriesTable bad{2, 2, {1, 2, 3}};
    CHECK_THROWS_AS(write_series(dir.path / "v.bin", bad), DomainError);
}

TEST_CASE("json sidecars and csv export") {
    TempDir dir;
    CHECK(sidecar_path("x/data.bin") == fs::path("x/data.bin.json"));
    write_json(dir.path / "c.json", {{"a", 1}, {"b", {1, 2}}});
    CHECK(read_json(dir.path / "c.json")["b"][1] == 2);
    {
        std::ofstream os(dir.path / "broken.json");
        os << "{\"a\":";
    }
    CHECK_THROWS_AS(read_json(dir.path / "broken.json"), IoError);
    CHECK_THROWS_AS(read_json(dir.path / "none.json"), IoError);

    write_series_csv(dir.path / "s.csv", SeriesTable{1, 3, {0.5, 1.5, 2.5}}, 1);
    CHECK(slurp(dir.path / "s.csv") == "row,t,value\n0,-1,0.5\n0,0,1.5\n0,1,2.5\n");
}

TEST_CASE("scheme json round trip") {
    const auto s = extend_scheme(plan_multiscale(9, 3, standard_templates(9, 3)), 18);
    const auto j = scheme_to_json(s);
    CHECK(j["horizon"] == 18);
    CHECK(j["actions"][0]["cond_mask"] == nlohmann::json({1, 1, 1, 1, 0, 0, 0}));
    CHECK(scheme_from_json(j) == s);
    CHECK(scheme_from_json(nlohmann::json::parse(j.dump())) == s);
    CHECK_THROWS_AS(scheme_from_json({{"horizon", 9}}), IoError);
    auto broken = j;
    broken["actions"][0]["shift"] = "zero";
    CHECK_THROWS_AS(scheme_from_json(broken), IoError);
}

TEST_CASE("text diagram marks conditioned and generated steps") {
    const std::string text = render_scheme_text(plan_autoregressive(9, 3));
    std::istringstream is(text);
    std::string header, r1, r2, r3;
    std::getline(is, header);
    std::getline(is, r1);
    std::getline(is, r2);
    std::getline(is, r3);
    CHECK(r1 == "  1  CCCCGGG......  1");
    CHECK(r2 == "  2  ###CCCCGGG...  1");
    CHECK(r3 == "  3  ######CCCCGGG  1");

    const auto svg = render_scheme_svg(plan_multiscale(9, 3, standard_templates(9, 3)));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("#ff0000") != std::string::npos);
    CHECK(svg.find("#0000ff") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
