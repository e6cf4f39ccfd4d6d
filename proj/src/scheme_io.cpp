#include "msd/scheme_io.hpp"

#include "msd/errors.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace msd {

namespace {

enum class Cell { unknown, available, conditioned, generated };

// rows[n][t + lookback]
std::vector<std::vector<Cell>> layout(const InferenceScheme& s) {
    const auto width = static_cast<std::size_t>(s.lookback + s.horizon + 1);
    std::vector<char> known(width, 0);
    for (int t = -s.lookback; t <= 0; ++t) known[static_cast<std::size_t>(t + s.lookback)] = 1;
    auto col = [&](int t) -> long { return static_cast<long>(t) + s.lookback; };

    std::vector<std::vector<Cell>> rows;
    for (std::size_t n = 0; n < s.actions.size(); ++n) {
        std::vector<Cell> row(width, Cell::unknown);
        for (std::size_t c = 0; c < width; ++c)
            if (known[c]) row[c] = Cell::available;
        for (int t : s.conditioned(n))
            if (col(t) >= 0 && col(t) < static_cast<long>(width)) row[static_cast<std::size_t>(col(t))] = Cell::conditioned;
        for (int t : s.generated(n))
            if (col(t) >= 0 && col(t) < static_cast<long>(width)) row[static_cast<std::size_t>(col(t))] = Cell::generated;
        for (int t : s.generated(n))
            if (col(t) >= 0 && col(t) < static_cast<long>(width)) known[static_cast<std::size_t>(col(t))] = 1;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::json scheme_to_json(const InferenceScheme& s) {
    nlohmann::json actions = nlohmann::json::array();
    for (const auto& a : s.actions) {
        std::vector<int> mask(a.cond_mask.begin(), a.cond_mask.end());
        actions.push_back({{"template_id", a.template_id}, {"shift", a.shift}, {"cond_mask", mask}, {"block", a.block}});
    }
    return {{"horizon", s.horizon},   {"k", s.k},
            {"lookback", s.lookback}, {"block_horizon", s.block_horizon},
            {"templates", s.templates}, {"actions", actions}};
}

InferenceScheme scheme_from_json(const nlohmann::json& j) {
    try {
        InferenceScheme s;
        s.horizon = j.at("horizon").get<int>();
        s.k = j.at("k").get<int>();
        s.lookback = j.value("lookback", s.horizon);
        s.block_horizon = j.value("block_horizon", s.horizon);
        s.templates = j.at("templates").get<std::vector<std::vector<int>>>();
        for (const auto& a : j.at("actions")) {
            Action act;
            act.template_id = a.at("template_id").get<std::size_t>();
            act.shift = a.at("shift").get<int>();
            for (const auto& m : a.at("cond_mask")) act.cond_mask.push_back(m.is_boolean() ? m.get<bool>() : m.get<int>() != 0);
            act.block = a.value("block", 0);
            s.actions.push_back(std::move(act));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed scheme document: ") + e.what());
    }
}

std::string render_scheme_text(const InferenceScheme& s) {
    std::ostringstream os;
    const auto rows = layout(s);
    os << "     ";
    for (int t = -s.lookback; t <= s.horizon; ++t) os << (t == 0 ? '|' : (t % 5 == 0 ? '+' : ' '));
    os << "\n";
    for (std::size_t n = 0; n < rows.size(); ++n) {
        os << std::setw(3) << (n + 1) << "  ";
        for (Cell c : rows[n]) {
            switch (c) {
                case Cell::unknown: os << '.'; break;
                case Cell::available: os << '#'; break;
                case Cell::conditioned: os << 'C'; break;
                case Cell::generated: os << 'G'; break;
            }
        }
        os << "  " << (s.actions[n].template_id + 1) << "\n";
    }
    return os.str();
}

std::string render_scheme_svg(const InferenceScheme& s) {
    constexpr int cell = 14;
    constexpr int left = 40;
    constexpr int right = 40;
    const auto rows = layout(s);
    const int width = left + right + cell * (s.lookback + s.horizon + 1);
    const int height = cell * (static_cast<int>(rows.size()) + 1) + 8;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const int zero_x = left + cell * s.lookback;
    os << "<line x1=\"" << zero_x + cell << "\" y1=\"0\" x2=\"" << zero_x + cell << "\" y2=\"" << height
       << "\" stroke=\"black\" stroke-dasharray=\"2,2\"/>\n";
    for (std::size_t n = 0; n < rows.size(); ++n) {
        const int y = 4 + cell * static_cast<int>(n);
        os << "<text x=\"4\" y=\"" << y + cell - 3 << "\" font-size=\"11\">" << n + 1 << "</text>\n";
        for (std::size_t c = 0; c < rows[n].size(); ++c) {
            const char* fill = "none";
            switch (rows[n][c]) {
                case Cell::unknown: fill = "#f2f2f2"; break;
                case Cell::available: fill = "#323232"; break;
                case Cell::conditioned: fill = "#ff0000"; break;
                case Cell::generated: fill = "#0000ff"; break;
            }
            os << "<rect x=\"" << left + cell * static_cast<int>(c) << "\" y=\"" << y << "\" width=\"" << cell - 2
               << "\" height=\"" << cell - 2 << "\" fill=\"" << fill << "\"/>\n";
        }
        os << "<text x=\"" << width - right + 6 << "\" y=\"" << y + cell - 3 << "\" font-size=\"11\">"
           << s.actions[n].template_id + 1 << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace msd
