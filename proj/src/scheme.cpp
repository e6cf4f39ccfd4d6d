#include "msd/scheme.hpp"

#include "msd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace msd {

namespace {

std::string join(const std::vector<int>& v) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << '}';
    return os.str();
}

std::size_t count_true(const std::vector<bool>& m) {
    return static_cast<std::size_t>(std::count(m.begin(), m.end(), true));
}

std::vector<int> uniform_offsets(int k) {
    std::vector<int> w;
    for (int t = -k; t <= k; ++t) w.push_back(t);
    return w;
}

std::size_t intern_window(std::vector<std::vector<int>>& templates, std::vector<int> offsets) {
    const auto it = std::find(templates.begin(), templates.end(), offsets);
    if (it != templates.end()) return static_cast<std::size_t>(it - templates.begin());
    templates.push_back(std::move(offsets));
    return templates.size() - 1;
}

// Action over an arbitrary absolute index set; offsets are taken relative to
// the step preceding the first generated index.
Action make_action(std::vector<std::vector<int>>& templates, const std::vector<int>& cond,
                   const std::vector<int>& gen) {
    std::vector<int> all(cond);
    all.insert(all.end(), gen.begin(), gen.end());
    std::sort(all.begin(), all.end());
    const int shift = *std::min_element(gen.begin(), gen.end()) - 1;
    Action a;
    a.shift = shift;
    for (int t : all) a.cond_mask.push_back(std::find(cond.begin(), cond.end(), t) != cond.end());
    a.template_id = intern_window(templates, shift_indices(all, -shift));
    return a;
}

// Candidate generation follows the greedy template/shift search. When the
// greedy choice leads to a state with no admissible window, the remaining
// candidates are tried in preference order (depth first, dead states
// memoized), so a greedy run that completes is returned unchanged.
class Planner {
public:
    Planner(InferenceScheme& s, const std::vector<Template>& templates, int lookback)
        : s_(s), templates_(templates), lookback_(lookback), avail_(lookback, s.horizon) {}

    bool solve() {
        const auto missing = avail_.missing_future();
        if (missing.empty()) return true;
        if (missing.size() < deepest_.size() || deepest_.empty()) deepest_ = missing;
        if (dead_.count(missing) || ++expansions_ > kMaxExpansions) return false;

        for (Action& a : candidates()) {
            s_.actions.push_back(std::move(a));
            const auto gen = s_.generated(s_.actions.size() - 1);
            for (int t : gen) avail_.add(t);
            if (solve()) return true;
            for (int t : gen) avail_.remove(t);
            s_.actions.pop_back();
        }
        dead_.insert(missing);
        return false;
    }

    const std::vector<int>& deepest_missing() const { return deepest_; }

private:
    static constexpr std::size_t kMaxExpansions = 200000;

    std::vector<Action> candidates() const {
        const int horizon = s_.horizon;
        const auto budget = static_cast<std::size_t>(s_.k + 1);
        std::vector<Action> anchored;
        std::vector<std::pair<std::size_t, Action>> scored;
        for (std::size_t n = templates_.size(); n-- > 0;) {
            const auto& tau = templates_[n].indices();
            for (int shift = 0; shift <= horizon; ++shift) {
                if (tau.back() + shift > horizon) continue;
                if (tau.front() + shift < -lookback_) continue;
                const auto window = shift_indices(tau, shift);

                std::vector<bool> mask;
                mask.reserve(window.size());
                for (int t : window) mask.push_back(avail_.contains(t));
                if (count_true(mask) != budget) continue;

                if (tau.back() + shift == horizon) {
                    anchored.push_back(Action{n, shift, std::move(mask), 0});
                    continue;
                }
                // Already generated steps that this window does not revisit.
                std::size_t uncovered = 0;
                for (int t = 1; t <= horizon; ++t) {
                    if (avail_.contains(t) && std::find(window.begin(), window.end(), t) == window.end())
                        ++uncovered;
                }
                scored.emplace_back(uncovered, Action{n, shift, std::move(mask), 0});
            }
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Action> out = std::move(anchored);
        for (auto& [score, a] : scored) out.push_back(std::move(a));
        return out;
    }

    InferenceScheme& s_;
    const std::vector<Template>& templates_;
    int lookback_;
    AvailabilityState avail_;
    std::set<std::vector<int>> dead_;
    std::vector<int> deepest_;
    std::size_t expansions_ = 0;
};

}  // namespace

std::vector<int> InferenceScheme::window(std::size_t n) const {
    const Action& a = actions.at(n);
    return shift_indices(templates.at(a.template_id), a.shift);
}

std::vector<int> InferenceScheme::conditioned(std::size_t n) const {
    const auto w = window(n);
    const auto& m = actions[n].cond_mask;
    std::vector<int> out;
    for (std::size_t i = 0; i < w.size() && i < m.size(); ++i)
        if (m[i]) out.push_back(w[i]);
    return out;
}

std::vector<int> InferenceScheme::generated(std::size_t n) const {
    const auto w = window(n);
    const auto& m = actions[n].cond_mask;
    std::vector<int> out;
    for (std::size_t i = 0; i < w.size() && i < m.size(); ++i)
        if (!m[i]) out.push_back(w[i]);
    return out;
}

AvailabilityState::AvailabilityState(int lookback, int horizon)
    : lookback_(lookback), horizon_(horizon),
      known_(static_cast<std::size_t>(lookback + horizon + 1), 0) {
    if (lookback < 0 || horizon < 0) throw DomainError("availability window must be non-negative");
    for (int t = -lookback; t <= 0; ++t) known_[static_cast<std::size_t>(t + lookback_)] = 1;
}

bool AvailabilityState::contains(int t) const noexcept {
    if (t < -lookback_ || t > horizon_) return false;
    return known_[static_cast<std::size_t>(t + lookback_)] != 0;
}

void AvailabilityState::remove(int t) {
    if (t < 1 || t > horizon_) throw DomainError("only generated indices can be removed");
    known_[static_cast<std::size_t>(t + lookback_)] = 0;
}

void AvailabilityState::add(int t) {
    if (t < 1 || t > horizon_) throw DomainError("generated index " + std::to_string(t) + " outside future window");
    known_[static_cast<std::size_t>(t + lookback_)] = 1;
}

std::vector<int> AvailabilityState::missing_future() const {
    std::vector<int> out;
    for (int t = 1; t <= horizon_; ++t)
        if (!contains(t)) out.push_back(t);
    return out;
}

std::string_view to_string(SchemeProperty p) noexcept {
    switch (p) {
        case SchemeProperty::none: return "none";
        case SchemeProperty::budget: return "budget";
        case SchemeProperty::admissibility: return "admissibility";
        case SchemeProperty::efficiency: return "efficiency";
        case SchemeProperty::completeness: return "completeness";
    }
    return "unknown";
}

bool horizon_reachable(int h, int k) noexcept {
    if (k < 1 || h < k || h % k != 0) return false;
    return k > 1 || h == 1;
}

InferenceScheme plan_multiscale(int horizon, int k, const std::vector<Template>& templates, int lookback) {
    if (k < 1) throw DomainError("k must be >= 1");
    if (horizon < k) throw DomainError("horizon must be >= k");
    if (templates.empty()) throw DomainError("template list is empty");
    for (std::size_t i = 0; i < templates.size(); ++i) {
        if (templates[i].k() != k) throw DomainError("template k does not match planner k");
        if (i > 0 && templates[i].horizon() < templates[i - 1].horizon())
            throw DomainError("templates must be ordered by increasing horizon");
    }
    if (templates.back().horizon() != horizon)
        throw DomainError("largest template horizon " + std::to_string(templates.back().horizon()) +
                          " differs from planning horizon " + std::to_string(horizon));
    if (lookback < 0) lookback = horizon;

    InferenceScheme s;
    s.horizon = horizon;
    s.k = k;
    s.lookback = lookback;
    s.block_horizon = horizon;
    for (const auto& t : templates) s.templates.push_back(t.indices());

    Planner planner(s, templates, lookback);
    if (!planner.solve()) {
        const auto missing = planner.deepest_missing();
        throw PlanningError("multiscale planner found no window with exactly " + std::to_string(k + 1) +
                                " available steps; uncovered " + join(missing),
                            missing);
    }
    return s;
}

InferenceScheme plan_autoregressive(int total, int k) {
    if (total < 1 || k < 1) throw DomainError("autoregressive scheme needs total >= 1 and k >= 1");
    const int calls = (total + k - 1) / k;
    InferenceScheme s;
    s.k = k;
    s.horizon = calls * k;
    s.lookback = k;
    s.block_horizon = s.horizon;
    s.templates.push_back(uniform_offsets(k));
    std::vector<bool> mask(static_cast<std::size_t>(2 * k + 1), false);
    std::fill(mask.begin(), mask.begin() + k + 1, true);
    for (int n = 0; n < calls; ++n) s.actions.push_back(Action{0, n * k, mask, 0});
    return s;
}

InferenceScheme plan_hierarchy2(int horizon, int k) {
    if (k < 1 || horizon < k) throw DomainError("hierarchy-2 scheme needs horizon >= k >= 1");
    if (horizon % k != 0) {
        std::vector<int> all;
        for (int t = 1; t <= horizon; ++t) all.push_back(t);
        throw PlanningError("hierarchy-2 horizon " + std::to_string(horizon) + " is not a multiple of k = " +
                                std::to_string(k),
                            all);
    }
    InferenceScheme s;
    s.k = k;
    s.horizon = horizon;
    s.lookback = k;
    s.block_horizon = horizon;
    const auto uniform_id = intern_window(s.templates, uniform_offsets(k));

    AvailabilityState avail(k, horizon);

    // Coarse pass: K anchors spread evenly over the horizon.
    std::vector<int> past;
    for (int t = -k; t <= 0; ++t) past.push_back(t);
    std::vector<int> anchors;
    for (int j = 1; j <= k; ++j)
        anchors.push_back(static_cast<int>(std::lround(static_cast<double>(j) * horizon / k)));
    s.actions.push_back(make_action(s.templates, past, anchors));
    for (int t : anchors) avail.add(t);

    // Fill pass.
    const auto& uni = s.templates[uniform_id];
    for (auto missing = avail.missing_future(); !missing.empty(); missing = avail.missing_future()) {
        bool found = false;
        bool found_bracketed = false;
        Action best;
        for (int shift = 0; shift + k <= horizon; ++shift) {
            const auto window = shift_indices(uni, shift);
            if (window.front() < -k) continue;
            std::vector<bool> mask;
            for (int t : window) mask.push_back(avail.contains(t));
            if (count_true(mask) != static_cast<std::size_t>(k + 1)) continue;
            // Bracketed: the last window entry is a known (future) frame.
            const bool bracketed = mask.back();
            if (!found || (bracketed && !found_bracketed)) {
                best = Action{uniform_id, shift, mask, 0};
                found = true;
                found_bracketed = bracketed;
            }
        }
        if (!found) {
            // No uniform window fits: generate the K earliest gaps from their
            // K+1 nearest known frames.
            if (missing.size() < static_cast<std::size_t>(k))
                throw PlanningError("hierarchy-2 fill cannot form a full window", missing);
            std::vector<int> gen(missing.begin(), missing.begin() + k);
            std::vector<std::pair<int, int>> ranked;  // (distance, index)
            for (int t = -k; t <= horizon; ++t) {
                if (!avail.contains(t)) continue;
                int d = std::numeric_limits<int>::max();
                for (int g : gen) d = std::min(d, std::abs(t - g));
                ranked.emplace_back(d, t);
            }
            std::sort(ranked.begin(), ranked.end());
            std::vector<int> cond;
            for (std::size_t i = 0; i < static_cast<std::size_t>(k + 1) && i < ranked.size(); ++i)
                cond.push_back(ranked[i].second);
            best = make_action(s.templates, cond, gen);
        }
        s.actions.push_back(best);
        for (int t : s.generated(s.actions.size() - 1)) avail.add(t);
    }
    return s;
}

ValidationReport validate_scheme(const InferenceScheme& s) {
    ValidationReport r;
    auto fail = [&r](SchemeProperty p, int action, std::vector<int> idx, std::string msg) {
        r.violated = p;
        r.action = action;
        r.indices = std::move(idx);
        r.message = std::move(msg);
        return r;
    };
    if (s.k < 1 || s.horizon < 1 || s.lookback < 0)
        return fail(SchemeProperty::budget, -1, {}, "scheme header is invalid");

    const auto window_size = static_cast<std::size_t>(2 * s.k + 1);
    AvailabilityState avail(s.lookback, s.horizon);
    for (std::size_t n = 0; n < s.actions.size(); ++n) {
        const int an = static_cast<int>(n);
        const Action& a = s.actions[n];
        if (a.template_id >= s.templates.size())
            return fail(SchemeProperty::budget, an, {}, "template id out of range");
        const auto cond = s.conditioned(n);
        const auto gen = s.generated(n);
        if (s.templates[a.template_id].size() != window_size || a.cond_mask.size() != window_size ||
            cond.size() != static_cast<std::size_t>(s.k + 1) || gen.size() != static_cast<std::size_t>(s.k)) {
            return fail(SchemeProperty::budget, an, cond,
                        "action " + std::to_string(n + 1) + " conditions on " + std::to_string(cond.size()) +
                            " and generates " + std::to_string(gen.size()) + " steps");
        }
        std::vector<int> bad;
        for (int t : cond)
            if (!avail.contains(t)) bad.push_back(t);
        if (!bad.empty())
            return fail(SchemeProperty::admissibility, an, bad,
                        "action " + std::to_string(n + 1) + " conditions on unavailable steps " + join(bad));
        for (int t : gen)
            if (t < 1 || t > s.horizon) bad.push_back(t);
        if (!bad.empty())
            return fail(SchemeProperty::completeness, an, bad,
                        "action " + std::to_string(n + 1) + " generates steps outside 1.." +
                            std::to_string(s.horizon) + ": " + join(bad));
        for (int t : gen)
            if (avail.contains(t)) bad.push_back(t);
        if (!bad.empty())
            return fail(SchemeProperty::efficiency, an, bad,
                        "action " + std::to_string(n + 1) + " regenerates steps " + join(bad));
        for (int t : gen) avail.add(t);
    }
    const auto missing = avail.missing_future();
    if (!missing.empty())
        return fail(SchemeProperty::completeness, -1, missing, "steps never generated: " + join(missing));
    return r;
}

InferenceScheme extend_scheme(const InferenceScheme& s, int total) {
    if (s.horizon < 1) throw DomainError("cannot extend an empty scheme");
    if (total < s.horizon) throw DomainError("extension target is shorter than the scheme horizon");
    const int blocks = (total + s.horizon - 1) / s.horizon;
    int blocks_in = 1;
    for (const Action& a : s.actions) blocks_in = std::max(blocks_in, a.block + 1);
    InferenceScheme out = s;
    out.horizon = blocks * s.horizon;
    out.actions.clear();
    for (int b = 0; b < blocks; ++b) {
        for (const Action& a : s.actions) {
            Action moved = a;
            moved.shift += b * s.horizon;
            moved.block = a.block + b * blocks_in;
            out.actions.push_back(std::move(moved));
        }
    }
    return out;
}

int max_lookback(const InferenceScheme& s) {
    int out = 0;
    for (std::size_t n = 0; n < s.actions.size(); ++n)
        for (int t : s.conditioned(n)) out = std::max(out, -t);
    return out;
}

}  // namespace msd
