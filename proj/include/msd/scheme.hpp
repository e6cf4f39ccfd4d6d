#pragma once

#include "msd/templates.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace msd {

/// One call to the conditional generator: a window (template offsets moved by
/// `shift`) whose masked-true entries are conditioning and masked-false
/// entries are generated.
struct Action {
    std::size_t template_id = 0;
    int shift = 0;
    std::vector<bool> cond_mask;
    int block = 0;  // repetition index after extend_scheme

    friend bool operator==(const Action&, const Action&) = default;
};

/// Ordered list of generator calls covering the future steps 1..horizon.
///
/// `templates` holds the window offset sets the actions refer to. For the
/// multiscale planner these are the multiscale templates; baselines may use
/// other windows. Observed data is available on [-lookback, 0].
struct InferenceScheme {
    int horizon = 0;
    int k = 0;
    int lookback = 0;
    int block_horizon = 0;
    std::vector<std::vector<int>> templates;
    std::vector<Action> actions;

    std::vector<int> window(std::size_t n) const;
    std::vector<int> conditioned(std::size_t n) const;
    std::vector<int> generated(std::size_t n) const;

    friend bool operator==(const InferenceScheme&, const InferenceScheme&) = default;
};

/// Time indices known at a given point of the rollout: the observed window
/// [-lookback, 0] plus everything generated so far.
class AvailabilityState {
public:
    AvailabilityState(int lookback, int horizon);

    bool contains(int t) const noexcept;
    void add(int t);
    void remove(int t);
    int lookback() const noexcept { return lookback_; }
    int horizon() const noexcept { return horizon_; }
    std::vector<int> missing_future() const;

private:
    int lookback_;
    int horizon_;
    std::vector<char> known_;
};

enum class SchemeProperty { none, budget, admissibility, efficiency, completeness };

std::string_view to_string(SchemeProperty p) noexcept;

struct ValidationReport {
    SchemeProperty violated = SchemeProperty::none;
    int action = -1;  // offending action (0-based), -1 when not action-specific
    std::vector<int> indices;
    std::string message;

    bool ok() const noexcept { return violated == SchemeProperty::none; }
    explicit operator bool() const noexcept { return ok(); }
};

// Greedy template/shift search: templates in decreasing order, shifts 0..H,
// exactly K+1 available entries; the first candidate ending on step H is
// taken, otherwise the one leaving the fewest generated steps outside its
// window. Dead ends fall back to the next candidates in the same order.
// `lookback` < 0 means "horizon".
InferenceScheme plan_multiscale(int horizon, int k, const std::vector<Template>& templates,
                                int lookback = -1);

InferenceScheme plan_autoregressive(int total, int k);

InferenceScheme plan_hierarchy2(int horizon, int k);

ValidationReport validate_scheme(const InferenceScheme& s);

// Repeats the scheme with the present moved forward by s.horizon per block
// until at least `total` steps are covered.
InferenceScheme extend_scheme(const InferenceScheme& s, int total);

// Present minus the smallest conditioned index over all actions.
int max_lookback(const InferenceScheme& s);

// True when a K-budget scheme can cover exactly {1..h}.
bool horizon_reachable(int h, int k) noexcept;

}  // namespace msd
