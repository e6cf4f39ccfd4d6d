#include "doctest.h"

#include "msd/errors.hpp"
#include "msd/rollout.hpp"
#include "msd/templates.hpp"

#include <cmath>
#include <vector>

using namespace msd;

namespace {

// Records every window it sees; returns a fixed value per call order.
class RecordingDenoiser final : public DenoiserModel {
public:
    using DenoiserModel::denoise;
    Eigen::MatrixXd denoise(const Eigen::MatrixXd& x, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& mask,
                            const Eigen::MatrixXd& times) const override {
        if (sigma(0) == first_sigma) {
            masks.push_back(mask.col(0));
            window_times.push_back(times.col(0));
            inputs.push_back(x.col(0));
        }
        return Eigen::MatrixXd::Constant(x.rows(), x.cols(), 7.0);
    }
    double first_sigma = NoiseSchedule{}.sigma_max;
    mutable std::vector<Eigen::VectorXd> masks, window_times, inputs;
};

Trajectory observed_ramp(int past) {
    Trajectory t;
    t.present_index = past;
    for (int i = 0; i <= past; ++i) t.values.push_back(0.1 * i);
    return t;
}

RolloutRequest request(InferenceScheme s, int total, int members, std::uint64_t seed = 3) {
    RolloutRequest r;
    r.scheme = std::move(s);
    r.observed = observed_ramp(30);
    r.total = total;
    r.n_ensemble = members;
    r.sampler.seed = seed;
    r.sampler.schedule.steps = 20;
    return r;
}

}  // namespace

TEST_CASE("all-conditioning scheme leaves the observed data alone") {
    InferenceScheme s;
    s.horizon = 2;
    s.k = 1;
    s.lookback = 2;
    s.block_horizon = 2;
    s.templates = {{-2, -1, 0}};
    s.actions = {Action{0, 0, {true, true, true}, 0}};
    RecordingDenoiser d;
    const auto e = run(d, request(s, 2, 3));
    CHECK(d.masks.empty());
    CHECK(e.sampler_calls == 0);
    for (const auto& m : e.members) {
        for (int t = -30; t <= 0; ++t) CHECK(m.at(t) == observed_ramp(30).at(t));
        CHECK(std::isnan(m.at(1)));
    }
    CHECK(e.provenance[0].action == -1);
}

TEST_CASE("multiscale horizon-9 rollout windows") {
    RecordingDenoiser d;
    const auto s = plan_multiscale(9, 3, standard_templates(9, 3));
    const auto e = run(d, request(s, 9, 2));
    REQUIRE(d.masks.size() == 3);
    CHECK(e.sampler_calls == 6);
    Eigen::VectorXd t0(7), m0(7);
    t0 << -9, -3, -1, 0, 1, 3, 9;
    m0 << 1, 1, 1, 1, 0, 0, 0;
    CHECK(d.window_times[0] == t0);
    CHECK(d.masks[0] == m0);
    // Conditioning values are the observed steps -9, -3, -1, 0.
    CHECK(d.inputs[0](0) == doctest::Approx(0.1 * 21));
    CHECK(d.inputs[0](3) == doctest::Approx(3.0));
    // Second call conditions on the generated steps 1, 3, 9.
    CHECK(d.inputs[1](1) == doctest::Approx(7.0).epsilon(1e-3));
    CHECK(e.provenance[0] == StepProvenance{0, 0});
    CHECK(e.provenance[1] == StepProvenance{1, 0});
    CHECK(e.provenance[8] == StepProvenance{0, 0});
    CHECK(e.provenance[6] == StepProvenance{2, 0});
    for (const auto& m : e.members)
        for (int t = 1; t <= 9; ++t) CHECK(m.at(t) == doctest::Approx(7.0).epsilon(1e-3));
}

TEST_CASE("autoregressive rollout forgets the observed data after the first call") {
    RecordingDenoiser d;
    const auto e = run(d, request(plan_autoregressive(9, 3), 9, 1));
    REQUIRE(d.inputs.size() == 3);
    CHECK(d.inputs[0](0) == doctest::Approx(2.7));
    for (int i = 0; i < 4; ++i) CHECK(d.inputs[1](i) == doctest::Approx(i == 0 ? 3.0 : 7.0).epsilon(1e-3));
    for (int i = 0; i < 4; ++i) CHECK(d.inputs[2](i) == doctest::Approx(7.0).epsilon(1e-3));
    CHECK(e.sampler_calls == 3);
}

TEST_CASE("extended schemes repeat per block and truncate") {
    RecordingDenoiser d;
    const auto s = plan_multiscale(9, 3, standard_templates(9, 3));
    const auto e = run(d, request(s, 20, 4));
    CHECK(e.sampler_calls == 9 * 4);
    CHECK(e.members.front().future_length() == 20);
    CHECK(e.provenance[9] == StepProvenance{3, 1});
    CHECK(e.provenance[19] == StepProvenance{7, 2});

    RecordingDenoiser d2;
    const auto ar = run(d2, request(plan_autoregressive(10, 3), 10, 1));
    CHECK(ar.sampler_calls == 4);
    CHECK(ar.members.front().future_length() == 10);
}

TEST_CASE("value scale is applied around the model") {
    RecordingDenoiser d;
    auto r = request(plan_autoregressive(3, 3), 3, 1);
    r.value_scale = 2.0;
    const auto e = run(d, r);
    CHECK(d.inputs[0](3) == doctest::Approx(1.5));
    CHECK(e.members[0].at(2) == doctest::Approx(14.0).epsilon(1e-3));
}

TEST_CASE("runtime admissibility errors name the action and step") {
    auto s = plan_multiscale(9, 3, standard_templates(9, 3));
    std::swap(s.actions[1], s.actions[2]);
    RecordingDenoiser d;
    try {
        run(d, request(s, 9, 1));
        FAIL("expected an admissibility error");
    } catch (const AdmissibilityError& e) {
        CHECK(e.action() == 1);
        CHECK(e.index() == 4);
    }
    auto twice = plan_autoregressive(6, 3);
    twice.actions[1] = twice.actions[0];
    try {
        run(d, request(twice, 6, 1));
        FAIL("expected a write-once error");
    } catch (const AdmissibilityError& e) {
        CHECK(e.action() == 1);
    }
    auto r = request(plan_multiscale(9, 3, standard_templates(9, 3)), 9, 1);
    r.observed = observed_ramp(5);
    CHECK_THROWS_AS(run(d, r), DomainError);
}

TEST_CASE("rollout is deterministic and members differ") {
    GaussianDenoiser g(1.0);
    const auto s = plan_multiscale(9, 3, standard_templates(9, 3));
    const auto a = run(g, request(s, 18, 3, 5));
    const auto b = run(g, request(s, 18, 3, 5));
    for (std::size_t m = 0; m < a.size(); ++m) {
        CHECK(a.members[m].values == b.members[m].values);
        for (int t = -30; t <= 0; ++t) CHECK(a.members[m].at(t) == observed_ramp(30).at(t));
    }
    CHECK(a.members[0].values != a.members[1].values);
    const auto c = run(g, request(s, 18, 3, 6));
    CHECK(c.members[0].values != a.members[0].values);
}

TEST_CASE("a lone member can be reproduced from its derived seed") {
    GaussianDenoiser g(1.0);
    const auto s = plan_autoregressive(3, 3);
    const auto e = run(g, request(s, 3, 2, 11));
    MaskedSample w{{2.7, 2.8, 2.9, 3.0, 0, 0, 0}, s.actions[0].cond_mask, s.templates[0]};
    SamplerConfig cfg;
    cfg.schedule.steps = 20;
    cfg.seed = rollout_seed(11, 1, 0);
    const auto out = sample(g, w, cfg);
    for (int t = 1; t <= 3; ++t) CHECK(e.members[1].at(t) == out[static_cast<std::size_t>(3 + t)]);
}

TEST_CASE("ensemble statistics") {
    GaussianDenoiser g(1.0);
    const auto s = plan_multiscale(9, 3, standard_templates(9, 3));
    const auto one = run(g, request(s, 9, 1));
    for (double v : ensemble_statistics(one).std) CHECK(v == 0.0);

    TrajectoryEnsemble same;
    same.total = 2;
    same.members = {Trajectory{{0, 1, 2}, 0}, Trajectory{{0, 1, 2}, 0}, Trajectory{{0, 1, 2}, 0}};
    const std::vector<int> steps{1, 2};
    CHECK(pooled_samples(same, steps) == std::vector<double>{1, 2, 1, 2, 1, 2});
    CHECK(ensemble_statistics(same).mean == std::vector<double>{1, 2});
    CHECK_THROWS_AS(pooled_samples(same, std::vector<int>{3}), DomainError);

    auto r = request(s, 9, 256);
    r.sampler.schedule.steps = 100;
    const auto big = run(g, r);
    for (double v : ensemble_statistics(big).std) CHECK(v == doctest::Approx(1.0).epsilon(0.1));
}
