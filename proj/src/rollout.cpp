#include "msd/rollout.hpp"

#include "msd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace msd {

std::uint64_t rollout_seed(std::uint64_t master, std::size_t member, std::size_t action) noexcept {
    return derive_seed(derive_seed(master, member), action);
}

TrajectoryEnsemble run(const DenoiserModel& d, const RolloutRequest& req) {
    if (req.total < 1) throw DomainError("rollout needs total >= 1");
    if (req.n_ensemble < 1) throw DomainError("rollout needs n_ensemble >= 1");
    if (!(req.value_scale > 0.0)) throw DomainError("value_scale must be positive");
    const InferenceScheme s = req.total > req.scheme.horizon ? extend_scheme(req.scheme, req.total) : req.scheme;
    const int past = req.observed.present_index;
    if (past < s.lookback || past >= req.observed.length())
        throw DomainError("observed past has " + std::to_string(past + 1) + " steps, scheme needs " +
                          std::to_string(s.lookback + 1));

    // Buffer position of time t is past + t.
    const int span = past + 1 + std::max(s.horizon, req.total);
    std::vector<char> known(static_cast<std::size_t>(span), 0);
    for (int i = 0; i <= past; ++i) known[static_cast<std::size_t>(i)] = 1;
    std::vector<std::vector<double>> buf(static_cast<std::size_t>(req.n_ensemble),
                                         std::vector<double>(static_cast<std::size_t>(span), std::nan("")));
    for (auto& b : buf)
        for (int i = 0; i <= past; ++i) b[static_cast<std::size_t>(i)] = req.observed.values[static_cast<std::size_t>(i)];

    TrajectoryEnsemble e;
    e.total = req.total;
    e.provenance.assign(static_cast<std::size_t>(req.total), StepProvenance{});
    const double scale = req.value_scale;

    for (std::size_t n = 0; n < s.actions.size(); ++n) {
        const Action& a = s.actions[n];
        const auto& offsets = s.templates.at(a.template_id);
        const auto window = s.window(n);
        std::vector<std::size_t> pos(window.size());
        for (std::size_t i = 0; i < window.size(); ++i) {
            const int t = window[i];
            if (past + t < 0 || past + t >= span)
                throw AdmissibilityError("action " + std::to_string(n) + " reaches step " + std::to_string(t) +
                                             " outside the rollout",
                                         static_cast<int>(n), t);
            pos[i] = static_cast<std::size_t>(past + t);
            const bool is_known = known[pos[i]] != 0;
            if (a.cond_mask[i] && !is_known)
                throw AdmissibilityError("action " + std::to_string(n) + " conditions on step " + std::to_string(t) +
                                             " before it is available",
                                         static_cast<int>(n), t);
            if (!a.cond_mask[i] && is_known)
                throw AdmissibilityError("action " + std::to_string(n) + " would overwrite step " + std::to_string(t),
                                         static_cast<int>(n), t);
        }

        std::vector<MaskedSample> windows;
        std::vector<std::uint64_t> seeds;
        windows.reserve(buf.size());
        for (std::size_t m = 0; m < buf.size(); ++m) {
            MaskedSample w{std::vector<double>(window.size(), 0.0), a.cond_mask, offsets};
            for (std::size_t i = 0; i < window.size(); ++i)
                if (a.cond_mask[i]) w.values[i] = buf[m][pos[i]] / scale;
            windows.push_back(std::move(w));
            seeds.push_back(rollout_seed(req.sampler.seed, m, n));
        }

        std::vector<std::vector<double>> out;
        try {
            out = sample_batch(d, windows, seeds, req.sampler.schedule, req.sampler.method);
        } catch (const DivergenceError& err) {
            throw DivergenceError("action " + std::to_string(n) + " (block " + std::to_string(a.block) +
                                      "): " + err.what(),
                                  err.step());
        }
        bool generates = false;
        for (bool c : a.cond_mask) generates = generates || !c;
        if (generates) e.sampler_calls += buf.size();

        for (std::size_t i = 0; i < window.size(); ++i) {
            if (a.cond_mask[i]) continue;
            known[pos[i]] = 1;
            for (std::size_t m = 0; m < buf.size(); ++m) buf[m][pos[i]] = out[m][i] * scale;
            if (window[i] <= req.total)
                e.provenance[static_cast<std::size_t>(window[i] - 1)] = {static_cast<int>(n), a.block};
        }
    }

    const auto keep = static_cast<std::size_t>(past + 1 + req.total);
    for (auto& b : buf) {
        b.resize(keep);
        e.members.push_back(Trajectory{std::move(b), past});
    }
    return e;
}

EnsembleStatistics ensemble_statistics(const TrajectoryEnsemble& e) {
    if (e.members.empty()) throw DomainError("ensemble is empty");
    EnsembleStatistics st;
    const double n = static_cast<double>(e.members.size());
    for (int t = 1; t <= e.total; ++t) {
        double mean = 0.0;
        for (const auto& m : e.members) mean += m.at(t);
        mean /= n;
        double var = 0.0;
        for (const auto& m : e.members) var += (m.at(t) - mean) * (m.at(t) - mean);
        st.mean.push_back(mean);
        st.std.push_back(std::sqrt(var / n));
    }
    return st;
}

std::vector<double> pooled_samples(const TrajectoryEnsemble& e, std::span<const int> steps) {
    std::vector<double> out;
    out.reserve(e.members.size() * steps.size());
    for (const auto& m : e.members) {
        for (int t : steps) {
            if (t < 1 || t > e.total) throw DomainError("step " + std::to_string(t) + " is outside the rollout");
            out.push_back(m.at(t));
        }
    }
    return out;
}

}  // namespace msd
