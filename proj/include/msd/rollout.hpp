#pragma once

#include "msd/diffusion.hpp"
#include "msd/scheme.hpp"
#include "msd/synthetic.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace msd {

struct RolloutRequest {
    InferenceScheme scheme;  // one block; repeated as needed to reach `total`
    Trajectory observed;     // only entries up to present_index are read
    int total = 1;           // future steps kept
    int n_ensemble = 1;
    SamplerConfig sampler;   // sampler.seed is the master seed
    // Values are divided by this before they reach the denoiser and
    // multiplied back afterwards.
    double value_scale = 1.0;
};

struct StepProvenance {
    int action = -1;  // index into the extended scheme's actions
    int block = -1;

    friend bool operator==(const StepProvenance&, const StepProvenance&) = default;
};

/// Members hold the observed past followed by `total` generated steps, with
/// the same present_index as the request. provenance[t - 1] records which
/// action generated future step t.
struct TrajectoryEnsemble {
    std::vector<Trajectory> members;
    std::vector<StepProvenance> provenance;
    int total = 0;
    std::size_t sampler_calls = 0;  // windows passed to the sampler

    std::size_t size() const noexcept { return members.size(); }
};

// Seed for member m at action n.
std::uint64_t rollout_seed(std::uint64_t master, std::size_t member, std::size_t action) noexcept;

/// Runs the scheme for every member. Actions run in order, batched across
/// members; generated values are written once and never overwritten. The
/// scheme is not validated here; future steps no action generates stay NaN.
///
/// Throws AdmissibilityError if an action conditions on a step that is not
/// available yet or regenerates a known step, and DivergenceError (message
/// naming the action) if the sampler blows up.
TrajectoryEnsemble run(const DenoiserModel& d, const RolloutRequest& req);

struct EnsembleStatistics {
    std::vector<double> mean;  // per future step 1..total
    std::vector<double> std;   // population std across members
};

EnsembleStatistics ensemble_statistics(const TrajectoryEnsemble& e);

// Member values at the given future steps, member-major.
std::vector<double> pooled_samples(const TrajectoryEnsemble& e, std::span<const int> steps);

}  // namespace msd
