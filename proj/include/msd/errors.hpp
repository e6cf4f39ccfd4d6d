#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace msd {

// Precondition or argument outside the valid domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Inconsistent configuration (e.g. a dataset too short for a template).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Missing, truncated or corrupt artifact file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The multiscale planner found no admissible candidate.
class PlanningError : public std::runtime_error {
public:
    PlanningError(const std::string& what, std::vector<int> uncovered)
        : std::runtime_error(what), uncovered_(std::move(uncovered)) {}

    const std::vector<int>& uncovered() const noexcept { return uncovered_; }

private:
    std::vector<int> uncovered_;
};

// Non-finite state inside the reverse-SDE integrator.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int step)
        : std::runtime_error(what), step_(step) {}

    int step() const noexcept { return step_; }

private:
    int step_;
};

// A conditioning index was not available when an action executed.
class AdmissibilityError : public std::runtime_error {
public:
    AdmissibilityError(const std::string& what, int action, int index)
        : std::runtime_error(what), action_(action), index_(index) {}

    int action() const noexcept { return action_; }
    int index() const noexcept { return index_; }

private:
    int action_;
    int index_;
};

}  // namespace msd
