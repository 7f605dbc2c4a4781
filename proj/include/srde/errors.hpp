#pragma once

#include <stdexcept>
#include <string>

namespace srde {

/// A trajectory produced a non-finite value; carries the simulation time at
/// which the blow-up was detected.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double time, const std::string& what)
        : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Covariance matrix failed the positive-semidefinite tolerance.
class CovarianceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A noise-forced mode has a non-positive decay rate and therefore no
/// stationary law.
class DegenerateDecayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two trajectories expected on the same time grid disagree.
class GridMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Too many trajectories of an ensemble diverged.
class EnsembleFailureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace srde
