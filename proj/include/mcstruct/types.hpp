#ifndef MCSTRUCT_TYPES_HPP
#define MCSTRUCT_TYPES_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace mcstruct {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when an exact (brute-force) routine is asked for a problem
/// beyond its size bound. The message names the scalable alternative.
class size_limit_error : public std::runtime_error {
public:
    explicit size_limit_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an iterative trainer produces non-finite values.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& what, int epoch)
        : std::runtime_error(what), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

} // namespace mcstruct

#endif
