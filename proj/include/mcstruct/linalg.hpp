#ifndef MCSTRUCT_LINALG_HPP
#define MCSTRUCT_LINALG_HPP

#include "mcstruct/types.hpp"

#include <cstdint>
#include <string>

namespace mcstruct {

/// Rank-d factorization M ~ left_vectors * diag(singular_values) *
/// right_vectors^T. Singular values are nonincreasing and nonnegative.
/// `converged` reports the residual criterion
/// max_i ||M v_i - sigma_i u_i|| <= 1e-6 * sigma_1.
struct SvdResult {
    Matrix left_vectors;     // n x d
    Vector singular_values;  // d
    Matrix right_vectors;    // n x d
    int iterations_run = 0;
    bool converged = false;
};

/// Randomized subspace iteration: a seeded Gaussian test matrix is
/// orthonormalized, then `power_steps` applications of the Gram operator
/// M M^T (with QR re-orthonormalization after each) refine the subspace,
/// and the projected problem Q^T M is factorized exactly.
///
/// power_steps = 0 keeps the pure random subspace; power_steps = 1 is the
/// single optimization step the MC-SVD sampler uses. Output is a
/// deterministic function of (M, d, power_steps, seed). Column signs are
/// not canonicalized: the sign/rotation freedom is part of the sampling
/// randomness downstream code relies on.
SvdResult randomized_svd(const Matrix& M, int d, int power_steps, std::uint64_t seed);

/// Subspace iteration run until the projector of the iterated subspace
/// moves less than `tol` (relative Frobenius change), or max_steps.
/// Exhausting max_steps is not an error; the result carries
/// converged = false and callers decide.
SvdResult svd_converged(const Matrix& M, int d, double tol, int max_steps,
                        std::uint64_t seed);

/// Debug helper: flips column pairs (u_i, v_i) so the largest-|entry|
/// coordinate of each left vector is positive.
void canonicalize_signs(SvdResult& result);

// Matrix CSV with a `# rows cols` header, row-major.
void write_matrix_csv(const std::string& path, const Matrix& M);
Matrix read_matrix_csv(const std::string& path);

} // namespace mcstruct

#endif
