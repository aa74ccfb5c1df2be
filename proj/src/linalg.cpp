#include "mcstruct/linalg.hpp"

#include "mcstruct/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <sstream>

namespace mcstruct {

namespace {

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
    Matrix out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) out(i, j) = rng.normal();
    }
    return out;
}

Matrix thin_q(const Matrix& Y) {
    Eigen::HouseholderQR<Matrix> qr(Y);
    return qr.householderQ() * Matrix::Identity(Y.rows(), Y.cols());
}

// Rayleigh-Ritz on the current subspace: factorize B = Q^T M exactly and
// rotate Q by the small left factor.
SvdResult finish(const Matrix& M, const Matrix& Q, int iterations) {
    const Matrix B = Q.transpose() * M; // d x n
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult result;
    result.left_vectors = Q * svd.matrixU();
    result.singular_values = svd.singularValues();
    result.right_vectors = svd.matrixV();
    result.iterations_run = iterations;

    const double sigma1 = result.singular_values.size() > 0 ? result.singular_values(0) : 0.0;
    double worst = 0.0;
    for (int i = 0; i < result.singular_values.size(); ++i) {
        const double res = (M * result.right_vectors.col(i) -
                            result.singular_values(i) * result.left_vectors.col(i))
                               .norm();
        worst = std::max(worst, res);
    }
    result.converged = worst <= 1e-6 * sigma1 || (sigma1 == 0.0 && worst == 0.0);
    return result;
}

void check_inputs(const Matrix& M, int d) {
    require(M.rows() == M.cols() && M.rows() > 0, "matrix must be square and nonempty");
    require(M.allFinite(), "matrix entries must be finite");
    require(d >= 1 && d <= M.rows(), "rank d must satisfy 1 <= d <= n");
}

} // namespace

SvdResult randomized_svd(const Matrix& M, int d, int power_steps, std::uint64_t seed) {
    check_inputs(M, d);
    require(power_steps >= 0, "power_steps must be nonnegative");
    Rng rng(seed);
    Matrix Q = thin_q(gaussian_matrix(static_cast<int>(M.rows()), d, rng));
    for (int step = 0; step < power_steps; ++step) {
        Q = thin_q(M * (M.transpose() * Q));
    }
    return finish(M, Q, power_steps);
}

SvdResult svd_converged(const Matrix& M, int d, double tol, int max_steps,
                        std::uint64_t seed) {
    check_inputs(M, d);
    require(tol > 0.0, "tol must be positive");
    require(max_steps >= 1, "max_steps must be at least 1");
    Rng rng(seed);
    Matrix Q = thin_q(gaussian_matrix(static_cast<int>(M.rows()), d, rng));

    int steps = 0;
    bool subspace_stable = false;
    while (steps < max_steps) {
        Matrix next = thin_q(M * (M.transpose() * Q));
        ++steps;
        // Projector distance is immune to the per-column sign/rotation
        // freedom inside degenerate blocks.
        const double change =
            (next * next.transpose() - Q * Q.transpose()).norm() / std::sqrt(double(d));
        Q = std::move(next);
        if (change < tol) {
            subspace_stable = true;
            break;
        }
    }
    SvdResult result = finish(M, Q, steps);
    result.converged = result.converged && subspace_stable;
    return result;
}

void canonicalize_signs(SvdResult& result) {
    for (int j = 0; j < result.left_vectors.cols(); ++j) {
        int idx = 0;
        result.left_vectors.col(j).cwiseAbs().maxCoeff(&idx);
        if (result.left_vectors(idx, j) < 0.0) {
            result.left_vectors.col(j) *= -1.0;
            result.right_vectors.col(j) *= -1.0;
        }
    }
}

void write_matrix_csv(const std::string& path, const Matrix& M) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "# " << M.rows() << ' ' << M.cols() << '\n';
    out.precision(17);
    for (int i = 0; i < M.rows(); ++i) {
        for (int j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            out << M(i, j);
        }
        out << '\n';
    }
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.size() < 2 || line[0] != '#') {
        throw std::runtime_error(path + ": missing `# rows cols` header");
    }
    std::istringstream header(line.substr(1));
    int rows = 0, cols = 0;
    if (!(header >> rows >> cols) || rows <= 0 || cols <= 0) {
        throw std::runtime_error(path + ": malformed `# rows cols` header");
    }
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) {
            throw std::runtime_error(path + ": expected " + std::to_string(rows) + " rows");
        }
        std::istringstream ss(line);
        std::string cell;
        for (int j = 0; j < cols; ++j) {
            if (!std::getline(ss, cell, ',')) {
                throw std::runtime_error(path + ": row " + std::to_string(i) + " is short");
            }
            M(i, j) = std::stod(cell);
        }
    }
    return M;
}

} // namespace mcstruct
