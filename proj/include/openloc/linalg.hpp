#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace openloc::linalg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct SolverOptions {
    // Diagonal similarity scaling by powers of two before the reduction.
    bool balance = true;
    // A subdiagonal entry is zeroed once it drops below this fraction of
    // the two adjacent diagonal magnitudes.
    double deflation_tol = 1e-14;
    // Total QR sweeps allowed, as a multiple of the dimension.
    int max_sweeps_per_dim = 30;
    // Eigenvalue pairs closer than this (relative to ||M||_F) set the
    // near_degenerate flag on the result.
    double degeneracy_tol = 1e-8;
};

/**
 * Eigenpairs of a dense complex matrix.
 *
 * Column i of `eigenvectors` belongs to `eigenvalues(i)` and has unit
 * 2-norm. Pairs are ordered by ascending real part, then ascending
 * imaginary part. `residuals(i)` is ||M v_i - lambda_i v_i||_2 measured
 * against the input matrix (not the balanced one).
 */
struct Spectrum {
    ComplexVector eigenvalues;
    ComplexMatrix eigenvectors;
    Eigen::VectorXd residuals;
    int iterations = 0;

    // Set when two eigenvalues lie closer than degeneracy_tol * ||M||_F.
    // Eigenvectors are still returned but are ill conditioned there
    // (close to an exceptional point they nearly coincide).
    bool near_degenerate = false;
    double min_separation = 0.0;

    Eigen::Index size() const { return eigenvalues.size(); }
};

// Throws DimensionError for empty or non-square input, DomainError for
// non-finite entries.
void validate(const ComplexMatrix& m);

Spectrum eigendecompose(const ComplexMatrix& m, const SolverOptions& opts = {});

// ||M v - lambda v||_2 / ||v||_2
double residual(const ComplexMatrix& m, Complex eigenvalue, const ComplexVector& eigenvector);

}  // namespace openloc::linalg
