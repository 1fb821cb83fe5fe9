#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "openloc/linalg.hpp"

namespace openloc::ensemble {

/**
 * One member of the random non-Hermitian ensemble
 *
 *   H = H0 - i gamma diag(G'_1 .. G'_N),
 *
 * with eps_j ~ U(-1, 1) on the diagonal of H0, real symmetric couplings
 * c_jk ~ U(-c, c) off the diagonal and G'_j ~ U(0, 1), all intervals open.
 * The matrix is a pure function of (seed, realization, n, c, gamma).
 */
struct EnsembleParams {
    std::size_t n = 300;
    double c = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t realization = 0;

    void validate() const;
};

// Mean spacing of eps_j ~ U(-1, 1) for n levels.
inline double mean_level_spacing(std::size_t n) { return 2.0 / static_cast<double>(n); }

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x);

// Seed of sweep node (c_index, gamma_index) derived from the master seed.
std::uint64_t node_seed(std::uint64_t master, std::uint64_t c_index, std::uint64_t gamma_index);

struct Sample {
    linalg::ComplexMatrix matrix;
    Eigen::VectorXd eps;
    // Gamma_j = gamma * G'_j
    Eigen::VectorXd decay_rates;
};

Sample sample(const EnsembleParams& p);

inline linalg::ComplexMatrix sample_hamiltonian(const EnsembleParams& p) { return sample(p).matrix; }

// sum |a_j|^4 / (sum |a_j|^2)^2
double ipr(const linalg::ComplexVector& state);

struct AiprResult {
    double aipr = 0.0;
    std::vector<double> per_state_ipr;
    EnsembleParams params;
};

AiprResult aipr(const linalg::Spectrum& spectrum, const EnsembleParams& p);

struct SweepGrid {
    std::vector<double> c_values;
    std::vector<double> gamma_values;
};

struct SweepRow {
    double c = 0.0;
    double gamma = 0.0;
    std::size_t n = 0;
    std::size_t realizations = 0;
    double aipr_mean = 0.0;
    // sample standard deviation over realizations (0 for one realization)
    double aipr_stddev = 0.0;
};

/**
 * Mean AIPR at every (c, gamma) node, rows ordered c-major.
 *
 * Node (i, j) uses node_seed(seed, i, j) and realizations 0..R-1. Work is
 * spread over `threads` workers (0 = hardware concurrency); the result
 * does not depend on the thread count.
 */
std::vector<SweepRow> sweep(const SweepGrid& grid, std::size_t n, std::size_t realizations, std::uint64_t seed,
                            unsigned threads = 0);

// Debug dump: one row per line, entries `re+imj` separated by commas.
std::string format_matrix(const linalg::ComplexMatrix& m);

}  // namespace openloc::ensemble
