#include "openloc/ensemble.hpp"

#include <cmath>
#include <random>

#include "openloc/errors.hpp"
#include "io.hpp"
#include "parallel.hpp"

namespace openloc::ensemble {

namespace {

// Uniform draw strictly inside (lo, hi).
class OpenUniform {
public:
    explicit OpenUniform(std::uint64_t seed) : engine_(seed) {}

    double operator()(double lo, double hi) {
        for (;;) {
            const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
            const double x = lo + (hi - lo) * u;
            if (x > lo && x < hi) return x;
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace

void EnsembleParams::validate() const {
    if (n < 2) throw DomainError("ensemble dimension must be at least 2");
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("coupling bound c must be non-negative");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("opening gamma must be non-negative");
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t node_seed(std::uint64_t master, std::uint64_t c_index, std::uint64_t gamma_index) {
    return mix64(mix64(mix64(master) ^ c_index) ^ gamma_index);
}

Sample sample(const EnsembleParams& p) {
    p.validate();
    const auto n = static_cast<Eigen::Index>(p.n);
    OpenUniform draw(mix64(mix64(p.seed) ^ p.realization));

    // Draw order: all eps_j, then c_jk row by row for j < k, then G'_j.
    Sample s;
    s.eps.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) s.eps(j) = draw(-1.0, 1.0);

    s.matrix = linalg::ComplexMatrix::Zero(n, n);
    if (p.c > 0.0) {
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index k = j + 1; k < n; ++k) {
                const double v = draw(-p.c, p.c);
                s.matrix(j, k) = v;
                s.matrix(k, j) = v;
            }
        }
    }

    s.decay_rates.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double rate = 0.0;
        if (p.gamma > 0.0) {
            do {
                rate = p.gamma * draw(0.0, 1.0);
            } while (!(rate > 0.0 && rate < p.gamma));
        }
        s.decay_rates(j) = rate;
        s.matrix(j, j) = linalg::Complex(s.eps(j), -rate);
    }
    return s;
}

double ipr(const linalg::ComplexVector& state) {
    double sum2 = 0.0;
    double sum4 = 0.0;
    for (Eigen::Index j = 0; j < state.size(); ++j) {
        const double a2 = std::norm(state(j));
        sum2 += a2;
        sum4 += a2 * a2;
    }
    if (sum2 == 0.0) throw DomainError("ipr of the zero vector");
    return sum4 / (sum2 * sum2);
}

AiprResult aipr(const linalg::Spectrum& spectrum, const EnsembleParams& p) {
    const auto n = static_cast<Eigen::Index>(p.n);
    if (spectrum.eigenvectors.rows() != n || spectrum.eigenvectors.cols() != n) {
        throw DimensionError("spectrum does not have " + std::to_string(p.n) + " eigenvectors of length " +
                             std::to_string(p.n));
    }
    AiprResult r;
    r.params = p;
    r.per_state_ipr.reserve(p.n);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        r.per_state_ipr.push_back(ipr(spectrum.eigenvectors.col(i)));
        total += r.per_state_ipr.back();
    }
    r.aipr = total / static_cast<double>(n);
    return r;
}

std::vector<SweepRow> sweep(const SweepGrid& grid, std::size_t n, std::size_t realizations, std::uint64_t seed,
                            unsigned threads) {
    if (grid.c_values.empty() || grid.gamma_values.empty()) throw DomainError("sweep grid is empty");
    if (realizations < 1) throw DomainError("sweep needs at least one realization");
    for (const double c : grid.c_values) EnsembleParams{n, c, 0.0, 0, 0}.validate();
    for (const double g : grid.gamma_values) EnsembleParams{n, 0.0, g, 0, 0}.validate();

    const std::size_t nc = grid.c_values.size();
    const std::size_t ng = grid.gamma_values.size();
    const std::size_t tasks = nc * ng * realizations;
    std::vector<double> values(tasks);

    detail::parallel_for(tasks, threads, [&](std::size_t t) {
        const std::size_t r = t % realizations;
        const std::size_t node = t / realizations;
        const std::size_t i = node / ng;
        const std::size_t j = node % ng;
        const EnsembleParams p{n, grid.c_values[i], grid.gamma_values[j], node_seed(seed, i, j), r};
        values[t] = aipr(linalg::eigendecompose(sample_hamiltonian(p)), p).aipr;
    });

    std::vector<SweepRow> rows;
    rows.reserve(nc * ng);
    for (std::size_t node = 0; node < nc * ng; ++node) {
        SweepRow row;
        row.c = grid.c_values[node / ng];
        row.gamma = grid.gamma_values[node % ng];
        row.n = n;
        row.realizations = realizations;
        double mean = 0.0;
        for (std::size_t r = 0; r < realizations; ++r) mean += values[node * realizations + r];
        mean /= static_cast<double>(realizations);
        double var = 0.0;
        for (std::size_t r = 0; r < realizations; ++r) {
            const double d = values[node * realizations + r] - mean;
            var += d * d;
        }
        row.aipr_mean = mean;
        row.aipr_stddev = realizations > 1 ? std::sqrt(var / static_cast<double>(realizations - 1)) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::string format_matrix(const linalg::ComplexMatrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out += ',';
            const linalg::Complex z = m(i, j);
            out += detail::format_double(z.real());
            if (std::signbit(z.imag())) {
                out += '-';
                out += detail::format_double(-z.imag());
            } else {
                out += '+';
                out += detail::format_double(z.imag());
            }
            out += 'j';
        }
        out += '\n';
    }
    return out;
}

}  // namespace openloc::ensemble
