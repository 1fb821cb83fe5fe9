#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "openloc/errors.hpp"
#include "openloc/linalg.hpp"
#include "test_support.hpp"

using namespace openloc;
using namespace openloc::linalg;
using namespace std::complex_literals;

namespace {

void check_invariants(const ComplexMatrix& m, const Spectrum& s) {
    const double fro = m.norm();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        CHECK(s.residuals(i) <= 1e-10 * fro);
        CHECK(std::abs(s.eigenvectors.col(i).norm() - 1.0) <= 1e-12);
    }
    CHECK(std::abs(s.eigenvalues.sum() - m.trace()) <= 1e-9 * fro);
}

}  // namespace

TEST_CASE("diagonal matrix gives its entries and the standard basis") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0 + 2.0i;
    m(1, 1) = 3.0 - 1.0i;
    const Spectrum s = eigendecompose(m);
    CHECK(s.eigenvalues(0) == 1.0 + 2.0i);
    CHECK(s.eigenvalues(1) == 3.0 - 1.0i);
    CHECK(std::abs(s.eigenvectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(s.eigenvectors(1, 0)) == doctest::Approx(0.0));
    CHECK(std::abs(s.eigenvectors(1, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(s.eigenvectors(0, 1)) == doctest::Approx(0.0));
    CHECK_FALSE(s.near_degenerate);
}

TEST_CASE("two-level exceptional point is a double eigenvalue -i") {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, -2.0i;
    const Spectrum s = eigendecompose(m);
    CHECK(std::abs(s.eigenvalues(0) - (-1.0i)) <= 1e-8);
    CHECK(std::abs(s.eigenvalues(1) - (-1.0i)) <= 1e-8);
    CHECK(s.near_degenerate);
    // the eigenvectors coalesce as well
    const double overlap = std::abs(s.eigenvectors.col(0).dot(s.eigenvectors.col(1)));
    CHECK(overlap >= 1.0 - 1e-4);
    check_invariants(m, s);
}

TEST_CASE("random 5x5 matrix with fixed seed") {
    std::mt19937_64 rng(12345);
    const ComplexMatrix m = testing::random_complex_matrix(5, rng);
    const Spectrum s = eigendecompose(m);
    REQUIRE(s.size() == 5);
    for (Eigen::Index i = 0; i < 5; ++i) {
        // recompute independently of the stored residuals
        const ComplexVector r = m * s.eigenvectors.col(i) - s.eigenvalues(i) * s.eigenvectors.col(i);
        CHECK(r.norm() <= 1e-10 * m.norm());
    }
}

TEST_CASE("eigenvalues are sorted by real part then imaginary part") {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = 2.0 + 1.0i;
    m(1, 1) = -1.0 + 5.0i;
    m(2, 2) = 2.0 - 3.0i;
    m(3, 3) = 0.5;
    m(0, 3) = 0.25;
    const Spectrum s = eigendecompose(m);
    CHECK(s.eigenvalues(0) == -1.0 + 5.0i);
    CHECK(s.eigenvalues(1) == 0.5 + 0.0i);
    CHECK(s.eigenvalues(2) == 2.0 - 3.0i);
    CHECK(s.eigenvalues(3) == 2.0 + 1.0i);
}

TEST_CASE("1x1 matrix") {
    ComplexMatrix m(1, 1);
    m(0, 0) = 3.0 - 4.0i;
    const Spectrum s = eigendecompose(m);
    CHECK(s.eigenvalues(0) == 3.0 - 4.0i);
    CHECK(std::abs(s.eigenvectors(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("invalid input") {
    CHECK_THROWS_AS(eigendecompose(ComplexMatrix(2, 3)), DimensionError);
    CHECK_THROWS_AS(eigendecompose(ComplexMatrix(0, 0)), DimensionError);
    ComplexMatrix m = ComplexMatrix::Identity(3, 3);
    m(1, 2) = std::nan("");
    CHECK_THROWS_AS(eigendecompose(m), DomainError);
}

TEST_CASE("sweep limit raises a convergence error") {
    std::mt19937_64 rng(7);
    const ComplexMatrix m = testing::random_complex_matrix(6, rng);
    SolverOptions opts;
    opts.max_sweeps_per_dim = 0;
    CHECK_THROWS_AS(eigendecompose(m, opts), ConvergenceError);
    try {
        eigendecompose(m, opts);
    } catch (const ConvergenceError& e) {
        CHECK(std::string(e.what()).find("unconverged block") != std::string::npos);
    }
}

TEST_CASE("residual") {
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d.diagonal() << 1.0, 2.0i, -3.0;
    ComplexVector e = ComplexVector::Unit(3, 1);
    CHECK(residual(d, 2.0i, e) == 0.0);

    const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
    ComplexVector v = ComplexVector::Ones(4);
    CHECK(residual(id, 1.0 + 1e-3, v) == doctest::Approx(1e-3).epsilon(1e-12));

    CHECK_THROWS_AS(residual(id, 1.0, ComplexVector::Zero(4)), DomainError);
    CHECK_THROWS_AS(residual(id, 1.0, ComplexVector::Ones(3)), DimensionError);
}

TEST_CASE("self-consistent residuals on a random 50x50 matrix") {
    std::mt19937_64 rng(2024);
    const ComplexMatrix m = testing::random_complex_matrix(50, rng);
    const Spectrum s = eigendecompose(m);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        CHECK(residual(m, s.eigenvalues(i), s.eigenvectors.col(i)) <= 1e-10 * m.norm());
    }
}

TEST_CASE("residual bound and trace identity over random matrices") {
    std::mt19937_64 rng(99);
    for (const Eigen::Index n : {2, 5, 20, 100}) {
        const int count = 250;
        int bad = 0;
        for (int trial = 0; trial < count; ++trial) {
            const ComplexMatrix m = testing::random_complex_matrix(n, rng);
            const Spectrum s = eigendecompose(m);
            const double fro = m.norm();
            const bool ok = s.residuals.maxCoeff() <= 1e-10 * fro &&
                            std::abs(s.eigenvalues.sum() - m.trace()) <= 1e-9 * fro;
            if (!ok) ++bad;
        }
        INFO("n = " << n);
        CHECK(bad == 0);
    }
}

TEST_CASE("badly scaled matrix benefits from balancing") {
    ComplexMatrix m(3, 3);
    m << 1.0, 1e6, 0.0,
         1e-6, 2.0, 1e6,
         0.0, 1e-6, 3.0i;
    const Spectrum s = eigendecompose(m);
    check_invariants(m, s);
}

TEST_CASE("identical input gives bit-identical output") {
    std::mt19937_64 rng(31337);
    const ComplexMatrix m = testing::random_complex_matrix(40, rng);
    const Spectrum a = eigendecompose(m);
    const Spectrum b = eigendecompose(m);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenvectors == b.eigenvectors);
    CHECK(a.residuals == b.residuals);
    CHECK(a.iterations == b.iterations);
}
