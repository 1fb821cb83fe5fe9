#include "openloc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "openloc/errors.hpp"

namespace openloc::linalg {

namespace {

using Index = Eigen::Index;

double abs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Scales rows/columns by powers of two so that row and column norms are
// comparable. Returns the diagonal D with B = D^-1 A D (applied in place).
Eigen::VectorXd balance(ComplexMatrix& a) {
    const Index n = a.rows();
    constexpr double radix = 2.0;
    constexpr double radix2 = radix * radix;
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);

    bool converged = false;
    while (!converged) {
        converged = true;
        for (Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += abs1(a(j, i));
                r += abs1(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;

            const double s = c + r;
            double f = 1.0;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix2;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix2;
            }
            if ((c + r) / f < 0.95 * s) {
                converged = false;
                scale(i) *= f;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
    return scale;
}

// Householder reduction to upper Hessenberg form, H = Q^H A Q.
// On return `a` holds H and `q` the accumulated unitary factor.
void hessenberg(ComplexMatrix& a, ComplexMatrix& q) {
    const Index n = a.rows();
    q.setIdentity(n, n);
    ComplexVector v;
    for (Index k = 0; k + 2 < n; ++k) {
        const Index m = n - k - 1;
        v = a.col(k).tail(m);
        const double xnorm = v.norm();
        if (xnorm == 0.0) continue;

        const Complex x0 = v(0);
        const Complex phase = (x0 == Complex(0.0)) ? Complex(1.0) : x0 / std::abs(x0);
        const Complex alpha = -phase * xnorm;
        v(0) -= alpha;
        const double vnorm = v.norm();
        if (vnorm == 0.0) continue;
        v /= vnorm;

        // A <- P A P with P = I - 2 v v^H acting on rows/cols k+1..n-1.
        auto rows = a.bottomRows(m);
        const Eigen::RowVectorXcd w = v.adjoint() * rows;
        rows.noalias() -= 2.0 * v * w;
        auto cols = a.rightCols(m);
        const ComplexVector u = cols * v;
        cols.noalias() -= 2.0 * u * v.adjoint();
        auto qcols = q.rightCols(m);
        const ComplexVector uq = qcols * v;
        qcols.noalias() -= 2.0 * uq * v.adjoint();

        a.col(k).tail(m).setZero();
        a(k + 1, k) = alpha;
    }
}

// Rotation G = [c s; -conj(s) c] with G [a; b] = [r; 0].
struct Givens {
    double c = 1.0;
    Complex s = 0.0;
};

Givens make_givens(Complex a, Complex b) {
    const double abs_a = std::abs(a);
    const double abs_b = std::abs(b);
    if (abs_b == 0.0) return {1.0, 0.0};
    if (abs_a == 0.0) return {0.0, std::conj(b) / abs_b};
    const double rho = std::hypot(abs_a, abs_b);
    return {abs_a / rho, (a / abs_a) * std::conj(b) / rho};
}

// Plain complex product without the C99 Annex G inf/nan recovery, which
// dominates the cost of the rotation loops.
inline Complex cmul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// rows p, q  <-  G * rows p, q   over columns [c0, n)
void rotate_rows(ComplexMatrix& h, const Givens& g, Index p, Index q, Index c0) {
    const Complex s = g.s;
    const Complex sc = -std::conj(g.s);
    for (Index j = c0; j < h.cols(); ++j) {
        const Complex x = h(p, j);
        const Complex y = h(q, j);
        h(p, j) = g.c * x + cmul(s, y);
        h(q, j) = cmul(sc, x) + g.c * y;
    }
}

// cols p, q  <-  cols p, q * G^H   over rows [0, r1]
void rotate_cols(ComplexMatrix& h, const Givens& g, Index p, Index q, Index r1) {
    const Complex sc = std::conj(g.s);
    const Complex s = -g.s;
    Complex* cp = h.col(p).data();
    Complex* cq = h.col(q).data();
    for (Index i = 0; i <= r1; ++i) {
        const Complex x = cp[i];
        const Complex y = cq[i];
        cp[i] = g.c * x + cmul(sc, y);
        cq[i] = cmul(s, x) + g.c * y;
    }
}

// Eigenvalue of the trailing 2x2 block [a b; c d] closest to d.
Complex wilkinson_shift(Complex a, Complex b, Complex c, Complex d) {
    const Complex p = 0.5 * (a - d);
    const Complex bc = b * c;
    Complex disc = std::sqrt(p * p + bc);
    if (std::abs(p - disc) > std::abs(p + disc)) disc = -disc;
    const Complex denom = p + disc;
    if (denom == Complex(0.0)) return d;
    return d - bc / denom;
}

// Reduces the Hessenberg matrix `h` to upper triangular Schur form in
// place, accumulating the rotations into `z`. Returns the sweep count.
int schur_qr(ComplexMatrix& h, ComplexMatrix& z, const SolverOptions& opts) {
    const Index n = h.rows();
    const long max_sweeps = static_cast<long>(opts.max_sweeps_per_dim) * n;
    const double hnorm = h.norm();
    const double abs_floor = std::numeric_limits<double>::min() + opts.deflation_tol * hnorm * std::numeric_limits<double>::epsilon();

    long sweeps = 0;
    int since_deflation = 0;
    Index iu = n - 1;
    while (iu > 0) {
        Index il = iu;
        while (il > 0) {
            const double sub = std::abs(h(il, il - 1));
            double diag = std::abs(h(il - 1, il - 1)) + std::abs(h(il, il));
            if (diag == 0.0) diag = hnorm;
            if (sub <= opts.deflation_tol * diag || sub <= abs_floor) {
                h(il, il - 1) = 0.0;
                break;
            }
            --il;
        }
        if (il == iu) {
            --iu;
            since_deflation = 0;
            continue;
        }

        if (sweeps >= max_sweeps) {
            throw ConvergenceError("complex QR did not converge within " + std::to_string(max_sweeps) +
                                   " sweeps; unconverged block rows " + std::to_string(il) + ".." +
                                   std::to_string(iu));
        }
        ++sweeps;
        ++since_deflation;

        Complex shift;
        if (since_deflation % 10 == 0) {
            // exceptional shift to break cycles
            shift = h(iu, iu) + Complex(std::abs(h(iu, iu - 1).real()) + std::abs(h(iu - 1, std::max<Index>(iu - 2, 0)).real()), 0.0);
        } else {
            shift = wilkinson_shift(h(iu - 1, iu - 1), h(iu - 1, iu), h(iu, iu - 1), h(iu, iu));
        }

        Givens g = make_givens(h(il, il) - shift, h(il + 1, il));
        rotate_rows(h, g, il, il + 1, il);
        rotate_cols(h, g, il, il + 1, std::min(il + 2, iu));
        rotate_cols(z, g, il, il + 1, n - 1);

        for (Index k = il + 1; k < iu; ++k) {
            g = make_givens(h(k, k - 1), h(k + 1, k - 1));
            rotate_rows(h, g, k, k + 1, k - 1);
            h(k + 1, k - 1) = 0.0;
            rotate_cols(h, g, k, k + 1, std::min(k + 2, iu));
            rotate_cols(z, g, k, k + 1, n - 1);
        }
    }
    return static_cast<int>(sweeps);
}

// Eigenvectors of an upper triangular matrix by back-substitution.
// Column k solves (T - T_kk) y = 0 with y_k = 1 and y_j = 0 for j > k.
ComplexMatrix triangular_eigenvectors(const ComplexMatrix& t) {
    const Index n = t.rows();
    const double eps = std::numeric_limits<double>::epsilon();
    const double smallnum = std::numeric_limits<double>::min() * (static_cast<double>(n) / eps);
    const double tnorm = t.norm();
    ComplexMatrix y = ComplexMatrix::Zero(n, n);

    for (Index k = n - 1; k >= 0; --k) {
        const Complex lambda = t(k, k);
        const double smin = std::max(eps * std::max(std::abs(lambda), tnorm), smallnum);
        y(k, k) = 1.0;
        for (Index i = k - 1; i >= 0; --i) {
            Complex sum = 0.0;
            for (Index j = i + 1; j <= k; ++j) sum += cmul(t(i, j), y(j, k));
            Complex denom = t(i, i) - lambda;
            if (std::abs(denom) < smin) denom = smin;
            y(i, k) = -sum / denom;
            const double mag = std::abs(y(i, k));
            if (mag > 1e100) y.col(k).segment(i, k - i + 1) /= mag;
        }
    }
    return y;
}

}  // namespace

void validate(const ComplexMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) throw DimensionError("matrix is empty");
    if (m.rows() != m.cols()) {
        throw DimensionError("matrix is not square: " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) throw DomainError("matrix has non-finite entries");
}

Spectrum eigendecompose(const ComplexMatrix& m, const SolverOptions& opts) {
    validate(m);
    const Index n = m.rows();

    ComplexMatrix h = m;
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
    if (opts.balance) scale = balance(h);

    ComplexMatrix z;
    hessenberg(h, z);
    Spectrum out;
    out.iterations = schur_qr(h, z, opts);

    ComplexMatrix vectors = z * triangular_eigenvectors(h);
    for (Index k = 0; k < n; ++k) {
        auto col = vectors.col(k);
        col = scale.asDiagonal() * col;
        col /= col.norm();
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const Complex la = h(a, a);
        const Complex lb = h(b, b);
        if (la.real() != lb.real()) return la.real() < lb.real();
        return la.imag() < lb.imag();
    });

    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    out.residuals.resize(n);
    for (Index k = 0; k < n; ++k) {
        const Index src = order[static_cast<std::size_t>(k)];
        out.eigenvalues(k) = h(src, src);
        out.eigenvectors.col(k) = vectors.col(src);
    }
    for (Index k = 0; k < n; ++k) {
        out.residuals(k) = (m * out.eigenvectors.col(k) - out.eigenvalues(k) * out.eigenvectors.col(k)).norm();
    }

    double min_sep = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            min_sep = std::min(min_sep, std::abs(out.eigenvalues(i) - out.eigenvalues(j)));
        }
    }
    out.min_separation = min_sep;
    out.near_degenerate = n > 1 && min_sep < opts.degeneracy_tol * m.norm();
    return out;
}

double residual(const ComplexMatrix& m, Complex eigenvalue, const ComplexVector& eigenvector) {
    if (m.rows() != m.cols() || m.cols() != eigenvector.size()) {
        throw DimensionError("residual: matrix and vector dimensions disagree");
    }
    const double vnorm = eigenvector.norm();
    if (vnorm == 0.0) throw DomainError("residual: zero eigenvector");
    return (m * eigenvector - eigenvalue * eigenvector).norm() / vnorm;
}

}  // namespace openloc::linalg
