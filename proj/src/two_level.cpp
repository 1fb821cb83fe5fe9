#include "openloc/two_level.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "openloc/errors.hpp"

namespace openloc::two_level {

namespace {

using namespace std::complex_literals;

// Principal square root with the cut on the negative real axis approached
// from above: a signed zero imaginary part must not flip the branch.
Complex principal_sqrt(Complex z) {
    if (z.imag() == 0.0) z = Complex(z.real(), 0.0);
    return std::sqrt(z);
}

// Both roots x of x^2 + u x - 1 = 0 written as (-u +- w) / 2 with w^2 = u^2 + 4.
// The roots multiply to -1, so the smaller one is taken from the larger
// to avoid cancellation.
std::array<Complex, 2> component_ratios(Complex u, Complex w) {
    const Complex plus = 0.5 * (-u + w);
    const Complex minus = 0.5 * (-u - w);
    if (std::abs(plus) >= std::abs(minus)) return {plus, -1.0 / plus};
    return {-1.0 / minus, minus};
}

State normalized_state(Complex first) {
    State s(first, Complex(1.0));
    return s / s.norm();
}

void validate_axis(const AxisSpec& axis, const char* name) {
    if (axis.count == 0) throw DomainError(std::string("empty grid axis: ") + name);
    if (!std::isfinite(axis.min) || !std::isfinite(axis.max)) {
        throw DomainError(std::string("non-finite grid axis: ") + name);
    }
    if (axis.count > 1 && !(axis.max > axis.min)) {
        throw DomainError(std::string("grid axis is not increasing: ") + name);
    }
}

std::array<Complex, 2> branch_eigenvalues(const TwoLevelParams& anchor, ParamPoint at) {
    TwoLevelParams p = anchor;
    p.eps2 = anchor.eps1 + at.delta_eps;
    p.gamma2 = anchor.gamma1 + at.delta_gamma;
    const TwoLevelResult r = eigenpairs_2x2(p);
    return {r.lambda_plus, r.lambda_minus};
}

}  // namespace

void TwoLevelParams::validate() const {
    if (!std::isfinite(eps1) || !std::isfinite(eps2) || !std::isfinite(gamma1) || !std::isfinite(gamma2) ||
        !std::isfinite(c)) {
        throw DomainError("two-level parameters must be finite");
    }
    if (gamma1 < 0.0 || gamma2 < 0.0) throw DomainError("decay rates must be non-negative");
}

linalg::ComplexMatrix TwoLevelParams::matrix() const {
    linalg::ComplexMatrix m(2, 2);
    m << Complex(eps1, -gamma1), c, c, Complex(eps2, -gamma2);
    return m;
}

TwoLevelResult eigenpairs_2x2(const TwoLevelParams& p, Variables vars) {
    p.validate();
    const Complex trace(p.eps1 + p.eps2, -(p.gamma1 + p.gamma2));
    const double de = p.delta_eps();
    const double dg = p.delta_gamma();
    TwoLevelResult r;

    if (vars == Variables::scaled) {
        if (p.c == 0.0) throw DomainError("scaled variables need a nonzero coupling c");
        const double x = de / p.c;
        const double y = dg / p.c;
        r.discriminant = Complex(x * x - y * y + 4.0, -2.0 * x * y);
        const Complex w = principal_sqrt(r.discriminant);
        r.lambda_plus = 0.5 * (trace + p.c * w);
        r.lambda_minus = 0.5 * (trace - p.c * w);
        const auto ratios = component_ratios(Complex(x, -y), w);
        r.state_plus = normalized_state(ratios[0]);
        r.state_minus = normalized_state(ratios[1]);
    } else {
        const Complex d(de, -dg);
        r.discriminant = d * d + 4.0 * p.c * p.c;
        const Complex w = principal_sqrt(r.discriminant);
        r.lambda_plus = 0.5 * (trace + w);
        r.lambda_minus = 0.5 * (trace - w);
        if (p.c != 0.0) {
            const auto ratios = component_ratios(d / p.c, w / p.c);
            r.state_plus = normalized_state(ratios[0]);
            r.state_minus = normalized_state(ratios[1]);
        } else {
            const Complex h11(p.eps1, -p.gamma1);
            const Complex h22(p.eps2, -p.gamma2);
            const State e1(1.0, 0.0);
            const State e2(0.0, 1.0);
            const bool plus_is_second = std::abs(r.lambda_plus - h22) <= std::abs(r.lambda_plus - h11);
            r.state_plus = plus_is_second ? e2 : e1;
            r.state_minus = plus_is_second ? e1 : e2;
        }
    }
    r.f_plus = delocalization_factor(r.state_plus);
    r.f_minus = delocalization_factor(r.state_minus);
    return r;
}

double delocalization_factor(const State& state, double norm_tol) {
    if (!state.allFinite()) throw DomainError("state has non-finite components");
    if (std::abs(state.norm() - 1.0) > norm_tol) throw DomainError("state is not normalized");
    const double r = std::max(std::norm(state(0)), std::norm(state(1)));
    return std::clamp((1.0 - r) / r, 0.0, 1.0);
}

std::array<ParamPoint, 2> exceptional_points(double c) {
    if (c == 0.0 || !std::isfinite(c)) throw DomainError("exceptional points need a nonzero finite coupling");
    return {ParamPoint{0.0, 2.0 * c}, ParamPoint{0.0, -2.0 * c}};
}

std::string to_string(BranchPermutation p) { return p == BranchPermutation::swap ? "swap" : "identity"; }

EncircleTrace encircle_ep_trace(ParamPoint centre, double radius, int steps, const TwoLevelParams& anchor,
                                const EncircleOptions& opts) {
    if (steps < 16) throw DomainError("encircling needs at least 16 steps");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("loop radius must be positive");
    for (const ParamPoint& ep : exceptional_points(anchor.c)) {
        const double dist = std::hypot(ep.delta_eps - centre.delta_eps, ep.delta_gamma - centre.delta_gamma);
        if (std::abs(dist - radius) <= opts.ep_clearance) {
            throw GeometryError("loop passes through the exceptional point (0, " + std::to_string(ep.delta_gamma) +
                                ")");
        }
    }

    auto point_at = [&](double t) {
        return ParamPoint{centre.delta_eps + radius * std::cos(t), centre.delta_gamma + radius * std::sin(t)};
    };

    EncircleTrace trace;
    trace.path.push_back(point_at(0.0));
    std::array<Complex, 2> current = branch_eigenvalues(anchor, trace.path.back());
    const std::array<Complex, 2> start = current;
    trace.tracked.push_back(current);

    const double two_pi = 2.0 * std::numbers::pi;
    double t = 0.0;
    for (int k = 1; k <= steps; ++k) {
        const double target = two_pi * k / steps;
        double h = target - t;
        int halvings = 0;
        while (t < target) {
            const double t_next = std::min(t + h, target);
            const std::array<Complex, 2> cand = branch_eigenvalues(anchor, point_at(t_next));
            const double keep = std::abs(current[0] - cand[0]) + std::abs(current[1] - cand[1]);
            const double cross = std::abs(current[0] - cand[1]) + std::abs(current[1] - cand[0]);
            if (std::abs(keep - cross) <= opts.ambiguity_tol) {
                if (halvings >= opts.max_refinements) {
                    throw StepRefinementError("eigenvalue continuation is ambiguous near t = " + std::to_string(t) +
                                              "; use more steps");
                }
                h *= 0.5;
                ++halvings;
                continue;
            }
            current = keep <= cross ? cand : std::array<Complex, 2>{cand[1], cand[0]};
            t = t_next;
        }
        trace.path.push_back(point_at(target));
        trace.tracked.push_back(current);
    }

    const bool same = std::abs(current[0] - start[0]) <= std::abs(current[0] - start[1]);
    trace.permutation = same ? BranchPermutation::identity : BranchPermutation::swap;
    return trace;
}

BranchPermutation encircle_ep(ParamPoint centre, double radius, int steps, const TwoLevelParams& anchor,
                              const EncircleOptions& opts) {
    return encircle_ep_trace(centre, radius, steps, anchor, opts).permutation;
}

double AxisSpec::at(std::size_t i) const {
    if (count <= 1) return min;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

AxisSpec default_eps_axis() { return {-5.0, 5.0, 201}; }
AxisSpec default_gamma_axis() { return {0.0, 4.0, 201}; }
TwoLevelParams default_anchor() { return {1.0, 1.0, 1.0, 1.0, 1.0}; }

PhaseMap phase_map(const AxisSpec& eps_axis, const AxisSpec& gamma_axis, double f_c, const TwoLevelParams& anchor) {
    validate_axis(eps_axis, "delta_eps");
    validate_axis(gamma_axis, "delta_gamma");
    if (!(f_c > 0.0 && f_c < 1.0)) throw DomainError("F_c must lie in (0, 1)");
    anchor.validate();
    if (anchor.c == 0.0) throw DomainError("phase map needs a nonzero coupling");

    PhaseMap map;
    map.f_c = f_c;
    for (std::size_t i = 0; i < eps_axis.count; ++i) map.d_eps_over_c.push_back(eps_axis.at(i));
    for (std::size_t j = 0; j < gamma_axis.count; ++j) map.d_gamma_over_c.push_back(gamma_axis.at(j));
    map.f_values.resize(static_cast<Eigen::Index>(gamma_axis.count), static_cast<Eigen::Index>(eps_axis.count));

    for (std::size_t j = 0; j < gamma_axis.count; ++j) {
        for (std::size_t i = 0; i < eps_axis.count; ++i) {
            TwoLevelParams p = anchor;
            p.eps2 = anchor.eps1 + map.d_eps_over_c[i] * anchor.c;
            p.gamma2 = anchor.gamma1 + map.d_gamma_over_c[j] * anchor.c;
            const TwoLevelResult r = eigenpairs_2x2(p);
            map.f_values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::max(r.f_plus, r.f_minus);
        }
    }
    return map;
}

}  // namespace openloc::two_level
