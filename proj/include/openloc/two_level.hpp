#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "openloc/linalg.hpp"

namespace openloc::two_level {

using Complex = std::complex<double>;
using State = Eigen::Vector2cd;

// Two coupled levels with decay: H = [[eps1 - i gamma1, c], [c, eps2 - i gamma2]].
struct TwoLevelParams {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double c = 1.0;

    double delta_eps() const { return eps2 - eps1; }
    double delta_gamma() const { return gamma2 - gamma1; }
    // Throws DomainError on non-finite values or negative decay rates.
    void validate() const;
    linalg::ComplexMatrix matrix() const;
};

enum class Variables {
    // Discriminant in units of c; requires c != 0.
    scaled,
    // Unscaled discriminant (c^2 times the scaled one); c = 0 allowed.
    unscaled,
};

struct TwoLevelResult {
    Complex lambda_plus;
    Complex lambda_minus;
    // (de/c)^2 - (dG/c)^2 + 4 - 2i de dG / c^2 in scaled mode,
    // (de - i dG)^2 + 4 c^2 in unscaled mode.
    Complex discriminant;
    State state_plus;
    State state_minus;
    double f_plus = 0.0;
    double f_minus = 0.0;
};

// Closed-form eigenpairs; the +/- branch uses the principal square root
// of the discriminant (cut along the negative real axis, upper side).
TwoLevelResult eigenpairs_2x2(const TwoLevelParams& p, Variables vars = Variables::scaled);

// (1 - R) / R with R = max(|a1|^2, |a2|^2). The state must be normalized
// within `norm_tol`.
double delocalization_factor(const State& state, double norm_tol = 1e-9);

struct ParamPoint {
    double delta_eps = 0.0;
    double delta_gamma = 0.0;
};

// EPs of the two-level model in the (delta_eps, delta_gamma) plane:
// (0, 2c) and (0, -2c).
std::array<ParamPoint, 2> exceptional_points(double c);

enum class BranchPermutation { identity, swap };

std::string to_string(BranchPermutation p);

struct EncircleOptions {
    // Minimum distance between the loop and either EP.
    double ep_clearance = 1e-6;
    // Branch matching is ambiguous when the two assignments cost the same
    // within this tolerance.
    double ambiguity_tol = 1e-12;
    // Number of times a step may be halved on ambiguity.
    int max_refinements = 20;
};

struct EncircleTrace {
    BranchPermutation permutation = BranchPermutation::identity;
    // tracked[k] holds both branches after step k (k = 0 is the start)
    std::vector<std::array<Complex, 2>> tracked;
    std::vector<ParamPoint> path;
};

/**
 * Carries the two eigenvalues around the circle
 *   (delta_eps, delta_gamma) = centre + radius (cos t, sin t),  t in [0, 2 pi],
 * varying eps2 and gamma2 at fixed eps1, gamma1, c taken from `anchor`,
 * and reports how the branches are permuted after one circuit.
 *
 * Throws DomainError for steps < 16 or radius <= 0, GeometryError if the
 * loop passes within ep_clearance of an EP, and StepRefinementError when
 * continuation stays ambiguous after max_refinements halvings.
 */
EncircleTrace encircle_ep_trace(ParamPoint centre, double radius, int steps, const TwoLevelParams& anchor,
                                const EncircleOptions& opts = {});

BranchPermutation encircle_ep(ParamPoint centre, double radius, int steps, const TwoLevelParams& anchor,
                              const EncircleOptions& opts = {});

struct AxisSpec {
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;

    double at(std::size_t i) const;
};

struct PhaseMap {
    // axes in units of c
    std::vector<double> d_eps_over_c;
    std::vector<double> d_gamma_over_c;
    // row-major: row = delta_gamma index, column = delta_eps index
    Eigen::MatrixXd f_values;
    double f_c = 0.5;

    bool delocalized(std::size_t gamma_index, std::size_t eps_index) const {
        return f_values(static_cast<Eigen::Index>(gamma_index), static_cast<Eigen::Index>(eps_index)) >= f_c;
    }
};

// Default grid: delta_eps/c in [-5, 5], delta_gamma/c in [0, 4], 201 x 201.
AxisSpec default_eps_axis();
AxisSpec default_gamma_axis();
// eps1 = gamma1 = c = 1
TwoLevelParams default_anchor();

// Larger F of the two branches at each node; eps2 and gamma2 vary around
// the anchor's eps1, gamma1, c.
PhaseMap phase_map(const AxisSpec& eps_axis, const AxisSpec& gamma_axis, double f_c, const TwoLevelParams& anchor);

}  // namespace openloc::two_level
