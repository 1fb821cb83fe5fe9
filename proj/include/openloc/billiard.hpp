#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace openloc::billiard {

using Vec2 = Eigen::Vector2d;

/**
 * Bunimovich stadium: straight walls y = +-R for |x| <= a joined by two
 * semicircular caps of radius R centred at (+-a, 0).
 *
 * Boundary arclength s starts at the rightmost point (a + R, 0) and
 * increases counterclockwise.
 */
struct StadiumGeometry {
    double radius = 1.0;
    double half_length = 1.0;

    double perimeter() const;
    // Throws DomainError unless both dimensions are positive and finite.
    void validate() const;
    // True when p lies in the closed domain, up to `tol`.
    bool contains(const Vec2& p, double tol = 1e-12) const;
};

struct BoundaryPoint {
    Vec2 position;
    Vec2 inward_normal;
    // unit tangent dX/ds (counterclockwise)
    Vec2 tangent;
    // d(tangent)/ds = curvature * inward_normal
    double curvature = 0.0;
};

// s outside [0, perimeter) is reduced modulo the perimeter.
BoundaryPoint boundary_point(const StadiumGeometry& g, double s);

// Arclength of a point on the right cap at polar angle `angle` about (a, 0).
double right_cap_arclength(const StadiumGeometry& g, double angle);
// Arclength of a point on the left cap at polar angle `angle` about (-a, 0).
double left_cap_arclength(const StadiumGeometry& g, double angle);
double top_wall_arclength(const StadiumGeometry& g, double x);
double bottom_wall_arclength(const StadiumGeometry& g, double x);

struct Bounce {
    double s = 0.0;
    Vec2 position;
};

struct PeriodicOrbit {
    std::string name;
    std::vector<Bounce> bounces;
    double length = 0.0;
    double reflection_residual = 0.0;
    double dk_star = 0.0;
    int iterations = 0;
};

struct OrbitFamilyStats {
    double mean_dk = 0.0;
    double dk_star = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
};

struct RefineOptions {
    double gradient_tol = 1e-12;
    int max_iterations = 200;
    double collapse_tol = 1e-8;
    double reflection_tol = 1e-9;
    double tangency_tol = 1e-10;
};

// Closed polygon length, including the segment from the last point back
// to the first. Throws DomainError for fewer than two points.
double orbit_length(std::span<const Vec2> points);

// Largest deviation from specular reflection over all bounces of the
// closed polygon, measured as || e_out - reflect(e_in) ||.
double reflection_residual(const StadiumGeometry& g, std::span<const double> arclengths);

/**
 * Finds the periodic orbit near `initial` as a critical point of the
 * total length over the bounce arclengths (damped Newton).
 *
 * Throws ConvergenceError if the gradient does not reach
 * `gradient_tol` within `max_iterations`, and GeometryError when bounce
 * points collapse onto each other, a chord grazes the boundary or leaves
 * the domain, or the converged polygon violates the reflection law.
 */
PeriodicOrbit refine_orbit(std::span<const double> initial, const StadiumGeometry& g,
                           const RefineOptions& opts = {});

// Evaluates a known orbit as given, without refinement. Validity checks
// are the same as for refine_orbit.
PeriodicOrbit exact_orbit(std::span<const double> arclengths, const StadiumGeometry& g,
                          const RefineOptions& opts = {});

struct OrbitSeed {
    std::string name;
    std::string label;
    std::vector<double> arclengths;
    // Marginal orbits (bouncing ball) are taken as given.
    bool exact = false;
};

// Initial bounce sets for the short orbits of the stadium: R, A, D, T,
// HBB, F, B, C.
std::vector<OrbitSeed> builtin_orbits(const StadiumGeometry& g);

// Runs refine_orbit (or exact_orbit) on a seed and attaches its name.
PeriodicOrbit resolve_seed(const OrbitSeed& seed, const StadiumGeometry& g, const RefineOptions& opts = {});

// Mode spacing predicted by path-length quantization, 4 pi / l.
double dk_star(double length);

double equidistance_alpha(double mean_dk, double dk_star);

// Statistics of successive differences of sorted Re(k) values.
OrbitFamilyStats equidistance_stats(std::span<const double> k_reals, double dk_star);

}  // namespace openloc::billiard
