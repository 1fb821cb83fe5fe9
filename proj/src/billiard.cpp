#include "openloc/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "openloc/errors.hpp"

namespace openloc::billiard {

namespace {

using std::numbers::pi;

double wrap(double s, double perimeter) {
    double r = std::fmod(s, perimeter);
    if (r < 0.0) r += perimeter;
    // fmod can return exactly `perimeter` after the correction above
    if (r >= perimeter) r = 0.0;
    return r;
}

double cyclic_distance(double a, double b, double perimeter) {
    const double d = std::abs(wrap(a, perimeter) - wrap(b, perimeter));
    return std::min(d, perimeter - d);
}

struct LengthModel {
    double length = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

// Total length of the closed polygon through the boundary points at
// `s`, with its gradient and Hessian with respect to the arclengths.
LengthModel length_model(const StadiumGeometry& g, const Eigen::VectorXd& s, double collapse_tol) {
    const Eigen::Index n = s.size();
    std::vector<BoundaryPoint> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) pts.push_back(boundary_point(g, s(i)));

    LengthModel m;
    m.gradient = Eigen::VectorXd::Zero(n);
    m.hessian = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index j = (i + 1) % n;
        const BoundaryPoint& p = pts[static_cast<std::size_t>(i)];
        const BoundaryPoint& q = pts[static_cast<std::size_t>(j)];
        const Vec2 d = q.position - p.position;
        const double len = d.norm();
        if (len < collapse_tol) {
            throw GeometryError("degenerate orbit: bounce points " + std::to_string(i) + " and " +
                                std::to_string(j) + " collapse");
        }
        const Vec2 e = d / len;
        const Eigen::Matrix2d proj = Eigen::Matrix2d::Identity() - e * e.transpose();

        m.length += len;
        m.gradient(i) -= p.tangent.dot(e);
        m.gradient(j) += q.tangent.dot(e);
        m.hessian(i, i) += p.tangent.dot(proj * p.tangent) / len - p.curvature * p.inward_normal.dot(e);
        m.hessian(j, j) += q.tangent.dot(proj * q.tangent) / len + q.curvature * q.inward_normal.dot(e);
        const double off = -p.tangent.dot(proj * q.tangent) / len;
        m.hessian(i, j) += off;
        m.hessian(j, i) += off;
    }
    return m;
}

Vec2 reflect(const Vec2& v, const Vec2& normal) { return v - 2.0 * v.dot(normal) * normal; }

PeriodicOrbit assemble(std::span<const double> arclengths, const StadiumGeometry& g, const RefineOptions& opts) {
    const std::size_t n = arclengths.size();
    const double perim = g.perimeter();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (cyclic_distance(arclengths[i], arclengths[j], perim) < opts.collapse_tol) {
                throw GeometryError("degenerate orbit: bounce points " + std::to_string(i) + " and " +
                                    std::to_string(j) + " collapse");
            }
        }
    }

    PeriodicOrbit orbit;
    std::vector<Vec2> positions;
    std::vector<BoundaryPoint> pts;
    for (const double s : arclengths) {
        const double w = wrap(s, perim);
        pts.push_back(boundary_point(g, w));
        positions.push_back(pts.back().position);
        orbit.bounces.push_back({w, pts.back().position});
    }

    for (std::size_t i = 0; i < n; ++i) {
        const BoundaryPoint& p = pts[i];
        const BoundaryPoint& q = pts[(i + 1) % n];
        const Vec2 e = (q.position - p.position).normalized();
        if (std::abs(e.dot(p.inward_normal)) <= opts.tangency_tol ||
            std::abs(e.dot(q.inward_normal)) <= opts.tangency_tol) {
            throw GeometryError("chord " + std::to_string(i) + " is tangent to the boundary");
        }
        for (int k = 1; k < 8; ++k) {
            const Vec2 x = p.position + (k / 8.0) * (q.position - p.position);
            if (!g.contains(x, 1e-12)) {
                throw GeometryError("chord " + std::to_string(i) + " leaves the stadium");
            }
        }
    }

    orbit.length = orbit_length(positions);
    orbit.dk_star = dk_star(orbit.length);
    orbit.reflection_residual = reflection_residual(g, arclengths);
    if (orbit.reflection_residual > opts.reflection_tol) {
        throw GeometryError("reflection law violated: residual " + std::to_string(orbit.reflection_residual));
    }
    return orbit;
}

}  // namespace

double StadiumGeometry::perimeter() const { return 4.0 * half_length + 2.0 * pi * radius; }

void StadiumGeometry::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("stadium radius must be positive");
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
        throw DomainError("stadium half length must be positive");
    }
}

bool StadiumGeometry::contains(const Vec2& p, double tol) const {
    const double a = half_length;
    if (std::abs(p.x()) <= a) return std::abs(p.y()) <= radius + tol;
    const Vec2 centre(p.x() > 0.0 ? a : -a, 0.0);
    return (p - centre).norm() <= radius + tol;
}

BoundaryPoint boundary_point(const StadiumGeometry& g, double s) {
    const double a = g.half_length;
    const double r = g.radius;
    const double quarter = 0.5 * pi * r;
    s = wrap(s, g.perimeter());

    BoundaryPoint b;
    auto on_arc = [&](double cx, double theta) {
        const Vec2 radial(std::cos(theta), std::sin(theta));
        b.position = Vec2(cx, 0.0) + r * radial;
        b.inward_normal = -radial;
        b.tangent = Vec2(-radial.y(), radial.x());
        b.curvature = 1.0 / r;
    };

    if (s < quarter) {
        on_arc(a, s / r);
        return b;
    }
    s -= quarter;
    if (s < 2.0 * a) {
        b.position = Vec2(a - s, r);
        b.inward_normal = Vec2(0.0, -1.0);
        b.tangent = Vec2(-1.0, 0.0);
        return b;
    }
    s -= 2.0 * a;
    if (s < pi * r) {
        on_arc(-a, 0.5 * pi + s / r);
        return b;
    }
    s -= pi * r;
    if (s < 2.0 * a) {
        b.position = Vec2(-a + s, -r);
        b.inward_normal = Vec2(0.0, 1.0);
        b.tangent = Vec2(1.0, 0.0);
        return b;
    }
    s -= 2.0 * a;
    on_arc(a, -0.5 * pi + s / r);
    return b;
}

double right_cap_arclength(const StadiumGeometry& g, double angle) {
    return wrap(g.radius * angle, g.perimeter());
}

double left_cap_arclength(const StadiumGeometry& g, double angle) {
    return wrap(0.5 * pi * g.radius + 2.0 * g.half_length + g.radius * (angle - 0.5 * pi), g.perimeter());
}

double top_wall_arclength(const StadiumGeometry& g, double x) {
    return 0.5 * pi * g.radius + (g.half_length - x);
}

double bottom_wall_arclength(const StadiumGeometry& g, double x) {
    return 1.5 * pi * g.radius + 2.0 * g.half_length + (x + g.half_length);
}

double orbit_length(std::span<const Vec2> points) {
    if (points.size() < 2) throw DomainError("orbit needs at least two bounce points");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        total += (points[(i + 1) % points.size()] - points[i]).norm();
    }
    return total;
}

double reflection_residual(const StadiumGeometry& g, std::span<const double> arclengths) {
    const std::size_t n = arclengths.size();
    if (n < 2) throw DomainError("orbit needs at least two bounce points");
    std::vector<BoundaryPoint> pts;
    for (const double s : arclengths) pts.push_back(boundary_point(g, s));

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const BoundaryPoint& prev = pts[(i + n - 1) % n];
        const BoundaryPoint& here = pts[i];
        const BoundaryPoint& next = pts[(i + 1) % n];
        const Vec2 incoming = (here.position - prev.position).normalized();
        const Vec2 outgoing = (next.position - here.position).normalized();
        worst = std::max(worst, (outgoing - reflect(incoming, here.inward_normal)).norm());
    }
    return worst;
}

PeriodicOrbit refine_orbit(std::span<const double> initial, const StadiumGeometry& g, const RefineOptions& opts) {
    g.validate();
    if (initial.size() < 2) throw DomainError("orbit needs at least two bounce points");
    const double perim = g.perimeter();

    Eigen::VectorXd s(static_cast<Eigen::Index>(initial.size()));
    for (std::size_t i = 0; i < initial.size(); ++i) s(static_cast<Eigen::Index>(i)) = initial[i];

    LengthModel model = length_model(g, s, opts.collapse_tol);
    double gnorm = model.gradient.norm();
    int it = 0;
    for (; it < opts.max_iterations && gnorm > opts.gradient_tol; ++it) {
        const Eigen::VectorXd step = -model.hessian.completeOrthogonalDecomposition().solve(model.gradient);

        // Damped step: halve until the gradient norm decreases.
        double damping = 1.0;
        bool accepted = false;
        while (!accepted && damping > 1e-9) {
            const Eigen::VectorXd trial = s + damping * step;
            try {
                LengthModel tm = length_model(g, trial, opts.collapse_tol);
                if (tm.gradient.norm() < gnorm) {
                    s = trial;
                    model = std::move(tm);
                    accepted = true;
                    break;
                }
            } catch (const GeometryError&) {
            }
            damping *= 0.5;
        }
        if (!accepted) break;
        gnorm = model.gradient.norm();

        for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = wrap(s(i), perim);
    }
    if (gnorm > opts.gradient_tol) {
        throw ConvergenceError("orbit refinement stalled after " + std::to_string(it) +
                               " iterations, gradient norm " + std::to_string(gnorm));
    }

    std::vector<double> result(s.data(), s.data() + s.size());
    PeriodicOrbit orbit = assemble(result, g, opts);
    orbit.iterations = it;
    return orbit;
}

PeriodicOrbit exact_orbit(std::span<const double> arclengths, const StadiumGeometry& g, const RefineOptions& opts) {
    g.validate();
    if (arclengths.size() < 2) throw DomainError("orbit needs at least two bounce points");
    return assemble(arclengths, g, opts);
}

std::vector<OrbitSeed> builtin_orbits(const StadiumGeometry& g) {
    const double deg = pi / 180.0;
    const double top0 = top_wall_arclength(g, 0.0);
    const double bottom0 = bottom_wall_arclength(g, 0.0);
    auto right = [&](double angle_deg) { return right_cap_arclength(g, angle_deg * deg); };
    auto left = [&](double angle_deg) { return left_cap_arclength(g, angle_deg * deg); };
    auto bottom = [&](double x_fraction) { return bottom_wall_arclength(g, x_fraction * g.half_length); };

    // Bounce lists are in traversal order. Angles are about the cap
    // centres; wall positions are fractions of the half length.
    std::vector<OrbitSeed> seeds;
    seeds.push_back({"R", "rectangle", {right(45), left(135), left(225), right(-45)}, false});
    seeds.push_back({"A", "arrowhead", {right(0), left(109.5), left(180), left(250.5)}, false});
    seeds.push_back({"D", "diamond", {right(0), top0, left(180), bottom0}, false});
    seeds.push_back({"T", "triangle", {right(0), left(129), left(231)}, false});
    seeds.push_back({"HBB", "horizontal bouncing ball", {right(0), left(180)}, true});
    // asymmetric: nose on the left cap, tail on the right cap
    seeds.push_back({"F", "fish", {left(174.6), bottom(0.547), right(-24.4), right(60.2)}, false});
    seeds.push_back({"B", "bowtie", {right(60), right(-60), left(120), left(240)}, false});
    seeds.push_back({"C", "candy", {right(73.3), bottom0, left(106.7), left(253.3), top0, right(-73.3)}, false});
    return seeds;
}

PeriodicOrbit resolve_seed(const OrbitSeed& seed, const StadiumGeometry& g, const RefineOptions& opts) {
    PeriodicOrbit orbit = seed.exact ? exact_orbit(seed.arclengths, g, opts) : refine_orbit(seed.arclengths, g, opts);
    orbit.name = seed.name;
    return orbit;
}

double dk_star(double length) {
    if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("orbit length must be positive");
    return 4.0 * pi / length;
}

double equidistance_alpha(double mean_dk, double dk_star) {
    if (!(dk_star > 0.0)) throw DomainError("dk_star must be positive");
    return std::abs((mean_dk - dk_star) / dk_star);
}

OrbitFamilyStats equidistance_stats(std::span<const double> k_reals, double dk_star) {
    if (k_reals.size() < 3) throw DomainError("equidistance statistics need at least three modes");
    if (!std::is_sorted(k_reals.begin(), k_reals.end())) throw DomainError("mode list is not sorted");

    const std::size_t m = k_reals.size() - 1;
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += k_reals[i + 1] - k_reals[i];
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = (k_reals[i + 1] - k_reals[i]) - mean;
        var += d * d;
    }
    var /= static_cast<double>(m);

    OrbitFamilyStats st;
    st.mean_dk = mean;
    st.dk_star = dk_star;
    st.alpha = equidistance_alpha(mean, dk_star);
    st.sigma = std::sqrt(var);
    return st;
}

}  // namespace openloc::billiard
