// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "openloc/billiard.hpp"
#include "openloc/ensemble.hpp"
#include "openloc/errors.hpp"
#include "openloc/linalg.hpp"
#include "openloc/spectra.hpp"
#include "openloc/two_level.hpp"

using namespace openloc;
using linalg::Complex;

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::uint64_t master_seed = 1;
constexpr std::size_t ensemble_n = 300;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

bool by_real_then_imag(Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

two_level::TwoLevelParams at_offset(double d_eps, double d_gamma, double c = 1.0) {
    // eps1 = 0, gamma1 = 1; gamma2 stays non-negative for d_gamma >= -1
    return {0.0, d_eps, 1.0, 1.0 + d_gamma, c};
}

double f_at(double d_eps, double d_gamma) {
    const auto r = two_level::eigenpairs_2x2(at_offset(d_eps, d_gamma));
    return std::max(r.f_plus, r.f_minus);
}

Outcome criterion_1() {
    Stopwatch clock;
    std::mt19937_64 rng(master_seed);
    std::uniform_real_distribution<double> eps(-3.0, 3.0);
    std::uniform_real_distribution<double> gam(0.0, 4.0);
    std::uniform_real_distribution<double> cpl(0.05, 3.0);
    double worst = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const two_level::TwoLevelParams p{eps(rng), eps(rng), gam(rng), gam(rng), cpl(rng)};
        const auto a = two_level::eigenpairs_2x2(p);
        const auto s = linalg::eigendecompose(p.matrix());
        std::array<Complex, 2> analytic{a.lambda_plus, a.lambda_minus};
        std::sort(analytic.begin(), analytic.end(), by_real_then_imag);
        worst = std::max({worst, std::abs(analytic[0] - s.eigenvalues(0)), std::abs(analytic[1] - s.eigenvalues(1))});
    }
    const double t = clock.seconds();
    return {worst <= 1e-10 && t < 10.0, "max |analytic - numeric| = " + fmt("%.2e", worst) + " over 10^4 draws (tol 1e-10), " +
                                             fmt("%.2f", t) + " s (limit 10 s)"};
}

Outcome criterion_2() {
    const auto p = at_offset(0.0, 2.0);
    const auto r = two_level::eigenpairs_2x2(p);
    const double gap = std::abs(r.lambda_plus - r.lambda_minus);
    const auto s = linalg::eigendecompose(p.matrix());
    const double overlap = std::abs(s.eigenvectors.col(0).dot(s.eigenvectors.col(1)));
    const double numeric_gap = std::abs(s.eigenvalues(0) - s.eigenvalues(1));
    return {gap <= 1e-8 && overlap >= 1.0 - 1e-4,
            "|lambda+ - lambda-| = " + fmt("%.2e", gap) + " (tol 1e-8), numeric eigenvector overlap = " +
                fmt("%.10f", overlap) + " (>= 1 - 1e-4), numeric eigenvalue gap = " + fmt("%.2e", numeric_gap)};
}

Outcome criterion_3() {
    bool ok = true;
    std::string detail;
    const auto anchor = two_level::default_anchor();
    for (double radius : {0.1, 0.5, 1.0}) {
        const auto perm = two_level::encircle_ep({0.0, 2.0}, radius, 720, anchor);
        ok = ok && perm == two_level::BranchPermutation::swap;
        detail += "r=" + fmt("%g", radius) + ": " + two_level::to_string(perm) + ", ";
    }
    const auto outside = two_level::encircle_ep({3.0, 2.0}, 0.5, 720, anchor);
    ok = ok && outside == two_level::BranchPermutation::identity;
    detail += "non-enclosing: " + two_level::to_string(outside) + " (720 steps)";
    return {ok, detail};
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Outcome criterion_4() {
    const double below = f_at(0.0, 1.99);
    const double above = f_at(0.0, 2.01);
    const double at_root8 = f_at(0.0, 2.0 * std::sqrt(2.0));
    // analytic: at delta_eps = 0, delta_gamma = 2 sqrt(2) c the state moduli are 1 +- 1/sqrt(2)
    const double expected = (std::sqrt(2.0) - 1.0) * (std::sqrt(2.0) - 1.0);
    auto g = [](double x) { return f_at(x, 0.0) - 0.5; };
    const double right = bisect(g, 0.1, 3.0);
    const double left = bisect(g, -3.0, -0.1);
    const double target = 1.0 / std::sqrt(2.0);
    const bool ok = std::abs(below - 1.0) <= 1e-6 && above < 1.0 && std::abs(at_root8 - 0.17157) <= 1e-5 &&
                    std::abs(right - target) <= 1e-6 && std::abs(left + target) <= 1e-6;
    return {ok, "F(1.99)=" + fmt("%.9f", below) + ", F(2.01)=" + fmt("%.6f", above) + ", F(2sqrt2)=" +
                    fmt("%.6f", at_root8) + " (analytic " + fmt("%.6f", expected) + "), F=0.5 at d_eps/c=" +
                    fmt("%.9f", left) + ", " + fmt("%.9f", right)};
}

Outcome criterion_5() {
    Stopwatch clock;
    const double c = 10.0 * ensemble::mean_level_spacing(ensemble_n);
    const std::vector<double> ratios{0.0, 1.0, 4.0, 10.0, 100.0};
    ensemble::SweepGrid grid{{c}, {}};
    for (double k : ratios) grid.gamma_values.push_back(k * c);
    const std::size_t realizations = 20;
    const auto rows = ensemble::sweep(grid, ensemble_n, realizations, master_seed);
    const double t = clock.seconds();

    bool monotone = true;
    std::string detail = "AIPR at gamma/c = ";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail += fmt("%g", ratios[i]) + ": " + fmt("%.4f", rows[i].aipr_mean) + (i + 1 < rows.size() ? ", " : "");
        if (i > 0) {
            const double se = std::hypot(rows[i].aipr_stddev, rows[i - 1].aipr_stddev) / std::sqrt(double(realizations));
            if (rows[i].aipr_mean < rows[i - 1].aipr_mean - se) monotone = false;
        }
    }
    const bool low = rows.front().aipr_mean <= 0.05;
    const bool high = rows.back().aipr_mean >= 0.95;
    detail += std::string(" | AIPR(0)<=0.05: ") + (low ? "yes" : "no") + ", AIPR(100c)>=0.95: " + (high ? "yes" : "no") +
              ", non-decreasing within 1 SE: " + (monotone ? "yes" : "no") + ", " + fmt("%.1f", t) + " s";
    return {low && high && monotone && t < 600.0, detail};
}

Outcome criterion_6() {
    const double c = 50.0 * ensemble::mean_level_spacing(ensemble_n);
    const auto rows = ensemble::sweep({{c}, {0.0}}, ensemble_n, 20, master_seed);
    const double target = 3.0 / ensemble_n;
    const double rel = std::abs(rows[0].aipr_mean - target) / target;
    return {rel <= 0.25, "AIPR = " + fmt("%.5f", rows[0].aipr_mean) + " vs 3/N = " + fmt("%.5f", target) +
                             " (relative deviation " + fmt("%.3f", rel) + ", tol 0.25), c = 50 spacings, 20 realizations"};
}

struct PooledSpectra {
    std::vector<double> spacings;
    spectra::EigenvalueList values;
};

PooledSpectra pooled(double c, double gamma, std::size_t realizations) {
    PooledSpectra out;
    for (std::size_t r = 0; r < realizations; ++r) {
        const ensemble::EnsembleParams p{ensemble_n, c, gamma, master_seed, r};
        const auto s = linalg::eigendecompose(ensemble::sample_hamiltonian(p));
        std::vector<double> re;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            re.push_back(s.eigenvalues(i).real());
            out.values.values.push_back(s.eigenvalues(i));
        }
        const auto sp = spectra::unfold(re);
        out.spacings.insert(out.spacings.end(), sp.begin(), sp.end());
    }
    return out;
}

Outcome criterion_7_8(Outcome& eight) {
    const double c = 10.0 * ensemble::mean_level_spacing(ensemble_n);
    const std::size_t realizations = 25;
    const std::vector<std::pair<double, spectra::SpacingClass>> cases{
        {0.0, spectra::SpacingClass::wigner},
        {4.0, spectra::SpacingClass::intermediate},
        {100.0, spectra::SpacingClass::poisson}};
    bool ok = true;
    std::string detail;
    for (const auto& [ratio, expected] : cases) {
        const PooledSpectra ps = pooled(c, ratio * c, realizations);
        const auto cls = spectra::classify_spacings(ps.spacings);
        ok = ok && cls.label == expected && cls.samples >= 5000;
        detail += "gamma/c=" + fmt("%g", ratio) + ": " + spectra::to_string(cls.label) + " (ks_w " +
                  fmt("%.3f", cls.ks_wigner) + ", ks_p " + fmt("%.3f", cls.ks_poisson) + ", " +
                  std::to_string(cls.samples) + " spacings); ";

        if (ratio == 100.0) {
            const auto d = spectra::imag_distribution(ps.values, ratio * c, 20, 1e-9 * ensemble_n * c);
            const double ks = spectra::ks_statistic(d.normalized, [](double x) { return x; });
            bool zero_errors = false;
            try {
                spectra::imag_distribution(ps.values, 0.0);
            } catch (const DomainError&) {
                zero_errors = true;
            }
            eight = {ks < 0.05 && zero_errors,
                     "KS(-Im/gamma, U(0,1)) = " + fmt("%.4f", ks) + " (tol 0.05) over " +
                         std::to_string(d.normalized.size()) + " eigenvalues at gamma/c=100; gamma=0 raises: " +
                         (zero_errors ? "yes" : "no")};
        }
    }
    return {ok, detail};
}

Outcome criterion_9() {
    Stopwatch clock;
    const billiard::StadiumGeometry g;
    const std::map<std::string, double> table{{"HBB", 1.571}, {"D", 1.405}, {"R", 1.301}, {"T", 1.400},
                                              {"A", 1.360},   {"F", 1.364}, {"B", 1.209}, {"C", 0.952}};
    bool ok = true;
    std::string detail;
    for (const auto& seed : billiard::builtin_orbits(g)) {
        const auto it = table.find(seed.name);
        if (it == table.end()) continue;
        try {
            const auto o = billiard::resolve_seed(seed, g);
            const bool good = std::abs(o.dk_star - it->second) <= 0.005 && o.reflection_residual <= 1e-9;
            ok = ok && good;
            detail += seed.name + " " + fmt("%.4f", o.dk_star) + "/" + fmt("%.3f", it->second) + (good ? "" : " MISS") +
                      ", ";
        } catch (const Error& e) {
            ok = false;
            detail += seed.name + " failed (" + e.what() + "), ";
        }
    }
    const double t = clock.seconds();
    bool exact = false;
    for (const auto& seed : billiard::builtin_orbits(g))
        if (seed.name == "HBB") exact = std::abs(billiard::resolve_seed(seed, g).dk_star - pi / 2) < 1e-12;
    ok = ok && t < 30.0;
    return {ok, detail + "HBB exact pi/2: " + (exact ? "yes" : "no") + ", " + fmt("%.3f", t) + " s (tol 0.005, residual <= 1e-9)"};
}

Outcome criterion_10() {
    struct Column {
        const char* name;
        double mean_dk, dk_star, alpha;
    };
    const Column cols[] = {{"R", 1.292, 1.301, 0.007},   {"A", 1.332, 1.360, 0.021}, {"A2", 1.352, 1.360, 0.006},
                           {"D", 1.278, 1.405, 0.090},   {"D2", 1.379, 1.405, 0.019}, {"T", 1.326, 1.400, 0.053},
                           {"HBB", 1.553, 1.571, 0.011}, {"F", 1.261, 1.364, 0.076}, {"B", 1.233, 1.209, 0.020},
                           {"B2", 1.211, 1.209, 0.002},  {"C", 0.966, 0.952, 0.015}};
    bool ok = true;
    double worst = 0.0;
    for (const auto& c : cols) {
        const double dev = std::abs(billiard::equidistance_alpha(c.mean_dk, c.dk_star) - c.alpha);
        worst = std::max(worst, dev);
        ok = ok && dev <= 0.001;
    }
    return {ok, "max |alpha - printed alpha| = " + fmt("%.5f", worst) + " over 11 columns (tol 0.001)"};
}

std::vector<double> levels_from_spacings(const std::vector<double>& spacings) {
    std::vector<double> levels{0.0};
    for (double s : spacings) levels.push_back(levels.back() + s);
    return levels;
}

Outcome criterion_11() {
    const auto dir = std::filesystem::temp_directory_path() / "openloc_acceptance";
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(master_seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    // synthetic levels with known statistics and a spread of imaginary parts
    std::vector<double> wigner_sp(3000);
    std::vector<double> poisson_sp(3000);
    for (auto& s : wigner_sp) s = std::sqrt(-4.0 / pi * std::log1p(-u(rng)));
    for (auto& s : poisson_sp) s = -std::log1p(-u(rng));

    bool ok = true;
    std::string detail;
    const std::pair<const char*, std::vector<double>*> sets[] = {{"Wigner", &wigner_sp}, {"Poisson", &poisson_sp}};
    for (const auto& [expected, sp] : sets) {
        std::vector<Complex> values;
        for (double x : levels_from_spacings(*sp)) values.emplace_back(30.0 + 0.01 * x, -0.2 * u(rng));
        const auto path = (dir / (std::string(expected) + ".csv")).string();
        spectra::export_eigenvalues(path, values);
        const auto back = spectra::ingest_eigenvalues(path);
        bool exact = back.values.size() == values.size();
        for (std::size_t i = 0; exact && i < values.size(); ++i) {
            exact = std::bit_cast<std::uint64_t>(back.values[i].real()) == std::bit_cast<std::uint64_t>(values[i].real()) &&
                    std::bit_cast<std::uint64_t>(back.values[i].imag()) == std::bit_cast<std::uint64_t>(values[i].imag());
        }
        const auto path2 = (dir / (std::string(expected) + "_again.csv")).string();
        spectra::export_eigenvalues(path2, back.values);
        std::ifstream a(path), b(path2);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        exact = exact && sa.str() == sb.str();

        std::vector<double> re;
        for (const auto& z : back.values) re.push_back(z.real());
        const auto spacings = spectra::unfold(re);
        const auto cls = spectra::classify_spacings(spacings);
        const auto hist = spectra::spacing_histogram(spacings);
        double mass = 0.0;
        for (std::size_t k = 0; k < hist.bins(); ++k) mass += hist.densities[k] * (hist.bin_edges[k + 1] - hist.bin_edges[k]);
        const auto imag = spectra::imag_distribution(back, 0.2);
        const bool good = exact && spectra::to_string(cls.label) == expected && std::abs(mass - 1.0) < 1e-9 &&
                          imag.flagged == 0;
        ok = ok && good;
        detail += std::string(expected) + " data: round trip " + (exact ? "bit-exact" : "MISMATCH") + ", classified " +
                  spectra::to_string(cls.label) + "; ";
    }
    std::filesystem::remove_all(dir);
    return {ok, detail + "measured cavity spectra are out of scope (they need a boundary-element solver)"};
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int id, const char* title, const Outcome& o) {
        std::printf("criterion %2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    };
    auto guarded = [](const std::function<Outcome()>& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            return Outcome{false, std::string("threw: ") + e.what()};
        }
    };

    report(1, "2x2 analytic/numeric agreement", guarded(criterion_1));
    report(2, "EP coalescence", guarded(criterion_2));
    report(3, "EP exchange", guarded(criterion_3));
    report(4, "sharp F border", guarded(criterion_4));
    report(5, "AIPR trend (N=300, c=10 spacings)", guarded(criterion_5));
    report(6, "Porter-Thomas delocalization", guarded(criterion_6));
    Outcome eight{false, "not run"};
    report(7, "Wigner to Poisson transition", guarded([&] { return criterion_7_8(eight); }));
    report(8, "imaginary-part distribution", eight);
    report(9, "orbit quantization", guarded(criterion_9));
    report(10, "equidistance alpha arithmetic", guarded(criterion_10));
    report(11, "eigenvalue ingestion pipeline", guarded(criterion_11));

    std::printf("%d of 11 criteria passed\n", 11 - failed);
    return failed == 0 ? 0 : 1;
}
