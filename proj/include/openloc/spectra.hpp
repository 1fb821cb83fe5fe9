#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "openloc/linalg.hpp"

namespace openloc::spectra {

using linalg::Complex;

struct EigenvalueList {
    std::vector<Complex> values;
    std::string source;
    std::optional<double> refractive_index;

    // Throws DomainError on non-finite values or fewer than `min_count` entries.
    void validate(std::size_t min_count = 3) const;
};

struct Histogram {
    std::vector<double> bin_edges;
    std::vector<double> densities;
    std::size_t sample_count = 0;
    double mean_spacing = 0.0;

    std::size_t bins() const { return densities.size(); }
};

struct UnfoldOptions {
    std::size_t window = 21;
    double edge_fraction = 0.1;
};

/**
 * Sorts the values, drops `edge_fraction` of them at each end, and returns
 * nearest-neighbour spacings divided by the mean spacing over a centred
 * window (shrunk to stay inside the list near its ends).
 */
std::vector<double> unfold(std::vector<double> reals, const UnfoldOptions& opts = {});

// Density histogram over [lo, hi]. Samples outside the range are dropped;
// the last bin includes its right edge.
Histogram spacing_histogram(const std::vector<double>& spacings, std::size_t bins = 40, double lo = 0.0,
                            double hi = 4.0);

double wigner_pdf(double s);
double poisson_pdf(double s);
double wigner_cdf(double s);
double poisson_cdf(double s);

// sup |F_empirical - F| over the sample.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

double ks_wigner(const std::vector<double>& spacings);
double ks_poisson(const std::vector<double>& spacings);

enum class SpacingClass { wigner, poisson, intermediate };

std::string to_string(SpacingClass c);

struct Classification {
    SpacingClass label = SpacingClass::intermediate;
    double ks_wigner = 0.0;
    double ks_poisson = 0.0;
    std::size_t samples = 0;
};

constexpr double classification_margin = 0.05;
constexpr std::size_t min_classification_samples = 100;

Classification classify_spacings(const std::vector<double>& spacings);

struct ImagDistribution {
    Histogram histogram;
    // -Im(lambda) / gamma, clipped to [0, 1]
    std::vector<double> normalized;
    // values that lay outside [0, 1] by more than the tolerance before clipping
    std::size_t flagged = 0;
};

// Histogram of -Im(lambda)/gamma on [0, 1]. `tolerance` is the distance
// outside [0, 1] tolerated without flagging.
ImagDistribution imag_distribution(const EigenvalueList& values, double gamma, std::size_t bins = 20,
                                   double tolerance = 1e-9);

EigenvalueList ingest_eigenvalues(const std::string& path);
EigenvalueList parse_eigenvalues(const std::string& text, const std::string& source = "");
std::string format_eigenvalues(const std::vector<Complex>& values, bool header = true);
void export_eigenvalues(const std::string& path, const std::vector<Complex>& values, bool header = true);

std::string format_histogram(const Histogram& h);
std::string format_classification(const Classification& c);

}  // namespace openloc::spectra
