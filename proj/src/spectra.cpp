#include "openloc/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string_view>

#include "io.hpp"
#include "openloc/errors.hpp"

namespace openloc::spectra {

namespace {

constexpr double pi = std::numbers::pi;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

void require_non_negative(double s) {
    if (!(s >= 0.0)) throw DomainError("spacing must be non-negative");
}

}  // namespace

void EigenvalueList::validate(std::size_t min_count) const {
    if (values.size() < min_count) {
        throw DomainError("need at least " + std::to_string(min_count) + " eigenvalues, got " +
                          std::to_string(values.size()));
    }
    for (const Complex& z : values) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("non-finite eigenvalue");
    }
}

std::vector<double> unfold(std::vector<double> reals, const UnfoldOptions& opts) {
    if (opts.window < 1 || opts.window % 2 == 0) throw DomainError("unfolding window must be odd");
    if (!(opts.edge_fraction >= 0.0 && opts.edge_fraction < 0.5)) {
        throw DomainError("edge fraction must lie in [0, 0.5)");
    }
    if (reals.size() < opts.window + 2) {
        throw DomainError("unfolding needs at least " + std::to_string(opts.window + 2) + " values");
    }
    for (const double v : reals) {
        if (!std::isfinite(v)) throw DomainError("non-finite value");
    }
    std::sort(reals.begin(), reals.end());

    const auto trim_count = static_cast<std::size_t>(std::floor(opts.edge_fraction * reals.size()));
    const std::vector<double> kept(reals.begin() + static_cast<std::ptrdiff_t>(trim_count),
                                   reals.end() - static_cast<std::ptrdiff_t>(trim_count));
    if (kept.size() < 3) throw DomainError("too few values left after edge trimming");

    std::vector<double> raw(kept.size() - 1);
    for (std::size_t i = 0; i + 1 < kept.size(); ++i) raw[i] = kept[i + 1] - kept[i];

    const std::size_t m = raw.size();
    const std::size_t w = std::min(opts.window, m % 2 == 1 ? m : m - 1);
    const std::size_t half = w / 2;
    std::vector<double> prefix(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + raw[i];

    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t lo = i >= half ? i - half : 0;
        lo = std::min(lo, m - w);
        const double local = (prefix[lo + w] - prefix[lo]) / static_cast<double>(w);
        if (!(local > 0.0)) throw DomainError("degenerate values: zero local mean spacing");
        out[i] = raw[i] / local;
    }
    return out;
}

Histogram spacing_histogram(const std::vector<double>& spacings, std::size_t bins, double lo, double hi) {
    if (spacings.empty()) throw DomainError("histogram of an empty sample");
    if (bins == 0) throw DomainError("histogram needs at least one bin");
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("invalid histogram range");

    Histogram h;
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.bin_edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
    std::vector<std::size_t> counts(bins, 0);
    double sum = 0.0;
    for (const double s : spacings) {
        if (!std::isfinite(s)) throw DomainError("non-finite sample");
        sum += s;
        if (s < lo || s > hi) continue;
        auto k = static_cast<std::size_t>((s - lo) / (hi - lo) * static_cast<double>(bins));
        if (k >= bins) k = bins - 1;
        ++counts[k];
        ++h.sample_count;
    }
    h.mean_spacing = sum / static_cast<double>(spacings.size());
    h.densities.assign(bins, 0.0);
    if (h.sample_count == 0) throw DomainError("no samples inside the histogram range");
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        h.densities[k] = static_cast<double>(counts[k]) / (static_cast<double>(h.sample_count) * width);
    }
    return h;
}

double wigner_pdf(double s) {
    require_non_negative(s);
    return 0.5 * pi * s * std::exp(-0.25 * pi * s * s);
}

double poisson_pdf(double s) {
    require_non_negative(s);
    return std::exp(-s);
}

double wigner_cdf(double s) {
    require_non_negative(s);
    return -std::expm1(-0.25 * pi * s * s);
}

double poisson_cdf(double s) {
    require_non_negative(s);
    return -std::expm1(-s);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw DomainError("KS statistic of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return std::clamp(d, 0.0, 1.0);
}

double ks_wigner(const std::vector<double>& spacings) { return ks_statistic(spacings, wigner_cdf); }
double ks_poisson(const std::vector<double>& spacings) { return ks_statistic(spacings, poisson_cdf); }

std::string to_string(SpacingClass c) {
    switch (c) {
        case SpacingClass::wigner: return "Wigner";
        case SpacingClass::poisson: return "Poisson";
        case SpacingClass::intermediate: break;
    }
    return "intermediate";
}

Classification classify_spacings(const std::vector<double>& spacings) {
    if (spacings.size() < min_classification_samples) {
        throw DomainError("classification needs at least " + std::to_string(min_classification_samples) +
                          " spacings, got " + std::to_string(spacings.size()));
    }
    Classification c;
    c.samples = spacings.size();
    c.ks_wigner = ks_wigner(spacings);
    c.ks_poisson = ks_poisson(spacings);
    if (c.ks_wigner < c.ks_poisson - classification_margin) {
        c.label = SpacingClass::wigner;
    } else if (c.ks_poisson < c.ks_wigner - classification_margin) {
        c.label = SpacingClass::poisson;
    }
    return c;
}

ImagDistribution imag_distribution(const EigenvalueList& values, double gamma, std::size_t bins, double tolerance) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("imaginary-part distribution needs gamma > 0");
    }
    values.validate(1);
    ImagDistribution d;
    d.normalized.reserve(values.values.size());
    for (const Complex& z : values.values) {
        const double x = -z.imag() / gamma;
        if (x < -tolerance || x > 1.0 + tolerance) ++d.flagged;
        d.normalized.push_back(std::clamp(x, 0.0, 1.0));
    }
    d.histogram = spacing_histogram(d.normalized, bins, 0.0, 1.0);
    return d;
}

EigenvalueList parse_eigenvalues(const std::string& text, const std::string& source) {
    EigenvalueList list;
    list.source = source;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool seen_content = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (!seen_content) {
            seen_content = true;
            if (line == "re,im") continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            throw ParseError("expected two comma-separated values", line_no);
        }
        double re = 0.0;
        double im = 0.0;
        if (!parse_double(line.substr(0, comma), re) || !parse_double(line.substr(comma + 1), im)) {
            throw ParseError("malformed number", line_no);
        }
        if (!std::isfinite(re) || !std::isfinite(im)) throw ParseError("non-finite value", line_no);
        list.values.emplace_back(re, im);
    }
    if (list.values.empty()) throw DomainError("no eigenvalues in " + (source.empty() ? "input" : source));
    return list;
}

EigenvalueList ingest_eigenvalues(const std::string& path) { return parse_eigenvalues(detail::read_file(path), path); }

std::string format_eigenvalues(const std::vector<Complex>& values, bool header) {
    std::string out = header ? "re,im\n" : "";
    for (const Complex& z : values) {
        out += detail::format_double(z.real());
        out += ',';
        out += detail::format_double(z.imag());
        out += '\n';
    }
    return out;
}

void export_eigenvalues(const std::string& path, const std::vector<Complex>& values, bool header) {
    detail::write_file_atomic(path, format_eigenvalues(values, header));
}

std::string format_histogram(const Histogram& h) {
    std::string out = "bin_left,bin_right,density\n";
    for (std::size_t k = 0; k < h.bins(); ++k) {
        out += detail::format_double(h.bin_edges[k]) + ',' + detail::format_double(h.bin_edges[k + 1]) + ',' +
               detail::format_double(h.densities[k]) + '\n';
    }
    return out;
}

std::string format_classification(const Classification& c) {
    return "label = " + to_string(c.label) + "\nks_wigner = " + detail::format_double(c.ks_wigner) +
           "\nks_poisson = " + detail::format_double(c.ks_poisson) + "\nsamples = " + std::to_string(c.samples) +
           "\n";
}

}  // namespace openloc::spectra
