#include "openloc/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string_view>

#include "io.hpp"
#include "openloc/billiard.hpp"
#include "openloc/ensemble.hpp"
#include "openloc/errors.hpp"
#include "openloc/spectra.hpp"
#include "openloc/two_level.hpp"

#ifndef OPENLOC_VERSION
#define OPENLOC_VERSION "0.0.0"
#endif

namespace openloc::cli {

namespace {

using detail::format_double;

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += format_double(values[i]);
    }
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

struct Globals {
    std::string out = ".";
    std::string config;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

// Files of one run, written together once every result is known.
class Outputs {
public:
    explicit Outputs(std::string dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

    void commit(const Manifest& manifest) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_);
        for (const auto& [name, content] : files_) {
            detail::write_file_atomic((std::filesystem::path(dir_) / name).string(), content);
        }
        detail::write_file_atomic((std::filesystem::path(dir_) / "manifest.txt").string(), manifest.format());
    }

private:
    std::string dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

Manifest base_manifest(const std::string& command, const Globals& g) {
    Manifest m;
    m.set("tool", "openloc");
    m.set("version", OPENLOC_VERSION);
    m.set("timestamp", utc_timestamp());
    m.set("command", command);
    m.set("out", g.out);
    return m;
}

// ---------------------------------------------------------------- two-level

struct PhaseMapArgs {
    double eps_min = -5.0;
    double eps_max = 5.0;
    std::size_t eps_count = 201;
    double gamma_min = 0.0;
    double gamma_max = 4.0;
    std::size_t gamma_count = 201;
    double fc = 0.5;
};

void cmd_phase_map(const PhaseMapArgs& a, const Globals& g, std::ostream& out) {
    const two_level::PhaseMap map = two_level::phase_map({a.eps_min, a.eps_max, a.eps_count},
                                                         {a.gamma_min, a.gamma_max, a.gamma_count}, a.fc,
                                                         two_level::default_anchor());
    std::string values = "d_eps_over_c,d_gamma_over_c,F\n";
    std::string labels = "d_eps_over_c,d_gamma_over_c,label\n";
    std::size_t delocalized = 0;
    for (std::size_t j = 0; j < map.d_gamma_over_c.size(); ++j) {
        for (std::size_t i = 0; i < map.d_eps_over_c.size(); ++i) {
            const std::string key = format_double(map.d_eps_over_c[i]) + ',' + format_double(map.d_gamma_over_c[j]);
            values += key + ',' +
                      format_double(map.f_values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) + '\n';
            const bool d = map.delocalized(j, i);
            delocalized += d;
            labels += key + (d ? ",delocalized\n" : ",localized\n");
        }
    }

    Manifest m = base_manifest("two-level phase-map", g);
    m.set("eps-min", a.eps_min);
    m.set("eps-max", a.eps_max);
    m.set("eps-count", std::to_string(a.eps_count));
    m.set("gamma-min", a.gamma_min);
    m.set("gamma-max", a.gamma_max);
    m.set("gamma-count", std::to_string(a.gamma_count));
    m.set("fc", a.fc);
    m.set("result.delocalized_nodes", std::to_string(delocalized));

    Outputs files(g.out);
    files.add("phase_map.csv", std::move(values));
    files.add("phase_labels.csv", std::move(labels));
    files.commit(m);
    out << "phase map: " << a.eps_count << " x " << a.gamma_count << " nodes, " << delocalized
        << " delocalized at F_c = " << format_double(a.fc) << '\n';
}

struct EncircleArgs {
    double centre_eps = 0.0;
    double centre_gamma = 2.0;
    double radius = 0.5;
    int steps = 720;
};

void cmd_encircle(const EncircleArgs& a, const Globals& g, std::ostream& out) {
    const two_level::EncircleTrace trace = two_level::encircle_ep_trace({a.centre_eps, a.centre_gamma}, a.radius,
                                                                        a.steps, two_level::default_anchor());
    std::string csv = "step,d_eps,d_gamma,lambda1_re,lambda1_im,lambda2_re,lambda2_im\n";
    for (std::size_t k = 0; k < trace.path.size(); ++k) {
        const auto& l = trace.tracked[k];
        csv += std::to_string(k) + ',' + format_double(trace.path[k].delta_eps) + ',' +
               format_double(trace.path[k].delta_gamma) + ',' + format_double(l[0].real()) + ',' +
               format_double(l[0].imag()) + ',' + format_double(l[1].real()) + ',' + format_double(l[1].imag()) +
               '\n';
    }
    const std::string perm = two_level::to_string(trace.permutation);

    Manifest m = base_manifest("two-level encircle", g);
    m.set("centre-eps", a.centre_eps);
    m.set("centre-gamma", a.centre_gamma);
    m.set("radius", a.radius);
    m.set("steps", std::to_string(a.steps));
    m.set("result.permutation", perm);

    Outputs files(g.out);
    files.add("encircle.csv", std::move(csv));
    files.commit(m);
    out << "permutation = " << perm << '\n';
}

// ----------------------------------------------------------------- ensemble

struct SweepArgs {
    std::size_t n = 300;
    std::size_t realizations = 20;
    std::vector<double> c_values;
    std::vector<double> gamma_values;
    std::optional<double> gamma;
    bool dump_matrices = false;
};

// Default grid in units of the mean level spacing s = 2/N:
// c in {10, 50} s, gamma in {0, 500, 5000, 50000} s.
void fill_default_grid(SweepArgs& a) {
    const double s = ensemble::mean_level_spacing(a.n);
    if (a.c_values.empty()) a.c_values = {10.0 * s, 50.0 * s};
    if (a.gamma) {
        a.gamma_values = {*a.gamma};
    } else if (a.gamma_values.empty()) {
        a.gamma_values = {0.0, 500.0 * s, 5000.0 * s, 50000.0 * s};
    }
}

void cmd_sweep(SweepArgs a, const Globals& g, std::ostream& out) {
    if (a.n < 2) throw DomainError("--n must be at least 2");
    fill_default_grid(a);
    const auto rows = ensemble::sweep({a.c_values, a.gamma_values}, a.n, a.realizations, g.seed, g.threads);

    std::string csv = "c,gamma,N,realizations,aipr_mean,aipr_stddev\n";
    for (const auto& r : rows) {
        csv += format_double(r.c) + ',' + format_double(r.gamma) + ',' + std::to_string(r.n) + ',' +
               std::to_string(r.realizations) + ',' + format_double(r.aipr_mean) + ',' +
               format_double(r.aipr_stddev) + '\n';
    }

    Manifest m = base_manifest("ensemble sweep", g);
    m.set("seed", std::to_string(g.seed));
    m.set("n", std::to_string(a.n));
    m.set("realizations", std::to_string(a.realizations));
    m.set("c-values", a.c_values);
    m.set("gamma-values", a.gamma_values);
    m.set("dump-matrices", a.dump_matrices ? "true" : "false");

    Outputs files(g.out);
    files.add("sweep.csv", std::move(csv));
    if (a.dump_matrices) {
        for (std::size_t i = 0; i < a.c_values.size(); ++i) {
            for (std::size_t j = 0; j < a.gamma_values.size(); ++j) {
                const ensemble::EnsembleParams p{a.n, a.c_values[i], a.gamma_values[j],
                                                 ensemble::node_seed(g.seed, i, j), 0};
                files.add("matrix_" + std::to_string(i) + "_" + std::to_string(j) + ".txt",
                          ensemble::format_matrix(ensemble::sample_hamiltonian(p)));
            }
        }
    }
    files.commit(m);
    out << "sweep: " << rows.size() << " nodes, N = " << a.n << ", " << a.realizations << " realizations\n";
}

// ------------------------------------------------------------------ spectra

struct SpectraArgs {
    bool from_ensemble = false;
    std::string input;
    std::size_t n = 300;
    std::size_t realizations = 20;
    std::optional<double> c;
    double gamma = 0.0;
    std::size_t window = 21;
    std::size_t bins = 40;
    std::size_t imag_bins = 20;
    bool export_eigenvalues = false;
};

void cmd_spectra(SpectraArgs a, const Globals& g, std::ostream& out) {
    if (a.from_ensemble == !a.input.empty()) {
        throw DomainError("exactly one of --from-ensemble and --input is required");
    }
    std::vector<double> spacings;
    spectra::EigenvalueList all;
    double imag_tol = 1e-9;
    Manifest m = base_manifest("spectra", g);

    if (a.from_ensemble) {
        if (a.n < 2) throw DomainError("--n must be at least 2");
        if (a.realizations < 1) throw DomainError("--realizations must be at least 1");
        if (!a.c) a.c = 10.0 * ensemble::mean_level_spacing(a.n);
        all.source = "ensemble";
        for (std::size_t r = 0; r < a.realizations; ++r) {
            const ensemble::EnsembleParams p{a.n, *a.c, a.gamma, g.seed, r};
            const linalg::Spectrum s = linalg::eigendecompose(ensemble::sample_hamiltonian(p));
            std::vector<double> re;
            for (Eigen::Index i = 0; i < s.size(); ++i) {
                re.push_back(s.eigenvalues(i).real());
                all.values.push_back(s.eigenvalues(i));
            }
            const auto sp = spectra::unfold(re, {a.window, 0.1});
            spacings.insert(spacings.end(), sp.begin(), sp.end());
        }
        imag_tol = 1e-9 * static_cast<double>(a.n) * *a.c;
        m.set("from-ensemble", "true");
        m.set("seed", std::to_string(g.seed));
        m.set("n", std::to_string(a.n));
        m.set("realizations", std::to_string(a.realizations));
        m.set("c", *a.c);
    } else {
        all = spectra::ingest_eigenvalues(a.input);
        std::vector<double> re;
        for (const auto& z : all.values) re.push_back(z.real());
        spacings = spectra::unfold(re, {a.window, 0.1});
        m.set("input", a.input);
    }
    m.set("gamma", a.gamma);
    m.set("window", std::to_string(a.window));
    m.set("bins", std::to_string(a.bins));
    m.set("imag-bins", std::to_string(a.imag_bins));
    m.set("export-eigenvalues", a.export_eigenvalues ? "true" : "false");

    const spectra::Classification cls = spectra::classify_spacings(spacings);
    const spectra::Histogram hist = spectra::spacing_histogram(spacings, a.bins);

    Outputs files(g.out);
    files.add("spacing_histogram.csv", spectra::format_histogram(hist));
    if (a.gamma > 0.0) {
        const spectra::ImagDistribution d = spectra::imag_distribution(all, a.gamma, a.imag_bins, imag_tol);
        files.add("imag_histogram.csv", spectra::format_histogram(d.histogram));
        m.set("result.imag_flagged", std::to_string(d.flagged));
    } else {
        m.set("result.imag_histogram", "skipped (gamma = 0)");
    }
    files.add("classification.txt", spectra::format_classification(cls));
    if (a.export_eigenvalues) files.add("eigenvalues.csv", spectra::format_eigenvalues(all.values));
    m.set("result.label", spectra::to_string(cls.label));
    files.commit(m);
    out << spectra::format_classification(cls);
}

// ------------------------------------------------------------------- orbits

struct OrbitsArgs {
    double radius = 1.0;
    std::optional<double> half_length;
    std::string name;
    std::vector<double> arclengths;
    std::string label = "custom";
};

billiard::StadiumGeometry geometry(const OrbitsArgs& a) {
    billiard::StadiumGeometry g{a.radius, a.half_length.value_or(a.radius)};
    g.validate();
    return g;
}

std::string orbit_row(const billiard::PeriodicOrbit& o) {
    return o.name + ',' + std::to_string(o.bounces.size()) + ',' + format_double(o.length) + ',' +
           format_double(o.dk_star) + ',' + format_double(o.reflection_residual) + '\n';
}

std::string orbit_points(const billiard::PeriodicOrbit& o) {
    std::string csv = "s,x,y\n";
    for (const auto& b : o.bounces) {
        csv += format_double(b.s) + ',' + format_double(b.position.x()) + ',' + format_double(b.position.y()) + '\n';
    }
    return csv;
}

void set_geometry(Manifest& m, const billiard::StadiumGeometry& geo) {
    m.set("radius", geo.radius);
    m.set("half-length", geo.half_length);
}

void cmd_orbits_table(const OrbitsArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    const billiard::StadiumGeometry geo = geometry(a);
    std::vector<billiard::PeriodicOrbit> orbits;
    std::vector<std::string> failures;
    for (const auto& seed : billiard::builtin_orbits(geo)) {
        try {
            orbits.push_back(billiard::resolve_seed(seed, geo));
        } catch (const ConvergenceError& e) {
            failures.push_back(seed.name + ": " + e.what());
        } catch (const GeometryError& e) {
            failures.push_back(seed.name + ": " + e.what());
        }
    }
    if (!failures.empty()) {
        for (const auto& f : failures) err << "orbit failed: " << f << '\n';
        throw ConvergenceError(std::to_string(failures.size()) + " orbit(s) failed to converge");
    }

    std::string table = "name,bounces,length,dk_star,reflection_residual\n";
    Outputs files(g.out);
    for (const auto& o : orbits) {
        table += orbit_row(o);
        files.add("orbit_" + o.name + ".csv", orbit_points(o));
    }
    files.add("orbits.csv", table);
    Manifest m = base_manifest("orbits table", g);
    set_geometry(m, geo);
    files.commit(m);
    out << table;
}

void cmd_orbits_refine(const OrbitsArgs& a, const Globals& g, std::ostream& out) {
    const billiard::StadiumGeometry geo = geometry(a);
    if (a.name.empty() == a.arclengths.empty()) throw DomainError("exactly one of --name and --arclengths is required");

    billiard::OrbitSeed seed;
    if (!a.name.empty()) {
        for (const auto& s : billiard::builtin_orbits(geo))
            if (s.name == a.name) seed = s;
        if (seed.name.empty()) throw DomainError("unknown orbit name " + a.name);
    } else {
        seed.name = a.label;
        seed.arclengths = a.arclengths;
    }
    billiard::PeriodicOrbit o;
    try {
        o = billiard::resolve_seed(seed, geo);
    } catch (const GeometryError& e) {
        throw ConvergenceError(std::string("refinement failed: ") + e.what());
    }

    Manifest m = base_manifest("orbits refine", g);
    set_geometry(m, geo);
    if (!a.name.empty()) {
        m.set("name", a.name);
    } else {
        m.set("arclengths", a.arclengths);
        m.set("label", a.label);
    }
    m.set("result.dk_star", o.dk_star);
    m.set("result.iterations", std::to_string(o.iterations));

    Outputs files(g.out);
    files.add("orbit_" + o.name + ".csv", orbit_points(o));
    files.commit(m);
    out << "name,bounces,length,dk_star,reflection_residual\n" << orbit_row(o);
}

// ------------------------------------------------------------ config layer

bool is_meta_key(const std::string& key) {
    return key == "tool" || key == "version" || key == "timestamp" || key == "command" || key == "config" ||
           key.rfind("result.", 0) == 0;
}

void apply_config(const Manifest& cfg, const std::string& command, CLI::App& root, CLI::App& leaf,
                  const std::set<const CLI::Option*>& given) {
    if (const std::string* c = cfg.find("command"); c && *c != command) {
        throw DomainError("config file is for command '" + *c + "', not '" + command + "'");
    }
    for (const auto& [key, value] : cfg.entries) {
        if (is_meta_key(key)) continue;
        CLI::Option* opt = leaf.get_option_no_throw("--" + key);
        if (!opt) opt = root.get_option_no_throw("--" + key);
        if (!opt) throw DomainError("unknown config key '" + key + "'");
        if (given.count(opt)) continue;
        try {
            opt->clear();
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw DomainError("config key '" + key + "': " + e.what());
        }
    }
}

std::uint64_t parse_seed(std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw DomainError(std::string(seed_env_var) + " is not an unsigned integer: '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace

void Manifest::set(const std::string& key, const std::string& value) {
    for (auto& e : entries) {
        if (e.first == key) {
            e.second = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }

void Manifest::set(const std::string& key, const std::vector<double>& values) { set(key, join(values)); }

const std::string* Manifest::find(const std::string& key) const {
    for (const auto& e : entries)
        if (e.first == key) return &e.second;
    return nullptr;
}

std::string Manifest::format() const {
    std::string out;
    for (const auto& [k, v] : entries) out += k + " = " + v + '\n';
    return out;
}

Manifest Manifest::parse(const std::string& text) {
    Manifest m;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError("empty key", line_no);
        m.set(key, std::string(trim(line.substr(eq + 1))));
    }
    return m;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Opening-induced localization toolkit", "openloc"};
    app.set_version_flag("--version", OPENLOC_VERSION);
    app.require_subcommand(1);

    Globals g;
    auto* out_opt = app.add_option("--out", g.out, "Output directory")->capture_default_str();
    auto* config_opt = app.add_option("--config", g.config, "Key = value file (e.g. a previous manifest)");
    auto* seed_opt = app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    auto* threads_opt = app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
    (void)out_opt;
    (void)config_opt;
    (void)threads_opt;

    auto* two = app.add_subcommand("two-level", "Analytic 2x2 model")->require_subcommand(1)->fallthrough();
    PhaseMapArgs pm;
    auto* pm_cmd = two->add_subcommand("phase-map", "Delocalization factor over (delta_eps, delta_gamma)")->fallthrough();
    pm_cmd->add_option("--eps-min", pm.eps_min)->capture_default_str();
    pm_cmd->add_option("--eps-max", pm.eps_max)->capture_default_str();
    pm_cmd->add_option("--eps-count", pm.eps_count)->capture_default_str();
    pm_cmd->add_option("--gamma-min", pm.gamma_min)->capture_default_str();
    pm_cmd->add_option("--gamma-max", pm.gamma_max)->capture_default_str();
    pm_cmd->add_option("--gamma-count", pm.gamma_count)->capture_default_str();
    pm_cmd->add_option("--fc", pm.fc, "Localization border F_c in (0, 1)")->capture_default_str();

    EncircleArgs en;
    auto* en_cmd = two->add_subcommand("encircle", "Carry the eigenvalues around a loop")->fallthrough();
    en_cmd->add_option("--centre-eps", en.centre_eps)->capture_default_str();
    en_cmd->add_option("--centre-gamma", en.centre_gamma)->capture_default_str();
    en_cmd->add_option("--radius", en.radius)->capture_default_str();
    en_cmd->add_option("--steps", en.steps)->capture_default_str();

    auto* ens = app.add_subcommand("ensemble", "Random non-Hermitian ensemble")->require_subcommand(1)->fallthrough();
    SweepArgs sw;
    auto* sw_cmd = ens->add_subcommand("sweep", "Mean AIPR over a (c, gamma) grid")->fallthrough();
    sw_cmd->add_option("--n", sw.n, "Matrix dimension")->capture_default_str();
    sw_cmd->add_option("--realizations", sw.realizations)->capture_default_str();
    sw_cmd->add_option("--c-values", sw.c_values, "Comma-separated coupling bounds")->delimiter(',');
    sw_cmd->add_option("--gamma-values", sw.gamma_values, "Comma-separated opening strengths")->delimiter(',');
    sw_cmd->add_option("--gamma", sw.gamma, "Single opening strength (one column)");
    sw_cmd->add_flag("--dump-matrices", sw.dump_matrices, "Write realization 0 of every node");

    SpectraArgs sp;
    auto* sp_cmd = app.add_subcommand("spectra", "Spacing and imaginary-part statistics")->fallthrough();
    auto* from_ens = sp_cmd->add_flag("--from-ensemble", sp.from_ensemble, "Sample the random ensemble");
    auto* input = sp_cmd->add_option("--input", sp.input, "Eigenvalue CSV (re,im)");
    from_ens->excludes(input);
    sp_cmd->add_option("--n", sp.n)->capture_default_str();
    sp_cmd->add_option("--realizations", sp.realizations)->capture_default_str();
    sp_cmd->add_option("--c", sp.c, "Coupling bound (default 10 mean spacings)");
    sp_cmd->add_option("--gamma", sp.gamma, "Opening strength, also the imaginary-part scale")->capture_default_str();
    sp_cmd->add_option("--window", sp.window, "Unfolding window (odd)")->capture_default_str();
    sp_cmd->add_option("--bins", sp.bins)->capture_default_str();
    sp_cmd->add_option("--imag-bins", sp.imag_bins)->capture_default_str();
    sp_cmd->add_flag("--export-eigenvalues", sp.export_eigenvalues, "Also write eigenvalues.csv");

    auto* orb = app.add_subcommand("orbits", "Stadium periodic orbits")->require_subcommand(1)->fallthrough();
    OrbitsArgs oa;
    auto* table_cmd = orb->add_subcommand("table", "Refine all builtin orbits")->fallthrough();
    auto* refine_cmd = orb->add_subcommand("refine", "Refine one orbit")->fallthrough();
    for (auto* c : {table_cmd, refine_cmd}) {
        c->add_option("--radius", oa.radius)->capture_default_str();
        c->add_option("--half-length", oa.half_length, "Half length of the straight walls (default: radius)");
    }
    refine_cmd->add_option("--name", oa.name, "Builtin orbit name");
    refine_cmd->add_option("--arclengths", oa.arclengths, "Comma-separated bounce arclengths")->delimiter(',');
    refine_cmd->add_option("--label", oa.label)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    CLI::App* leaf = pm_cmd->parsed()       ? pm_cmd
                     : en_cmd->parsed()     ? en_cmd
                     : sw_cmd->parsed()     ? sw_cmd
                     : sp_cmd->parsed()     ? sp_cmd
                     : table_cmd->parsed()  ? table_cmd
                                            : refine_cmd;
    const std::string command = leaf == pm_cmd      ? "two-level phase-map"
                                : leaf == en_cmd    ? "two-level encircle"
                                : leaf == sw_cmd    ? "ensemble sweep"
                                : leaf == sp_cmd    ? "spectra"
                                : leaf == table_cmd ? "orbits table"
                                                    : "orbits refine";

    try {
        std::set<const CLI::Option*> given;
        for (const CLI::App* a : {static_cast<const CLI::App*>(&app), static_cast<const CLI::App*>(leaf)}) {
            for (const CLI::Option* o : a->get_options())
                if (o->count() > 0) given.insert(o);
        }
        if (!g.config.empty()) {
            std::string text;
            try {
                text = detail::read_file(g.config);
            } catch (const IoError&) {
                throw IoError("cannot read config file " + g.config);
            }
            apply_config(Manifest::parse(text), command, app, *leaf, given);
        }
        if (!given.count(seed_opt)) {
            if (const char* env = std::getenv(seed_env_var); env && *env) g.seed = parse_seed(env);
        }

        if (leaf == pm_cmd) cmd_phase_map(pm, g, out);
        else if (leaf == en_cmd) cmd_encircle(en, g, out);
        else if (leaf == sw_cmd) cmd_sweep(sw, g, out);
        else if (leaf == sp_cmd) cmd_spectra(sp, g, out);
        else if (leaf == table_cmd) cmd_orbits_table(oa, g, out, err);
        else cmd_orbits_refine(oa, g, out);
        return exit_ok;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_nonconvergence;
    } catch (const StepRefinementError& e) {
        err << "error: " << e.what() << '\n';
        return exit_nonconvergence;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

}  // namespace openloc::cli
