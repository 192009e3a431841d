#include "cli.hpp"

#include "csv.hpp"

#include <treelike/expdesign.hpp>
#include <treelike/geometry.hpp>
#include <treelike/lightcone.hpp>
#include <treelike/magnon.hpp>
#include <treelike/quantum/entanglement.hpp>
#include <treelike/quantum/levels.hpp>
#include <treelike/quantum/otoc.hpp>
#include <treelike/semiclassical.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

namespace treelike::tools {
namespace {

namespace fs = std::filesystem;

/// Options echoed into provenance headers are every long option of the
/// subcommand except these.
const std::set<std::string> unrecorded = {"config", "out", "threads", "help"};

struct ModelArgs {
    std::size_t n = 16;
    double s = 0.0;
    double j0 = 1.0;
    std::string boundary = "periodic";

    CouplingModel model() const { return CouplingModel(n, s, j0, boundary_from_string(boundary)); }
    CouplingModel model(std::size_t n_sites, double s_value) const
    {
        return CouplingModel(n_sites, s_value, j0, boundary_from_string(boundary));
    }
};

struct Common {
    std::string out = ".";
    std::size_t threads = 0;
    std::string config;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--out", c.out, "Output directory");
    app->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
    app->add_option("--config", c.config, "key=value configuration file; flags override");
}

void add_model(CLI::App* app, ModelArgs& m, std::size_t default_n)
{
    m.n = default_n;
    app->add_option("--n", m.n, "Number of sites");
    app->add_option("--s", m.s, "Coupling exponent s");
    app->add_option("--j0", m.j0, "Largest coupling");
    app->add_option("--boundary", m.boundary, "periodic or open")->check(CLI::IsMember({"periodic", "open"}));
}

std::string joined(const std::vector<std::string>& parts)
{
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? "," : "") + parts[k];
    return out;
}

/// Provenance of a parsed subcommand: its name and the value of every
/// recorded option, given or defaulted.
Provenance provenance_of(const CLI::App* app)
{
    Provenance p;
    p.add("command", app->get_name());
    for (const CLI::Option* opt : app->get_options()) {
        const std::string name = opt->get_single_name();
        if (opt->get_lnames().empty() || unrecorded.contains(name)) continue;
        const auto results = opt->results();
        std::string value = results.empty() ? opt->get_default_str() : joined(results);
        if (value.empty()) continue;
        p.add(name, value);
    }
    return p;
}

std::vector<double> time_grid(double tmax, double dt)
{
    if (!(dt > 0.0) || !(tmax >= 0.0)) throw std::invalid_argument("time grid: need dt > 0 and tmax >= 0");
    return make_time_grid(tmax, dt);
}

std::string s_label(double s)
{
    std::string t = format_number(s);
    for (auto& ch : t) {
        if (ch == '-') ch = 'm';
        if (ch == '.') ch = 'p';
    }
    return t;
}

// ---------------------------------------------------------------- graph

void run_graph(const ModelArgs& m, const Common& c, const Provenance& prov, std::ostream& out)
{
    const auto model = m.model();
    const auto dist = graph_distance_matrix(model);
    const std::size_t n = model.n_sites();
    CsvWriter w(fs::path(c.out) / "graph.csv", prov, {"i", "j", "coupling", "d_arch", "d_2adic", "d_graph"});
    std::size_t edges = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double cij = model.coupling(i, j);
            if (cij != 0.0) ++edges;
            w.row(i, j, cij, model.archimedean_distance(i, j), two_adic_norm(model, i, j), dist[i * n + j]);
        }
    }
    out << "edges " << edges << "\n" << w.path().string() << "\n";
}

// ---------------------------------------------------------------- magnon

struct MagnonArgs {
    long source = -1;
    double tmax = 50.0;
    double dt = 0.02;
    double epsilon = 0.0;
    std::string order = "physical";
};

void write_thresholds(const fs::path& path, const Provenance& prov, const CouplingModel& model, std::size_t source,
                      const ThresholdTimes& tt)
{
    CsvWriter w(path, prov, {"j", "d_arch", "d_graph", "d_monna", "t_eps"});
    const auto dist = graph_distances_from(model, source);
    for (std::size_t j = 0; j < model.n_sites(); ++j) {
        const std::size_t d = model.archimedean_distance(source, j);
        const bool monna_ok = is_power_of_two(model.n_sites());
        w.row(j, d, dist[j], monna_ok ? format_cell(monna_map(model.n_sites(), d)) : std::string("nan"), tt.t_eps[j]);
    }
}

void run_magnon(const ModelArgs& m, const MagnonArgs& a, const Common& c, const Provenance& prov, std::ostream& out)
{
    const auto model = m.model();
    const std::size_t n = model.n_sites();
    const std::size_t source = a.source < 0 ? n / 2 : static_cast<std::size_t>(a.source);
    if (source >= n) throw std::invalid_argument("source site out of range (0 <= source < N)");
    if (a.order != "physical" && a.order != "monna") throw std::invalid_argument("order must be physical or monna");
    const double eps = a.epsilon > 0.0 ? a.epsilon : 1.0 / static_cast<double>(n * n);
    const auto ev = evolve_magnon(model, source, time_grid(a.tmax, a.dt));
    const auto tt = threshold_times(model, ev, eps);
    const auto shown = a.order == "monna" ? monna_reordered(ev) : ev;

    CsvWriter w(fs::path(c.out) / "magnon_occupation.csv", prov, {"t", "j", "occupation"});
    for (std::size_t k = 0; k < shown.times.size(); ++k) {
        for (std::size_t j = 0; j < n; ++j) w.row(shown.times[k], j, shown.at(k, j));
    }
    write_thresholds(fs::path(c.out) / "magnon_thresholds.csv", prov, model, source, tt);
    out << "max_norm_drift " << format_number(ev.max_norm_drift) << "\nunreached " << tt.unreached_count() << "\n"
        << w.path().string() << "\n" << (fs::path(c.out) / "magnon_thresholds.csv").string() << "\n";
}

// ---------------------------------------------------------------- lightcone

struct LightconeArgs {
    std::vector<std::string> inputs;
    std::vector<double> s_grid;
    double tmax = 50.0;
    double dt = 0.02;
    double epsilon = 0.0;
    std::string distance = "natural";
};

DistanceKind pick_kind(const std::string& name, double s)
{
    if (name == "natural") return natural_distance_kind(s);
    if (name == "physical") return DistanceKind::Physical;
    if (name == "monna") return DistanceKind::Monna;
    throw std::invalid_argument("distance must be natural, physical or monna");
}

void write_fit_row(CsvWriter& w, const BoundFit& f)
{
    w.row(f.s, to_string(f.distance_kind), f.a, f.b, f.a_u, f.b_u, f.c_u, f.lower_residual, f.upper_residual, f.feasible, f.unreached);
}

const std::vector<std::string> fit_columns = {"s", "distance", "a", "b", "a_u", "b_u", "c_u", "lower_residual", "upper_residual",
                                              "feasible", "unreached"};

void run_lightcone(const ModelArgs& m, const LightconeArgs& a, const Common& c, const Provenance& prov, std::ostream& out)
{
    if (a.inputs.empty() == a.s_grid.empty()) throw std::invalid_argument("lightcone: give exactly one of --input or --s-grid");
    CsvWriter w(fs::path(c.out) / "lightcone.csv", prov, fit_columns);
    if (!a.inputs.empty()) {
        for (const auto& path : a.inputs) {
            const auto t = read_csv(path);
            if (!t.provenance.contains("s")) throw std::invalid_argument("lightcone: input lacks s in its provenance header");
            const double s = std::stod(t.provenance.at("s"));
            const auto kind = pick_kind(a.distance, s);
            const std::size_t col_d = t.column(kind == DistanceKind::Monna ? "d_monna" : "d_arch");
            const std::size_t col_t = t.column("t_eps");
            ThresholdProfile prof;
            for (const auto& row : t.rows) {
                const double d = std::stod(row[col_d]);
                const double te = std::stod(row[col_t]);
                if (d == 0.0) continue;
                if (std::isnan(te)) ++prof.unreached;
                else prof.points.push_back({d, te});
            }
            const auto f = fit_bounds(prof, s, kind);
            write_fit_row(w, f);
        }
    } else {
        LightconeOptions opt;
        opt.tmax = a.tmax;
        opt.dt = a.dt;
        opt.epsilon = a.epsilon;
        for (double s : a.s_grid) write_fit_row(w, lightcone_fit(m.model(m.n, s), pick_kind(a.distance, s), opt));
    }
    out << w.path().string() << "\n";
}

// ---------------------------------------------------------------- quench-ee

struct QuenchArgs {
    double tmax = 4.0;
    double dt = 0.25;
    std::vector<std::size_t> lengths;
    std::vector<std::string> families = {"archimedean", "two_adic", "all"};
    std::string symmetry = "none";
};

quantum::PartitionFamily family_from_string(const std::string& f)
{
    if (f == "archimedean") return quantum::PartitionFamily::Archimedean;
    if (f == "two_adic") return quantum::PartitionFamily::TwoAdic;
    if (f == "all") return quantum::PartitionFamily::All;
    throw std::invalid_argument("partition family must be archimedean, two_adic or all");
}

void run_quench(const ModelArgs& m, const QuenchArgs& a, const Common& c, const Provenance& prov, std::ostream& out)
{
    const auto model = m.model();
    std::vector<quantum::PartitionRequest> req;
    const auto lengths = a.lengths.empty() ? std::vector<std::size_t>{model.n_sites() / 2} : a.lengths;
    for (auto L : lengths) {
        for (const auto& f : a.families) req.push_back({L, family_from_string(f)});
    }
    quantum::QuenchOptions opt;
    opt.threads = c.threads;
    if (a.symmetry == "dihedral") opt.symmetry = quantum::PartitionSymmetry::Dihedral;
    else if (a.symmetry != "none") throw std::invalid_argument("symmetry must be none or dihedral");
    const auto res = quantum::quench_entanglement(model, time_grid(a.tmax, a.dt), req, opt);
    CsvWriter w(fs::path(c.out) / "quench_ee.csv", prov, {"t", "L", "kind", "S_A", "subset"});
    for (const auto& r : res.rows) w.row(r.time, r.length, to_string(r.family), r.entropy, static_cast<unsigned long>(r.subset));
    out << "max_norm_drift " << format_number(res.max_norm_drift) << "\nmax_energy_drift " << format_number(res.max_energy_drift)
        << "\nmax_magnetization_drift " << format_number(res.max_magnetization_drift) << "\n" << w.path().string() << "\n";
}

// ---------------------------------------------------------------- otoc-ed

struct OtocArgs {
    std::vector<std::string> pairs;
    double tmax = 4.0;
    double dt = 0.1;
    std::string method = "auto";
    std::size_t vectors = 32;
    std::uint64_t seed = 12345;
    std::string ensemble = "infinite-half";
};

std::vector<quantum::SitePair> parse_pairs(const std::vector<std::string>& items, std::size_t n)
{
    std::vector<quantum::SitePair> out;
    if (items.empty()) {
        for (std::size_t j = 1; j < n; ++j) out.push_back({0, j});
        return out;
    }
    for (const auto& it : items) {
        const auto colon = it.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("pair must be i:j, got '" + it + "'");
        out.push_back({std::stoul(it.substr(0, colon)), std::stoul(it.substr(colon + 1))});
    }
    return out;
}

void run_otoc(const ModelArgs& m, const OtocArgs& a, const Common& c, const Provenance& prov, std::ostream& out)
{
    const auto model = m.model();
    quantum::OtocOptions opt;
    opt.ensemble = quantum::otoc_ensemble_from_string(a.ensemble);
    opt.threads = c.threads;
    opt.seed = a.seed;
    opt.typicality_vectors = a.vectors;
    if (a.method == "exact") opt.method = quantum::OtocMethod::ExactTrace;
    else if (a.method == "typicality") opt.method = quantum::OtocMethod::Typicality;
    else if (a.method != "auto") throw std::invalid_argument("method must be auto, exact or typicality");
    const auto curves = quantum::otoc(model, parse_pairs(a.pairs, model.n_sites()), time_grid(a.tmax, a.dt), opt);
    CsvWriter w(fs::path(c.out) / "otoc.csv", prov, {"t", "i", "j", "r_ij", "C", "stderr"});
    for (const auto& cv : curves) {
        for (std::size_t k = 0; k < cv.times.size(); ++k)
            w.row(cv.times[k], cv.pair.i, cv.pair.j, cv.graph_distance, cv.values[k], cv.standard_error[k]);
    }
    out << w.path().string() << "\n";
}

// ---------------------------------------------------------------- levels

struct LevelArgs {
    long magnons = -1;
    std::size_t bins = 40;
    double edge_fraction = 0.1;
    bool parity_blocks = true;
};

void run_levels(const ModelArgs& m, const LevelArgs& a, const Common& c, const Provenance& prov, std::ostream& out)
{
    const auto model = m.model();
    quantum::LevelOptions opt;
    opt.bins = a.bins;
    opt.edge_fraction = a.edge_fraction;
    opt.resolve_parities = a.parity_blocks;
    opt.threads = c.threads;
    if (!(a.edge_fraction >= 0.0 && a.edge_fraction < 0.5)) throw std::invalid_argument("edge-fraction must lie in [0, 0.5)");
    const std::size_t magnons = a.magnons < 0 ? model.n_sites() / 2 : static_cast<std::size_t>(a.magnons);
    const auto data = quantum::level_statistics(model, magnons, opt);
    const double width = opt.max_spacing / static_cast<double>(opt.bins);
    const double total = static_cast<double>(data.spacings.size());
    CsvWriter w(fs::path(c.out) / "levels.csv", prov, {"spacing", "count", "density", "wigner_dyson", "poisson"});
    for (const auto& b : data.histogram)
        w.row(b.center, b.count, static_cast<double>(b.count) / (total * width), quantum::wigner_dyson_pdf(b.center), std::exp(-b.center));
    CsvWriter ks(fs::path(c.out) / "levels_ks.csv", prov, {"reference", "ks_distance", "spacings"});
    ks.row(std::string("wigner_dyson"), data.ks_wigner_dyson, data.spacings.size());
    ks.row(std::string("poisson"), data.ks_poisson, data.spacings.size());
    out << "ks_wigner_dyson " << format_number(data.ks_wigner_dyson) << "\nks_poisson " << format_number(data.ks_poisson) << "\n"
        << w.path().string() << "\n" << ks.path().string() << "\n";
}

// ---------------------------------------------------------------- semiclassical

struct SemiclassicalArgs {
    std::vector<std::size_t> sizes = {64};
    std::size_t traj = 256;
    double phi = 1e-4;
    double tmax = 8.5;
    double dt = 0.005;
    std::size_t record_every = 10;
    std::uint64_t seed = 20190101;
};

void run_semiclassical(const ModelArgs& m, const SemiclassicalArgs& a, const Common& c, const Provenance& prov, std::ostream& out)
{
    SensitivityOptions opt;
    opt.trajectories = a.traj;
    opt.phi = a.phi;
    opt.tmax = a.tmax;
    opt.dt = a.dt;
    opt.record_every = a.record_every;
    opt.seed = a.seed;
    opt.threads = c.threads;
    CsvWriter curve(fs::path(c.out) / "semiclassical_curve.csv", prov, {"N", "t", "r", "C_cl", "stderr"});
    CsvWriter fit(fs::path(c.out) / "semiclassical_fit.csv", prov, {"N", "lambda", "lambda_stderr", "t_star", "lambda_t_star", "valid"});
    std::vector<ScramblingPoint> points;
    for (auto n : a.sizes) {
        const auto cv = run_sensitivity(m.model(n, m.s), opt);
        for (std::size_t r = 0; r <= cv.max_distance(); ++r) {
            for (std::size_t k = 0; k < cv.times.size(); ++k) curve.row(n, cv.times[k], r, cv.values[r][k], cv.standard_error[r][k]);
        }
        const auto p = fit_lyapunov(cv);
        points.push_back(p);
        fit.row(n, p.lambda, p.lambda_stderr, p.t_star, p.lambda_t_star(), p.valid);
        out << "N=" << n << " lambda=" << format_number(p.lambda) << " t_star=" << format_number(p.t_star)
            << " max_norm_error=" << format_number(cv.max_norm_error) << " max_energy_drift=" << format_number(cv.max_energy_drift)
            << " max_magnetization_drift=" << format_number(cv.max_magnetization_drift) << "\n";
    }
    std::size_t valid = 0;
    for (const auto& p : points) valid += p.valid ? 1 : 0;
    if (valid >= 2) {
        const auto g = fit_scrambling(points);
        out << "{ alpha: " << format_number(g.alpha) << ", alpha_stderr: " << format_number(g.alpha_stderr)
            << ", beta: " << format_number(g.beta) << ", beta_stderr: " << format_number(g.beta_stderr) << " }\n";
    }
    out << curve.path().string() << "\n" << fit.path().string() << "\n";
}

// ---------------------------------------------------------------- expdesign

struct ExpArgs {
    std::size_t n = 1024;
    double eta = 1.0;
    double atoms = 300.0;
    double beta = 0.0;
    double kappa = 1.0;
    double gamma = 1.0;
    double delta = 0.0;
    double s = 0.0;
    std::size_t samples = 4096;
    double margin = 0.0;
};

void run_expdesign(const ExpArgs& a, const Common& c, const Provenance& prov, std::ostream& out, std::ostream& err)
{
    CavityParams p;
    p.n_sites = a.n;
    p.eta = a.eta;
    p.atoms_per_site = a.atoms;
    p.beta = a.beta;
    p.kappa = a.kappa;
    p.gamma_atom = a.gamma;
    p.delta = a.delta;
    for (const auto& warning : validate(p)) err << "warning: " << warning << "\n";
    const double beta = effective_beta(p);
    const double dk = p.delta > 0.0 ? p.delta / p.kappa : optimal_detuning(p);

    CsvWriter coop(fs::path(c.out) / "expdesign_cooperativity.csv", prov, {"beta", "N", "required_n_eta"});
    for (const auto& r : cooperativity_table()) coop.row(r.beta, r.n_sites, r.required_n_eta);

    const CouplingModel model(a.n, a.s);
    const auto wf = modulation_waveform(model, a.samples, beta, a.margin);
    CsvWriter wave(fs::path(c.out) / "expdesign_waveform.csv", prov, {"t", "amplitude", "naive_amplitude"});
    for (std::size_t q = 0; q < wf.phase.size(); ++q) wave.row(wf.phase[q] / (2.0 * std::numbers::pi), wf.exact[q], wf.naive[q]);

    CsvWriter decay(fs::path(c.out) / "expdesign_decay.csv", prov, {"k_index", "k", "E_k", "gamma_plus", "gamma_minus"});
    for (const auto& r : collective_decay_table(model, 1.0 / dk)) decay.row(r.k_index, r.k, r.energy, r.gamma_plus, r.gamma_minus);

    out << "beta " << format_number(beta) << "\ndelta_over_kappa " << format_number(dk) << "\nrho "
        << format_number(interaction_to_decay(p)) << "\nrequired_n_eta " << format_number(required_cooperativity(a.n, beta))
        << "\nrequired_n_eta_optimal_beta " << format_number(required_cooperativity_optimal(a.n)) << "\nspurious_harmonics_exact "
        << format_number(spurious_harmonic_ratio(power_harmonics(wf.exact))) << "\nspurious_harmonics_naive "
        << format_number(spurious_harmonic_ratio(power_harmonics(wf.naive))) << "\n"
        << coop.path().string() << "\n" << wave.path().string() << "\n" << decay.path().string() << "\n";
}

// ---------------------------------------------------------------- reproduce

struct ReproduceArgs {
    std::string figure;
    std::size_t n = 0;
    std::size_t traj = 256;
};

void reproduce(const ReproduceArgs& a, const Common& c, const Provenance& prov, std::ostream& out, std::ostream& err)
{
    if (a.figure == "fig2") {
        const std::size_t n = a.n ? a.n : 128;
        CsvWriter w(fs::path(c.out) / "fig2_lightcone.csv", prov, fit_columns);
        for (double s : {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0}) {
            const CouplingModel model(n, s);
            const auto tt = simulate_thresholds(model);
            Provenance p = prov;
            p.add("s", format_number(s));
            write_thresholds(fs::path(c.out) / ("fig2_thresholds_s" + s_label(s) + ".csv"), p, model, n / 2, tt);
            write_fit_row(w, fit_bounds(threshold_profile(model, n / 2, tt, natural_distance_kind(s)), s, natural_distance_kind(s)));
            if (s > 0.0) {
                write_fit_row(w, fit_bounds(threshold_profile(model, n / 2, tt, DistanceKind::Physical), s, DistanceKind::Physical));
            }
        }
        out << w.path().string() << "\n";
    } else if (a.figure == "fig3") {
        const std::size_t n = a.n ? a.n : 12;
        CsvWriter w(fs::path(c.out) / "fig3_entanglement.csv", prov, {"s", "t", "L", "kind", "S_A"});
        quantum::QuenchOptions opt;
        opt.threads = c.threads;
        opt.symmetry = quantum::PartitionSymmetry::Dihedral;
        const auto times = make_time_grid(4.0, 0.25);
        for (double s : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            const auto res = quantum::quench_entanglement(
                CouplingModel(n, s), times,
                {{n / 2, quantum::PartitionFamily::Archimedean}, {n / 2, quantum::PartitionFamily::TwoAdic}, {n / 2, quantum::PartitionFamily::All}},
                opt);
            for (const auto& r : res.rows) w.row(s, r.time, r.length, to_string(r.family), r.entropy);
        }
        out << w.path().string() << "\n";
    } else if (a.figure == "fig4") {
        SemiclassicalArgs sa;
        sa.sizes = {64, 128, 256, 512, 1024};
        sa.traj = a.traj;
        ModelArgs m;
        run_semiclassical(m, sa, c, prov, out);
    } else if (a.figure == "figS2") {
        ExpArgs ea;
        run_expdesign(ea, c, prov, out, err);
    } else if (a.figure == "figS3") {
        ModelArgs m;
        m.n = a.n ? a.n : 16;
        run_levels(m, LevelArgs{}, c, prov, out);
    } else {
        throw std::invalid_argument("figure must be fig2, fig3, fig4, figS2 or figS3");
    }
}

/// Appends --key=value for config entries not already given on the command line.
/// A .csv output file contributes its provenance header.
std::vector<std::string> apply_config(std::vector<std::string> args)
{
    std::string path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
        else if (args[k].starts_with("--config=")) path = args[k].substr(9);
    }
    if (path.empty()) return args;
    const auto pairs = fs::path(path).extension() == ".csv" ? read_csv(path).provenance : parse_key_values(read_file(path));
    for (const auto& [key, value] : pairs) {
        if (key == "command") continue;
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args) given = given || a == flag || a.starts_with(flag + "=");
        if (!given) args.push_back(flag + "=" + value);
    }
    return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Treelike interactions: couplings, magnons, light cones, exact dynamics, semiclassics, cavity design", "treelike"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    Common common;
    std::map<std::string, ModelArgs> models;
    MagnonArgs magnon;
    LightconeArgs lc;
    QuenchArgs quench;
    OtocArgs otoc;
    LevelArgs levels;
    SemiclassicalArgs sc;
    ExpArgs exp;
    ReproduceArgs rep;

    auto* graph = app.add_subcommand("graph", "Edge list and distances");
    add_model(graph, models["graph"], 8);
    add_common(graph, common);

    auto* mg = app.add_subcommand("magnon", "Single-magnon propagation and threshold times");
    add_model(mg, models["magnon"], 16);
    add_common(mg, common);
    mg->add_option("--source", magnon.source, "Initial site (default N/2)");
    mg->add_option("--tmax", magnon.tmax);
    mg->add_option("--dt", magnon.dt);
    mg->add_option("--epsilon", magnon.epsilon, "Threshold (<= 0 selects 1/N^2)");
    mg->add_option("--order", magnon.order, "physical or monna column order")->check(CLI::IsMember({"physical", "monna"}));

    auto* lcs = app.add_subcommand("lightcone", "Light-cone bound fits");
    add_model(lcs, models["lightcone"], 128);
    add_common(lcs, common);
    lcs->add_option("--input", lc.inputs, "magnon_thresholds.csv files")->delimiter(',');
    lcs->add_option("--s-grid", lc.s_grid, "Values of s to simulate")->delimiter(',');
    lcs->add_option("--tmax", lc.tmax);
    lcs->add_option("--dt", lc.dt);
    lcs->add_option("--epsilon", lc.epsilon);
    lcs->add_option("--distance", lc.distance, "natural, physical or monna")->check(CLI::IsMember({"natural", "physical", "monna"}));

    auto* qe = app.add_subcommand("quench-ee", "Entanglement after a quench from the x-polarized state");
    add_model(qe, models["quench-ee"], 12);
    add_common(qe, common);
    qe->add_option("--tmax", quench.tmax);
    qe->add_option("--dt", quench.dt);
    qe->add_option("--lengths", quench.lengths, "Subsystem sizes (default N/2)")->delimiter(',');
    qe->add_option("--families", quench.families, "archimedean, two_adic, all")->delimiter(',');
    qe->add_option("--symmetry", quench.symmetry, "none or dihedral")->check(CLI::IsMember({"none", "dihedral"}));

    auto* ot = app.add_subcommand("otoc-ed", "Infinite-temperature OTOCs by exact dynamics");
    add_model(ot, models["otoc-ed"], 12);
    add_common(ot, common);
    ot->add_option("--pairs", otoc.pairs, "Site pairs i:j (default 0:j for all j)")->delimiter(',');
    ot->add_option("--tmax", otoc.tmax);
    ot->add_option("--dt", otoc.dt);
    ot->add_option("--method", otoc.method)->check(CLI::IsMember({"auto", "exact", "typicality"}));
    ot->add_option("--vectors", otoc.vectors, "Typicality vectors");
    ot->add_option("--seed", otoc.seed);
    ot->add_option("--ensemble", otoc.ensemble);

    auto* lv = app.add_subcommand("levels", "Level-spacing statistics");
    add_model(lv, models["levels"], 16);
    add_common(lv, common);
    lv->add_option("--magnons", levels.magnons, "Magnon number (default N/2)");
    lv->add_option("--bins", levels.bins);
    lv->add_option("--edge-fraction", levels.edge_fraction);
    lv->add_option("--parity-blocks", levels.parity_blocks, "Split spin-flip and reflection parities");

    auto* scs = app.add_subcommand("semiclassical", "Classical sensitivity and scrambling fit");
    scs->add_option("--n", sc.sizes, "System sizes")->delimiter(',');
    scs->add_option("--s", models["semiclassical"].s);
    scs->add_option("--j0", models["semiclassical"].j0);
    add_common(scs, common);
    scs->add_option("--traj", sc.traj, "Trajectories");
    scs->add_option("--phi", sc.phi, "Perturbing rotation");
    scs->add_option("--tmax", sc.tmax);
    scs->add_option("--dt", sc.dt);
    scs->add_option("--record-every", sc.record_every, "Steps between samples");
    scs->add_option("--seed", sc.seed);

    auto* ex = app.add_subcommand("expdesign", "Cavity implementation budget");
    add_common(ex, common);
    ex->add_option("--n", exp.n);
    ex->add_option("--eta", exp.eta);
    ex->add_option("--atoms", exp.atoms);
    ex->add_option("--beta", exp.beta, "Modulation index (<= 0 selects 2 M beta^2 = 1)");
    ex->add_option("--kappa", exp.kappa);
    ex->add_option("--gamma", exp.gamma);
    ex->add_option("--delta", exp.delta, "Raman detuning (<= 0 selects the optimum)");
    ex->add_option("--s", exp.s, "Coupling exponent of the waveform");
    ex->add_option("--samples", exp.samples);
    ex->add_option("--margin", exp.margin);

    auto* rp = app.add_subcommand("reproduce", "Desk-scale recipe for a figure");
    add_common(rp, common);
    rp->add_option("figure", rep.figure, "fig2, fig3, fig4, figS2 or figS3")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4", "figS2", "figS3"}));
    rp->add_option("--n", rep.n, "System size override (0 = recipe default)");
    rp->add_option("--traj", rep.traj, "Trajectories for fig4");

    std::vector<std::string> args;
    try {
        args = apply_config(raw_args);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return UsageError;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        for (const auto* sub : app.get_subcommands()) err << sub->help();
        if (app.get_subcommands().empty()) err << app.help();
        return UsageError;
    }

    CLI::App* sub = app.get_subcommands().front();
    const Provenance prov = provenance_of(sub);
    try {
        const std::string name = sub->get_name();
        const ModelArgs& model = models[name];
        if (name == "graph") run_graph(model, common, prov, out);
        else if (name == "magnon") run_magnon(model, magnon, common, prov, out);
        else if (name == "lightcone") run_lightcone(model, lc, common, prov, out);
        else if (name == "quench-ee") run_quench(model, quench, common, prov, out);
        else if (name == "otoc-ed") run_otoc(model, otoc, common, prov, out);
        else if (name == "levels") run_levels(model, levels, common, prov, out);
        else if (name == "semiclassical") run_semiclassical(model, sc, common, prov, out);
        else if (name == "expdesign") run_expdesign(exp, common, prov, out, err);
        else if (name == "reproduce") reproduce(rep, common, prov, out, err);
    } catch (const std::invalid_argument& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return UsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return RuntimeFailure;
    }
    return Success;
}

}  // namespace treelike::tools
