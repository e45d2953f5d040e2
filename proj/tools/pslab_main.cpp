#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pslab/chain.hpp"
#include "pslab/inversion.hpp"
#include "pslab/kepler.hpp"
#include "pslab/lindstedt.hpp"
#include "pslab/serialize.hpp"
#include "pslab/summation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// All numeric output with 15 significant digits.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

struct Output {
    fs::path dir;
    std::string format;  // csv | json

    fs::path table_path(const std::string& stem) const { return dir / (stem + "." + format); }

    void write(const fs::path& p, const std::string& content) const {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << content;
    }

    void emit_table(const std::string& stem, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) const {
        if (format == "csv") {
            std::ostringstream os;
            for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
            os << "\n";
            for (const auto& row : rows) {
                for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
                os << "\n";
            }
            write(table_path(stem), os.str());
        } else {
            json arr = json::array();
            for (const auto& row : rows) {
                json obj;
                for (std::size_t i = 0; i < header.size() && i < row.size(); ++i) obj[header[i]] = row[i];
                arr.push_back(obj);
            }
            write(table_path(stem), arr.dump(2) + "\n");
        }
    }

    void emit_json(const std::string& stem, const json& j) const { write(dir / (stem + ".json"), j.dump(2) + "\n"); }
};

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

void write_manifest(const Output& out, const std::string& subcommand, const json& params,
                    const std::vector<std::string>& argv_tail) {
    json m;
    m["subcommand"] = subcommand;
    m["params"] = params;
    m["out"] = out.dir.string();
    m["format"] = out.format;
    m["argv"] = argv_tail;
    out.emit_json("manifest", m);
}

// ---------------------------------------------------------------- string ---

int run_string(const Output& out, const std::string& datum, const std::string& udatum,
               const std::string& meshes_s, double t, int continuum_modes,
               const std::vector<std::string>& argv_tail) {
    pslab::ChainConfig cfg;
    const auto meshes = parse_int_list(meshes_s);
    if (meshes.empty()) throw CLI::ValidationError("--meshes must list at least one mesh");
    cfg.segments = meshes.back();

    const auto Z = pslab::make_named_profile(datum, cfg.length);
    const auto U = pslab::make_named_profile(udatum, cfg.length);

    // mode table for the finest mesh: closed form vs eigensolve
    const auto brute = pslab::tridiagonal_frequencies(cfg);
    std::vector<std::vector<std::string>> mode_rows;
    for (int h = 1; h <= cfg.mode_count(); ++h)
        mode_rows.push_back({std::to_string(h), fmt(pslab::closed_form_frequency(cfg, h)), fmt(brute[h - 1])});
    out.emit_table("modes", {"h", "omega_closed_form", "omega_eigensolve"}, mode_rows);

    // snapshot of the modal state at time t on the finest mesh
    const auto dec = pslab::project_initial_data(Z, U, cfg);
    const auto state = pslab::evolve_modal(dec, cfg, t);
    std::vector<std::vector<std::string>> state_rows;
    for (int i = 0; i <= cfg.segments; ++i)
        state_rows.push_back({std::to_string(i), fmt(i * cfg.delta()), fmt(state.displacement[i]), fmt(state.velocity[i])});
    out.emit_table("state", {"site", "x", "displacement", "velocity"}, state_rows);

    // mesh convergence against the continuum solution
    std::vector<double> grid;
    for (int i = 0; i <= 256; ++i) grid.push_back(cfg.length * i / 256.0);
    const auto study = pslab::convergence_study(Z, U, meshes, t, grid, cfg, continuum_modes);
    std::vector<std::vector<std::string>> conv_rows;
    for (std::size_t i = 0; i < study.meshes.size(); ++i)
        conv_rows.push_back({std::to_string(study.meshes[i]), fmt(study.deltas[i]), fmt(study.sup_errors[i])});
    out.emit_table("convergence", {"m", "delta", "sup_error"}, conv_rows);

    std::cout << "fitted convergence order: " << fmt(study.fitted_order)
              << (study.all_zero ? " (all errors zero)" : "") << "\n";

    json params = {{"datum", datum}, {"udatum", udatum}, {"meshes", meshes_s}, {"t", t}, {"H", continuum_modes}};
    write_manifest(out, "string", params, argv_tail);
    return 0;
}

// ---------------------------------------------------------------- kepler ---

int run_kepler_limit(const Output& out, double tol, const std::vector<std::string>& argv_tail) {
    const double r = pslab::laplace_limit(tol);
    std::cout << "laplace_limit = " << fmt(r) << "\n";
    out.emit_table("limit", {"laplace_limit", "eta_modulus_at_i_rstar"},
                   {{fmt(r), fmt(pslab::eta_modulus_at_imaginary(r))}});
    write_manifest(out, "kepler-limit", {{"tol", tol}}, argv_tail);
    return 0;
}

int run_kepler_compare(const Output& out, double e, double l, int K, int N,
                       const std::vector<std::string>& argv_tail) {
    if (!(e >= 0.0 && e < 1.0)) throw CLI::ValidationError("--e must lie in [0,1)");
    const double xi = pslab::newton_solve(e, l, 1e-15);

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"newton", "-", fmt(xi), "0"});

    const auto lag = pslab::lagrange_series(e, l, K);
    rows.push_back({lag.diverging ? "lagrange(divergent)" : "lagrange", std::to_string(K), fmt(lag.value),
                    fmt(std::abs(lag.value - xi))});

    const double bes = pslab::bessel_series(e, l, N);
    rows.push_back({"bessel", std::to_string(N), fmt(bes), fmt(std::abs(bes - xi))});

    const auto eta = pslab::eta_resummed_series(e, l, K);
    rows.push_back({"eta", std::to_string(K), fmt(eta.value), fmt(std::abs(eta.value - xi))});

    const double u_series = pslab::true_anomaly_series(e, l, std::min(K, 16));
    const double u_exact = pslab::true_anomaly_exact(e, l);
    rows.push_back({"true_anomaly_series", std::to_string(std::min(K, 16)), fmt(u_series),
                    fmt(std::abs(u_series - u_exact))});

    out.emit_table("compare", {"method", "K_or_N", "value", "abs_error_vs_newton"}, rows);
    for (const auto& r : rows)
        std::cout << r[0] << " K/N=" << r[1] << " value=" << r[2] << " |err|=" << r[3] << "\n";

    write_manifest(out, "kepler-compare", {{"e", e}, {"l", l}, {"K", K}, {"N", N}}, argv_tail);
    return 0;
}

int run_kepler_coefficients(const Output& out, int K, bool exact, const std::vector<std::string>& argv_tail) {
    std::vector<std::vector<std::string>> rows;
    if (exact) {
        const auto coef = pslab::series_coefficients(K);
        for (int k = 1; k <= K; ++k)
            for (const auto& [n, c] : coef[static_cast<std::size_t>(k - 1)].terms())
                rows.push_back({std::to_string(k), std::to_string(n), c.s.str()});
    } else {
        const auto coef = pslab::kepler_coefficients<double>(K);
        for (int k = 1; k <= K; ++k)
            for (const auto& [n, c] : coef[static_cast<std::size_t>(k - 1)].terms())
                rows.push_back({std::to_string(k), std::to_string(n), fmt(c.s)});
    }
    out.emit_table("coefficients", {"order", "harmonic", "sin_coefficient"}, rows);
    std::cout << "wrote " << rows.size() << " coefficients through order " << K << "\n";
    write_manifest(out, "kepler-coefficients", {{"K", K}, {"exact", exact}}, argv_tail);
    return 0;
}

// ---------------------------------------------------------------- invert ---

int run_invert_trees(const Output& out, int k, int n, const std::vector<std::string>& argv_tail) {
    const auto trees = pslab::enumerate_trees(k, n);
    std::vector<std::vector<std::string>> rows;
    long long total = 0;
    for (const auto& [tree, mult] : trees) {
        rows.push_back({pslab::display(tree), std::to_string(mult)});
        total += mult;
        std::cout << pslab::display(tree) << "  multiplicity " << mult << "\n";
    }
    std::cout << trees.size() << " equivalence classes, " << total << " plane trees\n";
    out.emit_table("trees", {"tree", "multiplicity"}, rows);
    write_manifest(out, "invert-trees", {{"k", k}, {"n", n}}, argv_tail);
    return 0;
}

int run_invert_catalan(const Output& out, int K, const std::vector<std::string>& argv_tail) {
    // x - x^2 = alpha inverted: coefficients are the Catalan numbers.
    auto phi = pslab::TruncatedSeries<pslab::Rational>::zero(K + 2);
    phi[2] = pslab::Rational(1);
    const auto x = pslab::invert_series(pslab::FunctionJet<pslab::Rational>::scalar(phi), K);
    std::vector<std::vector<std::string>> rows;
    for (int j = 1; j <= K; ++j) rows.push_back({std::to_string(j), x[j].str()});
    out.emit_table("catalan", {"power", "coefficient"}, rows);
    for (const auto& r : rows) std::cout << "alpha^" << r[0] << ": " << r[1] << "\n";
    write_manifest(out, "invert-catalan", {{"K", K}}, argv_tail);
    return 0;
}

// -------------------------------------------------------------- lindstedt ---

template <int D, typename Scalar>
void emit_orders(const Output& out, const std::vector<pslab::TorusFourier<D, Scalar>>& orders) {
    // h^[k] tables are always CSV per the interface contract.
    std::ostringstream os;
    os << "k";
    for (int a = 0; a < D; ++a) os << ",nu" << (a + 1);
    os << ",component,coefficient\n";
    for (std::size_t ki = 0; ki < orders.size(); ++ki) {
        for (const auto& [nu, comps] : orders[ki].sine) {
            for (int j = 0; j < D; ++j) {
                if (pslab::ScalarTraits<Scalar>::is_zero(comps[static_cast<std::size_t>(j)])) continue;
                os << (ki + 1);
                for (int a = 0; a < D; ++a) os << "," << nu[static_cast<std::size_t>(a)];
                os << "," << (j + 1) << "," << pslab::ScalarTraits<Scalar>::str(comps[static_cast<std::size_t>(j)])
                   << "\n";
            }
        }
    }
    out.write(out.dir / "orders.csv", os.str());
}

template <int D>
int run_lindstedt_system(const Output& out, const pslab::Potential<D, long double>& f,
                         const std::array<long double, static_cast<std::size_t>(D)>& omega, int K, bool verify,
                         double eps_min, double eps_max, int eps_count, int grid, int divisors_cutoff,
                         const json& params, const std::vector<std::string>& argv_tail) {
    const auto orders = pslab::lindstedt_orders<D, long double>(K, f, omega);
    emit_orders<D, long double>(out, orders);

    if (!orders.empty() && !orders[0].sine.empty())
        std::cout << "h^[1] leading sine coefficient: "
                  << fmt(static_cast<double>(orders[0].sine.begin()->second[0])) << "\n";

    if (K >= 3) {
        const auto fit = pslab::decay_fit<D, long double>(orders);
        json dj = {{"c", fit.c}, {"kappa", fit.kappa}, {"max_violation", fit.max_violation},
                   {"degenerate", fit.degenerate}};
        out.emit_json("decay", dj);
        std::cout << "decay envelope: c=" << fmt(fit.c) << " kappa=" << fmt(fit.kappa)
                  << " max_violation=" << fmt(fit.max_violation) << "\n";
    }

    if (verify) {
        std::vector<double> eps;
        for (int i = 0; i < eps_count; ++i)
            eps.push_back(eps_min * std::pow(eps_max / eps_min,
                                             eps_count == 1 ? 0.0 : static_cast<double>(i) / (eps_count - 1)));
        const auto rep = pslab::verify_conjugation<D, long double>(orders, f, omega, eps, grid);
        json rj;
        rj["slope_fit"] = rep.slope_fit;
        rj["truncation_flagged"] = rep.truncation_flagged;
        rj["points"] = json::array();
        for (const auto& p : rep.points)
            rj["points"].push_back({{"epsilon", p.epsilon}, {"residual", p.residual},
                                    {"truncation_tail", p.truncation_tail}});
        out.emit_json("residuals", rj);
        std::cout << "conjugation residual slope: " << fmt(rep.slope_fit) << "\n";
    }

    std::vector<double> omega_d;
    for (const auto& w : omega) omega_d.push_back(static_cast<double>(w));
    const auto sd = pslab::small_divisor_report(omega_d, 1.0, divisors_cutoff, 16);
    std::vector<std::vector<std::string>> rows;
    for (const auto& w : sd.worst) {
        std::string nu;
        for (std::size_t a = 0; a < w.nu.size(); ++a) nu += (a ? ";" : "") + std::to_string(w.nu[a]);
        rows.push_back({nu, fmt(w.omega_dot_nu), fmt(w.diophantine_bound)});
    }
    out.emit_table("divisors", {"nu", "omega_dot_nu", "diophantine_bound"}, rows);

    write_manifest(out, "lindstedt", params, argv_tail);
    return 0;
}

int run_lindstedt(const Output& out, const std::string& system, int K, bool verify, double eps_min,
                  double eps_max, int eps_count, int grid, int divisors_cutoff,
                  const std::vector<std::string>& argv_tail) {
    json params = {{"system", system},   {"K", K},       {"verify", verify},
                   {"eps_min", eps_min}, {"eps_max", eps_max}, {"eps_count", eps_count},
                   {"grid", grid},       {"divisors", divisors_cutoff}};
    if (system == "pendulum1d")
        return run_lindstedt_system<1>(out, pslab::pendulum_potential_t<long double>(),
                                       pslab::pendulum_omega_t<long double>(), K, verify, eps_min, eps_max,
                                       eps_count, grid, divisors_cutoff, params, argv_tail);
    if (system == "golden2d")
        return run_lindstedt_system<2>(out, pslab::golden_potential_t<long double>(),
                                       pslab::golden_omega_t<long double>(), K, verify, eps_min, eps_max,
                                       eps_count, grid, divisors_cutoff, params, argv_tail);
    throw CLI::ValidationError("--system must be pendulum1d or golden2d");
}

// ------------------------------------------------------------------- sum ---

int run_sum(const Output& out, const std::string& series, const std::string& radii_s, bool extrapolate,
            const std::vector<std::string>& argv_tail) {
    pslab::TermGenerator gen;
    const auto colon = series.find(':');
    const std::string name = series.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : series.substr(colon + 1);
    if (name == "cos") {
        const double x = arg.empty() ? M_PI / 2 : std::stod(arg);
        gen = [x](long long n) { return std::cos(n * x); };
    } else if (name == "alternating") {
        gen = [](long long n) { return n % 2 == 1 ? 1.0 : -1.0; };
    } else if (name == "geometric") {
        const double q = arg.empty() ? 0.5 : std::stod(arg);
        gen = [q](long long n) { return std::pow(q, static_cast<double>(n - 1)); };
    } else {
        throw CLI::ValidationError("--series must be cos:x | alternating | geometric:q");
    }

    pslab::AbelOptions opts;
    if (!radii_s.empty()) opts.r_grid = parse_double_list(radii_s);
    opts.extrapolate = extrapolate;
    const auto res = pslab::abel_sum(gen, opts);

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : res.radii)
        rows.push_back({fmt(r.r), fmt(r.value), std::to_string(r.terms_used), r.stabilized ? "yes" : "no"});
    out.emit_table("abel", {"r", "value", "terms", "stabilized"}, rows);

    json j = {{"estimate", res.estimate},
              {"extrapolated", res.extrapolated},
              {"direct_sum", res.direct_sum},
              {"direct_value", res.direct_value},
              {"cesaro_value", res.cesaro_value},
              {"cesaro_stabilized", res.cesaro_stabilized},
              {"any_divergent_radius", res.any_divergent_radius}};
    out.emit_json("abel_summary", j);
    std::cout << "estimate = " << fmt(res.estimate)
              << (res.direct_sum ? " (direct sum)" : " (Abel extrapolation)") << "\n";

    write_manifest(out, "sum", {{"series", series}, {"radii", radii_s}, {"extrapolate", extrapolate}}, argv_tail);
    return 0;
}

int dispatch(const std::vector<std::string>& args);

int run_from_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read manifest " + path);
    json m = json::parse(f);
    std::vector<std::string> args;
    for (const auto& a : m.at("argv")) args.push_back(a.get<std::string>());
    return dispatch(args);
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"perturbation-series laboratory: strings, inversion, Kepler, Lindstedt"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string out_dir = ".";
    std::string format = "csv";
    std::string manifest_path;
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--from-manifest", manifest_path, "re-run the configuration stored in a manifest.json");

    auto* s_string = app.add_subcommand("string", "discrete chain vs continuum string");
    s_string->fallthrough();
    std::string datum = "sine:1", udatum = "zero", meshes = "32,64,128";
    double t = 0.5;
    int cont_modes = 400;
    s_string->add_option("--datum", datum, "position datum (zero | sine:k | triangle:x0 | bump:c,w)");
    s_string->add_option("--udatum", udatum, "velocity datum");
    s_string->add_option("--meshes", meshes, "comma-separated mesh sizes, increasing");
    s_string->add_option("--t", t, "evaluation time");
    s_string->add_option("--H", cont_modes, "continuum mode cutoff");

    auto* s_kepler = app.add_subcommand("kepler", "Kepler equation series and resummations");
    s_kepler->fallthrough();
    auto* s_limit = s_kepler->add_subcommand("limit", "Laplace limit r*");
    s_limit->fallthrough();
    double tol = 1e-7;
    s_limit->add_option("--tol", tol, "residual tolerance");
    auto* s_compare = s_kepler->add_subcommand("compare", "method comparison at one (e, l)");
    s_compare->fallthrough();
    double e = 0.5, l = 1.0;
    int K = 20, N = 50;
    s_compare->add_option("--e", e, "eccentricity in [0,1)");
    s_compare->add_option("--l", l, "mean anomaly");
    s_compare->add_option("--K", K, "series order");
    s_compare->add_option("--N", N, "Bessel harmonic cutoff");
    auto* s_coef = s_kepler->add_subcommand("coefficients", "trig-polynomial coefficient tables");
    s_coef->fallthrough();
    int coefK = 8;
    bool exact = false;
    s_coef->add_option("--K", coefK, "highest order");
    s_coef->add_flag("--exact", exact, "exact rational coefficients (K <= 30)");

    auto* s_invert = app.add_subcommand("invert", "series reversion and decorated trees");
    s_invert->fallthrough();
    auto* s_trees = s_invert->add_subcommand("trees", "enumerate decorated trees");
    s_trees->fallthrough();
    int tk = 3, tn = 1;
    s_trees->add_option("--k", tk, "branch count (1..8)");
    s_trees->add_option("--n", tn, "component labels (1..3)");
    auto* s_catalan = s_invert->add_subcommand("catalan", "invert x - x^2");
    s_catalan->fallthrough();
    int catK = 10;
    s_catalan->add_option("--K", catK, "series order");

    auto* s_lind = app.add_subcommand("lindstedt", "invariant-torus expansion");
    s_lind->fallthrough();
    std::string system = "pendulum1d";
    int lK = 3, grid = 48, divisors = 60, eps_count = 5;
    bool verify = false;
    double eps_min = 1e-4, eps_max = 1e-2;
    s_lind->add_option("--system", system, "pendulum1d | golden2d");
    s_lind->add_option("--K", lK, "expansion order");
    s_lind->add_flag("--verify", verify, "evaluate the conjugation residual over an eps grid");
    s_lind->add_option("--eps-min", eps_min, "smallest eps");
    s_lind->add_option("--eps-max", eps_max, "largest eps");
    s_lind->add_option("--eps-count", eps_count, "number of eps points");
    s_lind->add_option("--grid", grid, "alpha grid size per dimension");
    s_lind->add_option("--divisors", divisors, "small-divisor scan cutoff |nu|_1");

    auto* s_sum = app.add_subcommand("sum", "Abel summation of a numeric series");
    s_sum->fallthrough();
    std::string series = "cos:1.0471975511965976", radii;
    bool no_extrapolate = false;
    s_sum->add_option("--series", series, "cos:x | alternating | geometric:q");
    s_sum->add_option("--radii", radii, "comma-separated Abel radii in (0,1), increasing");
    s_sum->add_flag("--no-extrapolate", no_extrapolate, "report the last radius instead of extrapolating");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) {
            std::cout << app.help() << "\n";
            return 0;
        }
        std::cerr << "usage error: " << err.what() << "\n";
        return 2;
    }

    if (!manifest_path.empty()) return run_from_manifest(manifest_path);
    if (app.get_subcommands().empty()) {
        std::cout << app.help() << "\n";
        return 2;
    }

    Output out{fs::path(out_dir), format};
    fs::create_directories(out.dir);

    if (s_string->parsed()) return run_string(out, datum, udatum, meshes, t, cont_modes, args);
    if (s_kepler->parsed()) {
        if (s_limit->parsed()) return run_kepler_limit(out, tol, args);
        if (s_compare->parsed()) return run_kepler_compare(out, e, l, K, N, args);
        if (s_coef->parsed()) return run_kepler_coefficients(out, coefK, exact, args);
        std::cerr << "usage error: kepler needs a subcommand (limit | compare | coefficients)\n";
        return 2;
    }
    if (s_invert->parsed()) {
        if (s_trees->parsed()) return run_invert_trees(out, tk, tn, args);
        if (s_catalan->parsed()) return run_invert_catalan(out, catK, args);
        std::cerr << "usage error: invert needs a subcommand (trees | catalan)\n";
        return 2;
    }
    if (s_lind->parsed())
        return run_lindstedt(out, system, lK, verify, eps_min, eps_max, eps_count, grid, divisors, args);
    if (s_sum->parsed()) return run_sum(out, series, radii, !no_extrapolate, args);

    std::cout << app.help() << "\n";
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return dispatch(args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        // numerical-contract violations (solvability, resonance,
        // instability, overflow) and I/O failures
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
