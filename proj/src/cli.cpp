#include "fhn/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unistd.h>
#include <variant>

#include "CLI11.hpp"
#include "fhn/bifurcation.hpp"
#include "fhn/errors.hpp"
#include "fhn/fast_layer.hpp"
#include "fhn/homoclinic.hpp"
#include "fhn/model.hpp"
#include "fhn/slow_reduced.hpp"

namespace fhn::cli {

using json = nlohmann::ordered_json;

namespace {

// ---- flag registry ---------------------------------------------------------

enum class Kind { real, integer, text, real_list, flag };

struct Flag {
    std::string name;  // long name with dashes
    Kind kind;
    json def;
    std::string help;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<Flag> flags;
    std::string default_format;
};

const std::vector<Command>& commands() {
    static const std::vector<Command> cmds = {
        {"folds", "fold points x_-, x_+ of the critical manifold and the matching p and pbar values", {}, "json"},
        {"slow-bif",
         "slow-flow bifurcation values p_-, p_+ and the equilibrium branch along a p-grid",
         {{"p-min", Kind::real, -0.3, "start of the p-grid"},
          {"p-max", Kind::real, 0.9, "end of the p-grid"},
          {"n", Kind::integer, 25, "grid points"}},
         "json"},
        {"fast-equilibria",
         "equilibria of the layer problem with their eigenvalues",
         {{"pbar", Kind::real, -0.06, "layer shift p - y"}, {"s", Kind::real, 0.0, "wave speed"}},
         "csv"},
        {"double-het",
         "s = 0 double heteroclinic of the layer problem and the full-system p*",
         {{"offset", Kind::real, 1e-8, "launch offset along the saddle eigendirections"}},
         "json"},
        {"het-curve",
         "both arms of the layer heteroclinic V-curve in (pbar, s)",
         {{"step", Kind::real, 0.02, "continuation step"},
          {"s-max", Kind::real, 1.5, "stop each arm at this speed"},
          {"max-points", Kind::integer, 500, "point cap per arm"},
          {"gap-tol", Kind::real, 1e-10, "section-gap tolerance"},
          {"offset", Kind::real, 1e-8, "launch offset"}},
         "csv"},
        {"hopf-curve",
         "Hopf U-curve with first Lyapunov coefficients",
         {{"eps", Kind::real, 0.01, "time-scale ratio"}, {"n", Kind::integer, 200, "curve points"}},
         "csv"},
        {"gh-track",
         "generalized Hopf points over an eps-grid and their eps -> 0 extrapolation",
         {{"eps", Kind::real_list, json::array({1e-2, 1e-3, 1e-4}), "eps grid"},
          {"n-scan", Kind::integer, 400, "l1 sign scan points along the left half"}},
         "csv"},
        {"canard",
         "maximal canard and reduced Hopf values",
         {{"eps", Kind::real_list, json::array({0.01}), "eps values"}},
         "csv"},
        {"canard-stability",
         "canard stability integral R(h) over (0, phi(sqrt(91)/15)]",
         {{"n", Kind::integer, 50, "grid points"}, {"tol", Kind::real, 1e-12, "quadrature tolerance"}},
         "csv"},
        {"reduced-orbit",
         "orbit of the 2-D reduction and its attractor summary",
         {{"p", Kind::real, 0.058, "applied current"},
          {"s", Kind::real, 1.37, "wave speed"},
          {"eps", Kind::real, 0.01, "time-scale ratio"},
          {"variant", Kind::text, "first-order", "first-order (x1, y) or second-order (x1, x2bar)"},
          {"t-end", Kind::real, 400.0, "run length in the variant's time"},
          {"samples", Kind::integer, 2000, "samples of the summary window written to CSV"}},
         "csv"},
        {"c-curve",
         "homoclinic speeds by splitting of the unstable manifold of q",
         {{"eps", Kind::real, 0.01, "time-scale ratio"},
          {"p", Kind::real_list, json::array({0.05}), "p values"},
          {"s-lo", Kind::real, 0.1, "scan start"},
          {"s-hi", Kind::real, 1.5, "scan end"},
          {"scan-step", Kind::real, 0.01, "scan spacing"},
          {"offset", Kind::real, 1e-8, "launch offset along the unstable eigenvector"},
          {"bracket", Kind::real, 1e-12, "bisection stop width"},
          {"float-limit", Kind::flag, false, "bisect until the bracket is float-limited"},
          {"reverse", Kind::flag, false, "evaluate the scan grid in reverse order"}},
         "csv"},
        {"singular-diagram",
         "singular bifurcation diagram: A, B, C, AB, AC, Hopf asymptotes, canard, folds",
         {{"n-ac", Kind::integer, 60, "points on the AC curve"}},
         "json"},
    };
    return cmds;
}

const Command& command_named(const std::string& name) {
    for (const auto& c : commands())
        if (c.name == name) return c;
    throw DomainError("unknown command '" + name + "'");
}

std::string key_of(const std::string& flag) {
    std::string k = flag;
    for (auto& ch : k)
        if (ch == '-') ch = '_';
    return k;
}

double num(const RunConfig& c, const std::string& k) { return c.parameters.at(k).get<double>(); }
long integer(const RunConfig& c, const std::string& k) { return c.parameters.at(k).get<long>(); }
std::vector<double> list(const RunConfig& c, const std::string& k) {
    return c.parameters.at(k).get<std::vector<double>>();
}

// ---- artifacts -------------------------------------------------------------

using Cell = std::variant<double, long, std::string>;

struct Artifact {
    json data = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::string plot_x, plot_y, plot_y2;  // CSV columns for the plot script
};

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) return fmt_double(*d);
    if (auto i = std::get_if<long>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

void atomic_write(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << text;
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

json header(const RunConfig& cfg) {
    json h = json::object();
    h["schema"] = "fhn-artifact";
    h["schema_version"] = kSchemaVersion;
    h["version"] = kVersion;
    h["command"] = cfg.command;
    h["parameters"] = cfg.parameters;
    return h;
}

std::string render_csv(const RunConfig& cfg, const Artifact& a) {
    std::ostringstream os;
    os << "# schema: fhn-csv/" << kSchemaVersion << "\n";
    os << "# version: " << kVersion << "\n";
    os << "# command: " << cfg.command << "\n";
    os << "# parameters: " << cfg.parameters.dump() << "\n";
    for (std::size_t i = 0; i < a.columns.size(); ++i) os << (i ? "," : "") << a.columns[i];
    os << "\n";
    for (const auto& r : a.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
        os << "\n";
    }
    return os.str();
}

json rows_as_json(const Artifact& a) {
    json arr = json::array();
    for (const auto& r : a.rows) {
        json o = json::object();
        for (std::size_t i = 0; i < r.size(); ++i) std::visit([&](const auto& v) { o[a.columns[i]] = v; }, r[i]);
        arr.push_back(o);
    }
    return arr;
}

std::string render_json(const RunConfig& cfg, const Artifact& a) {
    json doc = header(cfg);
    json data = a.data;
    if (!a.columns.empty()) data["rows"] = rows_as_json(a);
    doc["data"] = data;
    return doc.dump(2) + "\n";
}

std::string render_plot(const std::string& csv_name, const Artifact& a) {
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < a.columns.size(); ++i)
            if (a.columns[i] == name) return i + 1;
        return std::size_t{0};
    };
    std::ostringstream os;
    os << "# gnuplot script\n";
    os << "set datafile separator ','\n";
    os << "set datafile commentschars '#'\n";
    os << "set key autotitle columnhead\n";
    os << "set xlabel '" << a.plot_x << "'\nset ylabel '" << a.plot_y << "'\n";
    os << "plot '" << csv_name << "' using " << col(a.plot_x) << ":" << col(a.plot_y) << " with linespoints";
    if (!a.plot_y2.empty()) os << ", '' using " << col(a.plot_x) << ":" << col(a.plot_y2) << " with linespoints";
    os << "\n";
    return os.str();
}

// ---- command bodies --------------------------------------------------------

Artifact do_folds(const RunConfig&) {
    Artifact a;
    const auto fp = fold_points();
    const auto [pm, pp] = slow_fold_params();
    const auto [bl, br] = fast_pbar_bounds();
    a.data = {{"x_minus", fp.x_minus}, {"x_plus", fp.x_plus}, {"p_minus", pm},
              {"p_plus", pp},          {"pbar_l", bl},         {"pbar_r", br}};
    a.columns = {"name", "value"};
    for (auto it = a.data.begin(); it != a.data.end(); ++it) a.rows.push_back({it.key(), it->get<double>()});
    return a;
}

Artifact do_slow_bif(const RunConfig& c) {
    Artifact a;
    const auto [pm, pp] = slow_fold_params();
    a.data = {{"p_minus", pm}, {"p_plus", pp}, {"p_sum", pm + pp}, {"p_sum_exact", 2057.0 / 3375.0}};
    a.columns = {"p", "x1_star", "branch"};
    const double lo = num(c, "p_min"), hi = num(c, "p_max");
    const long n = integer(c, "n");
    for (long i = 0; i < n; ++i) {
        const double p = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double x = equilibrium_x1(p);
        a.rows.push_back({p, x, std::string(to_string(branch_of(x)))});
    }
    a.plot_x = "p";
    a.plot_y = "x1_star";
    return a;
}

Artifact do_fast_equilibria(const RunConfig& c) {
    Artifact a;
    const double pbar = num(c, "pbar"), s = num(c, "s");
    a.columns = {"x1", "branch", "kind", "ev1_re", "ev1_im", "ev2_re", "ev2_im"};
    for (double x : fast_equilibria_x1(pbar)) {
        const auto info = fast_equilibrium_info(x, s);
        a.rows.push_back({x, std::string(to_string(info.branch)), std::string(to_string(info.kind)),
                          info.eigenvalues[0].real(), info.eigenvalues[0].imag(), info.eigenvalues[1].real(),
                          info.eigenvalues[1].imag()});
    }
    a.data["count"] = a.rows.size();
    a.plot_x = "x1";
    a.plot_y = "ev2_re";
    return a;
}

Artifact do_double_het(const RunConfig& c) {
    Artifact a;
    layer::ShootOptions so;
    so.offset = num(c, "offset");
    const double pb = layer::double_het_pbar();
    const auto eq = fast_equilibria_x1(pb);
    const layer::HamiltonianData ham{pb};
    const auto A = homo::double_het_point();
    a.data = {{"pbar_star", pb},
              {"pbar_star_exact", kDoubleHetPbar},
              {"energy_difference", ham.V(eq.front()) - ham.V(eq.back())},
              {"gap_left_to_right", layer::shoot_heteroclinic(pb, 0.0, layer::HetDirection::left_to_right, so)},
              {"gap_right_to_left", layer::shoot_heteroclinic(pb, 0.0, layer::HetDirection::right_to_left, so)},
              {"p_star", A[0]}};
    return a;
}

Artifact do_het_curve(const RunConfig& c) {
    Artifact a;
    layer::ContinuationLimits lim;
    lim.s_max = num(c, "s_max");
    lim.max_points = static_cast<std::size_t>(integer(c, "max_points"));
    layer::HetSolveOptions so;
    so.gap_tol = num(c, "gap_tol");
    so.shoot.offset = num(c, "offset");
    const auto arms = layer::het_v_curve(num(c, "step"), lim, so);
    a.columns = {"pbar", "s", "direction", "gap"};
    json term = json::object();
    for (const auto& arm : arms) {
        term[arm.label] = arm.termination;
        for (const auto& pt : arm.points)
            a.rows.push_back({pt.pbar, pt.s, std::string(layer::to_string(pt.direction)), pt.section_gap});
    }
    a.data["termination"] = term;
    a.plot_x = "pbar";
    a.plot_y = "s";
    return a;
}

Artifact do_hopf_curve(const RunConfig& c) {
    Artifact a;
    const auto curve = bif::hopf_curve(num(c, "eps"), static_cast<std::size_t>(integer(c, "n")));
    a.columns = {"p", "s", "eps", "x1_star", "omega", "l1", "criticality"};
    for (const auto& h : curve.points)
        a.rows.push_back({h.p, h.s, h.eps, h.x1_star, h.omega, h.l1, std::string(bif::to_string(h.criticality))});
    const auto as = bif::hopf_asymptotes();
    a.data["asymptotes"] = {{"p_minus", as.p_minus}, {"p_plus", as.p_plus}};
    a.plot_x = "p";
    a.plot_y = "s";
    return a;
}

Artifact do_gh_track(const RunConfig& c) {
    Artifact a;
    bif::GhScanOptions go;
    go.n_scan = static_cast<std::size_t>(integer(c, "n_scan"));
    const auto tr = bif::gh_track(list(c, "eps"), go);
    a.columns = {"branch", "eps", "p", "s", "x1_star", "omega", "l1"};
    json ext = json::object();
    for (int b = 0; b < 2; ++b) {
        for (const auto& h : tr.branches[b].points)
            a.rows.push_back({tr.branches[b].label, h.eps, h.p, h.s, h.x1_star, h.omega, h.l1});
        ext[tr.branches[b].label] = {{"p", tr.extrapolated[b][0]},
                                     {"s", tr.extrapolated[b][1]},
                                     {"termination", tr.branches[b].termination}};
    }
    a.data["extrapolated"] = ext;
    a.plot_x = "p";
    a.plot_y = "s";
    return a;
}

Artifact do_canard(const RunConfig& c) {
    Artifact a;
    a.columns = {"eps", "p_maximal", "p_hopf_minus", "p_hopf_plus"};
    for (double e : list(c, "eps")) {
        const auto ci = reduced::canard_info(e);
        a.rows.push_back({ci.eps, ci.p_maximal, ci.p_hopf_minus, ci.p_hopf_plus});
    }
    a.plot_x = "eps";
    a.plot_y = "p_maximal";
    return a;
}

Artifact do_canard_stability(const RunConfig& c) {
    Artifact a;
    const long n = integer(c, "n");
    const double tol = num(c, "tol");
    const double hmax = reduced::canard_h_max();
    a.columns = {"h", "x_l", "x_m", "R"};
    for (long i = 1; i <= n; ++i) {
        const double h = hmax * static_cast<double>(i) / static_cast<double>(n);
        const auto [xl, xm] = reduced::canard_roots(h);
        a.rows.push_back({h, xl, xm, reduced::canard_stability_R(h, tol)});
    }
    a.data["h_max"] = hmax;
    a.plot_x = "h";
    a.plot_y = "R";
    return a;
}

Artifact do_reduced_orbit(const RunConfig& c) {
    Artifact a;
    const std::string v = c.parameters.at("variant").get<std::string>();
    reduced::ReducedVariant var;
    if (v == "first-order") {
        var = reduced::ReducedVariant::first_order;
    } else if (v == "second-order") {
        var = reduced::ReducedVariant::second_order;
    } else {
        throw DomainError("reduced-orbit: variant must be first-order or second-order");
    }
    reduced::ReducedOptions ro;
    ro.t_end = num(c, "t_end");
    const auto orbit = reduced::simulate_reduced(num(c, "p"), num(c, "s"), num(c, "eps"), var, ro);
    const auto& sm = orbit.summary;
    a.data["summary"] = {{"x1_min", sm.x1_min},       {"x1_max", sm.x1_max},       {"x1_amplitude", sm.x1_amplitude},
                         {"x2_min", sm.x2_min},       {"x2_max", sm.x2_max},       {"x2_amplitude", sm.x2_amplitude},
                         {"period", sm.period},       {"x2_excursions", sm.x2_excursions},
                         {"kind", reduced::to_string(sm.kind)}};
    a.columns = {"t", "x1", "x2"};
    const long n = std::max(2L, integer(c, "samples"));
    const std::size_t m = orbit.t.size();
    for (long i = 0; i < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(static_cast<double>(i) * static_cast<double>(m - 1) /
                                                       static_cast<double>(n - 1));
        a.rows.push_back({orbit.t[k], orbit.x1[k], orbit.x2[k]});
    }
    a.plot_x = "x1";
    a.plot_y = "x2";
    return a;
}

Artifact do_c_curve(const RunConfig& c) {
    Artifact a;
    homo::SplitOptions so;
    so.scan_step = num(c, "scan_step");
    so.offset = num(c, "offset");
    so.bracket_width = c.parameters.at("float_limit").get<bool>() ? 0.0 : num(c, "bracket");
    so.reverse_scan = c.parameters.at("reverse").get<bool>();
    const double eps = num(c, "eps"), lo = num(c, "s_lo"), hi = num(c, "s_hi");
    a.columns = {"p", "s1", "s2", "eps", "bracket_width", "flips"};
    json failures = json::array();
    for (double p : list(c, "p")) {
        try {
            const auto pt = homo::locate_c_curve(p, eps, lo, hi, so);
            a.rows.push_back({pt.p, pt.s1, pt.s2, pt.eps, pt.bracket_width, static_cast<long>(pt.flips)});
        } catch (const NumericalError& e) {
            failures.push_back({{"p", p}, {"reason", e.what()}});
        }
    }
    if (a.rows.empty()) throw NumericalError("c-curve: no grid point produced two flips; first: " +
                                             failures.front().at("reason").get<std::string>());
    a.data["failures"] = failures;
    a.plot_x = "p";
    a.plot_y = "s1";
    a.plot_y2 = "s2";
    return a;
}

json pt_json(const std::array<double, 2>& p) { return {{"p", p[0]}, {"s", p[1]}}; }

Artifact do_singular_diagram(const RunConfig& c) {
    Artifact a;
    const auto d = homo::assemble_singular_diagram(static_cast<std::size_t>(integer(c, "n_ac")));
    json ac = json::array();
    for (const auto& p : d.AC) ac.push_back(pt_json(p));
    a.data = {{"A", pt_json(d.A)},
              {"B", pt_json(d.B)},
              {"C", pt_json(d.C)},
              {"AB", {pt_json(d.AB.a), pt_json(d.AB.b)}},
              {"AC", ac},
              {"hopf_asymptotes",
               {{"p_minus", d.hopf_p_minus},
                {"p_plus", d.hopf_p_plus},
                {"horizontal", {pt_json(d.hopf_horizontal.a), pt_json(d.hopf_horizontal.b)}}}},
              {"canard_p", d.canard_p},
              {"folds",
               {{"x_minus", d.fold_x_minus},
                {"x_plus", d.fold_x_plus},
                {"p_minus", d.fold_p_minus},
                {"p_plus", d.fold_p_plus}}}};
    a.columns = {"curve", "p", "s"};
    for (const auto& p : d.AC) a.rows.push_back({std::string("AC"), p[0], p[1]});
    a.rows.push_back({std::string("AB"), d.AB.a[0], d.AB.a[1]});
    a.rows.push_back({std::string("AB"), d.AB.b[0], d.AB.b[1]});
    a.plot_x = "p";
    a.plot_y = "s";
    return a;
}

Artifact dispatch(const RunConfig& c) {
    static const std::map<std::string, Artifact (*)(const RunConfig&)> table = {
        {"folds", do_folds},
        {"slow-bif", do_slow_bif},
        {"fast-equilibria", do_fast_equilibria},
        {"double-het", do_double_het},
        {"het-curve", do_het_curve},
        {"hopf-curve", do_hopf_curve},
        {"gh-track", do_gh_track},
        {"canard", do_canard},
        {"canard-stability", do_canard_stability},
        {"reduced-orbit", do_reduced_orbit},
        {"c-curve", do_c_curve},
        {"singular-diagram", do_singular_diagram},
    };
    return table.at(c.command)(c);
}

void print_error(const std::string& command, const char* type, const std::string& msg) {
    json e = {{"error", {{"type", type}, {"message", msg}}}, {"command", command}, {"version", kVersion}};
    std::cerr << e.dump() << "\n";
}

}  // namespace

json to_json(const RunConfig& cfg) {
    return {{"command", cfg.command},         {"parameters", cfg.parameters},   {"out_dir", cfg.out_dir},
            {"formats", cfg.formats},         {"plot_script", cfg.plot_script}, {"deterministic", cfg.deterministic}};
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.command = j.at("command").get<std::string>();
    c.parameters = j.at("parameters");
    c.out_dir = j.at("out_dir").get<std::string>();
    c.formats = j.at("formats").get<std::vector<std::string>>();
    c.plot_script = j.at("plot_script").get<bool>();
    c.deterministic = j.at("deterministic").get<bool>();
    return c;
}

void validate(const RunConfig& cfg) {
    const auto& cmd = command_named(cfg.command);
    for (const auto& f : cmd.flags) {
        const auto k = key_of(f.name);
        if (!cfg.parameters.contains(k)) throw DomainError(cfg.command + ": missing parameter '" + k + "'");
        const auto& v = cfg.parameters.at(k);
        const bool positive_required = f.name == "offset" || f.name == "tol" || f.name == "gap-tol" ||
                                       f.name == "step" || f.name == "scan-step" || f.name == "bracket" ||
                                       f.name == "t-end" || f.name == "n" || f.name == "n-ac" ||
                                       f.name == "n-scan" || f.name == "max-points" || f.name == "samples";
        if (f.kind == Kind::real_list && (!v.is_array() || v.empty()))
            throw DomainError(cfg.command + ": grid '" + f.name + "' must be non-empty");
        if (positive_required && !(v.get<double>() > 0.0))
            throw DomainError(cfg.command + ": '" + f.name + "' must be positive");
    }
    for (const auto& f : cfg.formats)
        if (f != "csv" && f != "json") throw DomainError("unknown format '" + f + "'");
    if (!cfg.deterministic) throw DomainError("non-deterministic runs are not supported");
}

std::vector<std::string> execute(const RunConfig& cfg) {
    validate(cfg);
    const Artifact a = dispatch(cfg);
    std::vector<std::string> formats = cfg.formats;
    if (formats.empty()) formats = {command_named(cfg.command).default_format};
    if (a.columns.empty()) formats = {"json"};  // scalar-only results have no table
    std::vector<std::string> written;
    const std::filesystem::path dir(cfg.out_dir);
    for (const auto& f : formats) {
        const auto path = dir / (cfg.command + "." + f);
        atomic_write(path, f == "csv" ? render_csv(cfg, a) : render_json(cfg, a));
        written.push_back(path.string());
        if (f == "csv" && cfg.plot_script && !a.plot_x.empty()) {
            const auto gp = dir / (cfg.command + ".gp");
            atomic_write(gp, render_plot(cfg.command + ".csv", a));
            written.push_back(gp.string());
        }
    }
    return written;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"FitzHugh-Nagumo traveling-wave bifurcation toolkit", "fhn"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir = ".";
    std::string format;
    bool plot = false;
    app.add_option("--out-dir", out_dir, "output directory")->envname("FHN_OUT_DIR")->capture_default_str();
    app.add_option("--format", format, "csv, json or both (default: per command)")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    app.add_flag("--plot-script", plot, "write a gnuplot script next to each CSV");

    std::map<std::string, double> reals;
    std::map<std::string, long> ints;
    std::map<std::string, std::string> texts;
    std::map<std::string, std::vector<double>> lists;
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::App*> subs;

    for (const auto& cmd : commands()) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help);
        subs[cmd.name] = sub;
        for (const auto& f : cmd.flags) {
            const std::string id = cmd.name + "/" + key_of(f.name);
            const std::string opt = "--" + f.name;
            switch (f.kind) {
                case Kind::real:
                    reals[id] = f.def.get<double>();
                    sub->add_option(opt, reals[id], f.help)->capture_default_str();
                    break;
                case Kind::integer:
                    ints[id] = f.def.get<long>();
                    sub->add_option(opt, ints[id], f.help)->capture_default_str();
                    break;
                case Kind::text:
                    texts[id] = f.def.get<std::string>();
                    sub->add_option(opt, texts[id], f.help)->capture_default_str();
                    break;
                case Kind::real_list: {
                    lists[id] = f.def.get<std::vector<double>>();
                    std::string d;
                    for (double v : lists[id]) d += (d.empty() ? "" : ",") + fmt_double(v);
                    sub->add_option(opt, lists[id], f.help)->delimiter(',')->default_str(d);
                    break;
                }
                case Kind::flag:
                    flags[id] = false;
                    sub->add_flag(opt, flags[id], f.help);
                    break;
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunConfig cfg;
    for (const auto& cmd : commands()) {
        if (!subs[cmd.name]->parsed()) continue;
        cfg.command = cmd.name;
        for (const auto& f : cmd.flags) {
            const std::string k = key_of(f.name);
            const std::string id = cmd.name + "/" + k;
            switch (f.kind) {
                case Kind::real: cfg.parameters[k] = reals[id]; break;
                case Kind::integer: cfg.parameters[k] = ints[id]; break;
                case Kind::text: cfg.parameters[k] = texts[id]; break;
                case Kind::real_list: cfg.parameters[k] = lists[id]; break;
                case Kind::flag: cfg.parameters[k] = flags[id]; break;
            }
        }
    }
    cfg.out_dir = out_dir;
    if (format == "both") {
        cfg.formats = {"csv", "json"};
    } else if (!format.empty()) {
        cfg.formats = {format};
    }
    cfg.plot_script = plot;

    try {
        validate(cfg);
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << subs[cfg.command]->help();
        return 2;
    }
    try {
        for (const auto& path : execute(cfg)) std::cout << path << "\n";
    } catch (const DomainError& e) {
        print_error(cfg.command, "domain", e.what());
        return 1;
    } catch (const NumericalError& e) {
        print_error(cfg.command, "numerical", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error(cfg.command, "internal", e.what());
        return 1;
    }
    return 0;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("fhn");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace fhn::cli
