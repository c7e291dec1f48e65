// Command-line front end: unit conversions, effective-potential
// coefficients, threshold-expansion tables, coupled-channel solves,
// asymptotic fits, nodal-parameter scans, and canned reproduction runs.
//
// Exit codes: 0 success, 1 domain error, 2 numerical failure, 64 usage.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dipvol/config.hpp"
#include "dipvol/io.hpp"
#include "dipvol/levy_keller.hpp"
#include "dipvol/potentials.hpp"
#include "dipvol/scan.hpp"
#include "dipvol/units.hpp"
#include "dipvol/volfit.hpp"

using json = nlohmann::ordered_json;
using namespace dipvol;

namespace {

potentials::MultipoleModel parse_model(const std::string& name) {
    if (name == "diabatic") return potentials::MultipoleModel::diabatic;
    if (name == "adiabatic") return potentials::MultipoleModel::adiabatic;
    if (name == "nonadiabatic") return potentials::MultipoleModel::nonadiabatic;
    throw std::domain_error("unknown model: " + name);
}

refpairs::Bc parse_bc(const std::string& name) {
    if (name == "bc2" || name == "BC2") return refpairs::Bc::bc2;
    if (name == "bc23" || name == "BC23") return refpairs::Bc::bc23;
    throw std::domain_error("unknown boundary condition: " + name);
}

void emit(const std::string& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << payload;
}

double num(double v) { return io::round12(v); }

json expansion_to_json(const lk::AsymptoticExpansion& e) {
    json terms = json::array();
    for (const auto& t : e.terms)
        terms.push_back({{"basis", lk::basis_name(t.tag)}, {"coefficient", num(t.coef)}});
    return terms;
}

std::string expansion_csv_rows(const std::string& which, const lk::AsymptoticExpansion& e) {
    std::string rows;
    for (const auto& t : e.terms)
        rows += which + "," + lk::basis_name(t.tag) + "," + io::fmt(t.coef) + "\n";
    return rows;
}

json fit_to_json(const volfit::FitResult& fit) {
    json coeffs = json::object();
    for (std::size_t j = 0; j < fit.basis.size(); ++j)
        coeffs[lk::basis_name(fit.basis[j])] = num(fit.coefficients[j]);
    return json{{"coefficients", coeffs},
                {"volume", num(fit.volume)},
                {"eta", num(fit.eta)},
                {"residual_rms", num(fit.residual_rms)},
                {"condition", num(fit.condition)},
                {"accepted", fit.accepted}};
}

std::string scan_csv(const scan::ScanCurve& curve, const std::string& request_line) {
    io::CsvWriter csv({"x00", "M0", "pole_flag", "bracket_lo", "bracket_hi"}, request_line);
    for (const auto& p : curve.points) {
        csv.raw_row({io::fmt(p.x00), std::isfinite(p.m0) ? io::fmt(p.m0) : "0.0",
                     p.pole_flag ? "1" : "0", io::fmt(p.bracket_lo), io::fmt(p.bracket_hi)});
    }
    return csv.str();
}

json resonances_json(const std::vector<scan::Resonance>& rs) {
    json out = json::array();
    for (const auto& r : rs)
        out.push_back({{"position", num(r.position)},
                       {"ell_label", r.ell_label},
                       {"n_appear", r.n_appear},
                       {"side_sign", r.side_sign},
                       {"width", num(r.width)},
                       {"ambiguous", r.ambiguous}});
    return out;
}

struct CommonOpts {
    std::string config_path;
    std::string format;
    std::string out_path;
    bool seedless = false;
    std::string cache_dir;
    int workers = 0;
};

cfg::RunConfig resolve_config(const CommonOpts& c) {
    cfg::RunConfig rc;
    if (!c.config_path.empty()) rc = cfg::load_config(c.config_path, rc);
    if (!c.format.empty()) cfg::apply_key(rc, "format", c.format);  // flags win
    if (c.seedless) rc.cache_enabled = false;
    if (!c.cache_dir.empty()) rc.cache_dir = c.cache_dir;
    if (c.workers > 0) rc.workers = c.workers;
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized p-wave scattering volume under a dipolar + van der Waals tail"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    CommonOpts common;
    app.add_option("--config", common.config_path, "flat key=value configuration file");
    app.add_option("--format", common.format, "output format: csv or json");
    app.add_option("--out", common.out_path, "write output to this path instead of stdout");
    app.add_flag("--seedless", common.seedless, "disable the on-disk result cache");
    app.add_option("--cache-dir", common.cache_dir, "cache directory (overrides DIPVOL_CACHE_DIR)");
    app.add_option("--workers", common.workers, "worker threads for scans (0 = auto)");

    // units
    auto* c_units = app.add_subcommand("units", "reduced-unit conversion factors");
    double u_mu_amu = 0, u_c6_au = 0, u_a1_au = 0, u_a2_au = 0, u_d_au = -1.0;
    c_units->add_option("--mu-amu", u_mu_amu, "reduced mass in unified amu")->required();
    c_units->add_option("--c6-au", u_c6_au, "C6 in atomic units (hartree bohr^6)")->required();
    c_units->add_option("--alpha1-au", u_a1_au, "polarizability of atom 1, bohr^3")->required();
    c_units->add_option("--alpha2-au", u_a2_au, "polarizability of atom 2, bohr^3")->required();
    c_units->add_option("--dipole-au", u_d_au,
                        "optional dipole-dipole strength in hartree bohr^3");

    // coeffs
    auto* c_coeffs = app.add_subcommand("coeffs", "effective p-wave multipole coefficients");
    std::string co_model = "adiabatic";
    int co_m = 0;
    double co_I = 6.0;
    c_coeffs->add_option("--model", co_model, "diabatic | adiabatic | nonadiabatic");
    c_coeffs->add_option("--m", co_m, "magnetic quantum number (0 or +-1)");
    c_coeffs->add_option("--intensity", co_I, "reduced intensity");

    // lk
    auto* c_lk = app.add_subcommand("lk", "threshold expansion coefficient tables");
    std::string lk_model = "adiabatic", lk_bc = "bc2";
    int lk_m = 0;
    double lk_I = 6.0, lk_c3f = -1.0, lk_m0 = 0.0;
    c_lk->add_option("--model", lk_model, "potential model");
    c_lk->add_option("--m", lk_m, "magnetic quantum number");
    c_lk->add_option("--intensity", lk_I, "reduced intensity");
    c_lk->add_option("--bc", lk_bc, "reference pair: bc2 | bc23");
    c_lk->add_option("--c3f", lk_c3f, "reference potential strength (bc23; default |c3|)");
    c_lk->add_option("--m0", lk_m0, "short-range constant entering the expansions");

    // solve
    auto* c_solve = app.add_subcommand("solve", "one coupled-channel threshold solve");
    int so_m = 0, so_n = 3;
    double so_I = 6.0, so_x00 = 0.1468, so_xmax = 500.0;
    double so_gE = 0.0, so_gL = 0.0, so_gI = 0.0;
    std::string so_bc = "bc2";
    c_solve->add_option("--m", so_m, "magnetic quantum number");
    c_solve->add_option("--intensity", so_I, "reduced intensity");
    c_solve->add_option("--x00", so_x00, "nodal parameter");
    c_solve->add_option("--n", so_n, "number of coupled channels");
    c_solve->add_option("--bc", so_bc, "boundary pair at x_max: bc2 | bc23");
    c_solve->add_option("--xmax", so_xmax, "start of the inward integration");
    c_solve->add_option("--gammaE", so_gE, "energy slope of the nodal line");
    c_solve->add_option("--gammaL", so_gL, "l(l+1) slope of the nodal line");
    c_solve->add_option("--gammaI", so_gI, "intensity slope of the nodal line");

    // fit
    auto* c_fit = app.add_subcommand("fit", "M(x_max) trace and asymptotic-basis fit");
    int f_m = 0, f_n = 3, f_points = 0;
    double f_I = 6.0, f_x00 = 0.1468, f_lo = 0.0, f_hi = 0.0;
    std::string f_bc = "bc2", f_trace_out;
    c_fit->add_option("--m", f_m, "magnetic quantum number");
    c_fit->add_option("--intensity", f_I, "reduced intensity");
    c_fit->add_option("--x00", f_x00, "nodal parameter");
    c_fit->add_option("--n", f_n, "number of coupled channels");
    c_fit->add_option("--bc", f_bc, "boundary pair: bc2 | bc23");
    c_fit->add_option("--xmax-lo", f_lo, "smallest starting point");
    c_fit->add_option("--xmax-hi", f_hi, "largest starting point");
    c_fit->add_option("--points", f_points, "trace points");
    c_fit->add_option("--trace-out", f_trace_out, "also write the trace as CSV to this path");

    // scan
    auto* c_scan = app.add_subcommand("scan", "generalized volume vs nodal parameter");
    int s_m = 0, s_n = 3, s_points = 0;
    double s_I = 6.0, s_lo = 0.0, s_hi = 0.0;
    std::string s_bc = "bc2", s_resonances_out, s_plot_out;
    c_scan->add_option("--m", s_m, "magnetic quantum number");
    c_scan->add_option("--intensity", s_I, "reduced intensity");
    c_scan->add_option("--n", s_n, "number of coupled channels");
    c_scan->add_option("--bc", s_bc, "boundary pair: bc2 | bc23");
    c_scan->add_option("--x00-lo", s_lo, "scan window start");
    c_scan->add_option("--x00-hi", s_hi, "scan window end");
    c_scan->add_option("--points", s_points, "scan grid points");
    c_scan->add_option("--resonances-out", s_resonances_out,
                       "write the resonance list (JSON) to this path");
    c_scan->add_option("--plot-out", s_plot_out, "write gnuplot-ready x00/M0 columns here");

    // repro
    auto* c_repro = app.add_subcommand("repro", "canned reproduction runs");
    std::string r_what = "table3";
    double r_I = 6.0;
    int r_points = 0;
    c_repro->add_option("what", r_what, "table3 | fig1 | fig2")->required();
    c_repro->add_option("--intensity", r_I, "reduced intensity for table3/fig2");
    c_repro->add_option("--points", r_points, "grid density override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        const cfg::RunConfig rc = resolve_config(common);

        if (*c_units) {
            const auto us = units::make_unit_system(
                units::mass_from_amu(u_mu_amu), units::c6_from_au(u_c6_au),
                units::polarizability_from_au(u_a1_au), units::polarizability_from_au(u_a2_au));
            std::string payload;
            payload += "sigma_m=" + io::fmt(us.sigma) + "\n";
            payload += "sigma_bohr=" + io::fmt(us.sigma / units::bohr_radius) + "\n";
            payload += "epsilon_J=" + io::fmt(us.epsilon) + "\n";
            payload += "epsilon_hartree=" + io::fmt(us.epsilon / units::hartree) + "\n";
            payload += "beta_W_m2=" + io::fmt(us.beta_intensity) + "\n";
            if (u_d_au >= 0.0)
                payload += "intensity_ru=" +
                           io::fmt(units::dipole_strength_to_ru(
                               units::dipole_strength_from_au(u_d_au), us)) +
                           "\n";
            emit(payload, common.out_path);
            return 0;
        }

        if (*c_coeffs) {
            const auto v = potentials::multipole_model(parse_model(co_model), co_m, co_I);
            const std::string request = "coeffs model=" + co_model + " m=" + std::to_string(co_m) +
                                        " I=" + io::fmt(co_I) + " fmt=" + rc.format;
            std::string payload;
            if (rc.format == "json") {
                json j{{"model", co_model},        {"m", co_m},       {"intensity", num(co_I)},
                       {"c2", num(v.c2)},          {"c3", num(v.c3)}, {"c4", num(v.c4)},
                       {"c5", num(v.c5)},          {"c6", num(v.c6)}};
                payload = j.dump(2) + "\n";
            } else {
                io::CsvWriter csv({"model", "m", "intensity", "c2", "c3", "c4", "c5", "c6"},
                                  request);
                csv.raw_row({co_model, std::to_string(co_m), io::fmt(co_I), io::fmt(v.c2),
                             io::fmt(v.c3), io::fmt(v.c4), io::fmt(v.c5), io::fmt(v.c6)});
                payload = csv.str();
            }
            emit(payload, common.out_path);
            return 0;
        }

        if (*c_lk) {
            const auto v = potentials::multipole_model(parse_model(lk_model), lk_m, lk_I);
            const auto bc = parse_bc(lk_bc);
            double c3f = lk_c3f;
            if (bc == refpairs::Bc::bc23 && c3f <= 0.0) c3f = std::fabs(v.c3);
            if (bc == refpairs::Bc::bc2) c3f = 0.0;
            const auto em = lk::m_expansion(v, bc, c3f, lk_m0);
            const auto ea = lk::a_expansion(v, bc, c3f);
            const auto eu = lk::u_expansion(v, bc, c3f, lk_m0);
            const std::string request = "lk model=" + lk_model + " m=" + std::to_string(lk_m) +
                                        " I=" + io::fmt(lk_I) + " bc=" + lk_bc +
                                        " c3f=" + io::fmt(c3f) + " m0=" + io::fmt(lk_m0);
            std::string payload;
            if (rc.format == "json") {
                json j{{"model", lk_model},
                       {"m", lk_m},
                       {"intensity", num(lk_I)},
                       {"bc", lk_bc},
                       {"c3f", num(c3f)},
                       {"m0", num(lk_m0)},
                       {"delta_m0",
                        (bc == refpairs::Bc::bc23) ? json(num(lk::delta_m0(v.c3, v.c4, c3f)))
                                                   : json(nullptr)},
                       {"relative_amplitude", expansion_to_json(em)},
                       {"global_amplitude", expansion_to_json(ea)},
                       {"threshold_wave", expansion_to_json(eu)}};
                payload = j.dump(2) + "\n";
            } else {
                io::CsvWriter csv({"series", "basis", "coefficient"}, request);
                payload = csv.str();
                payload += expansion_csv_rows("M", em);
                payload += expansion_csv_rows("A", ea);
                payload += expansion_csv_rows("u", eu);
            }
            emit(payload, common.out_path);
            return 0;
        }

        if (*c_solve) {
            ccsolve::SolveRequest req;
            req.channels = potentials::make_channels(so_m, so_n);
            req.intensity = so_I;
            req.nodal = {so_x00, so_gE, so_gL, so_gI};
            req.bc = parse_bc(so_bc);
            req.x_max = so_xmax;
            req.grid.rtol = rc.rtol;
            const auto sol = ccsolve::threshold_solution(req);
            json mbar = json::array();
            for (double v : sol.mbar) mbar.push_back(num(v));
            json j{{"m", so_m},
                   {"intensity", num(so_I)},
                   {"x00", num(so_x00)},
                   {"n", so_n},
                   {"bc", so_bc},
                   {"x_max", num(so_xmax)},
                   {"m_at_xmax", num(sol.m_at_xmax)},
                   {"mbar", mbar},
                   {"condition", num(sol.condition)},
                   {"nodal_residual", num(sol.nodal_residual)},
                   {"near_pole", sol.near_pole},
                   {"bc23_fallback", sol.bc23_fallback}};
            emit(j.dump(2) + "\n", common.out_path);
            return sol.near_pole ? 2 : 0;
        }

        if (*c_fit) {
            volfit::TraceConfig tc;
            tc.m = f_m;
            tc.intensity = f_I;
            tc.x00 = f_x00;
            tc.n_channels = f_n;
            tc.bc = parse_bc(f_bc);
            tc.xmax_lo = (f_lo > 0.0) ? f_lo : rc.xmax_lo;
            tc.xmax_hi = (f_hi > 0.0) ? f_hi : rc.xmax_hi;
            tc.points = (f_points > 0) ? f_points : rc.points;
            tc.grid.rtol = rc.rtol;
            tc.workers = static_cast<unsigned>(rc.workers);
            const std::string request = "fit m=" + std::to_string(f_m) + " I=" + io::fmt(f_I) +
                                        " x00=" + io::fmt(f_x00) + " n=" + std::to_string(f_n) +
                                        " bc=" + f_bc + " lo=" + io::fmt(tc.xmax_lo) +
                                        " hi=" + io::fmt(tc.xmax_hi) +
                                        " pts=" + std::to_string(tc.points);
            const auto tr = volfit::m_trace(tc);
            if (!f_trace_out.empty()) {
                io::CsvWriter csv({"x_max", "M"}, request);
                for (std::size_t i = 0; i < tr.xmax.size(); ++i)
                    csv.row({tr.xmax[i], tr.m[i]});
                emit(csv.str(), f_trace_out);
            }
            if (tr.resonant) {
                json j{{"resonant", true}, {"worst_condition", num(tr.worst_condition)}};
                emit(j.dump(2) + "\n", common.out_path);
                return 2;
            }
            auto fit = volfit::fit_expansion(tr);
            json j = fit_to_json(fit);
            j["request"] = request;
            emit(j.dump(2) + "\n", common.out_path);
            return 0;
        }

        if (*c_scan) {
            scan::ScanConfig sc;
            sc.m = s_m;
            sc.intensity = s_I;
            sc.n_channels = s_n;
            sc.bc = parse_bc(s_bc);
            sc.x00_lo = (s_lo > 0.0) ? s_lo : rc.x00_lo;
            sc.x00_hi = (s_hi > 0.0) ? s_hi : rc.x00_hi;
            sc.points = (s_points > 0) ? s_points : rc.scan_points;
            sc.trace.xmax_lo = rc.xmax_lo;
            sc.trace.xmax_hi = rc.xmax_hi;
            sc.trace.points = rc.points;
            sc.trace.grid.rtol = rc.rtol;
            sc.workers = static_cast<unsigned>(rc.workers);
            const std::string request =
                "scan m=" + std::to_string(s_m) + " I=" + io::fmt(s_I) +
                " n=" + std::to_string(s_n) + " bc=" + s_bc + " lo=" + io::fmt(sc.x00_lo) +
                " hi=" + io::fmt(sc.x00_hi) + " pts=" + std::to_string(sc.points) +
                " trace=" + io::fmt(sc.trace.xmax_lo) + ":" + io::fmt(sc.trace.xmax_hi) + ":" +
                std::to_string(sc.trace.points);

            std::string payload, res_payload, plot_payload;
            const auto cached = cfg::cache_lookup(rc, request);
            if (cached) {
                // cache stores curve CSV + resonance JSON separated by a marker
                const std::string marker = "\n#== resonances ==\n";
                const auto pos = cached->find(marker);
                payload = cached->substr(0, pos);
                res_payload = cached->substr(pos + marker.size());
            } else {
                const auto curve = scan::scan_x00(sc);
                payload = scan_csv(curve, request);
                res_payload = resonances_json(curve.resonances).dump(2) + "\n";
                cfg::cache_store(rc, request, payload + "\n#== resonances ==\n" + res_payload);
            }
            if (!s_plot_out.empty()) {
                std::istringstream in(payload);
                std::string line;
                std::getline(in, line);  // header
                std::getline(in, line);  // config comment
                plot_payload = "# x00  M0\n";
                while (std::getline(in, line)) {
                    const auto c1 = line.find(',');
                    const auto c2 = line.find(',', c1 + 1);
                    plot_payload += line.substr(0, c1) + "  " + line.substr(c1 + 1, c2 - c1 - 1) +
                                    "\n";
                }
                emit(plot_payload, s_plot_out);
            }
            if (!s_resonances_out.empty()) emit(res_payload, s_resonances_out);
            emit(payload, common.out_path);
            return 0;
        }

        if (*c_repro) {
            if (r_what == "table3") {
                // fitted vs analytic expansion coefficients for both m and
                // both reference pairs at one intensity
                const std::string request = "repro table3 I=" + io::fmt(r_I);
                io::CsvWriter csv({"m", "bc", "kind", "x2", "x", "lnx", "constant", "lnx_over_x",
                                   "inv_x", "alpha", "beta"},
                                  request);
                for (int m : {0, 1}) {
                    const auto vad =
                        potentials::multipole_model(potentials::MultipoleModel::adiabatic, m, r_I);
                    for (auto bc : {refpairs::Bc::bc2, refpairs::Bc::bc23}) {
                        const double c3f =
                            (bc == refpairs::Bc::bc23) ? std::fabs(vad.c3) : 0.0;
                        // fitted row: five off-resonance nodal parameters
                        std::vector<double> vs, etas;
                        volfit::FitResult fit;
                        for (double x00 : {0.1460, 0.1464, 0.1468, 0.1472, 0.1476}) {
                            volfit::TraceConfig tc;
                            tc.m = m;
                            tc.intensity = r_I;
                            tc.x00 = x00;
                            tc.n_channels = 3;
                            tc.bc = bc;
                            tc.points = (r_points > 0) ? r_points : rc.points;
                            tc.grid.rtol = rc.rtol;
                            tc.workers = static_cast<unsigned>(rc.workers);
                            fit = volfit::fit_expansion(volfit::m_trace(tc));
                            vs.push_back(fit.volume);
                            etas.push_back(fit.eta);
                        }
                        double alpha = 0.0, beta = 0.0;
                        if (bc == refpairs::Bc::bc2 || m != 0) {
                            auto lf = linalg::fit_line(vs, etas);
                            alpha = lf.slope;
                            beta = lf.intercept;
                        }
                        csv.raw_row({std::to_string(m), bc == refpairs::Bc::bc2 ? "bc2" : "bc23",
                                     "fitted", io::fmt(fit.coef(lk::BasisTag::x2)),
                                     io::fmt(fit.coef(lk::BasisTag::x1)),
                                     io::fmt(fit.coef(lk::BasisTag::log_x)), io::fmt(fit.volume),
                                     io::fmt(fit.coef(lk::BasisTag::log_x_over_x)),
                                     io::fmt(fit.eta), io::fmt(alpha), io::fmt(beta)});
                        const auto e = lk::m_expansion(vad, bc, c3f, 0.0);
                        const auto e1 = lk::m_expansion(vad, bc, c3f, 1.0);
                        csv.raw_row(
                            {std::to_string(m), bc == refpairs::Bc::bc2 ? "bc2" : "bc23",
                             "analytic", io::fmt(e.coef(lk::BasisTag::x2)),
                             io::fmt(e.coef(lk::BasisTag::x1)),
                             io::fmt(e.coef(lk::BasisTag::log_x)), "0.0",
                             io::fmt(e.coef(lk::BasisTag::log_x_over_x)),
                             io::fmt(e.coef(lk::BasisTag::inv_x)),
                             io::fmt(e1.coef(lk::BasisTag::inv_x) - e.coef(lk::BasisTag::inv_x)),
                             io::fmt(e.coef(lk::BasisTag::inv_x))});
                    }
                }
                emit(csv.str(), common.out_path);
                return 0;
            }
            if (r_what == "fig1") {
                const std::string request = "repro fig1";
                io::CsvWriter csv({"x00", "a_swave", "volume_param_pwave"}, request);
                const int pts = (r_points > 0) ? r_points : 150;
                for (int i = 0; i < pts; ++i) {
                    const double x00 = 0.142152 + (0.152135 - 0.142152) * i / (pts - 1.0);
                    const auto s = scan::field_free_params(0, x00);
                    const auto p = scan::field_free_params(1, x00);
                    csv.row({x00, s.a, p.a_param});
                }
                emit(csv.str(), common.out_path);
                return 0;
            }
            if (r_what == "fig2") {
                const std::string request = "repro fig2 I=" + io::fmt(r_I);
                io::CsvWriter csv({"m", "n", "x00", "M0", "pole_flag"}, request);
                for (int m : {0, 1}) {
                    for (int n = 1; n <= 4; ++n) {
                        scan::ScanConfig sc;
                        sc.m = m;
                        sc.intensity = r_I;
                        sc.n_channels = n;
                        sc.points = (r_points > 0) ? r_points : rc.scan_points;
                        sc.trace.points = rc.points;
                        sc.trace.grid.rtol = rc.rtol;
                        sc.workers = static_cast<unsigned>(rc.workers);
                        const auto curve = scan::scan_x00(sc);
                        for (const auto& p : curve.points)
                            csv.raw_row({std::to_string(m), std::to_string(n), io::fmt(p.x00),
                                         std::isfinite(p.m0) ? io::fmt(p.m0) : "0.0",
                                         p.pole_flag ? "1" : "0"});
                    }
                }
                emit(csv.str(), common.out_path);
                return 0;
            }
            throw std::domain_error("unknown repro target: " + r_what);
        }
        return 64;
    } catch (const cfg::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
