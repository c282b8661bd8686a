#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "conetheta/bundle.hpp"
#include "conetheta/cone.hpp"
#include "conetheta/dolbeault.hpp"
#include "conetheta/fukaya.hpp"
#include "conetheta/sl2z.hpp"
#include "conetheta/theta.hpp"

namespace conetheta {

/// One batch configuration: the modulus, the two line-bundle moduli in the
/// (1, tau) basis, evaluation knobs, and the suites to run.
struct RunConfig {
    cplx tau{0.0, 1.0};
    double mu_p = pi, mu_q = 0.0;
    double nu_s = 0.0, nu_t = 0.0;
    double epsilon = pi / 2;
    int truncation = 25;
    int grid = 32;
    double tol = 1e-6;
    std::vector<std::string> suites = {"cone"};
    std::optional<std::array<double, 2>> eta_override;  // (u, v) coefficients
    std::vector<cplx> tau_grid;
    bool deterministic = true;
    bool allow_a0 = false;

    cplx mu() const { return cplx(mu_p, 0.0) + mu_q * tau; }
    cplx nu() const { return cplx(nu_s, 0.0) + nu_t * tau; }
    ModuliParams moduli() const { return ModuliParams(tau, truncation, std::min(tol, 1e-10)); }

    void validate() const {
        if (!(tau.imag() > 0.0)) throw std::invalid_argument("config.tau: Im tau must be positive");
        if (!(epsilon > 0.0 && epsilon < pi))
            throw std::invalid_argument("config.epsilon: must lie in (0, pi)");
        if (truncation < 10) throw std::invalid_argument("config.truncation: must be at least 10");
        if (grid < 16) throw std::invalid_argument("config.grid: must be at least 16");
        if (!(tol >= 1e-12)) throw std::invalid_argument("config.tol: must be at least 1e-12");
        for (const auto& s : suites)
            if (s != "theta" && s != "ctau" && s != "cone" && s != "m2" && s != "homdims" &&
                s != "identity" && s != "sl2z")
                throw std::invalid_argument("config.suites: unknown suite '" + s + "'");
        // refuse configurations whose series cutoff cannot reach the tolerance
        const double series_tol = std::min(tol, 1e-10);
        const int need = theta_cutoff_for(std::min(tau.imag(), (-1.0 / tau).imag()), series_tol);
        if (need > truncation)
            throw std::invalid_argument(
                "config: truncation " + std::to_string(truncation) +
                " cannot reach tol at this tau (needs " + std::to_string(need) + ")");
        for (cplx t : tau_grid)
            if (!(t.imag() > 0.0))
                throw std::invalid_argument("config.tau_grid: every tau needs Im tau > 0");
    }

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig c;
        auto pair_field = [&](const char* name, double& first, double& second, bool required) {
            if (!j.contains(name)) {
                if (required) throw std::invalid_argument(std::string("config.") + name + ": missing");
                return;
            }
            const auto& v = j.at(name);
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                throw std::invalid_argument(std::string("config.") + name +
                                            ": expected [number, number]");
            first = v[0].get<double>();
            second = v[1].get<double>();
        };
        double tr = 0.0, ti = 1.0;
        pair_field("tau", tr, ti, true);
        c.tau = cplx(tr, ti);
        pair_field("mu", c.mu_p, c.mu_q, false);
        pair_field("nu", c.nu_s, c.nu_t, false);
        if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
        if (j.contains("truncation")) c.truncation = j.at("truncation").get<int>();
        if (j.contains("grid")) c.grid = j.at("grid").get<int>();
        if (j.contains("tol")) c.tol = j.at("tol").get<double>();
        if (j.contains("suites")) {
            if (!j.at("suites").is_array())
                throw std::invalid_argument("config.suites: expected an array of names");
            c.suites = j.at("suites").get<std::vector<std::string>>();
        }
        if (j.contains("eta_override")) {
            std::array<double, 2> uv{0.0, 0.0};
            pair_field("eta_override", uv[0], uv[1], false);
            c.eta_override = uv;
        }
        if (j.contains("tau_grid")) {
            for (const auto& e : j.at("tau_grid")) {
                if (!e.is_array() || e.size() != 2)
                    throw std::invalid_argument("config.tau_grid: expected [[re, im], ...]");
                c.tau_grid.emplace_back(e[0].get<double>(), e[1].get<double>());
            }
        }
        c.validate();
        return c;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tau"] = {tau.real(), tau.imag()};
        j["mu"] = {mu_p, mu_q};
        j["nu"] = {nu_s, nu_t};
        j["epsilon"] = epsilon;
        j["truncation"] = truncation;
        j["grid"] = grid;
        j["tol"] = tol;
        j["suites"] = suites;
        if (eta_override) j["eta_override"] = {(*eta_override)[0], (*eta_override)[1]};
        return j;
    }
};

struct CheckRecord {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

struct SuiteReport {
    std::string suite;
    bool pass = true;
    std::vector<CheckRecord> checks;
    nlohmann::json extra;  // suite-specific payload, e.g. bundle descriptors
    double wall_ms = 0.0;

    void add(const std::string& name, double measured, double threshold, bool passed) {
        checks.push_back({name, measured, threshold, passed});
        pass = pass && passed;
    }
    void add_below(const std::string& name, double measured, double threshold) {
        add(name, measured, threshold, measured <= threshold);
    }
    void add_above(const std::string& name, double measured, double threshold) {
        add(name, measured, threshold, measured > threshold);
    }
};

namespace detail {

inline std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline SuiteReport suite_theta(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "theta";
    const ModuliParams prm = cfg.moduli();
    std::mt19937 rng(11821);
    std::uniform_real_distribution<double> ur(-0.4, 0.4);
    double qp1 = 0.0, qp2 = 0.0;
    for (int rep_i = 0; rep_i < 100; ++rep_i) {
        const cplx tau(ur(rng), 0.8 + 0.4 * ur(rng));
        const cplx z(ur(rng), 0.1 * ur(rng));
        const ThetaChar c{rep_i % 2 ? 0.5 : 0.0, rep_i % 3 ? 0.5 : 0.0};
        const ModuliParams local(tau, prm.series_cutoff, prm.tol);
        qp1 = std::max(qp1, std::abs(theta(c, z + 1.0, local, tau) -
                                     std::exp(two_pi * iu * c.alpha) * theta(c, z, local, tau)));
        const cplx factor = std::exp(-pi * iu * tau - two_pi * iu * (z + c.beta));
        qp2 = std::max(qp2, std::abs(theta(c, z + tau, local, tau) -
                                     factor * theta(c, z, local, tau)));
    }
    rep.add_below("quasi_periodicity_integer", qp1, 1e-12);
    rep.add_below("quasi_periodicity_lattice", qp2, 1e-12);

    double zero_worst = 0.0;
    for (int al = -1; al <= 1; ++al)
        for (int be = -1; be <= 1; ++be)
            zero_worst = std::max(
                zero_worst, std::abs(theta(ThetaChar{0.5, 0.5},
                                           static_cast<double>(al) * cfg.tau +
                                               cplx(static_cast<double>(be), 0.0),
                                           prm, cfg.tau)));
    rep.add_below("odd_null_lattice_zeros", zero_worst, 1e-10);

    double fd_worst = 0.0;
    const double h = 1e-6;
    for (cplx z : {cplx(0.3, 0.1), cplx(-0.2, 0.05)}) {
        const cplx fd = (theta(ThetaChar{0.5, 0.5}, z + h, prm, cfg.tau) -
                         theta(ThetaChar{0.5, 0.5}, z - h, prm, cfg.tau)) /
                        (2.0 * h);
        const cplx dz = theta_dz(ThetaChar{0.5, 0.5}, z, prm, cfg.tau);
        fd_worst = std::max(fd_worst, std::abs(fd - dz) / std::max(1.0, std::abs(dz)));
    }
    rep.add_below("derivative_vs_finite_difference", fd_worst, 1e-7);

    std::mt19937 rng2(55197);
    double jac_worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const cplx w(ur(rng2), 0.8 + 0.8 * (ur(rng2) + 0.5));
        const ModuliParams local(w, prm.series_cutoff, prm.tol);
        const cplx jp = jacobi_null_product(local, w);
        const cplx dz = theta_dz(ThetaChar{0.5, 0.5}, 0.0, local, w);
        jac_worst = std::max(jac_worst, std::abs(jp - dz) / std::abs(dz));
    }
    rep.add_below("jacobi_identity_relative", jac_worst, 1e-10);
    return rep;
}

inline SuiteReport suite_ctau(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "ctau";
    const ModuliParams prm = cfg.moduli();
    const cplx cd = c_tau(prm, CTauRoute::Direct);
    const cplx cj = c_tau(prm, CTauRoute::Jacobi);
    rep.add_below("dual_route_relative", std::abs(cd - cj) / std::abs(cd), 1e-10);
    rep.add_above("magnitude", std::abs(cd), 1e-8);
    const cplx m3 = m3_nontransversal_constant(prm);
    const cplx rhs = (std::conj(cfg.tau) - cfg.tau) / (4.0 * pi * cfg.tau) * iu * m3;
    rep.add_below("cross_side_identity_relative", std::abs(cd - rhs) / std::abs(cd), 1e-10);
    return rep;
}

inline SuiteReport suite_cone(const RunConfig& cfg, std::vector<GridResidualRow>* dump) {
    SuiteReport rep;
    rep.suite = "cone";
    const ModuliParams prm = cfg.moduli();
    const cplx mu = cfg.mu(), nu = cfg.nu();
    if (cfg.eta_override) {
        const cplx eta_req = cplx((*cfg.eta_override)[0], 0.0) + (*cfg.eta_override)[1] * cfg.tau;
        const cplx cls = eta_class(mu, nu, prm);
        if (!is_lattice_point(eta_req - cls, cfg.tau)) {
            // Off the cone class there is no morphism pair to verify; record
            // the vanishing Hom dimensions and fail the verdict.
            const BumpMorphism bump = make_bump(cfg.epsilon, mu, nu, prm);
            const auto into = solve_cone_h0(ConeHomDirection::IntoCone, (*cfg.eta_override)[0],
                                            (*cfg.eta_override)[1], bump, prm);
            const auto outof = solve_cone_h0(ConeHomDirection::OutOfCone, (*cfg.eta_override)[0],
                                             (*cfg.eta_override)[1], bump, prm);
            rep.add("hom_dim_into_cone", into.dimension, 0.0, into.dimension == 0 && into.conclusive);
            rep.add("hom_dim_out_of_cone", outof.dimension, 0.0,
                    outof.dimension == 0 && outof.conclusive);
            rep.add("verdict", 0.0, 1.0, false);  // verification not applicable off class
            return rep;
        }
    }
    const ConeReport c = verify_cone(mu, nu, prm, cfg.grid, cfg.truncation, cfg.tol,
                                     BumpProfile::RaisedCosine, dump);
    rep.extra = {{"eta", {c.eta_used.real(), c.eta_used.imag()}},
                 {"c_tau_direct", {c.c_tau_direct.real(), c.c_tau_direct.imag()}},
                 {"c_tau_jacobi", {c.c_tau_jacobi.real(), c.c_tau_jacobi.imag()}},
                 {"residual_phi_phitilde", c.residual_phi_phitilde},
                 {"residual_phitilde_phi", c.residual_phitilde_phi},
                 {"verdict", c.verdict},
                 {"config", cfg.to_json()}};
    rep.add_below("residual_phi_phitilde", c.residual_phi_phitilde, cfg.tol);
    rep.add_below("residual_phitilde_phi", c.residual_phitilde_phi, cfg.tol);
    rep.add_below("offdiagonal_max", c.offdiag_max, cfg.tol);
    rep.add_below("diagonal_spread_max", c.diag_spread_max, cfg.tol);
    rep.add_above("c_tau_magnitude", std::abs(c.c_tau_direct), 1e-8);
    rep.add_below("c_tau_dual_route",
                  std::abs(c.c_tau_direct - c.c_tau_jacobi) / std::abs(c.c_tau_direct), 1e-10);
    rep.add("verdict", c.verdict ? 1.0 : 0.0, 1.0, c.verdict);
    return rep;
}

inline SuiteReport suite_m2(const RunConfig& cfg, std::vector<TriangleDatum>* tri_dump) {
    SuiteReport rep;
    rep.suite = "m2";
    const ModuliParams prm = cfg.moduli();
    std::mt19937 rng(771230);
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    double vanish_worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        TriangleConfig c;
        c.p = pi;
        c.s = 0.0;
        c.u = 0.0;
        c.q = ur(rng);
        c.t = ur(rng);
        c.v = c.q + c.t + pi;
        vanish_worst = std::max(vanish_worst, std::abs(m2_constant(c, prm, M2Route::Triangles)));
    }
    rep.add_below("vanishing_on_cone_class", vanish_worst, 1e-10);

    double route_worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        TriangleConfig c;
        c.p = pi;
        c.s = 0.0;
        c.u = std::fmod(pi + pi + 1.3, two_pi);
        c.q = ur(rng);
        c.t = ur(rng);
        c.v = ur(rng);
        const cplx a = m2_constant(c, prm, M2Route::Triangles);
        const cplx b = m2_constant(c, prm, M2Route::ClosedForm);
        route_worst = std::max(route_worst, std::abs(a - b) / (1.0 + std::abs(b)));
    }
    rep.add_below("route_agreement", route_worst, 1e-8);

    if (tri_dump) {
        TriangleConfig c;
        c.p = pi;
        c.s = 0.0;
        c.u = 0.0;
        c.q = cfg.mu_q;
        c.t = cfg.nu_t;
        c.v = c.q + c.t + pi;
        *tri_dump = enumerate_triangles(c, prm, 6);
    }
    return rep;
}

inline nlohmann::json bundle_to_json(const BundleDescriptor& b) {
    return {{"n", b.n},       {"a", b.a}, {"mu_re", b.mu.real()},
            {"mu_im", b.mu.imag()}, {"p", b.p}, {"q", b.q}};
}

inline SuiteReport suite_homdims(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "homdims";
    const ModuliParams prm = cfg.moduli();
    std::vector<BundleDescriptor> some;
    for (auto [n, a] : {std::pair{1, 0}, {1, 1}, {1, -1}, {2, 1}, {3, 1}})
        some.push_back(make_bundle(n, a, cfg.mu(), prm));
    rep.extra["bundles"] = nlohmann::json::array();
    for (const auto& b : some) rep.extra["bundles"].push_back(bundle_to_json(b));
    int mismatches = 0, checked = 0;
    bool conclusive = true;
    for (const auto& b1 : some)
        for (const auto& b2 : some) {
            const long long cross = static_cast<long long>(b2.a) * b1.n -
                                    static_cast<long long>(b1.a) * b2.n;
            if (cross == 0 || std::llabs(cross) > 6) continue;
            const auto est = solve_h0(b1, b2);
            conclusive = conclusive && est.conclusive;
            if (est.dimension != (cross > 0 ? static_cast<int>(cross) : 0)) ++mismatches;
            ++checked;
        }
    const auto eh = make_bundle(2, 1, cfg.mu(), prm);
    const auto eh_shift = make_bundle(2, 1, cfg.mu() + two_pi + two_pi * cfg.tau, prm);
    const auto eq = solve_h0(eh, eh_shift);
    conclusive = conclusive && eq.conclusive;
    if (eq.dimension != 1) ++mismatches;
    ++checked;
    rep.add("pairs_checked", checked, 1.0, checked > 0);
    rep.add("dimension_mismatches", mismatches, 0.0, mismatches == 0);
    rep.add("all_conclusive", conclusive ? 1.0 : 0.0, 1.0, conclusive);
    return rep;
}

inline SuiteReport suite_identity(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "identity";
    const ModuliParams prm = cfg.moduli();
    const BumpMorphism bump = make_bump(cfg.epsilon, cfg.mu(), cfg.nu(), prm);
    double worst = 0.0;
    for (int a : {1, 2, 3, -1, -2})
        for (int k = 0; k < 16; ++k)
            worst = std::max(worst,
                             std::abs(identity_id_sum(a, bump, prm, two_pi * k / 16.0)));
    rep.add_below("identity_sum_nonzero_a", worst, 1e-8);
    if (cfg.allow_a0) {
        const cplx c = c_tau(prm, CTauRoute::Direct);
        const cplx expect = 2.0 * cfg.tau / (std::conj(cfg.tau) - cfg.tau) * c / iu;
        const cplx got = identity_id_sum(0, bump, prm, 0.4, true);
        rep.add_below("a0_debug_value_relative", std::abs(got - expect) / std::abs(expect), 1e-9);
    }
    return rep;
}

inline SuiteReport suite_sl2z(const RunConfig& cfg) {
    SuiteReport rep;
    rep.suite = "sl2z";
    const ModuliParams prm = cfg.moduli();
    std::mt19937 rng(314159);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> len(1, 6);
    int det_fail = 0, slope_fail = 0, class_fail = 0;
    for (int repn = 0; repn < 50; ++repn) {
        int n = 1, a = 0, m = 1, b = 1;
        const int steps = len(rng);
        for (int i = 0; i < steps; ++i) {
            if (coin(rng)) {
                m += n;
                b += a;
            } else {
                n += m;
                a += b;
            }
        }
        const LatticeMatrix g = reduction_matrix(n, a, m, b);
        if (g.det() != 1) ++det_fail;
        const auto tc = transport_cone_class(g, n, a, m, b, cfg.mu(), cfg.nu(), prm);
        if (tc.rank != m + n || tc.degree != a + b) ++slope_fail;
        if (std::abs(tc.eta - eta_class(cfg.mu(), cfg.nu(), prm)) > 0.0) ++class_fail;
    }
    rep.add("determinant_failures", det_fail, 0.0, det_fail == 0);
    rep.add("mediant_slope_failures", slope_fail, 0.0, slope_fail == 0);
    rep.add("eta_class_invariance_failures", class_fail, 0.0, class_fail == 0);
    return rep;
}

}  // namespace detail

inline SuiteReport run_suite(const std::string& name, const RunConfig& cfg,
                             std::vector<GridResidualRow>* cone_dump = nullptr,
                             std::vector<TriangleDatum>* tri_dump = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport rep;
    if (name == "theta") rep = detail::suite_theta(cfg);
    else if (name == "ctau") rep = detail::suite_ctau(cfg);
    else if (name == "cone") rep = detail::suite_cone(cfg, cone_dump);
    else if (name == "m2") rep = detail::suite_m2(cfg, tri_dump);
    else if (name == "homdims") rep = detail::suite_homdims(cfg);
    else if (name == "identity") rep = detail::suite_identity(cfg);
    else if (name == "sl2z") rep = detail::suite_sl2z(cfg);
    else throw std::invalid_argument("unknown suite '" + name + "'");
    const auto t1 = std::chrono::steady_clock::now();
    rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rep;
}

struct RunResult {
    int exit_status = 0;
    std::vector<SuiteReport> suites;
};

/// Execute the configured suites and write report.json (byte-stable for a
/// fixed config), CSV dumps for the grid residuals and triangle data, and
/// wall-clock timings in a separate unhashed file.
inline RunResult run(const RunConfig& cfg, const std::filesystem::path& outdir) {
    cfg.validate();
    std::filesystem::create_directories(outdir);
    RunResult result;
    std::vector<GridResidualRow> cone_dump;
    std::vector<TriangleDatum> tri_dump;
    nlohmann::json jsuites = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& name : cfg.suites) {
        SuiteReport rep = run_suite(name, cfg, &cone_dump, &tri_dump);
        all_pass = all_pass && rep.pass;
        nlohmann::json js;
        js["suite"] = rep.suite;
        js["pass"] = rep.pass;
        js["checks"] = nlohmann::json::array();
        for (const auto& c : rep.checks)
            js["checks"].push_back({{"name", c.name},
                                    {"measured", c.measured},
                                    {"threshold", c.threshold},
                                    {"passed", c.passed}});
        if (!rep.extra.is_null()) js["extra"] = rep.extra;
        if (!cfg.deterministic) js["wall_ms"] = rep.wall_ms;
        jsuites.push_back(js);
        result.suites.push_back(std::move(rep));
    }
    nlohmann::json report;
    report["schema"] = 1;
    report["config"] = cfg.to_json();
    report["pass"] = all_pass;
    report["suites"] = jsuites;
    {
        std::ofstream out(outdir / "report.json");
        out << report.dump(2) << "\n";
    }
    {
        nlohmann::json timing;
        for (const auto& s : result.suites) timing[s.suite] = s.wall_ms;
        std::ofstream out(outdir / "timings.json");
        out << timing.dump(2) << "\n";
    }
    if (!cone_dump.empty()) {
        std::ofstream out(outdir / "cone_grid.csv");
        out << "x,y,res11,res12,res21,res22\n";
        for (const auto& r : cone_dump)
            out << detail::fmt12(r.x) << ',' << detail::fmt12(r.y) << ',' << detail::fmt12(r.res[0])
                << ',' << detail::fmt12(r.res[1]) << ',' << detail::fmt12(r.res[2]) << ','
                << detail::fmt12(r.res[3]) << "\n";
    }
    if (!tri_dump.empty()) {
        std::ofstream out(outdir / "triangles.csv");
        out << "n,area_euclid,area_sympl_re,area_sympl_im,holonomy_re,holonomy_im,sign,term_re,"
               "term_im\n";
        for (const auto& t : tri_dump)
            out << t.index << ',' << detail::fmt12(t.area_euclid) << ','
                << detail::fmt12(t.area_sympl.real()) << ',' << detail::fmt12(t.area_sympl.imag())
                << ',' << detail::fmt12(t.holonomy.real()) << ','
                << detail::fmt12(t.holonomy.imag()) << ',' << t.sign << ','
                << detail::fmt12(t.term.real()) << ',' << detail::fmt12(t.term.imag()) << "\n";
    }
    result.exit_status = all_pass ? 0 : 1;
    return result;
}

/// One CSV row per tau of the scan grid: both c_tau routes, the on-class m2
/// magnitude, the worst cone residual and the verdict.
inline std::string scan_csv(const RunConfig& cfg) {
    cfg.validate();
    std::ostringstream out;
    out << "tau_re,tau_im,c_tau_direct_re,c_tau_direct_im,c_tau_jacobi_re,c_tau_jacobi_im,"
           "m2_abs,cone_residual,verdict\n";
    for (cplx tau : cfg.tau_grid) {
        RunConfig local = cfg;
        local.tau = tau;
        local.tau_grid.clear();
        local.validate();
        const ModuliParams prm = local.moduli();
        const cplx cd = c_tau(prm, CTauRoute::Direct);
        const cplx cj = c_tau(prm, CTauRoute::Jacobi);
        TriangleConfig tc;
        tc.p = pi;
        tc.s = 0.0;
        tc.u = 0.0;
        tc.q = local.mu_q;
        tc.t = local.nu_t;
        tc.v = tc.q + tc.t + pi;
        const double m2_abs = std::abs(m2_constant(tc, prm, M2Route::ClosedForm));
        const ConeReport c =
            verify_cone(local.mu(), local.nu(), prm, local.grid, local.truncation, local.tol);
        const double res = std::max(c.residual_phi_phitilde, c.residual_phitilde_phi);
        out << detail::fmt12(tau.real()) << ',' << detail::fmt12(tau.imag()) << ','
            << detail::fmt12(cd.real()) << ',' << detail::fmt12(cd.imag()) << ','
            << detail::fmt12(cj.real()) << ',' << detail::fmt12(cj.imag()) << ','
            << detail::fmt12(m2_abs) << ',' << detail::fmt12(res) << ','
            << (c.verdict ? "true" : "false") << "\n";
    }
    return out.str();
}

}  // namespace conetheta
