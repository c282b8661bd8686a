// Batch front end: load a JSON run configuration, execute verification
// suites, and emit deterministic reports under the output directory.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "conetheta/report.hpp"

using namespace conetheta;

namespace {

RunConfig load_config(const std::string& path) {
    if (path.empty()) {
        RunConfig cfg;
        cfg.validate();
        return cfg;
    }
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    nlohmann::json j;
    in >> j;
    return RunConfig::from_json(j);
}

int run_suites(RunConfig cfg, const std::vector<std::string>& suites, const std::string& outdir) {
    if (!suites.empty()) cfg.suites = suites;
    const RunResult result = run(cfg, outdir);
    for (const auto& s : result.suites) {
        std::printf("[%s] %s\n", s.pass ? "PASS" : "FAIL", s.suite.c_str());
        for (const auto& c : s.checks)
            std::printf("    %-34s measured %.6g  threshold %.6g  %s\n", c.name.c_str(),
                        c.measured, c.threshold, c.passed ? "ok" : "FAILED");
    }
    return result.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical verification of mapping-cone isomorphisms of stable bundles on tori"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path;
    std::string outdir = ".";
    bool deterministic = true;
    bool allow_a0 = false;
    app.add_option("--config", config_path, "path to a JSON run configuration");
    app.add_option("--out", outdir, "output directory for report.json and CSV dumps");
    app.add_flag("--deterministic,!--no-deterministic", deterministic,
                 "byte-stable report output (default on)");
    app.add_flag("--debug-allow-a0", allow_a0,
                 "unlock the hypothesis-violating a = 0 branch of the identity sum");

    auto* verify = app.add_subcommand("verify", "run one verification suite");
    verify->require_subcommand(1);
    verify->fallthrough();
    for (const char* name : {"cone", "m2", "homdims", "identity"})
        verify->add_subcommand(name)->fallthrough();

    auto* ctau_cmd = app.add_subcommand("ctau", "evaluate c_tau by both routes");
    ctau_cmd->fallthrough();

    auto* sl2z_cmd = app.add_subcommand("sl2z", "lattice transport utilities");
    sl2z_cmd->fallthrough();
    auto* reduce_cmd = sl2z_cmd->add_subcommand("reduce", "reduction matrix of a slope pair");
    reduce_cmd->fallthrough();
    int rn = 1, ra = 0, rm = 1, rb = 1;
    reduce_cmd->add_option("-n", rn, "source winding")->required();
    reduce_cmd->add_option("-a", ra, "source degree")->required();
    reduce_cmd->add_option("-m", rm, "target winding")->required();
    reduce_cmd->add_option("-b", rb, "target degree")->required();

    auto* scan_cmd = app.add_subcommand("scan", "sweep the tau grid from the config into a CSV");
    scan_cmd->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        cfg.deterministic = deterministic;
        cfg.allow_a0 = allow_a0;

        if (reduce_cmd->parsed()) {
            const LatticeMatrix g = reduction_matrix(rn, ra, rm, rb);
            const auto tc = transport_cone_class(g, rn, ra, rm, rb, cfg.mu(), cfg.nu(),
                                                 cfg.moduli());
            std::printf("reduction matrix: [[%lld, %lld], [%lld, %lld]]  det = %lld\n", g.g11,
                        g.g12, g.g21, g.g22, g.det());
            std::printf("cone rank %d degree %d, eta class = %.12g + %.12g i\n", tc.rank,
                        tc.degree, tc.eta.real(), tc.eta.imag());
            return 0;
        }
        if (scan_cmd->parsed()) {
            const std::string csv = scan_csv(cfg);
            std::filesystem::create_directories(outdir);
            std::ofstream out(std::filesystem::path(outdir) / "scan.csv");
            out << csv;
            std::fputs(csv.c_str(), stdout);
            return 0;
        }
        if (ctau_cmd->parsed()) return run_suites(cfg, {"ctau"}, outdir);
        if (verify->parsed()) {
            for (const char* name : {"cone", "m2", "homdims", "identity"})
                if (verify->get_subcommand(name)->parsed())
                    return run_suites(cfg, {name}, outdir);
        }
        return run_suites(cfg, {}, outdir);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
