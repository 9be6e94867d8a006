#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "phaseless1d/csv.hpp"
#include "phaseless1d/dataset.hpp"
#include "phaseless1d/errors.hpp"
#include "phaseless1d/forward.hpp"
#include "phaseless1d/inversion.hpp"
#include "phaseless1d/recovery.hpp"
#include "phaseless1d/version.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ph1d {
namespace {

struct RunConfig {
    std::string potential;  // inline JSON or file path
    double kmin = 0.1, kmax = 10.0;
    int kcount = 200;
    std::vector<double> positions;
    std::string method = "s3";
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out = "out";
    double eps_det = 1e-6;
    std::string derivative_mode = "analytic";
    double fd_step = 1e-4;
    std::string dataset;  // recover: read instead of synthesizing
    std::string input;    // invert: sweep or recovery CSV
    double xlo = -1.0, xhi = 3.0;
    int xcount = 401;
    double node_spacing = 0.01;
    double taper_beta = 2.5;
    double rk_tol = 1e-10;
    bool serial = false;

    // Hash input: everything that shapes the numbers. The output directory and
    // the serial/parallel switch do not (sweeps are bitwise order-independent).
    json to_json() const {
        return json{{"potential", potential}, {"kmin", kmin},   {"kmax", kmax},
                    {"kcount", kcount},       {"positions", positions},
                    {"method", method},       {"noise", noise}, {"seed", seed},
                    {"eps_det", eps_det},     {"derivative_mode", derivative_mode},
                    {"fd_step", fd_step},     {"dataset", dataset},
                    {"input", input},         {"xlo", xlo},     {"xhi", xhi},
                    {"xcount", xcount},       {"node_spacing", node_spacing},
                    {"taper_beta", taper_beta},                 {"rk_tol", rk_tol}};
    }
};

void apply_config_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config \"" + path + "\"");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad JSON config \"" + path + "\": " + e.what());
    }
    if (j.contains("potential") && j["potential"].is_object())
        c.potential = j["potential"].dump();
    else
        c.potential = j.value("potential", c.potential);
    c.kmin = j.value("kmin", c.kmin);
    c.kmax = j.value("kmax", c.kmax);
    c.kcount = j.value("kcount", c.kcount);
    c.positions = j.value("positions", c.positions);
    c.method = j.value("method", c.method);
    c.noise = j.value("noise", c.noise);
    c.seed = j.value("seed", c.seed);
    c.out = j.value("out", c.out);
    c.eps_det = j.value("eps_det", c.eps_det);
    c.derivative_mode = j.value("derivative_mode", c.derivative_mode);
    c.fd_step = j.value("fd_step", c.fd_step);
    c.dataset = j.value("dataset", c.dataset);
    c.input = j.value("input", c.input);
    c.xlo = j.value("xlo", c.xlo);
    c.xhi = j.value("xhi", c.xhi);
    c.xcount = j.value("xcount", c.xcount);
    c.node_spacing = j.value("node_spacing", c.node_spacing);
    c.taper_beta = j.value("taper_beta", c.taper_beta);
    c.rk_tol = j.value("rk_tol", c.rk_tol);
    c.serial = j.value("serial", c.serial);
}

Potential load_potential(const RunConfig& c) {
    if (c.potential.empty()) throw ConfigError("no potential given (use --potential or the config file)");
    std::string s = c.potential;
    const auto first = s.find_first_not_of(" \t\n");
    if (first != std::string::npos && s[first] == '{') {
        try {
            return Potential::from_json(json::parse(s));
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad inline potential JSON: ") + e.what());
        }
    }
    return Potential::from_file(s);
}

KGrid kgrid_of(const RunConfig& c) {
    KGrid g{c.kmin, c.kmax, c.kcount};
    g.validate();
    return g;
}

ForwardOptions forward_opts(const RunConfig& c) {
    ForwardOptions f;
    f.abs_tol = f.rel_tol = c.rk_tol;
    return f;
}

Exec exec_of(const RunConfig& c) { return c.serial ? Exec::serial : Exec::parallel; }

FileStamp stamp_of(const RunConfig& c) { return {kVersion, config_hash(c.to_json())}; }

fs::path ensure_out(const RunConfig& c) {
    fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory \"" + c.out + "\"");
    return dir;
}

S3Options s3_opts(const RunConfig& c) {
    S3Options o;
    if (c.derivative_mode == "analytic")
        o.mode = DerivativeMode::analytic;
    else if (c.derivative_mode == "central-difference" || c.derivative_mode == "fd")
        o.mode = DerivativeMode::central_difference;
    else
        throw ConfigError("derivative_mode must be analytic|central-difference");
    o.fd_step = c.fd_step;
    return o;
}

Dataset synthesize_dataset(const RunConfig& c, const Potential& v) {
    const KGrid grid = kgrid_of(c);
    const NoiseModel noise{c.noise, c.seed};
    const ForwardOptions fwd = forward_opts(c);
    Dataset d;
    d.method = method_from_name(c.method);
    switch (d.method) {
        case Method::s1:
            if (c.positions.size() != 2) throw ConfigError("method s1 needs --positions x1,x2");
            d.s1 = build_s1(v, c.positions[0], c.positions[1], grid, noise, fwd, exec_of(c));
            break;
        case Method::s2:
            if (c.positions.size() != 3) throw ConfigError("method s2 needs --positions x1,x2,x3");
            d.s2 = build_s2(v, c.positions[0], c.positions[1], c.positions[2], grid, noise, fwd,
                            exec_of(c));
            break;
        case Method::s3:
            if (c.positions.size() != 1) throw ConfigError("method s3 needs --positions x");
            d.s3 = build_s3(v, c.positions[0], grid, noise, s3_opts(c), fwd, exec_of(c));
            break;
    }
    return d;
}

json dataset_sidecar(const RunConfig& c, const Potential& v) {
    return json{{"variant", c.method},
                {"potential", v.to_json()},
                {"positions", c.positions},
                {"noise_sigma", c.noise},
                {"seed", c.seed},
                {"kgrid", {{"kmin", c.kmin}, {"kmax", c.kmax}, {"count", c.kcount}}},
                {"derivative_mode", c.derivative_mode},
                {"fd_step", c.fd_step},
                {"tool_version", kVersion},
                {"config_hash", config_hash(c.to_json())}};
}

int run_forward(const RunConfig& c) {
    const Potential v = load_potential(c);
    const auto sweep = sweep_scatter(v, kgrid_of(c), forward_opts(c), exec_of(c));
    const fs::path dir = ensure_out(c);
    write_sweep_csv((dir / "forward.csv").string(), sweep, stamp_of(c));
    std::size_t flagged = 0;
    double worst = 0.0;
    for (const auto& s : sweep) {
        flagged += s.flagged ? 1 : 0;
        worst = std::max(worst, s.unitarity_defect);
    }
    std::cout << "forward: " << sweep.size() << " wavenumbers, worst unitarity defect " << worst
              << (flagged ? " (" + std::to_string(flagged) + " flagged)" : "") << "\n"
              << "wrote " << (dir / "forward.csv").string() << "\n";
    return 0;
}

int run_synthesize(const RunConfig& c) {
    const Potential v = load_potential(c);
    const Dataset d = synthesize_dataset(c, v);
    const fs::path dir = ensure_out(c);
    const std::string path = (dir / ("dataset_" + c.method + ".csv")).string();
    write_dataset_csv(path, d, stamp_of(c));
    write_dataset_sidecar(path, dataset_sidecar(c, v));
    std::cout << "synthesize: " << d.size() << " records (" << c.method << ")\nwrote " << path
              << " and sidecar\n";
    return 0;
}

int run_recover(const RunConfig& c) {
    Dataset d;
    if (!c.dataset.empty()) {
        d = read_dataset_csv(c.dataset);
    } else {
        d = synthesize_dataset(c, load_potential(c));
    }
    const RecoverySweep sweep = sweep_recover(d, RecoveryOptions{c.eps_det}, nullptr, exec_of(c));
    const fs::path dir = ensure_out(c);
    const std::string path = (dir / "recovery.csv").string();
    write_recovery_csv(path, sweep.results, stamp_of(c));
    const auto& s = sweep.summary;
    std::cout << "recover: " << s.recovered << "/" << s.total << " records recovered, "
              << s.degenerate << " degenerate, " << s.nonphysical << " non-physical\nwrote " << path
              << "\n";
    if (s.total > 0 && s.recovered == 0) {
        if (s.nonphysical >= s.degenerate)
            throw NonPhysicalIntensity("recover: every record was non-physical", 0.0);
        throw DegenerateConfiguration("recover: every record was degenerate", 0.0);
    }
    return 0;
}

json diagnostics_json(const InversionDiagnostics& d) {
    return json{{"kernel_tail_bound", d.kernel_tail_bound},
                {"max_imag_residue", d.max_imag_residue},
                {"max_nystrom_residual", d.max_nystrom_residual},
                {"min_rcond", d.min_rcond},
                {"max_nodes", d.max_nodes},
                {"left_support_ratio", d.left_support_ratio}};
}

int run_invert(const RunConfig& c) {
    if (c.input.empty()) throw ConfigError("invert needs --input (forward sweep or recovery CSV)");
    const ReflectionTable table = read_reflection_table(c.input);
    InversionOptions opts;
    opts.node_spacing = c.node_spacing;
    opts.taper_beta = c.taper_beta;
    const auto rec = reconstruct_potential(table, XGrid{c.xlo, c.xhi, c.xcount}, opts, exec_of(c));
    const fs::path dir = ensure_out(c);
    const FileStamp stamp = stamp_of(c);
    write_potential_csv((dir / "potential_reconstructed.csv").string(), rec, stamp);
    json diag = diagnostics_json(rec.diagnostics);
    diag["tool_version"] = stamp.tool_version;
    diag["config_hash"] = stamp.config_hash;
    std::ofstream(dir / "inversion_diagnostics.json") << diag.dump(2) << "\n";
    std::cout << "invert: reconstructed on [" << c.xlo << ", " << c.xhi << "], "
              << rec.diagnostics.max_nodes << " max Nystrom nodes\nwrote "
              << (dir / "potential_reconstructed.csv").string() << "\n";
    return 0;
}

// Staircase resample of the reconstruction, clipped to x >= 0, for re-scattering
// with the exact propagator.
Potential staircase_of(const ReconstructedPotential& rec) {
    std::vector<Segment> segs;
    for (std::size_t i = 1; i < rec.x.size(); ++i) {
        const double a = rec.x[i - 1], b = rec.x[i];
        if (b <= 0.0) continue;
        segs.push_back({std::max(a, 0.0), b, 0.5 * (rec.v[i - 1] + rec.v[i])});
    }
    if (segs.empty()) return Potential::zero();
    return Potential::piecewise(std::move(segs));
}

int run_pipeline(const RunConfig& c) {
    const Potential v = load_potential(c);
    const KGrid grid = kgrid_of(c);
    const fs::path dir = ensure_out(c);
    const FileStamp stamp = stamp_of(c);

    const auto forward = sweep_scatter(v, grid, forward_opts(c), exec_of(c));
    write_sweep_csv((dir / "forward.csv").string(), forward, stamp);

    const Dataset data = synthesize_dataset(c, v);
    const std::string dpath = (dir / ("dataset_" + c.method + ".csv")).string();
    write_dataset_csv(dpath, data, stamp);
    write_dataset_sidecar(dpath, dataset_sidecar(c, v));

    std::vector<Complex> reference(forward.size());
    for (std::size_t i = 0; i < forward.size(); ++i) reference[i] = forward[i].s21;
    const RecoverySweep sweep = sweep_recover(data, RecoveryOptions{c.eps_det}, &reference, exec_of(c));
    write_recovery_csv((dir / "recovery.csv").string(), sweep.results, stamp);

    const ReflectionTable table = ReflectionTable::from_recovery(sweep.results);
    InversionOptions iopts;
    iopts.node_spacing = c.node_spacing;
    iopts.taper_beta = c.taper_beta;
    const auto rec = reconstruct_potential(table, XGrid{c.xlo, c.xhi, c.xcount}, iopts, exec_of(c));
    write_potential_csv((dir / "potential_reconstructed.csv").string(), rec, stamp);

    const double l1 = roundtrip_error(v, rec);

    // close the loop: scatter the reconstruction and compare reflection tables
    const Potential vhat = staircase_of(rec);
    const std::size_t stride = std::max<std::size_t>(1, table.k.size() / 128);
    double rescatter_max = 0.0;
    std::vector<double> ds;
    for (std::size_t i = 0; i < table.k.size(); i += stride) {
        const Complex s = scatter(vhat, table.k[i]).s21;
        ds.push_back(std::abs(s - table.s21[i]));
        rescatter_max = std::max(rescatter_max, ds.back());
    }
    std::sort(ds.begin(), ds.end());
    const double rescatter_median = ds.empty() ? 0.0 : ds[ds.size() / 2];

    json report{{"potential", v.to_json()},
                {"records", data.size()},
                {"recovered", sweep.summary.recovered},
                {"degenerate", sweep.summary.degenerate},
                {"nonphysical", sweep.summary.nonphysical},
                {"s21_max_error", sweep.summary.max_error},
                {"s21_median_error", sweep.summary.median_error},
                {"roundtrip_rel_l1", l1},
                {"rescatter_max_ds21", rescatter_max},
                {"rescatter_median_ds21", rescatter_median},
                {"inversion", diagnostics_json(rec.diagnostics)},
                {"tool_version", kVersion},
                {"config_hash", stamp.config_hash}};
    std::ofstream(dir / "pipeline_report.json") << report.dump(2) << "\n";

    std::cout << "pipeline (" << v.label() << ", method " << c.method << "):\n"
              << "  s21 recovery error: max " << sweep.summary.max_error << ", median "
              << sweep.summary.median_error << " (" << sweep.summary.recovered << "/" << data.size()
              << " records)\n"
              << "  round-trip rel L1(v, vhat): " << l1 << "\n"
              << "  re-scattered s21 mismatch: max " << rescatter_max << ", median "
              << rescatter_median << "\n"
              << "wrote " << (dir / "pipeline_report.json").string() << "\n";
    return 0;
}

int dispatch(const std::string& cmd, const RunConfig& cfg) {
    if (cmd == "forward") return run_forward(cfg);
    if (cmd == "synthesize") return run_synthesize(cfg);
    if (cmd == "recover") return run_recover(cfg);
    if (cmd == "invert") return run_invert(cfg);
    if (cmd == "pipeline") return run_pipeline(cfg);
    if (cmd == "selftest") return run_selftest();
    throw ConfigError("unknown subcommand \"" + cmd + "\"");
}

}  // namespace
}  // namespace ph1d

int main(int argc, char** argv) {
    CLI::App app{"phaseless 1D inverse scattering: forward simulation, phaseless data synthesis, "
                 "phase recovery and potential reconstruction"};
    app.require_subcommand(1);

    ph1d::RunConfig cfg;
    std::string config_path;
    std::string positions_csv;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override its values");
        sub->add_option("--potential", cfg.potential, "inline potential JSON or a file path");
        sub->add_option("--kmin", cfg.kmin, "k-grid minimum (> 0)");
        sub->add_option("--kmax", cfg.kmax, "k-grid maximum");
        sub->add_option("--kcount", cfg.kcount, "k-grid point count");
        sub->add_option("--positions", positions_csv, "measurement positions x1[,x2[,x3]], all < 0");
        sub->add_option("--method", cfg.method, "dataset variant: s1|s2|s3");
        sub->add_option("--noise", cfg.noise, "relative noise sigma");
        sub->add_option("--seed", cfg.seed, "noise seed");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--eps-det", cfg.eps_det, "degeneracy threshold on the |sin| determinant");
        sub->add_option("--derivative-mode", cfg.derivative_mode, "s3 derivative: analytic|central-difference");
        sub->add_option("--fd-step", cfg.fd_step, "central-difference step h");
        sub->add_option("--dataset", cfg.dataset, "recover: dataset CSV to read instead of synthesizing");
        sub->add_option("--input", cfg.input, "invert: forward-sweep or recovery CSV");
        sub->add_option("--xlo", cfg.xlo, "reconstruction grid start");
        sub->add_option("--xhi", cfg.xhi, "reconstruction grid end");
        sub->add_option("--xcount", cfg.xcount, "reconstruction grid points");
        sub->add_option("--node-spacing", cfg.node_spacing, "Nystrom node spacing");
        sub->add_option("--taper-beta", cfg.taper_beta, "Kaiser band taper (0 = hard cut)");
        sub->add_option("--rk-tol", cfg.rk_tol, "integrator abs/rel tolerance");
        sub->add_flag("--serial", cfg.serial, "run sweeps on the serial reference path");
    };
    for (const char* name : {"forward", "synthesize", "recover", "invert", "pipeline", "selftest"})
        add_common(app.add_subcommand(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        // config file first, then flags that were actually given win
        if (!config_path.empty()) {
            ph1d::RunConfig from_file;
            ph1d::apply_config_file(from_file, config_path);
            auto keep = [&](const char* flag) { return sub->count(flag) > 0; };
            ph1d::RunConfig merged = from_file;
            if (keep("--potential")) merged.potential = cfg.potential;
            if (keep("--kmin")) merged.kmin = cfg.kmin;
            if (keep("--kmax")) merged.kmax = cfg.kmax;
            if (keep("--kcount")) merged.kcount = cfg.kcount;
            if (keep("--method")) merged.method = cfg.method;
            if (keep("--noise")) merged.noise = cfg.noise;
            if (keep("--seed")) merged.seed = cfg.seed;
            if (keep("--out")) merged.out = cfg.out;
            if (keep("--eps-det")) merged.eps_det = cfg.eps_det;
            if (keep("--derivative-mode")) merged.derivative_mode = cfg.derivative_mode;
            if (keep("--fd-step")) merged.fd_step = cfg.fd_step;
            if (keep("--dataset")) merged.dataset = cfg.dataset;
            if (keep("--input")) merged.input = cfg.input;
            if (keep("--xlo")) merged.xlo = cfg.xlo;
            if (keep("--xhi")) merged.xhi = cfg.xhi;
            if (keep("--xcount")) merged.xcount = cfg.xcount;
            if (keep("--node-spacing")) merged.node_spacing = cfg.node_spacing;
            if (keep("--taper-beta")) merged.taper_beta = cfg.taper_beta;
            if (keep("--rk-tol")) merged.rk_tol = cfg.rk_tol;
            if (keep("--serial")) merged.serial = cfg.serial;
            cfg = merged;
            if (sub->count("--positions") == 0) positions_csv.clear();  // keep file's positions
            else cfg.positions.clear();
        }
        if (!positions_csv.empty()) {
            cfg.positions.clear();
            std::istringstream ss(positions_csv);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) cfg.positions.push_back(std::stod(tok));
        }
        return ph1d::dispatch(sub->get_name(), cfg);
    } catch (const ph1d::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ph1d::ExitCode::numerical);
    }
}
