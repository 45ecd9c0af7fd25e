#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skewmix/acceptance.hpp"
#include "skewmix/config.hpp"

namespace {

constexpr const char* kVersion = "skewmix 1.0.0";

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// RFC-4180: CRLF line endings, fields quoted only when needed (none of ours
// contain separators).
struct CsvWriter {
    std::ostringstream out;

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << fields[i];
        }
        out << "\r\n";
    }
};

// FNV-1a over the raw config bytes.
std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= std::uint64_t(static_cast<unsigned char>(c));
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct RunContext {
    std::string command;
    std::string config_path;
    std::string out_format = "csv";
    std::string out_dir = ".";
    std::size_t grid = 0;
    std::size_t threads = 1;
    std::uint64_t seed = 42;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::vector<std::string> outputs;

    void write_manifest(const skewmix::Json& constants) const {
        skewmix::Json m;
        m["command"] = command;
        m["config"] = config_path;
        m["config_hash"] = config_path.empty() ? "" : hash_file(config_path);
        m["constants"] = constants;
        m["version"] = kVersion;
        m["seed"] = seed;
        m["threads"] = threads;
        if (grid) m["grid"] = grid;
        m["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m["outputs"] = outputs;
        std::ofstream f(out_dir + "/" + command + "_manifest.json");
        f << m.dump(2) << "\n";
    }
};

skewmix::Json constants_json(const skewmix::SkewProduct& sp) {
    skewmix::Json j;
    j["lambda_tilde"] = sp.lambda_tilde;
    j["Lambda"] = sp.Lambda;
    j["C1"] = sp.C1;
    j["delta"] = sp.delta;
    j["sup_tau_prime"] = sp.sup_tau_prime;
    j["sup_tau_second"] = sp.sup_tau_second;
    j["sup_tau_abs"] = sp.sup_tau_abs;
    j["sup_f_second"] = sp.sup_f_second;
    j["branches"] = sp.branch_count();
    j["tau_piecewise_constant"] = sp.verdict == skewmix::BuildVerdict::TauPiecewiseConstant;
    return j;
}

skewmix::Json scheme_json(const skewmix::SkewProduct& sp) {
    skewmix::Json j = constants_json(sp);
    skewmix::LyConstants ly = skewmix::ly_constants(sp);
    skewmix::SchemeConstants sc = skewmix::scheme_constants(sp, ly);
    j["C_LY"] = ly.C_LY;
    j["C_lambda"] = ly.C_lambda;
    j["beta"] = sc.beta;
    j["rho1"] = sc.rho1;
    j["rho2"] = sc.rho2;
    j["xi"] = sc.xi;
    j["C_beta"] = sc.C_beta;
    j["n0"] = sc.n0;
    j["b0"] = sc.b0;
    return j;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const skewmix::NotConverged*>(&e) ||
        dynamic_cast<const skewmix::NoConvergence*>(&e) ||
        dynamic_cast<const skewmix::CapExceeded*>(&e) ||
        dynamic_cast<const skewmix::PanelCapExceeded*>(&e) ||
        dynamic_cast<const skewmix::GridTooCoarse*>(&e))
        return 2;
    return 1;
}

std::string word_string(const skewmix::BranchWord& w) {
    std::string s;
    for (std::size_t i = 0; i < w.symbols.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(w.symbols[i]);
    }
    return s;
}

void emit(const RunContext& ctx, const std::string& name, const std::string& content) {
    std::ofstream f(ctx.out_dir + "/" + name, std::ios::binary);
    f << content;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace skewmix;

    CLI::App app{"executable toolkit for piecewise-expanding skew products"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunContext ctx;
    std::string obs_path, suite_name = "default", omega0 = "0,0.05";
    double y_target = 0.5, b_freq = 80.0, eps = 1e-4;
    std::size_t n_steps = 6, samples = 64, n_max = 20;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", ctx.config_path, "map config JSON");
        if (needs_config) c->required();
        sub->add_option("--out", ctx.out_format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out-dir", ctx.out_dir, "directory for files and manifest");
        sub->add_option("--grid", ctx.grid, "grid size (power of two)");
        sub->add_option("--threads", ctx.threads, "worker threads (computation is serial)")
            ->envname("SKEWMIX_THREADS");
        sub->add_option("--seed", ctx.seed, "PRNG seed");
    };

    CLI::App* validate = app.add_subcommand("validate", "check hypotheses, print constants");
    add_common(validate, true);

    CLI::App* pre = app.add_subcommand("preimages", "enumerate f^{-n}(y) with cocycle data");
    add_common(pre, true);
    pre->add_option("--y", y_target, "target point");
    pre->add_option("--n", n_steps, "depth");

    CLI::App* phi_cmd = app.add_subcommand("phi", "non-transversal mass phi(n)");
    add_common(phi_cmd, true);
    phi_cmd->add_option("--n", n_steps, "maximal n");
    phi_cmd->add_option("--samples", samples, "y sample count");

    CLI::App* coh = app.add_subcommand("cohomology", "invariant slope, theta, chi, verdict");
    add_common(coh, true);

    CLI::App* spec = app.add_subcommand("spectrum", "twisted norm decay probes");
    add_common(spec, true);
    spec->add_option("--b", b_freq, "twist frequency");

    CLI::App* growth = app.add_subcommand("growth", "partition refinement growth bound");
    add_common(growth, true);
    growth->add_option("--omega0", omega0, "initial interval lo,len");
    growth->add_option("--n", n_steps, "refinement depth");
    growth->add_option("--eps", eps, "boundary neighbourhood size");

    CLI::App* vdc = app.add_subcommand("vdc", "oscillatory-integral bound suite");
    add_common(vdc, false);
    vdc->add_option("--suite", suite_name, "suite name");

    CLI::App* cor = app.add_subcommand("correlation", "correlation decay estimators");
    add_common(cor, true);
    cor->add_option("--obs", obs_path, "observable config JSON")->required();
    cor->add_option("--nmax", n_max, "maximal time");

    CLI::App* suite = app.add_subcommand("suite", "run every acceptance check");
    add_common(suite, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            ctx.command = "validate";
            MapConfig cfg = load_map_config(ctx.config_path);
            Json j = scheme_json(cfg.sp);
            std::cout << j.dump(2) << "\n";
            ctx.write_manifest(j);
            return 0;
        }

        if (pre->parsed()) {
            ctx.command = "preimages";
            MapConfig cfg = load_map_config(ctx.config_path);
            PreimageTree tree = preimages(cfg.sp, y_target, n_steps);
            CsvWriter csv;
            csv.row({"word", "x", "J_n", "tau_n", "dtau_n"});
            for (const PreimageNode& node : tree.nodes)
                csv.row({word_string(node.word), fmt17(node.x), fmt17(node.J_n),
                         fmt17(node.tau_n), fmt17(node.dtau_n)});
            std::cout << csv.out.str();
            ctx.write_manifest(constants_json(cfg.sp));
            return 0;
        }

        if (phi_cmd->parsed()) {
            ctx.command = "phi";
            MapConfig cfg = load_map_config(ctx.config_path);
            CsvWriter csv;
            csv.row({"n", "phi", "phi_pow"});
            for (std::size_t n = 1; n <= n_steps; ++n) {
                double v = phi(cfg.sp, n, samples);
                csv.row({std::to_string(n), fmt17(v), fmt17(std::pow(v, 1.0 / double(n)))});
            }
            std::cout << csv.out.str();
            ctx.write_manifest(constants_json(cfg.sp));
            return 0;
        }

        if (coh->parsed()) {
            ctx.command = "cohomology";
            MapConfig cfg = load_map_config(ctx.config_path);
            std::size_t N = ctx.grid ? ctx.grid : (1u << 14);
            CohomologyReport rep = cohomology_report(cfg.sp, N);
            CsvWriter theta_csv, chi_csv;
            theta_csv.row({"x", "theta"});
            chi_csv.row({"x", "chi"});
            for (std::size_t i = 0; i < rep.theta.size(); ++i) {
                theta_csv.row({fmt17(rep.theta.midpoint(i)), fmt17(rep.theta[i].real())});
                chi_csv.row({fmt17(rep.chi.midpoint(i)), fmt17(rep.chi[i].real())});
            }
            std::string tpath = ctx.out_dir + "/theta.csv", cpath = ctx.out_dir + "/chi.csv";
            emit(ctx, "theta.csv", theta_csv.out.str());
            emit(ctx, "chi.csv", chi_csv.out.str());
            ctx.outputs = {tpath, cpath};
            Json j;
            j["verdict"] =
                rep.verdict == Verdict::Cohomologous ? "Cohomologous" : "NotCohomologous";
            j["deviation"] = rep.deviation;
            j["tol_chi"] = rep.tol_chi;
            j["theta_csv_path"] = tpath;
            j["chi_csv_path"] = cpath;
            std::cout << j.dump(2) << "\n";
            ctx.write_manifest(constants_json(cfg.sp));
            return 0;
        }

        if (spec->parsed()) {
            ctx.command = "spectrum";
            MapConfig cfg = load_map_config(ctx.config_path);
            std::size_t N = ctx.grid ? ctx.grid : (1u << 11);
            TransferTable table(cfg.sp, N);
            LyConstants ly = ly_constants(cfg.sp);
            SchemeConstants consts = scheme_constants(cfg.sp, ly);
            DecayResult res = norm_decay_experiment(cfg.sp, table, b_freq, consts, 20, ctx.seed);
            CsvWriter csv;
            csv.row({"probe_id", "ratio", "n_b", "gamma2_est"});
            for (const DecayProbe& p : res.probes)
                csv.row({p.id, fmt17(p.ratio), std::to_string(res.n_b),
                         fmt17(res.gamma2_est)});
            std::cout << csv.out.str();
            ctx.write_manifest(scheme_json(cfg.sp));
            return 0;
        }

        if (growth->parsed()) {
            ctx.command = "growth";
            MapConfig cfg = load_map_config(ctx.config_path);
            double lo = 0.0, len = 0.0;
            if (std::sscanf(omega0.c_str(), "%lf,%lf", &lo, &len) != 2 || !(len > 0.0))
                throw Error("--omega0 expects lo,len");
            CsvWriter csv;
            csv.row({"n", "pieces", "lhs", "rhs", "pass"});
            for (std::size_t n = 1; n <= n_steps; ++n) {
                GrowthCheck chk = growth_bound_check(cfg.sp, lo, len, n, eps);
                csv.row({std::to_string(n), std::to_string(chk.pieces), fmt17(chk.lhs),
                         fmt17(chk.rhs), chk.pass ? "true" : "false"});
            }
            std::cout << csv.out.str();
            ctx.write_manifest(constants_json(cfg.sp));
            return 0;
        }

        if (vdc->parsed()) {
            ctx.command = "vdc";
            if (suite_name != "default") throw Error("unknown suite '" + suite_name + "'");
            CsvWriter csv;
            csv.row({"problem_id", "integral_abs", "bound_paper", "bound_corrected", "pass"});
            int id = 0;
            for (const OscillatoryProblem& p : vdc_default_suite(50, ctx.seed)) {
                double integral = std::abs(oscillatory_integral(p));
                VdcBound bd = vdc_bound(p);
                bool pass = integral <= bd.corrected + 1e-10;
                csv.row({std::to_string(id++), fmt17(integral), fmt17(bd.paper),
                         fmt17(bd.corrected), pass ? "true" : "false"});
            }
            std::cout << csv.out.str();
            ctx.write_manifest(Json::object());
            return 0;
        }

        if (cor->parsed()) {
            ctx.command = "correlation";
            MapConfig cfg = load_map_config(ctx.config_path);
            std::size_t N = ctx.grid ? ctx.grid : (1u << 12);
            ObservablePair obs = load_observables(obs_path, N);
            CorrelationSeries four = correlation_fourier(cfg.sp, obs.g, obs.h, n_max, N);
            CorrelationSeries direct =
                correlation_direct(cfg.sp, obs.g, obs.h, std::min<std::size_t>(n_max, 6), N);
            std::size_t hi = n_max, lo = std::min<std::size_t>(4, n_max);
            try {
                fit_series(four, lo, hi);
            } catch (const InsufficientData&) {
                four.fit_zeta = 0.0;
                four.fit_r2 = 0.0;
            }
            CsvWriter csv;
            csv.row({"n", "cor_fourier_re", "cor_fourier_im", "cor_direct", "zeta_fit", "r2"});
            for (std::size_t n = 0; n <= n_max; ++n) {
                std::string d =
                    n < direct.values.size() ? fmt17(direct.values[n].real()) : std::string();
                csv.row({std::to_string(n), fmt17(four.values[n].real()),
                         fmt17(four.values[n].imag()), d, fmt17(four.fit_zeta),
                         fmt17(four.fit_r2)});
            }
            std::cout << csv.out.str();
            Json j = constants_json(cfg.sp);
            j["convention"] = four.convention;
            j["tail_bound"] = four.tail_bound;
            ctx.write_manifest(j);
            return 0;
        }

        if (suite->parsed()) {
            ctx.command = "suite";
            bool all_pass = true;
            for (const CriterionResult& r : run_acceptance()) {
                all_pass = all_pass && r.pass;
                std::printf("[%s] %2d %-24s %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id,
                            r.name.c_str(), r.detail.c_str(), r.seconds);
            }
            ctx.write_manifest(Json::object());
            return all_pass ? 0 : 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 1;
}
