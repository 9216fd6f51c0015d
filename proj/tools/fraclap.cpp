// Command-line front end: solve | operator-check | norms | sweep.
// Exit codes: 0 success, 1 usage/config error, 2 numeric failure, 3 I/O error.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

#include "fraclap/io.hpp"

namespace {

using namespace fraclap;

void print_run_summary(const Trajectory<double>& traj,
                       const ModelParams<double>& params) {
    const auto& last = traj.reports.back();
    std::printf("steps            %zu (tau = %g)\n", traj.reports.size(),
                static_cast<double>(params.tau));
    std::printf("final time       %.17g\n", last.t);
    std::printf("mass             %.17g -> %.17g\n", traj.initial.mean(), last.mass);
    std::printf("energy_half      %.17g -> %.17g\n",
                seminorm_sq(traj.initial, 0.5), last.energy_half);
    if (std::isfinite(last.entropy))
        std::printf("entropy          %.17g\n", last.entropy);
    std::printf("u range          [%.17g, %.17g]\n", last.min_u, last.max_u);
    std::printf("flux L1          %.17g\n", last.flux_l1);
}

int run_solve(const std::string& config_path) {
    io::RunConfig cfg = io::load_config(config_path);
    const Basis<double> basis =
        Basis<double>::make(cfg.params.modes, cfg.params.nodes);
    SpectralField<double> u0 = io::build_initial_condition(cfg, basis);
    Trajectory<double> traj = run(cfg.params, u0, cfg.outputs.stride);
    if (!cfg.outputs.report_csv.empty())
        io::write_reports(traj, cfg.outputs.report_csv);
    if (!cfg.outputs.snapshots.empty())
        io::write_snapshots(traj, cfg.outputs.snapshots);
    if (traj.reports.empty()) {
        std::fprintf(stderr, "run failed before the first step: %s\n",
                     traj.failure_reason.c_str());
        return 2;
    }
    print_run_summary(traj, cfg.params);
    if (cfg.E_prime) {
        SpectralField<double> p = pressure(traj.final_state(), *cfg.E_prime);
        NodalField<double> pn = to_nodal(p, basis);
        std::printf("pressure range   [%.17g, %.17g], L2 %.17g\n",
                    pn.values.minCoeff(), pn.values.maxCoeff(), p.l2_norm());
    }
    if (!traj.completed) {
        std::fprintf(stderr, "run stopped early: %s\n", traj.failure_reason.c_str());
        return 2;
    }
    return 0;
}

int run_norms(const std::string& ic_path, Index modes) {
    NodalField<double> u = io::load_nodal_file(ic_path);
    const Index M = u.size();
    const Index N = modes > 0 ? modes : M / 2;
    const Basis<double> basis = Basis<double>::make(N, M);
    SpectralField<double> c = to_spectral(u, basis);
    std::printf("nodes            %lld\n", static_cast<long long>(M));
    std::printf("modes            %lld\n", static_cast<long long>(N));
    std::printf("mass             %.17g\n", c.mean());
    std::printf("u range          [%.17g, %.17g]\n", u.values.minCoeff(),
                u.values.maxCoeff());
    std::printf("L2 norm          %.17g\n", c.l2_norm());
    std::printf("H^1/2 seminorm^2 %.17g\n", seminorm_sq(c, 0.5));
    std::printf("H^1   seminorm^2 %.17g\n", seminorm_sq(c, 1.0));
    std::printf("H^3/2 seminorm^2 %.17g\n", seminorm_sq(c, 1.5));
    std::printf("H^2   seminorm^2 %.17g\n", seminorm_sq(c, 2.0));
    return 0;
}

unsigned worker_cap() {
    if (const char* env = std::getenv("FRACLAP_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? hw : 1;
}

std::string suffixed_path(const std::string& path, const std::string& key,
                          const std::string& value) {
    const size_t dot = path.find_last_of('.');
    const size_t slash = path.find_last_of('/');
    const std::string tag = "_" + key + "_" + value;
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + tag;
    return path.substr(0, dot) + tag + path.substr(dot);
}

struct SweepJob {
    io::RunConfig cfg;
    std::string label;
    Trajectory<double> traj;
    std::string error;
    int error_code = 0;  // exit-code class of a thrown error
};

int run_sweep(const std::string& config_path, const std::string& vary) {
    const size_t eq = vary.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= vary.size())
        throw std::invalid_argument("--vary expects key=v1,v2,...");
    const std::string key = vary.substr(0, eq);
    std::vector<std::string> tokens;
    {
        std::string rest = vary.substr(eq + 1);
        size_t pos = 0;
        while (pos <= rest.size()) {
            const size_t comma = rest.find(',', pos);
            const std::string tok = rest.substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (tok.empty()) throw std::invalid_argument("--vary has an empty value");
            tokens.push_back(tok);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }

    const io::RunConfig base = io::load_config(config_path);
    std::vector<SweepJob> jobs;
    for (const std::string& tok : tokens) {
        double value = 0;
        try {
            size_t used = 0;
            value = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument("--vary value '" + tok + "' is not a number");
        }
        SweepJob job;
        job.cfg = base;
        job.label = key + " = " + tok;
        ModelParams<double>& p = job.cfg.params;
        if (key == "eps") {
            p.eps = value;
            p.delta = 0;
            p.mobility = MobilityKind::power_eps;
        } else if (key == "delta") {
            p.delta = value;
            p.eps = 0;
            p.mobility = MobilityKind::bertozzi_pugh;
        } else if (key == "tau") {
            p.tau = value;
        } else if (key == "n") {
            p.n = value;
        } else if (key == "T") {
            p.T = value;
        } else if (key == "newton_tol") {
            p.newton_tol = value;
        } else {
            throw std::invalid_argument(
                "--vary key must be one of eps, delta, tau, n, T, newton_tol");
        }
        p.validate();
        if (!base.outputs.report_csv.empty())
            job.cfg.outputs.report_csv =
                suffixed_path(base.outputs.report_csv, key, tok);
        if (!base.outputs.snapshots.empty())
            job.cfg.outputs.snapshots =
                suffixed_path(base.outputs.snapshots, key, tok);
        jobs.push_back(std::move(job));
    }

    std::atomic<size_t> next{0};
    auto worker = [&jobs, &next]() {
        for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            SweepJob& job = jobs[i];
            try {
                const Basis<double> basis = Basis<double>::make(
                    job.cfg.params.modes, job.cfg.params.nodes);
                SpectralField<double> u0 =
                    io::build_initial_condition(job.cfg, basis);
                job.traj = run(job.cfg.params, u0, job.cfg.outputs.stride);
                if (!job.cfg.outputs.report_csv.empty())
                    io::write_reports(job.traj, job.cfg.outputs.report_csv);
                if (!job.cfg.outputs.snapshots.empty())
                    io::write_snapshots(job.traj, job.cfg.outputs.snapshots);
                if (!job.traj.completed) {
                    job.error = job.traj.failure_reason;
                    job.error_code = 2;
                }
            } catch (const io::IoError& e) {
                job.error = e.what();
                job.error_code = 3;
            } catch (const std::invalid_argument& e) {
                job.error = e.what();
                job.error_code = 1;
            } catch (const std::exception& e) {
                job.error = e.what();
                job.error_code = 2;
            }
        }
    };
    const unsigned thread_count =
        std::min<unsigned>(worker_cap(), static_cast<unsigned>(jobs.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    int exit_code = 0;
    for (const SweepJob& job : jobs) {
        if (!job.error.empty()) {
            std::fprintf(stderr, "%s: %s\n", job.label.c_str(), job.error.c_str());
            exit_code = std::max(exit_code, job.error_code);
            continue;
        }
        const auto& last = job.traj.reports.back();
        std::printf("%s: mass %.17g, energy_half %.17g, u in [%.17g, %.17g]%s\n",
                    job.label.c_str(), last.mass, last.energy_half, last.min_u,
                    last.max_u,
                    job.cfg.outputs.report_csv.empty()
                        ? ""
                        : (" -> " + job.cfg.outputs.report_csv).c_str());
    }
    if (exit_code == 0) {
        for (size_t i = 0; i + 1 < jobs.size(); ++i) {
            const double d = l2_distance(jobs[i].traj.final_state(),
                                         jobs[i + 1].traj.final_state());
            std::printf("|u(%s) - u(%s)|_L2 = %.17g\n", jobs[i].label.c_str(),
                        jobs[i + 1].label.c_str(), d);
        }
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral solver for u_t + (f(u) I(u)_x)_x = 0 on (0,1), "
                 "I the Neumann half-Laplacian"};
    app.require_subcommand(1);

    std::string config_path, ic_path, vary;
    Index modes = 64, nodes = 128, norm_modes = 0;
    int fields = 100;
    unsigned long long seed = 0x5eedULL;
    bool corrupt = false;

    CLI::App* solve = app.add_subcommand("solve", "time evolution from a config");
    solve->add_option("--config", config_path, "JSON config path")->required();

    CLI::App* opcheck = app.add_subcommand(
        "operator-check", "verify the spectral operator identities");
    opcheck->add_option("--modes", modes, "cosine modes N");
    opcheck->add_option("--nodes", nodes, "collocation nodes M (>= 2N)");
    opcheck->add_option("--fields", fields, "random fields per identity");
    opcheck->add_option("--seed", seed, "RNG seed");
    opcheck->add_flag("--corrupt", corrupt,
                      "inject a transform error (self-test of the checker)");

    CLI::App* norms = app.add_subcommand("norms", "diagnostics of a nodal field file");
    norms->add_option("--ic", ic_path, "two-column field file")->required();
    norms->add_option("--modes", norm_modes, "cosine modes (default: nodes/2)");

    CLI::App* sweep = app.add_subcommand("sweep", "run a config over a parameter list");
    sweep->add_option("--config", config_path, "JSON config path")->required();
    sweep->add_option("--vary", vary, "key=v1,v2,... (eps, delta, tau, n, T, newton_tol)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) return run_solve(config_path);
        if (opcheck->parsed()) {
            io::OperatorCheckOptions opts;
            opts.modes = modes;
            opts.nodes = nodes;
            opts.fields = fields;
            opts.seed = seed;
            opts.corrupt = corrupt;
            io::OperatorCheckReport report = io::operator_check(opts);
            std::printf("%s", io::format_report(report).c_str());
            return report.passed ? 0 : 2;
        }
        if (norms->parsed()) return run_norms(ic_path, norm_modes);
        if (sweep->parsed()) return run_sweep(config_path, vary);
    } catch (const io::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 2;
    }
    return 1;
}
