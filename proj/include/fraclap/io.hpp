#pragma once

// Run configuration, report files, and the operator self-check. This layer is
// concrete (double precision); the templated core stays free of file and JSON
// concerns.
//
// Config files are flat JSON objects. Recognized keys, all optional:
//   n, eps, delta, tau, T, newton_tol   numbers
//   modes, nodes, newton_max_iter       integers      (nodes defaults to 2*modes)
//   mobility                            "power_eps" | "bertozzi_pugh" | "constant"
//   track_entropy                       bool
//   E_prime                             number > 0 (enables the pressure diagnostic)
//   mode                                "solve" | "operator-check" | "sweep" | "norms"
//   ic                                  {"constant": c}
//                                       {"cosine_bump": {"theta": t, "a": a}}
//                                       {"floor_bump": {"theta": t, "a": a, "p": p}}
//                                       {"file": "path"}
//   outputs                             {"report_csv": path, "snapshots": path,
//                                        "stride": k}
// Unknown keys are rejected by name. When delta > 0 the bertozzi_pugh mobility
// is selected automatically. Entropy tracking with n >= 2 requires initial
// data that is strictly positive; preset violations are rejected at parse
// time, file-based ones when the file is loaded.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclap/fraclap.hpp"

namespace fraclap::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InitialCondition {
    enum class Kind { constant, cosine_bump, floor_bump, file };
    Kind kind = Kind::cosine_bump;
    double c = 0;                  // constant
    double theta = 1.2, a = 1.0;   // bump offset / amplitude
    double p = 2;                  // floor_bump exponent
    std::string path;              // file
};

struct OutputSpec {
    std::string report_csv;        // empty: no report file
    std::string snapshots;         // empty: no snapshot file
    Index stride = 0;              // 0: snapshots only at t = 0 and t = T
};

struct RunConfig {
    ModelParams<double> params;
    InitialCondition ic;
    OutputSpec outputs;
    std::string mode = "solve";
    std::optional<double> E_prime;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Nodal two-column text files "x_j u_j", one row per midpoint node. Files
// whose abscissae are not the exact midpoint grid are rejected.
NodalField<double> load_nodal_file(const std::string& path);
void save_nodal_file(const std::string& path, const NodalField<double>& u);

SpectralField<double> build_initial_condition(const RunConfig& cfg,
                                              const Basis<double>& basis);

// One CSV row per accepted step, 17 significant digits (lossless round-trip).
void write_reports(const Trajectory<double>& traj, const std::string& path);
void write_snapshots(const Trajectory<double>& traj, const std::string& path);

struct OperatorCheckOptions {
    Index modes = 64;
    Index nodes = 128;
    int fields = 100;              // random fields per identity
    unsigned long long seed = 0x5eedULL;
    bool corrupt = false;          // test hook: inject a transform error
};

struct OperatorCheckReport {
    struct Row {
        std::string name;
        double max_error = 0;
        double tol = 0;
        bool passed = false;
    };
    std::vector<Row> rows;
    bool passed = false;
};

OperatorCheckReport operator_check(const OperatorCheckOptions& opts);
std::string format_report(const OperatorCheckReport& report);

}  // namespace fraclap::io
