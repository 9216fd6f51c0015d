#include "fraclap/io.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace fraclap::io {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

double get_number(const json& j, const std::string& key) {
    if (!j.at(key).is_number())
        config_error("field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

Index get_index(const json& j, const std::string& key) {
    if (!j.at(key).is_number_integer())
        config_error("field '" + key + "' must be an integer");
    return j.at(key).get<Index>();
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& known,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            config_error("unknown field '" + it.key() + "'" +
                         (where.empty() ? "" : " in " + where));
    }
}

InitialCondition parse_ic(const json& j) {
    if (!j.is_object() || j.size() != 1)
        config_error("'ic' must be an object with exactly one preset key");
    InitialCondition ic;
    if (j.contains("constant")) {
        if (!j.at("constant").is_number())
            config_error("ic.constant must be a number");
        ic.kind = InitialCondition::Kind::constant;
        ic.c = j.at("constant").get<double>();
    } else if (j.contains("cosine_bump")) {
        const json& b = j.at("cosine_bump");
        if (!b.is_object()) config_error("ic.cosine_bump must be an object");
        reject_unknown_keys(b, {"theta", "a"}, "ic.cosine_bump");
        if (!b.contains("theta") || !b.contains("a"))
            config_error("ic.cosine_bump requires 'theta' and 'a'");
        ic.kind = InitialCondition::Kind::cosine_bump;
        ic.theta = get_number(b, "theta");
        ic.a = get_number(b, "a");
    } else if (j.contains("floor_bump")) {
        const json& b = j.at("floor_bump");
        if (!b.is_object()) config_error("ic.floor_bump must be an object");
        reject_unknown_keys(b, {"theta", "a", "p"}, "ic.floor_bump");
        if (!b.contains("theta") || !b.contains("a") || !b.contains("p"))
            config_error("ic.floor_bump requires 'theta', 'a' and 'p'");
        ic.kind = InitialCondition::Kind::floor_bump;
        ic.theta = get_number(b, "theta");
        ic.a = get_number(b, "a");
        ic.p = get_number(b, "p");
        if (ic.p <= 0) config_error("ic.floor_bump.p must be > 0");
    } else if (j.contains("file")) {
        if (!j.at("file").is_string())
            config_error("ic.file must be a path string");
        ic.kind = InitialCondition::Kind::file;
        ic.path = j.at("file").get<std::string>();
    } else {
        config_error("unknown field '" + j.begin().key() +
                     "' in ic (expected one of: constant, cosine_bump, "
                     "floor_bump, file)");
    }
    return ic;
}

// Strict positivity of preset initial data, needed when the entropy of a
// degenerate mobility (n >= 2) is tracked.
void require_positive_preset(const InitialCondition& ic) {
    switch (ic.kind) {
        case InitialCondition::Kind::constant:
            if (ic.c <= 0)
                config_error("entropy tracking with n >= 2 requires positive "
                             "initial data; ic.constant = " +
                             std::to_string(ic.c));
            break;
        case InitialCondition::Kind::cosine_bump:
            if (!(ic.theta > std::abs(ic.a)))
                config_error("entropy tracking with n >= 2 requires theta > |a| "
                             "for cosine_bump initial data");
            break;
        case InitialCondition::Kind::floor_bump:
            if (!(ic.theta + std::min(0.0, ic.a) > 0))
                config_error("entropy tracking with n >= 2 requires strictly "
                             "positive floor_bump initial data");
            break;
        case InitialCondition::Kind::file:
            break;  // checked nodally once the file is loaded
    }
}

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        config_error(std::string("not valid JSON (") + e.what() + ")");
    }
    if (!j.is_object()) config_error("top level must be a JSON object");

    reject_unknown_keys(
        j,
        {"n", "eps", "delta", "tau", "T", "newton_tol", "newton_max_iter",
         "modes", "nodes", "mobility", "track_entropy", "E_prime", "mode", "ic",
         "outputs"},
        "");

    RunConfig cfg;
    ModelParams<double>& p = cfg.params;

    if (j.contains("n")) p.n = get_number(j, "n");
    const bool eps_given = j.contains("eps");
    const bool delta_given = j.contains("delta");
    if (eps_given) p.eps = get_number(j, "eps");
    if (delta_given) p.delta = get_number(j, "delta");
    if (j.contains("tau")) p.tau = get_number(j, "tau");
    if (j.contains("T")) p.T = get_number(j, "T");
    if (j.contains("newton_tol")) p.newton_tol = get_number(j, "newton_tol");
    if (j.contains("newton_max_iter"))
        p.newton_max_iter = static_cast<int>(get_index(j, "newton_max_iter"));
    if (j.contains("modes")) p.modes = get_index(j, "modes");
    p.nodes = j.contains("nodes") ? get_index(j, "nodes") : 2 * p.modes;
    if (j.contains("track_entropy")) {
        if (!j.at("track_entropy").is_boolean())
            config_error("field 'track_entropy' must be a boolean");
        p.track_entropy = j.at("track_entropy").get<bool>();
    }

    // Mobility: explicit key wins, otherwise delta > 0 selects bertozzi_pugh.
    if (j.contains("mobility")) {
        const std::string m = j.at("mobility").is_string()
                                  ? j.at("mobility").get<std::string>()
                                  : "";
        if (m == "power_eps") p.mobility = MobilityKind::power_eps;
        else if (m == "bertozzi_pugh") p.mobility = MobilityKind::bertozzi_pugh;
        else if (m == "constant") p.mobility = MobilityKind::constant;
        else config_error("field 'mobility' must be one of power_eps, "
                          "bertozzi_pugh, constant");
    } else {
        p.mobility = p.delta > 0 ? MobilityKind::bertozzi_pugh
                                 : MobilityKind::power_eps;
    }
    if (p.mobility == MobilityKind::bertozzi_pugh && !eps_given)
        p.eps = 0;  // the default eps applies to the power mobility only
    if (p.mobility == MobilityKind::constant) {
        if ((eps_given && p.eps != 0) || (delta_given && p.delta != 0))
            config_error("constant mobility does not use eps or delta");
        p.eps = 0;
        p.delta = 0;
    }

    if (j.contains("mode")) {
        const std::string m =
            j.at("mode").is_string() ? j.at("mode").get<std::string>() : "";
        if (m != "solve" && m != "operator-check" && m != "sweep" && m != "norms")
            config_error("field 'mode' must be one of solve, operator-check, "
                         "sweep, norms");
        cfg.mode = m;
    }

    if (j.contains("E_prime")) {
        const double ep = get_number(j, "E_prime");
        if (ep <= 0) config_error("field 'E_prime' must be > 0");
        cfg.E_prime = ep;
    }

    if (j.contains("ic")) cfg.ic = parse_ic(j.at("ic"));

    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        if (!o.is_object()) config_error("'outputs' must be an object");
        reject_unknown_keys(o, {"report_csv", "snapshots", "stride"}, "outputs");
        if (o.contains("report_csv")) {
            if (!o.at("report_csv").is_string())
                config_error("outputs.report_csv must be a path string");
            cfg.outputs.report_csv = o.at("report_csv").get<std::string>();
        }
        if (o.contains("snapshots")) {
            if (!o.at("snapshots").is_string())
                config_error("outputs.snapshots must be a path string");
            cfg.outputs.snapshots = o.at("snapshots").get<std::string>();
        }
        if (o.contains("stride")) {
            cfg.outputs.stride = get_index(o, "stride");
            if (cfg.outputs.stride < 0) config_error("outputs.stride must be >= 0");
        }
    }

    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        config_error(e.what());
    }
    if (p.track_entropy && p.n >= 2) require_positive_preset(cfg.ic);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

NodalField<double> load_nodal_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open field file: " + path);
    std::vector<double> xs, us;
    double x, u;
    while (in >> x >> u) {
        xs.push_back(x);
        us.push_back(u);
    }
    if (!in.eof())
        throw IoError("malformed field file (expected two numeric columns): " +
                      path);
    if (xs.empty()) throw IoError("empty field file: " + path);
    const Index M = static_cast<Index>(xs.size());
    for (Index j = 0; j < M; ++j) {
        const double xj = static_cast<double>(2 * j + 1) / (2.0 * M);
        if (std::abs(xs[j] - xj) > 1e-12)
            throw IoError("field file is not on the midpoint grid (row " +
                          std::to_string(j) + " has x = " + format17(xs[j]) +
                          ", expected " + format17(xj) + "): " + path);
    }
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(us.data(), M);
    return NodalField<double>(std::move(v));
}

void save_nodal_file(const std::string& path, const NodalField<double>& u) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write field file: " + path);
    const Grid<double> grid = Grid<double>::midpoint(u.size());
    for (Index j = 0; j < u.size(); ++j)
        out << format17(grid.nodes[j]) << " " << format17(u.values[j]) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

SpectralField<double> build_initial_condition(const RunConfig& cfg,
                                              const Basis<double>& basis) {
    const Index N = basis.modes;
    switch (cfg.ic.kind) {
        case InitialCondition::Kind::constant: {
            SpectralField<double> u = SpectralField<double>::zero(N);
            u.coeffs[0] = cfg.ic.c;
            return u;
        }
        case InitialCondition::Kind::cosine_bump: {
            SpectralField<double> u = SpectralField<double>::zero(N);
            u.coeffs[0] = cfg.ic.theta;
            u.coeffs[1] = cfg.ic.a / std::sqrt(2.0);  // a cos(pi x) = a phi_1/sqrt(2)
            return u;
        }
        case InitialCondition::Kind::floor_bump: {
            Eigen::VectorXd v(basis.grid.size);
            for (Index j = 0; j < basis.grid.size; ++j) {
                const double c = std::cos(std::numbers::pi * basis.grid.nodes[j]);
                v[j] = cfg.ic.theta +
                       cfg.ic.a * std::pow(std::max(0.0, c), cfg.ic.p);
            }
            return to_spectral(NodalField<double>(std::move(v)), basis);
        }
        case InitialCondition::Kind::file: {
            NodalField<double> u = load_nodal_file(cfg.ic.path);
            if (u.size() != basis.grid.size)
                throw IoError("initial data file has " + std::to_string(u.size()) +
                              " nodes, run uses " + std::to_string(basis.grid.size));
            if (cfg.params.track_entropy && cfg.params.n >= 2 &&
                u.values.minCoeff() <= 0)
                throw std::invalid_argument(
                    "config: entropy tracking with n >= 2 requires strictly "
                    "positive initial data; file has min " +
                    format17(u.values.minCoeff()));
            return to_spectral(u, basis);
        }
    }
    throw std::invalid_argument("config: unknown initial condition kind");
}

void write_reports(const Trajectory<double>& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report file: " + path);
    out << "t,mass,energy_half,dissipation_cum,entropy,h32_cum,min_u,max_u,"
           "newton_iters,flux_L1\n";
    for (const auto& r : traj.reports) {
        out << format17(r.t) << ',' << format17(r.mass) << ','
            << format17(r.energy_half) << ',' << format17(r.dissipation_cum)
            << ',' << format17(r.entropy) << ',' << format17(r.h32_cum) << ','
            << format17(r.min_u) << ',' << format17(r.max_u) << ','
            << r.newton_iters << ',' << format17(r.flux_l1) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_snapshots(const Trajectory<double>& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write snapshot file: " + path);
    const Index N = traj.initial.modes();
    out << "t";
    for (Index k = 0; k < N; ++k) out << ",c" << k;
    out << "\n";
    for (size_t i = 0; i < traj.snapshots.size(); ++i) {
        out << format17(traj.snapshot_times[i]);
        for (Index k = 0; k < N; ++k)
            out << ',' << format17(traj.snapshots[i].coeffs[k]);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

namespace {

double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
}

double rel_err(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

}  // namespace

OperatorCheckReport operator_check(const OperatorCheckOptions& opts) {
    const Index N = opts.modes, M = opts.nodes;
    const Basis<double> basis = Basis<double>::make(N, M);
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    enum {
        kCosRoundTrip, kSinRoundTrip, kParseval, kCompose, kZeroMean,
        kHalfPairing, kOneIdentity, kThreeHalfContraction, kTwoIdentity,
        kInverse, kShiftedInverse, kExtensionTrace, kRows
    };
    OperatorCheckReport report;
    report.rows.resize(kRows + 1);
    auto& rows = report.rows;
    rows[kCosRoundTrip] = {"cosine round-trip", 0, 1e-12, false};
    rows[kSinRoundTrip] = {"sine round-trip", 0, 1e-12, false};
    rows[kParseval] = {"nodal/spectral Parseval", 0, 1e-12, false};
    rows[kCompose] = {"I(I(u)) = -u''", 0, 1e-12, false};
    rows[kZeroMean] = {"mean of I(u) = 0", 0, 1e-12, false};
    rows[kHalfPairing] = {"-<I(u),u> = |u|_{1/2}^2", 0, 1e-12, false};
    rows[kOneIdentity] = {"int I(u)^2 = |u|_1^2", 0, 1e-12, false};
    rows[kThreeHalfContraction] = {"-int I(u)_x u_x = |u|_{3/2}^2", 0, 1e-12, false};
    rows[kTwoIdentity] = {"int (I(u)_x)^2 = |u|_2^2", 0, 1e-12, false};
    rows[kInverse] = {"inverse_I(I u) = -(u - mean)", 0, 1e-12, false};
    rows[kShiftedInverse] = {"-I(v) + int v = g", 0, 1e-12, false};
    rows[kExtensionTrace] = {"extension trace at y = 0", 0, 1e-12, false};
    rows[kRows] = {"extension quotient, h = 1e-6", 0, 1e-4, false};

    auto track = [&rows](int row, double err) {
        if (err > rows[row].max_error) rows[row].max_error = err;
    };

    for (int field = 0; field < opts.fields; ++field) {
        SpectralField<double> u = SpectralField<double>::zero(N);
        for (Index k = 0; k < N; ++k) u.coeffs[k] = gauss(rng);

        // analysis/synthesis closes on band-limited data
        NodalField<double> un = to_nodal(u, basis);
        SpectralField<double> u2 = to_spectral(un, basis);
        if (opts.corrupt && field == 0) u2.coeffs[std::min<Index>(1, N - 1)] += 1e-6;
        track(kCosRoundTrip, rel_err(u2.coeffs, u.coeffs));

        SineField<double> s = SineField<double>::zero(N);
        for (Index k = 1; k < N; ++k) s.coeffs[k] = gauss(rng);
        SineField<double> s2 = nodal_to_sine(sine_to_nodal(s, basis), basis);
        track(kSinRoundTrip, rel_err(s2.coeffs, s.coeffs));

        track(kParseval, rel_err(quadrature<double>(un.values.cwiseProduct(un.values)),
                                 u.coeffs.squaredNorm()));

        SpectralField<double> Iu = apply_I(u);
        SpectralField<double> IIu = apply_I(Iu);
        Eigen::VectorXd lam_u(N);
        for (Index k = 0; k < N; ++k) lam_u[k] = eigenvalue<double>(k) * u.coeffs[k];
        track(kCompose, rel_err(IIu.coeffs, lam_u));
        track(kZeroMean, std::abs(Iu.mean()));

        NodalField<double> Iun = to_nodal(Iu, basis);
        track(kHalfPairing,
              rel_err(-quadrature<double>(Iun.values.cwiseProduct(un.values)),
                      seminorm_sq(u, 0.5)));
        track(kOneIdentity,
              rel_err(quadrature<double>(Iun.values.cwiseProduct(Iun.values)),
                      seminorm_sq(u, 1.0)));

        NodalField<double> dxIn = sine_to_nodal(apply_dxI(u), basis);
        NodalField<double> uxn = sine_to_nodal(derivative(u), basis);
        track(kThreeHalfContraction,
              rel_err(-quadrature<double>(dxIn.values.cwiseProduct(uxn.values)),
                      seminorm_sq(u, 1.5)));
        track(kTwoIdentity,
              rel_err(quadrature<double>(dxIn.values.cwiseProduct(dxIn.values)),
                      seminorm_sq(u, 2.0)));

        SpectralField<double> inv = inverse_I(Iu);
        Eigen::VectorXd neg_fluct = -u.coeffs;
        neg_fluct[0] = 0.0;
        track(kInverse, rel_err(inv.coeffs, neg_fluct));

        SpectralField<double> v = inverse_I_shifted(u);
        SpectralField<double> back = apply_I(v);
        back.coeffs = -back.coeffs;
        back.coeffs[0] += v.mean();
        track(kShiftedInverse, rel_err(back.coeffs, u.coeffs));

        SpectralField<double> v0 = harmonic_extension(u, 0.0);
        track(kExtensionTrace, rel_err(v0.coeffs, u.coeffs));
    }

    // Dirichlet-to-Neumann quotient on the two-mode profile used as the
    // reference example; high modes would need a smaller h to stay first-order
    // accurate at this tolerance.
    {
        SpectralField<double> u = SpectralField<double>::zero(std::max<Index>(N, 3));
        u.coeffs[1] = 1.0;
        u.coeffs[2] = 1.0;
        const double h = 1e-6;
        SpectralField<double> vh = harmonic_extension(u, h);
        Eigen::VectorXd quotient = (vh.coeffs - u.coeffs) / h;
        SpectralField<double> Iu = apply_I(u);
        rows[kRows].max_error =
            (quotient - Iu.coeffs).norm() / Iu.coeffs.norm();
    }

    report.passed = true;
    for (auto& row : rows) {
        row.passed = row.max_error <= row.tol;
        report.passed = report.passed && row.passed;
    }
    return report;
}

std::string format_report(const OperatorCheckReport& report) {
    std::ostringstream out;
    char buf[160];
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof buf, "  %-34s max err %10.3e  tol %8.1e  %s\n",
                      row.name.c_str(), row.max_error, row.tol,
                      row.passed ? "pass" : "FAIL");
        out << buf;
    }
    out << (report.passed ? "operator check: all identities hold\n"
                          : "operator check: FAILED\n");
    return out.str();
}

}  // namespace fraclap::io
