#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

#ifndef FRACLAP_BIN
#error "FRACLAP_BIN must point at the command-line binary"
#endif

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "fraclap_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const fs::path capture = scratch_dir() / ("capture_" + std::to_string(counter++));
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += std::string("\"") + FRACLAP_BIN + "\" " + args + " > \"" +
           capture.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult res;
    if (status == -1) return res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -2;
    std::ifstream in(capture);
    std::ostringstream ss;
    ss << in.rdbuf();
    res.output = ss.str();
    return res;
}

std::string write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream out(p);
    out << text;
    return p.string();
}

size_t count_lines(const std::string& path) {
    std::ifstream in(path);
    size_t n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("solve: runs a config, writes the report, and is deterministic") {
    const std::string report = (scratch_dir() / "run_report.csv").string();
    const std::string snaps = (scratch_dir() / "run_snaps.csv").string();
    const std::string cfg = write_file("solve.json", R"({
        "modes": 8, "nodes": 16, "tau": 1e-4, "T": 5e-4,
        "ic": {"cosine_bump": {"theta": 1.5, "a": 0.5}},
        "outputs": {"report_csv": ")" + report + R"(",
                    "snapshots": ")" + snaps + R"("}
    })");

    CliResult res = run_cli("solve --config \"" + cfg + "\"");
    CAPTURE(res.output);
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("mass") != std::string::npos);
    CHECK(res.output.find("energy_half") != std::string::npos);
    CHECK(count_lines(report) == 6);  // header + one row per step
    CHECK(count_lines(snaps) == 3);   // header + t = 0 + final

    const std::string first = slurp(report);
    CliResult res2 = run_cli("solve --config \"" + cfg + "\"");
    REQUIRE(res2.exit_code == 0);
    CHECK(slurp(report) == first);  // byte-identical rerun
}

TEST_CASE("solve: pressure summary appears when E_prime is configured") {
    const std::string cfg = write_file("solve_pressure.json", R"({
        "modes": 8, "nodes": 16, "tau": 1e-4, "T": 2e-4, "E_prime": 4.0,
        "ic": {"cosine_bump": {"theta": 1.5, "a": 0.5}}
    })");
    CliResult res = run_cli("solve --config \"" + cfg + "\"");
    CAPTURE(res.output);
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("pressure range") != std::string::npos);
}

TEST_CASE("operator-check: clean pass, corrupted failure") {
    CliResult ok = run_cli("operator-check --modes 16 --nodes 32 --fields 10");
    CAPTURE(ok.output);
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("all identities hold") != std::string::npos);

    CliResult bad =
        run_cli("operator-check --modes 16 --nodes 32 --fields 10 --corrupt");
    CHECK(bad.exit_code == 2);
    CHECK(bad.output.find("FAIL") != std::string::npos);
}

TEST_CASE("norms: reports the semi-norm table of a field file") {
    const std::string field = [] {
        std::ostringstream body;
        for (int j = 0; j < 16; ++j) {
            const double x = (2.0 * j + 1.0) / 32.0;
            body << x << " " << 2.0 + x * 0 << "\n";
        }
        return write_file("norms_field.txt", body.str());
    }();
    CliResult res = run_cli("norms --ic \"" + field + "\"");
    CAPTURE(res.output);
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("mass") != std::string::npos);
    CHECK(res.output.find("H^1/2") != std::string::npos);
    CHECK(res.output.find("2") != std::string::npos);
}

TEST_CASE("exit codes: usage 1, numeric failure 2, I/O failure 3") {
    CHECK(run_cli("").exit_code == 1);                       // missing subcommand
    CHECK(run_cli("solve").exit_code == 1);                  // missing --config
    CHECK(run_cli("solve --config x --bogus").exit_code == 1);
    CHECK(run_cli("--help").exit_code == 0);

    CliResult missing = run_cli("solve --config \"" +
                                (scratch_dir() / "no_such.json").string() + "\"");
    CHECK(missing.exit_code == 3);

    const std::string bad_cfg = write_file("bad.json", R"({"tau": 0})");
    CliResult invalid = run_cli("solve --config \"" + bad_cfg + "\"");
    CHECK(invalid.exit_code == 1);
    CHECK(invalid.output.find("tau") != std::string::npos);

    const std::string doomed = write_file("doomed.json", R"({
        "modes": 8, "nodes": 16, "tau": 10, "T": 20,
        "newton_tol": 1e-14, "newton_max_iter": 1,
        "ic": {"cosine_bump": {"theta": 1.5, "a": 0.5}}
    })");
    CliResult fail = run_cli("solve --config \"" + doomed + "\"");
    CHECK(fail.exit_code == 2);
}

TEST_CASE("sweep: one run per value on a bounded thread pool") {
    const std::string report = (scratch_dir() / "sweep_report.csv").string();
    const std::string cfg = write_file("sweep.json", R"({
        "modes": 8, "nodes": 16, "tau": 1e-4, "T": 3e-4,
        "ic": {"cosine_bump": {"theta": 1.5, "a": 0.5}},
        "outputs": {"report_csv": ")" + report + R"("}
    })");

    CliResult res = run_cli("sweep --config \"" + cfg + "\" --vary eps=1e-2,1e-3",
                            "FRACLAP_THREADS=2");
    CAPTURE(res.output);
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("eps = 1e-2") != std::string::npos);
    CHECK(res.output.find("eps = 1e-3") != std::string::npos);
    CHECK(res.output.find("|u(eps = 1e-2) - u(eps = 1e-3)|_L2") !=
          std::string::npos);
    CHECK(count_lines((scratch_dir() / "sweep_report_eps_1e-2.csv").string()) == 4);
    CHECK(count_lines((scratch_dir() / "sweep_report_eps_1e-3.csv").string()) == 4);

    CHECK(run_cli("sweep --config \"" + cfg + "\" --vary bogus=1").exit_code == 1);
    CHECK(run_cli("sweep --config \"" + cfg + "\" --vary eps=").exit_code == 1);
    CHECK(run_cli("sweep --config \"" + cfg + "\" --vary eps=a,b").exit_code == 1);
}
