#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#ifndef CSPEC_CLI
#error "CSPEC_CLI must name the cspec executable"
#endif

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI with stdout captured and stderr discarded.
Run cli(const std::string& args) {
    const std::string cmd = std::string(CSPEC_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string tmp_path(const std::string& name) {
    const char* dir = std::getenv("TMPDIR");
    return std::string(dir ? dir : "/tmp") + "/cspec_cli_test_" + name;
}

}  // namespace

TEST_CASE("exit codes for bad invocations") {
    CHECK(cli("").code == 2);
    CHECK(cli("--help").code == 0);
    CHECK(cli("no-such-command").code == 2);
    CHECK(cli("mode-run --k zero").code == 2);
    CHECK(cli("mode-run --mach -1 --t-end 1").code == 2);
    CHECK(cli("mode-run --k 0 --t-end 1").code == 2);
    CHECK(cli("mode-run --xi-in 0 --t-end 1").code == 2);
    CHECK(cli("mode-run --format xml").code == 2);
    CHECK(cli("field-run --jobs nope").code == 2);
    CHECK(cli("mode-run --beta 4 --t-end 1").code == 2);
    CHECK(cli("sweep --spec /nonexistent.json").code == 2);
    CHECK(cli("verify --only 13").code == 2);
    CHECK(cli("audit-multipliers --nu 0").code == 2);
}

TEST_CASE("mode-run output") {
    const Run empty = cli("mode-run --t-end 0");
    CHECK(empty.code == 0);
    CHECK(empty.out == "t,abs_R,abs_A,abs_Omega,abs_Z,E,Ew\n");

    const Run csv = cli("mode-run --k 3 --eta 21 --mach 1 --xi-in 5 --t-end 10 --samples 11");
    CHECK(csv.code == 0);
    std::istringstream is(csv.out);
    std::string line;
    int lines = 0;
    while (std::getline(is, line)) ++lines;
    CHECK(lines == 12);

    const Run js = cli("mode-run --k 3 --eta 21 --xi-in 5 --t-end 500 --format json --samples 101");
    REQUIRE(js.code == 0);
    const auto j = nlohmann::json::parse(js.out);
    CHECK(j["schema"] == "cspec-mode/1");
    CHECK(j["fits"][0]["name"] == "growth_envelope");
    CHECK(j["fits"][0]["slope"].get<double>() == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("mode-run at M = 50 reports both critical-time fits and growth afterwards") {
    const Run js = cli("mode-run --preset fig1_transient --mach 50 --t-end 30 --format json --samples 31");
    REQUIRE(js.code == 0);
    const auto j = nlohmann::json::parse(js.out);
    bool before = false;
    double after = 0.0;
    for (const auto& f : j["fits"]) {
        if (f["name"] == "abs_A_before_critical") before = std::isfinite(f["slope"].get<double>());
        if (f["name"] == "abs_A_after_critical") after = f["slope"].get<double>();
    }
    CHECK(before);
    CHECK(after > 0.5);
}

TEST_CASE("single-point sweep matches mode-run summary") {
    const std::string spec = tmp_path("spec.json");
    std::ofstream(spec) << R"({"k": 3, "eta": 21, "horizon": 100, "data": [{"R": 0, "A": 0, "Omega": 5}]})";
    const Run sw = cli("sweep --spec " + spec + " --format json");
    REQUIRE(sw.code == 0);
    const auto s = nlohmann::json::parse(sw.out);
    const Run mr = cli("mode-run --k 3 --eta 21 --xi-in 5 --t-end 100 --format json");
    REQUIRE(mr.code == 0);
    const auto m = nlohmann::json::parse(mr.out);
    CHECK(s["table"]["rows"][0][7] == m["summary"]["transient_max"]);
    CHECK(s["table"]["rows"][0][8] == m["summary"]["t_at_max"]);

    std::ofstream(spec) << R"({"k": 1, "mach": [-1, 1], "horizon": 5})";
    CHECK(cli("sweep --spec " + spec).code == 1);
    std::remove(spec.c_str());
}

TEST_CASE("audit-multipliers reports the w cap violation") {
    const Run r = cli("audit-multipliers --k 3 --eta 21 --nu 1e-3 --t-end 600 --points 1000 --format json");
    CHECK(r.code == 1);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["all_hold"] == false);
    CHECK(j["rows"].size() == 5);
}

TEST_CASE("field-run and zero-mode") {
    const Run f = cli("field-run --preset fig1_forced --t-end 10 --samples 3");
    CHECK(f.code == 0);
    CHECK(f.out.rfind("t,Q_norm,Px_norm,Py_norm,rho_norm,velocity,E0\n", 0) == 0);
    const Run z = cli("zero-mode --nu 0.1 --t-end 100 --d-eta 0.1 --format json");
    CHECK(z.code == 0);
    CHECK(nlohmann::json::parse(z.out)["fits"].size() == 2);
}

TEST_CASE("verify twice gives identical JSON apart from the timestamp") {
    const Run a = cli("verify --only 2 --jobs 1");
    const Run b = cli("verify --only 2 --jobs 1");
    REQUIRE(a.code == 0);
    auto ja = nlohmann::json::parse(a.out), jb = nlohmann::json::parse(b.out);
    ja.erase("timestamp");
    jb.erase("timestamp");
    CHECK(ja.dump() == jb.dump());
    CHECK(cli("verify --only 7").code == 1);
}
