#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string g_cli;

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string out_path = "/tmp/adrceq_cli_test_out.txt";
    const std::string cmd = g_cli + " " + args + " > " + out_path + " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream f(out_path);
    std::stringstream ss;
    ss << f.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_tests <path-to-adrceq-binary>\n");
        return 1;
    }
    g_cli = argv[1];
    doctest::Context ctx;
    ctx.applyCommandLine(1, argv);
    return ctx.run();
}

TEST_CASE("tune prints the mapped gains and fails loudly on a bad order") {
    const RunResult ok = run("tune --preset paper-n1");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("1.13147") != std::string::npos);
    CHECK(ok.out.find("1640.25") != std::string::npos);

    const RunResult explicit_args = run("tune --n 2 --omega-cl 4 --k-eso 7 --b0 1");
    CHECK(explicit_args.exit_code == 0);
    CHECK(explicit_args.out.find("21952") != std::string::npos);

    const RunResult bad = run("tune --n 3 --omega-cl 1 --k-eso 2 --b0 1");
    CHECK(bad.exit_code == 2);
    CHECK(bad.out.find("order") != std::string::npos);

    CHECK(run("tune --preset nonsense").exit_code == 2);
}

TEST_CASE("equiv-check passes the reference tunings and fails a perturbed map") {
    CHECK(run("equiv-check --preset paper-n1").exit_code == 0);
    CHECK(run("equiv-check --preset paper-n2").exit_code == 0);
    const RunResult bad = run("equiv-check --preset paper-n1 --kp-perturb-pct 1");
    CHECK(bad.exit_code == 1);
    CHECK(bad.out.find("FAIL") != std::string::npos);
    CHECK(bad.out.find("omega") != std::string::npos);
}

TEST_CASE("ms reports the sensitivity peak for the bundled presets") {
    const RunResult n2 = run("ms --preset paper-n2-pid");
    CHECK(n2.exit_code == 0);
    CHECK(n2.out.find("Ms = 1.46") != std::string::npos);
    const RunResult open_loop = run("ms --preset open-loop");
    CHECK(open_loop.exit_code == 0);
    CHECK(open_loop.out.find("Ms = 1 ") != std::string::npos);
    CHECK(run("ms --preset who-knows").exit_code == 2);
    CHECK(run("ms").exit_code == 2);
}

TEST_CASE("simulate writes deterministic CSV output") {
    const RunResult a = run(
        "simulate --preset scenario-1 --variant pid-plus-ceq2 --tf 0.005 --seed 7 --t-end 0.5 "
        "--out /tmp/adrceq_cli_a");
    CHECK(a.exit_code == 0);
    const RunResult b = run(
        "simulate --preset scenario-1 --variant pid-plus-ceq2 --tf 0.005 --seed 7 --t-end 0.5 "
        "--out /tmp/adrceq_cli_b");
    CHECK(b.exit_code == 0);
    const std::string ta = slurp("/tmp/adrceq_cli_a/trace.csv");
    CHECK(!ta.empty());
    CHECK(ta == slurp("/tmp/adrceq_cli_b/trace.csv"));
    CHECK(ta.rfind("t,r,y,y_meas,u,e,d\n", 0) == 0);

    CHECK(run("simulate --preset scenario-9").exit_code == 2);
    CHECK(run("simulate --preset scenario-1 --variant what").exit_code == 2);
}

TEST_CASE("simulate --plot emits an SVG") {
    const RunResult r = run(
        "simulate --preset scenario-2 --variant eadrc-2dof --tr 0.08 --t-end 0.5 "
        "--out /tmp/adrceq_cli_svg --plot");
    CHECK(r.exit_code == 0);
    CHECK(slurp("/tmp/adrceq_cli_svg/trace.svg").find("<svg") != std::string::npos);
}

TEST_CASE("bode writes the channel CSV") {
    const RunResult r = run("bode --preset paper-n2 --points 16 --out /tmp/adrceq_cli_bode");
    CHECK(r.exit_code == 0);
    const std::string csv = slurp("/tmp/adrceq_cli_bode/bode_paper-n2.csv");
    CHECK(csv.rfind("omega_rad_s,gyd_pid_mag_db,gyd_pid_phase_deg", 0) == 0);
    CHECK(run("bode --preset scenario-1").exit_code == 2);
}

TEST_CASE("crib prints the four structures") {
    const RunResult r = run("crib --preset paper-n2 --beta 0.75 --fr-tf 0.001 --fy-tf 0.05");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("1DOF PID") != std::string::npos);
    CHECK(r.out.find("2DOF eADRC") != std::string::npos);
    CHECK(run("crib --n 5 --omega-cl 1 --k-eso 2").exit_code == 2);
}

TEST_CASE("config file drives a command and unknown keys are rejected") {
    {
        std::ofstream f("/tmp/adrceq_cli_cfg.ini");
        f << "# tuning preset\n[tune]\nn = 1\nomega_cl_rad_s = 2.7\nk_eso = 15\nb0 = 1\n";
    }
    const RunResult ok = run("tune --config /tmp/adrceq_cli_cfg.ini");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("1640.25") != std::string::npos);

    {
        std::ofstream f("/tmp/adrceq_cli_cfg_bad.ini");
        f << "[tune]\nn = 1\nomega_cl_rad_s = 2.7\nk_eso = 15\nb0 = 1\nwhatever = 3\n";
    }
    const RunResult bad = run("tune --config /tmp/adrceq_cli_cfg_bad.ini");
    CHECK(bad.exit_code == 2);
    CHECK(bad.out.find("whatever") != std::string::npos);
}
