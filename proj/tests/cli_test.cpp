// End-to-end checks of the command line tool: exit codes, determinism of
// emitted files, and agreement between the analyze and simulate paths.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#ifndef COWU_CLI_PATH
#error "COWU_CLI_PATH must point at the built CLI binary"
#endif

namespace {

int g_failures = 0;

void check(bool cond, const std::string& what) {
    if (!cond) {
        ++g_failures;
        std::cerr << "[FAIL] " << what << "\n";
    }
}

int run(const std::string& args) {
    const std::string cmd = std::string(COWU_CLI_PATH) + " " + args +
                            " > /dev/null 2> /dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() / "cowu_cli_test";
    fs::create_directories(dir);
    const fs::path cfg = dir / "scenario.cfg";
    {
        std::ofstream out(cfg);
        out << "n_pull = 25\nn_push = 25\nslots_per_frame = 50\n"
               "arrival_rate = 0.025\nquery_lower = 0.6\nquery_upper = 0.9\n"
               "alpha = 0.4\n";
    }

    // usage errors
    check(run("") == 2, "no subcommand exits 2");
    check(run("analyze") == 2, "missing --config exits 2");
    check(run("reproduce --figure fig9 --out " + (dir / "f9").string()) == 2,
          "unknown figure exits 2");
    check(run("analyze --config " + (dir / "missing.cfg").string()) == 2,
          "missing config file exits 2");

    // invalid config content
    const fs::path bad = dir / "bad.cfg";
    {
        std::ofstream out(bad);
        out << "tx_prob = 0\n";
    }
    check(run("analyze --config " + bad.string()) == 2,
          "invalid config exits 2");

    // analyze: deterministic output with header
    const fs::path a1 = dir / "a1.csv";
    const fs::path a2 = dir / "a2.csv";
    check(run("analyze --config " + cfg.string() + " --alpha 0,0.4,1 --out " +
              a1.string()) == 0,
          "analyze exits 0");
    check(run("analyze --config " + cfg.string() + " --alpha 0,0.4,1 --out " +
              a2.string()) == 0,
          "analyze rerun exits 0");
    const std::string analyze_out = slurp(a1);
    check(analyze_out == slurp(a2), "analyze output is byte-identical");
    check(analyze_out.rfind("# cowu", 0) == 0,
          "analyze output starts with parameter header");
    check(analyze_out.find("alpha,gamma_w,gamma_u,e_tot_joules") !=
              std::string::npos,
          "analyze column header present");
    // theory value from the reference curves appears at full precision
    check(analyze_out.find("0.26076922936149") != std::string::npos,
          "analyze reproduces the alpha=0.4 reference accuracy");

    // simulate: deterministic given a seed
    const fs::path s1 = dir / "s1.csv";
    const fs::path s2 = dir / "s2.csv";
    const std::string sim_args = "simulate --config " + cfg.string() +
                                 " --alpha 0.4 --frames 2000 --seed 9 --out ";
    check(run(sim_args + s1.string()) == 0, "simulate exits 0");
    check(run(sim_args + s2.string()) == 0, "simulate rerun exits 0");
    check(slurp(s1) == slurp(s2), "simulate output is byte-identical");

    // frames=1 reports missing standard errors
    const fs::path s3 = dir / "s3.csv";
    check(run("simulate --config " + cfg.string() +
              " --alpha 0.4 --frames 1 --seed 9 --out " + s3.string()) == 0,
          "single-frame simulate exits 0");
    check(slurp(s3).find(",na,") != std::string::npos,
          "single-frame simulate marks stderr columns na");

    // alpha-opt: feasible and infeasible paths
    const fs::path narrow = dir / "narrow.cfg";
    {
        std::ofstream out(narrow);
        out << "n_pull = 25\nn_push = 25\nslots_per_frame = 50\n"
               "query_lower = 0.94\nquery_upper = 0.98\n";
    }
    check(run("alpha-opt --config " + narrow.string() +
              " --lambda 0.005 --gamma-th 0.8") == 0,
          "feasible alpha-opt exits 0");
    const fs::path wide = dir / "wide.cfg";
    {
        std::ofstream out(wide);
        out << "n_pull = 25\nn_push = 25\nslots_per_frame = 50\n"
               "query_lower = 0.92\nquery_upper = 1.0\n";
    }
    check(run("alpha-opt --config " + wide.string() +
              " --lambda 0.015 --gamma-th 0.8") == 3,
          "infeasible alpha-opt exits 3");

    // infeasible Round-Robin configuration
    const fs::path rr_bad = dir / "rr_bad.cfg";
    {
        std::ofstream out(rr_bad);
        out << "n_pull = 60\nn_push = 25\nslots_per_frame = 50\n";
    }
    check(run("lambda-max --config " + rr_bad.string() + " --rr") == 3,
          "Round-Robin with n_pull > L exits 3");

    // lambda-max smoke run on a reduced grid
    const fs::path lm = dir / "lm.csv";
    check(run("lambda-max --config " + narrow.string() +
              " --gamma-th 0.8 --lambda 0.02,0.025,0.03 --out " +
              lm.string()) == 0,
          "lambda-max exits 0");
    check(slurp(lm).find("0.025,") != std::string::npos,
          "lambda-max finds the reference value on the reduced grid");

    if (g_failures == 0) std::printf("cli integration: all checks passed\n");
    return g_failures == 0 ? 0 : 1;
}
