// Batch experiment runner for the pull/push coexistence model. Every
// command emits deterministic CSV with a comment header recording the
// resolved parameter set, so any output file can be regenerated from its
// own header.
//
// Exit codes: 0 success, 2 usage/config error, 3 infeasible configuration.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cowu/config_io.hpp"
#include "cowu/metrics.hpp"
#include "cowu/opt.hpp"
#include "cowu/sim.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

// Shortest round-trip decimal formatting.
std::string fmt(double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string fmt(int value) { return std::to_string(value); }

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    explicit OutputTarget(const std::string& path) {
        if (path.empty() || path == "-") return;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file: " + path);
        stream = &file;
    }
    std::ostream& out() { return *stream; }
};

void write_scenario_header(std::ostream& os, const cowu::Scenario& sc) {
    const auto& c = sc.config;
    os << "# cowu " << cowu::kVersion << "\n"
       << "# n_pull=" << c.n_pull << " n_push=" << c.n_push
       << " slots_per_frame=" << c.slots_per_frame
       << " slot_duration_s=" << fmt(c.slot_duration)
       << " tx_prob=" << fmt(c.tx_prob)
       << " arrival_rate=" << fmt(c.arrival_rate)
       << " power_tx_w=" << fmt(c.power_tx)
       << " power_rx_w=" << fmt(c.power_rx) << " v_min=" << fmt(c.v_min)
       << " v_max=" << fmt(c.v_max) << " query_lower=" << fmt(sc.range.lower)
       << " query_upper=" << fmt(sc.range.upper) << "\n";
}

std::vector<double> alphas_or_default(const std::vector<double>& flag,
                                      const cowu::Scenario& sc) {
    if (!flag.empty()) return flag;
    return {sc.alpha};
}

int cmd_analyze(const cowu::Scenario& sc, const std::vector<double>& alphas,
                const std::string& out_path) {
    OutputTarget target(out_path);
    auto& os = target.out();
    write_scenario_header(os, sc);
    os << "alpha,gamma_w,gamma_u,e_tot_joules\n";
    const auto model = sc.observation_model();
    for (double alpha : alphas) {
        const auto in =
            cowu::MetricInputs::at_alpha(sc.config, model, sc.range, alpha);
        const auto rep = cowu::evaluate(in);
        os << fmt(alpha) << ',' << fmt(rep.gamma_w) << ',' << fmt(rep.gamma_u)
           << ',' << fmt(rep.e_tot) << '\n';
    }
    return 0;
}

int cmd_simulate(const cowu::Scenario& sc, const std::vector<double>& alphas,
                 long frames, uint64_t seed, int threads,
                 const std::string& out_path) {
    OutputTarget target(out_path);
    auto& os = target.out();
    write_scenario_header(os, sc);
    os << "# frames=" << frames << " seed=" << seed << "\n";
    os << "alpha,gamma_w_hat,gamma_w_se,gamma_u_hat,gamma_u_se,"
          "e_tot_hat,e_tot_se,frames,seed\n";
    const auto model = sc.observation_model();
    auto se = [](double v) { return std::isnan(v) ? std::string("na") : fmt(v); };
    for (double alpha : alphas) {
        const auto est = cowu::run_campaign(sc.config, model, sc.range, alpha,
                                            frames, seed, threads);
        os << fmt(alpha) << ',' << fmt(est.gamma_w_hat) << ','
           << se(est.gamma_w_se) << ',' << fmt(est.gamma_u_hat) << ','
           << se(est.gamma_u_se) << ',' << fmt(est.e_tot_hat) << ','
           << se(est.e_tot_se) << ',' << est.frames << ',' << est.master_seed
           << '\n';
    }
    return 0;
}

cowu::GridSpec make_grid(double gamma_th, const std::vector<double>& alphas,
                         const std::vector<double>& lambdas) {
    cowu::GridSpec grid = cowu::GridSpec::defaults(gamma_th);
    if (!alphas.empty()) grid.alpha_values = alphas;
    if (!lambdas.empty()) grid.lambda_values = lambdas;
    grid.validate();
    return grid;
}

int cmd_sweep(const cowu::Scenario& sc, const cowu::GridSpec& grid,
              const std::string& out_path) {
    OutputTarget target(out_path);
    auto& os = target.out();
    write_scenario_header(os, sc);
    os << "# gamma_th=" << fmt(grid.gamma_th) << "\n";
    os << "lambda,alpha,gamma_w,gamma_u,e_tot_joules,feasible\n";
    const auto res =
        cowu::sweep(sc.config, sc.observation_model(), sc.range, grid);
    for (const auto& cell : res.cells)
        os << fmt(cell.lambda) << ',' << fmt(cell.alpha) << ','
           << fmt(cell.gamma_w) << ',' << fmt(cell.gamma_u) << ','
           << fmt(cell.e_tot) << ',' << (cell.feasible ? 1 : 0) << '\n';
    return 0;
}

int cmd_lambda_max(const cowu::Scenario& sc, const cowu::GridSpec& grid,
                   bool round_robin, const std::string& out_path) {
    OutputTarget target(out_path);
    auto& os = target.out();
    write_scenario_header(os, sc);
    os << "# gamma_th=" << fmt(grid.gamma_th)
       << " scheme=" << (round_robin ? "rr" : "cowu") << "\n";
    os << "lambda_max,feasible_alphas\n";
    if (round_robin) {
        os << fmt(cowu::rr_lambda_max(sc.config, grid)) << ",\n";
        return 0;
    }
    const auto res =
        cowu::lambda_max(sc.config, sc.observation_model(), sc.range, grid);
    os << fmt(res.lambda_max) << ',';
    for (size_t i = 0; i < res.feasible_alphas.size(); ++i)
        os << (i ? ";" : "") << fmt(res.feasible_alphas[i]);
    os << '\n';
    return 0;
}

int cmd_alpha_opt(const cowu::Scenario& sc, double lambda,
                  const cowu::GridSpec& grid, const std::string& out_path) {
    const auto res = cowu::alpha_opt(sc.config, sc.observation_model(),
                                     sc.range, lambda, grid);
    const auto eta = cowu::energy_ratio(sc.config, sc.observation_model(),
                                        sc.range, lambda, grid);
    OutputTarget target(out_path);
    auto& os = target.out();
    write_scenario_header(os, sc);
    os << "# gamma_th=" << fmt(grid.gamma_th) << " lambda=" << fmt(lambda)
       << "\n";
    os << "alpha_opt,e_tot_joules,eta\n";
    if (!res.feasible) {
        os << "infeasible,,\n";
        std::cerr << "no alpha satisfies both gamma constraints at lambda="
                  << fmt(lambda) << "\n";
        return kExitInfeasible;
    }
    os << fmt(res.alpha) << ',' << fmt(res.e_tot) << ','
       << (eta.feasible ? fmt(eta.eta) : std::string()) << '\n';
    return 0;
}

// --- figure reproduction -------------------------------------------------

cowu::SystemConfig fig_config(int n_pull, int n_push, int L, double lambda) {
    cowu::SystemConfig cfg;
    cfg.n_pull = n_pull;
    cfg.n_push = n_push;
    cfg.slots_per_frame = L;
    cfg.arrival_rate = lambda;
    return cfg;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open output file: " + path.string());
    return os;
}

int reproduce_fig3(const std::filesystem::path& dir, long frames,
                   uint64_t seed, int threads) {
    const cowu::QueryRange range{0.6, 0.9};
    const std::vector<double> alphas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    const std::vector<int> frame_lengths{25, 50, 75};

    auto theory = open_out(dir / "fig3_theory.csv");
    theory << "# cowu " << cowu::kVersion << " reproduce fig3 theory\n"
           << "L,alpha,gamma_w,gamma_u,e_tot_joules\n";
    auto sim = open_out(dir / "fig3_sim.csv");
    sim << "# cowu " << cowu::kVersion << " reproduce fig3 simulation\n"
        << "# frames=" << frames << " seed=" << seed << "\n"
        << "L,alpha,gamma_w_hat,gamma_w_se,gamma_u_hat,gamma_u_se,"
           "e_tot_hat,e_tot_se\n";

    for (int L : frame_lengths) {
        const auto cfg = fig_config(25, 25, L, 0.025);
        const auto model = cowu::ObservationModel::uniform(cfg);
        for (double alpha : alphas) {
            const auto in =
                cowu::MetricInputs::at_alpha(cfg, model, range, alpha);
            const auto rep = cowu::evaluate(in);
            theory << L << ',' << fmt(alpha) << ',' << fmt(rep.gamma_w) << ','
                   << fmt(rep.gamma_u) << ',' << fmt(rep.e_tot) << '\n';
            const auto est = cowu::run_campaign(cfg, model, range, alpha,
                                                frames, seed, threads);
            sim << L << ',' << fmt(alpha) << ',' << fmt(est.gamma_w_hat) << ','
                << fmt(est.gamma_w_se) << ',' << fmt(est.gamma_u_hat) << ','
                << fmt(est.gamma_u_se) << ',' << fmt(est.e_tot_hat) << ','
                << fmt(est.e_tot_se) << '\n';
        }
    }

    auto manifest = open_out(dir / "fig3_manifest.txt");
    manifest << "figure fig3\nn_pull 25\nn_push 25\nquery [0.6,0.9]\n"
             << "lambda 0.025\nL {25,50,75}\nalpha {0,0.2,...,1}\n"
             << "frames " << frames << "\nseed " << seed << "\n";

    auto plot = open_out(dir / "fig3.gp");
    plot << "set datafile separator ','\nset key outside\nset xlabel 'alpha'\n"
         << "set terminal pngcairo size 1200,400\nset output 'fig3.png'\n"
         << "set multiplot layout 1,3\n";
    for (auto [col, name] :
         {std::pair{3, "gamma_w"}, {4, "gamma_u"}, {5, "E_tot [J]"}}) {
        plot << "set ylabel '" << name << "'\nplot ";
        bool first = true;
        for (int L : frame_lengths) {
            if (!first) plot << ", ";
            first = false;
            plot << "'fig3_theory.csv' using 2:($1==" << L << "?$" << col
                 << ":1/0) with lines title 'theory L=" << L << "', "
                 << "'fig3_sim.csv' using 2:($1==" << L << "?$"
                 << 2 * col - 3 << ":1/0) with points title 'sim L=" << L
                 << "'";
        }
        plot << "\n";
    }
    plot << "unset multiplot\n";
    return 0;
}

int reproduce_fig4(const std::filesystem::path& dir) {
    const cowu::QueryRange range{0.94, 0.98};
    const auto grid = cowu::GridSpec::defaults(0.8);
    const std::vector<int> n_push_values{15, 25, 35};
    const std::vector<int> n_pull_values{5, 15, 25, 35, 45};

    auto out = open_out(dir / "fig4_lambda_max.csv");
    out << "# cowu " << cowu::kVersion << " reproduce fig4\n"
        << "# L=50 query=[0.94,0.98] gamma_th=0.8\n"
        << "scheme,n_push,n_pull,lambda_max\n";
    for (int n_push : n_push_values) {
        for (int n_pull : n_pull_values) {
            const auto cfg = fig_config(n_pull, n_push, 50, 0.0);
            const auto model = cowu::ObservationModel::uniform(cfg);
            const auto res = cowu::lambda_max(cfg, model, range, grid);
            out << "cowu," << n_push << ',' << n_pull << ','
                << fmt(res.lambda_max) << '\n';
        }
        for (int n_pull : n_pull_values) {
            const auto cfg = fig_config(n_pull, n_push, 50, 0.0);
            out << "rr," << n_push << ',' << n_pull << ','
                << fmt(cowu::rr_lambda_max(cfg, grid)) << '\n';
        }
    }

    auto manifest = open_out(dir / "fig4_manifest.txt");
    manifest << "figure fig4\nL 50\nquery [0.94,0.98]\ngamma_th 0.8\n"
             << "n_push {15,25,35}\nn_pull {5,15,25,35,45}\n"
             << "alpha grid {0,0.05,...,1}\nlambda grid {0.005,...,0.05}\n";

    auto plot = open_out(dir / "fig4.gp");
    plot << "set datafile separator ','\nset xlabel 'N_w'\n"
         << "set ylabel 'lambda_max [packet/slot]'\n"
         << "set terminal pngcairo size 600,400\nset output 'fig4.png'\n"
         << "plot for [nu in '15 25 35'] 'fig4_lambda_max.csv' "
            "using 3:(strcol(1) eq 'cowu' && $2==nu?$4:1/0) with linespoints "
            "title 'CoWu N_u='.nu, "
            "for [nu in '15 25 35'] '' using 3:(strcol(1) eq 'rr' && "
            "$2==nu?$4:1/0) with linespoints title 'RR N_u='.nu\n";
    return 0;
}

int reproduce_fig5(const std::filesystem::path& dir) {
    const auto grid = cowu::GridSpec::defaults(0.8);
    const std::vector<cowu::QueryRange> ranges{
        {0.94, 0.98}, {0.93, 0.99}, {0.92, 1.0}};
    const std::vector<double> lambdas{0.005, 0.01, 0.015, 0.02, 0.025};

    auto out = open_out(dir / "fig5_alpha_opt.csv");
    out << "# cowu " << cowu::kVersion << " reproduce fig5\n"
        << "# N_w=25 N_u=25 L=50 gamma_th=0.8\n"
        << "query_lower,query_upper,lambda,alpha_opt,e_tot_joules,eta,feasible\n";
    for (const auto& range : ranges) {
        for (double lambda : lambdas) {
            const auto cfg = fig_config(25, 25, 50, 0.0);
            const auto model = cowu::ObservationModel::uniform(cfg);
            const auto opt =
                cowu::alpha_opt(cfg, model, range, lambda, grid);
            out << fmt(range.lower) << ',' << fmt(range.upper) << ','
                << fmt(lambda) << ',';
            if (opt.feasible) {
                const double rr = cowu::rr_pull_energy(cfg.n_pull, cfg);
                out << fmt(opt.alpha) << ',' << fmt(opt.e_tot) << ','
                    << fmt(opt.e_tot / rr) << ",1\n";
            } else {
                out << ",,,0\n";
            }
        }
    }

    auto manifest = open_out(dir / "fig5_manifest.txt");
    manifest << "figure fig5\nn_pull 25\nn_push 25\nL 50\ngamma_th 0.8\n"
             << "query {[0.94,0.98],[0.93,0.99],[0.92,1.0]}\n"
             << "lambda {0.005,...,0.025}\nalpha grid {0,0.05,...,1}\n";

    auto plot = open_out(dir / "fig5.gp");
    plot << "set datafile separator ','\nset xlabel 'lambda [packet/slot]'\n"
         << "set terminal pngcairo size 900,400\nset output 'fig5.png'\n"
         << "set multiplot layout 1,2\nset ylabel 'alpha_opt'\n"
         << "plot for [lo in '0.94 0.93 0.92'] 'fig5_alpha_opt.csv' "
            "using 3:($1==lo && $7==1?$4:1/0) with linespoints "
            "title 'V_L='.lo\n"
         << "set ylabel 'eta'\n"
         << "plot for [lo in '0.94 0.93 0.92'] 'fig5_alpha_opt.csv' "
            "using 3:($1==lo && $7==1?$6:1/0) with linespoints "
            "title 'V_L='.lo, 1 with lines dashtype 2 title 'RR'\n"
         << "unset multiplot\n";
    return 0;
}

int cmd_reproduce(const std::string& figure, const std::string& out_dir,
                  long frames, uint64_t seed, int threads) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    if (figure == "fig3") return reproduce_fig3(dir, frames, seed, threads);
    if (figure == "fig4") return reproduce_fig4(dir);
    if (figure == "fig5") return reproduce_fig5(dir);
    std::cerr << "unknown figure id: " << figure << " (expected fig3|fig4|fig5)\n";
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pull/push coexistence MAC model: analysis, simulation and "
                 "constrained sweeps"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::vector<double> alphas;
    std::vector<double> lambdas;
    long frames = 50000;
    uint64_t seed = 1;
    int threads = 1;
    double gamma_th = 0.8;
    double lambda_value = -1.0;
    bool round_robin = false;
    std::string figure;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario file (key = value)")
            ->required();
        cmd->add_option("--out", out_path, "output path (default stdout)");
    };

    auto* analyze = app.add_subcommand("analyze", "closed-form metrics per alpha");
    add_config(analyze);
    analyze->add_option("--alpha", alphas, "alpha values (default: config)")
        ->delimiter(',');

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates per alpha");
    add_config(simulate);
    simulate->add_option("--alpha", alphas, "alpha values (default: config)")
        ->delimiter(',');
    simulate->add_option("--frames", frames, "frames per campaign")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber);

    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate the (alpha, lambda) grid");
    add_config(sweep_cmd);
    sweep_cmd->add_option("--gamma-th", gamma_th, "feasibility threshold");
    sweep_cmd->add_option("--alpha", alphas, "alpha grid override")->delimiter(',');
    sweep_cmd->add_option("--lambda", lambdas, "lambda grid override")->delimiter(',');

    auto* lmax = app.add_subcommand("lambda-max", "maximum acceptable push traffic");
    add_config(lmax);
    lmax->add_option("--gamma-th", gamma_th, "feasibility threshold");
    lmax->add_option("--alpha", alphas, "alpha grid override")->delimiter(',');
    lmax->add_option("--lambda", lambdas, "lambda grid override")->delimiter(',');
    lmax->add_flag("--rr", round_robin, "Round-Robin baseline instead of CoWu");

    auto* aopt = app.add_subcommand("alpha-opt", "energy-minimizing frame split");
    add_config(aopt);
    aopt->add_option("--gamma-th", gamma_th, "feasibility threshold");
    aopt->add_option("--lambda", lambda_value,
                     "arrival rate (default: config arrival_rate)");
    aopt->add_option("--alpha", alphas, "alpha grid override")->delimiter(',');

    auto* repro = app.add_subcommand("reproduce", "emit reference figure datasets");
    repro->add_option("--figure", figure, "fig3|fig4|fig5")->required();
    repro->add_option("--out", out_path, "output directory")->required();
    repro->add_option("--frames", frames, "frames per simulated point")
        ->check(CLI::PositiveNumber);
    repro->add_option("--seed", seed, "master seed");
    repro->add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (repro->parsed())
            return cmd_reproduce(figure, out_path, frames, seed, threads);

        const auto scenario = cowu::load_scenario(config_path);
        if (analyze->parsed())
            return cmd_analyze(scenario, alphas_or_default(alphas, scenario),
                               out_path);
        if (simulate->parsed())
            return cmd_simulate(scenario, alphas_or_default(alphas, scenario),
                                frames, seed, threads, out_path);
        if (sweep_cmd->parsed())
            return cmd_sweep(scenario, make_grid(gamma_th, alphas, lambdas),
                             out_path);
        if (lmax->parsed())
            return cmd_lambda_max(scenario, make_grid(gamma_th, alphas, lambdas),
                                  round_robin, out_path);
        if (aopt->parsed()) {
            const double lambda = lambda_value >= 0.0
                                      ? lambda_value
                                      : scenario.config.arrival_rate;
            return cmd_alpha_opt(scenario, lambda,
                                 make_grid(gamma_th, alphas, {}), out_path);
        }
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
