#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nusrec/common.hpp"
#include "nusrec/experiments.hpp"
#include "nusrec/operators.hpp"
#include "nusrec/selftest.hpp"

namespace fs = std::filesystem;
using namespace nusrec;

namespace {

std::ofstream open_out(const std::string& path) {
    if (fs::path(path).has_parent_path())
        fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

int cmd_encode(const std::string& config, const std::string& out_path) {
    toml::Document doc = toml::parse_file(config);
    if (auto mc = multichannel_from_toml(doc)) {
        MultiChannelTrial trial = make_multichannel_trial(*mc);
        std::ofstream out = open_out(out_path);
        write_multichannel_csv(trial.samples, out);
        std::cout << "wrote " << trial.samples.total() << " samples over "
                  << trial.samples.channels.size() << " channels to " << out_path
                  << '\n';
        return 0;
    }
    ScenarioConfig cfg = scenario_from_toml(doc);
    TrialData trial = make_trial(cfg, 0);
    std::ofstream out = open_out(out_path);
    write_samples_csv(trial, out);
    std::cout << "wrote " << trial.samples.values.size() << " samples to "
              << out_path << '\n';
    return 0;
}

int cmd_reconstruct(const std::string& config, const std::string& algo,
                    const std::string& out_path) {
    toml::Document doc = toml::parse_file(config);
    if (auto mc = multichannel_from_toml(doc)) {
        if (!algo.empty() && algo != "pocs_discrete")
            throw std::runtime_error(
                "multichannel reconstruction runs the discrete iteration; "
                "--algo must be omitted or 'pocs_discrete'");
        MultiChannelTrial trial = make_multichannel_trial(*mc);
        ChannelMatrix cm(mc->a);
        MultiChannelResult res = reconstruct_multichannel(
            trial.samples, cm, {}, RelaxationSchedule::constant(1.0), mc->iters,
            &trial.sources);
        std::ofstream out = open_out(out_path);
        res.history.write_csv(out);
        std::cout << "final relative error " << res.history.rows.back().err_l2_rel
                  << ", sample residual " << res.sample_residual << '\n';
        bool converged = res.sample_residual < 1e-6;
        std::cout << (converged ? "converged\n" : "flagged: not converged\n");
        return 0;
    }
    ScenarioConfig cfg = scenario_from_toml(doc);
    AlgorithmSpec spec;
    if (!algo.empty()) {
        spec.name = algo;
        for (const AlgorithmSpec& a : cfg.algorithms)
            if (a.name == algo) spec = a;
    } else if (!cfg.algorithms.empty()) {
        spec = cfg.algorithms.front();
    } else {
        throw std::runtime_error("no algorithm: pass --algo or configure one");
    }
    TrialData trial = make_trial(cfg, 0);
    ReconResult res = run_algorithm(
        spec, cfg, trial,
        detail::split_seed(detail::split_seed(cfg.seed, 0), 3));
    std::ofstream out = open_out(out_path);
    res.history.write_csv(out);
    std::cout << spec.name << ": final relative error "
              << res.history.rows.back().err_l2_rel << " after "
              << res.iterations << " iterations\n";
    if (!res.relaxation_in_range)
        std::cout << "flagged: relaxation outside the convergent range\n";
    return 0;
}

int cmd_experiment(const std::string& scenario, bool full,
                   const std::string& out_dir) {
    fs::create_directories(out_dir);
    if (scenario == "fig3") {
        Fig3Config cfg;
        if (full) cfg.period = 315.0;
        Fig3Result r = run_fig3(cfg);
        {
            std::ofstream out = open_out(out_dir + "/fig3_waveforms.csv");
            write_fig3_csv(r, out);
        }
        {
            std::ofstream out = open_out(out_dir + "/fig3_zero_history.csv");
            r.from_zero.vs_limit.write_csv(out);
        }
        {
            std::ofstream out = open_out(out_dir + "/fig3_staircase_history.csv");
            r.from_staircase.vs_limit.write_csv(out);
        }
        emit_fig3_plot(r, out_dir + "/fig3.svg");
        std::cout << "crossing ratio " << r.ratio << " (spacing " << r.spacing
                  << "), lower spectral bound " << r.gamma_sq << '\n'
                  << "final error vs input: zero start "
                  << r.from_zero.final_err_vs_input << ", staircase start "
                  << r.from_staircase.final_err_vs_input << '\n';
        double shrink0 = r.from_zero.vs_limit.rows.front().err_l2_rel;
        double shrink1 = r.from_zero.vs_limit.rows.back().err_l2_rel;
        bool approached = shrink1 < shrink0;
        std::cout << (approached ? "converged toward the limit\n"
                                 : "flagged: did not approach the limit\n");
        return 0;
    }
    ScenarioConfig cfg;
    if (scenario.rfind("custom:", 0) == 0) {
        cfg = scenario_from_toml(toml::parse_file(scenario.substr(7)));
        if (full) {
            cfg.period = 315.0;
            cfg.trials = 100;
        }
    } else {
        cfg = builtin_scenario(scenario, full);
    }
    ScenarioTable table = run_scenario(cfg);
    std::string csv_path = out_dir + "/" + cfg.id + ".csv";
    {
        std::ofstream out = open_out(csv_path);
        table.write_csv(out);
    }
    emit_plot(table, out_dir + "/" + cfg.id + ".svg");
    for (const AlgorithmSpec& alg : cfg.algorithms) {
        double last = 0.0;
        for (const auto& row : table.rows)
            if (row.algorithm == alg.name && row.iter == cfg.iters)
                last = row.mse_l2;
        std::cout << alg.name << ": final MSE "
                  << 10.0 * std::log10(std::max(last, 1e-300)) << " dB\n";
    }
    std::cout << "wrote " << csv_path << '\n';
    return 0;
}

int cmd_gram_table(const std::string& config, const std::string& out_path) {
    toml::Document doc = toml::parse_file(config);
    if (auto mc = multichannel_from_toml(doc)) {
        MultiChannelTrial trial = make_multichannel_trial(*mc);
        ChannelMatrix cm(mc->a);
        GramMatrix g = multichannel_gram(trial.samples, cm);
        std::ofstream out = open_out(out_path);
        out << "z,zp,h\n";
        for (Eigen::Index r = 0; r < g.h.rows(); ++r)
            for (Eigen::Index c = 0; c < g.h.cols(); ++c) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", g.h(r, c));
                out << r << ',' << c << ',' << buf << '\n';
            }
        std::cout << "wrote " << g.h.rows() << "x" << g.h.cols()
                  << " multichannel gram to " << out_path << '\n';
        return 0;
    }
    ScenarioConfig cfg = scenario_from_toml(doc);
    TrialData trial = make_trial(cfg, 0);
    GramMatrix g = SamplingOperator(trial.family).gram();
    std::ofstream out = open_out(out_path);
    out << "k,kp,h,w_kp\n";
    for (Eigen::Index r = 0; r < g.h.rows(); ++r)
        for (Eigen::Index c = 0; c < g.h.cols(); ++c) {
            char hb[40], wb[40];
            std::snprintf(hb, sizeof hb, "%.17g", g.h(r, c));
            std::snprintf(wb, sizeof wb, "%.17g",
                          g.w[static_cast<std::size_t>(c)]);
            out << r << ',' << c << ',' << hb << ',' << wb << '\n';
        }
    std::cout << "wrote " << g.h.rows() << "x" << g.h.cols() << " gram to "
              << out_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonuniform generalized-sampling reconstruction toolkit"};
    app.require_subcommand(1);

    std::string config, out_path, algo, scenario, out_dir;
    bool full = false;

    CLI::App* encode = app.add_subcommand("encode", "sample a signal per config");
    encode->add_option("--config", config, "TOML config")->required();
    encode->add_option("--out", out_path, "samples CSV path")
        ->default_val("samples.csv");

    CLI::App* rec = app.add_subcommand("reconstruct",
                                       "reconstruct one configured trial");
    rec->add_option("--config", config, "TOML config")->required();
    rec->add_option("--algo", algo, "algorithm name (default: first configured)");
    rec->add_option("--out", out_path, "iteration history CSV path")
        ->default_val("history.csv");

    CLI::App* exp = app.add_subcommand("experiment", "run a full scenario");
    exp->add_option("--scenario", scenario,
                    "fig2a|fig2b|fig2c|fig3|custom:<file>")
        ->required();
    exp->add_flag("--full", full, "paper scale: period 315, 100 trials");
    exp->add_option("--out-dir", out_dir, "output directory")->default_val(".");

    CLI::App* gram = app.add_subcommand("gram-table",
                                        "write the sampling gram matrix");
    gram->add_option("--config", config, "TOML config")->required();
    gram->add_option("--out", out_path, "gram CSV path")->required();

    app.add_subcommand("selftest", "run the built-in property checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("encode")) return cmd_encode(config, out_path);
        if (app.got_subcommand("reconstruct"))
            return cmd_reconstruct(config, algo, out_path);
        if (app.got_subcommand("experiment"))
            return cmd_experiment(scenario, full, out_dir);
        if (app.got_subcommand("gram-table"))
            return cmd_gram_table(config, out_path);
        if (app.got_subcommand("selftest")) return run_selftest(std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
