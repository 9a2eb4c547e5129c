#include "nusrec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "nusrec/common.hpp"
#include "nusrec/multichannel.hpp"
#include "nusrec/operators.hpp"

namespace nusrec {

using detail::split_seed;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names{
        "frame",     "kaczmarz_cyclic",   "kaczmarz_random",
        "grochenig", "grochenig_relaxed", "pocs",
        "pocs_discrete"};
    return names;
}

bool point_algorithm(const std::string& name) {
    return name == "frame" || name == "kaczmarz_cyclic" ||
           name == "kaczmarz_random" || name == "grochenig" ||
           name == "grochenig_relaxed";
}

} // namespace

ScenarioConfig scenario_from_toml(const toml::Document& doc) {
    if (!doc.root.entries.empty())
        throw toml::ParseError("line " +
                               std::to_string(doc.root.entries.begin()->second.line) +
                               ": top-level keys are not allowed; use tables");
    for (const auto& [name, table] : doc.tables)
        if (name != "scenario" && name != "instants" && name != "encoder" &&
            name != "noise" && name != "multichannel")
            throw toml::ParseError("line " + std::to_string(table.line) +
                                   ": unknown table [" + name + "]");
    for (const auto& [name, tables] : doc.arrays)
        if (name != "algorithm" && name != "channel")
            throw toml::ParseError("unknown table array [[" + name + "]]");

    const toml::Table* sc = doc.find("scenario");
    if (sc == nullptr) throw toml::ParseError("config needs a [scenario] table");
    sc->allow_only({"id", "period", "trials", "rms", "seed", "iters", "sources"},
                   "[scenario]");
    ScenarioConfig cfg;
    cfg.id = sc->at("id").as_string();
    if (sc->has("period")) cfg.period = sc->at("period").as_number();
    if (sc->has("trials")) {
        std::int64_t t = sc->at("trials").as_integer();
        if (t < 1) throw toml::ParseError("trials must be >= 1");
        cfg.trials = static_cast<std::size_t>(t);
    }
    if (sc->has("rms")) cfg.rms = sc->at("rms").as_number();
    if (sc->has("seed")) {
        std::int64_t s = sc->at("seed").as_integer();
        if (s < 0) throw toml::ParseError("seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (sc->has("iters")) {
        std::int64_t n = sc->at("iters").as_integer();
        if (n < 1) throw toml::ParseError("iters must be >= 1");
        cfg.iters = static_cast<std::size_t>(n);
    }
    if (cfg.period <= 2.0) throw toml::ParseError("period must exceed 2");
    if (cfg.rms <= 0.0) throw toml::ParseError("rms must be positive");

    if (const toml::Table* inst = doc.find("instants")) {
        const std::string& kind = inst->at("kind").as_string();
        if (kind == "uniform_gap") {
            inst->allow_only({"kind", "gap_min", "gap_max"}, "[instants] uniform_gap");
            cfg.instants.kind = InstantSpec::Kind::UniformGap;
            cfg.instants.uniform.gap_min = inst->at("gap_min").as_number();
            cfg.instants.uniform.gap_max = inst->at("gap_max").as_number();
        } else if (kind == "cluster") {
            inst->allow_only({"kind", "intra_gap", "per_cluster", "oversampling"},
                             "[instants] cluster");
            cfg.instants.kind = InstantSpec::Kind::Cluster;
            cfg.instants.cluster.intra_gap = inst->at("intra_gap").as_number();
            std::int64_t pc = inst->at("per_cluster").as_integer();
            if (pc < 1) throw toml::ParseError("per_cluster must be >= 1");
            cfg.instants.cluster.per_cluster = static_cast<std::size_t>(pc);
            cfg.instants.cluster.oversampling = inst->at("oversampling").as_number();
        } else if (kind == "explicit") {
            inst->allow_only({"kind", "times"}, "[instants] explicit");
            cfg.instants.kind = InstantSpec::Kind::Explicit;
            cfg.instants.fixed = inst->at("times").as_number_array();
        } else {
            throw toml::ParseError(
                "line " + std::to_string(inst->at("kind").line) +
                ": instants kind must be uniform_gap, cluster or explicit");
        }
    }

    const toml::Table* enc = doc.find("encoder");
    if (enc == nullptr) throw toml::ParseError("config needs an [encoder] table");
    const std::string& ek = enc->at("kind").as_string();
    if (ek == "point") {
        enc->allow_only({"kind"}, "[encoder] point");
        cfg.encoder.kind = EncoderSpec::Kind::Point;
    } else if (ek == "integral") {
        enc->allow_only({"kind"}, "[encoder] integral");
        cfg.encoder.kind = EncoderSpec::Kind::Integral;
    } else if (ek == "leaky") {
        enc->allow_only({"kind", "leak"}, "[encoder] leaky");
        cfg.encoder.kind = EncoderSpec::Kind::Leaky;
        cfg.encoder.leak = enc->at("leak").as_number();
    } else if (ek == "fire") {
        enc->allow_only({"kind", "bias", "threshold"}, "[encoder] fire");
        cfg.encoder.kind = EncoderSpec::Kind::Fire;
        cfg.encoder.bias = enc->at("bias").as_number();
        cfg.encoder.threshold = enc->at("threshold").as_number();
    } else if (ek == "crossing") {
        enc->allow_only({"kind", "spacing", "offset"}, "[encoder] crossing");
        cfg.encoder.kind = EncoderSpec::Kind::Crossing;
        cfg.encoder.spacing = enc->at("spacing").as_number();
        if (enc->has("offset")) cfg.encoder.offset = enc->at("offset").as_number();
    } else {
        throw toml::ParseError(
            "line " + std::to_string(enc->at("kind").line) +
            ": encoder kind must be point, integral, leaky, fire or crossing");
    }
    bool needs_instants = ek == "point" || ek == "integral" || ek == "leaky";
    if (needs_instants && doc.find("instants") == nullptr)
        throw toml::ParseError("encoder kind '" + ek +
                               "' needs an [instants] table");

    if (const toml::Table* noise = doc.find("noise")) {
        noise->allow_only({"snr_db"}, "[noise]");
        cfg.snr_db = noise->at("snr_db").as_number();
    }

    if (const auto* algos = doc.find_array("algorithm")) {
        for (const toml::Table& at : *algos) {
            at.allow_only({"name", "relaxation"}, "[[algorithm]]");
            AlgorithmSpec spec;
            spec.name = at.at("name").as_string();
            const auto& known = algorithm_names();
            if (std::find(known.begin(), known.end(), spec.name) == known.end())
                throw toml::ParseError("line " + std::to_string(at.at("name").line) +
                                       ": unknown algorithm '" + spec.name + "'");
            if (at.has("relaxation"))
                spec.relaxation = at.at("relaxation").as_number_array();
            if (spec.name == "grochenig_relaxed" && spec.relaxation.empty())
                throw toml::ParseError("grochenig_relaxed needs a relaxation value");
            if (point_algorithm(spec.name) &&
                !(cfg.encoder.kind == EncoderSpec::Kind::Point ||
                  cfg.encoder.kind == EncoderSpec::Kind::Crossing))
                throw toml::ParseError("algorithm '" + spec.name +
                                       "' needs point samples (encoder kind "
                                       "point or crossing)");
            cfg.algorithms.push_back(std::move(spec));
        }
    }
    return cfg;
}

ScenarioConfig builtin_scenario(const std::string& name, bool full) {
    ScenarioConfig cfg;
    cfg.period = full ? 315.0 : 63.0;
    cfg.trials = full ? 100 : 20;
    cfg.iters = 40;
    auto point_algos = [](double relaxed) {
        return std::vector<AlgorithmSpec>{{"frame", {}},
                                          {"kaczmarz_cyclic", {}},
                                          {"kaczmarz_random", {}},
                                          {"grochenig", {}},
                                          {"grochenig_relaxed", {relaxed}}};
    };
    if (name == "fig2a") {
        cfg.id = "fig2a";
        cfg.seed = 101;
        cfg.instants.kind = InstantSpec::Kind::UniformGap;
        cfg.instants.uniform = {0.3, 1.0};
        cfg.encoder.kind = EncoderSpec::Kind::Point;
        cfg.algorithms = point_algos(1.3);
    } else if (name == "fig2b") {
        cfg.id = "fig2b";
        cfg.seed = 202;
        cfg.instants.kind = InstantSpec::Kind::Cluster;
        cfg.instants.cluster = {0.3, 3, 2.0};
        cfg.encoder.kind = EncoderSpec::Kind::Point;
        cfg.algorithms = point_algos(1.45);
    } else if (name == "fig2c") {
        cfg.id = "fig2c";
        cfg.seed = 303;
        cfg.instants.kind = InstantSpec::Kind::UniformGap;
        cfg.instants.uniform = {0.0, 0.5};
        cfg.encoder.kind = EncoderSpec::Kind::Point;
        cfg.snr_db = 45.0;
        cfg.algorithms = point_algos(1.05);
    } else {
        detail::fail("unknown builtin scenario '" + name +
                     "' (expected fig2a, fig2b or fig2c)");
    }
    return cfg;
}

TrialData make_trial(const ScenarioConfig& cfg, std::size_t trial_index) {
    std::uint64_t ts = split_seed(cfg.seed, trial_index);
    TrialData out;
    out.input = random_bandlimited(cfg.period, cfg.rms, split_seed(ts, 0));

    std::vector<double> instants;
    switch (cfg.instants.kind) {
        case InstantSpec::Kind::UniformGap:
            instants = generate_instants(cfg.instants.uniform, cfg.period,
                                         split_seed(ts, 1));
            break;
        case InstantSpec::Kind::Cluster:
            instants = generate_instants(cfg.instants.cluster, cfg.period,
                                         split_seed(ts, 1));
            break;
        case InstantSpec::Kind::Explicit:
            instants = cfg.instants.fixed;
            break;
    }

    switch (cfg.encoder.kind) {
        case EncoderSpec::Kind::Point:
            out.family = KernelFamily::make(KernelKind::Sinc, cfg.period, instants);
            out.samples.values = eval(out.input, instants);
            out.samples.weights = kernel_weights(out.family);
            break;
        case EncoderSpec::Kind::Integral:
            out.family =
                KernelFamily::make(KernelKind::Indicator, cfg.period, instants);
            out.samples = integral_samples(out.input, out.family);
            break;
        case EncoderSpec::Kind::Leaky:
            out.family = KernelFamily::make(KernelKind::LeakyExp, cfg.period,
                                            instants, cfg.encoder.leak);
            out.samples = integral_samples(out.input, out.family);
            break;
        case EncoderSpec::Kind::Fire: {
            FireResult fr =
                fire_instants(out.input, cfg.encoder.bias, cfg.encoder.threshold);
            out.family =
                KernelFamily::make(KernelKind::Indicator, cfg.period, fr.instants);
            out.samples = std::move(fr.samples);
            break;
        }
        case EncoderSpec::Kind::Crossing: {
            CrossingSet cs = level_crossings(out.input, cfg.encoder.spacing,
                                             cfg.encoder.offset);
            detail::require(cs.times.size() >= 2,
                            "crossing encoder found fewer than 2 crossings");
            out.family = KernelFamily::make(KernelKind::Sinc, cfg.period, cs.times);
            out.samples.values = std::move(cs.values);
            out.samples.weights = kernel_weights(out.family);
            break;
        }
    }
    if (cfg.snr_db)
        out.samples = add_noise(out.samples, *cfg.snr_db, cfg.rms * cfg.rms,
                                split_seed(ts, 2));
    return out;
}

void write_samples_csv(const TrialData& trial, std::ostream& os) {
    os << "k,t_prev,t_k,s_k,w_k\n";
    for (std::size_t k = 0; k < trial.family.size(); ++k) {
        auto [a, b] = trial.family.interval(k);
        os << k << ',' << num(a) << ',' << num(b) << ','
           << num(trial.samples.values[k]) << ',' << num(trial.samples.weights[k])
           << '\n';
    }
}

ReconResult run_algorithm(const AlgorithmSpec& alg, const ScenarioConfig& cfg,
                          const TrialData& trial, std::uint64_t seed) {
    Signal u0 = zero_signal(cfg.period);
    const Signal* truth = &trial.input;
    if (alg.name == "frame") {
        SamplingOperator op(trial.family);
        std::optional<double> lam;
        if (!alg.relaxation.empty()) lam = alg.relaxation.front();
        return frame_algorithm_run(op, trial.samples, u0, lam, cfg.iters, truth);
    }
    if (alg.name == "kaczmarz_cyclic" || alg.name == "kaczmarz_random") {
        SweepOrder order = alg.name == "kaczmarz_cyclic"
                               ? SweepOrder::Cyclic
                               : SweepOrder::RandomPermutation;
        return kaczmarz_run(trial.family, trial.samples.values, u0, order,
                            cfg.iters, seed, truth);
    }
    if (alg.name == "grochenig" || alg.name == "grochenig_relaxed") {
        detail::require(trial.family.kind == KernelKind::Sinc,
                        "adaptive-weights iteration needs point samples");
        RelaxationSchedule sched =
            alg.relaxation.empty() ? RelaxationSchedule::constant(1.0)
                                   : RelaxationSchedule::sequence(alg.relaxation);
        return grochenig_run(trial.family.instants, trial.samples.values,
                             cfg.period, u0, sched, cfg.iters, truth);
    }
    if (alg.name == "pocs" || alg.name == "pocs_discrete") {
        SamplingOperator op(trial.family);
        RelaxationSchedule sched =
            alg.relaxation.empty() ? RelaxationSchedule::constant(1.0)
                                   : RelaxationSchedule::sequence(alg.relaxation);
        if (alg.name == "pocs") {
            StopRule stop{cfg.iters, 0.0};
            return pocs_run(op, trial.samples, u0, sched, stop, truth);
        }
        return pocs_discrete_run(op, trial.samples, u0, sched, cfg.iters, truth);
    }
    detail::fail("unknown algorithm '" + alg.name + "'");
}

void ScenarioTable::write_csv(std::ostream& os) const {
    os << "scenario,algorithm,iter,mse_l2,mse_sobolev,trials\n";
    for (const Row& r : rows)
        os << scenario << ',' << r.algorithm << ',' << r.iter << ','
           << num(r.mse_l2) << ',' << num(r.mse_sobolev) << ',' << trials << '\n';
}

ScenarioTable run_scenario(const ScenarioConfig& cfg) {
    detail::require(!cfg.algorithms.empty(), "scenario has no algorithms");
    detail::require(cfg.trials >= 1, "scenario needs at least one trial");
    std::size_t na = cfg.algorithms.size();

    // per-trial slot: [algorithm][iter] -> (squared l2, squared sobolev)
    using TrialErrs = std::vector<std::vector<std::pair<double, double>>>;
    std::vector<TrialErrs> slots(cfg.trials);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        while (true) {
            std::size_t t = next.fetch_add(1);
            if (t >= cfg.trials) return;
            try {
                TrialData trial = make_trial(cfg, t);
                std::uint64_t ts = split_seed(cfg.seed, t);
                TrialErrs errs(na);
                for (std::size_t a = 0; a < na; ++a) {
                    ReconResult r = run_algorithm(cfg.algorithms[a], cfg, trial,
                                                  split_seed(ts, 3 + a));
                    detail::require(r.history.rows.size() == cfg.iters + 1,
                                    "algorithm history length mismatch");
                    errs[a].reserve(r.history.rows.size());
                    for (const IterationRecord& row : r.history.rows)
                        errs[a].emplace_back(row.err_l2_rel * row.err_l2_rel,
                                             row.err_sobolev_rel * row.err_sobolev_rel);
                }
                slots[t] = std::move(errs);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    std::size_t nthreads = std::min({static_cast<std::size_t>(hw ? hw : 1),
                                     cfg.trials, static_cast<std::size_t>(8)});
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ScenarioTable table;
    table.scenario = cfg.id;
    table.trials = cfg.trials;
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t it = 0; it <= cfg.iters; ++it) {
            double l2 = 0.0, so = 0.0;
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                l2 += slots[t][a][it].first;
                so += slots[t][a][it].second;
            }
            table.rows.push_back({cfg.algorithms[a].name, it,
                                  l2 / static_cast<double>(cfg.trials),
                                  so / static_cast<double>(cfg.trials)});
        }
    return table;
}

namespace {

Fig3Run fig3_run_from(const SamplingOperator& op, const SampleSequence& s,
                      const Signal& u0, double lambda, const Fig3Config& cfg,
                      const Signal& input) {
    Fig3Run run;
    run.limit = op.pocs_limit(s, u0);
    double lim_l2 = norm_l2(run.limit);
    double lim_so = sobolev_seminorm(run.limit);
    Signal u = u0;
    auto record = [&](std::size_t iter, double step) {
        Signal d = subtract(u, run.limit);
        IterationRecord rec;
        rec.iter = iter;
        rec.err_l2_rel = lim_l2 > 0.0 ? norm_l2(d) / lim_l2 : norm_l2(d);
        rec.err_sobolev_rel =
            lim_so > 0.0 ? sobolev_seminorm(d) / lim_so : sobolev_seminorm(d);
        rec.step_norm = step;
        run.vs_limit.rows.push_back(rec);
    };
    record(0, 0.0);
    for (std::size_t iter = 1; iter <= cfg.iters; ++iter) {
        Signal nextu = pocs_step(op, s, u, lambda);
        double step = norm_l2(subtract(nextu, u));
        u = std::move(nextu);
        record(iter, step);
        if (std::find(cfg.snapshot_iters.begin(), cfg.snapshot_iters.end(), iter) !=
            cfg.snapshot_iters.end())
            run.snapshots.push_back(u);
    }
    Signal err = subtract(u, input);
    run.final_err_vs_input = norm_l2(err) / norm_l2(input);
    return run;
}

} // namespace

Fig3Result run_fig3(const Fig3Config& cfg) {
    detail::require(cfg.iters >= 1, "fig3 needs at least one iteration");
    Fig3Result r;
    r.cfg = cfg;
    r.input = random_bandlimited(cfg.period, cfg.rms, cfg.seed);
    double dim = static_cast<double>(2 * max_harmonic(cfg.period) + 1);

    double lo = 0.05 * cfg.rms, hi = 3.0 * cfg.rms;
    bool found = false;
    for (int step = 0; step < 60 && !found; ++step) {
        double mid = 0.5 * (lo + hi);
        CrossingSet cs = level_crossings(r.input, mid, 0.0);
        double ratio = static_cast<double>(cs.times.size()) / dim;
        if (ratio > cfg.ratio_hi) {
            lo = mid; // too many crossings: widen the levels
        } else if (ratio < cfg.ratio_lo) {
            hi = mid;
        } else {
            r.spacing = mid;
            r.ratio = ratio;
            r.crossings = std::move(cs);
            found = true;
        }
    }
    detail::require(found, "level spacing bisection did not reach the target "
                           "crossing ratio; try another seed");

    KernelFamily fam =
        KernelFamily::make(KernelKind::Sinc, cfg.period, r.crossings.times);
    SamplingOperator op(fam);
    SampleSequence s{r.crossings.values, kernel_weights(fam)};
    auto sb = op.spectral_bounds();
    r.gamma_sq = sb.lower;
    r.relaxation = 1.0 / sb.upper; // safe for the sub-Nyquist upper bound
    r.limit = op.pocs_limit(s, zero_signal(cfg.period));

    Signal stair = staircase_initializer(r.crossings.times, r.crossings.values,
                                         cfg.period);
    r.from_zero = fig3_run_from(op, s, zero_signal(cfg.period), r.relaxation, cfg,
                                r.input);
    r.from_staircase = fig3_run_from(op, s, stair, r.relaxation, cfg, r.input);
    return r;
}

void write_fig3_csv(const Fig3Result& r, std::ostream& os) {
    const std::size_t grid_n = 512;
    os << "t,input,limit_zero,limit_stair";
    for (std::size_t n : r.cfg.snapshot_iters) os << ",zero_n" << n;
    for (std::size_t n : r.cfg.snapshot_iters) os << ",stair_n" << n;
    os << '\n';
    for (std::size_t j = 0; j < grid_n; ++j) {
        double t = r.cfg.period * static_cast<double>(j) / grid_n;
        os << num(t) << ',' << num(eval(r.input, t)) << ','
           << num(eval(r.from_zero.limit, t)) << ','
           << num(eval(r.from_staircase.limit, t));
        for (const Signal& snap : r.from_zero.snapshots)
            os << ',' << num(eval(snap, t));
        for (const Signal& snap : r.from_staircase.snapshots)
            os << ',' << num(eval(snap, t));
        os << '\n';
    }
}

namespace {

// deterministic fixed palette
const char* kPalette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Frame {
    double x0, x1, y0, y1;       // data range
    double px0, px1, py0, py1;   // pixel box (y grows down)
    double x(double v) const {
        return px0 + (v - x0) / (x1 - x0) * (px1 - px0);
    }
    double y(double v) const {
        return py1 - (v - y0) / (y1 - y0) * (py1 - py0);
    }
};

void svg_open(std::ostream& os, int w, int h) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
       << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
       << "\">\n<rect width=\"" << w << "\" height=\"" << h
       << "\" fill=\"white\"/>\n";
}

void svg_line(std::ostream& os, double x1, double y1, double x2, double y2,
              const char* color, double width) {
    os << "<line x1=\"" << num6(x1) << "\" y1=\"" << num6(y1) << "\" x2=\""
       << num6(x2) << "\" y2=\"" << num6(y2) << "\" stroke=\"" << color
       << "\" stroke-width=\"" << num6(width) << "\"/>\n";
}

void svg_text(std::ostream& os, double x, double y, const std::string& s,
              const char* anchor, int size) {
    os << "<text x=\"" << num6(x) << "\" y=\"" << num6(y) << "\" font-family=\""
       << "monospace\" font-size=\"" << size << "\" text-anchor=\"" << anchor
       << "\">" << s << "</text>\n";
}

void svg_polyline(std::ostream& os, const std::vector<std::pair<double, double>>& pts,
                  const char* color, double width, bool dashed = false) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
       << num6(width) << "\"";
    if (dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) os << ' ';
        os << num6(pts[i].first) << ',' << num6(pts[i].second);
    }
    os << "\"/>\n";
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write plot file: " + path);
    return out;
}

} // namespace

void emit_plot(const ScenarioTable& table, const std::string& path) {
    detail::require(!table.rows.empty(), "emit_plot: empty table");
    std::vector<std::string> algs;
    for (const auto& row : table.rows)
        if (std::find(algs.begin(), algs.end(), row.algorithm) == algs.end())
            algs.push_back(row.algorithm);

    const double floor_mse = 1e-16;
    double max_iter = 0.0, ymin = 0.0, ymax = -300.0;
    for (const auto& row : table.rows) {
        max_iter = std::max(max_iter, static_cast<double>(row.iter));
        double db = 10.0 * std::log10(std::max(row.mse_l2, floor_mse));
        ymin = std::min(ymin, db);
        ymax = std::max(ymax, db);
    }
    ymin = 10.0 * std::floor(ymin / 10.0);
    ymax = 10.0 * std::ceil(ymax / 10.0);
    if (ymax <= ymin) ymax = ymin + 10.0;

    const int w = 720, h = 480;
    Frame fr{0.0, std::max(max_iter, 1.0), ymin, ymax, 70.0, 700.0, 20.0, 430.0};
    std::ofstream os = open_output(path);
    svg_open(os, w, h);
    svg_line(os, fr.px0, fr.py1, fr.px1, fr.py1, "#000000", 1.0);
    svg_line(os, fr.px0, fr.py0, fr.px0, fr.py1, "#000000", 1.0);

    int xticks = 8;
    for (int i = 0; i <= xticks; ++i) {
        double v = fr.x1 * i / xticks;
        svg_line(os, fr.x(v), fr.py1, fr.x(v), fr.py1 + 5, "#000000", 1.0);
        svg_text(os, fr.x(v), fr.py1 + 18, num6(std::round(v)), "middle", 12);
    }
    svg_text(os, 0.5 * (fr.px0 + fr.px1), h - 14.0, "iteration", "middle", 13);
    double ystep = (fr.y1 - fr.y0) / 6.0;
    ystep = 10.0 * std::max(1.0, std::round(ystep / 10.0));
    for (double v = fr.y0; v <= fr.y1 + 1e-9; v += ystep) {
        svg_line(os, fr.px0 - 5, fr.y(v), fr.px0, fr.y(v), "#000000", 1.0);
        svg_line(os, fr.px0, fr.y(v), fr.px1, fr.y(v), "#dddddd", 0.5);
        svg_text(os, fr.px0 - 8, fr.y(v) + 4, num6(v), "end", 12);
    }
    svg_text(os, 16.0, 0.5 * (fr.py0 + fr.py1), "MSE (dB)", "middle", 13);

    for (std::size_t a = 0; a < algs.size(); ++a) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : table.rows)
            if (row.algorithm == algs[a]) {
                double db = 10.0 * std::log10(std::max(row.mse_l2, floor_mse));
                pts.emplace_back(fr.x(static_cast<double>(row.iter)), fr.y(db));
            }
        svg_polyline(os, pts, kPalette[a % 8], 1.5);
        double ly = fr.py0 + 16.0 + 16.0 * static_cast<double>(a);
        svg_line(os, fr.px1 - 150, ly - 4, fr.px1 - 125, ly - 4, kPalette[a % 8],
                 2.0);
        svg_text(os, fr.px1 - 120, ly, algs[a], "start", 12);
    }
    os << "</svg>\n";
}

void emit_fig3_plot(const Fig3Result& r, const std::string& path) {
    const std::size_t grid_n = 512;
    double ymin = 0.0, ymax = 0.0;
    auto series = [&](const Signal& s) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(grid_n + 1);
        for (std::size_t j = 0; j <= grid_n; ++j) {
            double t = r.cfg.period * static_cast<double>(j) / grid_n;
            double v = eval(s, t);
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
            pts.emplace_back(t, v);
        }
        return pts;
    };
    auto input_pts = series(r.input);
    auto limit_pts = series(r.from_zero.limit);
    auto stair_limit_pts = series(r.from_staircase.limit);
    std::vector<std::pair<double, double>> zero_final, stair_final;
    if (!r.from_zero.snapshots.empty())
        zero_final = series(r.from_zero.snapshots.back());
    if (!r.from_staircase.snapshots.empty())
        stair_final = series(r.from_staircase.snapshots.back());
    for (double v : r.crossings.values) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    double pad = 0.1 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const int w = 720, h = 480;
    Frame fr{0.0, r.cfg.period, ymin, ymax, 60.0, 700.0, 20.0, 440.0};
    auto to_px = [&](std::vector<std::pair<double, double>> pts) {
        for (auto& p : pts) p = {fr.x(p.first), fr.y(p.second)};
        return pts;
    };
    std::ofstream os = open_output(path);
    svg_open(os, w, h);
    svg_line(os, fr.px0, fr.py1, fr.px1, fr.py1, "#000000", 1.0);
    svg_line(os, fr.px0, fr.py0, fr.px0, fr.py1, "#000000", 1.0);
    svg_polyline(os, to_px(input_pts), "#000000", 1.8);
    svg_polyline(os, to_px(limit_pts), kPalette[0], 1.5);
    svg_polyline(os, to_px(stair_limit_pts), kPalette[1], 1.5);
    if (!zero_final.empty())
        svg_polyline(os, to_px(zero_final), kPalette[0], 1.2, true);
    if (!stair_final.empty())
        svg_polyline(os, to_px(stair_final), kPalette[1], 1.2, true);
    for (std::size_t k = 0; k < r.crossings.times.size(); ++k)
        os << "<circle cx=\"" << num6(fr.x(r.crossings.times[k])) << "\" cy=\""
           << num6(fr.y(r.crossings.values[k]))
           << "\" r=\"2.5\" fill=\"#444444\"/>\n";
    const char* labels[5] = {"input", "limit from zero start",
                             "limit from staircase start", "final iterate (zero)",
                             "final iterate (staircase)"};
    const char* colors[5] = {"#000000", kPalette[0], kPalette[1], kPalette[0],
                             kPalette[1]};
    for (int i = 0; i < 5; ++i) {
        double ly = fr.py0 + 16.0 + 16.0 * i;
        svg_line(os, fr.px1 - 250, ly - 4, fr.px1 - 225, ly - 4, colors[i], 2.0);
        svg_text(os, fr.px1 - 220, ly, labels[i], "start", 12);
    }
    os << "</svg>\n";
}

std::optional<MultiChannelConfig> multichannel_from_toml(const toml::Document& doc) {
    const toml::Table* mc = doc.find("multichannel");
    if (mc == nullptr) return std::nullopt;
    mc->allow_only({"a"}, "[multichannel]");

    MultiChannelConfig cfg;
    const toml::Table* sc = doc.find("scenario");
    if (sc == nullptr) throw toml::ParseError("config needs a [scenario] table");
    sc->allow_only({"id", "period", "rms", "seed", "iters"}, "[scenario]");
    cfg.id = sc->at("id").as_string();
    if (sc->has("period")) cfg.period = sc->at("period").as_number();
    if (sc->has("rms")) cfg.rms = sc->at("rms").as_number();
    if (sc->has("seed")) {
        std::int64_t s = sc->at("seed").as_integer();
        if (s < 0) throw toml::ParseError("seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (sc->has("iters")) {
        std::int64_t n = sc->at("iters").as_integer();
        if (n < 1) throw toml::ParseError("iters must be >= 1");
        cfg.iters = static_cast<std::size_t>(n);
    }

    std::vector<std::vector<double>> rows = mc->at("a").as_matrix();
    if (rows.empty() || rows.front().empty())
        throw toml::ParseError("multichannel matrix 'a' must be nonempty");
    for (const auto& r : rows)
        if (r.size() != rows.front().size())
            throw toml::ParseError("multichannel matrix rows differ in length");
    cfg.a.resize(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            cfg.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];

    const auto* chans = doc.find_array("channel");
    if (chans == nullptr || chans->size() != rows.size())
        throw toml::ParseError("need one [[channel]] per matrix row (" +
                               std::to_string(rows.size()) + ")");
    for (const toml::Table& ct : *chans) {
        MultiChannelConfig::Channel ch;
        const std::string& kind = ct.at("kind").as_string();
        if (kind == "integral") {
            ct.allow_only({"kind", "gap_min", "gap_max", "times"},
                          "[[channel]] integral");
            ch.encoder.kind = EncoderSpec::Kind::Integral;
            if (ct.has("times")) {
                ch.instants.kind = InstantSpec::Kind::Explicit;
                ch.instants.fixed = ct.at("times").as_number_array();
            } else {
                ch.instants.kind = InstantSpec::Kind::UniformGap;
                ch.instants.uniform.gap_min = ct.at("gap_min").as_number();
                ch.instants.uniform.gap_max = ct.at("gap_max").as_number();
            }
        } else if (kind == "fire") {
            ct.allow_only({"kind", "bias", "threshold"}, "[[channel]] fire");
            ch.encoder.kind = EncoderSpec::Kind::Fire;
            ch.encoder.bias = ct.at("bias").as_number();
            ch.encoder.threshold = ct.at("threshold").as_number();
        } else {
            throw toml::ParseError("line " + std::to_string(ct.at("kind").line) +
                                   ": channel kind must be integral or fire");
        }
        cfg.channels.push_back(std::move(ch));
    }
    return cfg;
}

MultiChannelTrial make_multichannel_trial(const MultiChannelConfig& cfg) {
    MultiChannelTrial out;
    std::uint64_t source_seed = split_seed(cfg.seed, 0);
    std::uint64_t instant_seed = split_seed(cfg.seed, 1);
    for (Eigen::Index nsrc = 0; nsrc < cfg.a.cols(); ++nsrc)
        out.sources.push_back(random_bandlimited(
            cfg.period, cfg.rms, split_seed(source_seed, static_cast<std::uint64_t>(nsrc))));

    ChannelMatrix cm(cfg.a);
    std::vector<ChannelEncoder> encoders;
    for (std::size_t i = 0; i < cfg.channels.size(); ++i) {
        const MultiChannelConfig::Channel& ch = cfg.channels[i];
        if (ch.encoder.kind == EncoderSpec::Kind::Fire) {
            encoders.push_back(
                ChannelEncoder::fire(ch.encoder.bias, ch.encoder.threshold));
            continue;
        }
        std::vector<double> instants =
            ch.instants.kind == InstantSpec::Kind::Explicit
                ? ch.instants.fixed
                : generate_instants(ch.instants.uniform, cfg.period,
                                    split_seed(instant_seed, i));
        encoders.push_back(ChannelEncoder::integral(std::move(instants)));
    }
    out.samples = expand_and_encode(out.sources, cm, encoders);
    return out;
}

void write_multichannel_csv(const MultiChannelSamples& samples, std::ostream& os) {
    os << "channel,j,t_prev,t_j,s_ij\n";
    for (std::size_t i = 0; i < samples.channels.size(); ++i) {
        const ChannelSamples& ch = samples.channels[i];
        if (ch.instants.empty()) continue;
        KernelFamily fam =
            KernelFamily::make(KernelKind::Indicator, samples.period, ch.instants);
        for (std::size_t j = 0; j < ch.instants.size(); ++j) {
            auto [a, b] = fam.interval(j);
            os << i << ',' << j << ',' << num(a) << ',' << num(b) << ','
               << num(ch.values[j]) << '\n';
        }
    }
}

} // namespace nusrec
