#include "nusrec/selftest.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "nusrec/encoders.hpp"
#include "nusrec/experiments.hpp"
#include "nusrec/multichannel.hpp"
#include "nusrec/operators.hpp"
#include "nusrec/recon.hpp"

namespace nusrec {

namespace {

std::vector<double> spread_instants(double period, std::size_t count,
                                    std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(lo, hi);
    std::vector<double> gaps(count);
    double sum = 0.0;
    for (auto& g : gaps) {
        g = unif(rng);
        sum += g;
    }
    std::vector<double> out(count);
    double acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        acc += gaps[k] * (period / sum);
        out[k] = std::min(acc, period - 1e-9);
    }
    return out;
}

double rel(const Signal& got, const Signal& want) {
    double d = norm_l2(want);
    double n = norm_l2(subtract(got, want));
    return d > 0.0 ? n / d : n;
}

bool adjoint_identity() {
    SamplingOperator op(KernelFamily::make(KernelKind::Indicator, 63.0,
                                           spread_instants(63.0, 24, 11, 0.6, 1.4)));
    Signal u = random_bandlimited(63.0, 1.0, 12);
    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SampleSequence c;
    c.weights = op.weights();
    for (std::size_t k = 0; k < op.sample_count(); ++k)
        c.values.push_back(gauss(rng));
    double lhs = d_inner(op.apply(u), c);
    double rhs = inner_l2(u, op.apply_adjoint(c));
    return std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(lhs));
}

bool gram_consistency() {
    KernelFamily fam = KernelFamily::make(KernelKind::LeakyExp, 63.0,
                                          spread_instants(63.0, 20, 21, 0.6, 1.4),
                                          0.35);
    GramMatrix direct = gram_matrix(fam);
    GramMatrix via_op = SamplingOperator(fam).gram();
    return (direct.h - via_op.h).cwiseAbs().maxCoeff() < 1e-10;
}

bool pseudo_inverse_identities() {
    SamplingOperator op(KernelFamily::make(KernelKind::Sinc, 63.0,
                                           spread_instants(63.0, 40, 31, 0.6, 1.4)));
    Signal u = random_bandlimited(63.0, 1.0, 32);
    Signal p = op.pseudo_inverse_apply(op.apply(u));
    Signal pf = op.project_frame_subspace(u);
    return norm_l2(subtract(p, pf)) < 1e-8;
}

bool fire_roundtrip() {
    Signal x = random_bandlimited(63.0, 0.5, 41);
    FireResult fr = fire_instants(x, 1.6, 1.1);
    SamplingOperator op(
        KernelFamily::make(KernelKind::Indicator, 63.0, fr.instants));
    Signal rec = op.pocs_limit(fr.samples, zero_signal(63.0));
    return rel(rec, x) < 1e-6;
}

bool discrete_matches_continuous() {
    SamplingOperator op(KernelFamily::make(KernelKind::Indicator, 63.0,
                                           spread_instants(63.0, 26, 51, 0.6, 1.4)));
    Signal x = random_bandlimited(63.0, 1.0, 52);
    SampleSequence s = op.apply(x);
    RelaxationSchedule sched = RelaxationSchedule::constant(1.2);
    StopRule stop{20, 0.0};
    Signal u0 = zero_signal(63.0);
    ReconResult a = pocs_run(op, s, u0, sched, stop, nullptr);
    ReconResult b = pocs_discrete_run(op, s, u0, sched, 20, nullptr);
    return norm_l2(subtract(a.estimate, b.estimate)) < 1e-8;
}

bool adaptive_weights_converges() {
    std::vector<double> times = spread_instants(63.0, 100, 61, 0.4, 0.95);
    Signal x = random_bandlimited(63.0, 1.0, 62);
    ReconResult r = grochenig_run(times, eval(x, times), 63.0, zero_signal(63.0),
                                  RelaxationSchedule::constant(1.0), 200, &x);
    return r.history.rows.back().err_l2_rel < 1e-8;
}

bool multichannel_recovery() {
    Eigen::MatrixXd a(3, 2);
    a << 1.0, 0.3, -0.4, 1.0, 0.7, 0.6;
    ChannelMatrix cm(a);
    std::vector<Signal> y{random_bandlimited(63.0, 1.0, 71),
                          random_bandlimited(63.0, 0.8, 72)};
    std::vector<ChannelEncoder> enc;
    for (std::size_t i = 0; i < 3; ++i)
        enc.push_back(ChannelEncoder::integral(
            spread_instants(63.0, 80, 73 + i, 0.6, 1.4)));
    MultiChannelSamples mc = expand_and_encode(y, cm, enc);
    MultiChannelResult res = reconstruct_multichannel(
        mc, cm, {}, RelaxationSchedule::constant(1.0), 250, &y);
    return res.history.rows.back().err_l2_rel < 1e-6;
}

bool scenario_deterministic() {
    ScenarioConfig cfg;
    cfg.id = "selftest";
    cfg.trials = 2;
    cfg.iters = 5;
    cfg.seed = 99;
    cfg.instants.kind = InstantSpec::Kind::UniformGap;
    cfg.instants.uniform = {0.3, 1.0};
    cfg.encoder.kind = EncoderSpec::Kind::Point;
    cfg.algorithms = {{"grochenig", {}}, {"kaczmarz_cyclic", {}}};
    std::ostringstream a, b;
    run_scenario(cfg).write_csv(a);
    run_scenario(cfg).write_csv(b);
    return !a.str().empty() && a.str() == b.str();
}

bool config_roundtrip() {
    const char* text =
        "[scenario]\n"
        "id = \"check\"\n"
        "period = 63.0\n"
        "trials = 3\n"
        "seed = 5\n"
        "iters = 7\n"
        "[instants]\n"
        "kind = \"uniform_gap\"\n"
        "gap_min = 0.3\n"
        "gap_max = 1.0\n"
        "[encoder]\n"
        "kind = \"point\"\n"
        "[[algorithm]]\n"
        "name = \"grochenig\"\n";
    ScenarioConfig cfg = scenario_from_toml(toml::parse(text));
    return cfg.id == "check" && cfg.trials == 3 && cfg.iters == 7 &&
           cfg.algorithms.size() == 1;
}

} // namespace

int run_selftest(std::ostream& os) {
    struct Check {
        const char* name;
        bool (*fn)();
    };
    const Check checks[] = {
        {"adjoint identity (interval kernels)", adjoint_identity},
        {"gram matrix consistency (leaky kernels)", gram_consistency},
        {"pseudo-inverse projects onto the kernel span", pseudo_inverse_identities},
        {"integrate-and-fire roundtrip", fire_roundtrip},
        {"discrete iteration matches signal-space iteration",
         discrete_matches_continuous},
        {"adaptive-weights convergence below Nyquist gaps",
         adaptive_weights_converges},
        {"multichannel joint recovery", multichannel_recovery},
        {"scenario runner determinism", scenario_deterministic},
        {"config parsing round trip", config_roundtrip},
    };
    int failures = 0;
    for (const Check& c : checks) {
        bool ok = false;
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            os << "[FAIL] " << c.name << " (exception: " << e.what() << ")\n";
            ++failures;
            continue;
        }
        os << (ok ? "[ ok ] " : "[FAIL] ") << c.name << '\n';
        if (!ok) ++failures;
    }
    os << (failures == 0 ? "selftest: all checks passed\n"
                         : "selftest: " + std::to_string(failures) +
                               " check(s) failed\n");
    return failures;
}

} // namespace nusrec
