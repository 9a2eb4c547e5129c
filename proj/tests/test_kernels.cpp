#include "doctest.h"

#include <cmath>
#include <random>

#include "nusrec/kernels.hpp"
#include "support.hpp"

using namespace nusrec;

namespace {

double sinc(double t) {
    double x = testsup::kPi * t;
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// <P g_1, P g_2> for unit-band running integrals on the line, computed by
// nested adaptive quadrature of the reproducing kernel. Independent of the
// library's f-based closed form.
double pair_inner_quadrature(double a1, double b1, double a2, double b2) {
    return testsup::integrate(
        [&](double y) {
            return testsup::integrate(
                [&](double x) { return sinc(x - y); }, a1, b1);
        },
        a2, b2);
}

KernelFamily quasi_family(KernelKind kind, double period, std::size_t n,
                          std::uint64_t seed, double leak = 0.0) {
    return KernelFamily::make(
        kind, period, testsup::quasi_uniform_instants(period, n, seed), leak);
}

} // namespace

TEST_CASE("si matches quadrature and frozen values") {
    for (double x : {0.05, 0.7, 2.0, 3.1415, 8.0, 19.5}) {
        double quad = testsup::integrate(
            [](double u) { return std::abs(u) < 1e-12 ? 1.0 : std::sin(u) / u; },
            0.0, x);
        CHECK(si(x) == doctest::Approx(quad).epsilon(1e-12));
        CHECK(si(-x) == doctest::Approx(-si(x)).epsilon(1e-15));
    }
    CHECK(si(0.0) == 0.0);
    CHECK(si(testsup::kPi) == doctest::Approx(1.8519370519824658).epsilon(1e-14));
}

TEST_CASE("f_kernel frozen values, parity, and small-argument behaviour") {
    CHECK(f_kernel(1.0) == doctest::Approx(0.38684750495140796).epsilon(1e-14));
    CHECK(f_kernel(-1.0) == doctest::Approx(f_kernel(1.0)).epsilon(1e-15));
    CHECK(f_kernel(0.0) == 0.0);
    double t = 1e-4;
    double expansion = t * t / 2.0 -
                       testsup::kPi * testsup::kPi * t * t * t * t / 72.0;
    CHECK(f_kernel(t) == doctest::Approx(expansion).epsilon(1e-10));
    // second difference reproduces sinc = f''
    double h = 1e-4;
    for (double x : {0.0, 0.6, 2.3}) {
        double second =
            (f_kernel(x + h) - 2.0 * f_kernel(x) + f_kernel(x - h)) / (h * h);
        CHECK(second == doctest::Approx(sinc(x)).epsilon(1e-5));
    }
}

TEST_CASE("f table interpolation error stays within the documented bound") {
    FKernelTable table(20.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-20.0, 20.0);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double t = unif(rng);
        worst = std::max(worst, std::abs(table(t) - f_kernel(t)));
    }
    CHECK(worst < 1.3e-7);
    CHECK(worst > 1e-9); // it is an interpolation, not a lookup of exact values
    CHECK_THROWS_AS(table(20.5), std::invalid_argument);
}

TEST_CASE("four-term closed form equals nested quadrature on the line") {
    CHECK(f_pair_inner(0.0, 1.0, 0.0, 1.0) ==
          doctest::Approx(0.7736950099028159).epsilon(1e-14));
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pos(-5.0, 5.0);
    std::uniform_real_distribution<double> len(0.2, 3.0);
    for (int i = 0; i < 50; ++i) {
        double a1 = pos(rng), b1 = a1 + len(rng);
        double a2 = pos(rng), b2 = a2 + len(rng);
        double closed = f_pair_inner(a1, b1, a2, b2);
        double quad = pair_inner_quadrature(a1, b1, a2, b2);
        CHECK(std::abs(closed - quad) < 1e-8);
    }
}

TEST_CASE("family construction validates its inputs and wraps interval 0") {
    KernelFamily fam =
        KernelFamily::make(KernelKind::Indicator, 63.0, {1.0, 5.0, 62.0});
    auto [a0, b0] = fam.interval(0);
    CHECK(a0 == doctest::Approx(-1.0));
    CHECK(b0 == doctest::Approx(1.0));
    auto [a1, b1] = fam.interval(1);
    CHECK(a1 == 1.0);
    CHECK(b1 == 5.0);

    CHECK_THROWS_AS(KernelFamily::make(KernelKind::Indicator, 63.0, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(KernelFamily::make(KernelKind::Indicator, 63.0, {5.0, 5.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(KernelFamily::make(KernelKind::Indicator, 63.0, {5.0, 63.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(KernelFamily::make(KernelKind::Indicator, 63.0, {-0.5, 5.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        KernelFamily::make(KernelKind::Indicator, 63.0, {1.0, 5.0}, 0.5),
        std::invalid_argument);
    CHECK_THROWS_AS(KernelFamily::make(KernelKind::Ramp, 63.0, {5.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        KernelFamily::make(KernelKind::LeakyExp, 63.0, {1.0, 5.0}, -0.1),
        std::invalid_argument);
}

TEST_CASE("projected indicator kernels reproduce running integrals") {
    Signal u = random_bandlimited(63.0, 1.0, 101);
    KernelFamily fam = quasi_family(KernelKind::Indicator, 63.0, 12, 200);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        auto [a, b] = fam.interval(k);
        double quad =
            testsup::integrate([&](double t) { return eval(u, t); }, a, b);
        CHECK(inner_l2(projected_kernel(fam, k), u) ==
              doctest::Approx(quad).epsilon(1e-9));
    }
}

TEST_CASE("projected leaky kernels reproduce leaky integrals and weights") {
    double leak = 0.5;
    Signal u = random_bandlimited(63.0, 1.0, 103);
    KernelFamily fam = quasi_family(KernelKind::LeakyExp, 63.0, 10, 210, leak);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        auto [a, b] = fam.interval(k);
        double quad = testsup::integrate(
            [&](double t) { return std::exp(-leak * (b - t)) * eval(u, t); }, a, b);
        CHECK(inner_l2(projected_kernel(fam, k), u) ==
              doctest::Approx(quad).epsilon(1e-9));
        double wquad = testsup::integrate(
            [&](double t) {
                double g = std::exp(-leak * (b - t));
                return g * g;
            },
            a, b);
        CHECK(kernel_weight(fam, k) == doctest::Approx(wquad).epsilon(1e-10));
    }
    // leak = 0 degenerates to the plain indicator
    KernelFamily leaky0 = KernelFamily::make(KernelKind::LeakyExp, 63.0,
                                             fam.instants, 0.0);
    KernelFamily ind =
        KernelFamily::make(KernelKind::Indicator, 63.0, fam.instants);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        Signal d = subtract(projected_kernel(leaky0, k), projected_kernel(ind, k));
        CHECK(norm_l2(d) < 1e-13);
        CHECK(kernel_weight(leaky0, k) == kernel_weight(ind, k));
    }
}

TEST_CASE("ramp representers reproduce first differences in the Sobolev pairing") {
    Signal u = random_bandlimited(63.0, 1.0, 105);
    KernelFamily fam = quasi_family(KernelKind::Ramp, 63.0, 14, 220);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        auto [a, b] = fam.interval(k);
        Signal g = projected_kernel(fam, k);
        CHECK(g.coef[0] == std::complex<double>(0.0, 0.0));
        CHECK(inner_sobolev(g, u) ==
              doctest::Approx(eval(u, b) - eval(u, a)).epsilon(1e-10));
        CHECK(kernel_weight(fam, k) == doctest::Approx(b - a));
    }
}

TEST_CASE("sinc kernels evaluate points and interpolate on the integer grid") {
    Signal u = random_bandlimited(63.0, 1.0, 107);
    KernelFamily fam = quasi_family(KernelKind::Sinc, 63.0, 9, 230);
    double w = 63.0 / 63.0; // (2M+1)/T with M = 31
    for (std::size_t k = 0; k < fam.size(); ++k) {
        Signal g = projected_kernel(fam, k);
        CHECK(inner_l2(g, u) ==
              doctest::Approx(eval(u, fam.instants[k])).epsilon(1e-10));
        // in-band kernel: projection preserves the whole norm
        CHECK(inner_l2(g, g) == doctest::Approx(kernel_weight(fam, k)).epsilon(1e-12));
        CHECK(eval(g, fam.instants[k]) == doctest::Approx(w).epsilon(1e-12));
    }
    // Dirichlet zeros on the integer grid at integer odd period
    std::vector<double> grid(63);
    for (int j = 0; j < 63; ++j) grid[j] = static_cast<double>(j);
    KernelFamily unif = KernelFamily::make(KernelKind::Sinc, 63.0, grid);
    Signal g0 = projected_kernel(unif, 0);
    for (int j = 1; j < 63; ++j)
        CHECK(eval(g0, static_cast<double>(j)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("projection shrinks out-of-band kernels but never their pairing role") {
    KernelFamily fam = quasi_family(KernelKind::Indicator, 63.0, 12, 240);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        Signal g = projected_kernel(fam, k);
        double w = kernel_weight(fam, k);
        CHECK(inner_l2(g, g) < w);          // Bessel: discontinuous window
        CHECK(inner_l2(g, g) > 0.5 * w);    // but most mass is in band
    }
}

TEST_CASE("gram matrix: de-normalized symmetry and positive semidefiniteness") {
    KernelFamily fam = quasi_family(KernelKind::Indicator, 63.0, 20, 250);
    GramMatrix gm = gram_matrix(fam);
    for (std::size_t k = 0; k < fam.size(); ++k)
        for (std::size_t kp = 0; kp < fam.size(); ++kp)
            CHECK(gm.h(k, kp) * gm.w[kp] ==
                  doctest::Approx(gm.h(kp, k) * gm.w[k]).epsilon(1e-12));
    Eigen::MatrixXd inner = gm.h;
    for (std::size_t kp = 0; kp < fam.size(); ++kp) inner.col(kp) *= gm.w[kp];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("closed-form line Gram approximates the periodic one at 1/period rate") {
    auto discrepancy = [](double period, std::size_t n, std::uint64_t seed) {
        KernelFamily fam = quasi_family(KernelKind::Indicator, period, n, seed);
        GramMatrix exact = gram_matrix(fam, GramPath::ExactPeriodic);
        GramMatrix line = gram_matrix(fam, GramPath::ClosedFormLine);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t kp = 0; kp < n; ++kp)
                worst = std::max(worst, std::abs(exact.h(k, kp) * exact.w[kp] -
                                                 line.h(k, kp) * line.w[kp]));
        return worst;
    };
    double d63 = discrepancy(63.0, 63, 301);
    double d315 = discrepancy(315.0, 315, 302);
    CHECK(d63 < 4e-3); // measured 2.2e-3
    CHECK(d315 < 1e-3); // measured well below
    CHECK(d63 > 1e-5); // genuinely an approximation, not exact
    CHECK(d315 < 5e-4);
    CHECK(d63 / d315 > 1.5); // decays as the period grows

    // diagonal of the line Gram is 2 f(dt) / w
    KernelFamily fam = quasi_family(KernelKind::Indicator, 63.0, 10, 303);
    GramMatrix line = gram_matrix(fam, GramPath::ClosedFormLine);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        auto [a, b] = fam.interval(k);
        CHECK(line.h(k, k) ==
              doctest::Approx(2.0 * f_kernel(b - a) / (b - a)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gram_matrix(quasi_family(KernelKind::Sinc, 63.0, 5, 304),
                                GramPath::ClosedFormLine),
                    std::invalid_argument);
}
