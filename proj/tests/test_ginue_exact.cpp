#include "gincorr/ginue_exact.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "gincorr/asymptotics.hpp"
#include "oracles.hpp"

using namespace gincorr;
using C = std::complex<double>;

TEST_CASE("kernel values") {
    CHECK(kernel_Kn(C{0, 0}, C{0, 0}, 5, 3) == C{1.0, 0.0});
    C z{0.3, 0.4};
    CHECK(std::abs(kernel_Kn(z, z, 1, 1) - C{1.0 + std::norm(z), 0.0}) < 1e-14);
    CHECK(std::abs(kernel_Kn(C{1, 0}, C{1, 0}, 1, 1) - C{2.0, 0.0}) < 1e-14);
    // conjugation in the second slot: K(z, w) = sum (z wbar)^l / l!
    C w{0.2, -0.5};
    C t = z * std::conj(w);
    CHECK(std::abs(kernel_Kn(z, w, 2, 1) - (1.0 + t + 0.5 * t * t)) < 1e-14);
}

TEST_CASE("kernel stays finite in log domain for |z wbar| of order n") {
    // n |z0|^2 = 810: the plain sum would overflow exp(810).
    int n = 1000;
    C big = std::sqrt(static_cast<double>(n)) * C{0.9, 0.0};
    LogComplex k = kernel_Kn_log(big, big, n, 2);
    CHECK(std::isfinite(k.log_mag));
    CHECK(k.log_mag > 700.0);
    // against the full exponential: K ~ e^{|big|^2} with the truncation tail
    // still small at l = n+1 > 810
    CHECK(k.log_mag < std::norm(big) + 1.0);
}

TEST_CASE("av_correlation tiny-n oracle values") {
    C z{0.3, 0.4};
    auto v = av_correlation(std::vector<C>{z}, std::vector<C>{z}, 1);
    CHECK(v.value().real() == doctest::Approx(1.25).epsilon(1e-13));
    CHECK(std::abs(v.arg) < 1e-13);

    auto v2 = av_correlation(std::vector<C>{C{0, 0}}, std::vector<C>{C{0, 0}}, 2);
    CHECK(v2.value().real() == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("av_correlation generic two-list value (frozen reference)") {
    std::vector<C> zs = {C{0.2, 0.1}, C{-0.4, 0.3}};
    std::vector<C> ws = {C{0.1, -0.5}, C{0.6, 0.2}};
    C got = av_correlation(zs, ws, 3).value();
    C expected{124.504223894528, 12.869158355904};
    CHECK(std::abs(got - expected) < 1e-9 * std::abs(expected));
}

TEST_CASE("av_correlation symmetry properties") {
    std::vector<C> zs = {C{0.2, 0.1}, C{-0.4, 0.3}, C{0.5, -0.2}};
    std::vector<C> ws = {C{0.1, -0.5}, C{0.6, 0.2}, C{-0.3, -0.3}};
    C base = av_correlation(zs, ws, 4).value();

    // simultaneous identical permutation of zs and ws
    std::vector<C> zp = {zs[2], zs[0], zs[1]};
    std::vector<C> wp = {ws[2], ws[0], ws[1]};
    CHECK(std::abs(av_correlation(zp, wp, 4).value() - base) < 1e-12 * std::abs(base));

    // swapping the lists conjugates the value
    C swapped = av_correlation(ws, zs, 4).value();
    CHECK(std::abs(swapped - std::conj(base)) < 1e-12 * std::abs(base));
}

TEST_CASE("near-confluent configurations are rejected") {
    std::vector<C> zs = {C{0.2, 0.1}, C{0.2, 0.1 + 1e-9}};
    CHECK_THROWS_WITH_AS(av_correlation(zs, zs, 3).value(),
                         doctest::Contains("confluence threshold"), std::invalid_argument);
}

TEST_CASE("av_confluent scalar moments") {
    // all m = 2 points at 0, n = 1: E|x|^4 = 2 for the standard complex Gaussian
    std::vector<ConfluentPoint> p2 = {{C{0, 0}, 2}};
    CHECK(av_confluent(p2, 1).value().real() == doctest::Approx(2.0).epsilon(1e-13));
    // n = 2: E|det X|^4 = 12 (Wick expansion; also checked by MC below)
    CHECK(av_confluent(p2, 2).value().real() == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("av_confluent with m=1 equals av_correlation") {
    C u{0.4, -0.3};
    std::vector<ConfluentPoint> single = {{u, 1}};
    auto a = av_confluent(single, 5);
    auto b = av_correlation(std::vector<C>{u}, std::vector<C>{u}, 5);
    CHECK(a.log_mag == doctest::Approx(b.log_mag).epsilon(1e-14));
}

TEST_CASE("E|det X|^4 for 2x2 matches a Monte Carlo oracle") {
    // brute-force oracle: sample X directly and average |det|^4
    RngStream rng(555);
    double mean = 0.0;
    const int n_samples = 2000000;
    for (int i = 0; i < n_samples; ++i) {
        C a = rng.gaussian_complex(), b = rng.gaussian_complex();
        C c = rng.gaussian_complex(), d = rng.gaussian_complex();
        double det2 = std::norm(a * d - b * c);
        mean += det2 * det2;
    }
    mean /= n_samples;
    // Var(|det|^4) is large; 4 sigma with a generous empirical bound
    CHECK(mean == doctest::Approx(12.0).epsilon(0.05));
}

TEST_CASE("confluent continuity: symmetric merge vs exact limit") {
    C u{0.3, -0.2};
    int n = 7;
    std::vector<ConfluentPoint> conf = {{u, 2}};
    double exact = av_confluent(conf, n).log_mag;
    double eps = 1e-3;
    std::vector<C> sep = {u - C{eps / 2, 0}, u + C{eps / 2, 0}};
    double merged = av_correlation(sep, sep, n).log_mag;
    CHECK(std::abs(std::exp(merged - exact) - 1.0) < 1e-4);
}

TEST_CASE("confluent continuity invariant: extrapolated to 1e-6, m <= 3, n <= 20") {
    struct Case {
        C u;
        int m;
        int n;
    };
    for (const Case& tc : {Case{C{0.4, 0.1}, 2, 20}, Case{C{-0.3, 0.5}, 2, 9},
                           Case{C{0.4, 0.1}, 3, 20}, Case{C{0.2, -0.6}, 3, 11}}) {
        std::vector<ConfluentPoint> conf = {{tc.u, tc.m}};
        double exact = av_confluent(conf, tc.n).log_mag;
        auto merged_log = [&](double d) {
            std::vector<C> pts;
            for (int j = 0; j < tc.m; ++j) {
                pts.push_back(tc.u + C{(j - (tc.m - 1) * 0.5) * d, 0.0});
            }
            return av_correlation(pts, pts, tc.n).log_mag;
        };
        // The symmetric point pattern makes the expansion even in d; two
        // Richardson stages kill the d^2 and d^4 terms. The base step stays
        // large because the separated evaluation loses ~eps/d^4 to kernel
        // determinant cancellation as the points pinch.
        double d = 0.08;
        double f1 = std::exp(merged_log(d) - exact);
        double f2 = std::exp(merged_log(d / 2) - exact);
        double f4 = std::exp(merged_log(d / 4) - exact);
        double r1 = (4.0 * f2 - f1) / 3.0;
        double r2 = (4.0 * f4 - f2) / 3.0;
        double extrapolated = (16.0 * r2 - r1) / 15.0;
        INFO("m=", tc.m, " n=", tc.n);
        CHECK(std::abs(extrapolated - 1.0) < 1e-6);
    }
}

TEST_CASE("partial confluence (u,u,v) against separated evaluation") {
    C u{0.3, 0.1}, v{-0.2, 0.4};
    int n = 5;
    std::vector<ConfluentPoint> conf = {{u, 2}, {v, 1}};
    double exact = av_confluent(conf, n).log_mag;
    CHECK(std::exp(exact) == doctest::Approx(259780864.276825).epsilon(1e-9));
    double eps = 1e-4;
    std::vector<C> sep = {u - C{eps / 2, 0}, u + C{eps / 2, 0}, v};
    double merged = av_correlation(sep, sep, n).log_mag;
    CHECK(std::abs(std::exp(merged - exact) - 1.0) < 1e-6);
}

TEST_CASE("kernel Gram matrix is positive semidefinite (1000 configurations)") {
    std::mt19937_64 rng(2718);
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    for (int rep = 0; rep < 1000; ++rep) {
        int m = 1 + static_cast<int>(rng() % 5);
        int n = 1 + static_cast<int>(rng() % 30);
        std::vector<C> zs;
        for (int j = 0; j < m; ++j) zs.emplace_back(unif(-1.5, 1.5), unif(-1.5, 1.5));
        KernelMatrix km = kernel_matrix(zs, zs, n);
        // undo the row scaling and run a Hermitian LDL with diagonal pivoting
        Eigen::MatrixXcd full(m, m);
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < m; ++k) {
                full(j, k) = km.scaled(j, k) * std::exp(km.row_log_scale[j]);
            }
        }
        auto pivots = gincorr::testing::hermitian_ldl_pivots(full);
        double scale = full.cwiseAbs().maxCoeff();
        for (double p : pivots) {
            CHECK(p > -1e-10 * scale);
        }
    }
}

TEST_CASE("ginue_Fm_scaled small cases and frozen references") {
    // n=1, m=1: F_1(z) = 1 + |z|^2
    PointConfig p1{C{0.3, 0.4}, {C{0, 0}}, 1};
    CHECK(std::exp(ginue_Fm_scaled(p1).log()) == doctest::Approx(1.25).epsilon(1e-12));

    // n=2, m=1, z=0: 2 * 2^{-2} = 0.5
    PointConfig p2{C{0, 0}, {C{0, 0}}, 2};
    CHECK(std::exp(ginue_Fm_scaled(p2).log()) == doctest::Approx(0.5).epsilon(1e-12));

    // frozen: n=4, z0=0.3, zeta=0
    PointConfig p3{C{0.3, 0.0}, {C{0, 0}}, 4};
    CHECK(ginue_Fm_scaled(p3).log() == doctest::Approx(-2.0071609925326096).epsilon(1e-12));

    // frozen: n=8, m=2, z0=0.3, zeta=(0,1)
    PointConfig p4{C{0.3, 0.0}, {C{0, 0}, C{1, 0}}, 8};
    CHECK(ginue_Fm_scaled(p4).log() == doctest::Approx(-6.1906939520821943).epsilon(1e-12));
}

TEST_CASE("ginue_Fm_scaled routes exact coincidences through the confluent path") {
    PointConfig conf{C{0.5, 0.0}, {C{0, 0}, C{0, 0}}, 6};
    LogReal fm = ginue_Fm_scaled(conf);
    CHECK(std::isfinite(fm.log()));
    // against the direct confluent expression at sqrt(n) z0
    double rn = std::sqrt(6.0);
    std::vector<ConfluentPoint> pts = {{rn * C{0.5, 0.0}, 2}};
    double expected = av_confluent(pts, 6).log_mag - 2.0 * 6.0 * std::log(6.0);
    CHECK(fm.log() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("ginue_theorem_ratio_exact") {
    // m = 1 is exactly one
    PointConfig p1{C{0.2, 0.1}, {C{0.3, -0.4}}, 12};
    CHECK(ginue_theorem_ratio_exact(p1).log() == 0.0);

    // m = 2, z0 = 0, zeta = (0,1): frozen finite-n values and the limit trend
    Theorem1Prediction target = theorem1_prediction(std::vector<C>{C{0, 0}, C{1, 0}}, C{0, 0}, 0.0);
    CHECK(target.value() == doctest::Approx(0.63212055882855768).epsilon(1e-12));
    double frozen[3] = {0.6716280938, 0.6419974426, 0.6345897798};
    int ns[3] = {16, 64, 256};
    double prev_err = 1e9;
    for (int i = 0; i < 3; ++i) {
        PointConfig p{C{0, 0}, {C{0, 0}, C{1, 0}}, ns[i]};
        double r = std::exp(ginue_theorem_ratio_exact(p).log());
        CHECK(r == doctest::Approx(frozen[i]).epsilon(1e-8));
        double err = std::abs(std::log(r) - target.log_value);
        CHECK(err < prev_err);
        prev_err = err;
    }

    // permutation of zetas: bit-identical
    PointConfig a{C{0.1, 0.0}, {C{0, 0}, C{1, 0}, C{0.5, 0.5}}, 8};
    PointConfig b{C{0.1, 0.0}, {C{0.5, 0.5}, C{1, 0}, C{0, 0}}, 8};
    CHECK(ginue_theorem_ratio_exact(a).log() == ginue_theorem_ratio_exact(b).log());

    // confluent zetas rejected
    PointConfig bad{C{0, 0}, {C{0, 0}, C{0, 0}}, 8};
    CHECK_THROWS_AS((void)ginue_theorem_ratio_exact(bad), std::invalid_argument);
}

TEST_CASE("input validation") {
    std::vector<C> zs = {C{0, 0}};
    std::vector<C> ws;
    CHECK_THROWS_AS(av_correlation(zs, ws, 2).value(), std::invalid_argument);
    CHECK_THROWS_AS(av_correlation(zs, zs, 0).value(), std::invalid_argument);
    std::vector<ConfluentPoint> none;
    CHECK_THROWS_AS(av_confluent(none, 2).value(), std::invalid_argument);
    std::vector<ConfluentPoint> dup = {{C{0, 0}, 1}, {C{0, 0}, 1}};
    CHECK_THROWS_AS(av_confluent(dup, 2).value(), std::invalid_argument);
}
