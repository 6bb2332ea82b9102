#pragma once

#include <complex>
#include <span>

#include "gincorr/log_domain.hpp"

namespace gincorr {

/**
 * Bulk-scaling limit kernel K(z, w) = exp(-|z|^2/2 - |w|^2/2 + z wbar).
 * Note |K(z, w)|^2 = exp(-|z - w|^2).
 */
std::complex<double> asymptotic_kernel(std::complex<double> z, std::complex<double> w);

/**
 * The limit of n^{-(m^2-m)/2} F_m / (F_1 ... F_1):
 *
 *   det(K(zeta_j, zeta_k)) / |Delta(zeta)|^2
 *     * exp((m^2-m)/2 * (1-|z0|^2)^2 * kappa22)
 *
 * with leading constant 1. The factors are kept separately; log_value is
 * log(kernel_det) - log(vandermonde_sq) + log(kappa_factor).
 */
struct Theorem1Prediction {
    double log_value = 0.0;
    double kernel_det = 0.0;      // Gram determinant, >= 0
    double vandermonde_sq = 0.0;  // |Delta(zeta)|^2
    double kappa_factor = 1.0;    // exp((m^2-m)/2 (1-|z0|^2)^2 kappa22)
    double value() const { return std::exp(log_value); }
};

Theorem1Prediction theorem1_prediction(std::span<const std::complex<double>> zetas,
                                       std::complex<double> z0, double kappa22);

/**
 * Moment law at fully confluent points:
 *   E|det(M_n - z0)|^{2m}
 *     ~ (2pi)^{m/2} (prod_{j<m} j!)^{-1}
 *       * exp((m^2-m)/2 (1-|z0|^2)^2 kappa22) * n^{m^2/2} * exp(m n (|z0|^2-1)).
 */
LogReal moment_prediction(int m, std::complex<double> z0, int n, double kappa22);

/**
 * gamma-moment law: E|det(M_n - z0)|^gamma
 *   ~ n^{gamma^2/8} exp((gamma/2) n (|z0|^2-1)) (2pi)^{gamma/4} / G(1+gamma/2),
 * G the Barnes G-function. Requires gamma > -2 and |z0| < 1.
 */
LogReal webb_wong_prediction(double gamma, std::complex<double> z0, int n);

/**
 * log G(x) for real x > 0. Exact factorial product at positive integers;
 * elsewhere the recursion G(x+1) = Gamma(x) G(x) is pushed to a large
 * argument where the asymptotic expansion is below 1e-12.
 */
double barnes_g_log(double x);

/**
 * F_1(z) = 2n int_0^inf r exp(n(-r^2 + log(|z|^2 + r^2))) dr by adaptive
 * Simpson quadrature in log domain (integrand rescaled by its peak value).
 * The integrand peaks at r = sqrt(1-|z|^2) for |z| < 1; truncation at
 * r_max = lambda0 + 12/sqrt(n) + 1 carries a certified tail bound below
 * 1e-12 of the total.
 */
LogReal f1_quadrature(std::complex<double> z, int n);

/// F_1 Laplace asymptote sqrt(2 pi n) exp(n(|z|^2 - 1)) in log domain.
LogReal f1_asymptote(std::complex<double> z, int n);

/**
 * The maximizer lambda0 = sqrt(1 - |z0|^2) of f(l) = -l^2 + log(|z0|^2 + l^2)
 * on [0, inf). Requires |z0| <= 1; at |z0| = 1 the saddle degenerates to 0.
 */
double saddle_lambda0(std::complex<double> z0);

}  // namespace gincorr
