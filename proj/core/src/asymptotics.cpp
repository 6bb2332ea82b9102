#include "gincorr/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gincorr/matrix_core.hpp"

namespace gincorr {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)
// zeta'(-1) = 1/12 - log A (A the Glaisher-Kinkelin constant)
constexpr double kZetaPrimeMinus1 = -0.16542114370045093;
}  // namespace

std::complex<double> asymptotic_kernel(std::complex<double> z, std::complex<double> w) {
    return std::exp(-0.5 * std::norm(z) - 0.5 * std::norm(w) + z * std::conj(w));
}

Theorem1Prediction theorem1_prediction(std::span<const std::complex<double>> zetas,
                                       std::complex<double> z0, double kappa22) {
    const int m = static_cast<int>(zetas.size());
    if (m < 1) throw std::invalid_argument("theorem1_prediction: need m >= 1");
    if (std::abs(z0) >= 1.0) {
        throw std::invalid_argument("theorem1_prediction: z0 must be in the bulk (|z0| < 1)");
    }
    double delta = 0.0;
    for (const auto& zt : zetas) delta = std::max(delta, std::abs(zt));
    delta = 1e-6 * (1.0 + delta);
    double vsq = 1.0;
    for (int j = 0; j < m; ++j) {
        for (int k = j + 1; k < m; ++k) {
            double d = std::abs(zetas[j] - zetas[k]);
            if (d < delta) {
                throw std::invalid_argument("theorem1_prediction: confluent zetas rejected");
            }
            vsq *= d * d;
        }
    }

    Eigen::MatrixXcd km(m, m);
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) km(j, k) = asymptotic_kernel(zetas[j], zetas[k]);
    }
    LogComplex det = lu_log_det_inplace(km);
    // Gram determinant of Gaussian feature maps: real and nonnegative.
    double kd = det.is_zero() ? 0.0 : det.value().real();
    if (kd < 0.0) kd = 0.0;

    Theorem1Prediction p;
    p.kernel_det = kd;
    p.vandermonde_sq = vsq;
    double kappa_log = 0.5 * m * (m - 1) * std::pow(1.0 - std::norm(z0), 2) * kappa22;
    p.kappa_factor = std::exp(kappa_log);
    p.log_value = std::log(p.kernel_det) - std::log(p.vandermonde_sq) + kappa_log;
    return p;
}

LogReal moment_prediction(int m, std::complex<double> z0, int n, double kappa22) {
    if (m < 1) throw std::invalid_argument("moment_prediction: need m >= 1");
    if (n < 1) throw std::invalid_argument("moment_prediction: need n >= 1");
    if (std::abs(z0) >= 1.0) {
        throw std::invalid_argument("moment_prediction: z0 must be in the bulk (|z0| < 1)");
    }
    double log_c = 0.5 * m * kLog2Pi;
    for (int j = 1; j < m; ++j) log_c -= std::lgamma(static_cast<double>(j) + 1.0);
    double lg = log_c + 0.5 * m * (m - 1) * std::pow(1.0 - std::norm(z0), 2) * kappa22 +
                0.5 * m * m * std::log(static_cast<double>(n)) +
                static_cast<double>(m) * n * (std::norm(z0) - 1.0);
    return LogReal::from_log(lg);
}

LogReal webb_wong_prediction(double gamma, std::complex<double> z0, int n) {
    if (!(gamma > -2.0)) throw std::invalid_argument("webb_wong_prediction: need gamma > -2");
    if (n < 1) throw std::invalid_argument("webb_wong_prediction: need n >= 1");
    if (std::abs(z0) >= 1.0) {
        throw std::invalid_argument("webb_wong_prediction: z0 must be in the bulk (|z0| < 1)");
    }
    double lg = gamma * gamma / 8.0 * std::log(static_cast<double>(n)) +
                0.5 * gamma * n * (std::norm(z0) - 1.0) + 0.25 * gamma * kLog2Pi -
                barnes_g_log(1.0 + 0.5 * gamma);
    return LogReal::from_log(lg);
}

namespace {

/**
 * Asymptotic expansion of log G(1+y) for large y:
 *   y^2 (log y / 2 - 3/4) + y log(2 pi)/2 - log(y)/12 + zeta'(-1)
 *     + sum_k B_{2k+2} / (4k (k+1) y^{2k}).
 * At y >= 33 the truncation is below 1e-22.
 */
double barnes_g_log_asymptotic(double y) {
    // B_4..B_14 over 4k(k+1) for k = 1..6
    static constexpr double coeff[] = {
        -1.0 / 240.0, 1.0 / 1008.0, -1.0 / 1440.0, 1.0 / 1056.0, -691.0 / 327600.0, 1.0 / 144.0,
    };
    double y2 = y * y;
    double s = y2 * (0.5 * std::log(y) - 0.75) + 0.5 * y * kLog2Pi - std::log(y) / 12.0 +
               kZetaPrimeMinus1;
    double p = y2;
    for (double c : coeff) {
        s += c / p;
        p *= y2;
    }
    return s;
}

}  // namespace

double barnes_g_log(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("barnes_g_log: need x > 0");
    if (x == std::floor(x) && x < 1e6) {
        // log G(k) = sum_{j=1}^{k-2} log j!
        int k = static_cast<int>(x);
        double s = 0.0;
        double log_fact = 0.0;  // log j!
        for (int j = 1; j <= k - 2; ++j) {
            log_fact += std::log(static_cast<double>(j));
            s += log_fact;
        }
        return s;
    }
    // G(x) = G(x + K) / prod_{j=0}^{K-1} Gamma(x + j); push to y = x+K-1 >= 33.
    double correction = 0.0;
    double t = x;
    while (t < 34.0) {
        correction += std::lgamma(t);
        t += 1.0;
    }
    return barnes_g_log_asymptotic(t - 1.0) - correction;
}

double saddle_lambda0(std::complex<double> z0) {
    double a = std::norm(z0);
    if (a > 1.0) throw std::invalid_argument("saddle_lambda0: |z0| must be <= 1 (bulk or edge)");
    return std::sqrt(1.0 - a);
}

LogReal f1_asymptote(std::complex<double> z, int n) {
    return LogReal::from_log(0.5 * std::log(2.0 * kPi * n) + n * (std::norm(z) - 1.0));
}

namespace {

/// log of the radial integrand (without the 2n prefactor): log r + n f(r).
double f1_log_integrand(double r, double zsq, double n) {
    if (r <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(r) + n * (-r * r + std::log(zsq + r * r));
}

struct ShiftedIntegrand {
    double zsq;
    double n;
    double shift;
    double operator()(double r) const { return std::exp(f1_log_integrand(r, zsq, n) - shift); }
};

double adaptive_simpson(const ShiftedIntegrand& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double split = left + right;
    // Below the rounding noise of the sums themselves no further refinement
    // can help; without this floor the recursion chases an unreachable
    // tolerance around sharp peaks.
    double noise = 16.0 * std::numeric_limits<double>::epsilon() *
                   (std::abs(left) + std::abs(right) + std::abs(whole));
    if (depth <= 0 || std::abs(split - whole) <= std::max(15.0 * tol, noise) ||
        (b - a) <= 1e-13 * (1.0 + std::abs(a))) {
        return split + (split - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

LogReal f1_quadrature(std::complex<double> z, int n) {
    if (n < 1) throw std::invalid_argument("f1_quadrature: need n >= 1");
    const double zsq = std::norm(z);
    const double nn = static_cast<double>(n);
    const double lam = zsq < 1.0 ? std::sqrt(1.0 - zsq) : 0.0;
    const double sigma = 1.0 / std::sqrt(4.0 * nn * lam * lam + nn);  // peak width scale
    const double r_max = lam + 12.0 / std::sqrt(nn) + 1.0;

    // Peak-centered seed grid: dense around lambda0, coarse elsewhere.
    std::vector<double> grid;
    grid.push_back(0.0);
    for (int j = -12; j <= 12; ++j) {
        double r = lam + j * sigma;
        if (r > 0.0 && r < r_max) grid.push_back(r);
    }
    for (int j = 1; j <= 8; ++j) {
        grid.push_back(r_max * j / 8.0);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double shift = -std::numeric_limits<double>::infinity();
    for (double r : grid) shift = std::max(shift, f1_log_integrand(r, zsq, nn));

    ShiftedIntegrand f{zsq, nn, shift};
    // Coarse per-interval masses set the tolerance budget: a peak interval
    // carrying most of the integral gets most of the budget (allocating by
    // length starves it and the refinement never meets its target).
    const std::size_t intervals = grid.size() - 1;
    std::vector<double> fg(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) fg[i] = f(grid[i]);
    std::vector<double> mass(intervals);
    double coarse = 0.0;
    for (std::size_t i = 0; i < intervals; ++i) {
        mass[i] = 0.5 * (grid[i + 1] - grid[i]) * (fg[i] + fg[i + 1]);
        coarse += mass[i];
    }
    const double tol_global = 1e-11 * coarse;

    double total = 0.0;
    for (std::size_t i = 0; i < intervals; ++i) {
        double a = grid[i], b = grid[i + 1];
        double fm = f(0.5 * (a + b));
        double whole = (b - a) / 6.0 * (fg[i] + 4.0 * fm + fg[i + 1]);
        double tol_i =
            tol_global * std::max(mass[i] / coarse, 0.25 / static_cast<double>(intervals));
        total += adaptive_simpson(f, a, b, fg[i], fm, fg[i + 1], whole, tol_i, 40);
    }

    // Certified tail bound: beyond r_max the log integrand decreases at rate
    // at least beta = -d/dr [log r + n f(r)] evaluated at r_max (the rate only
    // grows with r), so the tail is below exp(l(r_max)) / beta.
    double l_end = f1_log_integrand(r_max, zsq, nn);
    double beta = 2.0 * nn * r_max * (r_max * r_max + zsq - 1.0) / (zsq + r_max * r_max) - 1.0 / r_max;
    if (beta > 0.0) {
        double tail_log = l_end - std::log(beta) - shift;
        if (std::exp(tail_log) > 1e-12 * total) {
            total += std::exp(tail_log);  // never reached for n >= 1; keeps the bound honest
        }
    }

    return LogReal::from_log(std::log(2.0 * nn) + shift + std::log(total));
}

}  // namespace gincorr
