#include "gincorr/ginue_exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gincorr/matrix_core.hpp"

namespace gincorr {

namespace {

double confluence_threshold(std::span<const std::complex<double>> pts) {
    double mx = 0.0;
    for (const auto& p : pts) mx = std::max(mx, std::abs(p));
    return 1e-6 * (1.0 + mx);
}

void check_separation(std::span<const std::complex<double>> pts, const char* list_name) {
    double delta = confluence_threshold(pts);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        for (std::size_t k = j + 1; k < pts.size(); ++k) {
            if (std::abs(pts[j] - pts[k]) < delta) {
                throw std::invalid_argument(
                    std::string("av_correlation: ") + list_name + " points " + std::to_string(j) +
                    " and " + std::to_string(k) +
                    " are closer than the confluence threshold; use av_confluent");
            }
        }
    }
}

/// log Gamma(k+1) = log k!
double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

/// prod_{l=n}^{n+m-1} l! in log domain.
double log_prefactor(int n, int m) {
    double s = 0.0;
    for (int l = n; l < n + m; ++l) s += log_factorial(l);
    return s;
}

/// Vandermonde prod_{j>k} (p_j - p_k) in polar log form.
LogComplex log_vandermonde(std::span<const std::complex<double>> pts) {
    LogComplex v = LogComplex::one();
    for (std::size_t j = 0; j < pts.size(); ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            v = v * LogComplex::from(pts[j] - pts[k]);
        }
    }
    return v;
}

/**
 * Mixed derivative of the truncated exponential kernel,
 *   d^a/dz^a d^b/dv^b sum_{l<=L} z^l v^l / l!  at z, v,
 * summed with per-term magnitudes in log domain. a = b = 0 recovers the
 * kernel itself (with v = wbar).
 */
LogComplex kernel_derivative_log(std::complex<double> z, std::complex<double> v, int L, int a, int b) {
    const double az = std::abs(z), av = std::abs(v);
    const double argz = (az == 0.0) ? 0.0 : std::arg(z);
    const double argv = (av == 0.0) ? 0.0 : std::arg(v);
    const double lz = (az == 0.0) ? 0.0 : std::log(az);
    const double lv = (av == 0.0) ? 0.0 : std::log(av);

    // First pass: the largest term magnitude.
    double max_log = -std::numeric_limits<double>::infinity();
    for (int l = std::max(a, b); l <= L; ++l) {
        if (az == 0.0 && l != a) continue;
        if (av == 0.0 && l != b) continue;
        double lm = log_factorial(l) - log_factorial(l - a) - log_factorial(l - b) +
                    (l - a) * lz + (l - b) * lv;
        max_log = std::max(max_log, lm);
    }
    if (std::isinf(max_log)) return LogComplex::zero();

    // Second pass: scaled complex sum.
    std::complex<double> sum = 0.0;
    for (int l = std::max(a, b); l <= L; ++l) {
        if (az == 0.0 && l != a) continue;
        if (av == 0.0 && l != b) continue;
        double lm = log_factorial(l) - log_factorial(l - a) - log_factorial(l - b) +
                    (l - a) * lz + (l - b) * lv;
        double ph = (l - a) * argz + (l - b) * argv;
        sum += std::polar(std::exp(lm - max_log), ph);
    }
    if (sum == std::complex<double>(0.0, 0.0)) return LogComplex::zero();
    return LogComplex::from_polar(max_log + std::log(std::abs(sum)), std::arg(sum));
}

}  // namespace

LogComplex kernel_Kn_log(std::complex<double> z, std::complex<double> w, int n, int m) {
    if (n < 1 || m < 1) throw std::invalid_argument("kernel_Kn: need n >= 1, m >= 1");
    return kernel_derivative_log(z, std::conj(w), n + m - 1, 0, 0);
}

std::complex<double> kernel_Kn(std::complex<double> z, std::complex<double> w, int n, int m) {
    return kernel_Kn_log(z, w, n, m).value();
}

KernelMatrix kernel_matrix(std::span<const std::complex<double>> zs,
                           std::span<const std::complex<double>> ws, int n) {
    const int m = static_cast<int>(zs.size());
    if (m == 0 || ws.size() != zs.size()) {
        throw std::invalid_argument("kernel_matrix: point lists must be nonempty and equal-sized");
    }
    KernelMatrix km;
    km.n = n;
    km.m = m;
    km.scaled.resize(m, m);
    km.row_log_scale.resize(m);
    Eigen::MatrixXd logs(m, m);
    Eigen::MatrixXd args(m, m);
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
            LogComplex e = kernel_Kn_log(zs[j], ws[k], n, m);
            logs(j, k) = e.log_mag;
            args(j, k) = e.arg;
        }
        km.row_log_scale[j] = logs.row(j).maxCoeff();
        for (int k = 0; k < m; ++k) {
            km.scaled(j, k) = std::polar(std::exp(logs(j, k) - km.row_log_scale[j]), args(j, k));
        }
    }
    return km;
}

LogComplex KernelMatrix::log_det() const {
    Eigen::MatrixXcd work = scaled;
    LogComplex det = lu_log_det_inplace(work);
    if (det.is_zero()) return det;
    return LogComplex::from_polar(det.log_mag + row_log_scale.sum(), det.arg);
}

LogComplex av_correlation(std::span<const std::complex<double>> zs,
                          std::span<const std::complex<double>> ws, int n) {
    const int m = static_cast<int>(zs.size());
    if (m == 0 || ws.size() != zs.size()) {
        throw std::invalid_argument("av_correlation: point lists must be nonempty and equal-sized");
    }
    if (n < 1) throw std::invalid_argument("av_correlation: order must be >= 1");
    check_separation(zs, "z-list");
    check_separation(ws, "w-list");

    LogComplex det = kernel_matrix(zs, ws, n).log_det();
    if (det.is_zero()) return det;
    LogComplex dz = log_vandermonde(zs);
    LogComplex dw = log_vandermonde(ws);
    // Delta(w)^*: conjugation flips the phase.
    LogComplex dwc = LogComplex::from_polar(dw.log_mag, -dw.arg);
    return LogComplex::from_polar(det.log_mag + log_prefactor(n, m), det.arg) / (dz * dwc);
}

LogComplex av_confluent(std::span<const ConfluentPoint> points, int n) {
    if (points.empty()) throw std::invalid_argument("av_confluent: empty point list");
    if (n < 1) throw std::invalid_argument("av_confluent: order must be >= 1");
    int m = 0;
    for (const auto& g : points) {
        if (g.multiplicity < 1) throw std::invalid_argument("av_confluent: multiplicity must be >= 1");
        m += g.multiplicity;
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t i2 = i + 1; i2 < points.size(); ++i2) {
            if (points[i].point == points[i2].point) {
                throw std::invalid_argument("av_confluent: distinct groups share a point; merge them");
            }
        }
    }
    const int L = n + m - 1;

    // Row r = (group i, derivative a in z); column c = (group i2, derivative b
    // in wbar). Both lists are the same set of points (Hermitian case).
    struct RowId {
        int group;
        int order;
    };
    std::vector<RowId> ids;
    ids.reserve(m);
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        for (int a = 0; a < points[i].multiplicity; ++a) ids.push_back({i, a});
    }

    Eigen::MatrixXd logs(m, m), args(m, m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            std::complex<double> u = points[ids[r].group].point;
            std::complex<double> v = std::conj(points[ids[c].group].point);
            LogComplex e = kernel_derivative_log(u, v, L, ids[r].order, ids[c].order);
            logs(r, c) = e.log_mag;
            args(r, c) = e.arg;
        }
    }
    Eigen::MatrixXcd scaled(m, m);
    double scale_sum = 0.0;
    for (int r = 0; r < m; ++r) {
        double rs = logs.row(r).maxCoeff();
        if (std::isinf(rs)) return LogComplex::zero();  // a fully zero row
        scale_sum += rs;
        for (int c = 0; c < m; ++c) {
            scaled(r, c) = std::polar(std::exp(logs(r, c) - rs), args(r, c));
        }
    }
    LogComplex det = lu_log_det_inplace(scaled);
    if (det.is_zero()) return det;
    det = LogComplex::from_polar(det.log_mag + scale_sum, det.arg);

    // Confluent Vandermonde, squared across the z and wbar lists: the phases
    // of the cross differences cancel against their conjugates.
    double log_den = 0.0;
    for (const auto& g : points) {
        for (int t = 1; t < g.multiplicity; ++t) log_den += 2.0 * log_factorial(t);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t i2 = i + 1; i2 < points.size(); ++i2) {
            double d = std::abs(points[i2].point - points[i].point);
            log_den += 2.0 * points[i].multiplicity * points[i2].multiplicity * std::log(d);
        }
    }
    return LogComplex::from_polar(det.log_mag + log_prefactor(n, m) - log_den, det.arg);
}

namespace {

/// Group exactly-coinciding points; reject near-but-not-exact coincidences.
std::vector<ConfluentPoint> group_points(std::span<const std::complex<double>> pts) {
    std::vector<ConfluentPoint> groups;
    for (const auto& p : pts) {
        bool merged = false;
        for (auto& g : groups) {
            if (g.point == p) {
                ++g.multiplicity;
                merged = true;
                break;
            }
        }
        if (!merged) groups.push_back({p, 1});
    }
    return groups;
}

LogReal av_hermitian_log(std::span<const std::complex<double>> pts, int n) {
    auto groups = group_points(pts);
    LogComplex v;
    if (groups.size() == pts.size()) {
        v = av_correlation(pts, pts, n);
    } else {
        std::vector<std::complex<double>> reps;
        reps.reserve(groups.size());
        for (const auto& g : groups) reps.push_back(g.point);
        check_separation(reps, "merged");
        v = av_confluent(groups, n);
    }
    // E prod |det|^2 is real and nonnegative; the phase is numerical noise.
    return v.magnitude();
}

}  // namespace

LogReal ginue_Fm_scaled(const PointConfig& points) {
    points.validate();
    const int n = points.n;
    const int m = points.m();
    std::vector<std::complex<double>> xs = points.points();
    const double rn = std::sqrt(static_cast<double>(n));
    for (auto& x : xs) x *= rn;
    LogReal av = av_hermitian_log(xs, n);
    if (av.is_zero()) return av;
    const double log_n = std::log(static_cast<double>(n));
    return LogReal::from_log(av.log() - static_cast<double>(m) * n * log_n);
}

LogReal ginue_theorem_ratio_exact(const PointConfig& points) {
    points.validate();
    const int m = points.m();
    const int n = points.n;
    {
        double delta = confluence_threshold(points.zetas);
        for (int j = 0; j < m; ++j) {
            for (int k = j + 1; k < m; ++k) {
                if (std::abs(points.zetas[j] - points.zetas[k]) < delta) {
                    throw std::invalid_argument(
                        "ginue_theorem_ratio_exact: confluent zeta configuration rejected "
                        "(Vandermonde zero in the target)");
                }
            }
        }
    }
    // The ratio is symmetric in the zetas; evaluating at a canonical order
    // makes any permutation of the input bit-identical.
    PointConfig canonical = points;
    std::sort(canonical.zetas.begin(), canonical.zetas.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
              });
    LogReal num = ginue_Fm_scaled(canonical);
    std::vector<double> den_logs;
    den_logs.reserve(m);
    for (int j = 0; j < m; ++j) {
        PointConfig single{canonical.z0, {canonical.zetas[j]}, n};
        den_logs.push_back(ginue_Fm_scaled(single).log());
    }
    std::sort(den_logs.begin(), den_logs.end());
    double den = 0.0;
    for (double d : den_logs) den += d;
    const double log_n = std::log(static_cast<double>(n));
    return LogReal::from_log(num.log() - den - 0.5 * static_cast<double>(m) * (m - 1) * log_n);
}

}  // namespace gincorr
