#include "gincorr/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gincorr {

ComplexMatrix sample_matrix(int n, const EntryDistribution& law, std::uint64_t seed) {
    RngStream rng(seed);
    ComplexMatrix m;
    sample_matrix_into(m, n, law, rng);
    return m;
}

void sample_matrix_into(ComplexMatrix& out, int n, const EntryDistribution& law, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("sample_matrix: order must be >= 1");
    out.resize(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            out(j, k) = scale * sample_entry(law, rng);
        }
    }
}

LogComplex lu_log_det_inplace(ComplexMatrix& a) {
    const Eigen::Index n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("lu_log_det: matrix must be square");
    double log_mag = 0.0;
    double arg = 0.0;
    int swaps = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot = k;
        double best = std::norm(a(k, k));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            double v = std::norm(a(i, k));
            if (v > best) {
                best = v;
                pivot = i;
            }
        }
        if (best == 0.0) return LogComplex::zero();
        if (pivot != k) {
            a.row(k).swap(a.row(pivot));
            ++swaps;
        }
        const std::complex<double> akk = a(k, k);
        log_mag += std::log(std::abs(akk));
        arg += std::arg(akk);
        if (k + 1 < n) {
            const Eigen::Index rest = n - k - 1;
            a.col(k).tail(rest) /= akk;
            for (Eigen::Index j = k + 1; j < n; ++j) {
                const std::complex<double> akj = a(k, j);
                if (akj != std::complex<double>(0.0, 0.0)) {
                    a.col(j).tail(rest) -= akj * a.col(k).tail(rest);
                }
            }
        }
    }
    if (swaps & 1) arg += std::numbers::pi;
    return LogComplex::from_polar(log_mag, arg);
}

LogReal log_abs_det_sq(const ComplexMatrix& m, std::complex<double> z, ComplexMatrix& work) {
    work = m;
    work.diagonal().array() -= z;
    LogComplex det = lu_log_det_inplace(work);
    if (det.is_zero()) return LogReal::zero();
    return LogReal::from_log(2.0 * det.log_mag);
}

LogReal log_abs_det_sq(const ComplexMatrix& m, std::complex<double> z) {
    ComplexMatrix work;
    return log_abs_det_sq(m, z, work);
}

LogReal char_poly_log_product(const ComplexMatrix& m, std::span<const std::complex<double>> zs) {
    if (zs.empty()) throw std::invalid_argument("char_poly_log_product: empty point list");
    ComplexMatrix work;
    std::vector<double> terms;
    terms.reserve(zs.size());
    for (const auto& z : zs) {
        LogReal t = log_abs_det_sq(m, z, work);
        if (t.is_zero()) return LogReal::zero();
        terms.push_back(t.log());
    }
    std::sort(terms.begin(), terms.end());
    double total = 0.0;
    for (double t : terms) total += t;
    return LogReal::from_log(total);
}

}  // namespace gincorr
