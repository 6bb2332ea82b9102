#include "gincorr/hciz.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gincorr/matrix_core.hpp"

namespace gincorr {

namespace {

void check_distinct(const std::vector<std::complex<double>>& eigs, const char* which) {
    for (std::size_t j = 0; j < eigs.size(); ++j) {
        for (std::size_t k = j + 1; k < eigs.size(); ++k) {
            if (std::abs(eigs[j] - eigs[k]) < 1e-6) {
                throw std::invalid_argument(std::string("hciz_closed_form: ") + which + " eigenvalues " +
                                            std::to_string(j) + " and " + std::to_string(k) +
                                            " are degenerate (separation < 1e-6)");
            }
        }
    }
}

std::complex<double> vandermonde(const std::vector<std::complex<double>>& eigs) {
    std::complex<double> p{1.0, 0.0};
    for (std::size_t j = 0; j < eigs.size(); ++j) {
        for (std::size_t k = 0; k < j; ++k) p *= eigs[j] - eigs[k];
    }
    return p;
}

}  // namespace

std::complex<double> hciz_closed_form(const HcizInput& input) {
    const int d = input.d();
    if (d < 1 || input.b_eigs.size() != input.a_eigs.size()) {
        throw std::invalid_argument("hciz_closed_form: eigenvalue lists must be nonempty and equal-sized");
    }
    if (d == 1) return std::exp(input.zscale * input.a_eigs[0] * input.b_eigs[0]);
    if (input.zscale == std::complex<double>(0.0, 0.0)) {
        throw std::invalid_argument("hciz_closed_form: z must be nonzero for d >= 2");
    }
    check_distinct(input.a_eigs, "A");
    check_distinct(input.b_eigs, "B");

    Eigen::MatrixXcd e(d, d);
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            e(j, k) = std::exp(input.zscale * input.a_eigs[j] * input.b_eigs[k]);
        }
    }
    std::complex<double> det = lu_log_det_inplace(e).value();

    double prefactor = 1.0;
    for (int j = 1; j < d; ++j) prefactor *= std::tgamma(static_cast<double>(j) + 1.0);

    std::complex<double> zpow{1.0, 0.0};
    for (int p = 0; p < d * (d - 1) / 2; ++p) zpow *= input.zscale;

    return prefactor * det / (zpow * vandermonde(input.a_eigs) * vandermonde(input.b_eigs));
}

Eigen::MatrixXcd haar_sample_unitary(int d, RngStream& rng) {
    if (d < 1) throw std::invalid_argument("haar_sample_unitary: need d >= 1");
    Eigen::MatrixXcd a(d, d);
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) a(j, k) = rng.gaussian_complex();
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR();
    // Fix the per-column phase ambiguity: U = Q diag(r_jj / |r_jj|) is Haar.
    for (int j = 0; j < d; ++j) {
        std::complex<double> rjj = r(j, j);
        double mag = std::abs(rjj);
        q.col(j) *= (mag == 0.0) ? std::complex<double>(1.0, 0.0) : rjj / mag;
    }
    return q;
}

Eigen::MatrixXcd haar_sample_unitary(int d, std::uint64_t seed) {
    RngStream rng(seed);
    return haar_sample_unitary(d, rng);
}

double HcizMcResult::z_score(std::complex<double> reference) const {
    double dre = std::abs(mean.real() - reference.real());
    double dim = std::abs(mean.imag() - reference.imag());
    double zre = stderr_re == 0.0 ? (dre == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                  : dre / stderr_re;
    double zim = stderr_im == 0.0 ? (dim == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                  : dim / stderr_im;
    return std::max(zre, zim);
}

HcizMcResult hciz_mc(const HcizInput& input, std::int64_t samples, std::uint64_t seed) {
    const int d = input.d();
    if (d < 1 || input.b_eigs.size() != input.a_eigs.size()) {
        throw std::invalid_argument("hciz_mc: eigenvalue lists must be nonempty and equal-sized");
    }
    if (samples < 1000) throw std::invalid_argument("hciz_mc: need >= 1e3 samples");

    RngStream rng(seed);
    // Welford per component: exact zero stderr for constant integrands (d = 1
    // or z = 0).
    double mean_re = 0.0, mean_im = 0.0, m2_re = 0.0, m2_im = 0.0;
    Eigen::MatrixXcd u;
    for (std::int64_t i = 0; i < samples; ++i) {
        u = haar_sample_unitary(d, rng);
        // tr(A U* B U) = sum_j a_j sum_k b_k w_kj, w_kj = |u_kj|^2 normalized
        // per column (the column sums are exactly one for a unitary).
        std::complex<double> tr{0.0, 0.0};
        for (int j = 0; j < d; ++j) {
            std::complex<double> col{0.0, 0.0};
            double wsum = 0.0;
            for (int k = 0; k < d; ++k) wsum += std::norm(u(k, j));
            for (int k = 0; k < d; ++k) col += input.b_eigs[k] * (std::norm(u(k, j)) / wsum);
            tr += input.a_eigs[j] * col;
        }
        std::complex<double> v = std::exp(input.zscale * tr);
        double n1 = static_cast<double>(i + 1);
        double dre = v.real() - mean_re;
        mean_re += dre / n1;
        m2_re += dre * (v.real() - mean_re);
        double dim = v.imag() - mean_im;
        mean_im += dim / n1;
        m2_im += dim * (v.imag() - mean_im);
    }

    HcizMcResult res;
    res.mean = {mean_re, mean_im};
    double n = static_cast<double>(samples);
    res.stderr_re = m2_re > 0.0 ? std::sqrt(m2_re / ((n - 1.0) * n)) : 0.0;
    res.stderr_im = m2_im > 0.0 ? std::sqrt(m2_im / ((n - 1.0) * n)) : 0.0;
    res.samples = samples;
    res.seed = seed;
    return res;
}

}  // namespace gincorr
