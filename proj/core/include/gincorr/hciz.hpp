#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "gincorr/rng.hpp"

namespace gincorr {

/// Eigenvalues of two normal d x d matrices plus the scalar z of exp(z tr A U*BU).
struct HcizInput {
    std::vector<std::complex<double>> a_eigs;
    std::vector<std::complex<double>> b_eigs;
    std::complex<double> zscale{1.0, 0.0};

    int d() const { return static_cast<int>(a_eigs.size()); }
};

/**
 * Closed form of the unitary group integral
 *   int_U(d) exp(z tr A U* B U) dmu(U)
 *     = (prod_{j<d} j!) det(exp(z a_j b_k)) / (z^{(d^2-d)/2} Delta(A) Delta(B)).
 * Eigenvalues within each list must be pairwise separated by >= 1e-6 and
 * z must be nonzero for d >= 2.
 */
std::complex<double> hciz_closed_form(const HcizInput& input);

/**
 * Haar-distributed unitary via QR of a complex Gaussian matrix with the
 * R-diagonal phase correction.
 */
Eigen::MatrixXcd haar_sample_unitary(int d, RngStream& rng);
Eigen::MatrixXcd haar_sample_unitary(int d, std::uint64_t seed);

struct HcizMcResult {
    std::complex<double> mean;
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;

    /// Component-wise z-score against a reference value (0 se counts as exact).
    double z_score(std::complex<double> reference) const;
};

/// Sample mean of exp(z tr A U*BU) over Haar draws with per-component stderr.
HcizMcResult hciz_mc(const HcizInput& input, std::int64_t samples, std::uint64_t seed);

}  // namespace gincorr
