#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "gincorr/log_domain.hpp"
#include "gincorr/mc_engine.hpp"

namespace gincorr {

/**
 * Truncated exponential kernel K_n(z, w) = sum_{l=0}^{n+m-1} (z wbar)^l / l!,
 * with per-term magnitudes tracked in log domain so |z wbar| of order n does
 * not overflow.
 */
LogComplex kernel_Kn_log(std::complex<double> z, std::complex<double> w, int n, int m);

/// Value-domain convenience wrapper; the result itself must fit in a double.
std::complex<double> kernel_Kn(std::complex<double> z, std::complex<double> w, int n, int m);

/**
 * The m x m kernel matrix K_n(z_j, wbar_k) in row-scaled form: entry (j,k) is
 * exp(row_log_scale[j]) * scaled(j,k). With ws = zs it is a Gram matrix of
 * truncated-exponential feature maps, hence Hermitian positive semidefinite.
 */
struct KernelMatrix {
    Eigen::MatrixXcd scaled;
    Eigen::VectorXd row_log_scale;
    int n = 0;
    int m = 0;

    /// Determinant in polar log form (LU on the scaled matrix).
    LogComplex log_det() const;
};

KernelMatrix kernel_matrix(std::span<const std::complex<double>> zs,
                           std::span<const std::complex<double>> ws, int n);

/**
 * Exact GinUE correlation for unnormalized X with i.i.d. standard complex
 * Gaussian entries:
 *
 *   E prod_j det(X - z_j) det(X - w_j)^*
 *     = (prod_{l=n}^{n+m-1} l!) det(K_n(z_j, wbar_k)) / (Delta(z) Delta(w)^*)
 *
 * Points within each list must be pairwise separated by at least
 * delta = 1e-6 * (1 + max|point|); closer configurations are rejected and
 * belong to av_confluent.
 */
LogComplex av_correlation(std::span<const std::complex<double>> zs,
                          std::span<const std::complex<double>> ws, int n);

/// A point of the z-list together with its multiplicity.
struct ConfluentPoint {
    std::complex<double> point;
    int multiplicity = 1;
};

/**
 * Confluent limit of av_correlation with ws = zs as points of equal value
 * merge. Repeated rows/columns of the kernel matrix become exact derivative
 * rows/columns of the polynomial kernel, and the Vandermonde denominator
 * becomes the confluent one (cross differences to the power of multiplicity
 * products, times 1! 2! ... (p-1)! per merged group, squared across the two
 * lists).
 */
LogComplex av_confluent(std::span<const ConfluentPoint> points, int n);

/**
 * F_m for M = X/sqrt(n) with Gaussian entries at the PointConfig's effective
 * points: av_correlation (or av_confluent when points coincide exactly)
 * evaluated at sqrt(n) z_j, times n^{-mn}, all in log domain.
 */
LogReal ginue_Fm_scaled(const PointConfig& points);

/**
 * Exact finite-n value of n^{-(m^2-m)/2} F_m(Z) / (F_1(z_1) ... F_1(z_m)) for
 * the Gaussian ensemble. Requires pairwise distinct zetas; m = 1 gives
 * exactly one.
 */
LogReal ginue_theorem_ratio_exact(const PointConfig& points);

}  // namespace gincorr
