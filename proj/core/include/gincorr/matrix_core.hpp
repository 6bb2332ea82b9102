#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>

#include "gincorr/entry_distribution.hpp"
#include "gincorr/log_domain.hpp"

namespace gincorr {

using ComplexMatrix = Eigen::MatrixXcd;

/**
 * Sample M = n^{-1/2} X with X_{jk} i.i.d. from the given law.
 * Deterministic for fixed (n, law, seed); entries are drawn row by row.
 */
ComplexMatrix sample_matrix(int n, const EntryDistribution& law, std::uint64_t seed);

/// Same, drawing from an existing stream (used by the MC engine).
void sample_matrix_into(ComplexMatrix& out, int n, const EntryDistribution& law, RngStream& rng);

/**
 * In-place LU with partial pivoting, accumulating the determinant in polar
 * log form (log|det| plus phase; row swaps contribute the sign). The raw
 * determinant value is never formed. Returns LogComplex::zero() when a pivot
 * is exactly zero. The matrix is destroyed.
 */
LogComplex lu_log_det_inplace(ComplexMatrix& a);

/**
 * log |det(M - zI)|^2 = 2 * sum_j log|u_jj| from LU with partial pivoting.
 * Exact singularity (a zero pivot) yields LogReal::zero(), never a crash.
 */
LogReal log_abs_det_sq(const ComplexMatrix& m, std::complex<double> z);

/// Scratch-buffer variant for hot loops; `work` is overwritten.
LogReal log_abs_det_sq(const ComplexMatrix& m, std::complex<double> z, ComplexMatrix& work);

/**
 * sum_j log |det(M - z_j I)|^2, one LU per z_j. Per-point terms are summed in
 * ascending order so that any permutation of zs gives a bit-identical result.
 * A zero flag on any factor makes the product zero.
 */
LogReal char_poly_log_product(const ComplexMatrix& m, std::span<const std::complex<double>> zs);

}  // namespace gincorr
