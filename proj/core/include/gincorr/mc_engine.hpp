#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "gincorr/entry_distribution.hpp"
#include "gincorr/log_domain.hpp"

namespace gincorr {

/**
 * Spectral-parameter configuration: effective points z_j = z0 + zeta_j / sqrt(n)
 * with z0 in the bulk (|z0| < 1).
 */
struct PointConfig {
    std::complex<double> z0;
    std::vector<std::complex<double>> zetas;
    int n = 0;

    int m() const { return static_cast<int>(zetas.size()); }
    std::vector<std::complex<double>> points() const;
    /// Throws std::invalid_argument unless |z0| < 1, n >= 1, m >= 1.
    void validate() const;
};

struct MCConfig {
    int n = 0;
    std::int64_t samples = 0;
    std::int64_t chunk_size = 10000;
    std::uint64_t seed = 0;
    EntryDistribution dist;
    PointConfig points;
    int workers = 0;  // 0 = default_worker_count()

    /// Chunk size after clamping so that at least two chunks exist.
    std::int64_t effective_chunk_size() const;
    std::int64_t chunk_count() const;
    /// Requested samples rounded up to a whole number of chunks.
    std::int64_t effective_samples() const;
};

/// Heavy-tail diagnostics of a log-sum-exp mean.
struct TailDiagnostics {
    double top1pct_mass_fraction = 0.0;  // share of the mean in the top 1% of samples
    double max_sample_fraction = 0.0;    // share of the mean in the single largest sample
    bool variance_unreliable = false;    // max_sample_fraction > 0.2
};

struct MCEstimate {
    LogReal log_mean;          // the estimate (log domain)
    double stderr_log = 0.0;   // delete-one-chunk jackknife se of the log estimate
    std::int64_t samples = 0;  // effective sample count
    std::uint64_t seed = 0;
    std::int64_t zero_samples = 0;  // draws whose product carried the zero flag
    bool degenerate = false;        // every sample was zero
    TailDiagnostics tail;
};

/// Worker count from GINCORR_THREADS, else hardware concurrency.
int default_worker_count();

/**
 * Monte Carlo estimate of F_m at the configured points: the log-domain sample
 * mean of exp(sum_j log|det(M - z_j)|^2) over matrix draws.
 *
 * Chunks are mapped to rng substreams keyed by (seed, chunk index) and merged
 * in chunk order, so results are bit-identical for any worker count.
 */
MCEstimate estimate_Fm(const MCConfig& config);

/**
 * Common-random-numbers estimate of
 *   n^{-(m^2-m)/2} F_m(Z) / (F_1(z_1) ... F_1(z_m)),
 * with the numerator and every denominator factor averaged over the same
 * matrix samples and the ratio formed in log domain. Requires m >= 2 and
 * pairwise distinct zetas (the Vandermonde in the prediction vanishes
 * otherwise). The jackknife is over chunks on the full log-ratio statistic.
 */
MCEstimate estimate_theorem_ratio(const MCConfig& config);

/**
 * Delete-one-chunk jackknife standard error of the log-domain mean of the
 * given equal-weight chunk log-means. For two chunks a, b this is |a - b|/2.
 */
double jackknife_error(std::span<const double> chunk_log_means);

}  // namespace gincorr
