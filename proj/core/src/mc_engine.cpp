#include "gincorr/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gincorr/matrix_core.hpp"

namespace gincorr {

std::vector<std::complex<double>> PointConfig::points() const {
    std::vector<std::complex<double>> ps(zetas.size());
    const double rn = std::sqrt(static_cast<double>(n));
    for (std::size_t j = 0; j < zetas.size(); ++j) ps[j] = z0 + zetas[j] / rn;
    return ps;
}

void PointConfig::validate() const {
    if (n < 1) throw std::invalid_argument("PointConfig: order n must be >= 1");
    if (zetas.empty()) throw std::invalid_argument("PointConfig: need at least one zeta");
    if (std::abs(z0) >= 1.0) {
        throw std::invalid_argument("PointConfig: z0 must be in the bulk (|z0| < 1)");
    }
}

std::int64_t MCConfig::effective_chunk_size() const {
    std::int64_t cs = chunk_size > 0 ? chunk_size : 10000;
    // At least two chunks so the jackknife is defined.
    std::int64_t max_cs = std::max<std::int64_t>(1, (samples + 1) / 2);
    return std::min(cs, max_cs);
}

std::int64_t MCConfig::chunk_count() const {
    std::int64_t cs = effective_chunk_size();
    return (samples + cs - 1) / cs;
}

std::int64_t MCConfig::effective_samples() const { return chunk_count() * effective_chunk_size(); }

int default_worker_count() {
    if (const char* env = std::getenv("GINCORR_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

void validate_mc(const MCConfig& config) {
    if (config.n < 1) throw std::invalid_argument("MCConfig: order n must be >= 1");
    if (config.samples < 100) throw std::invalid_argument("MCConfig: need >= 100 samples");
    config.points.validate();
    if (config.points.n != config.n) {
        throw std::invalid_argument("MCConfig: points.n must match the matrix order n");
    }
}

/**
 * Evaluate per-sample statistics chunk by chunk. `eval` receives the rng
 * stream for the chunk and a span of per-statistic output rows (each of
 * length chunk_size) to fill. Chunks run on `workers` threads but are merged
 * in index order, so the result is independent of the worker count.
 */
struct ChunkedRun {
    std::vector<LogSumAccumulator> chunk_acc;          // [chunk * nstats + s]
    std::vector<std::vector<double>> sample_logs;      // [stat][global sample]
    std::int64_t chunk_size = 0;
    std::int64_t chunks = 0;
    int nstats = 0;
};

template <typename PerSample>
ChunkedRun run_chunks(const MCConfig& config, int nstats, PerSample per_sample) {
    ChunkedRun run;
    run.chunk_size = config.effective_chunk_size();
    run.chunks = config.chunk_count();
    run.nstats = nstats;
    run.chunk_acc.assign(static_cast<std::size_t>(run.chunks) * nstats, {});
    run.sample_logs.assign(nstats, std::vector<double>(run.chunks * run.chunk_size));

    int workers = config.workers > 0 ? config.workers : default_worker_count();
    workers = static_cast<int>(std::min<std::int64_t>(workers, run.chunks));

    std::atomic<std::int64_t> next_chunk{0};
    auto worker_fn = [&]() {
        ComplexMatrix matrix, work;
        std::vector<double> stat_row(nstats);
        for (;;) {
            std::int64_t c = next_chunk.fetch_add(1);
            if (c >= run.chunks) break;
            RngStream rng(config.seed, static_cast<std::uint64_t>(c));
            for (std::int64_t i = 0; i < run.chunk_size; ++i) {
                sample_matrix_into(matrix, config.n, config.dist, rng);
                per_sample(matrix, work, stat_row);
                std::int64_t g = c * run.chunk_size + i;
                for (int s = 0; s < nstats; ++s) {
                    run.sample_logs[s][g] = stat_row[s];
                    run.chunk_acc[c * nstats + s].add(stat_row[s]);
                }
            }
        }
    };

    if (workers <= 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker_fn);
        for (auto& th : pool) th.join();
    }
    return run;
}

/// Merge the chunk accumulators of one statistic in chunk order.
LogSumAccumulator merge_all(const ChunkedRun& run, int stat) {
    LogSumAccumulator total;
    for (std::int64_t c = 0; c < run.chunks; ++c) total.merge(run.chunk_acc[c * run.nstats + stat]);
    return total;
}

/// Same, skipping one chunk (for the jackknife).
LogSumAccumulator merge_without(const ChunkedRun& run, int stat, std::int64_t skip) {
    LogSumAccumulator total;
    for (std::int64_t c = 0; c < run.chunks; ++c) {
        if (c != skip) total.merge(run.chunk_acc[c * run.nstats + stat]);
    }
    return total;
}

/// Jackknife standard error from delete-one replicates.
double jackknife_from_replicates(std::span<const double> theta) {
    const std::int64_t c = static_cast<std::int64_t>(theta.size());
    if (c < 2) return 0.0;
    double mean = 0.0;
    std::int64_t finite = 0;
    for (double t : theta) {
        if (std::isfinite(t)) {
            mean += t;
            ++finite;
        }
    }
    if (finite < static_cast<std::int64_t>(theta.size())) {
        return std::numeric_limits<double>::infinity();
    }
    mean /= static_cast<double>(c);
    double ss = 0.0;
    for (double t : theta) ss += (t - mean) * (t - mean);
    return std::sqrt(static_cast<double>(c - 1) / static_cast<double>(c) * ss);
}

TailDiagnostics tail_diagnostics(const std::vector<double>& logs, double log_sum_total) {
    TailDiagnostics d;
    if (logs.empty() || std::isinf(log_sum_total)) return d;
    std::vector<double> sorted = logs;
    std::size_t k = std::max<std::size_t>(1, (logs.size() + 99) / 100);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     sorted.end(), std::greater<double>());
    LogSumAccumulator top;
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        top.add(sorted[i]);
        max_log = std::max(max_log, sorted[i]);
    }
    d.top1pct_mass_fraction = std::exp(top.log_sum() - log_sum_total);
    d.max_sample_fraction = std::exp(max_log - log_sum_total);
    d.variance_unreliable = d.max_sample_fraction > 0.2;
    return d;
}

/// Worst-case fractions across the statistics of a run.
TailDiagnostics worst_tail(const ChunkedRun& run, std::span<const double> stat_log_sums) {
    TailDiagnostics worst;
    for (int s = 0; s < run.nstats; ++s) {
        TailDiagnostics d = tail_diagnostics(run.sample_logs[s], stat_log_sums[s]);
        worst.max_sample_fraction = std::max(worst.max_sample_fraction, d.max_sample_fraction);
        worst.top1pct_mass_fraction = std::max(worst.top1pct_mass_fraction, d.top1pct_mass_fraction);
        worst.variance_unreliable = worst.variance_unreliable || d.variance_unreliable;
    }
    return worst;
}

}  // namespace

MCEstimate estimate_Fm(const MCConfig& config) {
    validate_mc(config);
    auto points = config.points.points();

    ChunkedRun run = run_chunks(config, 1, [&](const ComplexMatrix& m, ComplexMatrix& work,
                                               std::vector<double>& out) {
        std::vector<double> terms(points.size());
        bool zero = false;
        for (std::size_t j = 0; j < points.size(); ++j) {
            LogReal t = log_abs_det_sq(m, points[j], work);
            if (t.is_zero()) {
                zero = true;
                break;
            }
            terms[j] = t.log();
        }
        if (zero) {
            out[0] = -std::numeric_limits<double>::infinity();
            return;
        }
        std::sort(terms.begin(), terms.end());
        double total = 0.0;
        for (double t : terms) total += t;
        out[0] = total;
    });

    LogSumAccumulator total = merge_all(run, 0);
    MCEstimate est;
    est.log_mean = total.all_zero() ? LogReal::zero() : LogReal::from_log(total.log_mean());
    est.samples = run.chunks * run.chunk_size;
    est.seed = config.seed;
    est.zero_samples = 0;
    for (double v : run.sample_logs[0]) {
        if (std::isinf(v) && v < 0.0) ++est.zero_samples;
    }
    est.degenerate = total.all_zero();
    if (!est.degenerate) {
        std::vector<double> theta(run.chunks);
        for (std::int64_t c = 0; c < run.chunks; ++c) {
            theta[c] = merge_without(run, 0, c).log_mean();
        }
        est.stderr_log = jackknife_from_replicates(theta);
        double ls = total.log_sum();
        est.tail = worst_tail(run, std::span<const double>(&ls, 1));
    }
    return est;
}

MCEstimate estimate_theorem_ratio(const MCConfig& config) {
    validate_mc(config);
    const int m = config.points.m();
    if (m < 2) throw std::invalid_argument("estimate_theorem_ratio: need m >= 2");
    {
        double mx = 0.0;
        for (const auto& zt : config.points.zetas) mx = std::max(mx, std::abs(zt));
        double delta = 1e-6 * (1.0 + mx);
        for (int j = 0; j < m; ++j) {
            for (int k = j + 1; k < m; ++k) {
                if (std::abs(config.points.zetas[j] - config.points.zetas[k]) < delta) {
                    throw std::invalid_argument(
                        "estimate_theorem_ratio: confluent zeta configuration rejected "
                        "(Vandermonde zero in the target)");
                }
            }
        }
    }
    auto points = config.points.points();

    // Statistic 0 is the F_m product; statistics 1..m are the F_1 factors,
    // all evaluated on the same matrix draw (common random numbers).
    ChunkedRun run = run_chunks(config, m + 1, [&](const ComplexMatrix& mat, ComplexMatrix& work,
                                                   std::vector<double>& out) {
        std::vector<double> terms(m);
        bool zero = false;
        for (int j = 0; j < m; ++j) {
            LogReal t = log_abs_det_sq(mat, points[j], work);
            if (t.is_zero()) {
                zero = true;
                break;
            }
            terms[j] = t.log();
        }
        if (zero) {
            std::fill(out.begin(), out.end(), -std::numeric_limits<double>::infinity());
            return;
        }
        for (int j = 0; j < m; ++j) out[1 + j] = terms[j];
        std::sort(terms.begin(), terms.end());
        double total = 0.0;
        for (double t : terms) total += t;
        out[0] = total;
    });

    const double log_n = std::log(static_cast<double>(config.n));
    const double shift = -0.5 * static_cast<double>(m) * (m - 1) * log_n;

    auto ratio_log = [&](std::int64_t skip) -> double {
        LogSumAccumulator num = skip < 0 ? merge_all(run, 0) : merge_without(run, 0, skip);
        if (num.all_zero()) return -std::numeric_limits<double>::infinity();
        std::vector<double> dens(m);
        for (int j = 0; j < m; ++j) {
            LogSumAccumulator den = skip < 0 ? merge_all(run, 1 + j) : merge_without(run, 1 + j, skip);
            if (den.all_zero()) return std::numeric_limits<double>::quiet_NaN();
            dens[j] = den.log_mean();
        }
        std::sort(dens.begin(), dens.end());
        double den_total = 0.0;
        for (double d : dens) den_total += d;
        return num.log_mean() - den_total + shift;
    };

    MCEstimate est;
    est.samples = run.chunks * run.chunk_size;
    est.seed = config.seed;
    for (double v : run.sample_logs[0]) {
        if (std::isinf(v) && v < 0.0) ++est.zero_samples;
    }
    double full = ratio_log(-1);
    est.degenerate = !std::isfinite(full);
    est.log_mean = est.degenerate ? LogReal::zero() : LogReal::from_log(full);
    if (!est.degenerate) {
        std::vector<double> theta(run.chunks);
        for (std::int64_t c = 0; c < run.chunks; ++c) theta[c] = ratio_log(c);
        est.stderr_log = jackknife_from_replicates(theta);
        std::vector<double> sums(m + 1);
        for (int s = 0; s <= m; ++s) sums[s] = merge_all(run, s).log_sum();
        est.tail = worst_tail(run, sums);
    }
    return est;
}

double jackknife_error(std::span<const double> chunk_log_means) {
    const std::int64_t c = static_cast<std::int64_t>(chunk_log_means.size());
    if (c < 2) throw std::invalid_argument("jackknife_error: need >= 2 chunks");
    std::vector<double> theta(c);
    for (std::int64_t i = 0; i < c; ++i) {
        LogSumAccumulator acc;
        for (std::int64_t j = 0; j < c; ++j) {
            if (j != i) acc.add(chunk_log_means[j]);
        }
        theta[i] = acc.log_mean();
    }
    return jackknife_from_replicates(theta);
}

}  // namespace gincorr
