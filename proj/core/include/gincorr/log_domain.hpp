#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>

namespace gincorr {

/**
 * Nonnegative real number stored as its natural logarithm.
 *
 * Correlation-function magnitudes scale like exp(m*n*(|z0|^2 - 1)) and leave
 * the double range long before the interesting matrix orders are reached, so
 * every magnitude in this library lives in log domain from the moment it is
 * produced. Exact zero (a singular matrix draw) is represented as log = -inf.
 */
class LogReal {
public:
    LogReal() = default;  // zero

    static LogReal zero() { return LogReal{}; }
    static LogReal one() { return from_log(0.0); }
    static LogReal from_log(double lg) {
        LogReal v;
        v.log_ = lg;
        return v;
    }
    /// From a plain value; v must be >= 0.
    static LogReal from_value(double v) {
        return v > 0.0 ? from_log(std::log(v)) : zero();
    }

    bool is_zero() const { return std::isinf(log_) && log_ < 0.0; }
    /// Natural log of the magnitude; -inf when zero.
    double log() const { return log_; }
    /// exp(log()); may overflow/underflow, intended for small magnitudes only.
    double value() const { return std::exp(log_); }

    LogReal& operator*=(LogReal o) {
        log_ += o.log_;
        return *this;
    }
    LogReal& operator/=(LogReal o) {
        log_ -= o.log_;
        return *this;
    }
    friend LogReal operator*(LogReal a, LogReal b) { return a *= b; }
    friend LogReal operator/(LogReal a, LogReal b) { return a /= b; }

    LogReal pow(double e) const {
        if (is_zero()) return zero();
        return from_log(e * log_);
    }

    /// a + b without leaving log domain.
    friend LogReal log_add(LogReal a, LogReal b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        double hi = a.log_, lo = b.log_;
        if (hi < lo) std::swap(hi, lo);
        return from_log(hi + std::log1p(std::exp(lo - hi)));
    }

private:
    double log_ = -std::numeric_limits<double>::infinity();
};

/**
 * Complex value in polar log form: exp(log_mag) * exp(i*arg).
 * Used for determinant-ratio formulas whose magnitudes exceed double range
 * but whose phases stay perfectly representable.
 */
struct LogComplex {
    double log_mag = -std::numeric_limits<double>::infinity();
    double arg = 0.0;

    static LogComplex zero() { return {}; }
    static LogComplex one() { return {0.0, 0.0}; }
    static LogComplex from_polar(double log_mag, double arg) { return {log_mag, arg}; }
    static LogComplex from(std::complex<double> v) {
        double m = std::abs(v);
        if (m == 0.0) return zero();
        return {std::log(m), std::arg(v)};
    }

    bool is_zero() const { return std::isinf(log_mag) && log_mag < 0.0; }
    LogReal magnitude() const { return LogReal::from_log(log_mag); }
    std::complex<double> value() const { return std::polar(std::exp(log_mag), arg); }
    /// Phase as a unit complex number (1 for zero values).
    std::complex<double> phase() const { return is_zero() ? 1.0 : std::polar(1.0, arg); }

    friend LogComplex operator*(LogComplex a, LogComplex b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return {a.log_mag + b.log_mag, a.arg + b.arg};
    }
    friend LogComplex operator/(LogComplex a, LogComplex b) {
        if (a.is_zero()) return zero();
        return {a.log_mag - b.log_mag, a.arg - b.arg};
    }
};

/**
 * Streaming log-sum-exp accumulator.
 *
 * Maintains max M of the log terms seen so far and sum of exp(x - M),
 * rescaling when a new maximum arrives. Adding k copies of the same value v
 * yields log_mean() == v exactly: the scaled sum is the integer k and the
 * log(k) terms cancel bit-for-bit.
 */
class LogSumAccumulator {
public:
    /// Add one term given as its natural log (-inf for an exact zero term).
    void add(double log_term) {
        ++count_;
        if (std::isinf(log_term) && log_term < 0.0) return;
        if (log_term <= max_) {
            sum_ += std::exp(log_term - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        }
    }

    /// Merge another accumulator (deterministic for a fixed merge order).
    void merge(const LogSumAccumulator& o) {
        count_ += o.count_;
        if (o.empty_sum()) return;
        if (empty_sum()) {
            max_ = o.max_;
            sum_ = o.sum_;
            return;
        }
        if (o.max_ <= max_) {
            sum_ += o.sum_ * std::exp(o.max_ - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - o.max_) + o.sum_;
            max_ = o.max_;
        }
    }

    std::int64_t count() const { return count_; }
    bool all_zero() const { return empty_sum(); }

    /// log(sum of terms); -inf if all terms were zero.
    double log_sum() const {
        if (empty_sum()) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }
    /// log(mean of terms); -inf if all terms were zero.
    double log_mean() const {
        if (empty_sum()) return -std::numeric_limits<double>::infinity();
        return max_ + (std::log(sum_) - std::log(static_cast<double>(count_)));
    }
    double max_log() const { return max_; }

private:
    bool empty_sum() const { return std::isinf(max_) && max_ < 0.0; }

    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    std::int64_t count_ = 0;
};

/// log(sum_i exp(x_i)) over a span, accumulated in index order.
inline double log_sum_exp(std::span<const double> xs) {
    LogSumAccumulator acc;
    for (double x : xs) acc.add(x);
    return acc.log_sum();
}

}  // namespace gincorr
