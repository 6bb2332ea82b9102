#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gincorr/rng.hpp"

namespace gincorr {

enum class EntryKind {
    ComplexGaussian,   // standard complex Gaussian, kappa22 = 0
    UniformPhase,      // |x| = 1, uniform argument, kappa22 = -1
    FourPointLattice,  // uniform on {1, -1, i, -i}, kappa22 = -1
    RadialTwoPoint,    // |x|^2 = 1/q with prob q else 0, uniform phase; kappa22 = 1/q - 2
};

/**
 * A complex entry law with E x = E x^2 = 0 and E|x|^2 = 1.
 *
 * All kinds have a phase-invariant law (the argument of x is uniform or a
 * lattice rotation), which makes the first two moment conditions automatic;
 * the radial law alone sets the fourth cumulant kappa22 = E|x|^4 - 2.
 */
struct EntryDistribution {
    EntryKind kind = EntryKind::ComplexGaussian;
    double q = 1.0;  // RadialTwoPoint only: P(|x|^2 = 1/q) = q, q in (0,1]

    static EntryDistribution complex_gaussian() { return {EntryKind::ComplexGaussian, 1.0}; }
    static EntryDistribution uniform_phase() { return {EntryKind::UniformPhase, 1.0}; }
    static EntryDistribution four_point_lattice() { return {EntryKind::FourPointLattice, 1.0}; }
    static EntryDistribution radial_two_point(double q);

    std::string label() const;
    /// Parse a label of the form "complex-gaussian", "radial-two-point(0.25)", ...
    static std::optional<EntryDistribution> from_label(const std::string& label);
};

/// One draw from the law; advances the stream deterministically.
std::complex<double> sample_entry(const EntryDistribution& law, RngStream& rng);

/// Analytic kappa_{2,2} = E|x|^4 - 2.
double cumulant_22(const EntryDistribution& law);

/// Analytic absolute moment E|x|^k, k >= 0.
double absolute_moment(const EntryDistribution& law, int k);

struct CumulantSet {
    double kappa22 = 0.0;
    std::vector<double> absolute_moments;  // E|x|^k for k = 1..2m
};

/// kappa22 plus the absolute moments up to order 2m.
CumulantSet cumulant_set(const EntryDistribution& law, int m);

/// Empirical moment with its CLT standard error and the analytic target.
struct MomentCheck {
    std::string name;
    double empirical = 0.0;
    double std_error = 0.0;  // 0 for deterministic statistics
    double required = 0.0;
    /// Deviation in units of the standard error (inf if se == 0 and off target).
    double sigmas() const;
    bool within(double n_sigma) const;
};

struct MomentReport {
    EntryDistribution law;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    // Re/Im of E x and E x^2 are tracked as separate scalar checks.
    std::vector<MomentCheck> checks;
    std::vector<std::string> flagged;  // names of checks beyond 4 standard errors
    bool all_within(double n_sigma) const;
};

/**
 * Empirical E x, E x^2, E|x|^2, E|x|^4 with standard errors.
 * Flags any moment deviating from its analytic value by > 4 standard errors.
 */
MomentReport verify_moment_conditions(const EntryDistribution& law, std::int64_t samples,
                                      std::uint64_t seed);

}  // namespace gincorr
