#include "gincorr/entry_distribution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gincorr {

EntryDistribution EntryDistribution::radial_two_point(double q) {
    if (!(q > 0.0 && q <= 1.0)) {
        throw std::invalid_argument("radial-two-point: q must be in (0, 1], got " + std::to_string(q));
    }
    return {EntryKind::RadialTwoPoint, q};
}

std::string EntryDistribution::label() const {
    switch (kind) {
        case EntryKind::ComplexGaussian: return "complex-gaussian";
        case EntryKind::UniformPhase: return "uniform-phase";
        case EntryKind::FourPointLattice: return "four-point-lattice";
        case EntryKind::RadialTwoPoint: return "radial-two-point(" + std::to_string(q) + ")";
    }
    return "unknown";
}

std::optional<EntryDistribution> EntryDistribution::from_label(const std::string& label) {
    if (label == "complex-gaussian") return complex_gaussian();
    if (label == "uniform-phase") return uniform_phase();
    if (label == "four-point-lattice") return four_point_lattice();
    const std::string prefix = "radial-two-point(";
    if (label.rfind(prefix, 0) == 0 && label.back() == ')') {
        try {
            double q = std::stod(label.substr(prefix.size(), label.size() - prefix.size() - 1));
            return radial_two_point(q);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::complex<double> sample_entry(const EntryDistribution& law, RngStream& rng) {
    switch (law.kind) {
        case EntryKind::ComplexGaussian:
            return rng.gaussian_complex();
        case EntryKind::UniformPhase:
            return rng.uniform_phase();
        case EntryKind::FourPointLattice: {
            static constexpr std::complex<double> support[4] = {
                {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
            return support[rng.uniform_below(4)];
        }
        case EntryKind::RadialTwoPoint: {
            // Draw the phase unconditionally to keep the stream advance
            // independent of the radial outcome.
            std::complex<double> phase = rng.uniform_phase();
            double u = rng.uniform01();
            if (u < law.q) return phase / std::sqrt(law.q);
            return {0.0, 0.0};
        }
    }
    throw std::logic_error("sample_entry: unknown kind");
}

double cumulant_22(const EntryDistribution& law) {
    return absolute_moment(law, 4) - 2.0;
}

double absolute_moment(const EntryDistribution& law, int k) {
    if (k < 0) throw std::invalid_argument("absolute_moment: k must be >= 0");
    if (k == 0) return 1.0;
    switch (law.kind) {
        case EntryKind::ComplexGaussian:
            // |x|^2 ~ Exp(1), so E|x|^k = Gamma(k/2 + 1).
            return std::tgamma(0.5 * k + 1.0);
        case EntryKind::UniformPhase:
        case EntryKind::FourPointLattice:
            return 1.0;
        case EntryKind::RadialTwoPoint:
            // E|x|^k = q * q^{-k/2}
            return std::pow(law.q, 1.0 - 0.5 * k);
    }
    throw std::logic_error("absolute_moment: unknown kind");
}

CumulantSet cumulant_set(const EntryDistribution& law, int m) {
    if (m < 1) throw std::invalid_argument("cumulant_set: m must be >= 1");
    CumulantSet cs;
    cs.kappa22 = cumulant_22(law);
    cs.absolute_moments.reserve(2 * m);
    for (int k = 1; k <= 2 * m; ++k) cs.absolute_moments.push_back(absolute_moment(law, k));
    return cs;
}

double MomentCheck::sigmas() const {
    double dev = std::abs(empirical - required);
    if (std_error == 0.0) return dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return dev / std_error;
}

bool MomentCheck::within(double n_sigma) const { return sigmas() <= n_sigma; }

bool MomentReport::all_within(double n_sigma) const {
    for (const auto& c : checks) {
        if (!c.within(n_sigma)) return false;
    }
    return true;
}

namespace {

// Welford accumulator. Keeps the mean exact for a constant input sequence, so
// deterministic-modulus laws report a genuinely zero standard error.
struct RunningMoment {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double std_error() const {
        if (n < 2 || m2 <= 0.0) return 0.0;
        return std::sqrt(m2 / (static_cast<double>(n - 1) * static_cast<double>(n)));
    }
    MomentCheck check(std::string name, double required) const {
        return {std::move(name), mean, std_error(), required};
    }
};

}  // namespace

MomentReport verify_moment_conditions(const EntryDistribution& law, std::int64_t samples,
                                      std::uint64_t seed) {
    if (samples < 1000) throw std::invalid_argument("verify_moment_conditions: need >= 1e3 samples");
    RngStream rng(seed);

    RunningMoment re_x, im_x, re_x2, im_x2, abs2, abs4;
    for (std::int64_t i = 0; i < samples; ++i) {
        std::complex<double> x = sample_entry(law, rng);
        std::complex<double> x2 = x * x;
        double a2 = std::norm(x);
        re_x.add(x.real());
        im_x.add(x.imag());
        re_x2.add(x2.real());
        im_x2.add(x2.imag());
        abs2.add(a2);
        abs4.add(a2 * a2);
    }

    MomentReport rep;
    rep.law = law;
    rep.samples = samples;
    rep.seed = seed;
    rep.checks.push_back(re_x.check("Re E[x]", 0.0));
    rep.checks.push_back(im_x.check("Im E[x]", 0.0));
    rep.checks.push_back(re_x2.check("Re E[x^2]", 0.0));
    rep.checks.push_back(im_x2.check("Im E[x^2]", 0.0));
    rep.checks.push_back(abs2.check("E|x|^2", 1.0));
    rep.checks.push_back(abs4.check("E|x|^4", absolute_moment(law, 4)));
    for (const auto& c : rep.checks) {
        if (!c.within(4.0)) rep.flagged.push_back(c.name);
    }
    return rep;
}

}  // namespace gincorr
