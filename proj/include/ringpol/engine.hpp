#pragma once

// Ensemble evolution of a polarization qubit over repeated cavity round trips.
// The random mirror phase is averaged either by Gauss-Hermite quadrature or by
// Monte Carlo; each phase sample contributes a fixed rotation whose n-th power
// is applied analytically (angle scales with n), so long evolutions cost the
// same per step as short ones.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cavity.hpp"
#include "quadrature.hpp"

namespace ringpol {

/// Gaussian round-trip phase: density proportional to
/// exp(-(phi - phi0)^2 / sigma_phi^2), i.e. true standard deviation
/// sigma_phi / sqrt(2).
struct PhaseDistribution {
    double phi0 = 0.0;
    double sigma_phi = 0.0;

    void validate() const {
        if (!std::isfinite(phi0) || !std::isfinite(sigma_phi))
            throw std::invalid_argument("phase distribution parameters must be finite");
        if (sigma_phi < 0.0)
            throw std::invalid_argument("sigma_phi must be non-negative");
    }
    double stddev() const { return sigma_phi / std::sqrt(2.0); }
};

struct QuadratureMethod {
    int order = 64;
};

struct MonteCarloMethod {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
};

using SamplingMethod = std::variant<QuadratureMethod, MonteCarloMethod>;

inline std::string method_name(const SamplingMethod& m) {
    return std::holds_alternative<QuadratureMethod>(m) ? "quad" : "mc";
}

/// Standard normal deviates from Box-Muller over mt19937_64. Hand-rolled
/// because std::normal_distribution's algorithm is implementation-defined and
/// we want byte-identical streams across standard libraries.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    double uniform01() {  // in (0, 1]
        return double((rng_() >> 11) + 1) * 0x1p-53;
    }
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct PhaseSamples {
    std::vector<double> phases;   // round-trip phase values
    std::vector<double> weights;  // sum to 1
};

inline PhaseSamples draw_phase_samples(const PhaseDistribution& dist, const SamplingMethod& method) {
    dist.validate();
    PhaseSamples out;
    if (const auto* q = std::get_if<QuadratureMethod>(&method)) {
        const GaussHermite& gh = gauss_hermite_cached(q->order);
        out.phases.resize(gh.nodes.size());
        for (std::size_t k = 0; k < gh.nodes.size(); ++k)
            out.phases[k] = dist.phi0 + dist.sigma_phi * gh.nodes[k];
        out.weights = gh.weights;
    } else {
        const auto& mc = std::get<MonteCarloMethod>(method);
        if (mc.samples == 0) throw std::invalid_argument("monte carlo needs at least one sample");
        GaussianSampler g(mc.seed);
        out.phases.resize(mc.samples);
        double sd = dist.stddev();
        for (std::uint64_t k = 0; k < mc.samples; ++k)
            out.phases[k] = dist.phi0 + sd * g.next();
        out.weights.assign(mc.samples, 1.0 / double(mc.samples));
    }
    return out;
}

/// Per-sample rotation decomposition of one round trip: the n-trip Bloch map
/// for sample k is a rotation by 2 n alpha[k] about axis[k].
struct WeightedRotations {
    std::vector<double> weight;
    std::vector<double> alpha;
    std::vector<Vec3> axis;

    std::size_t size() const { return weight.size(); }
};

inline WeightedRotations decompose_trips(const CavityConfig& cavity, const PhaseSamples& samples) {
    cavity.validate();
    WeightedRotations rot;
    rot.weight = samples.weights;
    rot.alpha.resize(samples.phases.size());
    rot.axis.resize(samples.phases.size());
    for (std::size_t k = 0; k < samples.phases.size(); ++k) {
        AxisAngle aa = axis_angle(round_trip_unitary(cavity, samples.phases[k]));
        rot.alpha[k] = aa.alpha;
        rot.axis[k] = aa.s;
    }
    return rot;
}

/// Ensemble-averaged Bloch vector after n round trips.
inline Vec3 propagate(const WeightedRotations& rot, const Vec3& input, int n) {
    if (n < 0) throw std::invalid_argument("trip count must be non-negative");
    if (rot.size() == 0) throw std::invalid_argument("empty sample set");
    return pairwise_sum(std::size_t{0}, rot.size(), [&](std::size_t k) {
        return rot.weight[k] * rotate_about(rot.axis[k], 2.0 * n * rot.alpha[k], input);
    });
}

struct DecayRecord {
    int n = 0;  // round trips
    Vec3 bloch{};
    double purity = 1.0;
    double fidelity = 1.0;
};

struct EvolutionResult {
    CavityConfig cavity;
    PhaseDistribution dist;
    std::string method;
    std::vector<DecayRecord> records;
};

inline DecayRecord make_record(int n, const Vec3& input, const Vec3& output) {
    DecayRecord rec;
    rec.n = n;
    rec.bloch = output;
    rec.purity = 0.5 * (1.0 + output.dot(output));
    rec.fidelity = 0.5 * (1.0 + input.dot(output));
    return rec;
}

/// Evolve a pure input state (unit Bloch vector) for n = 1..n_max round trips.
inline EvolutionResult evolve(const CavityConfig& cavity, const PhaseDistribution& dist,
                              const SamplingMethod& method, const Vec3& input, int n_max) {
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    if (std::abs(input.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("input Bloch vector must be unit length");
    WeightedRotations rot = decompose_trips(cavity, draw_phase_samples(dist, method));
    EvolutionResult res{cavity, dist, method_name(method), {}};
    res.records.reserve(std::size_t(n_max));
    for (int n = 1; n <= n_max; ++n)
        res.records.push_back(make_record(n, input, propagate(rot, input, n)));
    return res;
}

/// Purity of an equatorial input under pure dephasing (compensated layout):
/// the coherence decays as exp(-n^2 sigma_phi^2).
inline double dephasing_purity(int n, double sigma_phi) {
    double d = std::exp(-double(n) * double(n) * sigma_phi * sigma_phi);
    return 0.5 * (1.0 + d * d);
}

/// Mean purity/fidelity over a quasi-uniform set of pure input states.
/// The bloch field of each record holds the mean output vector.
inline EvolutionResult sphere_averaged_evolution(const CavityConfig& cavity,
                                                 const PhaseDistribution& dist,
                                                 const SamplingMethod& method, int n_max,
                                                 std::size_t grid_size = 256) {
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    WeightedRotations rot = decompose_trips(cavity, draw_phase_samples(dist, method));
    std::vector<Vec3> inputs = fibonacci_sphere(grid_size);
    EvolutionResult res{cavity, dist, method_name(method), {}};
    res.records.reserve(std::size_t(n_max));
    for (int n = 1; n <= n_max; ++n) {
        double purity = 0.0, fidelity = 0.0;
        Vec3 mean{};
        for (const Vec3& p : inputs) {
            DecayRecord rec = make_record(n, p, propagate(rot, p, n));
            purity += rec.purity;
            fidelity += rec.fidelity;
            mean = mean + rec.bloch;
        }
        double inv = 1.0 / double(inputs.size());
        DecayRecord rec;
        rec.n = n;
        rec.bloch = inv * mean;
        rec.purity = purity * inv;
        rec.fidelity = fidelity * inv;
        res.records.push_back(rec);
    }
    return res;
}

}  // namespace ringpol
