#pragma once

// Frequency-resolved pulse amplitudes and their Stokes parameters.
//
// A pulse is described by two complex amplitude profiles alpha_H(w), alpha_V(w)
// on a uniform frequency grid. The polarization density matrix follows from the
// four frequency-integrated Stokes parameters; the state is pure exactly when
// the two profiles are proportional (a "disentangled" frequency-polarization
// product), and the shortfall s0^2 - s1^2 - s2^2 - s3^2 >= 0 measures how far
// the spectrum is from factorizing.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "jones.hpp"

namespace ringpol {

struct StokesParams {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;

    BlochVector bloch() const { return {s2 / s0, s3 / s0, s1 / s0}; }
};

/// alpha_H(w), alpha_V(w) sampled on a strictly increasing uniform grid.
struct SpectralAmplitudes {
    std::vector<double> omega;
    std::vector<cplx> alpha_h;
    std::vector<cplx> alpha_v;

    void validate() const {
        if (omega.size() < 2) throw std::invalid_argument("spectral grid needs at least 2 points");
        if (alpha_h.size() != omega.size() || alpha_v.size() != omega.size())
            throw std::invalid_argument("amplitude arrays must match the grid length");
        const double h0 = omega[1] - omega[0];
        for (std::size_t i = 1; i < omega.size(); ++i) {
            double h = omega[i] - omega[i - 1];
            if (h <= 0.0 || std::abs(h - h0) > 1e-9 * std::abs(h0))
                throw std::invalid_argument("spectral grid must be uniform and increasing");
        }
        bool all_zero = true;
        for (std::size_t i = 0; i < omega.size(); ++i)
            if (std::norm(alpha_h[i]) + std::norm(alpha_v[i]) > 0.0) { all_zero = false; break; }
        if (all_zero) throw std::invalid_argument("all spectral amplitudes are zero");
    }

    /// Trapezoid weight for grid point i.
    double weight(std::size_t i) const {
        double h = omega[1] - omega[0];
        return (i == 0 || i + 1 == omega.size()) ? 0.5 * h : h;
    }
};

/// Frequency-integrated Stokes parameters (trapezoidal quadrature).
inline StokesParams stokes(const SpectralAmplitudes& spec) {
    spec.validate();
    double s0 = 0.0, s1 = 0.0;
    cplx c = 0.0;  // integral of conj(alpha_H) * alpha_V
    for (std::size_t i = 0; i < spec.omega.size(); ++i) {
        double w = spec.weight(i);
        double ih = std::norm(spec.alpha_h[i]);
        double iv = std::norm(spec.alpha_v[i]);
        s0 += w * (ih + iv);
        s1 += w * (ih - iv);
        c += w * std::conj(spec.alpha_h[i]) * spec.alpha_v[i];
    }
    if (s0 <= 0.0) throw std::invalid_argument("zero total intensity");
    return {s0, s1, 2.0 * c.real(), 2.0 * c.imag()};
}

/// (s0^2 - s1^2 - s2^2 - s3^2)/s0^2: zero iff alpha_V/alpha_H is frequency
/// independent, positive for frequency-entangled light.
inline double purity_deficit(const SpectralAmplitudes& spec) {
    StokesParams s = stokes(spec);
    return (s.s0 * s.s0 - s.s1 * s.s1 - s.s2 * s.s2 - s.s3 * s.s3) / (s.s0 * s.s0);
}

/// Independent O(N^2) evaluation of the same quantity through the
/// antisymmetrized double integral; test oracle, not used in the main path.
inline double purity_deficit_double_integral(const SpectralAmplitudes& spec) {
    spec.validate();
    const std::size_t n = spec.omega.size();
    double acc = 0.0, s0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double wi = spec.weight(i);
        s0 += wi * (std::norm(spec.alpha_h[i]) + std::norm(spec.alpha_v[i]));
        for (std::size_t j = 0; j < n; ++j) {
            cplx anti = spec.alpha_h[i] * spec.alpha_v[j] - spec.alpha_h[j] * spec.alpha_v[i];
            acc += wi * spec.weight(j) * std::norm(anti);
        }
    }
    return 2.0 * acc / (s0 * s0);
}

/// Normalized Gaussian field envelope centered at omega0 with bandwidth sigma_omega.
struct GaussianSpectrum {
    double omega0 = 0.0;
    double sigma_omega = 1.0;

    /// E(w) = (pi sigma^2)^(-1/4) exp[-(w-w0)^2 / (2 sigma^2)]; integral of |E|^2 is 1.
    double envelope(double omega) const {
        double d = (omega - omega0) / sigma_omega;
        return std::pow(kPi * sigma_omega * sigma_omega, -0.25) * std::exp(-0.5 * d * d);
    }
};

/// Uniform grid of `points` frequencies spanning omega0 +- half_width_sigmas * sigma.
inline std::vector<double> spectral_grid(const GaussianSpectrum& g, std::size_t points = 2048,
                                         double half_width_sigmas = 6.0) {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    std::vector<double> omega(points);
    double lo = g.omega0 - half_width_sigmas * g.sigma_omega;
    double hi = g.omega0 + half_width_sigmas * g.sigma_omega;
    for (std::size_t i = 0; i < points; ++i)
        omega[i] = lo + (hi - lo) * double(i) / double(points - 1);
    return omega;
}

/// Factory: amplitudes alpha_S(w) = E(w) * jones_S, with optional extra
/// frequency-dependent modulation of the V component (identically 1 when absent).
inline SpectralAmplitudes sampled_spectrum(
    const GaussianSpectrum& g, const JonesVector& jones, std::vector<double> grid,
    const std::function<cplx(double)>& v_modulation = nullptr) {
    if (grid.size() < 2) throw std::invalid_argument("grid needs at least 2 points");
    double span = grid.back() - grid.front();
    if (span < 10.0 * g.sigma_omega)
        throw std::invalid_argument("spectral grid narrower than +-5 sigma of the envelope");
    SpectralAmplitudes spec;
    spec.omega = std::move(grid);
    spec.alpha_h.resize(spec.omega.size());
    spec.alpha_v.resize(spec.omega.size());
    for (std::size_t i = 0; i < spec.omega.size(); ++i) {
        double env = g.envelope(spec.omega[i]);
        cplx mod = v_modulation ? v_modulation(spec.omega[i]) : cplx(1.0);
        spec.alpha_h[i] = env * jones.h;
        spec.alpha_v[i] = env * jones.v * mod;
    }
    return spec;
}

inline SpectralAmplitudes gaussian_envelope(const GaussianSpectrum& g, std::vector<double> grid) {
    return sampled_spectrum(g, jones_h(), std::move(grid));
}

/// The standard frequency-entangled example: alpha_H = E(w),
/// alpha_V = E(w) * sign(w - w0). The Stokes cross terms cancel by symmetry,
/// leaving a maximally frequency-polarization-entangled (fully mixed) state.
inline SpectralAmplitudes sign_flip_spectrum(const GaussianSpectrum& g, std::size_t points = 2048) {
    return sampled_spectrum(g, {kInvSqrt2, kInvSqrt2}, spectral_grid(g, points),
                            [&g](double w) { return cplx(w >= g.omega0 ? 1.0 : -1.0); });
}

}  // namespace ringpol
