#pragma once

// Jones operators of the individual optical elements.
//
// The 45-degree plane mirrors impose a frequency-dependent relative phase
// between H and V plus the reflection sign flip on V, which factorizes as
// M_Z(phi) = Z exp(-i phi Z). The spherical cavity mirror works at near-normal
// incidence and acts as a plain Z. The Soleil-Babinet compensator delays one
// diagonal component: B_X(theta) = exp(-i theta X / 2).

#include <cmath>
#include <stdexcept>

#include "jones.hpp"

namespace ringpol {

/// phi(omega) = phi0 + tau * omega; documents the frequency-to-phase link and
/// the bandwidth conversion sigma_phi = tau * sigma_omega.
struct MirrorPhaseModel {
    double phi0 = 0.0;  // central relative phase (rad)
    double tau = 0.0;   // group-delay slope (rad * s)

    double phase(double omega) const { return phi0 + tau * omega; }
    double sigma_phi(double sigma_omega) const { return std::abs(tau) * sigma_omega; }
};

/// Soleil-Babinet delay phase, reduced to [0, 2*pi).
struct NoiseDelay {
    double theta = 0.0;

    static NoiseDelay wrapped(double t) {
        double w = std::fmod(t, 2.0 * kPi);
        if (w < 0.0) w += 2.0 * kPi;
        return {w};
    }
};

inline Mat2 exp_minus_i_phi_z(double phi) {
    return {std::polar(1.0, -phi), 0.0, 0.0, std::polar(1.0, phi)};
}

/// One 45-degree mirror reflection: Z exp(-i phi Z) = diag(e^{-i phi}, -e^{+i phi}).
inline ElementUnitary mirror_mz(double phi) {
    if (!std::isfinite(phi)) throw std::invalid_argument("mirror phase must be finite");
    return {{std::polar(1.0, -phi), 0.0, 0.0, -std::polar(1.0, phi)}};
}

/// Half-wave plate realizing the X or Z flip.
inline ElementUnitary waveplate(Axis axis) {
    if (axis != Axis::X && axis != Axis::Z)
        throw std::invalid_argument("waveplates here realize X or Z only");
    return {pauli(axis)};
}

/// Soleil-Babinet: exp(-i theta X / 2) = cos(theta/2) I - i sin(theta/2) X.
inline ElementUnitary soleil_babinet(NoiseDelay delay) {
    double c = std::cos(delay.theta / 2.0), s = std::sin(delay.theta / 2.0);
    return {{cplx(c, 0.0), cplx(0.0, -s), cplx(0.0, -s), cplx(c, 0.0)}};
}

/// Mirror preceded by its Soleil-Babinet: N(phi, theta) = M_Z(phi) B_X(theta).
inline ElementUnitary noise_element(double phi, NoiseDelay delay) {
    return {mirror_mz(phi).u * soleil_babinet(delay).u};
}

}  // namespace ringpol
