#pragma once

// Closed-form model of the ensemble-averaged Bloch map after n round trips.
// Expanding the per-trip rotation angle to second order in the phase around
// its mean and doing the Gaussian average exactly gives an affine map
//     V_n = D_n R(2 n gamma_n, s0) + (1 - D_n) s0 s0^T,
// a damped rotation about the fixed axis s0 plus a projector onto it. D_n and
// gamma_n are elementary functions of the angle derivatives at the mean phase.

#include <array>
#include <cmath>
#include <stdexcept>

#include "cavity.hpp"
#include "engine.hpp"

namespace ringpol {

struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }
    /// Right-handed rotation by `angle` about the unit axis s.
    static Mat3 rotation(const Vec3& s, double angle) {
        double c = std::cos(angle), sn = std::sin(angle), k = 1.0 - c;
        Mat3 r;
        r.m = {{{c + k * s.x * s.x, k * s.x * s.y - sn * s.z, k * s.x * s.z + sn * s.y},
                {k * s.y * s.x + sn * s.z, c + k * s.y * s.y, k * s.y * s.z - sn * s.x},
                {k * s.z * s.x - sn * s.y, k * s.z * s.y + sn * s.x, c + k * s.z * s.z}}};
        return r;
    }
    static Mat3 outer(const Vec3& u, const Vec3& v) {
        Mat3 r;
        const double uu[3] = {u.x, u.y, u.z};
        const double vv[3] = {v.x, v.y, v.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = uu[i] * vv[j];
        return r;
    }
    Vec3 apply(const Vec3& p) const {
        return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
                m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
                m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z};
    }
    friend Mat3 operator+(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
        return r;
    }
    friend Mat3 operator*(double s, const Mat3& a) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = s * a.m[i][j];
        return r;
    }
    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j] + a.m[i][2] * b.m[2][j];
        return r;
    }
};

/// Smooth branch of the per-trip half-rotation-angle as a function of the
/// round-trip phase. Unlike the matrix decomposition (which folds the angle
/// into [0, pi] and flips the axis), this branch is differentiable through
/// zero crossings, which the derivative-based model below requires.
inline double smooth_alpha(const CavityConfig& cfg, double phi_trip) {
    switch (cfg.layout) {
        case Layout::Bare: return phi_trip + kPi / 2.0;
        case Layout::ZCompensated: return phi_trip;
        case Layout::CarrPurcell:
        case Layout::PauliGroup: return kPi / 2.0;  // phase-independent
        case Layout::GenericFree: return alpha_fe(phi_trip, cfg.theta);
        case Layout::GenericBB: return alpha_bb(phi_trip, cfg.theta);
    }
    throw std::logic_error("unhandled layout");
}

/// Rotation axis of the smooth branch at the given phase.
inline Vec3 smooth_axis(const CavityConfig& cfg, double phi_trip) {
    switch (cfg.layout) {
        case Layout::Bare:
        case Layout::ZCompensated: return {0.0, 0.0, 1.0};
        case Layout::CarrPurcell:
        case Layout::PauliGroup: return {0.0, -1.0, 0.0};
        case Layout::GenericFree: return s_fe(phi_trip, cfg.theta).s;
        case Layout::GenericBB: return s_bb(phi_trip, cfg.theta).s;
    }
    throw std::logic_error("unhandled layout");
}

/// Angle value and first two phase-derivatives at the distribution mean, plus
/// the axis there. Derivatives by central differences; the closed angle forms
/// are smooth so a 1e-4 step keeps both truncation and roundoff near 1e-8.
struct ExpansionCoeffs {
    double alpha0 = 0.0;
    double dalpha = 0.0;   // d alpha / d Phi at phi0
    double ddalpha = 0.0;  // d^2 alpha / d Phi^2 at phi0
    Vec3 axis{0.0, 0.0, 1.0};
};

inline ExpansionCoeffs expansion_coeffs(const CavityConfig& cfg, double phi0,
                                        double fd_step = 1e-4) {
    cfg.validate();
    if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be positive");
    double ap = smooth_alpha(cfg, phi0 + fd_step);
    double a0 = smooth_alpha(cfg, phi0);
    double am = smooth_alpha(cfg, phi0 - fd_step);
    ExpansionCoeffs c;
    c.alpha0 = a0;
    c.dalpha = (ap - am) / (2.0 * fd_step);
    c.ddalpha = (ap - 2.0 * a0 + am) / (fd_step * fd_step);
    c.axis = smooth_axis(cfg, phi0);
    return c;
}

/// Coherent fraction surviving after n trips; 1 at n = 0, exact for a
/// quadratic angle model under the Gaussian measure.
inline double decoherence_factor(const ExpansionCoeffs& c, double sigma_phi, int n) {
    if (n < 0) throw std::invalid_argument("trip count must be non-negative");
    double nn = double(n) * double(n);
    double s2 = sigma_phi * sigma_phi;
    double q = 1.0 + nn * c.ddalpha * c.ddalpha * s2 * s2;
    return std::pow(q, -0.25) * std::exp(-nn * c.dalpha * c.dalpha * s2 / q);
}

/// Effective per-trip half-angle of the surviving rotation: the accumulated
/// angle is 2 n gamma_n. The curvature both chirps the rotation and adds a
/// slowly saturating arctan offset.
inline double rotation_angle(const ExpansionCoeffs& c, double sigma_phi, int n) {
    if (n < 1) throw std::invalid_argument("trip count must be >= 1");
    double nn = double(n) * double(n);
    double s2 = sigma_phi * sigma_phi;
    double q = 1.0 + nn * c.ddalpha * c.ddalpha * s2 * s2;
    return c.alpha0 - 0.5 * nn * c.dalpha * c.dalpha * c.ddalpha * s2 * s2 / q +
           std::atan(double(n) * c.ddalpha * s2) / (4.0 * n);
}

/// The full Bloch map after n trips: damped rotation about the mean axis plus
/// a projector that preserves the component along it.
inline Mat3 v_matrix(const ExpansionCoeffs& c, double sigma_phi, int n) {
    double d = decoherence_factor(c, sigma_phi, n);
    double g = rotation_angle(c, sigma_phi, n);
    return d * Mat3::rotation(c.axis, 2.0 * n * g) + (1.0 - d) * Mat3::outer(c.axis, c.axis);
}

struct AnalyticRecord {
    int n = 0;
    double d = 1.0;      // decoherence factor D_n
    double gamma = 0.0;  // per-trip half-angle gamma_n
    Mat3 v;
};

inline AnalyticRecord analytic_step(const ExpansionCoeffs& c, double sigma_phi, int n) {
    AnalyticRecord r;
    r.n = n;
    r.d = decoherence_factor(c, sigma_phi, n);
    r.gamma = rotation_angle(c, sigma_phi, n);
    r.v = r.d * Mat3::rotation(c.axis, 2.0 * n * r.gamma) + (1.0 - r.d) * Mat3::outer(c.axis, c.axis);
    return r;
}

/// Purity/fidelity record for a pure input under the closed-form map.
inline DecayRecord analytic_record(const ExpansionCoeffs& c, double sigma_phi, const Vec3& input,
                                   int n) {
    Vec3 out = v_matrix(c, sigma_phi, n).apply(input);
    return make_record(n, input, out);
}

}  // namespace ringpol
