#pragma once

// Cavity layouts and their per-pass Jones operators.
//
// One round trip passes two noisy 45-degree plane mirrors (phase phi each) and
// the spherical mirror (a plain Z), so the round trip accumulates twice the
// per-mirror phase. Throughout the engine and the closed-form angle/axis
// functions the argument is the ROUND-TRIP phase Phi (the variable the noise
// measure, phi0 and sigma_phi refer to); step_unitary keeps the per-mirror
// argument so that its matrix forms below read exactly as assembled from
// mirror_mz(phi).
//
// Layouts:
//   Bare          one trip:  Z exp(-i 2 phi Z)          (Z . M . M)
//   ZCompensated  one trip:  exp(-i 2 phi Z)            (Z plate added)
//   CarrPurcell   double trip: -I                       (X flip each trip)
//   PauliGroup    double trip: -I                       (X and Z each trip)
//   GenericFree   double trip: [N(phi,theta)]^4         (S-B before each mirror)
//   GenericBB     double trip: [Z N(phi,theta) X N(phi,theta)]^2
//
// With z-axis mirror noise the Carr-Purcell and Pauli-group cycles reduce to
// the same matrix product [Z M X M]^2 = (XZ)^2 = -I, independent of phi: both
// decouple exactly. They are kept as distinct layouts because they differ in
// which physical flips realize the cycle.

#include <cmath>
#include <stdexcept>
#include <string>

#include "elements.hpp"
#include "jones.hpp"

namespace ringpol {

enum class Layout { Bare, ZCompensated, CarrPurcell, PauliGroup, GenericFree, GenericBB };

inline std::string layout_name(Layout l) {
    switch (l) {
        case Layout::Bare: return "bare";
        case Layout::ZCompensated: return "zcomp";
        case Layout::CarrPurcell: return "cp";
        case Layout::PauliGroup: return "pauli";
        case Layout::GenericFree: return "free";
        case Layout::GenericBB: return "bb";
    }
    throw std::logic_error("unreachable");
}

inline Layout layout_from_name(const std::string& s) {
    if (s == "bare") return Layout::Bare;
    if (s == "zcomp") return Layout::ZCompensated;
    if (s == "cp") return Layout::CarrPurcell;
    if (s == "pauli") return Layout::PauliGroup;
    if (s == "free") return Layout::GenericFree;
    if (s == "bb") return Layout::GenericBB;
    throw std::invalid_argument("unknown layout '" + s + "'");
}

inline bool is_generic(Layout l) { return l == Layout::GenericFree || l == Layout::GenericBB; }

/// Whether the layout's natural cycle is two round trips (the decoupled and
/// generic layouts), so that odd trip counts are half-cycle points.
inline bool is_double_trip(Layout l) {
    return l == Layout::CarrPurcell || l == Layout::PauliGroup || is_generic(l);
}

struct CavityConfig {
    Layout layout = Layout::Bare;
    NoiseDelay theta{};  // used by the Generic* layouts only

    void validate() const {
        if (!is_generic(layout) && theta.theta != 0.0)
            throw std::invalid_argument("theta is meaningful only for the generic layouts");
    }
};

/// Unitary of ONE round trip as a function of the round-trip phase Phi.
inline ElementUnitary round_trip_unitary(const CavityConfig& cfg, double phi_trip) {
    const double m = phi_trip / 2.0;  // per-mirror phase
    switch (cfg.layout) {
        case Layout::Bare:
            return {pauli(Axis::Z) * mirror_mz(m).u * mirror_mz(m).u};
        case Layout::ZCompensated:
            return {pauli(Axis::Z) * pauli(Axis::Z) * mirror_mz(m).u * mirror_mz(m).u};
        case Layout::CarrPurcell:
        case Layout::PauliGroup:
            // Z(spherical) M X M; algebraically XZ for every phi
            return {pauli(Axis::Z) * mirror_mz(m).u * pauli(Axis::X) * mirror_mz(m).u};
        case Layout::GenericFree: {
            Mat2 n = noise_element(m, cfg.theta).u;
            return {n * n};
        }
        case Layout::GenericBB: {
            Mat2 n = noise_element(m, cfg.theta).u;
            return {pauli(Axis::Z) * n * pauli(Axis::X) * n};
        }
    }
    throw std::logic_error("unreachable");
}

/// The layout's step operator in per-mirror units: one round trip for
/// Bare/ZCompensated, two round trips for the four double-trip layouts.
inline ElementUnitary step_unitary(const CavityConfig& cfg, double phi_mirror) {
    if (!std::isfinite(phi_mirror)) throw std::invalid_argument("phase must be finite");
    ElementUnitary trip = round_trip_unitary(cfg, 2.0 * phi_mirror);
    if (!is_double_trip(cfg.layout)) return trip;
    return {trip.u * trip.u};
}

/// Half-rotation angle and unit axis of U = exp(-i alpha s.sigma) (projectively).
struct AxisAngle {
    double alpha = 0.0;  // in [0, pi]
    Vec3 s{0.0, 0.0, 1.0};
    bool degenerate = false;  // axis undetermined (alpha ~ 0 mod pi)
};

inline ElementUnitary from_axis_angle(double alpha, const Vec3& s) {
    double c = std::cos(alpha), n = std::sin(alpha);
    return {{cplx(c, -n * s.z), cplx(-n * s.y, -n * s.x),
             cplx(n * s.y, -n * s.x), cplx(c, n * s.z)}};
}

/// Decompose a 2x2 unitary into exp(-i alpha s.sigma) modulo global phase.
/// Projectively-identity inputs give alpha = 0 and the fallback axis (0,0,1).
inline AxisAngle axis_angle(const ElementUnitary& u) {
    // strip the global phase: V = U / sqrt(det U) lies in SU(2)
    cplx root = std::sqrt(u.u.det());
    Mat2 v = (1.0 / root) * u.u;
    double c = v.trace().real() / 2.0;
    // tr(sigma_j V) = -2 i sin(alpha) s_j
    Vec3 vec{-(v.b + v.c).imag() / 2.0,
             -(v.b - v.c).real() / 2.0,
             -(v.a - v.d).imag() / 2.0};
    double n = vec.norm();
    if (n < 1e-12) {
        AxisAngle out;
        out.alpha = 0.0;
        out.degenerate = true;
        return out;  // projectively the identity (V = +-I)
    }
    AxisAngle out;
    out.alpha = std::atan2(n, c);
    out.s = (1.0 / n) * vec;
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form axis-angle of the generic one-round-trip factors as functions of
// the round-trip phase Phi:
//   free evolution  N(Phi/2, th)^2           -> (alpha_fe, s_fe)
//   flip-dressed    Z N(Phi/2, th) X N(Phi/2, th) -> (alpha_bb, s_bb)
// ---------------------------------------------------------------------------

/// sin(alpha_fe / 2) = sin(Phi/2) cos(theta/2), principal branch.
inline double alpha_fe(double phi_trip, NoiseDelay theta) {
    return 2.0 * std::asin(std::sin(phi_trip / 2.0) * std::cos(theta.theta / 2.0));
}

/// cos(alpha_bb) = -sin(Phi) sin(theta) / 2; always in [pi/3, 2*pi/3].
inline double alpha_bb(double phi_trip, NoiseDelay theta) {
    return std::acos(-std::sin(phi_trip) * std::sin(theta.theta) / 2.0);
}

/// Rotation axis of the free one-trip factor. Written in the half-angle form,
/// which stays regular at Phi = 0 (where the rotation angle vanishes but the
/// limiting axis is still well defined); only |sin(Phi/2) cos(theta/2)| = 1 is
/// genuinely degenerate.
inline AxisAngle s_fe(double phi_trip, NoiseDelay theta) {
    AxisAngle out;
    out.alpha = alpha_fe(phi_trip, theta);
    double ch = std::cos(out.alpha / 2.0);
    if (std::abs(ch) < 1e-9) {
        out.degenerate = true;
        return out;
    }
    double hp = phi_trip / 2.0, ht = theta.theta / 2.0;
    out.s = (1.0 / ch) * Vec3{-std::sin(hp) * std::sin(ht),
                              std::cos(hp) * std::sin(ht),
                              std::cos(hp) * std::cos(ht)};
    return out;
}

/// Rotation axis of the flip-dressed one-trip factor; sin(alpha_bb) >= sqrt(3)/2
/// everywhere, so this form is globally regular.
inline AxisAngle s_bb(double phi_trip, NoiseDelay theta) {
    AxisAngle out;
    out.alpha = alpha_bb(phi_trip, theta);
    double sa = std::sin(out.alpha);
    double st2 = std::sin(theta.theta / 2.0), sp2 = std::sin(phi_trip / 2.0);
    out.s = (1.0 / sa) * Vec3{-std::sin(phi_trip) * st2 * st2,
                              1.0 - 2.0 * st2 * st2 * sp2 * sp2,
                              -std::sin(theta.theta) * sp2 * sp2};
    return out;
}

/// Closed-form axis-angle of one round trip for a generic layout.
inline AxisAngle trip_axis_angle_closed(const CavityConfig& cfg, double phi_trip) {
    switch (cfg.layout) {
        case Layout::GenericFree: return s_fe(phi_trip, cfg.theta);
        case Layout::GenericBB: return s_bb(phi_trip, cfg.theta);
        default: throw std::invalid_argument("closed forms exist for the generic layouts only");
    }
}

}  // namespace ringpol
