#pragma once

// 2x2 complex linear algebra for polarization qubits: Jones vectors,
// density matrices, Pauli operators and the Bloch/Stokes dictionary.
//
// Conventions used throughout the library:
//   basis        |H> = (1,0), |V> = (0,1)
//   circular     R = (H + iV)/sqrt(2), L = (H - iV)/sqrt(2)
//   diagonal     D = (H + V)/sqrt(2), A = (H - V)/sqrt(2)
//   Bloch vector P = (<X>, <Y>, <Z>), so H -> (0,0,1), D -> (1,0,0), R -> (0,1,0)
// and a unitary exp(-i a s.sigma) rotates P by the angle 2a about s (right-handed).

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace ringpol {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

/// Row-major 2x2 complex matrix: [[a, b], [c, d]].
struct Mat2 {
    cplx a{}, b{}, c{}, d{};

    friend Mat2 operator*(const Mat2& m, const Mat2& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    friend Mat2 operator*(cplx s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
    friend Mat2 operator+(const Mat2& m, const Mat2& n) {
        return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
    }
    friend Mat2 operator-(const Mat2& m, const Mat2& n) {
        return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
    }

    Mat2 adjoint() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
    cplx trace() const { return a + d; }
    cplx det() const { return a * d - b * c; }

    double max_abs_diff(const Mat2& o) const {
        return std::max(std::max(std::abs(a - o.a), std::abs(b - o.b)),
                        std::max(std::abs(c - o.c), std::abs(d - o.d)));
    }
};

inline Mat2 identity2() { return {1.0, 0.0, 0.0, 1.0}; }

/// Real 3-vector (Bloch / Stokes direction).
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend Vec3 operator+(const Vec3& u, const Vec3& v) { return {u.x + v.x, u.y + v.y, u.z + v.z}; }
    friend Vec3 operator-(const Vec3& u, const Vec3& v) { return {u.x - v.x, u.y - v.y, u.z - v.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }

    double dot(const Vec3& v) const { return x * v.x + y * v.y + z * v.z; }
    Vec3 cross(const Vec3& v) const {
        return {y * v.z - z * v.y, z * v.x - x * v.z, x * v.y - y * v.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
        return (1.0 / n) * *this;
    }
};

using BlochVector = Vec3;

enum class Axis { I, X, Y, Z };

/// Standard Pauli matrices in the H/V basis (Axis::I gives the identity).
inline Mat2 pauli(Axis axis) {
    switch (axis) {
        case Axis::I: return {1.0, 0.0, 0.0, 1.0};
        case Axis::X: return {0.0, 1.0, 1.0, 0.0};
        case Axis::Y: return {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0};
        case Axis::Z: return {1.0, 0.0, 0.0, -1.0};
    }
    throw std::logic_error("unreachable");
}

/// Two-component complex field amplitude (h, v).
struct JonesVector {
    cplx h{}, v{};

    double norm2() const { return std::norm(h) + std::norm(v); }

    JonesVector normalized() const {
        double n2 = norm2();
        if (n2 <= 0.0) throw std::invalid_argument("Jones vector has zero norm");
        double s = 1.0 / std::sqrt(n2);
        return {s * h, s * v};
    }

    bool is_normalized(double tol = 1e-12) const { return std::abs(norm2() - 1.0) <= tol; }

    /// <X>, <Y>, <Z> of the corresponding pure state.
    BlochVector bloch() const {
        JonesVector u = normalized();
        cplx hv = std::conj(u.h) * u.v;
        return {2.0 * hv.real(), 2.0 * hv.imag(), std::norm(u.h) - std::norm(u.v)};
    }
};

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

inline JonesVector jones_h() { return {1.0, 0.0}; }
inline JonesVector jones_v() { return {0.0, 1.0}; }
inline JonesVector jones_d() { return {kInvSqrt2, kInvSqrt2}; }
inline JonesVector jones_a() { return {kInvSqrt2, -kInvSqrt2}; }
inline JonesVector jones_r() { return {kInvSqrt2, cplx(0.0, kInvSqrt2)}; }
inline JonesVector jones_l() { return {kInvSqrt2, cplx(0.0, -kInvSqrt2)}; }

/// Unit-trace Hermitian PSD 2x2 matrix; the state of the polarization qubit.
struct PolarizationState {
    Mat2 rho;

    /// Hermiticity, unit trace and positivity up to the library-wide tolerances.
    bool is_valid(double tol = 1e-12, double psd_floor = -1e-10) const {
        if (rho.max_abs_diff(rho.adjoint()) > tol) return false;
        if (std::abs(rho.trace() - cplx(1.0)) > tol) return false;
        // eigenvalues of a Hermitian 2x2: t/2 +- sqrt((t/2)^2 - det)
        double t = rho.trace().real();
        double disc = t * t / 4.0 - rho.det().real();
        double lam_min = t / 2.0 - std::sqrt(std::max(disc, 0.0));
        return lam_min >= psd_floor;
    }
};

/// A lossless optical element (or a full cavity pass): unitary 2x2 Jones operator.
struct ElementUnitary {
    Mat2 u;

    bool is_unitary(double tol = 1e-12) const {
        return (u.adjoint() * u).max_abs_diff(identity2()) <= tol;
    }
};

/// rho = (I + P.sigma)/2. Rejects Bloch vectors outside the unit ball.
inline PolarizationState density_from_bloch(const BlochVector& p) {
    if (p.norm() > 1.0 + 1e-10)
        throw std::invalid_argument("Bloch vector norm " + std::to_string(p.norm()) +
                                    " exceeds 1 (unphysical state)");
    return {{0.5 * cplx(1.0 + p.z), 0.5 * cplx(p.x, -p.y),
             0.5 * cplx(p.x, p.y), 0.5 * cplx(1.0 - p.z)}};
}

inline BlochVector bloch_from_density(const PolarizationState& st) {
    const Mat2& r = st.rho;
    return {2.0 * r.b.real(), -2.0 * r.b.imag(), (r.a - r.d).real()};
}

inline PolarizationState pure_state(const JonesVector& pi) {
    JonesVector u = pi.normalized();
    return {{u.h * std::conj(u.h), u.h * std::conj(u.v),
             u.v * std::conj(u.h), u.v * std::conj(u.v)}};
}

/// Tr(rho^2) = (1 + |P|^2)/2.
inline double purity(const PolarizationState& st) {
    BlochVector p = bloch_from_density(st);
    return 0.5 * (1.0 + p.dot(p));
}

/// <pi|rho|pi> for a pure reference state; equals (1 + P_pi . P_rho)/2.
inline double fidelity_pure(const PolarizationState& st, const JonesVector& pi) {
    if (!pi.is_normalized())
        throw std::invalid_argument("fidelity_pure requires a normalized reference state");
    cplx val = std::conj(pi.h) * (st.rho.a * pi.h + st.rho.b * pi.v) +
               std::conj(pi.v) * (st.rho.c * pi.h + st.rho.d * pi.v);
    return val.real();
}

/// rho -> U rho U^dagger.
inline PolarizationState apply_unitary(const ElementUnitary& u, const PolarizationState& st) {
    return {u.u * st.rho * u.u.adjoint()};
}

/// Largest entrywise distance between two unitaries modulo a global phase.
inline double projective_distance(const Mat2& u, const Mat2& v) {
    // align the phases on the largest entry of u
    const cplx* entries_u[4] = {&u.a, &u.b, &u.c, &u.d};
    const cplx* entries_v[4] = {&v.a, &v.b, &v.c, &v.d};
    int k = 0;
    double best = 0.0;
    for (int i = 0; i < 4; ++i)
        if (std::abs(*entries_u[i]) > best) { best = std::abs(*entries_u[i]); k = i; }
    if (best == 0.0) return v.max_abs_diff(Mat2{});
    cplx phase = *entries_v[k] / *entries_u[k];
    double m = std::abs(phase);
    if (m == 0.0) return u.max_abs_diff(v);
    phase /= m;
    return (phase * u).max_abs_diff(v);
}

}  // namespace ringpol
