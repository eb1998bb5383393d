#pragma once

// Six-projector polarization tomography: H/V, D/A, R/L counts, linear
// inversion, and a maximum-likelihood reconstruction over the Cholesky-style
// density parametrization (always physical). Count noise uses a hand-rolled
// Poisson sampler so streams are reproducible across standard libraries.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "jones.hpp"

namespace ringpol {

// Outcome order used throughout: H, V, D, A, R, L.
enum : int { kCountH = 0, kCountV, kCountD, kCountA, kCountR, kCountL };

using Counts = std::array<double, 6>;

inline std::array<Vec3, 6> projector_axes() {
    return {Vec3{0, 0, 1},  Vec3{0, 0, -1}, Vec3{1, 0, 0},
            Vec3{-1, 0, 0}, Vec3{0, 1, 0},  Vec3{0, -1, 0}};
}

/// Outcome probabilities of the three mutually unbiased bases for a state
/// with Bloch vector p: each projector k has p_k = (1 + a_k . p) / 2.
inline std::array<double, 6> outcome_probabilities(const Vec3& p) {
    std::array<double, 6> probs{};
    auto axes = projector_axes();
    for (int k = 0; k < 6; ++k) probs[std::size_t(k)] = 0.5 * (1.0 + axes[std::size_t(k)].dot(p));
    return probs;
}

inline Counts expected_counts(const Vec3& bloch, double shots_per_basis) {
    if (!(shots_per_basis > 0.0)) throw std::invalid_argument("shots_per_basis must be positive");
    auto probs = outcome_probabilities(bloch);
    Counts c{};
    for (int k = 0; k < 6; ++k) c[std::size_t(k)] = shots_per_basis * probs[std::size_t(k)];
    return c;
}

/// Poisson deviate, reproducible: sequential inversion below mean 10, the
/// PTRS transformed-rejection sampler above.
inline std::uint64_t poisson_draw(double mean, std::mt19937_64& rng) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be non-negative");
    auto uniform = [&rng]() { return double((rng() >> 11) + 1) * 0x1p-53; };  // (0, 1]
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        double l = std::exp(-mean), p = 1.0;
        std::uint64_t k = 0;
        do {
            ++k;
            p *= uniform();
        } while (p > l && k < 1000);
        return k - 1;
    }
    const double slam = std::sqrt(mean), llam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = uniform() - 0.5;
        double v = uniform();
        double us = 0.5 - std::abs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return std::uint64_t(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * llam - mean - std::lgamma(kf + 1.0))
            return std::uint64_t(kf);
    }
}

enum class CountNoise { None, Poisson };

inline Counts simulate_counts(const Vec3& bloch, double shots_per_basis, CountNoise noise,
                              std::mt19937_64& rng) {
    Counts c = expected_counts(bloch, shots_per_basis);
    if (noise == CountNoise::Poisson)
        for (double& v : c) v = double(poisson_draw(v, rng));
    else
        for (double& v : c) v = std::nearbyint(v);  // counts are integers
    return c;
}

/// Direct (linear-inversion) Bloch estimate; may leave the Bloch ball.
inline Vec3 linear_inversion(const Counts& c) {
    auto ratio = [](double plus, double minus) {
        double tot = plus + minus;
        if (!(tot > 0.0)) throw std::invalid_argument("basis with zero total counts");
        return (plus - minus) / tot;
    };
    return {ratio(c[kCountD], c[kCountA]), ratio(c[kCountR], c[kCountL]),
            ratio(c[kCountH], c[kCountV])};
}

enum class LikelihoodModel { Poisson, Gaussian };

struct MleOptions {
    LikelihoodModel model = LikelihoodModel::Poisson;
    int max_iters = 10000;
    double grad_tol = 1e-9;
};

struct MleResult {
    PolarizationState rho;
    Vec3 bloch{};
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

// works for any Hermitian matrix, not just unit-trace states
inline Vec3 bloch_of(const Mat2& m) {
    return {2.0 * m.b.real(), -2.0 * m.b.imag(), (m.a - m.d).real()};
}

// rho(t) = T^dag T / tr with lower-triangular T = [[t0, 0], [t2 + i t3, t1]].
inline Mat2 cholesky_gram(const std::array<double, 4>& t) {
    Mat2 T{cplx(t[0], 0.0), cplx(0.0, 0.0), cplx(t[2], t[3]), cplx(t[1], 0.0)};
    return T.adjoint() * T;
}

inline Mat2 cholesky_gram_derivative(const std::array<double, 4>& t, int i) {
    Mat2 T{cplx(t[0], 0.0), cplx(0.0, 0.0), cplx(t[2], t[3]), cplx(t[1], 0.0)};
    Mat2 dT{cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)};
    if (i == 0) dT.a = cplx(1.0, 0.0);
    if (i == 1) dT.d = cplx(1.0, 0.0);
    if (i == 2) dT.c = cplx(1.0, 0.0);
    if (i == 3) dT.c = cplx(0.0, 1.0);
    return dT.adjoint() * T + T.adjoint() * dT;
}

inline std::array<double, 4> cholesky_params(const Mat2& rho) {
    // requires rho11 > 0; callers clip the seed state away from the boundary
    double r11 = rho.d.real();
    double t1 = std::sqrt(std::max(r11, 1e-12));
    cplx off = rho.c / t1;  // rho(1,0) = t1 (t2 + i t3)
    double t2 = off.real(), t3 = off.imag();
    double rest = rho.a.real() - t2 * t2 - t3 * t3;
    double t0 = std::sqrt(std::max(rest, 0.0));
    return {t0, t1, t2, t3};
}

struct LikelihoodEval {
    double value = 0.0;
    std::array<double, 4> grad{};
};

template <bool WithGrad>
inline LikelihoodEval log_likelihood(const std::array<double, 4>& t, const Counts& counts,
                                     double shots_per_basis, LikelihoodModel model) {
    LikelihoodEval out;
    Mat2 gram = cholesky_gram(t);
    double tr = gram.trace().real();
    Mat2 rho = (cplx(1.0 / tr, 0.0)) * gram;
    Vec3 p = bloch_of(rho);
    auto probs = outcome_probabilities(p);
    [[maybe_unused]] auto axes = projector_axes();

    std::array<Mat2, 4> drho{};
    if constexpr (WithGrad) {
        for (int i = 0; i < 4; ++i) {
            Mat2 dg = cholesky_gram_derivative(t, i);
            double dtr = dg.trace().real();
            drho[std::size_t(i)] = (cplx(1.0 / tr, 0.0)) * (dg - cplx(dtr, 0.0) * rho);
        }
    }

    for (int k = 0; k < 6; ++k) {
        double pk = std::max(probs[std::size_t(k)], 1e-300);
        double model_count = shots_per_basis * pk;
        double ck = counts[std::size_t(k)];
        double dl_dp;  // d(loglik)/d(pk) weight applied to dp below
        if (model == LikelihoodModel::Poisson) {
            out.value += -model_count;
            if (ck > 0.0) out.value += ck * std::log(model_count);
            dl_dp = ck / pk - shots_per_basis;
        } else {
            double w = 1.0 / std::max(ck, 1.0);
            out.value += -0.5 * w * (ck - model_count) * (ck - model_count);
            dl_dp = w * (ck - model_count) * shots_per_basis;
        }
        if constexpr (WithGrad) {
            for (int i = 0; i < 4; ++i) {
                Vec3 dp = bloch_of(drho[std::size_t(i)]);
                out.grad[std::size_t(i)] += dl_dp * 0.5 * axes[std::size_t(k)].dot(dp);
            }
        }
    }
    return out;
}

}  // namespace detail

/// Maximum-likelihood state reconstruction from the six counts. Gradient
/// ascent with Armijo backtracking on the Cholesky parameters, seeded from the
/// (clipped) linear inversion; the per-basis shot number is estimated as the
/// grand total over the three bases.
inline MleResult mle_reconstruct(const Counts& counts, const MleOptions& opt = {}) {
    double total = 0.0;
    for (double c : counts) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("counts must be non-negative");
        total += c;
    }
    if (!(total > 0.0)) throw std::invalid_argument("all counts are zero");
    double shots = total / 3.0;

    Vec3 seed = linear_inversion(counts);
    double nrm = seed.norm();
    if (nrm > 0.99) seed = (0.99 / nrm) * seed;
    std::array<double, 4> t = detail::cholesky_params(density_from_bloch(seed).rho);

    auto eval = detail::log_likelihood<true>(t, counts, shots, opt.model);
    double step = 1.0 / shots;
    MleResult res;
    int it = 0;
    for (; it < opt.max_iters; ++it) {
        double gnorm = std::sqrt(eval.grad[0] * eval.grad[0] + eval.grad[1] * eval.grad[1] +
                                 eval.grad[2] * eval.grad[2] + eval.grad[3] * eval.grad[3]);
        if (gnorm <= opt.grad_tol) {
            res.converged = true;
            break;
        }
        // Armijo backtracking along the gradient
        bool advanced = false;
        for (int back = 0; back < 60; ++back) {
            std::array<double, 4> trial = t;
            for (int i = 0; i < 4; ++i) trial[std::size_t(i)] += step * eval.grad[std::size_t(i)];
            auto trial_eval = detail::log_likelihood<true>(trial, counts, shots, opt.model);
            // the sufficient-decrease margin can round to zero against a large
            // likelihood, so demand a strictly better value as well; otherwise
            // the search treads water at machine precision instead of stopping
            if (trial_eval.value > eval.value &&
                trial_eval.value >= eval.value + 1e-4 * step * gnorm * gnorm) {
                t = trial;
                eval = trial_eval;
                step *= 2.0;  // be optimistic again
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if (!advanced) {
            // step underflow: no double-precision improvement exists along the
            // gradient, which happens at boundary (pure-state) optima where the
            // gradient norm plateaus above the tolerance
            res.converged = true;
            break;
        }
    }
    Mat2 gram = detail::cholesky_gram(t);
    Mat2 rho = (cplx(1.0 / gram.trace().real(), 0.0)) * gram;
    res.rho = PolarizationState{rho};
    res.bloch = bloch_from_density(res.rho);
    res.loglik = eval.value;
    res.iterations = it;
    return res;
}

}  // namespace ringpol
