#pragma once

// Recover the phase-noise parameters (phi0, sigma_phi) from measured decay
// records. Two entry points: a 1-d purity fit for dephasing-dominated data,
// and a full Stokes-trajectory fit that runs the quadrature engine as forward
// model over a coarse grid followed by a compass (pattern) refinement.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "engine.hpp"

namespace ringpol {

struct SigmaFit {
    double sigma_phi = 0.0;
    double rss = 0.0;      // residual sum of squares over the informative points
    int points_used = 0;
};

/// Fit sigma_phi to purity-vs-n data assuming pure dephasing,
/// purity(n) = (1 + exp(-2 n^2 sigma^2)) / 2. Saturated points (purity
/// indistinguishable from 1) carry no information and are excluded; at least
/// five informative points are required.
inline SigmaFit fit_sigma_phi(const std::vector<DecayRecord>& records) {
    std::vector<DecayRecord> pts;
    for (const auto& r : records)
        if (r.purity < 1.0 - 1e-4) pts.push_back(r);
    if (pts.size() < 5)
        throw std::invalid_argument("need at least 5 records with purity below 1 - 1e-4");

    auto rss = [&pts](double sigma) {
        double acc = 0.0;
        for (const auto& r : pts) {
            double d = dephasing_purity(r.n, sigma) - r.purity;
            acc += d * d;
        }
        return acc;
    };

    // coarse bracket over the supported noise range, then golden-section
    double best_s = 0.0, best_v = std::numeric_limits<double>::infinity();
    const double step = 0.0025;
    for (double s = 0.0; s <= 0.3 + 1e-12; s += step) {
        double v = rss(s);
        if (v < best_v) { best_v = v; best_s = s; }
    }
    double lo = std::max(0.0, best_s - step), hi = std::min(0.3, best_s + step);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = rss(c), fd = rss(d);
    while (hi - lo > 1e-10) {
        if (fc < fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo);
            fc = rss(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo);
            fd = rss(d);
        }
    }
    SigmaFit out;
    out.sigma_phi = 0.5 * (lo + hi);
    out.rss = rss(out.sigma_phi);
    out.points_used = int(pts.size());
    return out;
}

/// One measured Bloch trajectory together with the launch state it belongs to.
struct StokesSeries {
    Vec3 input;
    std::vector<DecayRecord> records;
};

struct FullFit {
    double phi0 = 0.0;
    double sigma_phi = 0.0;
    double phi0_err = 0.0;       // Gauss-Newton 1-sigma estimates
    double sigma_phi_err = 0.0;
    double rss = 0.0;
    int evaluations = 0;
    bool converged = true;       // false when the refinement budget ran out mid-descent
};

namespace detail {

struct StokesObjective {
    const CavityConfig& cavity;
    const std::vector<StokesSeries>& series;
    int quad_order;
    mutable int evals = 0;

    // stacked residuals (3 per record) of the quadrature forward model
    std::vector<double> residuals(double phi0, double sigma) const {
        ++evals;
        PhaseDistribution dist{phi0, sigma};
        WeightedRotations rot =
            decompose_trips(cavity, draw_phase_samples(dist, QuadratureMethod{quad_order}));
        std::size_t total = 0;
        for (const auto& s : series) total += s.records.size();
        std::vector<double> r;
        r.reserve(3 * total);
        for (const auto& s : series) {
            for (const auto& rec : s.records) {
                Vec3 model = propagate(rot, s.input, rec.n);
                r.push_back(model.x - rec.bloch.x);
                r.push_back(model.y - rec.bloch.y);
                r.push_back(model.z - rec.bloch.z);
            }
        }
        return r;
    }

    double rss(double phi0, double sigma) const {
        double acc = 0.0;
        for (double v : residuals(phi0, sigma)) acc += v * v;
        return acc;
    }
};

inline FullFit fit_full_core(const CavityConfig& cavity, const std::vector<StokesSeries>& series,
                             int quad_order) {
    cavity.validate();
    std::size_t total = 0;
    for (const auto& s : series) {
        if (std::abs(s.input.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("input Bloch vectors must be unit length");
        total += s.records.size();
    }
    if (total < 3) throw std::invalid_argument("need at least 3 records to fit two parameters");
    StokesObjective obj{cavity, series, quad_order};

    double best_p = 0.0, best_s = 0.0, best_v = std::numeric_limits<double>::infinity();
    for (double p = -kPi / 2.0; p <= kPi / 2.0 + 1e-12; p += 0.02) {
        for (double s = 0.0; s <= 0.3 + 1e-12; s += 0.01) {
            double v = obj.rss(p, s);
            if (v < best_v) { best_v = v; best_p = p; best_s = s; }
        }
    }

    // compass refinement: try +-step in each coordinate, halve on failure
    double step_p = 0.02, step_s = 0.01;
    int guard = 0;
    while ((step_p > 1e-7 || step_s > 1e-7) && ++guard < 20000) {
        bool improved = false;
        const double cand[4][2] = {{best_p + step_p, best_s},
                                   {best_p - step_p, best_s},
                                   {best_p, best_s + step_s},
                                   {best_p, best_s - step_s}};
        for (const auto& c : cand) {
            if (c[1] < 0.0) continue;
            double v = obj.rss(c[0], c[1]);
            if (v < best_v - 1e-15) {
                best_v = v; best_p = c[0]; best_s = c[1];
                improved = true;
                break;
            }
        }
        if (!improved) {
            step_p *= 0.5;
            step_s *= 0.5;
        }
    }

    FullFit out;
    out.phi0 = best_p;
    out.sigma_phi = best_s;
    out.rss = best_v;
    out.converged = step_p <= 1e-7 && step_s <= 1e-7;

    // Gauss-Newton covariance from the FD Jacobian of the residual vector
    const double hp = 1e-5, hs = 1e-5;
    auto r0 = obj.residuals(best_p, best_s);
    auto rp = obj.residuals(best_p + hp, best_s);
    auto rs = obj.residuals(best_p, best_s + hs);
    double jtj[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < r0.size(); ++i) {
        double jp = (rp[i] - r0[i]) / hp;
        double js = (rs[i] - r0[i]) / hs;
        jtj[0][0] += jp * jp;
        jtj[0][1] += jp * js;
        jtj[1][1] += js * js;
    }
    jtj[1][0] = jtj[0][1];
    double det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
    std::size_t m = r0.size();
    if (det > 1e-30 && m > 2) {
        double var = best_v / double(m - 2);
        out.phi0_err = std::sqrt(std::max(0.0, var * jtj[1][1] / det));
        out.sigma_phi_err = std::sqrt(std::max(0.0, var * jtj[0][0] / det));
    }
    out.evaluations = obj.evals;
    return out;
}

}  // namespace detail

/// Joint fit of (phi0, sigma_phi) to Bloch trajectories from two or more
/// launch states. Coarse grid over phi0 in [-pi/2, pi/2] (step 0.02) and
/// sigma in [0, 0.3] (step 0.01), then compass search with halving steps down
/// to 1e-7. Parameter standard errors come from the finite-difference Jacobian
/// at the optimum (Gauss-Newton). A single launch state often identifies both
/// parameters too; the convenience overload below accepts one series.
inline FullFit fit_full(const CavityConfig& cavity, const std::vector<StokesSeries>& series,
                        int quad_order = 64) {
    if (series.size() < 2)
        throw std::invalid_argument("joint fit needs series for at least two input states");
    return detail::fit_full_core(cavity, series, quad_order);
}

inline FullFit fit_full(const CavityConfig& cavity, const Vec3& input,
                        const std::vector<DecayRecord>& data, int quad_order = 64) {
    std::vector<StokesSeries> one{{input, data}};
    return detail::fit_full_core(cavity, one, quad_order);
}

}  // namespace ringpol
