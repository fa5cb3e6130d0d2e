#include "repqec/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "repqec/decoder.hpp"
#include "repqec/errors.hpp"
#include "repqec/rng.hpp"
#include "repqec/runner.hpp"

namespace repqec {

namespace {

struct LinearSolve {
    double a = 0.0, b = 0.0, chi2 = 0.0;
};

// Weighted least squares for (a, b) at fixed (p_th, nu).
LinearSolve solve_ab(const std::vector<PlPoint>& data, double p_th, double nu) {
    double s_w = 0, s_x = 0, s_y = 0, s_xx = 0, s_xy = 0;
    for (const auto& d : data) {
        double x = (d.p - p_th) * std::pow(d.n, 1.0 / nu);
        double w = 1.0 / (d.stderr_ * d.stderr_);
        s_w += w;
        s_x += w * x;
        s_y += w * d.p_l;
        s_xx += w * x * x;
        s_xy += w * x * d.p_l;
    }
    double det = s_w * s_xx - s_x * s_x;
    LinearSolve r;
    if (std::abs(det) < 1e-300) {
        r.a = s_y / s_w;
        r.b = 0.0;
    } else {
        r.a = (s_xx * s_y - s_x * s_xy) / det;
        r.b = (s_w * s_xy - s_x * s_y) / det;
    }
    for (const auto& d : data) {
        double x = (d.p - p_th) * std::pow(d.n, 1.0 / nu);
        double res = (d.p_l - r.a - r.b * x) / d.stderr_;
        r.chi2 += res * res;
    }
    return r;
}

double model_value(const PlPoint& d, double a, double b, double nu, double p_th) {
    return a + b * (d.p - p_th) * std::pow(d.n, 1.0 / nu);
}

struct CoreFit {
    double a, b, nu, p_th, chi2;
};

CoreFit fit_core(const std::vector<PlPoint>& data) {
    double p_lo = 1e300, p_hi = -1e300;
    for (const auto& d : data) {
        p_lo = std::min(p_lo, d.p);
        p_hi = std::max(p_hi, d.p);
    }
    double best_chi2 = 1e300, best_pth = 0.5 * (p_lo + p_hi), best_nu = 1.5;
    for (int i = 0; i <= 60; ++i) {
        double p_th = p_lo + (p_hi - p_lo) * i / 60.0;
        for (double nu = 0.4; nu <= 6.0; nu *= 1.18) {
            LinearSolve s = solve_ab(data, p_th, nu);
            if (s.chi2 < best_chi2) {
                best_chi2 = s.chi2;
                best_pth = p_th;
                best_nu = nu;
            }
        }
    }

    // Nelder-Mead on (p_th, log nu) with the linear solve inside
    auto objective = [&](double p_th, double lnu) {
        return solve_ab(data, p_th, std::exp(lnu)).chi2;
    };
    struct Vertex {
        double x, y, f;
    };
    double step_p = std::max((p_hi - p_lo) / 60.0, 1e-6);
    std::vector<Vertex> simplex = {
        {best_pth, std::log(best_nu), 0},
        {best_pth + step_p, std::log(best_nu), 0},
        {best_pth, std::log(best_nu) + 0.1, 0}};
    for (auto& v : simplex) v.f = objective(v.x, v.y);
    for (int iter = 0; iter < 400; ++iter) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& l, const Vertex& r) { return l.f < r.f; });
        if (std::abs(simplex[2].f - simplex[0].f) < 1e-12 * (1.0 + simplex[0].f)) break;
        double cx = (simplex[0].x + simplex[1].x) / 2, cy = (simplex[0].y + simplex[1].y) / 2;
        Vertex refl{cx + (cx - simplex[2].x), cy + (cy - simplex[2].y), 0};
        refl.f = objective(refl.x, refl.y);
        if (refl.f < simplex[0].f) {
            Vertex exp_{cx + 2 * (cx - simplex[2].x), cy + 2 * (cy - simplex[2].y), 0};
            exp_.f = objective(exp_.x, exp_.y);
            simplex[2] = exp_.f < refl.f ? exp_ : refl;
        } else if (refl.f < simplex[1].f) {
            simplex[2] = refl;
        } else {
            Vertex con{cx + 0.5 * (simplex[2].x - cx), cy + 0.5 * (simplex[2].y - cy), 0};
            con.f = objective(con.x, con.y);
            if (con.f < simplex[2].f) {
                simplex[2] = con;
            } else {
                for (int k = 1; k < 3; ++k) {
                    simplex[k].x = (simplex[k].x + simplex[0].x) / 2;
                    simplex[k].y = (simplex[k].y + simplex[0].y) / 2;
                    simplex[k].f = objective(simplex[k].x, simplex[k].y);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& l, const Vertex& r) { return l.f < r.f; });
    double p_th = simplex[0].x, nu = std::exp(simplex[0].y);
    LinearSolve s = solve_ab(data, p_th, nu);

    double span = p_hi - p_lo;
    if (p_th < p_lo - 0.2 * span || p_th > p_hi + 0.2 * span)
        throw FitDiverged("fitted p_th escapes the data range: p_th = " + std::to_string(p_th) +
                          ", data p in [" + std::to_string(p_lo) + ", " + std::to_string(p_hi) +
                          "]");
    return {s.a, s.b, nu, p_th, s.chi2};
}

}  // namespace

ThresholdFit fit_threshold(const std::vector<PlPoint>& data, int bootstrap, uint64_t seed) {
    if (data.size() < 6) throw std::invalid_argument("fit_threshold needs at least 6 points");
    for (const auto& d : data)
        if (d.stderr_ <= 0.0) throw std::invalid_argument("stderr must be positive");

    CoreFit core = fit_core(data);

    ThresholdFit fit;
    fit.a = core.a;
    fit.b = core.b;
    fit.nu = core.nu;
    fit.p_th = core.p_th;
    fit.points = static_cast<int>(data.size());
    int dof = std::max(1, static_cast<int>(data.size()) - 4);
    fit.residual = core.chi2 / dof;

    // curvature covariance: (J^T W J)^{-1} with numeric Jacobian
    const int np = static_cast<int>(data.size());
    Eigen::MatrixXd J(np, 4);
    double theta[4] = {core.a, core.b, core.nu, core.p_th};
    for (int k = 0; k < 4; ++k) {
        double h = std::max(1e-7, 1e-6 * std::abs(theta[k]));
        for (int i = 0; i < np; ++i) {
            double tp[4], tm[4];
            for (int j = 0; j < 4; ++j) tp[j] = tm[j] = theta[j];
            tp[k] += h;
            tm[k] -= h;
            double fp = model_value(data[i], tp[0], tp[1], tp[2], tp[3]);
            double fm = model_value(data[i], tm[0], tm[1], tm[2], tm[3]);
            J(i, k) = (fp - fm) / (2 * h) / data[i].stderr_;
        }
    }
    Eigen::MatrixXd H = J.transpose() * J;
    Eigen::MatrixXd cov = H.ldlt().solve(Eigen::MatrixXd::Identity(4, 4));
    auto safe_err = [&](int k) {
        double v = cov(k, k);
        return v > 0 ? std::sqrt(v) : 0.0;
    };
    fit.a_err = safe_err(0);
    fit.b_err = safe_err(1);
    fit.nu_err = safe_err(2);
    fit.p_th_err = safe_err(3);

    if (bootstrap > 0) {
        std::mt19937_64 rng(splitmix64(seed));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> p_ths;
        p_ths.reserve(bootstrap);
        for (int rep = 0; rep < bootstrap; ++rep) {
            std::vector<PlPoint> resampled = data;
            for (auto& d : resampled) d.p_l += d.stderr_ * gauss(rng);
            try {
                p_ths.push_back(fit_core(resampled).p_th);
            } catch (const FitDiverged&) {
            }
        }
        if (p_ths.size() >= 10) {
            double mean = 0;
            for (double v : p_ths) mean += v;
            mean /= p_ths.size();
            double var = 0;
            for (double v : p_ths) var += (v - mean) * (v - mean);
            var /= (p_ths.size() - 1);
            fit.p_th_err = std::max(fit.p_th_err, std::sqrt(var));
        }
    }
    return fit;
}

ThresholdFit fit_threshold_windowed(const std::vector<PlPoint>& data, double window,
                                    int bootstrap, uint64_t seed) {
    ThresholdFit coarse = fit_threshold(data, 0, seed);
    std::vector<PlPoint> kept;
    for (const auto& d : data)
        if (std::abs(d.p - coarse.p_th) <= window * coarse.p_th) kept.push_back(d);
    if (kept.size() < 6 || kept.size() == data.size()) return fit_threshold(data, bootstrap, seed);
    return fit_threshold(kept, bootstrap, seed);
}

double decay_rate(double pl_d, double pl_d2) {
    if (pl_d <= 0.0) throw std::invalid_argument("decay_rate: p_L(d) must be positive");
    return pl_d2 / pl_d;
}

double ansatz_threshold(double p_th0, double c, double alpha) {
    if (p_th0 < 0.0 || p_th0 > 0.5 || c < 0.0 || c > 1.0)
        throw std::invalid_argument("ansatz_threshold: inputs out of range");
    return p_th0 / (1.0 + alpha * c * c);
}

PeffEstimate estimate_peff(const CircuitConfig& config, int x, int y, uint64_t samples,
                           uint64_t seed, int workers) {
    if (config.model != CircuitModel::CircuitBased)
        throw std::invalid_argument("estimate_peff is defined for the circuit-based model");
    if (x < 0 || x + 1 >= config.n - 1)
        throw std::invalid_argument("estimate_peff: need adjacent sites x, x+1");
    if (y < 1 || y >= config.T)
        throw std::invalid_argument("estimate_peff: cycle must satisfy 1 <= y <= T-1");

    auto one_sample = [&](uint64_t k) -> double {
        for (uint64_t retry = 0;; ++retry) {
            std::mt19937_64 rng = sample_stream(seed, k, retry);
            try {
                CircuitSchedule sch = build_schedule(config, rng);
                Trajectory traj = sample_trajectory(sch, rng);
                auto m = [&](int site) {
                    return traj.syndromes.at(site, y) ^ traj.syndromes.at(site, y - 1);
                };
                return (m(x) == 1 && m(x + 1) == 1) ? 1.0 : 0.0;
            } catch (const NumericalDegeneracy&) {
                if (retry > 100)
                    throw InternalInvariantViolation("persistent numerical degeneracy");
            }
        }
    };
    std::vector<double> values = run_parallel(samples, workers, one_sample);
    MeanStderr ms = mean_stderr(values);
    return PeffEstimate{ms.mean, ms.stderr_, x, y, config.noise.p, config.noise.c};
}

}  // namespace repqec
