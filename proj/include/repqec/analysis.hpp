#pragma once

#include <cstdint>
#include <vector>

#include "repqec/circuit.hpp"

namespace repqec {

struct PlPoint {
    double p = 0.0;
    int n = 0;
    double p_l = 0.0;
    double stderr_ = 0.0;
};

/// Parameters of the finite-size scaling ansatz
///   p_L(p, n) = a + b (p - p_th) n^{1/nu},
/// fitted by weighted least squares (nu is the exponent fitting parameter).
struct ThresholdFit {
    double a = 0.0, b = 0.0, nu = 1.0, p_th = 0.0;
    double a_err = 0.0, b_err = 0.0, nu_err = 0.0, p_th_err = 0.0;
    double residual = 0.0;  // chi^2 per degree of freedom
    int points = 0;
};

/// Multi-start grid over (p_th, nu) with an exact inner linear solve for
/// (a, b), then Nelder-Mead refinement. Uncertainties come from the local
/// quadratic model and from a parametric bootstrap; the larger is reported
/// for p_th. Throws FitDiverged when the optimum escapes the data range.
ThresholdFit fit_threshold(const std::vector<PlPoint>& data, int bootstrap = 200,
                           uint64_t seed = 1);

/// Restricts the rows to |p - crossing| <= window * crossing, where the
/// crossing is a coarse fit over all rows, then runs the full fit.
ThresholdFit fit_threshold_windowed(const std::vector<PlPoint>& data, double window,
                                    int bootstrap = 200, uint64_t seed = 1);

/// lambda(d, p) = p_L(d+2, p) / p_L(d, p).
double decay_rate(double pl_d, double pl_d2);

/// p_th(c) = p_th(0) / (1 + alpha c^2) with the leading-order alpha = 11/6.
double ansatz_threshold(double p_th0, double c, double alpha = 11.0 / 6.0);

struct PeffEstimate {
    double p_eff = 0.0;
    double stderr_ = 0.0;
    int x = 0, y = 0;
    double p = 0.0, c = 0.0;
};

/// Marginal probability of m_{x,y} = m_{x+1,y} = 1: both measurement qubits
/// adjacent to data qubit x+1 flip relative to the previous cycle. Requires
/// the circuit-based model and a measured (non-initial) cycle 1 <= y <= T-1.
PeffEstimate estimate_peff(const CircuitConfig& config, int x, int y, uint64_t samples,
                           uint64_t seed, int workers = 1);

}  // namespace repqec
