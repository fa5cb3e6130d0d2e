#pragma once

// Shared helpers for the test suites: dense-statevector twins of the
// trajectory sampler. The dense sampler makes the same RNG draws in the
// same order as sample_trajectory, so a shared seed yields the same branch
// sequence and the two state representations can be compared step by step.

#include <cmath>
#include <random>
#include <vector>

#include "repqec/circuit.hpp"
#include "repqec/dense_oracle.hpp"
#include "repqec/errors.hpp"
#include "repqec/rng.hpp"

namespace repqec::testing {

struct DenseTrajectory {
    DenseState state;
    SyndromeGrid syndromes;
    double gamma = 1.0;
};

inline double parity_branch_gamma(const DenseState& st, int site, int s, double phi,
                                  double weight) {
    DenseState tmp = st;
    apply_parity_dense(tmp, site, s, phi, weight);
    return gamma_dense(tmp);
}

inline DenseTrajectory sample_trajectory_dense(const CircuitSchedule& schedule,
                                               std::mt19937_64& rng) {
    const int n = schedule.n, T = schedule.T;
    DenseTrajectory traj;
    traj.state = DenseState::ghz_plus(n + 1);
    traj.syndromes.n_sites = n - 1;
    traj.syndromes.n_rounds = T + 1;
    traj.syndromes.bits.assign(static_cast<size_t>(n - 1) * (T + 1), 0);

    for (const ScheduleItem& item : schedule.items) {
        switch (item.kind) {
            case ScheduleItem::Kind::NoiseSite:
            case ScheduleItem::Kind::FinalNoise: {
                const OutcomePmf& pmf = schedule.pmfs[item.pmf_id];
                const auto& e = pmf.support[pmf.sample(rng)];
                apply_x_rotation_dense(traj.state, item.index, e.phi, e.weight);
                break;
            }
            case ScheduleItem::Kind::Parity:
            case ScheduleItem::Kind::FinalIdealParity: {
                double phi = 0.0, weight = 1.0;
                if (item.kind == ScheduleItem::Kind::Parity) {
                    const OutcomePmf& pmf = schedule.pmfs[item.pmf_id];
                    const auto& e = pmf.support[pmf.sample(rng)];
                    phi = e.phi;
                    weight = e.weight;
                }
                double gtot = gamma_dense(traj.state);
                double g0 = parity_branch_gamma(traj.state, item.index, 0, phi, weight);
                double g1 = std::max(weight * gtot - g0, 0.0);
                // mirror the det(M - D) thresholds of the Gaussian sampler:
                // Gamma_s = (w/2) Gamma sqrt(det_s)
                double det0 = 2.0 * g0 / (weight * gtot), det1 = 2.0 * g1 / (weight * gtot);
                det0 *= det0;
                det1 *= det1;
                int s;
                if (det0 <= kEpsProb)
                    s = 1;
                else if (det1 <= kEpsProb)
                    s = 0;
                else
                    s = (uniform01(rng) * (g0 + g1) < g0) ? 0 : 1;
                apply_parity_dense(traj.state, item.index, s, phi, weight);
                traj.syndromes.at(item.index, item.cycle) = static_cast<uint8_t>(s);
                break;
            }
        }
    }
    traj.gamma = gamma_dense(traj.state);
    return traj;
}

}  // namespace repqec::testing
