#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "repqec/fgs.hpp"
#include "repqec/kraus.hpp"

namespace repqec {

enum class CircuitModel { Phenomenological, CircuitBased };
enum class DecoderWeighting { Uniform, CircuitLeadingOrder };

/// One QEC run: n data qubits (code distance d = n), T noisy syndrome
/// cycles, a final round of noise plus ideal parity measurements.
struct CircuitConfig {
    CircuitModel model = CircuitModel::Phenomenological;
    int n = 3;
    int T = 2;
    NoiseModel noise;
    DecoderWeighting weighting = DecoderWeighting::Uniform;

    static CircuitConfig make(CircuitModel model, int n, int T, const NoiseModel& noise,
                              DecoderWeighting w = DecoderWeighting::Uniform);
};

struct ScheduleItem {
    enum class Kind : uint8_t { NoiseSite, Parity, FinalNoise, FinalIdealParity };
    Kind kind;
    int16_t index;  // data qubit (noise) or parity site, 0-based
    int16_t cycle;  // 0-based cycle for Parity items
    int16_t pmf_id;
};

/// Ordered circuit elements for one run. The element order encodes the
/// gate-level timing of the circuit-based model: noise on a data qubit
/// placed between the two CNOT layers of a cycle lands between the parity
/// elements that read the qubit before and after it (see
/// docs/noise_model.md). Circuit-based schedules are resampled per
/// trajectory (the noise allocation of the two-qubit CNOT channel is
/// probabilistic); phenomenological schedules are fixed.
struct CircuitSchedule {
    int n = 0;
    int T = 0;
    std::vector<ScheduleItem> items;
    std::vector<OutcomePmf> pmfs;
};

CircuitSchedule build_schedule(const CircuitConfig& config, std::mt19937_64& rng);

/// Measured parities s_{x,y}: sites x = 0..n-2, rounds y = 0..T where round
/// T holds the final ideal parities.
struct SyndromeGrid {
    int n_sites = 0;
    int n_rounds = 0;  // T + 1
    std::vector<uint8_t> bits;

    uint8_t at(int x, int y) const { return bits[static_cast<size_t>(y) * n_sites + x]; }
    uint8_t& at(int x, int y) { return bits[static_cast<size_t>(y) * n_sites + x]; }
};

struct Trajectory {
    SyndromeGrid syndromes;
    GaussianState final_state;
    double log_gamma = 0.0;  // sum of log branch probabilities
};

/// Samples one trajectory with Pr(t_k | t_{k-1}) = Gamma(t_k)/Gamma(t_{k-1}).
/// Noise angles are drawn directly from their pmfs (K^dag K is proportional
/// to the identity); parity outcomes are drawn from the two branch weights.
/// Throws NumericalDegeneracy when both parity branches fall below eps_prob.
Trajectory sample_trajectory(const CircuitSchedule& schedule, std::mt19937_64& rng);

/// Gamma_L(t)/Gamma(t) = (1 - (-1)^{r_{n-1}} M_{2n, 2n-1}) / 2 for the
/// 0-based recovery mask r over the data qubits.
double logical_failure_fraction(const Trajectory& traj, const std::vector<int>& recovery);

struct LogicalErrorEstimate {
    double p_l = 0.0;
    double stderr_ = 0.0;
    uint64_t degenerate_count = 0;
    uint64_t samples = 0;
};

/// Monte-Carlo estimate of p_L = <Gamma_L/Gamma> over trajectories decoded
/// by MWPM. Deterministic for fixed (config, samples, seed), independent of
/// the worker count.
LogicalErrorEstimate estimate_logical_error(const CircuitConfig& config, uint64_t samples,
                                            uint64_t seed, int workers = 1);

/// Decodes a syndrome grid (defect extraction, matching-graph build, exact
/// MWPM) and returns the recovery mask.
std::vector<int> decode_syndromes(const SyndromeGrid& syndromes, int n, int T,
                                  DecoderWeighting weighting, double p);

std::vector<int> decode_trajectory(const Trajectory& traj, const CircuitConfig& config);

}  // namespace repqec
