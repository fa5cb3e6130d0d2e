#include "repqec/circuit.hpp"

#include <cmath>
#include <stdexcept>

#include "repqec/decoder.hpp"
#include "repqec/errors.hpp"
#include "repqec/rng.hpp"
#include "repqec/runner.hpp"

namespace repqec {

CircuitConfig CircuitConfig::make(CircuitModel model, int n, int T, const NoiseModel& noise,
                                  DecoderWeighting w) {
    if (n < 3) throw std::invalid_argument("CircuitConfig: n >= 3 required");
    if (T < 1) throw std::invalid_argument("CircuitConfig: T >= 1 required");
    CircuitConfig c;
    c.model = model;
    c.n = n;
    c.T = T;
    c.noise = noise;
    c.weighting = w;
    return c;
}

namespace {

// Allocation of one CNOT's two-qubit noise map onto a single-qubit noise:
// target-after with p_IX, control-after with p_XI, control-before with p_XX.
enum class CnotNoise : uint8_t { TargetAfter, ControlAfter, ControlBefore };

CnotNoise draw_allocation(const NoiseModel& nm, std::mt19937_64& rng) {
    double u = uniform01(rng);
    if (u < nm.p_ix) return CnotNoise::TargetAfter;
    if (u < nm.p_ix + nm.p_xi) return CnotNoise::ControlAfter;
    return CnotNoise::ControlBefore;
}

}  // namespace

CircuitSchedule build_schedule(const CircuitConfig& config, std::mt19937_64& rng) {
    const int n = config.n, T = config.T;
    const NoiseModel& nm = config.noise;
    CircuitSchedule sch;
    sch.n = n;
    sch.T = T;
    // pmf 0: one noise map; pmfs 1..3: binomial with N = 2..4 maps on a
    // measurement qubit (prep + meas + up to two target-after allocations).
    sch.pmfs.push_back(pmf_simple(nm.theta, nm.c));
    if (config.model == CircuitModel::CircuitBased)
        for (int N = 2; N <= 4; ++N) sch.pmfs.push_back(pmf_binomial(N, nm.theta, nm.c));

    auto noise_item = [](int q, int pmf_id) {
        return ScheduleItem{ScheduleItem::Kind::NoiseSite, static_cast<int16_t>(q), -1,
                            static_cast<int16_t>(pmf_id)};
    };

    for (int y = 0; y < T; ++y) {
        if (config.model == CircuitModel::Phenomenological) {
            for (int q = 0; q < n; ++q) sch.items.push_back(noise_item(q, 0));
            for (int x = 0; x < n - 1; ++x)
                sch.items.push_back({ScheduleItem::Kind::Parity, static_cast<int16_t>(x),
                                     static_cast<int16_t>(y), 0});
            continue;
        }

        // Circuit-based cycle: prep row, CNOT(d_x -> a_x) layer, CNOT(d_{x+1}
        // -> a_x) layer, measurement row. Every qubit receives one noise
        // event per step; CNOT pairs share the allocated two-qubit map.
        std::vector<CnotNoise> first(n - 1), second(n - 1);
        std::vector<int> n_maps(n - 1, 2);  // prep + measurement noise
        for (int x = 0; x < n - 1; ++x) {
            first[x] = draw_allocation(nm, rng);
            second[x] = draw_allocation(nm, rng);
            if (first[x] == CnotNoise::TargetAfter) ++n_maps[x];
            if (second[x] == CnotNoise::TargetAfter) ++n_maps[x];
        }

        // Step 1: all data qubits idle.
        for (int q = 0; q < n; ++q) sch.items.push_back(noise_item(q, 0));
        // Step 2 control-before noises, and the data qubit idle in layer 2.
        for (int x = 0; x < n - 1; ++x)
            if (first[x] == CnotNoise::ControlBefore) sch.items.push_back(noise_item(x, 0));
        sch.items.push_back(noise_item(n - 1, 0));
        // Parity measurements, descending site order: a_x reads d_x at layer
        // 2 and d_{x+1} at layer 3, so d_{x+1}'s layer-2 aftermath must
        // precede a_x while d_x's must follow it.
        for (int x = n - 2; x >= 0; --x) {
            if (second[x] == CnotNoise::ControlBefore)
                sch.items.push_back(noise_item(x + 1, 0));
            sch.items.push_back({ScheduleItem::Kind::Parity, static_cast<int16_t>(x),
                                 static_cast<int16_t>(y),
                                 static_cast<int16_t>(n_maps[x] - 1)});
            if (first[x] == CnotNoise::ControlAfter) sch.items.push_back(noise_item(x, 0));
        }
        // Step 3 control-after noises, and the data qubit idle in layer 3.
        for (int x = 0; x < n - 1; ++x)
            if (second[x] == CnotNoise::ControlAfter) sch.items.push_back(noise_item(x + 1, 0));
        sch.items.push_back(noise_item(0, 0));
        // Step 4: all data qubits idle while the ancillas are measured.
        for (int q = 0; q < n; ++q) sch.items.push_back(noise_item(q, 0));
    }

    // Decoding round: one noise map per data qubit, then ideal parities.
    for (int q = 0; q < n; ++q)
        sch.items.push_back({ScheduleItem::Kind::FinalNoise, static_cast<int16_t>(q), -1, 0});
    for (int x = 0; x < n - 1; ++x)
        sch.items.push_back({ScheduleItem::Kind::FinalIdealParity, static_cast<int16_t>(x),
                             static_cast<int16_t>(T), -1});
    return sch;
}

Trajectory sample_trajectory(const CircuitSchedule& schedule, std::mt19937_64& rng) {
    const int n = schedule.n, T = schedule.T;
    const int m = n + 1;
    Trajectory traj;
    traj.final_state = make_ghz_plus(m);
    traj.syndromes.n_sites = n - 1;
    traj.syndromes.n_rounds = T + 1;
    traj.syndromes.bits.assign(static_cast<size_t>(n - 1) * (T + 1), 0);
    double log_prob = 0.0;

    GaussianState& st = traj.final_state;
    for (const ScheduleItem& item : schedule.items) {
        switch (item.kind) {
            case ScheduleItem::Kind::NoiseSite:
            case ScheduleItem::Kind::FinalNoise: {
                const OutcomePmf& pmf = schedule.pmfs[item.pmf_id];
                const auto& e = pmf.support[pmf.sample(rng)];
                apply_fgo(st, noise_fgo(item.index, e.phi, e.weight, m));
                log_prob += std::log(e.weight);
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
                GaussianOp op0 = parity_fgo(item.index, 0, phi, weight, m);
                GaussianOp op1 = parity_fgo(item.index, 1, phi, weight, m);
                double det0 = std::max(branch_det(st, op0), 0.0);
                double det1 = std::max(branch_det(st, op1), 0.0);
                if (det0 <= kEpsProb && det1 <= kEpsProb)
                    throw NumericalDegeneracy("both parity branches vanish");
                double b0 = std::sqrt(det0), b1 = std::sqrt(det1);
                int s;
                if (det0 <= kEpsProb) s = 1;
                else if (det1 <= kEpsProb) s = 0;
                else s = (uniform01(rng) * (b0 + b1) < b0) ? 0 : 1;
                apply_fgo(st, s == 0 ? op0 : op1);
                traj.syndromes.at(item.index, item.cycle) = static_cast<uint8_t>(s);
                // branch probability: weight * sqrt(det_s) / 2
                log_prob += std::log(weight) - std::log(2.0) + std::log(s == 0 ? b0 : b1);
                break;
            }
        }
    }
    traj.log_gamma = log_prob;
    return traj;
}

double logical_failure_fraction(const Trajectory& traj, const std::vector<int>& recovery) {
    const int n = traj.final_state.modes() - 1;
    if (static_cast<int>(recovery.size()) != n)
        throw std::invalid_argument("recovery mask must cover the data qubits");
    double zz = bilinear_expectation(traj.final_state, 2 * n, 2 * n - 1);
    double sign = recovery[n - 1] ? -1.0 : 1.0;
    double value = 0.5 * (1.0 - sign * zz);
    if (value < -1e-9 || value > 1.0 + 1e-9)
        throw InternalInvariantViolation("logical failure fraction outside [0, 1]");
    return std::min(1.0, std::max(0.0, value));
}

std::vector<int> decode_syndromes(const SyndromeGrid& syndromes, int n, int T,
                                  DecoderWeighting weighting, double p) {
    DefectSet defects = difference_syndromes(syndromes);
    MatchingGraph graph = build_matching_graph(defects, n, T, WeightingSpec{weighting, p});
    Matching matching = mwpm(graph);
    return recovery_from_matching(graph, matching);
}

std::vector<int> decode_trajectory(const Trajectory& traj, const CircuitConfig& config) {
    return decode_syndromes(traj.syndromes, config.n, config.T, config.weighting,
                            config.noise.p);
}

LogicalErrorEstimate estimate_logical_error(const CircuitConfig& config, uint64_t samples,
                                            uint64_t seed, int workers) {
    if (samples < 1) throw std::invalid_argument("samples >= 1 required");
    std::atomic<uint64_t> degenerate{0};

    CircuitSchedule fixed_schedule;
    if (config.model == CircuitModel::Phenomenological) {
        std::mt19937_64 rng(0);
        fixed_schedule = build_schedule(config, rng);
    }

    auto one_sample = [&](uint64_t k) -> double {
        for (uint64_t retry = 0;; ++retry) {
            std::mt19937_64 rng = sample_stream(seed, k, retry);
            try {
                Trajectory traj;
                if (config.model == CircuitModel::Phenomenological) {
                    traj = sample_trajectory(fixed_schedule, rng);
                } else {
                    CircuitSchedule sch = build_schedule(config, rng);
                    traj = sample_trajectory(sch, rng);
                }
                return logical_failure_fraction(traj, decode_trajectory(traj, config));
            } catch (const NumericalDegeneracy&) {
                degenerate.fetch_add(1);
                if (retry > 100)
                    throw InternalInvariantViolation("persistent numerical degeneracy");
            }
        }
    };

    std::vector<double> values = run_parallel(samples, workers, one_sample);
    MeanStderr ms = mean_stderr(values);
    LogicalErrorEstimate est;
    est.p_l = ms.mean;
    est.stderr_ = ms.stderr_;
    est.degenerate_count = degenerate.load();
    est.samples = samples;
    return est;
}

}  // namespace repqec
