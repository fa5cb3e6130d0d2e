#include "repqec/pauli_frame.hpp"

#include <functional>
#include <stdexcept>

#include "repqec/errors.hpp"
#include "repqec/rng.hpp"
#include "repqec/runner.hpp"

namespace repqec {

namespace {

// Fault hooks: `flip(kind, cycle, index)` decides single-qubit faults,
// `cnot(layer, cycle, site)` returns the two-qubit fault pattern after a
// CNOT as a bit pair (control_flip | target_flip << 1).
struct FrameHooks {
    std::function<bool(int kind, int cycle, int index)> flip;
    std::function<int(int layer, int cycle, int site)> cnot;
};

enum FaultKind {
    kDataStep1,
    kDataIdle2,
    kDataIdle3,
    kDataStep4,
    kAncPrep,
    kAncMeas,
    kPhenomData,
    kPhenomMeas,
    kFinalData
};

PauliFrameResult run_frame(const CircuitConfig& config, const FrameHooks& h) {
    const int n = config.n, T = config.T;
    PauliFrameResult result;
    result.syndromes.n_sites = n - 1;
    result.syndromes.n_rounds = T + 1;
    result.syndromes.bits.assign(static_cast<size_t>(n - 1) * (T + 1), 0);
    std::vector<uint8_t> e(n, 0), a(n - 1, 0);

    for (int y = 0; y < T; ++y) {
        if (config.model == CircuitModel::Phenomenological) {
            for (int q = 0; q < n; ++q) e[q] ^= h.flip(kPhenomData, y, q);
            for (int x = 0; x < n - 1; ++x)
                result.syndromes.at(x, y) =
                    static_cast<uint8_t>(e[x] ^ e[x + 1] ^ h.flip(kPhenomMeas, y, x));
            continue;
        }
        // Step 1: ancilla preparation, data idle.
        for (int x = 0; x < n - 1; ++x) a[x] = h.flip(kAncPrep, y, x) ? 1 : 0;
        for (int q = 0; q < n; ++q) e[q] ^= h.flip(kDataStep1, y, q);
        // Step 2: CNOT(d_x -> a_x); data qubit n-1 idle.
        for (int x = 0; x < n - 1; ++x) {
            a[x] ^= e[x];
            int f = h.cnot(2, y, x);
            e[x] ^= f & 1;
            a[x] ^= (f >> 1) & 1;
        }
        e[n - 1] ^= h.flip(kDataIdle2, y, n - 1);
        // Step 3: CNOT(d_{x+1} -> a_x); data qubit 0 idle.
        for (int x = 0; x < n - 1; ++x) {
            a[x] ^= e[x + 1];
            int f = h.cnot(3, y, x);
            e[x + 1] ^= f & 1;
            a[x] ^= (f >> 1) & 1;
        }
        e[0] ^= h.flip(kDataIdle3, y, 0);
        // Step 4: measurement noise, data idle, readout.
        for (int q = 0; q < n; ++q) e[q] ^= h.flip(kDataStep4, y, q);
        for (int x = 0; x < n - 1; ++x) {
            a[x] ^= h.flip(kAncMeas, y, x);
            result.syndromes.at(x, y) = a[x];
        }
    }

    for (int q = 0; q < n; ++q) e[q] ^= h.flip(kFinalData, T, q);
    for (int x = 0; x < n - 1; ++x)
        result.syndromes.at(x, T) = static_cast<uint8_t>(e[x] ^ e[x + 1]);
    result.final_errors = e;
    return result;
}

}  // namespace

PauliFrameResult sample_pauli_frame(const CircuitConfig& config, std::mt19937_64& rng) {
    const double p = config.noise.p;
    const NoiseModel& nm = config.noise;
    FrameHooks h;
    h.flip = [&](int, int, int) { return uniform01(rng) < p; };
    h.cnot = [&](int, int, int) -> int {
        // p_XI E(X_c I_t) + p_IX E(I_c X_t) + p_XX E(X_c X_t) after the gate
        double u = uniform01(rng);
        bool fires = uniform01(rng) < p;
        if (!fires) return 0;
        if (u < nm.p_xi) return 1;
        if (u < nm.p_xi + nm.p_ix) return 2;
        return 3;
    };
    return run_frame(config, h);
}

LogicalErrorEstimate estimate_logical_error_pauli_frame(const CircuitConfig& config,
                                                        uint64_t samples, uint64_t seed,
                                                        int workers) {
    auto one_sample = [&](uint64_t k) -> double {
        std::mt19937_64 rng = sample_stream(seed, k);
        PauliFrameResult r = sample_pauli_frame(config, rng);
        DefectSet d = difference_syndromes(r.syndromes);
        MatchingGraph g = build_matching_graph(d, config.n, config.T,
                                               WeightingSpec{config.weighting, config.noise.p});
        std::vector<int> rec = recovery_from_matching(g, mwpm(g));
        return (rec[config.n - 1] ^ r.final_errors[config.n - 1]) ? 1.0 : 0.0;
    };
    std::vector<double> values = run_parallel(samples, workers, one_sample);
    MeanStderr ms = mean_stderr(values);
    return LogicalErrorEstimate{ms.mean, ms.stderr_, 0, samples};
}

std::vector<LeadingOrderEdge> enumerate_single_faults(int n, int T) {
    CircuitConfig config;
    config.model = CircuitModel::CircuitBased;
    config.n = n;
    config.T = T;
    config.noise = NoiseModel::make(0.0, 0.0);

    struct Loc {
        bool is_cnot;
        int kind_or_layer;
        int cycle;
        int index;
        int pattern;  // CNOT fault pattern 1..3
        double coef;
    };
    std::vector<Loc> locs;
    for (int y = 0; y < T; ++y) {
        for (int q = 0; q < n; ++q) {
            locs.push_back({false, kDataStep1, y, q, 0, 1.0});
            locs.push_back({false, kDataStep4, y, q, 0, 1.0});
        }
        locs.push_back({false, kDataIdle2, y, n - 1, 0, 1.0});
        locs.push_back({false, kDataIdle3, y, 0, 0, 1.0});
        for (int x = 0; x < n - 1; ++x) {
            locs.push_back({false, kAncPrep, y, x, 0, 1.0});
            locs.push_back({false, kAncMeas, y, x, 0, 1.0});
            for (int layer : {2, 3})
                for (int pattern : {1, 2, 3})
                    locs.push_back({true, layer, y, x, pattern, 1.0 / 3.0});
        }
    }
    for (int q = 0; q < n; ++q) locs.push_back({false, kFinalData, T, q, 0, 1.0});

    std::vector<LeadingOrderEdge> edges;
    for (const Loc& loc : locs) {
        FrameHooks h;
        h.flip = [&](int kind, int cycle, int index) {
            return !loc.is_cnot && kind == loc.kind_or_layer && cycle == loc.cycle &&
                   index == loc.index;
        };
        h.cnot = [&](int layer, int cycle, int site) -> int {
            if (loc.is_cnot && layer == loc.kind_or_layer && cycle == loc.cycle &&
                site == loc.index)
                return loc.pattern;
            return 0;
        };
        PauliFrameResult r = run_frame(config, h);
        DefectSet d = difference_syndromes(r.syndromes);
        int flip_qubit = -1, flips = 0;
        for (int q = 0; q < n; ++q)
            if (r.final_errors[q]) {
                flip_qubit = q;
                ++flips;
            }
        if (flips > 1)
            throw InternalInvariantViolation("single fault flipped multiple data qubits");
        if (d.defects.empty()) {
            if (flips != 0)
                throw InternalInvariantViolation("undetectable fault with a residual flip");
            continue;
        }
        LeadingOrderEdge e;
        e.prob_coefficient = loc.coef;
        e.flip_qubit = flip_qubit;
        if (d.defects.size() == 1) {
            e.a = d.defects[0];
            e.b_is_boundary = true;
        } else if (d.defects.size() == 2) {
            e.a = d.defects[0];
            e.b = d.defects[1];
        } else {
            throw InternalInvariantViolation("single fault created more than two defects");
        }
        edges.push_back(e);
    }
    return edges;
}

}  // namespace repqec
