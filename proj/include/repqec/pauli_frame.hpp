#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "repqec/circuit.hpp"
#include "repqec/decoder.hpp"

namespace repqec {

/// Gate-level stochastic bit-flip simulation of the same circuits, valid as
/// a physics cross-check at c = 0 where the X-type channel is a classical
/// flip with probability p. Independent of the Kraus-sequence reduction:
/// the circuit-based walker propagates error bits through the explicit
/// prep / CNOT / CNOT / measure timetable.
struct PauliFrameResult {
    SyndromeGrid syndromes;
    std::vector<uint8_t> final_errors;  // residual X frame on the data qubits
};

PauliFrameResult sample_pauli_frame(const CircuitConfig& config, std::mt19937_64& rng);

LogicalErrorEstimate estimate_logical_error_pauli_frame(const CircuitConfig& config,
                                                        uint64_t samples, uint64_t seed,
                                                        int workers = 1);

/// All single-fault locations of the circuit-based gate-level circuit with
/// their probability coefficients (fault fires with coefficient * p), the
/// defect pair each creates, and the residual data flip it leaves. This is
/// the generator of the leading-order decoder weights.
std::vector<LeadingOrderEdge> enumerate_single_faults(int n, int T);

}  // namespace repqec
