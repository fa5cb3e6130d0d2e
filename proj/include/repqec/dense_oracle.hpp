#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

#include "repqec/circuit.hpp"
#include "repqec/kraus.hpp"
#include "repqec/pauli.hpp"

namespace repqec {

/// Brute-force statevector realization of the same Kraus processes, used as
/// ground truth for the Gaussian-state path. Intentionally slow and simple.
/// Qubit 0 is the lowest bit of the amplitude index.
struct DenseState {
    int n_qubits = 0;
    std::vector<std::complex<double>> amp;

    static DenseState ghz_plus(int n_qubits);
    static DenseState plus_state(int n_qubits);
    static DenseState zero_state(int n_qubits);
};

void apply_x_rotation_dense(DenseState& st, int qubit, double phi, double weight);
void apply_parity_dense(DenseState& st, int site, int s, double phi, double weight);
void apply_pauli_dense(DenseState& st, const PauliString& p);
/// sqrt(w)/2 (I + (-1)^s e^{-2 i theta} S) for an arbitrary Pauli S.
void apply_projector_dense(DenseState& st, const PauliString& stabilizer, int s,
                           double theta, double weight);
void apply_kraus_dense(DenseState& st, const KrausSpec& spec);

double gamma_dense(const DenseState& st);
/// <psi| R^dag (I - Z_{n-1} Z_n)/2 R |psi> for R = prod X_q^{r_q} over the
/// data qubits 0..n-2 of an (n_data + 1)-qubit state (q = n-1 is the ancilla
/// of the readout trick).
double gamma_l_dense(const DenseState& st, const std::vector<int>& recovery);
std::complex<double> inner_product_dense(const DenseState& a, const DenseState& b);
std::complex<double> pauli_expectation_dense(const DenseState& st, const PauliString& p);

/// Covariance matrix M_ij = -i <psi|c_i c_j|psi> / <psi|psi> (i != j) from
/// the explicit Jordan-Wigner Majorana strings.
Eigen::MatrixXd covariance_dense(const DenseState& st);

struct ExactDistribution {
    double p_l = 0.0;               // sum of Gamma_L over all leaves
    double total_probability = 0.0; // sum of Gamma over all leaves
    uint64_t leaves = 0;
    std::map<std::vector<uint8_t>, double> syndrome_probs;
};

/// Depth-first traversal of every (phi, s) branch of a schedule, decoding
/// each leaf with the given weighting. Exact up to the stated branch cap.
ExactDistribution enumerate_distribution(const CircuitSchedule& schedule,
                                         DecoderWeighting weighting,
                                         double decoder_p = 0.0,
                                         uint64_t max_leaves = 10000000);

}  // namespace repqec
