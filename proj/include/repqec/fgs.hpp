#pragma once

#include <Eigen/Dense>
#include <vector>

#include "repqec/pauli.hpp"

namespace repqec {

/// Pure fermionic Gaussian state on m modes, described by the real
/// antisymmetric 2m x 2m covariance matrix M (satisfying M M^T = I) and the
/// norm Gamma = <psi|psi>, stored as log Gamma so that trajectories
/// multiplying hundreds of sub-unity branch weights do not underflow.
///
/// Majorana indices are 0-based throughout: qubit q carries c_{2q} and
/// c_{2q+1}, with c_{2q} = (prod_{j<q} X_j) Z_q and
/// c_{2q+1} = (prod_{j<q} X_j) Y_q.
struct GaussianState {
    Eigen::MatrixXd M;
    double log_gamma = 0.0;

    int modes() const { return static_cast<int>(M.rows()) / 2; }
};

/// Descriptor of a fermionic Gaussian operator through the Choi-state blocks
/// (A, B, D) and the scalar prefactor Gamma_G, stored sparsely: all catalog
/// operators differ from (A, B, D) = (0, I, 0) only on `support` (at most 4
/// Majorana indices). a_s, d_s and b_s hold those sub-blocks of A, D and
/// B - I. Dense 2m x 2m views are available for the reference path.
struct GaussianOp {
    int m = 0;
    std::vector<int> support;
    Eigen::MatrixXd a_s, d_s, b_s;
    double log_gamma_g = 0.0;
    bool rotation = false;  // A = D = 0, B orthogonal on the block

    Eigen::MatrixXd dense_A() const;
    Eigen::MatrixXd dense_B() const;
    Eigen::MatrixXd dense_D() const;
};

struct StateDiagnostics {
    double antisymmetry_violation = 0.0;  // max |M + M^T|
    double purity_violation = 0.0;        // max |M M^T - I|
    double log_gamma = 0.0;
};

/// FGS of (|0...0> + |1...1>)/sqrt(2) on n_qubits qubits with Gamma = 1.
GaussianState make_ghz_plus(int n_qubits);

/// FGS of |+>^{n_qubits} with Gamma = 1.
GaussianState make_plus_state(int n_qubits);

/// det(M - D) evaluated through the low-rank identity
/// det(M - D) = det(I + D_S M_SS); nonnegative up to roundoff.
double branch_det(const GaussianState& state, const GaussianOp& op);

/// log of the branch weight Gamma'/Gamma = Gamma_G sqrt(det(M - D)),
/// -inf when the branch probability is below eps_prob.
double branch_log_weight(const GaussianState& state, const GaussianOp& op);

/// Applies the operator through
///   M' = A - B (M - D)^{-1} B^T,
///   Gamma' = Gamma_G Gamma sqrt(det(M - D)),
/// using M^{-1} = -M plus a rank-<=4 Woodbury correction (O(m^2) per
/// update). M is re-antisymmetrized afterwards. Throws
/// ZeroProbabilityOutcome when det(M - D) <= eps_prob.
void apply_fgo(GaussianState& state, const GaussianOp& op);

/// Reference path: dense blocks, full LU with partial pivoting. Kept as the
/// slow twin of apply_fgo; the two must agree to 1e-11.
GaussianState apply_fgo_reference(const GaussianState& state, const GaussianOp& op);

/// <-i c_a c_b> / <psi|psi> = M_ab for a != b (0-based).
double bilinear_expectation(const GaussianState& state, int a, int b);

/// |<psi1|psi2>|^2 = 2^{-m} Gamma_1 Gamma_2 sqrt(det(M_1 + M_2)).
double overlap_sq(const GaussianState& s1, const GaussianState& s2);

StateDiagnostics validate_state(const GaussianState& state);

/// Conjugation by an even Pauli string (unitary, Gamma unchanged): every
/// covariance entry picks up the sign of the (anti)commutation of the string
/// with c_i and c_j.
void apply_pauli(GaussianState& state, const PauliString& p);

/// Expectation of a Hermitian Pauli string that is a Majorana bilinear.
double pauli_expectation(const GaussianState& state, const PauliString& p);

/// Expectation of a product of two disjoint signed bilinears,
/// <sigma_p (-i c_{p.a} c_{p.b}) sigma_q (-i c_{q.a} c_{q.b})>, via the
/// Wick expansion of the quartic Majorana correlator.
double bilinear_pair_expectation(const GaussianState& state, const BilinearForm& p,
                                 const BilinearForm& q);

}  // namespace repqec
