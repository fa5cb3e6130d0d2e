#include "repqec/fgs.hpp"

#include <cmath>
#include <stdexcept>

#include "repqec/errors.hpp"

namespace repqec {

Eigen::MatrixXd GaussianOp::dense_A() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    int s = static_cast<int>(support.size());
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) A(support[i], support[j]) = a_s(i, j);
    return A;
}

Eigen::MatrixXd GaussianOp::dense_B() const {
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2 * m, 2 * m);
    int s = static_cast<int>(support.size());
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) B(support[i], support[j]) += b_s(i, j);
    return B;
}

Eigen::MatrixXd GaussianOp::dense_D() const {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    int s = static_cast<int>(support.size());
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) D(support[i], support[j]) = d_s(i, j);
    return D;
}

GaussianState make_ghz_plus(int n_qubits) {
    if (n_qubits < 2) throw std::invalid_argument("make_ghz_plus requires n_qubits >= 2");
    GaussianState st;
    st.M = Eigen::MatrixXd::Zero(2 * n_qubits, 2 * n_qubits);
    for (int q = 0; q + 1 < n_qubits; ++q) {
        st.M(2 * q + 1, 2 * q + 2) = -1.0;  // <Z_q Z_{q+1}> = +1
        st.M(2 * q + 2, 2 * q + 1) = +1.0;
    }
    st.M(0, 2 * n_qubits - 1) = -1.0;
    st.M(2 * n_qubits - 1, 0) = +1.0;
    st.log_gamma = 0.0;
    return st;
}

GaussianState make_plus_state(int n_qubits) {
    if (n_qubits < 1) throw std::invalid_argument("make_plus_state requires n_qubits >= 1");
    GaussianState st;
    st.M = Eigen::MatrixXd::Zero(2 * n_qubits, 2 * n_qubits);
    for (int q = 0; q < n_qubits; ++q) {
        // <X_q> = 1 and X_q = -(-i c_{2q} c_{2q+1})
        st.M(2 * q, 2 * q + 1) = -1.0;
        st.M(2 * q + 1, 2 * q) = +1.0;
    }
    st.log_gamma = 0.0;
    return st;
}

double branch_det(const GaussianState& state, const GaussianOp& op) {
    int s = static_cast<int>(op.support.size());
    if (s == 0 || op.rotation) return 1.0;
    Eigen::MatrixXd mss(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) mss(i, j) = state.M(op.support[i], op.support[j]);
    Eigen::MatrixXd k = Eigen::MatrixXd::Identity(s, s) + op.d_s * mss;
    double det = k.determinant();
    return det;
}

double branch_log_weight(const GaussianState& state, const GaussianOp& op) {
    double det = branch_det(state, op);
    if (det <= kEpsProb) return -std::numeric_limits<double>::infinity();
    return op.log_gamma_g + 0.5 * std::log(det);
}

static void antisymmetrize(Eigen::MatrixXd& M) {
    // M <- (M - M^T)/2, cheap drift control over long op sequences
    const int n = static_cast<int>(M.rows());
    for (int i = 0; i < n; ++i) {
        M(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            double v = 0.5 * (M(i, j) - M(j, i));
            M(i, j) = v;
            M(j, i) = -v;
        }
    }
}

void apply_fgo(GaussianState& state, const GaussianOp& op) {
    const int s = static_cast<int>(op.support.size());
    if (2 * op.m != state.M.rows())
        throw std::invalid_argument("operator/state dimension mismatch");
    if (s == 0) {
        state.log_gamma += op.log_gamma_g;
        return;
    }
    Eigen::MatrixXd& M = state.M;

    if (op.rotation) {
        // M' = B M B^T with B = I + b supported on S; det(M - 0) = det M = 1.
        Eigen::MatrixXd rows(s, M.cols());
        for (int i = 0; i < s; ++i) rows.row(i) = M.row(op.support[i]);
        Eigen::MatrixXd upd = op.b_s * rows;
        for (int i = 0; i < s; ++i) M.row(op.support[i]) += upd.row(i);
        Eigen::MatrixXd cols(M.rows(), s);
        for (int j = 0; j < s; ++j) cols.col(j) = M.col(op.support[j]);
        Eigen::MatrixXd updc = cols * op.b_s.transpose();
        for (int j = 0; j < s; ++j) M.col(op.support[j]) += updc.col(j);
        state.log_gamma += op.log_gamma_g;
        antisymmetrize(M);
        return;
    }

    // General non-unitary update. With G = M^{-1} = -M and Y = -M(:,S):
    //   P  = (M - D)^{-1} = G - Y K^{-1} D_S Y^T,   K = I + D_S M_SS,
    //   det(M - D) = det K,
    //   M' = A - B P B^T.
    Eigen::MatrixXd Y(M.rows(), s), mss(s, s);
    for (int j = 0; j < s; ++j) Y.col(j) = -M.col(op.support[j]);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) mss(i, j) = M(op.support[i], op.support[j]);

    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(s, s) + op.d_s * mss;
    double det = K.determinant();
    if (det <= kEpsProb)
        throw ZeroProbabilityOutcome("apply_fgo: branch probability vanishes");

    Eigen::MatrixXd W = K.inverse() * op.d_s;            // K^{-1} D_S
    Eigen::MatrixXd YW = Y * W;                          // 2m x s
    Eigen::MatrixXd ys = -mss;                           // Y_S = Y(S,:)
    Eigen::MatrixXd PE = Y - YW * ys.transpose();        // P(:,S)
    Eigen::MatrixXd pe_ss(s, s);                         // P(S,S)
    for (int i = 0; i < s; ++i) pe_ss.row(i) = PE.row(op.support[i]);

    // -P = M + Y W Y^T
    M.noalias() += YW * Y.transpose();
    // A scatter and the b-corrections of -B P B^T
    Eigen::MatrixXd row_corr = op.b_s * PE.transpose();  // s x 2m, equals -b P
    Eigen::MatrixXd col_corr = PE * op.b_s.transpose();  // 2m x s, equals P b^T
    for (int i = 0; i < s; ++i) M.row(op.support[i]) += row_corr.row(i);
    for (int j = 0; j < s; ++j) M.col(op.support[j]) -= col_corr.col(j);
    Eigen::MatrixXd blk = op.a_s - op.b_s * pe_ss * op.b_s.transpose();
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) M(op.support[i], op.support[j]) += blk(i, j);

    state.log_gamma += op.log_gamma_g + 0.5 * std::log(det);
    antisymmetrize(M);
}

GaussianState apply_fgo_reference(const GaussianState& state, const GaussianOp& op) {
    const int dim = static_cast<int>(state.M.rows());
    if (2 * op.m != dim) throw std::invalid_argument("operator/state dimension mismatch");
    Eigen::MatrixXd A = op.dense_A(), B = op.dense_B(), D = op.dense_D();
    Eigen::MatrixXd MD = state.M - D;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(MD);
    double det = lu.determinant();
    if (det < -1e-6)
        throw InternalInvariantViolation("det(M - D) significantly negative");
    if (det <= kEpsProb)
        throw ZeroProbabilityOutcome("apply_fgo_reference: branch probability vanishes");
    GaussianState out;
    out.M = A - B * lu.solve(B.transpose());
    antisymmetrize(out.M);
    out.log_gamma = state.log_gamma + op.log_gamma_g + 0.5 * std::log(det);
    return out;
}

double bilinear_expectation(const GaussianState& state, int a, int b) {
    if (a == b) throw std::invalid_argument("bilinear_expectation requires a != b");
    if (a < 0 || b < 0 || a >= state.M.rows() || b >= state.M.rows())
        throw std::invalid_argument("Majorana index out of range");
    return state.M(a, b);
}

double overlap_sq(const GaussianState& s1, const GaussianState& s2) {
    if (s1.M.rows() != s2.M.rows()) throw std::invalid_argument("mode count mismatch");
    const int m = s1.modes();
    Eigen::MatrixXd sum = s1.M + s2.M;
    double det = Eigen::PartialPivLU<Eigen::MatrixXd>(sum).determinant();
    if (det <= 0.0) return 0.0;
    double lg = s1.log_gamma + s2.log_gamma - m * std::log(2.0) + 0.5 * std::log(det);
    return std::exp(lg);
}

StateDiagnostics validate_state(const GaussianState& state) {
    StateDiagnostics d;
    d.antisymmetry_violation = (state.M + state.M.transpose()).cwiseAbs().maxCoeff();
    Eigen::MatrixXd MMt = state.M * state.M.transpose();
    MMt.diagonal().array() -= 1.0;
    d.purity_violation = MMt.cwiseAbs().maxCoeff();
    d.log_gamma = state.log_gamma;
    return d;
}

void apply_pauli(GaussianState& state, const PauliString& p) {
    if (!p.is_even())
        throw std::invalid_argument("apply_pauli supports even Pauli strings only");
    const int m = state.modes();
    if (p.n != m) throw std::invalid_argument("qubit count mismatch");
    for (int mu = 0; mu < 2 * m; ++mu) {
        if (!p.commutes_with(majorana_pauli(mu, m))) {
            state.M.row(mu) = -state.M.row(mu);
            state.M.col(mu) = -state.M.col(mu);
        }
    }
}

double pauli_expectation(const GaussianState& state, const PauliString& p) {
    BilinearForm f = pauli_to_bilinear(p);
    return f.sigma * state.M(f.a, f.b);
}

double bilinear_pair_expectation(const GaussianState& state, const BilinearForm& p,
                                 const BilinearForm& q) {
    int idx[4] = {p.a, p.b, q.a, q.b};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (idx[i] == idx[j])
                throw std::invalid_argument("bilinear_pair_expectation needs disjoint bilinears");
    // sort the Majorana indices, tracking the anticommutation sign
    int sgn = 1;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j + 1 < 4 - i; ++j)
            if (idx[j] > idx[j + 1]) {
                std::swap(idx[j], idx[j + 1]);
                sgn = -sgn;
            }
    const Eigen::MatrixXd& M = state.M;
    double pf = M(idx[0], idx[1]) * M(idx[2], idx[3]) - M(idx[0], idx[2]) * M(idx[1], idx[3]) +
                M(idx[0], idx[3]) * M(idx[1], idx[2]);
    return p.sigma * q.sigma * sgn * pf;
}

}  // namespace repqec
