#include "repqec/dense_oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace repqec {

using cd = std::complex<double>;

static void check_dims(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 13)
        throw std::invalid_argument("dense oracle limited to 1..13 qubits");
}

DenseState DenseState::ghz_plus(int n_qubits) {
    check_dims(n_qubits);
    DenseState st;
    st.n_qubits = n_qubits;
    st.amp.assign(size_t{1} << n_qubits, cd(0.0, 0.0));
    const double r = 1.0 / std::sqrt(2.0);
    st.amp.front() = r;
    st.amp.back() = r;
    return st;
}

DenseState DenseState::plus_state(int n_qubits) {
    check_dims(n_qubits);
    DenseState st;
    st.n_qubits = n_qubits;
    const size_t dim = size_t{1} << n_qubits;
    st.amp.assign(dim, cd(std::pow(2.0, -0.5 * n_qubits), 0.0));
    return st;
}

DenseState DenseState::zero_state(int n_qubits) {
    check_dims(n_qubits);
    DenseState st;
    st.n_qubits = n_qubits;
    st.amp.assign(size_t{1} << n_qubits, cd(0.0, 0.0));
    st.amp[0] = 1.0;
    return st;
}

void apply_x_rotation_dense(DenseState& st, int qubit, double phi, double weight) {
    const size_t bit = size_t{1} << qubit;
    const double sw = std::sqrt(weight);
    const cd c = sw * std::cos(phi);
    const cd is = sw * cd(0.0, std::sin(phi));
    for (size_t k = 0; k < st.amp.size(); ++k) {
        if (k & bit) continue;
        cd a0 = st.amp[k], a1 = st.amp[k | bit];
        st.amp[k] = c * a0 + is * a1;
        st.amp[k | bit] = c * a1 + is * a0;
    }
}

void apply_parity_dense(DenseState& st, int site, int s, double phi, double weight) {
    const size_t b0 = size_t{1} << site, b1 = size_t{1} << (site + 1);
    const double sw = std::sqrt(weight);
    const cd e = std::polar(1.0, -2.0 * phi) * ((s & 1) ? -1.0 : 1.0);
    const cd feven = sw * 0.5 * (1.0 + e);
    const cd fodd = sw * 0.5 * (1.0 - e);
    for (size_t k = 0; k < st.amp.size(); ++k) {
        bool odd = ((k & b0) != 0) != ((k & b1) != 0);
        st.amp[k] *= odd ? fodd : feven;
    }
}

void apply_pauli_dense(DenseState& st, const PauliString& p) {
    if (p.n != st.n_qubits) throw std::invalid_argument("qubit count mismatch");
    static const cd iphase[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
    const cd ph = iphase[p.phase & 3];
    std::vector<cd> out(st.amp.size());
    for (size_t k = 0; k < st.amp.size(); ++k) {
        int zpar = std::popcount(k & p.z) & 1;
        out[k ^ p.x] = ph * (zpar ? -1.0 : 1.0) * st.amp[k];
    }
    st.amp.swap(out);
}

void apply_projector_dense(DenseState& st, const PauliString& stabilizer, int s,
                           double theta, double weight) {
    DenseState rotated = st;
    apply_pauli_dense(rotated, stabilizer);
    const cd e = std::polar(1.0, -2.0 * theta) * ((s & 1) ? -1.0 : 1.0);
    const double sw = std::sqrt(weight);
    for (size_t k = 0; k < st.amp.size(); ++k)
        st.amp[k] = sw * 0.5 * (st.amp[k] + e * rotated.amp[k]);
}

void apply_kraus_dense(DenseState& st, const KrausSpec& spec) {
    switch (spec.kind) {
        case KrausKind::Noise:
            apply_x_rotation_dense(st, spec.index, spec.phi, spec.weight);
            return;
        case KrausKind::ParityNoisy:
            apply_parity_dense(st, spec.index, spec.s, spec.phi, spec.weight);
            return;
        case KrausKind::ParityIdeal:
            apply_parity_dense(st, spec.index, spec.s, 0.0, 1.0);
            return;
        case KrausKind::FlipX:
            apply_x_rotation_dense(st, spec.index, M_PI / 2.0, 1.0);
            return;
    }
    throw std::logic_error("unreachable");
}

double gamma_dense(const DenseState& st) {
    double g = 0.0;
    for (const cd& a : st.amp) g += std::norm(a);
    return g;
}

double gamma_l_dense(const DenseState& st, const std::vector<int>& recovery) {
    const int n_data = st.n_qubits - 1;
    if (static_cast<int>(recovery.size()) != n_data)
        throw std::invalid_argument("recovery length must equal the data qubit count");
    size_t rmask = 0;
    for (int q = 0; q < n_data; ++q)
        if (recovery[q]) rmask |= size_t{1} << q;
    const size_t bn = size_t{1} << (n_data - 1);
    const size_t ba = size_t{1} << n_data;
    double g = 0.0;
    for (size_t k = 0; k < st.amp.size(); ++k) {
        size_t kr = k ^ rmask;  // amplitude of R|psi> at kr is amp[k]... R flips bits
        bool odd = ((kr & bn) != 0) != ((kr & ba) != 0);
        if (odd) g += std::norm(st.amp[k]);
    }
    return g;
}

std::complex<double> inner_product_dense(const DenseState& a, const DenseState& b) {
    if (a.n_qubits != b.n_qubits) throw std::invalid_argument("qubit count mismatch");
    cd s(0.0, 0.0);
    for (size_t k = 0; k < a.amp.size(); ++k) s += std::conj(a.amp[k]) * b.amp[k];
    return s;
}

std::complex<double> pauli_expectation_dense(const DenseState& st, const PauliString& p) {
    DenseState t = st;
    apply_pauli_dense(t, p);
    return inner_product_dense(st, t) / gamma_dense(st);
}

namespace {

struct Enumerator {
    const CircuitSchedule& schedule;
    DecoderWeighting weighting;
    double decoder_p;
    uint64_t max_leaves;
    ExactDistribution result;
    SyndromeGrid syndromes;

    void leaf(const DenseState& st) {
        if (++result.leaves > max_leaves)
            throw std::invalid_argument("enumerate_distribution: branch tree too large");
        double g = gamma_dense(st);
        result.total_probability += g;
        result.syndrome_probs[syndromes.bits] += g;
        std::vector<int> r =
            decode_syndromes(syndromes, schedule.n, schedule.T, weighting, decoder_p);
        result.p_l += gamma_l_dense(st, r);
    }

    void walk(const DenseState& st, size_t pos, double branch_gamma) {
        if (pos == schedule.items.size()) {
            leaf(st);
            return;
        }
        const ScheduleItem& item = schedule.items[pos];
        const bool is_parity = item.kind == ScheduleItem::Kind::Parity ||
                               item.kind == ScheduleItem::Kind::FinalIdealParity;
        if (!is_parity) {
            const OutcomePmf& pmf = schedule.pmfs[item.pmf_id];
            for (const auto& e : pmf.support) {
                if (e.weight <= 0.0) continue;
                DenseState next = st;
                apply_x_rotation_dense(next, item.index, e.phi, e.weight);
                walk(next, pos + 1, branch_gamma * e.weight);
            }
            return;
        }
        static const OutcomePmf ideal{{{0.0, 1.0}}, PmfKind::Simple, 1};
        const OutcomePmf& pmf = item.kind == ScheduleItem::Kind::Parity
                                    ? schedule.pmfs[item.pmf_id]
                                    : ideal;
        for (const auto& e : pmf.support) {
            if (e.weight <= 0.0) continue;
            for (int s = 0; s < 2; ++s) {
                DenseState next = st;
                apply_parity_dense(next, item.index, s, e.phi, e.weight);
                double g = gamma_dense(next);
                if (g <= 1e-16 * branch_gamma) continue;
                syndromes.at(item.index, item.cycle) = static_cast<uint8_t>(s);
                walk(next, pos + 1, g);
            }
        }
    }
};

}  // namespace

ExactDistribution enumerate_distribution(const CircuitSchedule& schedule,
                                         DecoderWeighting weighting, double decoder_p,
                                         uint64_t max_leaves) {
    Enumerator e{schedule, weighting, decoder_p, max_leaves, {}, {}};
    e.syndromes.n_sites = schedule.n - 1;
    e.syndromes.n_rounds = schedule.T + 1;
    e.syndromes.bits.assign(static_cast<size_t>(schedule.n - 1) * (schedule.T + 1), 0);
    e.walk(DenseState::ghz_plus(schedule.n + 1), 0, 1.0);
    return e.result;
}

Eigen::MatrixXd covariance_dense(const DenseState& st) {
    const int m = st.n_qubits;
    const double g = gamma_dense(st);
    std::vector<DenseState> cpsi(2 * m, st);
    for (int mu = 0; mu < 2 * m; ++mu)
        apply_pauli_dense(cpsi[mu], majorana_pauli(mu, m));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    for (int i = 0; i < 2 * m; ++i) {
        for (int j = 0; j < 2 * m; ++j) {
            if (i == j) continue;
            cd v = cd(0.0, -1.0) * inner_product_dense(cpsi[i], cpsi[j]) / g;
            M(i, j) = v.real();
        }
    }
    return M;
}

}  // namespace repqec
