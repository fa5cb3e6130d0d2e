#include "repqec/kraus.hpp"

#include <cmath>
#include <stdexcept>

namespace repqec {

NoiseModel NoiseModel::make(double p, double c) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0, 1]");
    if (c < 0.0 || c > 1.0) throw std::invalid_argument("c must be in [0, 1]");
    NoiseModel nm;
    nm.p = p;
    nm.c = c;
    nm.theta = std::asin(std::sqrt(p));
    return nm;
}

int OutcomePmf::sample(std::mt19937_64& rng) const {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    int last = 0;
    for (int k = 0; k < static_cast<int>(support.size()); ++k) {
        if (support[k].weight <= 0.0) continue;
        acc += support[k].weight;
        last = k;
        if (u < acc) return k;
    }
    return last;
}

double OutcomePmf::total_weight() const {
    double t = 0.0;
    for (const auto& e : support) t += e.weight;
    return t;
}

namespace {

// Branches with the same rotation angle are the same Kraus operator; merge
// them so a noiseless channel has a single unit-weight branch.
void merge_equal_angles(OutcomePmf& pmf) {
    std::vector<OutcomePmf::Entry> merged;
    for (const auto& e : pmf.support) {
        bool found = false;
        for (auto& m : merged)
            if (m.phi == e.phi) {
                m.weight += e.weight;
                found = true;
                break;
            }
        if (!found) merged.push_back(e);
    }
    pmf.support = std::move(merged);
}

}  // namespace

OutcomePmf pmf_simple(double theta, double c) {
    OutcomePmf pmf;
    pmf.kind = PmfKind::Simple;
    pmf.binomial_n = 1;
    pmf.support = {{+theta, (1.0 + c) / 2.0}, {-theta, (1.0 - c) / 2.0}};
    merge_equal_angles(pmf);
    return pmf;
}

OutcomePmf pmf_binomial(int n_maps, double theta, double c) {
    if (n_maps < 1) throw std::invalid_argument("pmf_binomial requires N >= 1");
    OutcomePmf pmf;
    pmf.kind = PmfKind::Binomial;
    pmf.binomial_n = n_maps;
    const double wp = (1.0 + c) / 2.0, wm = (1.0 - c) / 2.0;
    pmf.support.reserve(n_maps + 1);
    for (int k = n_maps; k >= -n_maps; k -= 2) {
        int plus = (n_maps + k) / 2;
        double binom = 1.0;
        for (int j = 1; j <= plus; ++j)
            binom = binom * static_cast<double>(n_maps - plus + j) / static_cast<double>(j);
        double w = binom * std::pow(wp, plus) * std::pow(wm, n_maps - plus);
        pmf.support.push_back({k * theta, w});
    }
    merge_equal_angles(pmf);
    return pmf;
}

GaussianOp noise_fgo(int qubit, double phi, double weight, int m_modes) {
    if (qubit < 0 || qubit >= m_modes - 1)
        throw std::invalid_argument("noise_fgo: qubit out of range (ancilla mode is never a noise target)");
    if (weight <= 0.0) throw std::invalid_argument("noise_fgo: weight must be positive");
    GaussianOp op;
    op.m = m_modes;
    op.support = {2 * qubit, 2 * qubit + 1};
    op.rotation = true;
    double c2 = std::cos(2 * phi), s2 = std::sin(2 * phi);
    op.b_s.resize(2, 2);
    op.b_s << c2 - 1.0, -s2, s2, c2 - 1.0;
    op.a_s = Eigen::MatrixXd::Zero(2, 2);
    op.d_s = Eigen::MatrixXd::Zero(2, 2);
    op.log_gamma_g = std::log(weight);
    return op;
}

GaussianOp parity_fgo(int site, int s, double phi, double weight, int m_modes) {
    if (site < 0 || site >= m_modes - 2)
        throw std::invalid_argument("parity_fgo: site out of range");
    if (weight <= 0.0) throw std::invalid_argument("parity_fgo: weight must be positive");
    // Z_i Z_{i+1} = sigma (-i c_a c_b) with (a, b) = (2i+1, 2i+2), sigma = -1
    return bilinear_projector_fgo(2 * site + 1, 2 * site + 2, -1, s, phi, weight, m_modes);
}

GaussianOp parity_ideal_fgo(int site, int s, int m_modes) {
    return parity_fgo(site, s, 0.0, 1.0, m_modes);
}

GaussianOp bilinear_rotation_fgo(int a, int b, double psi, double weight, int m_modes) {
    if (a == b || a < 0 || b < 0 || a >= 2 * m_modes || b >= 2 * m_modes)
        throw std::invalid_argument("bilinear_rotation_fgo: bad Majorana pair");
    if (a > b) {
        std::swap(a, b);
        psi = -psi;
    }
    GaussianOp op;
    op.m = m_modes;
    op.support = {a, b};
    op.rotation = true;
    double c2 = std::cos(2 * psi), s2 = std::sin(2 * psi);
    op.b_s.resize(2, 2);
    op.b_s << c2 - 1.0, s2, -s2, c2 - 1.0;
    op.a_s = Eigen::MatrixXd::Zero(2, 2);
    op.d_s = Eigen::MatrixXd::Zero(2, 2);
    op.log_gamma_g = std::log(weight);
    return op;
}

GaussianOp bilinear_projector_fgo(int a, int b, int sigma, int s, double theta,
                                  double weight, int m_modes) {
    if (a >= b || a < 0 || b >= 2 * m_modes)
        throw std::invalid_argument("bilinear_projector_fgo: need 0 <= a < b < 2m");
    if (sigma != 1 && sigma != -1) throw std::invalid_argument("sigma must be +-1");
    GaussianOp op;
    op.m = m_modes;
    op.support = {a, b};
    op.rotation = false;
    double nu = sigma * ((s & 1) ? -1.0 : 1.0);
    double c2 = std::cos(2 * theta), s2 = std::sin(2 * theta);
    op.a_s.resize(2, 2);
    op.a_s << 0.0, nu * c2, -nu * c2, 0.0;
    op.d_s = -op.a_s;
    op.b_s.resize(2, 2);
    op.b_s << -1.0, -nu * s2, nu * s2, -1.0;
    op.log_gamma_g = std::log(weight) - std::log(2.0);
    return op;
}

GaussianOp kraus_to_fgo(const KrausSpec& spec, int m_modes) {
    switch (spec.kind) {
        case KrausKind::Noise:
            return noise_fgo(spec.index, spec.phi, spec.weight, m_modes);
        case KrausKind::ParityNoisy:
            return parity_fgo(spec.index, spec.s, spec.phi, spec.weight, m_modes);
        case KrausKind::ParityIdeal:
            return parity_ideal_fgo(spec.index, spec.s, m_modes);
        case KrausKind::FlipX:
            return noise_fgo(spec.index, M_PI / 2.0, 1.0, m_modes);
    }
    throw std::logic_error("unreachable");
}

}  // namespace repqec
