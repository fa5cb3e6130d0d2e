#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "repqec/fgs.hpp"

namespace repqec {

/// Single-qubit X-type channel parameters: physical error probability p with
/// theta = arcsin(sqrt(p)), and noise coherence c interpolating between the
/// stochastic (c = 0) and unitary (c = 1) channel.
struct NoiseModel {
    double p = 0.0;
    double c = 0.0;
    double theta = 0.0;
    // Circuit-based two-qubit weights (p_XI, p_IX, p_XX); must sum to 1.
    double p_xi = 1.0 / 3.0, p_ix = 1.0 / 3.0, p_xx = 1.0 / 3.0;

    static NoiseModel make(double p, double c);
};

enum class PmfKind { Simple, Binomial };

/// Outcome distribution over rotation angles phi for one noise event or for
/// the accumulated noise on one measurement qubit.
struct OutcomePmf {
    struct Entry {
        double phi;
        double weight;
    };
    std::vector<Entry> support;
    PmfKind kind = PmfKind::Simple;
    int binomial_n = 1;

    int sample(std::mt19937_64& rng) const;
    double total_weight() const;
};

/// p(+theta) = (1+c)/2, p(-theta) = (1-c)/2.
OutcomePmf pmf_simple(double theta, double c);

/// N-fold convolution of pmf_simple: support {k theta : k = -N..N step 2},
/// weight C(N, (N+k)/2) ((1+c)/2)^{(N+k)/2} ((1-c)/2)^{(N-k)/2}.
OutcomePmf pmf_binomial(int n_maps, double theta, double c);

enum class KrausKind : uint8_t { Noise, ParityNoisy, ParityIdeal, FlipX };

/// One Kraus branch choice; `index` is the 0-based qubit (Noise/FlipX) or
/// parity site i, acting on qubits (i, i+1).
struct KrausSpec {
    KrausKind kind;
    int index = 0;
    int s = 0;
    double phi = 0.0;
    double weight = 1.0;
};

/// sqrt(w) exp(i phi X_q): Gamma_G = w, A = D = 0, B differs from I by the
/// 2x2 block [[cos2phi-1, -sin2phi], [sin2phi, cos2phi-1]] on (2q, 2q+1).
GaussianOp noise_fgo(int qubit, double phi, double weight, int m_modes);

/// sqrt(w)/2 (I + (-1)^s e^{-2 i phi} Z_i Z_{i+1}): Gamma_G = w/2,
/// A_{2i+1,2i+2} = -(-1)^s cos 2phi, D = -A, B block
/// [[-1, (-1)^s sin2phi], [-(-1)^s sin2phi, -1]] on (2i+1, 2i+2).
GaussianOp parity_fgo(int site, int s, double phi, double weight, int m_modes);

/// parity_fgo with phi = 0, weight = 1 (Gamma_G = 1/2).
GaussianOp parity_ideal_fgo(int site, int s, int m_modes);

/// exp(psi c_a c_b) scaled by sqrt(w).
GaussianOp bilinear_rotation_fgo(int a, int b, double psi, double weight, int m_modes);

/// sqrt(w)/2 (I + (-1)^s e^{-2 i theta} S) for S = sigma (-i c_a c_b).
GaussianOp bilinear_projector_fgo(int a, int b, int sigma, int s, double theta,
                                  double weight, int m_modes);

GaussianOp kraus_to_fgo(const KrausSpec& spec, int m_modes);

}  // namespace repqec
