#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "repqec/fgs.hpp"
#include "repqec/pauli.hpp"

namespace repqec {

/// Distance-d surface code (d odd) on d^2 data qubits numbered in
/// boustrophedon column order, plus the readout ancilla as qubit n = d^2.
/// Faces carry Y or Z letters on their vertices: bulk cells are pure YYYY /
/// ZZZZ plaquettes in a checkerboard, the weight-2 boundary faces are blue
/// (YY, left/right edges) and green (ZZ, top/bottom edges). The red (bulk)
/// stabilizers are not Majorana-quadratic; the measured set replaces them
/// with the telescoped column products
///   tilde S^{r,c}_i = (prod_{j >= i} S^{r,c}_j) S^{g,c},
/// which are contiguous W X ... X W strings and hence quadratic.
struct SurfaceFace {
    enum class Color { Blue, Red, Green, TildeRed };
    Color color;
    int column_pair = -1;  // 0-based pair c for red/green/tilde
    int index = -1;        // 0-based i within the pair, or row for blue
    PauliString pauli;     // on the n data qubits, sign +1 on the code space
    std::vector<int> qubits;
    std::vector<char> letters;
};

struct StabilizerSet {
    int d = 0;
    int n = 0;
    std::vector<SurfaceFace> blue, red, green, tilde;

    // Measured operators (blue + green + tilde) as extended-system bilinears.
    struct Measured {
        enum class Kind { Blue, Green, Tilde };
        Kind kind;
        int column_pair;
        int index;
        BilinearForm bilinear;  // on n+1 qubits
    };
    std::vector<Measured> measured;

    // Decoding geometry per defect species: Z-letter faces catch Y-type data
    // errors, Y-letter faces catch Z-type data errors. Distances and paths
    // are BFS results on the face adjacency graph (edges = shared qubits).
    struct FaceGraph {
        std::vector<int> face_ids;  // indices into the blue/red/green union
        std::vector<std::vector<int>> dist;
        std::vector<std::vector<std::vector<int>>> path_qubits;
        std::vector<int> boundary_dist;
        std::vector<std::vector<int>> boundary_path;
    };
    FaceGraph z_graph, y_graph;

    const SurfaceFace& face(int id) const;
    int face_count() const;
};

StabilizerSet build_stabilizers(int d);

/// Logical operators and the Z_{n+1} parity record w.
struct LogicalFrame {
    PauliString l_z, l_y, l_x;  // on the n data qubits
    int w = 0;
};

/// FGS of |phi_init> = (|0_L>|0> + |1_L>|1>)/sqrt(2), built by projecting
/// the GHZ-like +1 eigenstate of X^{n+1} onto all d^2+1 stabilizer /
/// logical-pair projectors, renormalized to Gamma = 1.
std::pair<GaussianState, LogicalFrame> init_logical_bell(const StabilizerSet& s);

enum class SurfaceErrorKind { Y, Z, XCoherent };

/// Pauli errors act through the ancilla trick (Z_i -> Z_i Z_{n+1}, w += 1);
/// the coherent X error applies one sampled Kraus branch of the channel.
void apply_pauli_error(GaussianState& state, LogicalFrame& frame, int qubit,
                       SurfaceErrorKind kind, double theta, double coherence,
                       std::mt19937_64& rng);

/// P'(S, s, theta) = 1/2 (I + (-1)^s e^{-2 i theta} S): samples s from the
/// two branch weights and applies the corresponding projector.
int measure_stabilizer(GaussianState& state, const BilinearForm& s_bilinear, double theta,
                       std::mt19937_64& rng, double weight = 1.0);

struct SurfaceRunConfig {
    int d = 3;
    int T = 3;
    double p_y = 0.0;  // Pauli Y probability per data qubit per cycle
    double p_z = 0.0;  // Pauli Z probability per data qubit per cycle
    double p_x = 0.0;  // X-type coherent error probability per data qubit per cycle
    double c = 0.0;    // coherence of that X channel
    double p_m = 0.0;  // Pauli error probability per measurement qubit per cycle
    double p_m_coherent = 0.0;  // X-type coherent measurement error strength
    double c_m = 0.0;
};

struct SurfaceRunResult {
    Eigen::Matrix4cd rho;   // logical (x) ancilla channel Choi state
    double fidelity = 0.0;  // entanglement fidelity
    double fidelity_stderr = 0.0;
    double a_xx_min = 1.0;  // smallest observed <L_X X_{n+1}>
    uint64_t samples = 0;
    uint64_t degenerate = 0;
};

/// Runs T noisy cycles plus an error-free final round per trajectory,
/// decodes (two uniform-weight matchings, one per defect species), applies
/// the recovery, accumulates the Z_{n+1}^w-corrected coefficients
/// A_{W,W'} = <L_W W'_{n+1}>, and reconstructs rho(C) and F.
SurfaceRunResult run_and_reconstruct(const SurfaceRunConfig& config, uint64_t samples,
                                     uint64_t seed, int workers = 1);

/// Red-face syndromes from the measured tilde and green bits of one column
/// pair: s_i = tilde_i xor tilde_{i+1}, s_{d-2} = tilde_{d-2} xor s_green.
std::vector<uint8_t> convert_syndromes(const std::vector<uint8_t>& tilde_bits, uint8_t green_bit);

/// Matches the space-time defects (face id, cycle) on the two face graphs
/// with uniform weights and returns the recovery parity masks:
/// first = qubits needing a Y correction, second = qubits needing Z.
std::pair<std::vector<uint8_t>, std::vector<uint8_t>> decode_surface_defects(
    const StabilizerSet& s, const std::vector<std::pair<int, int>>& face_cycle_defects);

/// Plain-text layout dump (faces, letters, logicals) for auditing.
std::string format_layout(const StabilizerSet& s);

}  // namespace repqec
