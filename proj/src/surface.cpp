#include "repqec/surface.hpp"

#include <atomic>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "repqec/blossom.hpp"
#include "repqec/errors.hpp"
#include "repqec/kraus.hpp"
#include "repqec/rng.hpp"
#include "repqec/runner.hpp"

namespace repqec {

namespace {

// Boustrophedon data-qubit numbering: even columns run top to bottom, odd
// columns bottom to top, so every column-pair stabilizer product telescopes
// to a contiguous Jordan-Wigner interval.
int snake_index(int row, int col, int d) {
    return (col % 2 == 0) ? col * d + row : col * d + (d - 1 - row);
}

char cell_letter(int cell_row, int cell_col) {
    return ((cell_row + cell_col) % 2 == 0) ? 'Z' : 'Y';
}

SurfaceFace make_face(SurfaceFace::Color color, int pair, int index,
                      const std::vector<int>& qubits, const std::vector<char>& letters, int n) {
    SurfaceFace f;
    f.color = color;
    f.column_pair = pair;
    f.index = index;
    f.qubits = qubits;
    f.letters = letters;
    f.pauli = PauliString::identity(n);
    for (size_t k = 0; k < qubits.size(); ++k)
        f.pauli = f.pauli * PauliString::from_letter(letters[k], qubits[k], n);
    return f;
}

PauliString extend(const PauliString& p, int n_total) {
    PauliString q = PauliString::identity(n_total);
    q.x = p.x;
    q.z = p.z;
    q.phase = p.phase;
    return q;
}

PauliString negated(PauliString p) {
    p.phase = (p.phase + 2) & 3;
    return p;
}

PauliString times_minus_i(PauliString p) {
    p.phase = (p.phase + 3) & 3;
    return p;
}

void check(bool cond, const char* what) {
    if (!cond) throw InternalInvariantViolation(what);
}

StabilizerSet::FaceGraph build_face_graph(const std::vector<SurfaceFace>& all, char letter,
                                          int n) {
    StabilizerSet::FaceGraph g;
    for (int id = 0; id < static_cast<int>(all.size()); ++id)
        if (all[id].letters[0] == letter) g.face_ids.push_back(id);
    const int F = static_cast<int>(g.face_ids.size());

    // qubit -> local faces of this species
    std::vector<std::vector<int>> at_qubit(n);
    for (int lf = 0; lf < F; ++lf)
        for (int q : all[g.face_ids[lf]].qubits) at_qubit[q].push_back(lf);

    std::vector<std::vector<std::pair<int, int>>> adj(F);  // (neighbor, qubit)
    std::vector<std::vector<int>> boundary_qubits(F);
    for (int q = 0; q < n; ++q) {
        const auto& fs = at_qubit[q];
        check(fs.size() >= 1 && fs.size() <= 2, "every data qubit must touch 1 or 2 faces per species");
        if (fs.size() == 2) {
            adj[fs[0]].push_back({fs[1], q});
            adj[fs[1]].push_back({fs[0], q});
        } else {
            boundary_qubits[fs[0]].push_back(q);
        }
    }

    g.dist.assign(F, std::vector<int>(F, -1));
    g.path_qubits.assign(F, std::vector<std::vector<int>>(F));
    for (int src = 0; src < F; ++src) {
        std::vector<int> parent(F, -1), parent_qubit(F, -1);
        std::queue<int> q;
        g.dist[src][src] = 0;
        q.push(src);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (auto [v, qq] : adj[u])
                if (g.dist[src][v] == -1) {
                    g.dist[src][v] = g.dist[src][u] + 1;
                    parent[v] = u;
                    parent_qubit[v] = qq;
                    q.push(v);
                }
        }
        for (int dst = 0; dst < F; ++dst) {
            check(g.dist[src][dst] >= 0, "face graph must be connected");
            for (int v = dst; v != src; v = parent[v]) g.path_qubits[src][dst].push_back(parent_qubit[v]);
        }
    }

    g.boundary_dist.assign(F, -1);
    g.boundary_path.assign(F, {});
    for (int f = 0; f < F; ++f) {
        int best = -1, best_face = -1;
        for (int f2 = 0; f2 < F; ++f2) {
            if (boundary_qubits[f2].empty()) continue;
            int dd = g.dist[f][f2] + 1;
            if (best == -1 || dd < best) {
                best = dd;
                best_face = f2;
            }
        }
        check(best > 0, "every face needs a boundary exit");
        g.boundary_dist[f] = best;
        g.boundary_path[f] = g.path_qubits[f][best_face];
        g.boundary_path[f].push_back(boundary_qubits[best_face].front());
    }
    return g;
}

}  // namespace

const SurfaceFace& StabilizerSet::face(int id) const {
    int nb = static_cast<int>(blue.size()), nr = static_cast<int>(red.size());
    if (id < nb) return blue[id];
    if (id < nb + nr) return red[id - nb];
    return green[id - nb - nr];
}

int StabilizerSet::face_count() const {
    return static_cast<int>(blue.size() + red.size() + green.size());
}

std::vector<uint8_t> convert_syndromes(const std::vector<uint8_t>& tilde_bits,
                                       uint8_t green_bit) {
    const int m = static_cast<int>(tilde_bits.size());
    std::vector<uint8_t> red(m);
    for (int i = 0; i + 1 < m; ++i) red[i] = tilde_bits[i] ^ tilde_bits[i + 1];
    red[m - 1] = tilde_bits[m - 1] ^ green_bit;
    return red;
}

StabilizerSet build_stabilizers(int d) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("d must be odd and >= 3");
    StabilizerSet s;
    s.d = d;
    s.n = d * d;
    const int n = s.n;

    // Blue: weight-2 YY faces on the left (even cell row) / right (odd) edges.
    for (int r = 0; r < d - 1; ++r) {
        int base = (r % 2 == 0) ? r : d * (d - 1) + r;
        s.blue.push_back(make_face(SurfaceFace::Color::Blue, -1, r, {base, base + 1},
                                   {'Y', 'Y'}, n));
    }
    // Green: weight-2 ZZ faces, bottom edge for even pairs, top for odd.
    for (int c = 0; c < d - 1; ++c) {
        int lo = d * (c + 1) - 1;
        s.green.push_back(make_face(SurfaceFace::Color::Green, c, 0, {lo, lo + 1},
                                    {'Z', 'Z'}, n));
    }
    // Red: the (d-1)^2 bulk cells, checkerboarded YYYY / ZZZZ. Within a
    // column pair they are indexed so that the telescoped products run away
    // from that pair's green face.
    for (int c = 0; c < d - 1; ++c) {
        for (int j = 0; j < d - 1; ++j) {
            int i = (c % 2 == 0) ? j : d - 2 - j;
            std::vector<int> qubits = {snake_index(i, c, d), snake_index(i, c + 1, d),
                                       snake_index(i + 1, c, d), snake_index(i + 1, c + 1, d)};
            char w = cell_letter(i, c);
            s.red.push_back(make_face(SurfaceFace::Color::Red, c, j, qubits,
                                      {w, w, w, w}, n));
        }
    }
    // Tilde: per pair, tilde_i = (prod_{j >= i} red_j) * green.
    for (int c = 0; c < d - 1; ++c) {
        PauliString acc = s.green[c].pauli;
        std::vector<PauliString> partial(d - 1, PauliString::identity(n));
        for (int j = d - 2; j >= 0; --j) {
            acc = acc * s.red[c * (d - 1) + j].pauli;
            partial[j] = acc;
        }
        for (int j = 0; j < d - 1; ++j) {
            SurfaceFace f;
            f.color = SurfaceFace::Color::TildeRed;
            f.index = j;
            f.column_pair = c;
            f.pauli = partial[j];
            // the telescoped product may pick up a -1; the sign is part of
            // the measured operator and lands in the bilinear's sigma
            check(f.pauli.is_hermitian(), "tilde stabilizer must be Hermitian");
            f.pauli.sign();
            int lo = d * c + j, hi = d * (c + 2) - j - 1;
            for (int q = lo; q <= hi; ++q) {
                char letter = f.pauli.letter(q);
                if (q == lo || q == hi)
                    check(letter == 'Y' || letter == 'Z', "tilde endpoints must be Y or Z");
                else
                    check(letter == 'X', "tilde interior must be X");
                f.qubits.push_back(q);
                f.letters.push_back(letter);
            }
            check(f.pauli.weight() == hi - lo + 1, "tilde support must be the stated interval");
            s.tilde.push_back(f);
        }
    }

    // Inversion (red from tilde) must reproduce the red faces exactly.
    for (int c = 0; c < d - 1; ++c)
        for (int j = 0; j < d - 1; ++j) {
            const PauliString& red = s.red[c * (d - 1) + j].pauli;
            PauliString recon = (j + 1 < d - 1)
                                    ? s.tilde[c * (d - 1) + j].pauli * s.tilde[c * (d - 1) + j + 1].pauli
                                    : s.tilde[c * (d - 1) + j].pauli * s.green[c].pauli;
            check(recon.same_letters(red) && recon.phase == red.phase,
                  "tilde-to-red inversion failed");
        }

    // Group checks: commutation and F2 independence.
    std::vector<const PauliString*> gens;
    for (const auto& f : s.blue) gens.push_back(&f.pauli);
    for (const auto& f : s.red) gens.push_back(&f.pauli);
    for (const auto& f : s.green) gens.push_back(&f.pauli);
    for (size_t i = 0; i < gens.size(); ++i)
        for (size_t j = i + 1; j < gens.size(); ++j)
            check(gens[i]->commutes_with(*gens[j]), "stabilizers must commute");
    {
        std::vector<std::pair<uint64_t, uint64_t>> rows;
        for (const auto* g : gens) rows.push_back({g->x, g->z});
        int rank = 0;
        for (int bit = 0; bit < 2 * n && rank < static_cast<int>(rows.size()); ++bit) {
            bool high = bit < n;
            uint64_t mask = uint64_t{1} << (high ? bit : bit - n);
            int pivot = -1;
            for (int r = rank; r < static_cast<int>(rows.size()); ++r) {
                uint64_t v = high ? rows[r].first : rows[r].second;
                if (v & mask) {
                    pivot = r;
                    break;
                }
            }
            if (pivot < 0) continue;
            std::swap(rows[rank], rows[pivot]);
            for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
                if (r == rank) continue;
                uint64_t v = high ? rows[r].first : rows[r].second;
                if (v & mask) {
                    rows[r].first ^= rows[rank].first;
                    rows[r].second ^= rows[rank].second;
                }
            }
            ++rank;
        }
        check(rank == n - 1, "stabilizer generators must be independent");
    }

    std::vector<SurfaceFace> all;
    all.insert(all.end(), s.blue.begin(), s.blue.end());
    all.insert(all.end(), s.red.begin(), s.red.end());
    all.insert(all.end(), s.green.begin(), s.green.end());
    s.z_graph = build_face_graph(all, 'Z', n);
    s.y_graph = build_face_graph(all, 'Y', n);

    // Measured operators as extended-system bilinears.
    for (int r = 0; r < d - 1; ++r)
        s.measured.push_back({StabilizerSet::Measured::Kind::Blue, -1, r,
                              pauli_to_bilinear(extend(s.blue[r].pauli, n + 1))});
    for (int c = 0; c < d - 1; ++c)
        s.measured.push_back({StabilizerSet::Measured::Kind::Green, c, 0,
                              pauli_to_bilinear(extend(s.green[c].pauli, n + 1))});
    for (int c = 0; c < d - 1; ++c)
        for (int j = 0; j < d - 1; ++j)
            s.measured.push_back({StabilizerSet::Measured::Kind::Tilde, c, j,
                                  pauli_to_bilinear(
                                      extend(s.tilde[c * (d - 1) + j].pauli, n + 1))});
    return s;
}

namespace {

struct Logicals {
    PauliString l_z, l_y, l_x;
    BilinearForm lz_zanc, ly_yanc_neg;  // init projector operands
    // A_{X,X} = <L_X X_{n+1}> is quartic in Majoranas (evaluated through the
    // Wick expansion of a_xi with a_ix); the other six are bilinears.
    BilinearForm a_xi, a_ix, a_yy, a_yz, a_zy, a_zz;
};

Logicals build_logicals(const StabilizerSet& s) {
    const int n = s.n, d = s.d;
    Logicals L;
    L.l_z = PauliString::from_letter('Z', n - d, n);
    for (int q = n - d + 1; q < n; ++q) L.l_z = L.l_z * PauliString::from_letter('X', q, n);
    L.l_y = PauliString::from_letter('Y', d - 1, n);
    for (int q = d; q < n; ++q) L.l_y = L.l_y * PauliString::from_letter('X', q, n);
    L.l_x = times_minus_i(L.l_y * L.l_z);
    check(L.l_x.is_hermitian(), "L_X must be Hermitian");
    check(!L.l_z.commutes_with(L.l_y), "L_Z and L_Y must anticommute");
    for (const auto& group : {&s.blue, &s.red, &s.green})
        for (const auto& f : *group) {
            check(L.l_z.commutes_with(f.pauli), "L_Z must commute with the stabilizers");
            check(L.l_y.commutes_with(f.pauli), "L_Y must commute with the stabilizers");
        }

    // L_X times all blue, all green and the pure-Z red faces must equal
    // +X^{otimes n}: this is the X^{otimes (n+1)} symmetry behind A_XX = 1.
    PauliString prod = L.l_x;
    for (const auto& f : s.blue) prod = prod * f.pauli;
    for (const auto& f : s.green) prod = prod * f.pauli;
    for (const auto& f : s.red)
        if (f.letters[0] == 'Z') prod = prod * f.pauli;
    PauliString all_x = PauliString::identity(n);
    for (int q = 0; q < n; ++q) all_x = all_x * PauliString::from_letter('X', q, n);
    check(prod.same_letters(all_x) && prod.phase == all_x.phase,
          "L_X must reduce to +X^n through the stabilizer group");

    auto anc = [&](char w) { return PauliString::from_letter(w, n, n + 1); };
    L.lz_zanc = pauli_to_bilinear(extend(L.l_z, n + 1) * anc('Z'));
    L.ly_yanc_neg = pauli_to_bilinear(negated(extend(L.l_y, n + 1) * anc('Y')));
    L.a_xi = pauli_to_bilinear(extend(L.l_x, n + 1));
    L.a_ix = pauli_to_bilinear(anc('X'));
    L.a_yy = pauli_to_bilinear(extend(L.l_y, n + 1) * anc('Y'));
    L.a_yz = pauli_to_bilinear(extend(L.l_y, n + 1) * anc('Z'));
    L.a_zy = pauli_to_bilinear(extend(L.l_z, n + 1) * anc('Y'));
    L.a_zz = L.lz_zanc;
    return L;
}

}  // namespace

std::pair<GaussianState, LogicalFrame> init_logical_bell(const StabilizerSet& s) {
    Logicals L = build_logicals(s);
    GaussianState st = make_ghz_plus(s.n + 1);
    auto project = [&](const BilinearForm& b) {
        GaussianOp op = bilinear_projector_fgo(b.a, b.b, b.sigma, 0, 0.0, 1.0, s.n + 1);
        if (branch_det(st, op) <= kEpsProb)
            throw InternalInvariantViolation("init projector hit a zero-probability branch");
        apply_fgo(st, op);
    };
    for (const auto& m : s.measured) project(m.bilinear);
    project(L.lz_zanc);
    project(L.ly_yanc_neg);
    st.log_gamma = 0.0;  // renormalize

    LogicalFrame frame;
    frame.l_z = L.l_z;
    frame.l_y = L.l_y;
    frame.l_x = L.l_x;
    frame.w = 0;
    return {st, frame};
}

void apply_pauli_error(GaussianState& state, LogicalFrame& frame, int qubit,
                       SurfaceErrorKind kind, double theta, double coherence,
                       std::mt19937_64& rng) {
    const int m = state.modes();
    const int anc = m - 1;
    switch (kind) {
        case SurfaceErrorKind::Y:
        case SurfaceErrorKind::Z: {
            char w = (kind == SurfaceErrorKind::Y) ? 'Y' : 'Z';
            PauliString p = PauliString::from_letter(w, qubit, m) *
                            PauliString::from_letter('Z', anc, m);
            apply_pauli(state, p);
            frame.w += 1;
            break;
        }
        case SurfaceErrorKind::XCoherent: {
            OutcomePmf pmf = pmf_simple(theta, coherence);
            const auto& e = pmf.support[pmf.sample(rng)];
            apply_fgo(state, noise_fgo(qubit, e.phi, e.weight, m));
            break;
        }
    }
}

int measure_stabilizer(GaussianState& state, const BilinearForm& s_bilinear, double theta,
                       std::mt19937_64& rng, double weight) {
    GaussianOp op0 =
        bilinear_projector_fgo(s_bilinear.a, s_bilinear.b, s_bilinear.sigma, 0, theta, weight,
                               state.modes());
    GaussianOp op1 =
        bilinear_projector_fgo(s_bilinear.a, s_bilinear.b, s_bilinear.sigma, 1, theta, weight,
                               state.modes());
    double det0 = std::max(branch_det(state, op0), 0.0);
    double det1 = std::max(branch_det(state, op1), 0.0);
    if (det0 <= kEpsProb && det1 <= kEpsProb)
        throw NumericalDegeneracy("both measurement branches vanish");
    int s;
    if (det0 <= kEpsProb)
        s = 1;
    else if (det1 <= kEpsProb)
        s = 0;
    else
        s = (uniform01(rng) * (std::sqrt(det0) + std::sqrt(det1)) < std::sqrt(det0)) ? 0 : 1;
    apply_fgo(state, s == 0 ? op0 : op1);
    return s;
}

namespace {

struct FaceDefect {
    int local_face;
    int y;
};

// Uniform-weight space-time matching on one face graph; returns the parity
// mask of recovery qubits.
std::vector<uint8_t> decode_face_graph(const StabilizerSet::FaceGraph& g,
                                       const std::vector<FaceDefect>& defects, int n_qubits) {
    std::vector<uint8_t> flips(n_qubits, 0);
    const int k = static_cast<int>(defects.size());
    if (k == 0) return flips;
    const int nn = 2 * k;
    std::vector<double> w(static_cast<size_t>(nn) * nn, 0.0);
    auto W = [&](int u, int v) -> double& { return w[static_cast<size_t>(u) * nn + v]; };
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (i != j)
                W(i, j) = g.dist[defects[i].local_face][defects[j].local_face] +
                          std::abs(defects[i].y - defects[j].y);
            W(i, k + j) = W(k + j, i) = g.boundary_dist[defects[i].local_face];
        }
    }
    std::vector<int> match = min_weight_perfect_matching(nn, w);
    for (int u = 0; u < k; ++u) {
        int v = match[u];
        if (v < u) continue;
        if (v < k) {
            for (int q : g.path_qubits[defects[u].local_face][defects[v].local_face])
                flips[q] ^= 1;
        } else {
            for (int q : g.boundary_path[defects[u].local_face]) flips[q] ^= 1;
        }
    }
    return flips;
}

}  // namespace

std::pair<std::vector<uint8_t>, std::vector<uint8_t>> decode_surface_defects(
    const StabilizerSet& s, const std::vector<std::pair<int, int>>& face_cycle_defects) {
    std::vector<int> z_local(s.face_count(), -1), y_local(s.face_count(), -1);
    for (int i = 0; i < static_cast<int>(s.z_graph.face_ids.size()); ++i)
        z_local[s.z_graph.face_ids[i]] = i;
    for (int i = 0; i < static_cast<int>(s.y_graph.face_ids.size()); ++i)
        y_local[s.y_graph.face_ids[i]] = i;
    std::vector<FaceDefect> z_defects, y_defects;
    for (const auto& [fid, y] : face_cycle_defects) {
        if (z_local[fid] >= 0)
            z_defects.push_back({z_local[fid], y});
        else
            y_defects.push_back({y_local[fid], y});
    }
    return {decode_face_graph(s.z_graph, z_defects, s.n),
            decode_face_graph(s.y_graph, y_defects, s.n)};
}

SurfaceRunResult run_and_reconstruct(const SurfaceRunConfig& config, uint64_t samples,
                                     uint64_t seed, int workers) {
    const StabilizerSet s = build_stabilizers(config.d);
    const Logicals L = build_logicals(s);
    auto [init_state, init_frame] = init_logical_bell(s);
    const int n = s.n, d = s.d, T = config.T;
    const int F = s.face_count();
    const double theta_x = std::asin(std::sqrt(config.p_x > 0 ? config.p_x : 0.0));
    const double theta_m = std::asin(std::sqrt(config.p_m_coherent > 0 ? config.p_m_coherent : 0.0));

    // face id layout in the syndrome record: blue | red | green
    const int nb = d - 1, nr = (d - 1) * (d - 1);

    struct Sample {
        double a_xi, a_ix, a_yy, a_yz, a_zy, a_zz, a_xx;
        int w;
    };
    std::atomic<uint64_t> degenerate{0};

    auto one_sample = [&](uint64_t k) -> Sample {
        for (uint64_t retry = 0;; ++retry) {
            std::mt19937_64 rng = sample_stream(seed, k, retry);
            try {
                GaussianState state = init_state;
                LogicalFrame frame = init_frame;
                std::vector<uint8_t> record(static_cast<size_t>(F) * (T + 1), 0);

                for (int y = 0; y <= T; ++y) {
                    const bool noisy = y < T;  // the final round is error-free
                    if (noisy) {
                        for (int q = 0; q < n; ++q) {
                            double u = uniform01(rng);
                            if (u < config.p_y)
                                apply_pauli_error(state, frame, q, SurfaceErrorKind::Y, 0, 0, rng);
                            else if (u < config.p_y + config.p_z)
                                apply_pauli_error(state, frame, q, SurfaceErrorKind::Z, 0, 0, rng);
                            else if (u < config.p_y + config.p_z + config.p_x)
                                apply_pauli_error(state, frame, q, SurfaceErrorKind::XCoherent,
                                                  theta_x, config.c, rng);
                        }
                    }
                    std::vector<uint8_t> tilde_bits(static_cast<size_t>(d - 1) * (d - 1), 0);
                    std::vector<uint8_t> green_bits(d - 1, 0);
                    for (const auto& mop : s.measured) {
                        int flip = 0;
                        if (noisy && config.p_m > 0) {
                            double u = uniform01(rng);
                            // X: syndrome flip; Y: flip + data error; Z: data error
                            if (u < config.p_m) {
                                int which = static_cast<int>(u / (config.p_m / 3.0));
                                which = std::min(which, 2);
                                const SurfaceFace* f = nullptr;
                                if (mop.kind == StabilizerSet::Measured::Kind::Blue)
                                    f = &s.blue[mop.index];
                                else if (mop.kind == StabilizerSet::Measured::Kind::Green)
                                    f = &s.green[mop.column_pair];
                                else
                                    f = &s.tilde[mop.column_pair * (d - 1) + mop.index];
                                if (which <= 1) flip = 1;     // X or Y
                                if (which >= 1) {             // Y or Z: leak onto the data
                                    int q = f->qubits.front();
                                    SurfaceErrorKind kk = f->letters.front() == 'Y'
                                                              ? SurfaceErrorKind::Y
                                                              : SurfaceErrorKind::Z;
                                    apply_pauli_error(state, frame, q, kk, 0, 0, rng);
                                }
                            }
                        }
                        double phi = 0.0;
                        double weight = 1.0;
                        if (noisy && config.p_m_coherent > 0) {
                            OutcomePmf pmf = pmf_simple(theta_m, config.c_m);
                            const auto& e = pmf.support[pmf.sample(rng)];
                            phi = e.phi;
                            weight = e.weight;
                        }
                        int bit = measure_stabilizer(state, mop.bilinear, phi, rng, weight) ^ flip;
                        if (mop.kind == StabilizerSet::Measured::Kind::Blue)
                            record[static_cast<size_t>(y) * F + mop.index] = static_cast<uint8_t>(bit);
                        else if (mop.kind == StabilizerSet::Measured::Kind::Green)
                            green_bits[mop.column_pair] = static_cast<uint8_t>(bit);
                        else
                            tilde_bits[mop.column_pair * (d - 1) + mop.index] =
                                static_cast<uint8_t>(bit);
                    }
                    for (int c = 0; c < d - 1; ++c) {
                        std::vector<uint8_t> col(tilde_bits.begin() + c * (d - 1),
                                                 tilde_bits.begin() + (c + 1) * (d - 1));
                        std::vector<uint8_t> red = convert_syndromes(col, green_bits[c]);
                        for (int j = 0; j < d - 1; ++j)
                            record[static_cast<size_t>(y) * F + nb + c * (d - 1) + j] = red[j];
                        record[static_cast<size_t>(y) * F + nb + nr + c] = green_bits[c];
                    }
                }

                // defects per species and uniform-weight matching
                std::vector<std::pair<int, int>> defects;
                for (int fid = 0; fid < F; ++fid)
                    for (int y = 0; y <= T; ++y) {
                        uint8_t prev = (y == 0) ? 0 : record[static_cast<size_t>(y - 1) * F + fid];
                        if (record[static_cast<size_t>(y) * F + fid] ^ prev)
                            defects.push_back({fid, y});
                    }
                auto [y_recovery, z_recovery] = decode_surface_defects(s, defects);
                for (int q = 0; q < n; ++q) {
                    if (y_recovery[q])
                        apply_pauli_error(state, frame, q, SurfaceErrorKind::Y, 0, 0, rng);
                    if (z_recovery[q])
                        apply_pauli_error(state, frame, q, SurfaceErrorKind::Z, 0, 0, rng);
                }

                Sample out;
                out.a_xi = L.a_xi.sigma * state.M(L.a_xi.a, L.a_xi.b);
                out.a_ix = L.a_ix.sigma * state.M(L.a_ix.a, L.a_ix.b);
                out.a_yy = L.a_yy.sigma * state.M(L.a_yy.a, L.a_yy.b);
                out.a_yz = L.a_yz.sigma * state.M(L.a_yz.a, L.a_yz.b);
                out.a_zy = L.a_zy.sigma * state.M(L.a_zy.a, L.a_zy.b);
                out.a_zz = L.a_zz.sigma * state.M(L.a_zz.a, L.a_zz.b);
                out.a_xx = bilinear_pair_expectation(state, L.a_xi, L.a_ix);
                out.w = frame.w & 1;
                if (std::abs(out.a_xx - 1.0) > 1e-8)
                    throw InternalInvariantViolation("A_XX drifted away from +1");
                return out;
            } catch (const NumericalDegeneracy&) {
                degenerate.fetch_add(1);
                if (retry > 100)
                    throw InternalInvariantViolation("persistent numerical degeneracy");
            }
        }
    };

    std::vector<Sample> shots = run_parallel_t<Sample>(samples, workers, one_sample);

    double a_xx = 0, a_xi = 0, a_ix = 0, a_yy = 0, a_yz = 0, a_zy = 0, a_zz = 0;
    std::vector<double> f_values(samples);
    double a_xx_min = 1.0;
    for (uint64_t k = 0; k < samples; ++k) {
        const Sample& sm = shots[k];
        double sgn = sm.w ? -1.0 : 1.0;  // Z_{n+1}^w flips W' in {X, Y}
        a_xi += sm.a_xi;
        a_ix += sgn * sm.a_ix;
        a_yy += sgn * sm.a_yy;
        a_yz += sm.a_yz;
        a_zy += sgn * sm.a_zy;
        a_zz += sm.a_zz;
        a_xx += sgn * sm.a_xx;
        a_xx_min = std::min(a_xx_min, sm.a_xx);
        f_values[k] = 0.25 * (1.0 + sgn * (1.0 - sm.a_yy) + sm.a_zz);
    }
    const double N = static_cast<double>(samples);
    a_xi /= N;
    a_ix /= N;
    a_yy /= N;
    a_yz /= N;
    a_zy /= N;
    a_zz /= N;
    a_xx /= N;

    using M2 = Eigen::Matrix2cd;
    const std::complex<double> I(0, 1);
    M2 id = M2::Identity(), sx, sy, sz;
    sx << 0, 1, 1, 0;
    sy << 0, -I, I, 0;
    sz << 1, 0, 0, -1;
    auto kron = [](const M2& a, const M2& b) {
        Eigen::Matrix4cd out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        return out;
    };
    Eigen::Matrix4cd rho = kron(id, id);  // A_{I,I} = 1
    rho += a_xx * kron(sx, sx) + a_xi * kron(sx, id) + a_ix * kron(id, sx);
    rho += a_yy * kron(sy, sy) + a_yz * kron(sy, sz) + a_zy * kron(sz, sy);
    rho += a_zz * kron(sz, sz);
    rho *= 0.25;

    MeanStderr f = mean_stderr(f_values);
    SurfaceRunResult result;
    result.rho = rho;
    result.fidelity = f.mean;
    result.fidelity_stderr = f.stderr_;
    result.a_xx_min = a_xx_min;
    result.samples = samples;
    result.degenerate = degenerate.load();
    return result;
}

std::string format_layout(const StabilizerSet& s) {
    std::ostringstream os;
    os << "# distance " << s.d << " surface code, " << s.n
       << " data qubits in boustrophedon column order\n";
    os << "# qubit grid (row, col) -> index\n";
    for (int r = 0; r < s.d; ++r) {
        os << "#";
        for (int c = 0; c < s.d; ++c) os << " " << snake_index(r, c, s.d);
        os << "\n";
    }
    auto dump = [&](const char* name, const std::vector<SurfaceFace>& faces) {
        for (const auto& f : faces) {
            os << name;
            if (f.column_pair >= 0) os << " pair=" << f.column_pair;
            os << " index=" << f.index << " :";
            for (size_t k = 0; k < f.qubits.size(); ++k)
                os << " " << f.letters[k] << f.qubits[k];
            os << "\n";
        }
    };
    dump("blue", s.blue);
    dump("red", s.red);
    dump("green", s.green);
    dump("tilde", s.tilde);
    return os.str();
}

}  // namespace repqec
