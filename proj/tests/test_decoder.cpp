#include <stdexcept>
#include <limits>
#include <queue>
#include <random>

#include "doctest.h"
#include "repqec/decoder.hpp"
#include "repqec/pauli_frame.hpp"
#include "repqec/rng.hpp"

using namespace repqec;

namespace {

SyndromeGrid make_grid(int n, int T) {
    SyndromeGrid g;
    g.n_sites = n - 1;
    g.n_rounds = T + 1;
    g.bits.assign(static_cast<size_t>(g.n_sites) * g.n_rounds, 0);
    return g;
}

MatchingGraph graph_from_defects(std::vector<Defect> defects, int n, int T,
                                 DecoderWeighting kind = DecoderWeighting::Uniform,
                                 double p = 0.01) {
    DefectSet d;
    d.defects = std::move(defects);
    return build_matching_graph(d, n, T, WeightingSpec{kind, p});
}

// independent BFS shortest path on the uniformly weighted square lattice
int bfs_distance(int n, int T, Defect a, Defect b) {
    const int W = n - 1, H = T + 1;
    std::vector<int> dist(static_cast<size_t>(W) * H, -1);
    std::queue<int> q;
    auto id = [&](int x, int y) { return y * W + x; };
    dist[id(a.x, a.y)] = 0;
    q.push(id(a.x, a.y));
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        int x = u % W, y = u / W;
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int dir = 0; dir < 4; ++dir) {
            int nx = x + dx[dir], ny = y + dy[dir];
            if (nx < 0 || nx >= W || ny < 0 || ny >= H) continue;
            if (dist[id(nx, ny)] != -1) continue;
            dist[id(nx, ny)] = dist[u] + 1;
            q.push(id(nx, ny));
        }
    }
    return dist[id(b.x, b.y)];
}

}  // namespace

TEST_CASE("difference_syndromes") {
    SyndromeGrid g = make_grid(5, 4);
    CHECK(difference_syndromes(g).defects.empty());

    // single flip at (site 1, cycle 2) persisting through later rounds
    for (int y = 2; y < g.n_rounds; ++y) g.at(1, y) = 1;
    DefectSet d = difference_syndromes(g);
    REQUIRE(d.defects.size() == 1);
    CHECK(d.defects[0].x == 1);
    CHECK(d.defects[0].y == 2);
    CHECK(d.boundary_parity == 1);

    // random grids against a direct XOR recomputation
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        SyndromeGrid r = make_grid(5, 4);
        for (auto& b : r.bits) b = static_cast<uint8_t>(uniform01(rng) < 0.5);
        DefectSet ds = difference_syndromes(r);
        int count = 0;
        for (int y = 0; y < r.n_rounds; ++y)
            for (int x = 0; x < r.n_sites; ++x) {
                int prev = (y == 0) ? 0 : r.at(x, y - 1);
                if (r.at(x, y) ^ prev) ++count;
            }
        CHECK(static_cast<int>(ds.defects.size()) == count);
        CHECK(((count % 2) ^ ds.boundary_parity) == 0);
    }
}

TEST_CASE("uniform matching graph weights") {
    // defects {(0,0),(1,0)} in 1-based spec notation {(1,1),(2,1)}, n = 5
    MatchingGraph g = graph_from_defects({{0, 0}, {1, 0}}, 5, 4);
    CHECK(g.weight(0, 1) == 1.0);
    CHECK(g.weight(0, 2) == 1.0);  // site 0: min(1, 4) = 1
    CHECK(g.weight(1, 3) == 2.0);  // site 1: min(2, 3) = 2
    CHECK(g.weight(2, 3) == 0.0);
    Matching m = mwpm(g);
    CHECK(matching_weight(g, m) == 1.0);  // pair beats two boundaries (1 < 3)

    MatchingGraph g2 = graph_from_defects({{2, 1}}, 5, 4);
    Matching m2 = mwpm(g2);
    REQUIRE(m2.size() == 1);
    CHECK(matching_weight(g2, m2) == 2.0);  // min(3, 2) = 2

    CHECK(mwpm(graph_from_defects({}, 5, 4)).empty());
}

TEST_CASE("uniform pairwise weights equal BFS distances") {
    std::mt19937_64 rng(77);
    const int n = 6, T = 5;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Defect> defects;
        for (int i = 0; i < 8; ++i)
            defects.push_back({static_cast<int>(uniform01(rng) * (n - 1)),
                               static_cast<int>(uniform01(rng) * (T + 1))});
        MatchingGraph g = graph_from_defects(defects, n, T);
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j)
                CHECK(g.weight(i, j) == bfs_distance(n, T, defects[i], defects[j]));
    }
}

TEST_CASE("mwpm equals brute force on random instances") {
    std::mt19937_64 rng(20250101);
    const int n = 9, T = 8;
    for (int rep = 0; rep < 500; ++rep) {
        int k = 2 + static_cast<int>(uniform01(rng) * 11);  // 2..12 defects
        std::vector<Defect> defects;
        for (int i = 0; i < k; ++i)
            defects.push_back({static_cast<int>(uniform01(rng) * (n - 1)),
                               static_cast<int>(uniform01(rng) * (T + 1))});
        MatchingGraph g = graph_from_defects(defects, n, T);
        // dyadic random weights keep optimal totals exactly representable;
        // the boundary columns of a defect must stay equal (private twin)
        auto W = [&](int u, int v) -> double& {
            return g.weights[static_cast<size_t>(u) * g.nodes() + v];
        };
        for (int u = 0; u < k; ++u) {
            for (int v = u + 1; v < k; ++v)
                W(u, v) = W(v, u) = static_cast<double>(static_cast<int>(uniform01(rng) * 64)) / 16.0;
            double bd = static_cast<double>(static_cast<int>(uniform01(rng) * 64)) / 16.0;
            for (int v = 0; v < k; ++v) W(u, k + v) = W(k + v, u) = bd;
        }
        Matching exact = mwpm(g);
        Matching brute = brute_force_mwpm(g);
        REQUIRE(matching_weight(g, exact) == matching_weight(g, brute));
    }
}

TEST_CASE("mwpm beats greedy matching") {
    std::mt19937_64 rng(31337);
    const int n = 11, T = 10;
    for (int rep = 0; rep < 500; ++rep) {
        int k = 2 + static_cast<int>(uniform01(rng) * 9);
        std::vector<Defect> defects;
        for (int i = 0; i < k; ++i)
            defects.push_back({static_cast<int>(uniform01(rng) * (n - 1)),
                               static_cast<int>(uniform01(rng) * (T + 1))});
        MatchingGraph g = graph_from_defects(defects, n, T);
        Matching exact = mwpm(g);

        // greedy: repeatedly take the globally cheapest pair
        std::vector<int> used(g.nodes(), 0);
        double greedy = 0.0;
        for (int round = 0; round < g.nodes() / 2; ++round) {
            double best = std::numeric_limits<double>::infinity();
            int bu = -1, bv = -1;
            for (int u = 0; u < g.nodes(); ++u)
                for (int v = u + 1; v < g.nodes(); ++v)
                    if (!used[u] && !used[v] && g.weight(u, v) < best) {
                        best = g.weight(u, v);
                        bu = u;
                        bv = v;
                    }
            used[bu] = used[bv] = 1;
            greedy += best;
        }
        CHECK(matching_weight(g, exact) <= greedy + 1e-12);
    }
}

TEST_CASE("recovery mapping") {
    // empty matching -> identity mask
    MatchingGraph g0 = graph_from_defects({}, 3, 2);
    CHECK(recovery_from_matching(g0, {}) == std::vector<int>{0, 0, 0});

    // vertical (time-like) pair leaves the mask empty
    MatchingGraph gt = graph_from_defects({{1, 0}, {1, 2}}, 5, 4);
    Matching mt = mwpm(gt);
    REQUIRE(matching_weight(gt, mt) == 2.0);
    CHECK(recovery_from_matching(gt, mt) == std::vector<int>{0, 0, 0, 0, 0});

    // horizontal pair flips the qubits between the sites
    MatchingGraph gh = graph_from_defects({{0, 1}, {2, 1}}, 7, 3);
    Matching mh = mwpm(gh);
    CHECK(recovery_from_matching(gh, mh) == std::vector<int>{0, 1, 1, 0, 0, 0, 0});

    // boundary match flips toward the nearer edge
    MatchingGraph gb = graph_from_defects({{0, 1}}, 5, 4);
    CHECK(recovery_from_matching(gb, mwpm(gb)) == std::vector<int>{1, 0, 0, 0, 0});
    MatchingGraph gb2 = graph_from_defects({{3, 1}}, 5, 4);
    CHECK(recovery_from_matching(gb2, mwpm(gb2)) == std::vector<int>{0, 0, 0, 0, 1});
}

TEST_CASE("leading-order fault enumeration is sane") {
    const int n = 5, T = 4;
    auto lo = leading_order_graph(n, T, 0.01);
    CHECK(!lo->edges.empty());
    double total_coef = 0.0;
    for (const auto& e : lo->edges) {
        CHECK(e.prob_coefficient > 0.0);
        total_coef += e.prob_coefficient;
    }
    // every fault location lands on exactly one edge: n*(2T+1) + 2T data
    // idles + (n-1)*2T ancilla + (n-1)*2T CNOT allocations
    double expected = n * (2 * T + 1) + 2 * T + (n - 1) * 2 * T + (n - 1) * 2 * T;
    CHECK(total_coef == doctest::Approx(expected).epsilon(1e-9));

    // the table is printable and mentions diagonal edges
    std::string table = lo->format_table();
    CHECK(table.find("bnd") != std::string::npos);
    bool has_diagonal = false;
    for (const auto& e : lo->edges)
        if (!e.b_is_boundary && e.a.x != e.b.x && e.a.y != e.b.y) has_diagonal = true;
    CHECK(has_diagonal);
}

TEST_CASE("dump_matching emits one line per defect and pair") {
    MatchingGraph g = graph_from_defects({{0, 0}, {1, 0}}, 5, 4);
    Matching m = mwpm(g);
    std::string s = dump_matching(g, m);
    CHECK(s.find("defect 0 0") != std::string::npos);
    CHECK(s.find("pair (0,0) (1,0)") != std::string::npos);
}
