#include "repqec/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>

#include "repqec/blossom.hpp"
#include "repqec/errors.hpp"
#include "repqec/pauli_frame.hpp"

namespace repqec {

DefectSet difference_syndromes(const SyndromeGrid& s) {
    DefectSet d;
    for (int y = 0; y < s.n_rounds; ++y)
        for (int x = 0; x < s.n_sites; ++x) {
            uint8_t prev = (y == 0) ? 0 : s.at(x, y - 1);
            if (s.at(x, y) ^ prev) {
                d.defects.push_back({x, y});
                d.boundary_parity ^= 1;
            }
        }
    return d;
}

namespace {

int grid_id(int x, int y, int n) { return y * (n - 1) + x; }

struct LoAdjacency {
    struct Arc {
        int to;  // -1 = boundary
        double weight;
        int flip_qubit;
    };
    std::vector<std::vector<Arc>> adj;
};

LoAdjacency build_adjacency(const LeadingOrderGraph& g) {
    LoAdjacency a;
    a.adj.assign(static_cast<size_t>(g.n - 1) * (g.T + 1), {});
    for (const auto& e : g.edges) {
        double w = -std::log(e.prob_coefficient * g.p);
        w = std::max(w, 1e-9);
        int ia = grid_id(e.a.x, e.a.y, g.n);
        if (e.b_is_boundary) {
            a.adj[ia].push_back({-1, w, e.flip_qubit});
        } else {
            int ib = grid_id(e.b.x, e.b.y, g.n);
            a.adj[ia].push_back({ib, w, e.flip_qubit});
            a.adj[ib].push_back({ia, w, e.flip_qubit});
        }
    }
    return a;
}

struct DijkstraResult {
    std::vector<double> dist;
    std::vector<int> prev_node;
    std::vector<int> prev_flip;
    double boundary_dist = std::numeric_limits<double>::infinity();
    int boundary_from = -1;
    int boundary_flip = -1;
};

DijkstraResult dijkstra(const LoAdjacency& a, int src) {
    const double inf = std::numeric_limits<double>::infinity();
    DijkstraResult r;
    r.dist.assign(a.adj.size(), inf);
    r.prev_node.assign(a.adj.size(), -2);
    r.prev_flip.assign(a.adj.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    r.dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > r.dist[u] + 1e-12) continue;
        for (const auto& arc : a.adj[u]) {
            if (arc.to == -1) {
                if (d + arc.weight < r.boundary_dist) {
                    r.boundary_dist = d + arc.weight;
                    r.boundary_from = u;
                    r.boundary_flip = arc.flip_qubit;
                }
                continue;
            }
            if (d + arc.weight < r.dist[arc.to] - 1e-15) {
                r.dist[arc.to] = d + arc.weight;
                r.prev_node[arc.to] = u;
                r.prev_flip[arc.to] = arc.flip_qubit;
                pq.push({r.dist[arc.to], arc.to});
            }
        }
    }
    return r;
}

void collect_path_flips(const DijkstraResult& r, int src, int dst, std::vector<int>& flips) {
    for (int v = dst; v != src;) {
        if (r.prev_node[v] == -2)
            throw InternalInvariantViolation("leading-order graph is disconnected");
        if (r.prev_flip[v] >= 0) flips.push_back(r.prev_flip[v]);
        v = r.prev_node[v];
    }
}

}  // namespace

LeadingOrderGraph::PathResult LeadingOrderGraph::shortest_path(const Defect& from,
                                                               const Defect& to) const {
    LoAdjacency a = build_adjacency(*this);
    DijkstraResult r = dijkstra(a, grid_id(from.x, from.y, n));
    PathResult out;
    int dst = grid_id(to.x, to.y, n);
    out.distance = r.dist[dst];
    collect_path_flips(r, grid_id(from.x, from.y, n), dst, out.flips);
    return out;
}

LeadingOrderGraph::PathResult LeadingOrderGraph::shortest_to_boundary(const Defect& from) const {
    LoAdjacency a = build_adjacency(*this);
    DijkstraResult r = dijkstra(a, grid_id(from.x, from.y, n));
    PathResult out;
    out.distance = r.boundary_dist;
    if (r.boundary_from < 0)
        throw InternalInvariantViolation("no boundary exit in leading-order graph");
    if (r.boundary_flip >= 0) out.flips.push_back(r.boundary_flip);
    collect_path_flips(r, grid_id(from.x, from.y, n), r.boundary_from, out.flips);
    return out;
}

std::string LeadingOrderGraph::format_table() const {
    std::ostringstream os;
    os << "# leading-order decoder weights: n=" << n << " T=" << T << " p=" << p << "\n";
    os << "# (x1,y1) (x2,y2|bnd) prob_coefficient flip_qubit weight\n";
    for (const auto& e : edges) {
        os << "(" << e.a.x << "," << e.a.y << ") ";
        if (e.b_is_boundary)
            os << "bnd ";
        else
            os << "(" << e.b.x << "," << e.b.y << ") ";
        os << e.prob_coefficient << " " << e.flip_qubit << " "
           << -std::log(e.prob_coefficient * p) << "\n";
    }
    return os.str();
}

std::shared_ptr<const LeadingOrderGraph> leading_order_graph(int n, int T, double p) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, double>, std::shared_ptr<const LeadingOrderGraph>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, T, p);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    auto g = std::make_shared<LeadingOrderGraph>();
    g->n = n;
    g->T = T;
    g->p = p;
    // Merge fault locations that create the same defect pair.
    std::map<std::tuple<int, int, int>, size_t> index;  // (id_a, id_b|-1, unused)
    for (const LeadingOrderEdge& e : enumerate_single_faults(n, T)) {
        int ia = grid_id(e.a.x, e.a.y, n);
        int ib = e.b_is_boundary ? -1 : grid_id(e.b.x, e.b.y, n);
        if (ib >= 0 && ib < ia) std::swap(ia, ib);
        auto key2 = std::make_tuple(ia, ib, 0);
        auto found = index.find(key2);
        if (found == index.end()) {
            LeadingOrderEdge merged = e;
            if (ib >= 0 && grid_id(e.a.x, e.a.y, n) != ia) std::swap(merged.a, merged.b);
            index[key2] = g->edges.size();
            g->edges.push_back(merged);
        } else {
            LeadingOrderEdge& m = g->edges[found->second];
            if (m.flip_qubit != e.flip_qubit)
                throw InternalInvariantViolation("conflicting recovery payloads on one edge");
            m.prob_coefficient += e.prob_coefficient;
        }
    }
    cache[key] = g;
    return g;
}

MatchingGraph build_matching_graph(const DefectSet& d, int n, int T, const WeightingSpec& spec) {
    MatchingGraph g;
    g.n = n;
    g.T = T;
    g.spec = spec;
    g.defects = d.defects;
    const int k = static_cast<int>(d.defects.size());
    const int nn = 2 * k;
    g.weights.assign(static_cast<size_t>(nn) * nn, 0.0);
    if (k == 0) return g;

    std::vector<double> bdist(k);
    std::vector<std::vector<double>> dd(k, std::vector<double>(k, 0.0));
    if (spec.kind == DecoderWeighting::Uniform) {
        for (int i = 0; i < k; ++i)
            bdist[i] = std::min(d.defects[i].x + 1, (n - 1) - d.defects[i].x);
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                dd[i][j] = dd[j][i] = std::abs(d.defects[i].x - d.defects[j].x) +
                                      std::abs(d.defects[i].y - d.defects[j].y);
    } else {
        g.lo = leading_order_graph(n, T, spec.p);
        LoAdjacency adj = build_adjacency(*g.lo);
        for (int i = 0; i < k; ++i) {
            DijkstraResult r = dijkstra(adj, grid_id(d.defects[i].x, d.defects[i].y, n));
            bdist[i] = r.boundary_dist;
            for (int j = 0; j < k; ++j)
                if (j != i) dd[i][j] = r.dist[grid_id(d.defects[j].x, d.defects[j].y, n)];
        }
        // symmetrize against roundoff
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) dd[i][j] = dd[j][i] = 0.5 * (dd[i][j] + dd[j][i]);
    }

    auto W = [&](int u, int v) -> double& { return g.weights[static_cast<size_t>(u) * nn + v]; };
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i != j) W(i, j) = dd[i][j];
            // a defect may pair with any boundary node at its own exit cost
            W(i, k + j) = W(k + j, i) = bdist[i];
        }
    return g;
}

Matching mwpm(const MatchingGraph& g) {
    const int nn = g.nodes();
    if (nn == 0) return {};
    std::vector<int> match = min_weight_perfect_matching(nn, g.weights);
    Matching m;
    for (int u = 0; u < nn; ++u)
        if (match[u] > u) m.push_back({u, match[u]});
    std::sort(m.begin(), m.end());
    return m;
}

Matching brute_force_mwpm(const MatchingGraph& g) {
    const int k = static_cast<int>(g.defects.size());
    if (k > 12) throw std::invalid_argument("brute_force_mwpm limited to 12 defects");
    if (k == 0) return {};

    std::vector<int> partner(k, -1), best_partner;
    double best = std::numeric_limits<double>::infinity();
    // partner[i] = j for a pair, = i for a boundary match
    std::function<void(int, double)> rec = [&](int i, double cost) {
        while (i < k && partner[i] != -1) ++i;
        if (cost >= best) return;
        if (i == k) {
            best = cost;
            best_partner = partner;
            return;
        }
        partner[i] = i;
        rec(i + 1, cost + g.weight(i, k + i));
        partner[i] = -1;
        for (int j = i + 1; j < k; ++j) {
            if (partner[j] != -1) continue;
            partner[i] = j;
            partner[j] = i;
            rec(i + 1, cost + g.weight(i, j));
            partner[i] = partner[j] = -1;
        }
    };
    rec(0, 0.0);

    Matching m;
    for (int i = 0; i < k; ++i) {
        if (best_partner[i] == i)
            m.push_back({i, k + i});
        else if (best_partner[i] > i)
            m.push_back({i, best_partner[i]});
    }
    // pair up the unused boundary nodes (zero weight)
    std::vector<int> free_bnd;
    for (int i = 0; i < k; ++i)
        if (best_partner[i] != i) free_bnd.push_back(k + i);
    for (size_t t = 0; t + 1 < free_bnd.size(); t += 2) m.push_back({free_bnd[t], free_bnd[t + 1]});
    std::sort(m.begin(), m.end());
    return m;
}

double matching_weight(const MatchingGraph& g, const Matching& m) {
    double w = 0.0;
    for (const auto& [u, v] : m) w += g.weight(u, v);
    return w;
}

std::vector<int> recovery_from_matching(const MatchingGraph& g, const Matching& m) {
    const int k = static_cast<int>(g.defects.size());
    std::vector<int> r(g.n, 0);
    auto flip_range = [&](int lo, int hi) {
        for (int q = lo; q <= hi; ++q) r[q] ^= 1;
    };
    for (const auto& [u, v] : m) {
        if (u >= k) continue;  // boundary-boundary
        if (g.spec.kind == DecoderWeighting::Uniform) {
            if (v < k) {
                int x1 = g.defects[u].x, x2 = g.defects[v].x;
                if (x1 > x2) std::swap(x1, x2);
                if (x1 != x2) flip_range(x1 + 1, x2);
            } else {
                int x = g.defects[u].x;
                if (x + 1 <= (g.n - 1) - x)
                    flip_range(0, x);
                else
                    flip_range(x + 1, g.n - 1);
            }
        } else {
            LeadingOrderGraph::PathResult path =
                (v < k) ? g.lo->shortest_path(g.defects[u], g.defects[v])
                        : g.lo->shortest_to_boundary(g.defects[u]);
            for (int q : path.flips) r[q] ^= 1;
        }
    }
    return r;
}

std::string dump_matching(const MatchingGraph& g, const Matching& m) {
    std::ostringstream os;
    const int k = static_cast<int>(g.defects.size());
    for (const auto& d : g.defects) os << "defect " << d.x << " " << d.y << "\n";
    for (const auto& [u, v] : m) {
        if (u >= k) continue;
        if (v < k)
            os << "pair (" << g.defects[u].x << "," << g.defects[u].y << ") ("
               << g.defects[v].x << "," << g.defects[v].y << ")\n";
        else
            os << "boundary (" << g.defects[u].x << "," << g.defects[u].y << ")\n";
    }
    return os.str();
}

}  // namespace repqec
