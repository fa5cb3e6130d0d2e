#include "repqec/blossom.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "repqec/errors.hpp"

namespace repqec {

namespace {

// Primal-dual blossom implementation for dense graphs. Vertices are
// 1-based; ids above n denote contracted blossoms. Edge weights are doubled
// internally so that dual adjustments stay on the half-integer lattice of
// the inputs.
struct BlossomSolver {
    struct E {
        int u = 0, v = 0;
        double w = 0.0;
    };

    int n = 0, n_x = 0;
    double eps = 1e-9;
    std::vector<std::vector<E>> g;
    std::vector<double> lab;
    std::vector<int> match, slack, st, pa, S, vis;
    std::vector<std::vector<int>> flower, flower_from;
    std::deque<int> q;

    explicit BlossomSolver(int n_, const std::vector<double>& w) : n(n_) {
        int cap = 2 * n + 1;
        g.assign(cap, std::vector<E>(cap));
        lab.assign(cap, 0.0);
        match.assign(cap, 0);
        slack.assign(cap, 0);
        st.assign(cap, 0);
        pa.assign(cap, 0);
        S.assign(cap, 0);
        vis.assign(cap, 0);
        flower.assign(cap, {});
        flower_from.assign(cap, std::vector<int>(n + 1, 0));
        double w_max = 0.0;
        for (int u = 1; u <= n; ++u)
            for (int v = 1; v <= n; ++v) {
                double wv = w[static_cast<size_t>(u - 1) * n + (v - 1)];
                g[u][v] = E{u, v, 2.0 * wv};
                w_max = std::max(w_max, 2.0 * wv);
            }
        eps = 1e-9 * (1.0 + w_max);
    }

    double e_delta(const E& e) const { return lab[e.u] + lab[e.v] - g[e.u][e.v].w; }

    void update_slack(int u, int x) {
        if (!slack[x] || e_delta(g[u][x]) < e_delta(g[slack[x]][x])) slack[x] = u;
    }

    void set_slack(int x) {
        slack[x] = 0;
        for (int u = 1; u <= n; ++u)
            if (g[u][x].w > 0 && st[u] != x && S[st[u]] == 0) update_slack(u, x);
    }

    void q_push(int x) {
        if (x <= n) {
            q.push_back(x);
        } else {
            for (int f : flower[x]) q_push(f);
        }
    }

    void set_st(int x, int b) {
        st[x] = b;
        if (x > n)
            for (int f : flower[x]) set_st(f, b);
    }

    int get_pr(int b, int xr) {
        int pr = static_cast<int>(std::find(flower[b].begin(), flower[b].end(), xr) -
                                  flower[b].begin());
        if (pr % 2 == 1) {
            std::reverse(flower[b].begin() + 1, flower[b].end());
            return static_cast<int>(flower[b].size()) - pr;
        }
        return pr;
    }

    void set_match(int u, int v) {
        match[u] = g[u][v].v;
        if (u <= n) return;
        E e = g[u][v];
        int xr = flower_from[u][e.u];
        int pr = get_pr(u, xr);
        for (int i = 0; i < pr; ++i) set_match(flower[u][i], flower[u][i ^ 1]);
        set_match(xr, v);
        std::rotate(flower[u].begin(), flower[u].begin() + pr, flower[u].end());
    }

    void augment(int u, int v) {
        for (;;) {
            int xnv = st[match[u]];
            set_match(u, v);
            if (!xnv) return;
            set_match(xnv, st[pa[xnv]]);
            u = st[pa[xnv]];
            v = xnv;
        }
    }

    int get_lca(int u, int v) {
        static thread_local int t = 0;
        for (++t; u || v; std::swap(u, v)) {
            if (u == 0) continue;
            if (vis[u] == t) return u;
            vis[u] = t;
            u = st[match[u]];
            if (u) u = st[pa[u]];
        }
        return 0;
    }

    void add_blossom(int u, int lca, int v) {
        int b = n + 1;
        while (b <= n_x && st[b]) ++b;
        if (b > n_x) ++n_x;
        lab[b] = 0.0;
        S[b] = 0;
        match[b] = match[lca];
        flower[b].clear();
        flower[b].push_back(lca);
        for (int x = u, y; x != lca; x = st[pa[y]]) {
            flower[b].push_back(x);
            flower[b].push_back(y = st[match[x]]);
            q_push(y);
        }
        std::reverse(flower[b].begin() + 1, flower[b].end());
        for (int x = v, y; x != lca; x = st[pa[y]]) {
            flower[b].push_back(x);
            flower[b].push_back(y = st[match[x]]);
            q_push(y);
        }
        set_st(b, b);
        for (int x = 1; x <= n_x; ++x) g[b][x].w = g[x][b].w = 0;
        for (int x = 1; x <= n; ++x) flower_from[b][x] = 0;
        for (int xs : flower[b]) {
            for (int x = 1; x <= n_x; ++x)
                if (g[b][x].w == 0 || e_delta(g[xs][x]) < e_delta(g[b][x])) {
                    g[b][x] = g[xs][x];
                    g[x][b] = g[x][xs];
                }
            for (int x = 1; x <= n; ++x)
                if (flower_from[xs][x]) flower_from[b][x] = xs;
        }
        set_slack(b);
    }

    void expand_blossom(int b) {
        for (int f : flower[b]) set_st(f, f);
        int xr = flower_from[b][g[b][pa[b]].u];
        int pr = get_pr(b, xr);
        for (int i = 0; i < pr; i += 2) {
            int xs = flower[b][i], xns = flower[b][i + 1];
            pa[xs] = g[xns][xs].u;
            S[xs] = 1;
            S[xns] = 0;
            slack[xs] = 0;
            set_slack(xns);
            q_push(xns);
        }
        S[xr] = 1;
        pa[xr] = pa[b];
        for (int i = pr + 1; i < static_cast<int>(flower[b].size()); ++i) {
            int xs = flower[b][i];
            S[xs] = -1;
            set_slack(xs);
        }
        st[b] = 0;
    }

    bool on_found_edge(const E& e) {
        int u = st[e.u], v = st[e.v];
        if (S[v] == -1) {
            pa[v] = e.u;
            S[v] = 1;
            int nu = st[match[v]];
            slack[v] = slack[nu] = 0;
            S[nu] = 0;
            q_push(nu);
        } else if (S[v] == 0) {
            int lca = get_lca(u, v);
            if (!lca) {
                augment(u, v);
                augment(v, u);
                return true;
            }
            add_blossom(u, lca, v);
        }
        return false;
    }

    bool matching_round() {
        std::fill(S.begin() + 1, S.begin() + n_x + 1, -1);
        std::fill(slack.begin() + 1, slack.begin() + n_x + 1, 0);
        q.clear();
        for (int x = 1; x <= n_x; ++x)
            if (st[x] == x && !match[x]) {
                pa[x] = 0;
                S[x] = 0;
                q_push(x);
            }
        if (q.empty()) return false;
        for (;;) {
            while (!q.empty()) {
                int u = q.front();
                q.pop_front();
                if (S[st[u]] == 1) continue;
                for (int v = 1; v <= n; ++v)
                    if (g[u][v].w > 0 && st[u] != st[v]) {
                        if (e_delta(g[u][v]) <= eps) {
                            if (on_found_edge(g[u][v])) return true;
                        } else {
                            update_slack(u, st[v]);
                        }
                    }
            }
            double d = std::numeric_limits<double>::infinity();
            for (int b = n + 1; b <= n_x; ++b)
                if (st[b] == b && S[b] == 1) d = std::min(d, lab[b] / 2.0);
            for (int x = 1; x <= n_x; ++x)
                if (st[x] == x && slack[x]) {
                    if (S[x] == -1)
                        d = std::min(d, e_delta(g[slack[x]][x]));
                    else if (S[x] == 0)
                        d = std::min(d, e_delta(g[slack[x]][x]) / 2.0);
                }
            if (!std::isfinite(d))
                throw InternalInvariantViolation("blossom: no dual adjustment available");
            for (int u = 1; u <= n; ++u) {
                if (S[st[u]] == 0) {
                    if (lab[u] - d < -eps) return false;
                    lab[u] -= d;
                } else if (S[st[u]] == 1) {
                    lab[u] += d;
                }
            }
            for (int b = n + 1; b <= n_x; ++b)
                if (st[b] == b) {
                    if (S[b] == 0)
                        lab[b] += 2.0 * d;
                    else if (S[b] == 1)
                        lab[b] -= 2.0 * d;
                }
            q.clear();
            for (int x = 1; x <= n_x; ++x)
                if (st[x] == x && slack[x] && st[slack[x]] != x &&
                    e_delta(g[slack[x]][x]) <= eps)
                    if (on_found_edge(g[slack[x]][x])) return true;
            for (int b = n + 1; b <= n_x; ++b)
                if (st[b] == b && S[b] == 1 && std::abs(lab[b]) <= eps) expand_blossom(b);
        }
    }

    std::vector<int> solve() {
        n_x = n;
        for (int u = 0; u <= n; ++u) {
            st[u] = u;
            flower[u].clear();
            for (int v = 1; v <= n; ++v) flower_from[u][v] = (u == v) ? u : 0;
        }
        double w_max = 0.0;
        for (int u = 1; u <= n; ++u)
            for (int v = 1; v <= n; ++v) w_max = std::max(w_max, g[u][v].w);
        for (int u = 1; u <= n; ++u) lab[u] = w_max / 2.0;
        while (matching_round()) {
        }
        std::vector<int> result(n);
        for (int u = 1; u <= n; ++u) {
            if (!match[u]) throw InternalInvariantViolation("blossom: matching not perfect");
            result[u - 1] = match[u] - 1;
        }
        return result;
    }
};

}  // namespace

std::vector<int> max_weight_perfect_matching(int n, const std::vector<double>& weights) {
    if (n == 0) return {};
    if (n % 2 != 0) throw std::invalid_argument("perfect matching needs an even vertex count");
    if (static_cast<int>(weights.size()) != n * n)
        throw std::invalid_argument("weight matrix must be n x n");
    BlossomSolver solver(n, weights);
    return solver.solve();
}

std::vector<int> min_weight_perfect_matching(int n, const std::vector<double>& weights) {
    if (n == 0) return {};
    double w_max = 0.0;
    for (double w : weights) w_max = std::max(w_max, w);
    std::vector<double> flipped(weights.size());
    // Shift so that every transformed weight is strictly positive; a constant
    // per edge changes every perfect matching's total by the same amount.
    for (size_t i = 0; i < weights.size(); ++i) flipped[i] = (w_max - weights[i]) + 1.0;
    return max_weight_perfect_matching(n, flipped);
}

}  // namespace repqec
