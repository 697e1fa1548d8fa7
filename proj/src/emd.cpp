#include "emd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "error.hpp"

namespace umbra {

namespace {

constexpr double kMassTol = 1e-6;
constexpr double kGroundTol = 1e-9;
constexpr double kReducedCostTol = 1e-11;

void validate_ground(const std::vector<double>& g, std::size_t k) {
    if (g.size() != k * k)
        raise(ErrorCode::dimension_mismatch, "ground matrix size does not match histograms");
    for (std::size_t i = 0; i < k; ++i) {
        if (std::abs(g[i * k + i]) > kGroundTol)
            raise(ErrorCode::invalid_argument, "ground matrix diagonal must be zero");
        for (std::size_t j = 0; j < k; ++j) {
            const double v = g[i * k + j];
            if (!(v >= 0.0) || !std::isfinite(v))
                raise(ErrorCode::invalid_argument, "ground matrix entries must be nonnegative");
            if (std::abs(v - g[j * k + i]) > kGroundTol)
                raise(ErrorCode::invalid_argument, "ground matrix must be symmetric");
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t l = 0; l < k; ++l)
                if (g[i * k + j] > g[i * k + l] + g[l * k + j] + kGroundTol)
                    raise(ErrorCode::invalid_argument,
                          "ground matrix violates the triangle inequality");
}

// One basic cell of the transportation tableau; the basis forms a spanning
// tree over supply nodes [0, m) and demand nodes [m, m+n).
struct BasicCell {
    int row;
    int col;
    double flow;
};

}  // namespace

double emd(const std::vector<double>& h1, const std::vector<double>& h2,
           const std::vector<double>& ground) {
    if (h1.size() != h2.size())
        raise(ErrorCode::dimension_mismatch, "histograms must have equal size");
    const std::size_t k = h1.size();
    if (k == 0) raise(ErrorCode::invalid_argument, "empty histograms");
    validate_ground(ground, k);

    double sum1 = 0.0, sum2 = 0.0;
    for (double v : h1) {
        if (!(v >= 0.0)) raise(ErrorCode::invalid_argument, "histogram mass must be nonnegative");
        sum1 += v;
    }
    for (double v : h2) {
        if (!(v >= 0.0)) raise(ErrorCode::invalid_argument, "histogram mass must be nonnegative");
        sum2 += v;
    }
    if (std::abs(sum1 - sum2) > kMassTol)
        raise(ErrorCode::invalid_argument, "histograms must carry equal total mass");
    if (sum1 <= 0.0) return 0.0;

    // Compact to nonzero bins.
    std::vector<int> rows, cols;
    for (std::size_t i = 0; i < k; ++i)
        if (h1[i] > 0.0) rows.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < k; ++j)
        if (h2[j] > 0.0) cols.push_back(static_cast<int>(j));
    const int m = static_cast<int>(rows.size());
    const int n = static_cast<int>(cols.size());

    std::vector<double> supply(m), demand(n);
    for (int i = 0; i < m; ++i) supply[i] = h1[rows[i]];
    const double rescale = sum1 / sum2;  // force exact balance
    for (int j = 0; j < n; ++j) demand[j] = h2[cols[j]] * rescale;

    std::vector<double> cost(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            cost[static_cast<std::size_t>(i) * n + j] =
                ground[static_cast<std::size_t>(rows[i]) * k + cols[j]];

    // Northwest-corner initial basis: exactly m+n-1 cells, zero flows allowed.
    std::vector<BasicCell> basis;
    basis.reserve(m + n - 1);
    {
        std::vector<double> ra = supply, rb = demand;
        int i = 0, j = 0;
        while (true) {
            const double f = std::min(ra[i], rb[j]);
            basis.push_back({i, j, f});
            ra[i] -= f;
            rb[j] -= f;
            if (i == m - 1 && j == n - 1) break;
            if (ra[i] <= 0.0 && i < m - 1)
                ++i;
            else
                ++j;
        }
    }

    const int nodes = m + n;
    std::vector<std::vector<int>> tree(nodes);  // node -> indices into basis
    auto rebuild_tree = [&] {
        for (auto& t : tree) t.clear();
        for (int b = 0; b < static_cast<int>(basis.size()); ++b) {
            tree[basis[b].row].push_back(b);
            tree[m + basis[b].col].push_back(b);
        }
    };
    rebuild_tree();

    std::vector<double> potential(nodes);
    std::vector<char> seen(nodes);
    std::vector<int> stack;
    auto compute_potentials = [&] {
        std::fill(seen.begin(), seen.end(), 0);
        potential[0] = 0.0;
        seen[0] = 1;
        stack.assign(1, 0);
        while (!stack.empty()) {
            const int node = stack.back();
            stack.pop_back();
            for (int b : tree[node]) {
                const BasicCell& c = basis[b];
                const int other = node < m ? m + c.col : c.row;
                if (seen[other]) continue;
                // u_i + v_j = c_ij on every basic cell.
                potential[other] =
                    cost[static_cast<std::size_t>(c.row) * n + c.col] - potential[node];
                seen[other] = 1;
                stack.push_back(other);
            }
        }
    };

    // Unique tree path between two nodes, as a list of basis indices.
    std::vector<int> parent_edge(nodes);
    std::vector<int> parent_node(nodes);
    auto tree_path = [&](int from, int to) {
        std::fill(seen.begin(), seen.end(), 0);
        seen[from] = 1;
        parent_node[from] = -1;
        stack.assign(1, from);
        while (!stack.empty()) {
            const int node = stack.back();
            stack.pop_back();
            if (node == to) break;
            for (int b : tree[node]) {
                const BasicCell& c = basis[b];
                const int other = node < m ? m + c.col : c.row;
                if (seen[other]) continue;
                seen[other] = 1;
                parent_node[other] = node;
                parent_edge[other] = b;
                stack.push_back(other);
            }
        }
        std::vector<int> path;
        for (int node = to; parent_node[node] != -1; node = parent_node[node])
            path.push_back(parent_edge[node]);
        std::reverse(path.begin(), path.end());
        return path;
    };

    const long max_iters = 200L * nodes * nodes + 1000;
    bool bland = false;
    for (long iter = 0;; ++iter) {
        if (iter >= max_iters && !bland) bland = true;  // anti-cycling fallback
        if (iter >= 2 * max_iters)
            raise(ErrorCode::internal, "transportation simplex failed to converge");
        compute_potentials();

        int ei = -1, ej = -1;
        double most_negative = -kReducedCostTol;
        for (int i = 0; i < m && (ei < 0 || !bland); ++i) {
            for (int j = 0; j < n; ++j) {
                const double r =
                    cost[static_cast<std::size_t>(i) * n + j] - potential[i] - potential[m + j];
                if (r < most_negative) {
                    most_negative = r;
                    ei = i;
                    ej = j;
                    if (bland) break;  // first improving arc in lexicographic order
                }
            }
        }
        if (ei < 0) break;  // optimal

        // Cycle = entering arc + tree path from its demand node back to its
        // supply node. Arcs at even path positions give up flow, odd ones
        // gain it.
        const std::vector<int> path = tree_path(m + ej, ei);
        double theta = std::numeric_limits<double>::infinity();
        int leave_pos = -1;
        for (std::size_t p = 0; p < path.size(); p += 2) {
            const BasicCell& c = basis[path[p]];
            bool better = leave_pos < 0 || c.flow < theta;
            if (!better && c.flow == theta) {
                const BasicCell& cur = basis[path[leave_pos]];
                better = c.row < cur.row || (c.row == cur.row && c.col < cur.col);
            }
            if (better) {
                theta = c.flow;
                leave_pos = static_cast<int>(p);
            }
        }
        if (leave_pos < 0)
            raise(ErrorCode::internal, "transportation simplex lost its basis cycle");

        for (std::size_t p = 0; p < path.size(); ++p) {
            if (p % 2 == 0)
                basis[path[p]].flow -= theta;
            else
                basis[path[p]].flow += theta;
        }
        basis[path[leave_pos]] = {ei, ej, theta};
        rebuild_tree();
    }

    double total = 0.0;
    for (const BasicCell& c : basis)
        total += c.flow * cost[static_cast<std::size_t>(c.row) * n + c.col];
    return std::max(0.0, total);
}

}  // namespace umbra
