// Bipartite assignment solvers shared by tracklet building and evaluation:
// exact Hungarian maximization, greedy matching (ablation variant) and an
// exhaustive brute-force oracle for differential testing.
//
// Matrices are rectangular and sparse; an absent entry means the pair is
// forbidden and can never be matched. Matchings may leave nodes unmatched.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "unovost/error.hpp"

namespace unovost {

struct ScoreMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::optional<double>> cells; // rows * cols, row-major

    ScoreMatrix() = default;
    ScoreMatrix(int r, int c) : rows(r), cols(c), cells(static_cast<std::size_t>(r) * c) {}

    std::optional<double>& at(int r, int c) { return cells[static_cast<std::size_t>(r) * cols + c]; }
    const std::optional<double>& at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }

    void set(int r, int c, double v) {
        if (!std::isfinite(v))
            throw ContractError("score matrix entries must be finite");
        at(r, c) = v;
    }
};

struct Matching {
    std::vector<std::pair<int, int>> pairs; // sorted by (row, col)
};

// Total score of a matching, summed in sorted pair order.
inline double matching_total(const ScoreMatrix& m, const Matching& match) {
    double total = 0.0;
    for (auto [r, c] : match.pairs)
        total += *m.at(r, c);
    return total;
}

namespace detail {

// Min-cost perfect matching on a dense square cost matrix (Jonker-style
// potentials, O(n^3)). Returns the assignment cost; rowsol[i] = column of
// row i.
inline double square_min_cost(const std::vector<std::vector<double>>& cost, std::vector<int>& rowsol) {
    int n = static_cast<int>(cost.size());
    rowsol.assign(n, -1);
    if (n == 0)
        return 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (p[j]) {
            rowsol[p[j] - 1] = j - 1;
            total += cost[p[j] - 1][j - 1];
        }
    }
    return total;
}

// Maximum achievable score sum over partial matchings of the sub-matrix
// restricted to active rows/columns. Works on the relaxation where every
// (row, col) slot costs -score for present positive entries and 0 otherwise,
// so leaving a node unmatched is always available at zero cost.
inline double max_total(const ScoreMatrix& m, const std::vector<char>& row_active,
                        const std::vector<char>& col_active) {
    std::vector<int> rs, cs;
    for (int r = 0; r < m.rows; ++r)
        if (row_active[r])
            rs.push_back(r);
    for (int c = 0; c < m.cols; ++c)
        if (col_active[c])
            cs.push_back(c);
    int n = static_cast<int>(std::max(rs.size(), cs.size()));
    if (n == 0)
        return 0.0;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = 0; j < cs.size(); ++j) {
            const auto& e = m.at(rs[i], cs[j]);
            if (e && *e > 0.0)
                cost[i][j] = -*e;
        }
    std::vector<int> rowsol;
    return -square_min_cost(cost, rowsol);
}

inline constexpr double kTieEps = 1e-9;

} // namespace detail

// Maximum-total-score matching. Among equal-total matchings the
// lexicographically smallest (row, col) pair list is returned, found by
// greedily fixing pairs and re-solving the remainder.
inline Matching hungarian_max(const ScoreMatrix& m) {
    Matching result;
    if (m.rows == 0 || m.cols == 0)
        return result;
    std::vector<char> row_active(m.rows, 1), col_active(m.cols, 1);
    const double best = detail::max_total(m, row_active, col_active);
    double acc = 0.0;
    int start_row = 0;
    while (true) {
        // A shorter list is lexicographically smaller, so stop as soon as the
        // fixed pairs alone reach the optimum.
        if (acc >= best - detail::kTieEps)
            break;
        bool fixed = false;
        for (int r = start_row; r < m.rows && !fixed; ++r) {
            row_active[r] = 0; // rows before the next fixed pair stay unmatched
            for (int c = 0; c < m.cols; ++c) {
                if (!col_active[c] || !m.at(r, c))
                    continue;
                col_active[c] = 0;
                double rest = detail::max_total(m, row_active, col_active);
                if (acc + *m.at(r, c) + rest >= best - detail::kTieEps) {
                    result.pairs.emplace_back(r, c);
                    acc += *m.at(r, c);
                    start_row = r + 1;
                    fixed = true;
                    break;
                }
                col_active[c] = 1;
            }
        }
        if (!fixed)
            break;
    }
    return result;
}

// Repeatedly takes the highest-score present entry whose row and column are
// both free; ties broken by (row, col) order.
inline Matching greedy_max(const ScoreMatrix& m) {
    Matching result;
    std::vector<char> row_used(m.rows, 0), col_used(m.cols, 0);
    while (true) {
        int br = -1, bc = -1;
        double bs = 0.0;
        for (int r = 0; r < m.rows; ++r) {
            if (row_used[r])
                continue;
            for (int c = 0; c < m.cols; ++c) {
                if (col_used[c] || !m.at(r, c))
                    continue;
                double s = *m.at(r, c);
                if (br < 0 || s > bs) {
                    br = r;
                    bc = c;
                    bs = s;
                }
            }
        }
        if (br < 0)
            break;
        row_used[br] = 1;
        col_used[bc] = 1;
        result.pairs.emplace_back(br, bc);
    }
    std::sort(result.pairs.begin(), result.pairs.end());
    return result;
}

namespace detail {

struct BruteState {
    const ScoreMatrix* m;
    std::vector<char> col_used;
    std::vector<std::pair<int, int>> current;
    double current_total = 0.0;
    std::vector<std::pair<int, int>> best_pairs;
    double best_total = -std::numeric_limits<double>::infinity();

    void consider() {
        if (current_total > best_total) {
            best_total = current_total;
            best_pairs = current;
        } else if (current_total == best_total && current < best_pairs) {
            best_pairs = current;
        }
    }

    void recurse(int row) {
        if (row == m->rows) {
            consider();
            return;
        }
        recurse(row + 1); // row left unmatched
        for (int c = 0; c < m->cols; ++c) {
            if (col_used[c] || !m->at(row, c))
                continue;
            col_used[c] = 1;
            current.emplace_back(row, c);
            current_total += *m->at(row, c);
            recurse(row + 1);
            current_total -= *m->at(row, c);
            current.pop_back();
            col_used[c] = 0;
        }
    }
};

} // namespace detail

// Exhaustive enumeration over all partial matchings; same objective and
// tie-break as hungarian_max. Test oracle only.
inline Matching brute_force_max(const ScoreMatrix& m) {
    if (std::max(m.rows, m.cols) > 9)
        throw ContractError("brute_force_max limited to 9x9 matrices");
    detail::BruteState state;
    state.m = &m;
    state.col_used.assign(m.cols, 0);
    state.recurse(0);
    Matching result;
    result.pairs = std::move(state.best_pairs);
    return result;
}

} // namespace unovost
