#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <vector>

#include "sdmc/mdp.hpp"

namespace sdmc {

namespace detail {

// backward reachability: states from which some state in `seeds` can be reached,
// where rows of absorbed states are ignored
template <typename value_t>
std::vector<bool> can_reach(const MarkovChain<value_t> &chain, const std::vector<bool> &seeds,
                            const std::vector<bool> &absorbed) {
    const state_t n = chain.num_states();
    std::vector<std::vector<state_t>> pred(n);
    for (state_t s = 0; s < n; ++s) {
        if (absorbed[s]) continue;
        for (const auto &[t, p] : chain.rows[s])
            if (!(p == value_t(0))) pred[t].push_back(s);
    }
    std::vector<bool> seen(n, false);
    std::vector<state_t> stack;
    for (state_t s = 0; s < n; ++s)
        if (seeds[s]) {
            seen[s] = true;
            stack.push_back(s);
        }
    while (!stack.empty()) {
        state_t t = stack.back();
        stack.pop_back();
        for (state_t s : pred[t])
            if (!seen[s]) {
                seen[s] = true;
                stack.push_back(s);
            }
    }
    return seen;
}

// dense exact Gaussian elimination for (I - Q) X = B, B has k columns
inline void solve_dense_rational(std::vector<std::vector<Rational>> &a,
                                 std::vector<std::vector<Rational>> &rhs) {
    const std::size_t d = a.size();
    const std::size_t k = rhs.empty() ? 0 : rhs[0].size();
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        while (pivot < d && a[pivot][col] == 0) ++pivot;
        if (pivot == d) throw model_error("singular reachability system");
        std::swap(a[pivot], a[col]);
        std::swap(rhs[pivot], rhs[col]);
        const Rational inv = Rational(1) / a[col][col];
        for (std::size_t j = col; j < d; ++j) a[col][j] *= inv;
        for (std::size_t j = 0; j < k; ++j) rhs[col][j] *= inv;
        for (std::size_t row = 0; row < d; ++row) {
            if (row == col || a[row][col] == 0) continue;
            const Rational f = a[row][col];
            for (std::size_t j = col; j < d; ++j) a[row][j] -= f * a[col][j];
            for (std::size_t j = 0; j < k; ++j) rhs[row][j] -= f * rhs[col][j];
        }
    }
}

}  // namespace detail

// absorption probabilities into disjoint target groups, each group made absorbing.
// result[g][s] = Pr(s reaches group g before any other group).
template <typename value_t>
std::vector<std::vector<value_t>> multi_reach_probs(const MarkovChain<value_t> &chain,
                                                    const std::vector<std::vector<state_t>> &groups) {
    const state_t n = chain.num_states();
    const int k = static_cast<int>(groups.size());
    std::vector<int> group_of(n, -1);
    std::vector<bool> absorbed(n, false), seeds(n, false);
    for (int g = 0; g < k; ++g)
        for (state_t s : groups[g]) {
            if (s < 0 || s >= n) throw model_error("target out of range");
            if (group_of[s] != -1 && group_of[s] != g) throw model_error("overlapping target groups");
            group_of[s] = g;
            absorbed[s] = seeds[s] = true;
        }

    const std::vector<bool> relevant = detail::can_reach(chain, seeds, absorbed);
    std::vector<state_t> transient;  // relevant, not absorbed
    std::vector<state_t> index(n, -1);
    for (state_t s = 0; s < n; ++s)
        if (relevant[s] && !absorbed[s]) {
            index[s] = static_cast<state_t>(transient.size());
            transient.push_back(s);
        }
    const std::size_t d = transient.size();

    std::vector<std::vector<value_t>> result(k, std::vector<value_t>(n, value_t(0)));
    for (int g = 0; g < k; ++g)
        for (state_t s : groups[g]) result[g][s] = value_t(1);
    if (d == 0) return result;

    if constexpr (number_traits<value_t>::exact) {
        std::vector<std::vector<Rational>> a(d, std::vector<Rational>(d, Rational(0)));
        std::vector<std::vector<Rational>> rhs(d, std::vector<Rational>(k, Rational(0)));
        for (std::size_t i = 0; i < d; ++i) {
            a[i][i] = Rational(1);
            for (const auto &[t, p] : chain.rows[transient[i]]) {
                if (index[t] >= 0) a[i][index[t]] -= p;
                if (group_of[t] >= 0) rhs[i][group_of[t]] += p;
            }
        }
        detail::solve_dense_rational(a, rhs);
        for (std::size_t i = 0; i < d; ++i)
            for (int g = 0; g < k; ++g) result[g][transient[i]] = rhs[i][g];
    } else {
        Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        std::vector<Eigen::Triplet<double>> triplets;
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), k);
        for (std::size_t i = 0; i < d; ++i) {
            double diag = 1.0;
            for (const auto &[t, p] : chain.rows[transient[i]]) {
                if (t == transient[i])
                    diag -= p;
                else if (index[t] >= 0)
                    triplets.emplace_back(static_cast<int>(i), index[t], -p);
                if (group_of[t] >= 0) rhs(static_cast<Eigen::Index>(i), group_of[t]) += p;
            }
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
        }
        a.setFromTriplets(triplets.begin(), triplets.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success) throw model_error("reachability solve failed to factorize");
        Eigen::MatrixXd x = lu.solve(rhs);
        for (std::size_t i = 0; i < d; ++i)
            for (int g = 0; g < k; ++g)
                result[g][transient[i]] = std::min(1.0, std::max(0.0, x(static_cast<Eigen::Index>(i), g)));
    }
    return result;
}

// Pr(source |= <>targets) with the target set made absorbing
template <typename value_t>
value_t reach_probs(const MarkovChain<value_t> &chain, state_t source, const std::vector<state_t> &targets) {
    auto r = multi_reach_probs<value_t>(chain, {targets});
    return r[0][source];
}

}  // namespace sdmc
