#pragma once

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sdmc/mdp.hpp"
#include "sdmc/number.hpp"

namespace sdmc {

template <typename value_t>
using Point = std::vector<value_t>;

template <typename value_t>
value_t dot(const Point<value_t> &a, const Point<value_t> &b) {
    value_t acc(0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

template <typename value_t>
bool dominates(const Point<value_t> &a, const Point<value_t> &b) {  // b <= a pointwise
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i] > a[i]) return false;
    return true;
}

struct geometry_error : model_error {
    using model_error::model_error;
};

enum class Norm { l2, linf };

// ---------------------------------------------------------------------------
// dense linear algebra helpers

namespace linalg {

template <typename value_t>
value_t pivot_size(const value_t &v) {
    if constexpr (number_traits<value_t>::exact)
        return v == 0 ? value_t(0) : value_t(1);
    else
        return std::abs(v);
}

// Gaussian elimination; returns false when the matrix is singular
template <typename value_t>
bool solve_square(std::vector<std::vector<value_t>> a, std::vector<value_t> b, Point<value_t> &x) {
    const std::size_t n = a.size();
    const value_t tol = number_traits<value_t>::exact ? value_t(0) : value_from_double<value_t>(1e-12);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (pivot_size(a[r][col]) > pivot_size(a[best][col])) best = r;
        if (!(pivot_size(a[best][col]) > tol)) return false;
        std::swap(a[best], a[col]);
        std::swap(b[best], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == value_t(0)) continue;
            value_t f = a[r][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, value_t(0));
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

// one-dimensional nullspace basis of a (n-1) x n system, if the rank allows
template <typename value_t>
std::optional<Point<value_t>> nullspace_direction(std::vector<std::vector<value_t>> rows, std::size_t dim) {
    const value_t tol = number_traits<value_t>::exact ? value_t(0) : value_from_double<value_t>(1e-12);
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_col;
    for (std::size_t col = 0; col < dim && rank < rows.size(); ++col) {
        std::size_t best = rank;
        for (std::size_t r = rank + 1; r < rows.size(); ++r)
            if (pivot_size(rows[r][col]) > pivot_size(rows[best][col])) best = r;
        if (!(pivot_size(rows[best][col]) > tol)) continue;
        std::swap(rows[best], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][col] == value_t(0)) continue;
            value_t f = rows[r][col] / rows[rank][col];
            for (std::size_t j = 0; j < dim; ++j) rows[r][j] -= f * rows[rank][j];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    if (rank + 1 != dim) return std::nullopt;  // nullspace not one-dimensional
    std::vector<bool> is_pivot(dim, false);
    for (std::size_t c : pivot_col) is_pivot[c] = true;
    std::size_t free_col = 0;
    while (free_col < dim && is_pivot[free_col]) ++free_col;
    Point<value_t> u(dim, value_t(0));
    u[free_col] = value_t(1);
    for (std::size_t r = 0; r < rank; ++r)
        u[pivot_col[r]] = -rows[r][free_col] / rows[r][pivot_col[r]];
    return u;
}

}  // namespace linalg

// ---------------------------------------------------------------------------
// two-phase simplex: maximize c.x subject to A x <= b, x >= 0

template <typename value_t>
struct LpResult {
    enum class Status { optimal, infeasible, unbounded } status;
    Point<value_t> x;
    value_t value;
};

template <typename value_t>
class SimplexSolver {
public:
    LpResult<value_t> maximize(const Point<value_t> &c, const std::vector<Point<value_t>> &a,
                               const Point<value_t> &b) {
        const std::size_t m = a.size(), n = c.size();
        // columns: n structural + m slacks + (phase-1 artificials appended on demand)
        rows_.assign(m, {});
        basis_.assign(m, 0);
        std::size_t artificials = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (b[i] < value_t(0)) ++artificials;
        const std::size_t cols = n + m + artificials;
        std::size_t next_art = n + m;
        for (std::size_t i = 0; i < m; ++i) {
            rows_[i].assign(cols + 1, value_t(0));
            const bool flip = b[i] < value_t(0);
            for (std::size_t j = 0; j < n; ++j) rows_[i][j] = flip ? -a[i][j] : a[i][j];
            rows_[i][n + i] = flip ? value_t(-1) : value_t(1);
            rows_[i][cols] = flip ? -b[i] : b[i];
            if (flip) {
                rows_[i][next_art] = value_t(1);
                basis_[i] = static_cast<int>(next_art++);
            } else {
                basis_[i] = static_cast<int>(n + i);
            }
        }
        if (artificials > 0) {
            // phase 1: minimize the artificial sum
            obj_.assign(cols + 1, value_t(0));
            for (std::size_t j = n + m; j < cols; ++j) obj_[j] = value_t(-1);
            price_out();
            if (!pivot_loop(cols)) return {LpResult<value_t>::Status::unbounded, {}, value_t(0)};
            // phase-1 optimum is -(artificial sum); positive rhs residue means infeasible
            if (obj_[cols] > feas_tol()) return {LpResult<value_t>::Status::infeasible, {}, value_t(0)};
            // drive leftover artificials out of the basis when possible
            for (std::size_t i = 0; i < m; ++i) {
                if (basis_[i] < static_cast<int>(n + m)) continue;
                std::size_t enter = cols;
                for (std::size_t j = 0; j < n + m; ++j)
                    if (linalg::pivot_size(rows_[i][j]) > pivot_tol()) {
                        enter = j;
                        break;
                    }
                if (enter < cols) pivot(i, enter);
            }
        }
        obj_.assign(cols + 1, value_t(0));
        for (std::size_t j = 0; j < n; ++j) obj_[j] = c[j];
        // forbid re-entry of artificial columns
        blocked_from_ = n + m;
        price_out();
        if (!pivot_loop(cols)) return {LpResult<value_t>::Status::unbounded, {}, value_t(0)};
        LpResult<value_t> out{LpResult<value_t>::Status::optimal, Point<value_t>(n, value_t(0)),
                              value_t(0)};
        for (std::size_t i = 0; i < m; ++i)
            if (basis_[i] >= 0 && basis_[i] < static_cast<int>(n)) out.x[basis_[i]] = rows_[i].back();
        out.value = -obj_.back();
        return out;
    }

private:
    std::vector<std::vector<value_t>> rows_;
    std::vector<value_t> obj_;
    std::vector<int> basis_;
    std::size_t blocked_from_ = SIZE_MAX;

    static value_t feas_tol() {
        return number_traits<value_t>::exact ? value_t(0) : value_from_double<value_t>(1e-9);
    }
    static value_t pivot_tol() {
        return number_traits<value_t>::exact ? value_t(0) : value_from_double<value_t>(1e-11);
    }

    // express the objective in terms of the current basis
    void price_out() {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const int bj = basis_[i];
            if (bj < 0 || obj_[bj] == value_t(0)) continue;
            const value_t f = obj_[bj] / rows_[i][bj];
            for (std::size_t j = 0; j < obj_.size(); ++j) obj_[j] -= f * rows_[i][j];
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        const value_t p = rows_[row][col];
        for (auto &v : rows_[row]) v /= p;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i == row || rows_[i][col] == value_t(0)) continue;
            const value_t f = rows_[i][col];
            for (std::size_t j = 0; j < rows_[i].size(); ++j) rows_[i][j] -= f * rows_[row][j];
        }
        if (!(obj_[col] == value_t(0))) {
            const value_t f = obj_[col];
            for (std::size_t j = 0; j < obj_.size(); ++j) obj_[j] -= f * rows_[row][j];
        }
        basis_[row] = static_cast<int>(col);
    }

    // Bland's rule keeps the exact engine cycle-free
    bool pivot_loop(std::size_t cols) {
        for (long iter = 0; iter < 100000; ++iter) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j < cols; ++j) {
                if (j >= blocked_from_) break;
                if (obj_[j] > feas_tol()) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols) return true;
            std::size_t leave = rows_.size();
            value_t best_ratio(0);
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                if (!(rows_[i][enter] > pivot_tol())) continue;
                const value_t ratio = rows_[i].back() / rows_[i][enter];
                if (leave == rows_.size() || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[i] < basis_[leave]))
                    leave = i, best_ratio = ratio;
            }
            if (leave == rows_.size()) return false;  // unbounded
            pivot(leave, enter);
        }
        throw geometry_error("simplex did not terminate");
    }
};

template <typename value_t>
LpResult<value_t> lp_maximize(const Point<value_t> &c, const std::vector<Point<value_t>> &a,
                              const Point<value_t> &b) {
    SimplexSolver<value_t> solver;
    return solver.maximize(c, a, b);
}

// ---------------------------------------------------------------------------
// weight vectors

// clip to the nonnegative orthant and renormalize to sum one
template <typename value_t>
Point<value_t> normalize_weight(Point<value_t> w) {
    value_t total(0);
    for (auto &x : w) {
        if (x < value_t(0)) x = value_t(0);
        total += x;
    }
    if (total == value_t(0)) throw geometry_error("weight vector has empty support");
    for (auto &x : w) x /= total;
    return w;
}

// ---------------------------------------------------------------------------
// finitely generated downward-closed convex sets

// lower set: downward convex closure of explicit vertices
template <typename value_t>
class LowerSet {
public:
    explicit LowerSet(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    const std::vector<Point<value_t>> &vertices() const { return vertices_; }
    bool empty() const { return vertices_.empty(); }

    // true iff p is in the downward convex closure of the stored vertices
    bool contains(const Point<value_t> &p) const {
        if (static_cast<int>(p.size()) != dim_) throw geometry_error("dimension mismatch");
        if (vertices_.empty()) return false;
        for (const auto &v : vertices_)
            if (dominates(v, p)) return true;
        return mixture_dominates(vertices_, p);
    }

    value_t support(const Point<value_t> &w) const {
        if (static_cast<int>(w.size()) != dim_) throw geometry_error("dimension mismatch");
        if (vertices_.empty()) throw geometry_error("support of an empty lower set");
        value_t best = dot(vertices_[0], w);
        for (std::size_t i = 1; i < vertices_.size(); ++i) best = std::max(best, dot(vertices_[i], w));
        return best;
    }

    // returns the index of the stored vertex, or -1 when p was already covered
    int add_vertex(const Point<value_t> &p) {
        if (static_cast<int>(p.size()) != dim_) throw geometry_error("dimension mismatch");
        if (contains(p)) return -1;
        vertices_.push_back(p);
        return static_cast<int>(vertices_.size()) - 1;
    }

    // drop vertices covered by the others; returns the surviving indices in order
    std::vector<std::size_t> prune() {
        std::vector<std::size_t> kept;
        std::vector<Point<value_t>> result;
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            std::vector<Point<value_t>> others(result);
            for (std::size_t j = i + 1; j < vertices_.size(); ++j) others.push_back(vertices_[j]);
            bool covered = false;
            for (const auto &v : others)
                if (dominates(v, vertices_[i])) covered = true;
            if (!covered && !others.empty()) covered = mixture_dominates(others, vertices_[i]);
            if (!covered) {
                kept.push_back(i);
                result.push_back(vertices_[i]);
            }
        }
        vertices_ = std::move(result);
        return kept;
    }

private:
    // feasibility: exists a convex combination of `gens` dominating p
    static bool mixture_dominates(const std::vector<Point<value_t>> &gens, const Point<value_t> &p) {
        const std::size_t m = gens.size(), n = p.size();
        const value_t tol = number_traits<value_t>::geometry_tolerance();
        std::vector<Point<value_t>> a;
        Point<value_t> b;
        Point<value_t> ones(m, value_t(1));
        a.push_back(ones);
        b.push_back(value_t(1));
        Point<value_t> neg_ones(m, value_t(-1));
        a.push_back(neg_ones);
        b.push_back(value_t(-1));
        for (std::size_t j = 0; j < n; ++j) {
            Point<value_t> row(m);
            for (std::size_t i = 0; i < m; ++i) row[i] = -gens[i][j];
            a.push_back(std::move(row));
            b.push_back(-(p[j] - tol));
        }
        auto r = lp_maximize<value_t>(Point<value_t>(m, value_t(0)), a, b);
        return r.status == LpResult<value_t>::Status::optimal;
    }

    int dim_;
    std::vector<Point<value_t>> vertices_;
};

// upper set: halfspace cuts intersected with the subdistribution simplex
template <typename value_t>
class UpperSet {
public:
    struct Cut {
        Point<value_t> normal;  // in the weight simplex
        value_t offset;
    };

    explicit UpperSet(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    const std::vector<Cut> &cuts() const { return cuts_; }

    bool contains(const Point<value_t> &p) const {
        if (static_cast<int>(p.size()) != dim_) throw geometry_error("dimension mismatch");
        const value_t tol = number_traits<value_t>::geometry_tolerance();
        value_t total(0);
        for (const auto &x : p) {
            if (x < -tol) return false;
            total += x;
        }
        if (total > value_t(1) + tol) return false;
        for (const auto &cut : cuts_)
            if (dot(cut.normal, p) > cut.offset + tol) return false;
        return true;
    }

    value_t support(const Point<value_t> &w) const {
        if (static_cast<int>(w.size()) != dim_) throw geometry_error("dimension mismatch");
        std::vector<Point<value_t>> a;
        Point<value_t> b;
        a.push_back(Point<value_t>(dim_, value_t(1)));
        b.push_back(value_t(1));
        for (const auto &cut : cuts_) {
            a.push_back(cut.normal);
            b.push_back(cut.offset);
        }
        auto r = lp_maximize<value_t>(w, a, b);
        if (r.status != LpResult<value_t>::Status::optimal)
            throw geometry_error("upper set support query failed");
        return r.value;
    }

    // add w.p <= u; keeps the cut list irredundant
    void add_cut(Point<value_t> w, value_t u) {
        w = normalize_weight(std::move(w));
        if (u < value_t(0)) u = value_t(0);
        if (u > value_t(1)) u = value_t(1);
        for (auto &cut : cuts_) {
            if (cut.normal == w) {
                cut.offset = std::min(cut.offset, u);
                prune_cuts();
                return;
            }
        }
        if (support(w) <= u) return;  // implied already
        cuts_.push_back(Cut{std::move(w), std::move(u)});
        prune_cuts();
    }

    // vertex enumeration over cuts + simplex + nonnegativity; dominated vertices pruned
    std::vector<Point<value_t>> enumerate_vertices(int dim_cap = 6) const {
        if (dim_ > dim_cap) throw geometry_error("vertex enumeration dimension cap exceeded");
        std::vector<Point<value_t>> normals;
        Point<value_t> offsets;
        normals.push_back(Point<value_t>(dim_, value_t(1)));
        offsets.push_back(value_t(1));
        for (const auto &cut : cuts_) {
            normals.push_back(cut.normal);
            offsets.push_back(cut.offset);
        }
        for (int j = 0; j < dim_; ++j) {
            Point<value_t> e(dim_, value_t(0));
            e[j] = value_t(-1);
            normals.push_back(std::move(e));
            offsets.push_back(value_t(0));
        }
        const std::size_t m = normals.size();
        const value_t tol = number_traits<value_t>::geometry_tolerance();
        std::vector<Point<value_t>> found;
        std::vector<std::size_t> subset(dim_);
        // enumerate all dim-subsets of the constraint rows
        auto feasible = [&](const Point<value_t> &p) {
            for (std::size_t i = 0; i < m; ++i)
                if (dot(normals[i], p) > offsets[i] + tol) return false;
            return true;
        };
        std::vector<std::size_t> idx(dim_);
        auto recurse = [&](auto &&self, std::size_t start, int depth) -> void {
            if (depth == dim_) {
                std::vector<std::vector<value_t>> a(dim_);
                Point<value_t> b(dim_);
                for (int i = 0; i < dim_; ++i) {
                    a[i] = normals[idx[i]];
                    b[i] = offsets[idx[i]];
                }
                Point<value_t> p;
                if (!linalg::solve_square(std::move(a), std::move(b), p)) return;
                if (!feasible(p)) return;
                for (const auto &q : found)
                    if (almost_equal(q, p)) return;
                found.push_back(std::move(p));
                return;
            }
            for (std::size_t i = start; i + (dim_ - depth - 1) < m; ++i) {
                idx[depth] = i;
                self(self, i + 1, depth + 1);
            }
        };
        recurse(recurse, 0, 0);
        // dominated vertices do not affect the downward convex closure
        std::vector<Point<value_t>> maximal;
        for (std::size_t i = 0; i < found.size(); ++i) {
            bool covered = false;
            for (std::size_t j = 0; j < found.size() && !covered; ++j)
                if (j != i && dominates(found[j], found[i]) && !almost_equal(found[i], found[j]))
                    covered = true;
            if (!covered) maximal.push_back(found[i]);
        }
        return maximal;
    }

private:
    static bool almost_equal(const Point<value_t> &a, const Point<value_t> &b) {
        const value_t tol =
            number_traits<value_t>::exact ? value_t(0) : value_from_double<value_t>(1e-9);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!number_traits<value_t>::approx_equal(a[i], b[i], tol)) return false;
        return true;
    }

    void prune_cuts() {
        for (std::size_t i = 0; i < cuts_.size();) {
            Cut cut = cuts_[i];
            cuts_.erase(cuts_.begin() + i);
            if (support(cut.normal) > cut.offset) {
                cuts_.insert(cuts_.begin() + i, std::move(cut));
                ++i;
            }
        }
    }

    int dim_;
    std::vector<Cut> cuts_;
};

// ---------------------------------------------------------------------------
// facets of the upper-right hull of a lower set

template <typename value_t>
struct Facet {
    Point<value_t> normal;  // normalized to the weight simplex
    value_t offset;
};

// all supporting halfspaces with nonnegative normals spanned by vertex subsets
// and coordinate directions, plus the axis-aligned bounding facets
template <typename value_t>
std::vector<Facet<value_t>> hull_facets(const LowerSet<value_t> &l) {
    const int n = l.dim();
    const auto &verts = l.vertices();
    if (verts.empty()) throw geometry_error("hull_facets of an empty lower set");
    const value_t tol = number_traits<value_t>::geometry_tolerance();
    std::vector<Facet<value_t>> facets;
    const value_t dedupe_tol =
        number_traits<value_t>::exact ? value_t(0) : value_from_double<value_t>(1e-12);
    auto push_unique = [&](Point<value_t> w, value_t u) {
        for (const auto &f : facets) {
            bool same = true;
            for (int j = 0; j < n; ++j)
                if (!number_traits<value_t>::approx_equal(f.normal[j], w[j], dedupe_tol)) same = false;
            if (same) return;
        }
        facets.push_back(Facet<value_t>{std::move(w), std::move(u)});
    };
    // axis-aligned facets always bound the set
    for (int j = 0; j < n; ++j) {
        Point<value_t> e(n, value_t(0));
        e[j] = value_t(1);
        value_t u = verts[0][j];
        for (const auto &v : verts) u = std::max(u, v[j]);
        push_unique(std::move(e), u);
    }
    if (n == 1) return facets;

    // candidate normals from k vertices and n-k coordinate rays
    std::vector<std::size_t> vsel;
    std::vector<int> csel;
    auto try_candidate = [&]() {
        std::vector<std::vector<value_t>> rows;
        for (std::size_t i = 1; i < vsel.size(); ++i) {
            std::vector<value_t> row(n);
            for (int j = 0; j < n; ++j) row[j] = verts[vsel[i]][j] - verts[vsel[0]][j];
            rows.push_back(std::move(row));
        }
        for (int c : csel) {
            std::vector<value_t> row(n, value_t(0));
            row[c] = value_t(1);
            rows.push_back(std::move(row));
        }
        auto u = linalg::nullspace_direction(std::move(rows), n);
        if (!u) return;
        // orient outward: all vertices on or below the hyperplane through vsel[0]
        for (int sign = 0; sign < 2; ++sign) {
            Point<value_t> w = *u;
            if (sign == 1)
                for (auto &x : w) x = -x;
            bool nonneg = true;
            for (const auto &x : w)
                if (x < -tol) nonneg = false;
            if (!nonneg) continue;
            value_t total(0);
            for (auto &x : w) {
                if (x < value_t(0)) x = value_t(0);
                total += x;
            }
            if (!(total > value_t(0))) continue;
            for (auto &x : w) x /= total;
            value_t offset = dot(w, verts[vsel[0]]);
            bool supports = true;
            for (const auto &v : verts)
                if (dot(w, v) > offset + tol) supports = false;
            if (supports) push_unique(std::move(w), offset);
        }
    };
    auto choose_coords = [&](auto &&self, int start, int need) -> void {
        if (need == 0) {
            try_candidate();
            return;
        }
        for (int c = start; c < n; ++c) {
            csel.push_back(c);
            self(self, c + 1, need - 1);
            csel.pop_back();
        }
    };
    auto choose_verts = [&](auto &&self, std::size_t start, int need) -> void {
        if (need == 0) {
            choose_coords(choose_coords, 0, n - static_cast<int>(vsel.size()));
            return;
        }
        for (std::size_t i = start; i < verts.size(); ++i) {
            vsel.push_back(i);
            self(self, i + 1, need - 1);
            vsel.pop_back();
        }
    };
    for (int k = 2; k <= n && k <= static_cast<int>(verts.size()); ++k)
        choose_verts(choose_verts, 0, k);
    return facets;
}

// ---------------------------------------------------------------------------
// distances and the gap metric

// L-infinity distance from v to a lower set, as a linear program
template <typename value_t>
value_t dist_linf(const Point<value_t> &v, const LowerSet<value_t> &l) {
    const auto &verts = l.vertices();
    if (verts.empty()) throw geometry_error("distance to an empty lower set");
    const std::size_t m = verts.size(), n = v.size();
    // variables: lambda_1..m, t; maximize -t
    Point<value_t> c(m + 1, value_t(0));
    c[m] = value_t(-1);
    std::vector<Point<value_t>> a;
    Point<value_t> b;
    Point<value_t> ones(m + 1, value_t(0));
    for (std::size_t i = 0; i < m; ++i) ones[i] = value_t(1);
    a.push_back(ones);
    b.push_back(value_t(1));
    Point<value_t> neg = ones;
    for (auto &x : neg) x = -x;
    a.push_back(neg);
    b.push_back(value_t(-1));
    for (std::size_t j = 0; j < n; ++j) {
        Point<value_t> row(m + 1, value_t(0));
        for (std::size_t i = 0; i < m; ++i) row[i] = -verts[i][j];
        row[m] = value_t(-1);
        a.push_back(std::move(row));
        b.push_back(-v[j]);
    }
    auto r = lp_maximize(c, a, b);
    if (r.status != LpResult<value_t>::Status::optimal) throw geometry_error("linf distance LP failed");
    value_t d = -r.value;
    return d < value_t(0) ? value_t(0) : d;
}

// squared L2 distance from v to the lower set, by Wolfe's min-norm-point
// algorithm over conv(vertices) extended downward (exact under rationals)
template <typename value_t>
value_t dist_l2_squared(const Point<value_t> &v, const LowerSet<value_t> &l) {
    const auto &verts = l.vertices();
    if (verts.empty()) throw geometry_error("distance to an empty lower set");
    const std::size_t n = v.size();
    if (n == 1) {
        value_t best = verts[0][0];
        for (const auto &q : verts) best = std::max(best, q[0]);
        value_t d = v[0] > best ? v[0] - best : value_t(0);
        return d * d;
    }
    const value_t box(2);  // depth of the downward extension, enough below the unit box

    // support point of {q - v : q in conv(verts) + [-box,0]^n} minimizing d.y
    auto oracle = [&](const Point<value_t> &d) {
        std::size_t best = 0;
        value_t best_val = dot(d, verts[0]);
        for (std::size_t i = 1; i < verts.size(); ++i) {
            value_t val = dot(d, verts[i]);
            if (val < best_val) {
                best_val = val;
                best = i;
            }
        }
        Point<value_t> y(n);
        for (std::size_t j = 0; j < n; ++j) {
            y[j] = verts[best][j] - v[j];
            if (d[j] > value_t(0)) y[j] -= box;
        }
        return y;
    };

    const value_t tol =
        number_traits<value_t>::exact ? value_t(0) : value_from_double<value_t>(1e-13);
    std::vector<Point<value_t>> corral;
    std::vector<value_t> lambda;
    corral.push_back(oracle(Point<value_t>(n, value_t(1))));
    lambda.push_back(value_t(1));
    Point<value_t> x = corral[0];

    auto norm_sq = [&](const Point<value_t> &p) { return dot(p, p); };

    for (int iter = 0; iter < 1000; ++iter) {
        if (norm_sq(x) == value_t(0)) return value_t(0);
        Point<value_t> y = oracle(x);
        if (dot(x, y) >= norm_sq(x) - tol) return norm_sq(x);
        bool duplicate = false;
        for (const auto &s : corral)
            if (s == y) duplicate = true;
        if (duplicate) return norm_sq(x);
        corral.push_back(y);
        lambda.push_back(value_t(0));
        // minor cycle: affine minimizer over the corral, shrinking until feasible
        for (int minor = 0; minor < 200; ++minor) {
            const std::size_t k = corral.size();
            std::vector<std::vector<value_t>> sys(k + 1, std::vector<value_t>(k + 1, value_t(0)));
            std::vector<value_t> rhs(k + 1, value_t(0));
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) sys[i][j] = dot(corral[i], corral[j]);
                sys[i][k] = value_t(1);
                sys[k][i] = value_t(1);
            }
            rhs[k] = value_t(1);
            Point<value_t> alpha;
            if (!linalg::solve_square(sys, rhs, alpha)) {
                // affinely dependent corral: retry without its least-weighted member
                std::size_t drop = 0;
                for (std::size_t i = 1; i < lambda.size(); ++i)
                    if (lambda[i] < lambda[drop]) drop = i;
                corral.erase(corral.begin() + drop);
                lambda.erase(lambda.begin() + drop);
                value_t total(0);
                for (const auto &w : lambda) total += w;
                if (corral.empty() || total == value_t(0)) return norm_sq(x);
                for (auto &w : lambda) w /= total;
                x.assign(n, value_t(0));
                for (std::size_t i = 0; i < corral.size(); ++i)
                    for (std::size_t j = 0; j < n; ++j) x[j] += lambda[i] * corral[i][j];
                continue;
            }
            alpha.pop_back();  // strip the multiplier
            bool interior = true;
            for (const auto &av : alpha)
                if (av < tol) interior = false;
            if (interior) {
                lambda = alpha;
                x.assign(n, value_t(0));
                for (std::size_t i = 0; i < corral.size(); ++i)
                    for (std::size_t j = 0; j < n; ++j) x[j] += lambda[i] * corral[i][j];
                break;
            }
            // step toward alpha until the first coefficient hits zero
            value_t theta(1);
            for (std::size_t i = 0; i < corral.size(); ++i) {
                if (alpha[i] < lambda[i]) {
                    value_t t = lambda[i] / (lambda[i] - alpha[i]);
                    theta = std::min(theta, t);
                }
            }
            std::vector<Point<value_t>> next_corral;
            std::vector<value_t> next_lambda;
            for (std::size_t i = 0; i < corral.size(); ++i) {
                value_t nl = lambda[i] + theta * (alpha[i] - lambda[i]);
                if (nl > tol) {
                    next_corral.push_back(corral[i]);
                    next_lambda.push_back(nl);
                }
            }
            if (next_corral.empty()) {
                next_corral.push_back(corral.back());
                next_lambda.push_back(value_t(1));
            }
            corral = std::move(next_corral);
            lambda = std::move(next_lambda);
            x.assign(n, value_t(0));
            for (std::size_t i = 0; i < corral.size(); ++i)
                for (std::size_t j = 0; j < n; ++j) x[j] += lambda[i] * corral[i][j];
        }
    }
    return norm_sq(x);
}

// sup over the upper set of the distance to the lower set; the sup is attained
// at a vertex of the upper set. L2 values go through one floating sqrt.
template <typename value_t>
value_t gap(const LowerSet<value_t> &l, const UpperSet<value_t> &u, Norm norm, int dim_cap = 6) {
    if (l.dim() != u.dim()) throw geometry_error("dimension mismatch");
    if (l.empty()) throw geometry_error("gap against an empty lower set");
    for (const auto &v : l.vertices())
        if (!u.contains(v))
            throw geometry_error("containment violation: lower set vertex outside the upper set");
    auto uverts = u.enumerate_vertices(dim_cap);
    // equal sets short-circuit to an exact zero
    bool all_inside = true;
    for (const auto &v : uverts)
        if (!l.contains(v)) {
            all_inside = false;
            break;
        }
    if (all_inside) return value_t(0);
    value_t worst(0);
    for (const auto &v : uverts) {
        value_t d;
        if (norm == Norm::linf)
            d = dist_linf(v, l);
        else
            d = value_from_double<value_t>(sqrt_to_double(dist_l2_squared(v, l)));
        worst = std::max(worst, d);
    }
    return worst;
}

// shortest round-trip decimal form of a double
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// 2-D vertex list as CSV rows "x,y", sorted by decreasing first coordinate
template <typename value_t>
std::string vertices_to_csv(std::vector<Point<value_t>> verts) {
    std::sort(verts.begin(), verts.end(), [](const auto &a, const auto &b) {
        if (!(a[0] == b[0])) return a[0] > b[0];
        return a.size() > 1 ? a[1] < b[1] : false;
    });
    std::ostringstream out;
    for (const auto &v : verts) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j) out << ',';
            out << format_double(number_traits<value_t>::to_double(v[j]));
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace sdmc
