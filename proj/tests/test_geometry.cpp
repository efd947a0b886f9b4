#include "doctest.h"

#include <cmath>
#include <random>

#include "sdmc/geometry.hpp"

using namespace sdmc;

namespace {

template <typename value_t>
Point<value_t> pt(std::initializer_list<double> xs) {
    Point<value_t> p;
    for (double x : xs) p.push_back(value_from_double<value_t>(x));
    return p;
}

Point<Rational> rpt(std::initializer_list<std::pair<long, long>> xs) {
    Point<Rational> p;
    for (auto [num, den] : xs) { Rational q(num, den); q.canonicalize(); p.push_back(q); }
    return p;
}

// 2-D oracle: distance to dwconvcl(verts) as a minimum over covering segments
double dist2d_oracle(const Point<double> &v, const std::vector<Point<double>> &verts) {
    auto seg_dist = [&](const Point<double> &a, const Point<double> &b) {
        double dx = b[0] - a[0], dy = b[1] - a[1];
        double len2 = dx * dx + dy * dy;
        double t = len2 == 0 ? 0 : ((v[0] - a[0]) * dx + (v[1] - a[1]) * dy) / len2;
        t = std::clamp(t, 0.0, 1.0);
        double px = a[0] + t * dx - v[0], py = a[1] + t * dy - v[1];
        return std::sqrt(px * px + py * py);
    };
    double best = 1e9;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        for (std::size_t j = i + 1; j < verts.size(); ++j) best = std::min(best, seg_dist(verts[i], verts[j]));
        best = std::min(best, seg_dist(verts[i], {verts[i][0], verts[i][1] - 3.0}));
        best = std::min(best, seg_dist(verts[i], {verts[i][0] - 3.0, verts[i][1]}));
    }
    return best;
}

}  // namespace

TEST_CASE("lp solver basics") {
    // max x+y s.t. x <= 0.3, y <= 0.4, x+y <= 0.5
    auto r = lp_maximize<double>({1, 1}, {{1, 0}, {0, 1}, {1, 1}}, {0.3, 0.4, 0.5});
    REQUIRE(r.status == LpResult<double>::Status::optimal);
    CHECK(r.value == doctest::Approx(0.5));
    // infeasible: x <= -1
    auto inf = lp_maximize<double>({1}, {{1}, {-1}}, {1, -2});
    CHECK(inf.status == LpResult<double>::Status::infeasible);
    // unbounded: max x with no constraints binding
    auto unb = lp_maximize<double>({1}, {{-1}}, {0});
    CHECK(unb.status == LpResult<double>::Status::unbounded);
}

TEST_CASE("lp solver is exact over rationals") {
    auto r = lp_maximize<Rational>({Rational(3, 4), Rational(1, 4)},
                                   {{Rational(1), Rational(0)},
                                    {Rational(0), Rational(1)},
                                    {Rational(1), Rational(1)}},
                                   {Rational(3, 10), Rational(2, 5), Rational(1)});
    REQUIRE(r.status == LpResult<Rational>::Status::optimal);
    // optimum at (0.3, 0.4)
    CHECK(r.value == Rational(3, 4) * Rational(3, 10) + Rational(1, 4) * Rational(2, 5));
}

TEST_CASE_TEMPLATE("support over lower and upper sets", value_t, double, Rational) {
    LowerSet<value_t> l(2);
    l.add_vertex(pt<value_t>({0.3, 0.1}));
    l.add_vertex(pt<value_t>({0.27, 0.3}));
    l.add_vertex(pt<value_t>({0.2, 0.4}));
    const auto w = pt<value_t>({0.5, 0.5});
    CHECK(number_traits<value_t>::to_double(l.support(w)) == doctest::Approx(0.3));

    LowerSet<value_t> origin(3);
    origin.add_vertex(pt<value_t>({0, 0, 0}));
    CHECK(origin.support(pt<value_t>({0.2, 0.5, 0.3})) == value_t(0));

    UpperSet<value_t> u(2);  // the full subdistribution simplex
    CHECK(number_traits<value_t>::to_double(u.support(pt<value_t>({1, 0}))) == doctest::Approx(1.0));
}

TEST_CASE_TEMPLATE("containment in a lower set", value_t, double, Rational) {
    LowerSet<value_t> l(2);
    l.add_vertex(pt<value_t>({0.3, 0.1}));
    l.add_vertex(pt<value_t>({0.27, 0.3}));
    l.add_vertex(pt<value_t>({0.2, 0.4}));
    CHECK(l.contains(pt<value_t>({0.25, 0.3})));
    CHECK(!l.contains(pt<value_t>({0.31, 0.0})));
    CHECK(l.contains(pt<value_t>({0, 0})));
    // mixture-only containment: midpoint of p1 and p2 is not under either vertex
    CHECK(l.contains(pt<value_t>({0.25, 0.25})));
    CHECK(!l.contains(pt<value_t>({0.29, 0.29})));
}

TEST_CASE("dimension mismatch is rejected") {
    LowerSet<double> l(2);
    l.add_vertex(pt<double>({0.3, 0.1}));
    CHECK_THROWS_AS(l.contains(pt<double>({0.1})), geometry_error);
    CHECK_THROWS_AS(l.support(pt<double>({0.1, 0.2, 0.3})), geometry_error);
}

TEST_CASE_TEMPLATE("upper set vertex enumeration", value_t, double, Rational) {
    UpperSet<value_t> u(2);
    u.add_cut(pt<value_t>({1, 0}), value_from_double<value_t>(0.3));
    u.add_cut(pt<value_t>({0, 1}), value_from_double<value_t>(0.4));
    auto verts = u.enumerate_vertices();
    bool has_corner = false;
    for (const auto &v : verts)
        if (number_traits<value_t>::to_double(v[0]) == doctest::Approx(0.3) &&
            number_traits<value_t>::to_double(v[1]) == doctest::Approx(0.4))
            has_corner = true;
    CHECK(has_corner);

    UpperSet<value_t> one(1);
    auto v1 = one.enumerate_vertices();
    REQUIRE(v1.size() == 1);
    CHECK(number_traits<value_t>::to_double(v1[0][0]) == doctest::Approx(1.0));

    UpperSet<value_t> cut(2);
    cut.add_cut(pt<value_t>({0.5, 0.5}), value_from_double<value_t>(0.25));  // x+y <= 0.5
    auto v2 = cut.enumerate_vertices();
    REQUIRE(v2.size() == 2);
    for (const auto &v : v2)
        CHECK(number_traits<value_t>::to_double(v[0] + v[1]) == doctest::Approx(0.5));
}

TEST_CASE("vertex enumeration respects the dimension cap") {
    UpperSet<double> u(7);
    CHECK_THROWS_AS(u.enumerate_vertices(), geometry_error);
}

TEST_CASE_TEMPLATE("hull facets of the three-point curve", value_t, double, Rational) {
    LowerSet<value_t> l(2);
    l.add_vertex(pt<value_t>({0.3, 0.1}));
    l.add_vertex(pt<value_t>({0.27, 0.3}));
    l.add_vertex(pt<value_t>({0.2, 0.4}));
    auto facets = hull_facets(l);
    // expect units plus the two segment normals (0.2,0.03)/0.23 and (0.1,0.07)/0.17
    auto has_normal = [&](double a, double b) {
        for (const auto &f : facets)
            if (number_traits<value_t>::to_double(f.normal[0]) == doctest::Approx(a).epsilon(1e-9) &&
                number_traits<value_t>::to_double(f.normal[1]) == doctest::Approx(b).epsilon(1e-9))
                return true;
        return false;
    };
    CHECK(has_normal(1.0, 0.0));
    CHECK(has_normal(0.0, 1.0));
    CHECK(has_normal(0.2 / 0.23, 0.03 / 0.23));
    CHECK(has_normal(0.1 / 0.17, 0.07 / 0.17));
    // every facet supports every vertex
    for (const auto &f : facets)
        for (const auto &v : l.vertices()) CHECK(number_traits<value_t>::to_double(dot(f.normal, v)) <=
                                                 number_traits<value_t>::to_double(f.offset) + 1e-9);
}

TEST_CASE("hull facets degenerate cases") {
    LowerSet<double> single(3);
    single.add_vertex(pt<double>({0.2, 0.3, 0.1}));
    auto facets = hull_facets(single);
    CHECK(facets.size() == 3);  // unit directions only

    LowerSet<double> collinear(2);
    collinear.add_vertex(pt<double>({0.4, 0.0}));
    collinear.add_vertex(pt<double>({0.3, 0.1}));
    collinear.add_vertex(pt<double>({0.2, 0.2}));
    auto cfacets = hull_facets(collinear);
    int diagonal = 0;
    for (const auto &f : cfacets)
        if (std::abs(f.normal[0] - 0.5) < 1e-9 && std::abs(f.normal[1] - 0.5) < 1e-9) ++diagonal;
    CHECK(diagonal == 1);  // one interior facet despite three collinear generators
}

TEST_CASE_TEMPLATE("gap of equal sets is zero", value_t, double, Rational) {
    LowerSet<value_t> l(2);
    l.add_vertex(pt<value_t>({0.3, 0.1}));
    l.add_vertex(pt<value_t>({0.2, 0.4}));
    UpperSet<value_t> u(2);
    for (const auto &f : hull_facets(l)) u.add_cut(f.normal, f.offset);
    CHECK(gap(l, u, Norm::l2) == value_t(0));
    CHECK(gap(l, u, Norm::linf) == value_t(0));
}

TEST_CASE("one-exit gap example") {
    LowerSet<Rational> l(1);
    l.add_vertex(rpt({{33, 100}}));
    UpperSet<Rational> u(1);
    u.add_cut({Rational(1)}, Rational(495, 1000));
    CHECK(gap(l, u, Norm::linf) == Rational(33, 200));
    CHECK(number_traits<Rational>::to_double(gap(l, u, Norm::l2)) == doctest::Approx(0.165));
}

TEST_CASE("gap containment violation is reported") {
    LowerSet<double> l(2);
    l.add_vertex(pt<double>({0.6, 0.1}));
    UpperSet<double> u(2);
    u.add_cut(pt<double>({1, 0}), 0.5);  // excludes the lower vertex
    CHECK_THROWS_AS(gap(l, u, Norm::linf), geometry_error);
}

TEST_CASE("l2 distance matches the 2-D segment oracle on random instances") {
    std::mt19937_64 rng(7);
    auto coin = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) / 9007199254740992.0);
    };
    for (int round = 0; round < 200; ++round) {
        LowerSet<double> l(2);
        std::vector<Point<double>> verts;
        int m = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < m; ++i) {
            Point<double> p{coin(0, 0.6), coin(0, 0.6)};
            verts.push_back(p);
            l.add_vertex(p);
        }
        Point<double> v{coin(0, 1), coin(0, 1)};
        double reference = dist2d_oracle(v, verts);
        double computed = std::sqrt(dist_l2_squared(v, l));
        if (l.contains(v)) {
            CHECK(computed <= 1e-6);
        } else {
            CHECK(computed == doctest::Approx(reference).epsilon(1e-6));
        }
        CHECK(dist_linf(v, l) <= computed + 1e-9);
    }
}

TEST_CASE("wolfe distance is exact over rationals") {
    LowerSet<Rational> l(2);
    l.add_vertex(rpt({{1, 2}, {0, 1}}));
    l.add_vertex(rpt({{0, 1}, {1, 2}}));
    // (1,1) projects onto the midpoint (1/4+1/2?, ...) of the segment x+y=1/2
    Rational d2 = dist_l2_squared(rpt({{1, 1}, {1, 1}}), l);
    // nearest point is (1/4, 1/4): squared distance 2*(3/4)^2 = 9/8
    CHECK(d2 == Rational(9, 8));
    // a point inside has exact distance zero
    CHECK(dist_l2_squared(rpt({{1, 10}, {1, 10}}), l) == Rational(0));
}

TEST_CASE("gap is monotone under refinement on random instances") {
    std::mt19937_64 rng(11);
    auto coin = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) / 9007199254740992.0);
    };
    for (int round = 0; round < 50; ++round) {
        LowerSet<double> l(2);
        l.add_vertex({coin(0.05, 0.3), coin(0.05, 0.3)});
        UpperSet<double> u(2);
        u.add_cut(pt<double>({1, 0}), coin(0.5, 0.9));
        u.add_cut(pt<double>({0, 1}), coin(0.5, 0.9));
        double before = gap(l, u, Norm::l2);
        // adding a lower point or upper cut never increases the gap
        SUBCASE("") {}
        l.add_vertex({coin(0.0, 0.45), coin(0.0, 0.45)});
        double mid = gap(l, u, Norm::l2);
        CHECK(mid <= before + 1e-9);
        u.add_cut(normalize_weight(Point<double>{coin(0.2, 1.0), coin(0.2, 1.0)}), coin(0.45, 1.0));
        double after = gap(l, u, Norm::l2);
        CHECK(after <= mid + 1e-9);
    }
}

TEST_CASE("upper set rebuild from vertices contains the original points") {
    std::mt19937_64 rng(23);
    auto coin = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) / 9007199254740992.0);
    };
    for (int dim = 2; dim <= 3; ++dim) {
        for (int round = 0; round < 30; ++round) {
            UpperSet<double> u(dim);
            for (int c = 0; c < 3; ++c) {
                Point<double> w(dim);
                for (auto &x : w) x = coin(0.05, 1.0);
                u.add_cut(normalize_weight(std::move(w)), coin(0.2, 0.8));
            }
            auto verts = u.enumerate_vertices();
            LowerSet<double> hull(dim);
            for (const auto &v : verts) hull.add_vertex(v);
            UpperSet<double> rebuilt(dim);
            for (const auto &f : hull_facets(hull)) rebuilt.add_cut(f.normal, f.offset);
            // sample points of u via its vertices and random mixtures
            for (const auto &v : verts) CHECK(rebuilt.contains(v));
            for (int s = 0; s < 10 && verts.size() >= 2; ++s) {
                Point<double> mix(dim, 0.0);
                double wsum = 0;
                std::vector<double> ws;
                for (std::size_t i = 0; i < verts.size(); ++i) {
                    ws.push_back(coin(0, 1));
                    wsum += ws.back();
                }
                for (std::size_t i = 0; i < verts.size(); ++i)
                    for (int j = 0; j < dim; ++j) mix[j] += ws[i] / wsum * verts[i][j];
                CHECK(rebuilt.contains(mix));
            }
        }
    }
}

TEST_CASE("lower set pruning keeps only needed generators") {
    LowerSet<double> l(2);
    l.add_vertex(pt<double>({0.3, 0.1}));
    l.add_vertex(pt<double>({0.2, 0.4}));
    CHECK(l.add_vertex(pt<double>({0.25, 0.25})) == -1);  // on the segment, already covered
    CHECK(l.add_vertex(pt<double>({0.1, 0.1})) == -1);    // dominated
    CHECK(l.vertices().size() == 2);
    int idx = l.add_vertex(pt<double>({0.27, 0.3}));
    CHECK(idx == 2);
    auto kept = l.prune();
    CHECK(kept.size() == 3);  // all three are Pareto vertices
}

TEST_CASE("csv emission orders by decreasing first coordinate") {
    std::vector<Point<double>> verts{{0.2, 0.4}, {0.3, 0.1}, {0.27, 0.3}};
    CHECK(vertices_to_csv(verts) == "0.3,0.1\n0.27,0.3\n0.2,0.4\n");
}
