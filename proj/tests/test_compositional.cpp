#include "doctest.h"

#include <random>

#include "sdmc/compositional.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace sdmc;

namespace {

template <typename value_t>
ModelTable<value_t> standard_table() {
    ModelTable<value_t> table;
    table["A"] = fixtures::room_a<value_t>();
    table["B"] = fixtures::room_b<value_t>();
    table["T"] = fixtures::two_exit_tradeoff<value_t>();
    table["LA"] = fixtures::loop_a<value_t>();
    table["LB"] = fixtures::loop_b<value_t>();
    table["SA"] = fixtures::split_a<value_t>();
    table["MB"] = fixtures::merge_b<value_t>();
    table["id"] = fixtures::id_omdp<value_t>();
    return table;
}

template <typename value_t>
value_t eta0() {
    return number_traits<value_t>::exact ? value_t(0) : value_t(1e-6);
}

}  // namespace

TEST_CASE("leaf diagram reproduces the plain curve") {
    auto table = standard_table<Rational>();
    CurveCache<Rational> cache;
    auto entry = approx_multiobj_sd(DiagramNode::leaf("T"), table, Rational(0), cache);
    REQUIRE(entry->approx.entrances.size() == 1);
    CHECK(entry->approx.entrances[0].lower.vertices().size() == 3);
    CHECK(measure_error(entry->approx, Norm::l2) == Rational(0));
    CHECK(cache.leaf_analyses() == 1);
}

TEST_CASE("error explosion through a likely loop") {
    // exact per-component curves are singletons; an artificially loose lower
    // bound on the looping component blows up by the factor 1/(1-0.99)
    IoSignature sig_a{1, 1, 1, 0};
    IoSignature sig_b{1, 0, 2, 0};  // exits: rightward exr, leftward exl
    // component A: both entrances reach the single exit surely
    std::vector<std::vector<ShortcutAction<Rational>>> la(2), ua(2);
    for (int i = 0; i < 2; ++i) {
        la[i] = {{Point<Rational>{Rational(1)}, std::nullopt}};
        ua[i] = {{Point<Rational>{Rational(1)}, std::nullopt}};
    }
    // component B over exits (exr, exl)
    IoSignature sig_b_real{1, 0, 1, 1};
    std::vector<std::vector<ShortcutAction<Rational>>> lb(1), ub(1);
    lb[0] = {{Point<Rational>{Rational(1, 1000), Rational(99, 100)}, std::nullopt}};
    ub[0] = {{Point<Rational>{Rational(9, 1000), Rational(99, 100)}, std::nullopt}};
    auto sc_la = shortcut_from_points<Rational>(sig_a, la);
    auto sc_ua = shortcut_from_points<Rational>(sig_a, ua);
    auto sc_lb = shortcut_from_points<Rational>(sig_b_real, lb);
    auto sc_ub = shortcut_from_points<Rational>(sig_b_real, ub);
    auto composed_l = seq_compose(sc_la.omdp, sc_lb.omdp);
    auto composed_u = seq_compose(sc_ua.omdp, sc_ub.omdp);
    auto rl = approx_multiobj<Rational>(composed_l, Rational(0));
    auto ru = approx_multiobj<Rational>(composed_u, Rational(0));
    REQUIRE(rl.entrances.size() == 1);
    REQUIRE(rl.entrances[0].lower.vertices().size() == 1);
    CHECK(rl.entrances[0].lower.vertices()[0][0] == Rational(1, 10));
    auto uverts = ru.entrances[0].upper.enumerate_vertices();
    REQUIRE(uverts.size() == 1);
    CHECK(uverts[0][0] == Rational(9, 10));
    // the composed sandwich (L from the L-composition, U from the U-composition)
    EntranceApprox<Rational> combined(1);
    combined.lower.add_vertex(rl.entrances[0].lower.vertices()[0]);
    for (const auto &cut : ru.entrances[0].upper.cuts()) combined.upper.add_cut(cut.normal, cut.offset);
    CHECK(gap(combined.lower, combined.upper, Norm::linf) == Rational(4, 5));
}

TEST_CASE("rightward example and its error bound") {
    IoSignature sig_a{1, 0, 2, 0};
    IoSignature sig_b{2, 0, 1, 0};
    std::vector<std::vector<ShortcutAction<Rational>>> la(1), ua(1), lb(2), ub(2);
    la[0] = {{Point<Rational>{Rational(3, 10), Rational(1, 5)}, std::nullopt}};
    ua[0] = {{Point<Rational>{Rational(2, 5), Rational(3, 10)}, std::nullopt}};
    lb[0] = {{Point<Rational>{Rational(7, 10)}, std::nullopt}};
    lb[1] = {{Point<Rational>{Rational(3, 5)}, std::nullopt}};
    ub[0] = {{Point<Rational>{Rational(3, 4)}, std::nullopt}};
    ub[1] = {{Point<Rational>{Rational(13, 20)}, std::nullopt}};
    auto composed_l = seq_compose(shortcut_from_points<Rational>(sig_a, la).omdp,
                                  shortcut_from_points<Rational>(sig_b, lb).omdp);
    auto composed_u = seq_compose(shortcut_from_points<Rational>(sig_a, ua).omdp,
                                  shortcut_from_points<Rational>(sig_b, ub).omdp);
    auto rl = approx_multiobj<Rational>(composed_l, Rational(0));
    auto ru = approx_multiobj<Rational>(composed_u, Rational(0));
    CHECK(rl.entrances[0].lower.vertices()[0][0] == Rational(33, 100));
    auto uverts = ru.entrances[0].upper.enumerate_vertices();
    CHECK(uverts[0][0] == Rational(99, 200));
    EntranceApprox<Rational> combined(1);
    combined.lower.add_vertex(rl.entrances[0].lower.vertices()[0]);
    for (const auto &cut : ru.entrances[0].upper.cuts()) combined.upper.add_cut(cut.normal, cut.offset);
    const Rational measured = gap(combined.lower, combined.upper, Norm::linf);
    CHECK(measured == Rational(33, 200));
    // component gaps: 0.1 and 0.05; the theorem bound dominates the measurement
    const Rational bound = compose_error_bounds<Rational>(
        ComposeKind::rightward_seq, Arity{1, 0, 2, 0}, Arity{2, 0, 1, 0}, Rational(1, 10),
        Rational(1, 20), Rational(0), Rational(0));
    CHECK(bound == Rational(1, 4));
    CHECK(bound >= measured);
}

TEST_CASE("error bound kinds and trivial cases") {
    CHECK(compose_error_bounds<double>(ComposeKind::sum, Arity{}, Arity{}, 0.1, 0.05) ==
          doctest::Approx(0.1));
    CHECK(compose_error_bounds<double>(ComposeKind::rightward_seq, Arity{1, 0, 2, 0},
                                       Arity{2, 0, 1, 0}, 0.0, 0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(compose_error_bounds<double>(ComposeKind::rightward_seq, Arity{1, 1, 2, 0},
                                                 Arity{2, 0, 1, 0}, 0.1, 0.1),
                    model_error);
}

TEST_CASE_TEMPLATE("compositional run matches the loop example end to end", value_t, double, Rational) {
    auto table = standard_table<value_t>();
    auto d = DiagramNode::seq({DiagramNode::leaf("LA"), DiagramNode::leaf("LB")});
    CurveCache<value_t> cache;
    auto entry = approx_multiobj_sd(d, table, eta0<value_t>(), cache);
    REQUIRE(entry->approx.entrances.size() == 1);
    // the only scheduler reaches the exit with probability 0.9 exactly
    const auto &ea = entry->approx.entrances[0];
    CHECK(number_traits<value_t>::to_double(ea.lower.support({value_t(1)})) ==
          doctest::Approx(0.9).epsilon(1e-6));
    CHECK(number_traits<value_t>::to_double(measure_error(entry->approx, Norm::linf)) ==
          doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE_TEMPLATE("sum diagram keeps the children's curves", value_t, double, Rational) {
    auto table = standard_table<value_t>();
    auto d = DiagramNode::sum({DiagramNode::leaf("T"), DiagramNode::leaf("id")});
    CurveCache<value_t> cache;
    auto entry = approx_multiobj_sd(d, table, eta0<value_t>(), cache);
    REQUIRE(entry->approx.entrances.size() == 2);
    // entrance 0 = the tradeoff entrance; its curve on exits (x1,x2, idexit)
    const auto &ea = entry->approx.entrances[0];
    CHECK(number_traits<value_t>::to_double(
              ea.lower.support({value_t(1), value_t(0), value_t(0)})) == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(number_traits<value_t>::to_double(
              ea.lower.support({value_t(0), value_t(1), value_t(0)})) == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(number_traits<value_t>::to_double(
              ea.lower.support({value_t(0), value_t(0), value_t(1)})) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("example collapse: lossy lower bound composes to zero error") {
    // split component approximated by the single point (1,0); merge component exact
    IoSignature sig_a{1, 0, 2, 0};
    std::vector<std::vector<ShortcutAction<Rational>>> la(1), ua(1);
    la[0] = {{Point<Rational>{Rational(1), Rational(0)}, std::nullopt}};
    ua[0] = {{Point<Rational>{Rational(1), Rational(0)}, std::nullopt},
             {Point<Rational>{Rational(0), Rational(1)}, std::nullopt}};
    auto b = fixtures::merge_b<Rational>();
    auto b_curves = approx_multiobj<Rational>(b, Rational(0));
    auto sc_lb = shortcut_from_lower(signature_of(b), b_curves);
    auto sc_ub = shortcut_from_upper(signature_of(b), b_curves);
    auto composed_l =
        seq_compose(shortcut_from_points<Rational>(sig_a, la).omdp, sc_lb.omdp);
    auto composed_u =
        seq_compose(shortcut_from_points<Rational>(sig_a, ua).omdp, sc_ub.omdp);
    auto rl = approx_multiobj<Rational>(composed_l, Rational(0));
    auto ru = approx_multiobj<Rational>(composed_u, Rational(0));
    EntranceApprox<Rational> combined(1);
    for (const auto &v : rl.entrances[0].lower.vertices()) combined.lower.add_vertex(v);
    for (const auto &cut : ru.entrances[0].upper.cuts()) combined.upper.add_cut(cut.normal, cut.offset);
    CHECK(gap(combined.lower, combined.upper, Norm::linf) == Rational(0));
    CHECK(combined.lower.support({Rational(1)}) == Rational(1));
}

TEST_CASE("caching: a chain of one leaf runs one leaf analysis") {
    auto table = standard_table<Rational>();
    // bounded pipeline: id ; id ; ... ; id
    std::vector<DiagramPtr> stages(16, DiagramNode::leaf("id"));
    auto d = DiagramNode::seq(stages);
    CurveCache<Rational> cache;
    auto entry = approx_multiobj_sd(d, table, Rational(0), cache);
    CHECK(entry->approx.entrances[0].lower.vertices().size() == 1);
    CHECK(cache.leaf_analyses() == 1);
    CHECK(cache.hits() == 15);  // every repeated leaf after the first
    // re-running the same query is a pure cache hit
    auto again = approx_multiobj_sd(d, table, Rational(0), cache);
    CHECK(again == entry);
    CHECK(cache.leaf_analyses() == 1);
}

TEST_CASE("cache keys separate eta levels") {
    auto table = standard_table<double>();
    CurveCache<double> cache;
    auto coarse = approx_multiobj_sd(DiagramNode::leaf("T"), table, 1e-2, cache);
    auto fine = approx_multiobj_sd(DiagramNode::leaf("T"), table, 1e-5, cache);
    CHECK(cache.leaf_analyses() == 2);
    CHECK(coarse != fine);
}

TEST_CASE_TEMPLATE("single-exit check on the two-room composition", value_t, double, Rational) {
    auto table = standard_table<value_t>();
    auto d = DiagramNode::seq({DiagramNode::leaf("A"), DiagramNode::leaf("B")});
    CurveCache<value_t> cache;
    const value_t eps = value_from_double<value_t>(1e-6);
    auto result = check_single_exit(d, table, 0, 0, eps, cache);
    REQUIRE(result.converged);
    const double truth = 35.0 / 79.0;
    CHECK(number_traits<value_t>::to_double(result.lower) >= truth - 1e-6);
    CHECK(number_traits<value_t>::to_double(result.upper) <= truth + 1e-6);
    CHECK(number_traits<value_t>::to_double(result.upper - result.lower) <= 1e-6);
    // the replayed hierarchical scheduler achieves the reported lower bound
    CHECK(number_traits<value_t>::to_double(result.replayed) >=
          number_traits<value_t>::to_double(result.lower) - 1e-9);
}

TEST_CASE("single-exit check on the identity diagram is exactly one") {
    auto table = standard_table<Rational>();
    CurveCache<Rational> cache;
    auto result = check_single_exit(DiagramNode::leaf("id"), table, 0, 0, Rational(0), cache);
    REQUIRE(result.converged);
    CHECK(result.lower == Rational(1));
    CHECK(result.upper == Rational(1));
    CHECK(result.replayed == Rational(1));
}

TEST_CASE("single-exit check rejects bad indices and float epsilon zero") {
    auto table = standard_table<double>();
    CurveCache<double> cache;
    CHECK_THROWS_AS(check_single_exit(DiagramNode::leaf("id"), table, 1, 0, 1e-4, cache), model_error);
    CHECK_THROWS_AS(check_single_exit(DiagramNode::leaf("id"), table, 0, 0, 0.0, cache), model_error);
}

TEST_CASE("bracketing against the brute-force monolith on random diagrams") {
    std::mt19937_64 rng(31412);
    auto table = standard_table<Rational>();
    int rounds = 0;
    for (int attempt = 0; attempt < 40 && rounds < 8; ++attempt) {
        // random two-leaf diagram with compatible signatures
        ModelTable<Rational> local;
        const int l = 1 + static_cast<int>(rng() % 2);
        auto a = oracles::random_omdp<Rational>(rng, 1, 0, l, 1, 1 + static_cast<int>(rng() % 2));
        auto b = oracles::random_omdp<Rational>(rng, l, 1, 2, 0, 1 + static_cast<int>(rng() % 2));
        if (oracles::dm_scheduler_count(seq_compose(a, b).mdp) > 512) continue;
        ++rounds;
        local["ra"] = a;
        local["rb"] = b;
        auto d = DiagramNode::seq({DiagramNode::leaf("ra"), DiagramNode::leaf("rb")});
        CurveCache<Rational> cache;
        auto entry = approx_multiobj_sd(d, local, Rational(0), cache);
        auto mono = semantics(d, local);
        auto brute = oracles::enumerate_achievable_points(mono.omdp);
        REQUIRE(brute.size() == entry->approx.entrances.size());
        for (std::size_t i = 0; i < brute.size(); ++i) {
            const auto &ea = entry->approx.entrances[i];
            LowerSet<Rational> hull(mono.omdp.num_exits());
            for (const auto &p : brute[i]) hull.add_vertex(p);
            for (const auto &p : brute[i]) {
                CHECK(ea.upper.contains(p));
                CHECK(ea.lower.contains(p));  // eta = 0: exact equality
            }
            for (const auto &v : ea.lower.vertices()) CHECK(hull.contains(v));
        }
    }
    CHECK(rounds == 8);
}

TEST_CASE("recovered hierarchical schedulers replay on the monolith") {
    std::mt19937_64 rng(9000);
    auto table = standard_table<Rational>();
    int rounds = 0;
    for (int attempt = 0; attempt < 40 && rounds < 6; ++attempt) {
        ModelTable<Rational> local;
        auto a = oracles::random_omdp<Rational>(rng, 1, 0, 2, 1, 1);
        auto b = oracles::random_omdp<Rational>(rng, 2, 1, 1, 0, 1);
        if (oracles::dm_scheduler_count(seq_compose(a, b).mdp) > 512) continue;
        ++rounds;
        local["ra"] = a;
        local["rb"] = b;
        auto d = DiagramNode::seq({DiagramNode::leaf("ra"), DiagramNode::leaf("rb")});
        auto canonical = canonicalize(d);
        CurveCache<Rational> cache;
        auto entry = approx_multiobj_sd(canonical, local, Rational(0), cache);
        const TreeIndex tree = TreeIndex::build(canonical);
        auto mono = semantics(canonical, local);
        for (std::size_t i = 0; i < entry->approx.entrances.size(); ++i) {
            const auto &ea = entry->approx.entrances[i];
            for (std::size_t k = 0; k < ea.lower.vertices().size(); ++k) {
                auto hs = extract_hier_scheduler(canonical, entry, ea.witnesses[k], tree);
                HierReplayer<Rational> replayer;
                auto recursive = replayer.value(*hs, static_cast<int>(i));
                CHECK(recursive == ea.lower.vertices()[k]);
                auto monolithic = replay_on_monolith(mono, local, *hs, tree, static_cast<int>(i));
                CHECK(monolithic == ea.lower.vertices()[k]);
            }
        }
    }
    CHECK(rounds == 6);
}

TEST_CASE("trace diagrams analyze compositionally") {
    auto table = standard_table<Rational>();
    auto core = DiagramNode::seq({DiagramNode::leaf("MB"), DiagramNode::leaf("SA")});
    auto traced = DiagramNode::trace(core, 1);
    CurveCache<Rational> cache;
    auto entry = approx_multiobj_sd(traced, table, Rational(0), cache);
    REQUIRE(entry->approx.entrances.size() == 1);
    // best play exits surely; also matches the monolithic curve
    CHECK(entry->approx.entrances[0].lower.support({Rational(1)}) == Rational(1));
    auto mono = semantics(traced, table);
    auto brute = oracles::enumerate_achievable_points(mono.omdp);
    for (const auto &p : brute[0]) CHECK(entry->approx.entrances[0].lower.contains(p));
}

TEST_CASE("prop-8 and theorem-1 style bounds hold on random instances") {
    std::mt19937_64 rng(1618);
    int rounds = 0;
    for (int attempt = 0; attempt < 60 && rounds < 10; ++attempt) {
        const int l = 1 + static_cast<int>(rng() % 2);
        auto a = oracles::random_omdp<Rational>(rng, 1, 0, l, 0, 1 + static_cast<int>(rng() % 2));
        auto b = oracles::random_omdp<Rational>(rng, l, 0, 1 + static_cast<int>(rng() % 2), 0,
                                                1 + static_cast<int>(rng() % 2));
        ++rounds;
        // loose child approximations, exact stage analyses
        auto ca = approx_multiobj<Rational>(a, Rational(1, 20));
        auto cb = approx_multiobj<Rational>(b, Rational(1, 20));
        const Rational gap_a = measure_error(ca, Norm::linf);
        const Rational gap_b = measure_error(cb, Norm::linf);
        SUBCASE("") {}
        // rightward sequential composition
        auto composed_l = seq_compose(shortcut_from_lower(signature_of(a), ca).omdp,
                                      shortcut_from_lower(signature_of(b), cb).omdp);
        auto composed_u = seq_compose(shortcut_from_upper(signature_of(a), ca).omdp,
                                      shortcut_from_upper(signature_of(b), cb).omdp);
        auto rl = approx_multiobj<Rational>(composed_l, Rational(0));
        auto ru = approx_multiobj<Rational>(composed_u, Rational(0));
        Rational measured(0);
        for (std::size_t i = 0; i < rl.entrances.size(); ++i) {
            EntranceApprox<Rational> combined(rl.exit_count);
            for (const auto &v : rl.entrances[i].lower.vertices()) combined.lower.add_vertex(v);
            for (const auto &cut : ru.entrances[i].upper.cuts())
                combined.upper.add_cut(cut.normal, cut.offset);
            measured = std::max(measured, gap(combined.lower, combined.upper, Norm::linf));
        }
        const Rational bound = compose_error_bounds<Rational>(ComposeKind::rightward_seq, a.arity(),
                                                              b.arity(), gap_a, gap_b);
        CHECK(measured <= bound);

        // sum composition bound
        auto sum_l = sum_compose(shortcut_from_lower(signature_of(a), ca).omdp,
                                 shortcut_from_lower(signature_of(b), cb).omdp);
        auto sum_u = sum_compose(shortcut_from_upper(signature_of(a), ca).omdp,
                                 shortcut_from_upper(signature_of(b), cb).omdp);
        auto sl = approx_multiobj<Rational>(sum_l, Rational(0));
        auto su = approx_multiobj<Rational>(sum_u, Rational(0));
        Rational sum_measured(0);
        for (std::size_t i = 0; i < sl.entrances.size(); ++i) {
            EntranceApprox<Rational> combined(sl.exit_count);
            for (const auto &v : sl.entrances[i].lower.vertices()) combined.lower.add_vertex(v);
            for (const auto &cut : su.entrances[i].upper.cuts())
                combined.upper.add_cut(cut.normal, cut.offset);
            sum_measured = std::max(sum_measured, gap(combined.lower, combined.upper, Norm::linf));
        }
        CHECK(sum_measured <=
              compose_error_bounds<Rational>(ComposeKind::sum, a.arity(), b.arity(), gap_a, gap_b));
    }
    CHECK(rounds == 10);
}
