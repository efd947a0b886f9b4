#pragma once

#include <future>
#include <string>
#include <vector>

#include "sdmc/geometry.hpp"
#include "sdmc/reachability.hpp"

namespace sdmc {

// per-entrance sandwich with scheduler annotations on the lower vertices
template <typename value_t>
struct EntranceApprox {
    LowerSet<value_t> lower;
    UpperSet<value_t> upper;
    std::vector<Scheduler> witnesses;  // parallel to lower.vertices()

    explicit EntranceApprox(int dim) : lower(dim), upper(dim) {}
};

template <typename value_t>
struct SoundApprox {
    std::vector<EntranceApprox<value_t>> entrances;  // rightward then leftward
    int exit_count = 0;
    long queries = 0;  // weighted reachability queries spent
};

struct SolveOptions {
    long query_cap = weighted_query_cap();  // per entrance
    long iteration_cap = 2000000;           // value iteration sweeps
    int vertex_dim_cap = 6;
    int jobs = 1;
};

template <typename value_t>
struct WeightedBounds {
    value_t lower, upper;
    Scheduler sched;
};

// weighted reachability through the fresh target/sink gadget: exit j feeds the
// target with probability w_j and the sink with the rest
template <typename value_t>
WeightedBounds<value_t> weighted_reach_bounds(const OpenMdp<value_t> &m, int entrance_idx,
                                              const Point<value_t> &w, value_t delta,
                                              long iteration_cap = 2000000) {
    if (!number_traits<value_t>::exact && !(delta > value_t(0)))
        throw model_error("delta = 0 requires the rational engine");
    const auto exits = m.exits();
    if (w.size() != exits.size()) throw model_error("weight dimension mismatch");
    Mdp<value_t> gadget = m.mdp;
    const state_t target = gadget.add_state("#target");
    const state_t sink = gadget.add_state("#sink");
    gadget.add_action(target, "loop", {{target, value_t(1)}});
    gadget.add_action(sink, "loop", {{sink, value_t(1)}});
    for (std::size_t j = 0; j < exits.size(); ++j) {
        Dist<value_t> dist;
        if (w[j] > value_t(0)) dist.emplace_back(target, w[j]);
        if (w[j] < value_t(1)) dist.emplace_back(sink, value_t(1) - w[j]);
        gadget.add_action(exits[j], "#weighted", std::move(dist));
    }
    OptimizeOptions<value_t> opts;
    opts.delta = delta;
    opts.iteration_cap = iteration_cap;
    auto r = optimize_max_reach(gadget, m.entrances()[entrance_idx], {target}, opts);
    WeightedBounds<value_t> out{r.lower, r.upper, Scheduler::undefined(m.mdp.num_states())};
    for (state_t s = 0; s < m.mdp.num_states(); ++s)
        if (!m.mdp.is_terminal(s)) out.sched.choice[s] = r.witness.choice[s];
    if (out.upper > value_t(1)) out.upper = value_t(1);
    if (out.lower < value_t(0)) out.lower = value_t(0);
    return out;
}

// exact per-exit reach vector of the induced chain from one entrance
template <typename value_t>
Point<value_t> achieved_point(const OpenMdp<value_t> &m, int entrance_idx, const Scheduler &sched) {
    const auto exits = m.exits();
    auto chain = induce_chain(m, sched);
    std::vector<std::vector<state_t>> groups;
    for (state_t e : exits) groups.push_back({e});
    auto probs = multi_reach_probs<value_t>(chain, groups);
    Point<value_t> p(exits.size());
    const state_t source = m.entrances()[entrance_idx];
    for (std::size_t j = 0; j < exits.size(); ++j) p[j] = probs[j][source];
    return p;
}

template <typename value_t>
struct WeightChoice {
    bool exhausted = false;
    Point<value_t> weight;
    value_t delta = value_t(0);
};

// next refinement direction: unit vectors first, then the hull facet with the
// largest directional slack; exhausted once every slack is within threshold
template <typename value_t>
WeightChoice<value_t> select_weight(const EntranceApprox<value_t> &ea, value_t eta, long queries_done) {
    const int n = ea.lower.dim();
    const value_t delta = eta / value_t(4);
    if (queries_done < n) {
        Point<value_t> w(n, value_t(0));
        w[queries_done] = value_t(1);
        return {false, std::move(w), delta};
    }
    value_t best_slack(0);
    Point<value_t> best_w;
    for (const auto &f : hull_facets(ea.lower)) {
        value_t slack = ea.upper.support(f.normal) - ea.lower.support(f.normal);
        if (best_w.empty() || slack > best_slack) {
            best_slack = slack;
            best_w = f.normal;
        }
    }
    // refining until slacks fall below eta/4 brings the L2 gap below eta
    // for any exit count up to 16
    if (best_w.empty() || best_slack <= delta) return {true, {}, delta};
    return {false, std::move(best_w), delta};
}

namespace detail {

template <typename value_t>
void add_lower_point(EntranceApprox<value_t> &ea, const Point<value_t> &p, const Scheduler &sched) {
    if (ea.lower.add_vertex(p) < 0) return;
    ea.witnesses.push_back(sched);
    auto kept = ea.lower.prune();
    std::vector<Scheduler> pruned;
    pruned.reserve(kept.size());
    for (std::size_t idx : kept) pruned.push_back(std::move(ea.witnesses[idx]));
    ea.witnesses = std::move(pruned);
}

template <typename value_t>
EntranceApprox<value_t> refine_entrance(const OpenMdp<value_t> &m, int entrance_idx, value_t eta,
                                        const SolveOptions &opts, long &queries) {
    const int n = m.num_exits();
    EntranceApprox<value_t> ea(n);
    queries = 0;
    while (true) {
        auto choice = select_weight(ea, eta, queries);
        if (choice.exhausted) break;
        if (queries >= opts.query_cap) {
            const double achieved =
                number_traits<value_t>::to_double(gap(ea.lower, ea.upper, Norm::l2, opts.vertex_dim_cap));
            throw convergence_error("weighted query cap exceeded; achieved gap " +
                                        std::to_string(achieved),
                                    achieved);
        }
        auto bounds =
            weighted_reach_bounds(m, entrance_idx, choice.weight, choice.delta, opts.iteration_cap);
        auto point = achieved_point(m, entrance_idx, bounds.sched);
        detail::add_lower_point(ea, point, bounds.sched);
        ea.upper.add_cut(choice.weight, bounds.upper);
        ++queries;
    }
    return ea;
}

}  // namespace detail

// sandwich approximation of the per-entrance Pareto curves (weighted refinement)
template <typename value_t>
SoundApprox<value_t> approx_multiobj(const OpenMdp<value_t> &m, value_t eta,
                                     const SolveOptions &opts = {}) {
    if (eta < value_t(0)) throw model_error("eta must be nonnegative");
    if (!number_traits<value_t>::exact && eta == value_t(0))
        throw model_error("eta = 0 requires the rational engine");
    {
        auto report = validate_omdp(m);
        if (!report.ok()) {
            std::string what = "invalid oMDP:";
            for (const auto &v : report.violations) what += " " + v.what + ";";
            throw model_error(what);
        }
    }
    if (m.num_exits() == 0) throw model_error("oMDP has no exits");
    const int entrances = m.num_entrances();
    SoundApprox<value_t> out;
    out.exit_count = m.num_exits();
    out.entrances.reserve(entrances);
    std::vector<long> queries(entrances, 0);
    if (opts.jobs > 1 && entrances > 1) {
        std::vector<std::future<EntranceApprox<value_t>>> futures;
        for (int i = 0; i < entrances; ++i)
            futures.push_back(std::async(std::launch::async, [&, i] {
                return detail::refine_entrance(m, i, eta, opts, queries[i]);
            }));
        for (auto &f : futures) out.entrances.push_back(f.get());
    } else {
        for (int i = 0; i < entrances; ++i)
            out.entrances.push_back(detail::refine_entrance(m, i, eta, opts, queries[i]));
    }
    for (long q : queries) out.queries += q;
    return out;
}

// largest gap over the entrances of a sound approximation
template <typename value_t>
value_t measure_error(const SoundApprox<value_t> &approx, Norm norm, int dim_cap = 6) {
    value_t worst(0);
    for (const auto &ea : approx.entrances) worst = std::max(worst, gap(ea.lower, ea.upper, norm, dim_cap));
    return worst;
}

// total number of lower vertices across entrances (the report's p column)
template <typename value_t>
long vertex_count(const SoundApprox<value_t> &approx) {
    long total = 0;
    for (const auto &ea : approx.entrances) total += static_cast<long>(ea.lower.vertices().size());
    return total;
}

}  // namespace sdmc
