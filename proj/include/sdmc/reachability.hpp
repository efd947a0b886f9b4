#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <vector>

#include "sdmc/chain_solve.hpp"
#include "sdmc/mdp.hpp"

namespace sdmc {

struct convergence_error : model_error {
    double achieved_gap;
    convergence_error(const std::string &what, double gap) : model_error(what), achieved_gap(gap) {}
};

namespace detail {

// iterative Tarjan over an adjacency list restricted to `alive` states
inline std::vector<int> scc_ids(const std::vector<std::vector<state_t>> &adj, const std::vector<bool> &alive) {
    const state_t n = static_cast<state_t>(adj.size());
    std::vector<int> comp(n, -1), low(n, 0), disc(n, -1);
    std::vector<state_t> stack;
    std::vector<bool> on_stack(n, false);
    int timer = 0, comps = 0;
    struct Frame {
        state_t v;
        std::size_t edge;
    };
    std::vector<Frame> call;
    for (state_t root = 0; root < n; ++root) {
        if (!alive[root] || disc[root] != -1) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto &[v, edge] = call.back();
            if (edge == 0) {
                disc[v] = low[v] = timer++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (edge < adj[v].size()) {
                state_t w = adj[v][edge++];
                if (!alive[w]) continue;
                if (disc[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], disc[w]);
            }
            if (descended) continue;
            if (low[v] == disc[v]) {
                while (true) {
                    state_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = comps;
                    if (w == v) break;
                }
                ++comps;
            }
            state_t finished = v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[finished]);
        }
    }
    return comp;
}

}  // namespace detail

// maximal end components; returns per-state component id, -1 when the state is
// in no MEC. A single state with a self-loop action forms a MEC.
template <typename value_t>
std::vector<int> mec_decomposition(const Mdp<value_t> &m) {
    const state_t n = m.num_states();
    std::vector<int> mec(n, -1);
    // candidates, refined until each candidate is a proper end component
    std::vector<std::vector<state_t>> work;
    {
        std::vector<state_t> all(n);
        for (state_t s = 0; s < n; ++s) all[s] = s;
        work.push_back(std::move(all));
    }
    int next_id = 0;
    while (!work.empty()) {
        std::vector<state_t> cand = std::move(work.back());
        work.pop_back();
        if (cand.empty()) continue;
        std::vector<bool> in_cand(n, false);
        for (state_t s : cand) in_cand[s] = true;
        // adjacency over actions whose full support stays inside the candidate
        std::vector<std::vector<state_t>> adj(n);
        std::vector<bool> has_internal(n, false);
        for (state_t s : cand) {
            for (const auto &a : m.actions[s]) {
                bool internal = true;
                for (const auto &[t, p] : a.dist)
                    if (!in_cand[t]) {
                        internal = false;
                        break;
                    }
                if (!internal) continue;
                has_internal[s] = true;
                for (const auto &[t, p] : a.dist) adj[s].push_back(t);
            }
        }
        std::vector<bool> alive(n, false);
        bool shrunk = false;
        for (state_t s : cand) {
            alive[s] = has_internal[s];
            if (!alive[s]) shrunk = true;
        }
        auto comp = detail::scc_ids(adj, alive);
        int max_comp = -1;
        for (state_t s : cand)
            if (alive[s]) max_comp = std::max(max_comp, comp[s]);
        if (max_comp < 0) continue;
        if (!shrunk && max_comp == 0) {
            // candidate is strongly connected through internal actions: it is a MEC,
            // unless it is a trivial singleton without a self-loop (filtered above
            // by has_internal)
            for (state_t s : cand) mec[s] = next_id;
            ++next_id;
            continue;
        }
        std::vector<std::vector<state_t>> parts(max_comp + 1);
        for (state_t s : cand)
            if (alive[s]) parts[comp[s]].push_back(s);
        for (auto &part : parts)
            if (!part.empty()) work.push_back(std::move(part));
    }
    return mec;
}

// quotient of an MDP under its MEC decomposition; internal actions are dropped,
// leaving actions keep a tag back to their origin for scheduler lifting
template <typename value_t>
struct QuotientMdp {
    Mdp<value_t> mdp;
    std::vector<state_t> state_map;              // original -> quotient
    std::vector<std::vector<state_t>> members;   // quotient -> originals
    std::vector<std::vector<std::pair<state_t, int>>> action_origin;
    std::vector<int> mec_of;                     // original MEC ids (for lifting)
};

template <typename value_t>
QuotientMdp<value_t> quotient_mecs(const Mdp<value_t> &m) {
    QuotientMdp<value_t> q;
    q.mec_of = mec_decomposition(m);
    const state_t n = m.num_states();
    q.state_map.assign(n, -1);
    std::vector<state_t> mec_state;  // mec id -> quotient id
    for (state_t s = 0; s < n; ++s) {
        if (q.mec_of[s] >= 0) {
            const int id = q.mec_of[s];
            if (id >= static_cast<int>(mec_state.size())) mec_state.resize(id + 1, -1);
            if (mec_state[id] < 0) {
                mec_state[id] = static_cast<state_t>(q.members.size());
                q.members.emplace_back();
            }
            q.state_map[s] = mec_state[id];
            q.members[mec_state[id]].push_back(s);
        } else {
            q.state_map[s] = static_cast<state_t>(q.members.size());
            q.members.push_back({s});
        }
    }
    const state_t qn = static_cast<state_t>(q.members.size());
    q.mdp.actions.resize(qn);
    q.mdp.state_names.resize(qn);
    q.action_origin.resize(qn);
    for (state_t qs = 0; qs < qn; ++qs) {
        const bool is_mec = q.members[qs].size() > 1 || q.mec_of[q.members[qs].front()] >= 0;
        for (state_t s : q.members[qs]) {
            for (int ai = 0; ai < static_cast<int>(m.actions[s].size()); ++ai) {
                const auto &a = m.actions[s][ai];
                if (is_mec) {
                    bool internal = true;
                    for (const auto &[t, p] : a.dist)
                        if (q.state_map[t] != qs) {
                            internal = false;
                            break;
                        }
                    if (internal) continue;
                }
                std::vector<value_t> dense(qn, value_t(0));
                for (const auto &[t, p] : a.dist) dense[q.state_map[t]] += p;
                Dist<value_t> dist;
                for (state_t t = 0; t < qn; ++t)
                    if (!(dense[t] == value_t(0))) dist.emplace_back(t, dense[t]);
                q.mdp.actions[qs].push_back(Action<value_t>{a.label, std::move(dist)});
                q.action_origin[qs].emplace_back(s, ai);
            }
        }
    }
    return q;
}

template <typename value_t>
struct ReachOptimum {
    value_t lower, upper;  // sound bounds at the source
    Scheduler witness;     // DM scheduler on the original MDP
};

template <typename value_t>
struct OptimizeOptions {
    value_t delta = number_traits<value_t>::solve_tolerance();
    long iteration_cap = 2000000;
};

namespace detail {

// states of a quotient from which the target set is reachable
template <typename value_t>
std::vector<bool> quotient_can_reach(const Mdp<value_t> &m, const std::vector<bool> &target) {
    const state_t n = m.num_states();
    std::vector<std::vector<state_t>> pred(n);
    for (state_t s = 0; s < n; ++s)
        for (const auto &a : m.actions[s])
            for (const auto &[t, p] : a.dist) pred[t].push_back(s);
    std::vector<bool> seen(target);
    std::vector<state_t> stack;
    for (state_t s = 0; s < n; ++s)
        if (seen[s]) stack.push_back(s);
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

// exact policy iteration on a MEC-free quotient (unique fixpoint per policy)
inline void policy_iteration(const Mdp<Rational> &m, const std::vector<bool> &target,
                             const std::vector<bool> &relevant, std::vector<Rational> &value,
                             std::vector<std::int32_t> &policy, long cap) {
    const state_t n = m.num_states();
    std::vector<state_t> targets;
    for (state_t s = 0; s < n; ++s)
        if (target[s]) targets.push_back(s);
    for (long round = 0; round < cap; ++round) {
        Scheduler sched;
        sched.choice = policy;
        auto chain = induce_chain(m, sched);
        value = multi_reach_probs<Rational>(chain, {targets})[0];
        bool improved = false;
        for (state_t s = 0; s < n; ++s) {
            if (target[s] || !relevant[s] || m.actions[s].empty()) continue;
            Rational best = value[s];
            std::int32_t best_action = policy[s];
            for (int ai = 0; ai < static_cast<int>(m.actions[s].size()); ++ai) {
                Rational v(0);
                for (const auto &[t, p] : m.actions[s][ai].dist) v += p * value[t];
                if (v > best) {
                    best = v;
                    best_action = ai;
                }
            }
            if (best_action != policy[s]) {
                policy[s] = best_action;
                improved = true;
            }
        }
        if (!improved) return;
    }
    throw convergence_error("policy iteration hit the iteration cap", 0.0);
}

// interval iteration (Gauss-Seidel) on a MEC-free quotient
inline double interval_iteration(const Mdp<double> &m, const std::vector<bool> &target,
                                 const std::vector<bool> &relevant, state_t source, double delta,
                                 std::vector<double> &lower, std::vector<double> &upper,
                                 std::vector<std::int32_t> &policy, long cap) {
    const state_t n = m.num_states();
    lower.assign(n, 0.0);
    upper.assign(n, 0.0);
    for (state_t s = 0; s < n; ++s) {
        if (target[s])
            lower[s] = upper[s] = 1.0;
        else if (relevant[s] && !m.actions[s].empty())
            upper[s] = 1.0;
    }
    auto sweep = [&](std::vector<double> &x, bool record_policy) {
        for (state_t s = 0; s < n; ++s) {
            if (target[s] || !relevant[s] || m.actions[s].empty()) continue;
            double best = 0.0;
            std::int32_t best_action = 0;
            for (int ai = 0; ai < static_cast<int>(m.actions[s].size()); ++ai) {
                double v = 0.0;
                for (const auto &[t, p] : m.actions[s][ai].dist) v += p * x[t];
                if (v > best) {
                    best = v;
                    best_action = ai;
                }
            }
            x[s] = best;
            if (record_policy) policy[s] = best_action;
        }
    };
    for (long round = 0; round < cap; ++round) {
        sweep(lower, true);
        sweep(upper, false);
        if (upper[source] - lower[source] <= delta) return upper[source] - lower[source];
    }
    throw convergence_error("interval iteration did not converge within the iteration cap",
                            upper[source] - lower[source]);
}

}  // namespace detail

// maximal reachability with a sound bracket and a witness DM scheduler.
// targets are made absorbing before solving; MECs are quotiented away first.
template <typename value_t>
ReachOptimum<value_t> optimize_max_reach(const Mdp<value_t> &m, state_t source,
                                         const std::vector<state_t> &targets,
                                         const OptimizeOptions<value_t> &opts = {}) {
    Mdp<value_t> frozen = m;
    for (state_t s : targets) frozen.actions[s].clear();
    QuotientMdp<value_t> q = quotient_mecs(frozen);
    const state_t qn = q.mdp.num_states();
    std::vector<bool> target(qn, false);
    for (state_t s : targets) target[q.state_map[s]] = true;
    const std::vector<bool> relevant = detail::quotient_can_reach(q.mdp, target);
    const state_t qsource = q.state_map[source];

    std::vector<std::int32_t> policy(qn, 0);
    ReachOptimum<value_t> out{value_t(0), value_t(0), Scheduler::undefined(m.num_states())};
    if constexpr (number_traits<value_t>::exact) {
        std::vector<Rational> value;
        detail::policy_iteration(q.mdp, target, relevant, value, policy, 1000);
        out.lower = out.upper = value[qsource];
    } else {
        std::vector<double> lower, upper;
        detail::interval_iteration(q.mdp, target, relevant, qsource,
                                   opts.delta > 0 ? opts.delta : 1e-12, lower, upper, policy,
                                   opts.iteration_cap);
        out.lower = lower[qsource];
        out.upper = upper[qsource];
    }

    // lift the quotient policy back to the original states
    for (state_t qs = 0; qs < qn; ++qs) {
        const auto &members = q.members[qs];
        const bool usable = !q.mdp.actions[qs].empty() && relevant[qs] && !target[qs];
        if (members.size() == 1 && q.mec_of[members.front()] < 0) {
            const state_t s = members.front();
            if (m.actions[s].empty()) continue;
            out.witness.choice[s] =
                usable ? q.action_origin[qs][policy[qs]].second : 0;
            continue;
        }
        // MEC: play toward the state owning the chosen leaving action, then leave
        state_t hub = members.front();
        if (usable) {
            auto [origin_state, origin_action] = q.action_origin[qs][policy[qs]];
            hub = origin_state;
            out.witness.choice[hub] = origin_action;
        } else if (!m.actions[hub].empty()) {
            out.witness.choice[hub] = 0;
        }
        std::vector<bool> attracted(members.size(), false);
        std::vector<state_t> member_index(m.num_states(), -1);
        for (std::size_t i = 0; i < members.size(); ++i) member_index[members[i]] = static_cast<state_t>(i);
        attracted[member_index[hub]] = true;
        bool grew = true;
        while (grew) {
            grew = false;
            for (state_t s : members) {
                if (attracted[member_index[s]]) continue;
                for (int ai = 0; ai < static_cast<int>(frozen.actions[s].size()); ++ai) {
                    const auto &a = frozen.actions[s][ai];
                    bool internal = true, touches = false;
                    for (const auto &[t, p] : a.dist) {
                        if (q.state_map[t] != qs) internal = false;
                        if (member_index[t] >= 0 && attracted[member_index[t]]) touches = true;
                    }
                    if (internal && touches) {
                        out.witness.choice[s] = ai;
                        attracted[member_index[s]] = true;
                        grew = true;
                        break;
                    }
                }
            }
        }
    }
    // every non-terminal ends up with a defined choice
    for (state_t s = 0; s < m.num_states(); ++s)
        if (!m.actions[s].empty() && out.witness.choice[s] < 0) out.witness.choice[s] = 0;
    return out;
}

// iteration-cap override hook shared by the CLI and the solvers
inline long weighted_query_cap() {
    if (const char *env = std::getenv("SDP_ITER_CAP")) {
        const long v = std::atol(env);
        if (v > 0) return v;
    }
    return 10000;
}

template <typename value_t>
std::pair<value_t, Scheduler> max_reach(const Mdp<value_t> &m, state_t source,
                                        const std::vector<state_t> &targets) {
    OptimizeOptions<value_t> opts;
    if constexpr (!number_traits<value_t>::exact) opts.delta = 1e-10;
    auto r = optimize_max_reach(m, source, targets, opts);
    return {r.lower, r.witness};
}

}  // namespace sdmc
