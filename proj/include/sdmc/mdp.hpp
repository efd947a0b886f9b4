#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sdmc/number.hpp"

namespace sdmc {

using state_t = std::int32_t;

struct model_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// sparse probability distribution over states
template <typename value_t>
using Dist = std::vector<std::pair<state_t, value_t>>;

template <typename value_t>
struct Action {
    std::string label;
    Dist<value_t> dist;
};

// explicit-state MDP; states are dense ids, actions live per state
template <typename value_t>
struct Mdp {
    std::vector<std::vector<Action<value_t>>> actions;
    std::vector<std::string> state_names;  // optional, parallel to actions

    state_t num_states() const { return static_cast<state_t>(actions.size()); }

    state_t add_state(std::string name = {}) {
        actions.emplace_back();
        state_names.push_back(std::move(name));
        return num_states() - 1;
    }

    void add_action(state_t s, std::string label, Dist<value_t> dist) {
        actions[s].push_back(Action<value_t>{std::move(label), std::move(dist)});
    }

    bool is_terminal(state_t s) const { return actions[s].empty(); }

    const std::string &name_of(state_t s) const { return state_names[s]; }

    // each distribution sums to one and has nonnegative entries
    bool distributions_valid() const {
        const value_t tol = number_traits<value_t>::exact ? value_t(0) : value_from_double<value_t>(1e-12);
        for (const auto &state_actions : actions) {
            for (const auto &a : state_actions) {
                value_t total(0);
                for (const auto &[t, p] : a.dist) {
                    if (t < 0 || t >= num_states()) return false;
                    if (p < value_t(0)) return false;
                    total += p;
                }
                if (!number_traits<value_t>::approx_equal(total, value_t(1), tol)) return false;
            }
        }
        return true;
    }
};

// arity (right_in, left_out) -> (right_out, left_in); left-hand side faces the
// previous diagram, right-hand side the next one
struct Arity {
    int right_in = 0;
    int left_out = 0;
    int right_out = 0;
    int left_in = 0;

    bool operator==(const Arity &) const = default;

    bool matches_before(const Arity &next) const {
        return right_out == next.right_in && left_in == next.left_out;
    }

    std::string to_string() const {
        return "(" + std::to_string(right_in) + "," + std::to_string(left_out) + ")->(" +
               std::to_string(right_out) + "," + std::to_string(left_in) + ")";
    }
};

// MDP with ordered open ends; exits are expected to be the only terminals
template <typename value_t>
struct OpenMdp {
    Mdp<value_t> mdp;
    std::vector<state_t> enter_right, enter_left, exit_right, exit_left;

    Arity arity() const {
        return Arity{static_cast<int>(enter_right.size()), static_cast<int>(exit_left.size()),
                     static_cast<int>(exit_right.size()), static_cast<int>(enter_left.size())};
    }

    // entrance/exit enumeration runs rightward then leftward
    std::vector<state_t> entrances() const {
        std::vector<state_t> all(enter_right);
        all.insert(all.end(), enter_left.begin(), enter_left.end());
        return all;
    }

    std::vector<state_t> exits() const {
        std::vector<state_t> all(exit_right);
        all.insert(all.end(), exit_left.begin(), exit_left.end());
        return all;
    }

    int num_entrances() const { return static_cast<int>(enter_right.size() + enter_left.size()); }
    int num_exits() const { return static_cast<int>(exit_right.size() + exit_left.size()); }
};

struct Violation {
    std::string what;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

template <typename value_t>
ValidationReport validate_omdp(const OpenMdp<value_t> &m) {
    ValidationReport report;
    const state_t n = m.mdp.num_states();
    auto in_range = [&](state_t s) { return s >= 0 && s < n; };
    std::vector<int> open_end_uses(std::max<state_t>(n, 0), 0);
    auto mark = [&](const std::vector<state_t> &ids, const char *which) {
        for (state_t s : ids) {
            if (!in_range(s)) {
                report.violations.push_back({std::string(which) + ": state id out of range"});
                continue;
            }
            if (++open_end_uses[s] > 1)
                report.violations.push_back({"open ends overlap at state " + std::to_string(s)});
        }
    };
    mark(m.enter_right, "enter_right");
    mark(m.enter_left, "enter_left");
    mark(m.exit_right, "exit_right");
    mark(m.exit_left, "exit_left");

    std::vector<bool> is_exit(std::max<state_t>(n, 0), false);
    for (state_t s : m.exit_right)
        if (in_range(s)) is_exit[s] = true;
    for (state_t s : m.exit_left)
        if (in_range(s)) is_exit[s] = true;
    for (state_t s = 0; s < n; ++s) {
        if (is_exit[s] && !m.mdp.is_terminal(s))
            report.violations.push_back({"exit not terminal: state " + std::to_string(s)});
        if (!is_exit[s] && m.mdp.is_terminal(s))
            report.violations.push_back({"terminal non-exit: state " + std::to_string(s)});
    }
    if (!m.mdp.distributions_valid())
        report.violations.push_back({"malformed distribution (negative entry or row sum != 1)"});
    return report;
}

// deterministic memoryless scheduler; choice[s] indexes into actions[s], -1 undefined
struct Scheduler {
    std::vector<std::int32_t> choice;

    static Scheduler undefined(state_t n) {
        Scheduler s;
        s.choice.assign(n, -1);
        return s;
    }
};

// stochastic memoryless scheduler: per state, distribution over enabled action indices
template <typename value_t>
struct StochasticScheduler {
    std::vector<std::vector<std::pair<std::int32_t, value_t>>> choice;
};

// one memoryless scheduler per entrance, in entrance enumeration order
struct CompositeScheduler {
    std::vector<Scheduler> per_entrance;
};

// chain rows; terminals are completed with self-loops here, inputs stay untouched
template <typename value_t>
struct MarkovChain {
    std::vector<Dist<value_t>> rows;
    state_t num_states() const { return static_cast<state_t>(rows.size()); }
};

template <typename value_t>
MarkovChain<value_t> induce_chain(const Mdp<value_t> &m, const Scheduler &sched) {
    MarkovChain<value_t> chain;
    chain.rows.resize(m.num_states());
    for (state_t s = 0; s < m.num_states(); ++s) {
        if (m.is_terminal(s)) {
            chain.rows[s] = {{s, value_t(1)}};
            continue;
        }
        if (s >= static_cast<state_t>(sched.choice.size()) || sched.choice[s] < 0 ||
            sched.choice[s] >= static_cast<std::int32_t>(m.actions[s].size()))
            throw model_error("scheduler undefined on non-terminal state " + std::to_string(s));
        chain.rows[s] = m.actions[s][sched.choice[s]].dist;
    }
    return chain;
}

template <typename value_t>
MarkovChain<value_t> induce_chain(const Mdp<value_t> &m, const StochasticScheduler<value_t> &sched) {
    MarkovChain<value_t> chain;
    chain.rows.resize(m.num_states());
    for (state_t s = 0; s < m.num_states(); ++s) {
        if (m.is_terminal(s)) {
            chain.rows[s] = {{s, value_t(1)}};
            continue;
        }
        if (s >= static_cast<state_t>(sched.choice.size()) || sched.choice[s].empty())
            throw model_error("scheduler undefined on non-terminal state " + std::to_string(s));
        // mix the chosen action rows
        std::vector<value_t> dense(m.num_states(), value_t(0));
        for (const auto &[idx, weight] : sched.choice[s]) {
            if (idx < 0 || idx >= static_cast<std::int32_t>(m.actions[s].size()))
                throw model_error("scheduler chooses disabled action at state " + std::to_string(s));
            for (const auto &[t, p] : m.actions[s][idx].dist) dense[t] += weight * p;
        }
        for (state_t t = 0; t < m.num_states(); ++t)
            if (!(dense[t] == value_t(0))) chain.rows[s].emplace_back(t, dense[t]);
    }
    return chain;
}

template <typename value_t, typename sched_t>
MarkovChain<value_t> induce_chain(const OpenMdp<value_t> &m, const sched_t &sched) {
    return induce_chain(m.mdp, sched);
}

}  // namespace sdmc
