#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sdmc/mdp.hpp"

namespace sdmc {

struct type_error : model_error {
    using model_error::model_error;
};

// syntax tree over named oMDP leaves; seq/sum are n-ary, trace loops the last
// k rightward exits back into the last k rightward entrances
struct DiagramNode;
using DiagramPtr = std::shared_ptr<const DiagramNode>;

struct DiagramNode {
    enum class Kind { leaf, seq, sum, trace };
    Kind kind;
    std::string leaf_name;
    std::vector<DiagramPtr> children;
    int trace_count = 0;

    static DiagramPtr leaf(std::string name) {
        auto n = std::make_shared<DiagramNode>();
        n->kind = Kind::leaf;
        n->leaf_name = std::move(name);
        return n;
    }
    static DiagramPtr seq(std::vector<DiagramPtr> children) {
        auto n = std::make_shared<DiagramNode>();
        n->kind = Kind::seq;
        n->children = std::move(children);
        return n;
    }
    static DiagramPtr sum(std::vector<DiagramPtr> children) {
        auto n = std::make_shared<DiagramNode>();
        n->kind = Kind::sum;
        n->children = std::move(children);
        return n;
    }
    static DiagramPtr trace(DiagramPtr child, int k) {
        auto n = std::make_shared<DiagramNode>();
        n->kind = Kind::trace;
        n->children = {std::move(child)};
        n->trace_count = k;
        return n;
    }
};

template <typename value_t>
using ModelTable = std::map<std::string, OpenMdp<value_t>>;

// n-ary nodes folded left into binary form; hashing and semantics share this shape
inline DiagramPtr canonicalize(const DiagramPtr &node) {
    switch (node->kind) {
        case DiagramNode::Kind::leaf:
            return node;
        case DiagramNode::Kind::trace:
            return DiagramNode::trace(canonicalize(node->children[0]), node->trace_count);
        default: {
            if (node->children.empty()) throw type_error("empty composition node");
            DiagramPtr acc = canonicalize(node->children[0]);
            for (std::size_t i = 1; i < node->children.size(); ++i) {
                auto rhs = canonicalize(node->children[i]);
                acc = node->kind == DiagramNode::Kind::seq ? DiagramNode::seq({acc, rhs})
                                                           : DiagramNode::sum({acc, rhs});
            }
            return acc;
        }
    }
}

// arity synthesis with node-path error reporting
template <typename value_t>
Arity type_check(const DiagramPtr &node, const ModelTable<value_t> &table, const std::string &path = "root") {
    switch (node->kind) {
        case DiagramNode::Kind::leaf: {
            auto it = table.find(node->leaf_name);
            if (it == table.end()) throw type_error("unknown model '" + node->leaf_name + "' at " + path);
            return it->second.arity();
        }
        case DiagramNode::Kind::seq: {
            Arity acc = type_check(node->children[0], table, path + ".seq[0]");
            for (std::size_t i = 1; i < node->children.size(); ++i) {
                Arity rhs = type_check(node->children[i], table, path + ".seq[" + std::to_string(i) + "]");
                if (!acc.matches_before(rhs))
                    throw type_error("arity mismatch at " + path + ".seq[" + std::to_string(i) +
                                     "]: " + acc.to_string() + " then " + rhs.to_string());
                acc.right_out = rhs.right_out;
                acc.left_in = rhs.left_in;
            }
            return acc;
        }
        case DiagramNode::Kind::sum: {
            Arity acc{0, 0, 0, 0};
            for (std::size_t i = 0; i < node->children.size(); ++i) {
                Arity rhs = type_check(node->children[i], table, path + ".sum[" + std::to_string(i) + "]");
                acc.right_in += rhs.right_in;
                acc.left_out += rhs.left_out;
                acc.right_out += rhs.right_out;
                acc.left_in += rhs.left_in;
            }
            return acc;
        }
        case DiagramNode::Kind::trace: {
            Arity a = type_check(node->children[0], table, path + ".trace");
            const int k = node->trace_count;
            if (k < 0 || k > std::min(a.right_out, a.right_in))
                throw type_error("trace count " + std::to_string(k) + " exceeds arity " + a.to_string() +
                                 " at " + path);
            a.right_out -= k;
            a.right_in -= k;
            return a;
        }
    }
    throw type_error("corrupt diagram node");
}

// ---------------------------------------------------------------------------
// the algebra on explicit oMDPs

namespace detail {

template <typename value_t>
state_t append_states(OpenMdp<value_t> &dst, const OpenMdp<value_t> &src) {
    const state_t offset = dst.mdp.num_states();
    for (state_t s = 0; s < src.mdp.num_states(); ++s) {
        dst.mdp.add_state(src.mdp.state_names.empty() ? std::string() : src.mdp.state_names[s]);
        for (const auto &a : src.mdp.actions[s]) {
            Dist<value_t> dist;
            for (const auto &[t, p] : a.dist) dist.emplace_back(t + offset, p);
            dst.mdp.add_action(s + offset, a.label, std::move(dist));
        }
    }
    return offset;
}

inline std::vector<state_t> shifted(const std::vector<state_t> &ids, state_t offset) {
    std::vector<state_t> out;
    out.reserve(ids.size());
    for (state_t s : ids) out.push_back(s + offset);
    return out;
}

}  // namespace detail

// sequential composition: a's rightward exits wire into b's rightward
// entrances, b's leftward exits wire back into a's leftward entrances
template <typename value_t>
OpenMdp<value_t> seq_compose(const OpenMdp<value_t> &a, const OpenMdp<value_t> &b) {
    if (!a.arity().matches_before(b.arity()))
        throw type_error("arity mismatch: " + a.arity().to_string() + " then " + b.arity().to_string());
    OpenMdp<value_t> out;
    const state_t ofs_a = detail::append_states(out, a);
    const state_t ofs_b = detail::append_states(out, b);
    for (std::size_t i = 0; i < a.exit_right.size(); ++i)
        out.mdp.add_action(a.exit_right[i] + ofs_a, "#bridge",
                           {{b.enter_right[i] + ofs_b, value_t(1)}});
    for (std::size_t i = 0; i < b.exit_left.size(); ++i)
        out.mdp.add_action(b.exit_left[i] + ofs_b, "#bridge", {{a.enter_left[i] + ofs_a, value_t(1)}});
    out.enter_right = detail::shifted(a.enter_right, ofs_a);
    out.enter_left = detail::shifted(b.enter_left, ofs_b);
    out.exit_right = detail::shifted(b.exit_right, ofs_b);
    out.exit_left = detail::shifted(a.exit_left, ofs_a);
    return out;
}

// sum: disjoint union, open ends concatenated a-then-b per side
template <typename value_t>
OpenMdp<value_t> sum_compose(const OpenMdp<value_t> &a, const OpenMdp<value_t> &b) {
    OpenMdp<value_t> out;
    const state_t ofs_a = detail::append_states(out, a);
    const state_t ofs_b = detail::append_states(out, b);
    auto join = [&](const std::vector<state_t> &xs, const std::vector<state_t> &ys) {
        auto all = detail::shifted(xs, ofs_a);
        auto more = detail::shifted(ys, ofs_b);
        all.insert(all.end(), more.begin(), more.end());
        return all;
    };
    out.enter_right = join(a.enter_right, b.enter_right);
    out.enter_left = join(a.enter_left, b.enter_left);
    out.exit_right = join(a.exit_right, b.exit_right);
    out.exit_left = join(a.exit_left, b.exit_left);
    return out;
}

// trace: wire the last k rightward exits back into the last k rightward
// entrances, in order, removing both from the open ends
template <typename value_t>
OpenMdp<value_t> trace_apply(const OpenMdp<value_t> &m, int k) {
    const Arity a = m.arity();
    if (k < 0 || k > std::min(a.right_out, a.right_in))
        throw type_error("trace count " + std::to_string(k) + " exceeds arity " + a.to_string());
    OpenMdp<value_t> out = m;
    const std::size_t first_exit = out.exit_right.size() - k;
    const std::size_t first_entrance = out.enter_right.size() - k;
    for (int i = 0; i < k; ++i)
        out.mdp.add_action(out.exit_right[first_exit + i], "#loop",
                           {{out.enter_right[first_entrance + i], value_t(1)}});
    out.exit_right.resize(first_exit);
    out.enter_right.resize(first_entrance);
    return out;
}

// ---------------------------------------------------------------------------
// monolithic semantics with per-state leaf provenance

// where a bridge action leads, in tree coordinates: the preorder id of the
// canonical node that created it, the child slot entered, and the entrance
// index within that child's own enumeration
struct BridgeInfo {
    int node_id;
    int slot;
    int entrance_idx;
};

template <typename value_t>
struct ComposedModel {
    OpenMdp<value_t> omdp;
    std::vector<int> origin_leaf;        // per state: leaf index in dfs order
    std::vector<state_t> origin_state;   // per state: state id inside that leaf
    std::vector<int> leaf_action_count;  // per state: actions the leaf itself owns
    std::vector<std::string> leaf_names;
    std::vector<state_t> leaf_sizes;
    std::map<std::pair<state_t, int>, BridgeInfo> bridges;  // (state, action) -> wiring
};

namespace detail {

// operates on the canonical binary tree; nodes are numbered in preorder so
// that bridge records line up with other walks of the same tree
template <typename value_t>
ComposedModel<value_t> semantics_impl(const DiagramPtr &node, const ModelTable<value_t> &table,
                                      int &preorder) {
    const int node_id = preorder++;
    switch (node->kind) {
        case DiagramNode::Kind::leaf: {
            auto it = table.find(node->leaf_name);
            if (it == table.end()) throw type_error("unknown model '" + node->leaf_name + "'");
            ComposedModel<value_t> out;
            out.omdp = it->second;
            out.leaf_names = {node->leaf_name};
            out.leaf_sizes = {it->second.mdp.num_states()};
            out.origin_leaf.assign(out.omdp.mdp.num_states(), 0);
            out.origin_state.resize(out.omdp.mdp.num_states());
            out.leaf_action_count.resize(out.omdp.mdp.num_states());
            for (state_t s = 0; s < out.omdp.mdp.num_states(); ++s) {
                out.origin_state[s] = s;
                out.leaf_action_count[s] = static_cast<int>(out.omdp.mdp.actions[s].size());
            }
            return out;
        }
        case DiagramNode::Kind::trace: {
            auto inner = semantics_impl(node->children[0], table, preorder);
            const int k = node->trace_count;
            const int er = static_cast<int>(inner.omdp.enter_right.size());
            const int xr = static_cast<int>(inner.omdp.exit_right.size());
            std::vector<state_t> looped;
            for (int i = 0; i < k; ++i) looped.push_back(inner.omdp.exit_right[xr - k + i]);
            inner.omdp = trace_apply(inner.omdp, k);
            for (int i = 0; i < k; ++i) {
                const int action = static_cast<int>(inner.omdp.mdp.actions[looped[i]].size()) - 1;
                inner.bridges[{looped[i], action}] = BridgeInfo{node_id, 0, er - k + i};
            }
            return inner;
        }
        default: {
            auto lhs = semantics_impl(node->children[0], table, preorder);
            auto rhs = semantics_impl(node->children[1], table, preorder);
            ComposedModel<value_t> out;
            const state_t ofs_b = lhs.omdp.mdp.num_states();
            out.omdp = node->kind == DiagramNode::Kind::seq ? seq_compose(lhs.omdp, rhs.omdp)
                                                            : sum_compose(lhs.omdp, rhs.omdp);
            out.origin_leaf = std::move(lhs.origin_leaf);
            out.origin_state = std::move(lhs.origin_state);
            out.leaf_action_count = std::move(lhs.leaf_action_count);
            const int leaf_offset = static_cast<int>(lhs.leaf_names.size());
            for (std::size_t j = 0; j < rhs.origin_leaf.size(); ++j) {
                out.origin_leaf.push_back(rhs.origin_leaf[j] + leaf_offset);
                out.origin_state.push_back(rhs.origin_state[j]);
                out.leaf_action_count.push_back(rhs.leaf_action_count[j]);
            }
            out.leaf_names = std::move(lhs.leaf_names);
            out.leaf_names.insert(out.leaf_names.end(), rhs.leaf_names.begin(), rhs.leaf_names.end());
            out.leaf_sizes = std::move(lhs.leaf_sizes);
            out.leaf_sizes.insert(out.leaf_sizes.end(), rhs.leaf_sizes.begin(), rhs.leaf_sizes.end());
            out.bridges = std::move(lhs.bridges);
            for (const auto &[key, info] : rhs.bridges)
                out.bridges[{key.first + ofs_b, key.second}] = info;
            if (node->kind == DiagramNode::Kind::seq) {
                for (std::size_t i = 0; i < lhs.omdp.exit_right.size(); ++i) {
                    const state_t s = lhs.omdp.exit_right[i];
                    const int action = static_cast<int>(out.omdp.mdp.actions[s].size()) - 1;
                    out.bridges[{s, action}] = BridgeInfo{node_id, 1, static_cast<int>(i)};
                }
                for (std::size_t i = 0; i < rhs.omdp.exit_left.size(); ++i) {
                    const state_t s = rhs.omdp.exit_left[i] + ofs_b;
                    const int action = static_cast<int>(out.omdp.mdp.actions[s].size()) - 1;
                    out.bridges[{s, action}] =
                        BridgeInfo{node_id, 0,
                                   static_cast<int>(lhs.omdp.enter_right.size() + i)};
                }
            }
            return out;
        }
    }
}

}  // namespace detail

// monolithic operational semantics, built bottom-up by left fold
template <typename value_t>
ComposedModel<value_t> semantics(const DiagramPtr &node, const ModelTable<value_t> &table) {
    type_check(node, table);
    int preorder = 0;
    return detail::semantics_impl(canonicalize(node), table, preorder);
}

// restriction of a monolithic scheduler to each leaf; forced bridge choices at
// leaf exits are dropped
template <typename value_t>
std::vector<Scheduler> split_scheduler(const ComposedModel<value_t> &model, const Scheduler &sched) {
    std::vector<Scheduler> parts;
    parts.reserve(model.leaf_sizes.size());
    for (state_t size : model.leaf_sizes) parts.push_back(Scheduler::undefined(size));
    for (state_t s = 0; s < model.omdp.mdp.num_states(); ++s) {
        if (s >= static_cast<state_t>(sched.choice.size()) || sched.choice[s] < 0) continue;
        // bridge actions sit past the leaf's own action list and are forced anyway
        if (sched.choice[s] >= model.leaf_action_count[s]) continue;
        parts[model.origin_leaf[s]].choice[model.origin_state[s]] = sched.choice[s];
    }
    return parts;
}

}  // namespace sdmc
