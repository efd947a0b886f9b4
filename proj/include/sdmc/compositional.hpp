#pragma once

#include <bit>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdmc/diagram.hpp"
#include "sdmc/shortcut.hpp"

namespace sdmc {

// ---------------------------------------------------------------------------
// structural hashing of diagrams and models

namespace detail {

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 12) + (h >> 4);
    h *= 0xff51afd7ed558ccdULL;
    return h ^ (h >> 33);
}

inline std::uint64_t hash_scalar(double v) { return std::bit_cast<std::uint64_t>(v); }

inline std::uint64_t hash_scalar(const Rational &v) {
    std::uint64_t h = 0x2b992ddfa23249d6ULL;
    for (char c : v.get_num().get_str()) h = hash_mix(h, static_cast<std::uint64_t>(c));
    for (char c : v.get_den().get_str()) h = hash_mix(h, static_cast<std::uint64_t>(c));
    return h;
}

template <typename value_t>
std::uint64_t hash_omdp(const OpenMdp<value_t> &m) {
    std::uint64_t h = 0x8d2e4c95a61fb30bULL;
    h = hash_mix(h, static_cast<std::uint64_t>(m.mdp.num_states()));
    for (state_t s = 0; s < m.mdp.num_states(); ++s) {
        h = hash_mix(h, 0x51ULL);
        for (const auto &a : m.mdp.actions[s]) {
            h = hash_mix(h, 0xacULL);
            for (const auto &[t, p] : a.dist) {
                h = hash_mix(h, static_cast<std::uint64_t>(t));
                h = hash_mix(h, hash_scalar(p));
            }
        }
    }
    for (const auto *ends : {&m.enter_right, &m.enter_left, &m.exit_right, &m.exit_left}) {
        h = hash_mix(h, 0xe0ULL);
        for (state_t s : *ends) h = hash_mix(h, static_cast<std::uint64_t>(s));
    }
    return h;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// curve cache

template <typename value_t>
struct CacheEntry {
    DiagramNode::Kind kind = DiagramNode::Kind::leaf;
    int trace_count = 0;
    IoSignature signature;
    // assembled result: lower half of the L-stage, upper half of the U-stage
    SoundApprox<value_t> approx;
    // complete stage analyses, kept for the error-bound calculus
    SoundApprox<value_t> stage_lower;
    SoundApprox<value_t> stage_upper;
    bool has_stage_upper = false;
    ShortcutMdp<value_t> lower_shortcut;
    ShortcutMdp<value_t> upper_shortcut;
    std::shared_ptr<const CacheEntry> child1, child2;
    OpenMdp<value_t> analysis_lower;  // leaf model, or the composed lower shortcuts
    state_t child2_offset = 0;        // child 2 state offset inside analysis_lower
};

// content-addressed store of analyzed sub-diagrams; values are immutable and a
// hit is bit-identical to recomputation under the same engine and eta
template <typename value_t>
class CurveCache {
public:
    CurveCache() = default;
    explicit CurveCache(bool enabled) : enabled_(enabled) {}

    std::shared_ptr<const CacheEntry<value_t>> find(std::uint64_t key) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = enabled_ ? map_.find(key) : map_.end();
        if (it == map_.end()) {
            ++misses_;
            return nullptr;
        }
        ++hits_;
        return it->second;
    }

    void insert(std::uint64_t key, std::shared_ptr<const CacheEntry<value_t>> entry) {
        if (!enabled_) return;
        std::lock_guard<std::mutex> lock(mutex_);
        map_.emplace(key, std::move(entry));  // duplicate insertions keep the first value
    }

    void note_leaf_analysis() {
        std::lock_guard<std::mutex> lock(mutex_);
        ++leaf_analyses_;
    }

    long hits() const { return hits_; }
    long misses() const { return misses_; }
    long leaf_analyses() const { return leaf_analyses_; }

private:
    bool enabled_ = true;
    std::mutex mutex_;
    std::unordered_map<std::uint64_t, std::shared_ptr<const CacheEntry<value_t>>> map_;
    long hits_ = 0, misses_ = 0, leaf_analyses_ = 0;
};

// ---------------------------------------------------------------------------
// the recursive approximation (leaf analysis + shortcut composition)

namespace detail {

template <typename value_t>
SoundApprox<value_t> assemble(const SoundApprox<value_t> &lower_stage,
                              const SoundApprox<value_t> &upper_stage) {
    SoundApprox<value_t> out;
    out.exit_count = lower_stage.exit_count;
    out.queries = lower_stage.queries + upper_stage.queries;
    for (std::size_t i = 0; i < lower_stage.entrances.size(); ++i) {
        EntranceApprox<value_t> ea = lower_stage.entrances[i];
        ea.upper = upper_stage.entrances[i].upper;
        out.entrances.push_back(std::move(ea));
    }
    return out;
}

template <typename value_t>
std::shared_ptr<const CacheEntry<value_t>> approx_sd_impl(const DiagramPtr &node,
                                                          const ModelTable<value_t> &table, value_t eta,
                                                          CurveCache<value_t> &cache,
                                                          const SolveOptions &opts,
                                                          const std::string &path, std::uint64_t *out_hash) {
    std::uint64_t h = 0;
    auto entry = std::make_shared<CacheEntry<value_t>>();
    entry->kind = node->kind;
    try {
        switch (node->kind) {
            case DiagramNode::Kind::leaf: {
                auto it = table.find(node->leaf_name);
                if (it == table.end()) throw type_error("unknown model '" + node->leaf_name + "'");
                h = hash_mix(0x1fULL, hash_omdp(it->second));
                if (out_hash) *out_hash = h;
                const std::uint64_t key = hash_mix(h, hash_scalar(eta));
                if (auto hit = cache.find(key)) return hit;
                entry->approx = approx_multiobj(it->second, eta, opts);
                cache.note_leaf_analysis();
                entry->stage_lower = entry->approx;
                entry->analysis_lower = it->second;
                entry->signature = signature_of(it->second);
                entry->lower_shortcut = shortcut_from_lower(entry->signature, entry->approx);
                entry->upper_shortcut =
                    shortcut_from_upper(entry->signature, entry->approx, opts.vertex_dim_cap);
                cache.insert(key, entry);
                return entry;
            }
            case DiagramNode::Kind::trace: {
                std::uint64_t child_hash = 0;
                entry->child1 = approx_sd_impl(node->children[0], table, eta, cache, opts,
                                               path + ".trace", &child_hash);
                entry->trace_count = node->trace_count;
                h = hash_mix(hash_mix(0x4aULL, child_hash),
                             static_cast<std::uint64_t>(node->trace_count));
                if (out_hash) *out_hash = h;
                const std::uint64_t key = hash_mix(h, hash_scalar(eta));
                if (auto hit = cache.find(key)) return hit;
                OpenMdp<value_t> lower_mdp = trace_apply(entry->child1->lower_shortcut.omdp,
                                                         node->trace_count);
                OpenMdp<value_t> upper_mdp = trace_apply(entry->child1->upper_shortcut.omdp,
                                                         node->trace_count);
                entry->stage_lower = approx_multiobj(lower_mdp, eta, opts);
                entry->stage_upper = approx_multiobj(upper_mdp, eta, opts);
                entry->has_stage_upper = true;
                entry->approx = assemble(entry->stage_lower, entry->stage_upper);
                entry->analysis_lower = std::move(lower_mdp);
                entry->signature = signature_of(entry->analysis_lower);
                entry->lower_shortcut = shortcut_from_lower(entry->signature, entry->approx);
                entry->upper_shortcut =
                    shortcut_from_upper(entry->signature, entry->approx, opts.vertex_dim_cap);
                cache.insert(key, entry);
                return entry;
            }
            default: {
                const bool is_seq = node->kind == DiagramNode::Kind::seq;
                std::uint64_t h1 = 0, h2 = 0;
                entry->child1 = approx_sd_impl(node->children[0], table, eta, cache, opts,
                                               path + (is_seq ? ".seq[0]" : ".sum[0]"), &h1);
                entry->child2 = approx_sd_impl(node->children[1], table, eta, cache, opts,
                                               path + (is_seq ? ".seq[1]" : ".sum[1]"), &h2);
                h = hash_mix(hash_mix(is_seq ? 0x2bULL : 0x3cULL, h1), h2);
                if (out_hash) *out_hash = h;
                const std::uint64_t key = hash_mix(h, hash_scalar(eta));
                if (auto hit = cache.find(key)) return hit;
                entry->child2_offset = entry->child1->lower_shortcut.omdp.mdp.num_states();
                OpenMdp<value_t> lower_mdp =
                    is_seq ? seq_compose(entry->child1->lower_shortcut.omdp,
                                         entry->child2->lower_shortcut.omdp)
                           : sum_compose(entry->child1->lower_shortcut.omdp,
                                         entry->child2->lower_shortcut.omdp);
                OpenMdp<value_t> upper_mdp =
                    is_seq ? seq_compose(entry->child1->upper_shortcut.omdp,
                                         entry->child2->upper_shortcut.omdp)
                           : sum_compose(entry->child1->upper_shortcut.omdp,
                                         entry->child2->upper_shortcut.omdp);
                entry->stage_lower = approx_multiobj(lower_mdp, eta, opts);
                entry->stage_upper = approx_multiobj(upper_mdp, eta, opts);
                entry->has_stage_upper = true;
                entry->approx = assemble(entry->stage_lower, entry->stage_upper);
                entry->analysis_lower = std::move(lower_mdp);
                entry->signature = signature_of(entry->analysis_lower);
                entry->lower_shortcut = shortcut_from_lower(entry->signature, entry->approx);
                entry->upper_shortcut =
                    shortcut_from_upper(entry->signature, entry->approx, opts.vertex_dim_cap);
                cache.insert(key, entry);
                return entry;
            }
        }
    } catch (const type_error &) {
        throw;
    } catch (const model_error &e) {
        std::string what(e.what());
        if (what.find("[at ") == std::string::npos) what += " [at " + path + "]";
        throw model_error(what);
    }
}

}  // namespace detail

// recursive sound approximation over the diagram tree; every analysis step is
// one Algorithm-1 run, on a leaf or on a composition of child shortcuts
template <typename value_t>
std::shared_ptr<const CacheEntry<value_t>> approx_multiobj_sd(const DiagramPtr &diagram,
                                                              const ModelTable<value_t> &table,
                                                              value_t eta, CurveCache<value_t> &cache,
                                                              const SolveOptions &opts = {}) {
    type_check(diagram, table);
    return detail::approx_sd_impl(canonicalize(diagram), table, eta, cache, opts, "root", nullptr);
}

// ---------------------------------------------------------------------------
// hierarchical schedulers: extraction, recursive replay, monolithic replay

// preorder ids, subtree sizes, and leaf indices of a canonical tree
struct TreeIndex {
    std::vector<int> subtree_size;  // by preorder id
    std::vector<int> leaf_index;    // by preorder id, -1 for internal nodes
    int node_count = 0;

    static TreeIndex build(const DiagramPtr &canonical) {
        TreeIndex t;
        int leaves = 0;
        build_rec(canonical, t, leaves);
        t.node_count = static_cast<int>(t.subtree_size.size());
        return t;
    }

private:
    static int build_rec(const DiagramPtr &node, TreeIndex &t, int &leaves) {
        const int id = static_cast<int>(t.subtree_size.size());
        t.subtree_size.push_back(0);
        t.leaf_index.push_back(-1);
        int size = 1;
        if (node->kind == DiagramNode::Kind::leaf) {
            t.leaf_index[id] = leaves++;
        } else {
            for (const auto &c : node->children) size += build_rec(c, t, leaves);
        }
        t.subtree_size[id] = size;
        return size;
    }
};

// scheduler tree mirroring the diagram: each node carries the DM scheduler on
// its lower-composition MDP; leaves carry recovered memoryless schedulers
template <typename value_t>
struct HierSched {
    std::shared_ptr<const CacheEntry<value_t>> entry;
    Scheduler node_sched;
    int node_id = -1;
    const HierSched *parent = nullptr;
    int slot_in_parent = -1;
    // children[slot][child entrance index]
    std::vector<std::vector<std::shared_ptr<HierSched>>> children;

    bool is_leaf() const { return entry->kind == DiagramNode::Kind::leaf; }
};

namespace detail {

template <typename value_t>
std::shared_ptr<HierSched<value_t>> extract_hier(const std::shared_ptr<const CacheEntry<value_t>> &entry,
                                                 const Scheduler &sched, int node_id,
                                                 const TreeIndex &tree, const HierSched<value_t> *parent,
                                                 int slot_in_parent) {
    auto hs = std::make_shared<HierSched<value_t>>();
    hs->entry = entry;
    hs->node_sched = sched;
    hs->node_id = node_id;
    hs->parent = parent;
    hs->slot_in_parent = slot_in_parent;
    if (entry->kind == DiagramNode::Kind::leaf) return hs;
    const int slots = entry->child2 ? 2 : 1;
    hs->children.resize(slots);
    for (int slot = 0; slot < slots; ++slot) {
        const auto &child = slot == 0 ? entry->child1 : entry->child2;
        const state_t offset = slot == 0 ? 0 : entry->child2_offset;
        const int child_node_id =
            slot == 0 ? node_id + 1 : node_id + 1 + tree.subtree_size[node_id + 1];
        hs->children[slot].resize(child->signature.entrances());
        for (int i = 0; i < child->signature.entrances(); ++i) {
            const state_t entrance_state = offset + child->lower_shortcut.entrance_state(i);
            const auto choice = sched.choice[entrance_state];
            if (choice < 0 ||
                choice >= static_cast<std::int32_t>(child->approx.entrances[i].witnesses.size()))
                throw model_error("scheduler extraction: no annotated vertex for the chosen action");
            hs->children[slot][i] =
                extract_hier(child, child->approx.entrances[i].witnesses[choice], child_node_id, tree,
                             hs.get(), slot);
        }
    }
    return hs;
}

}  // namespace detail

template <typename value_t>
std::shared_ptr<HierSched<value_t>> extract_hier_scheduler(const DiagramPtr &diagram,
                                                           const std::shared_ptr<const CacheEntry<value_t>> &entry,
                                                           const Scheduler &root_sched,
                                                           const TreeIndex &tree) {
    (void)diagram;
    return detail::extract_hier(entry, root_sched, 0, tree,
                                static_cast<const HierSched<value_t> *>(nullptr), -1);
}

// recursive replay: substitute each chosen child vertex by the exit vector its
// own recovered scheduler actually achieves, then solve the stitched chain
template <typename value_t>
class HierReplayer {
public:
    Point<value_t> value(const HierSched<value_t> &hs, int entrance_idx) {
        const auto key = std::make_pair(&hs, entrance_idx);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Point<value_t> result;
        if (hs.is_leaf()) {
            result = achieved_point(hs.entry->analysis_lower, entrance_idx, hs.node_sched);
        } else {
            auto chain = induce_chain(hs.entry->analysis_lower, hs.node_sched);
            const int slots = hs.entry->child2 ? 2 : 1;
            for (int slot = 0; slot < slots; ++slot) {
                const auto &child = slot == 0 ? hs.entry->child1 : hs.entry->child2;
                const state_t offset = slot == 0 ? 0 : hs.entry->child2_offset;
                const int n_in = child->signature.entrances();
                const int n_out = child->signature.exits();
                for (int i = 0; i < n_in; ++i) {
                    Point<value_t> replayed = value(*hs.children[slot][i], i);
                    Dist<value_t> row;
                    value_t total(0);
                    for (int j = 0; j < n_out; ++j) {
                        if (replayed[j] > value_t(0)) {
                            row.emplace_back(offset + n_in + j, replayed[j]);
                            total += replayed[j];
                        }
                    }
                    if (value_t(1) - total > value_t(0))
                        row.emplace_back(offset + n_in + n_out, value_t(1) - total);  // star
                    chain.rows[offset + child->lower_shortcut.entrance_state(i)] = std::move(row);
                }
            }
            const auto &m = hs.entry->analysis_lower;
            std::vector<std::vector<state_t>> groups;
            for (state_t e : m.exits()) groups.push_back({e});
            auto probs = multi_reach_probs<value_t>(chain, groups);
            result.resize(groups.size());
            for (std::size_t j = 0; j < groups.size(); ++j)
                result[j] = probs[j][m.entrances()[entrance_idx]];
        }
        memo_.emplace(key, result);
        return result;
    }

private:
    std::map<std::pair<const HierSched<value_t> *, int>, Point<value_t>> memo_;
};

// resolve the leaf instance that governs play when a subtree is entered at a
// given entrance index (in the subtree's own enumeration)
template <typename value_t>
std::pair<const HierSched<value_t> *, int> descend_to_leaf(const HierSched<value_t> *hs, int entrance_idx) {
    while (!hs->is_leaf()) {
        const auto &c1 = hs->entry->child1->signature;
        int slot, child_idx;
        if (hs->entry->kind == DiagramNode::Kind::trace) {
            const int node_er = c1.in_right - hs->entry->trace_count;
            slot = 0;
            child_idx = entrance_idx < node_er ? entrance_idx
                                               : c1.in_right + (entrance_idx - node_er);
        } else if (hs->entry->kind == DiagramNode::Kind::seq) {
            // entrances: c1 rightward then c2 leftward
            if (entrance_idx < c1.in_right) {
                slot = 0;
                child_idx = entrance_idx;
            } else {
                slot = 1;
                const auto &c2 = hs->entry->child2->signature;
                child_idx = c2.in_right + (entrance_idx - c1.in_right);
            }
        } else {  // sum: c1.er, c2.er, c1.el, c2.el
            const auto &c2 = hs->entry->child2->signature;
            if (entrance_idx < c1.in_right) {
                slot = 0;
                child_idx = entrance_idx;
            } else if (entrance_idx < c1.in_right + c2.in_right) {
                slot = 1;
                child_idx = entrance_idx - c1.in_right;
            } else if (entrance_idx < c1.in_right + c2.in_right + c1.in_left) {
                slot = 0;
                child_idx = c1.in_right + (entrance_idx - c1.in_right - c2.in_right);
            } else {
                slot = 1;
                child_idx = c2.in_right + (entrance_idx - c1.in_right - c2.in_right - c1.in_left);
            }
        }
        hs = hs->children[slot][child_idx].get();
        entrance_idx = child_idx;
    }
    return {hs, entrance_idx};
}

// play the hierarchical scheduler on the monolithic semantics: the product of
// monolithic states with the governing leaf instance is a Markov chain
template <typename value_t>
Point<value_t> replay_on_monolith(const ComposedModel<value_t> &model, const ModelTable<value_t> &table,
                                  const HierSched<value_t> &root, const TreeIndex &tree,
                                  int entrance_idx) {
    (void)table;
    std::vector<state_t> leaf_offset(model.leaf_sizes.size(), 0);
    for (std::size_t l = 1; l < model.leaf_sizes.size(); ++l)
        leaf_offset[l] = leaf_offset[l - 1] + model.leaf_sizes[l - 1];

    struct ProductState {
        state_t global;
        const HierSched<value_t> *leaf;
    };
    std::map<std::pair<state_t, const HierSched<value_t> *>, state_t> ids;
    std::vector<ProductState> states;
    auto intern = [&](state_t g, const HierSched<value_t> *leaf) {
        auto key = std::make_pair(g, leaf);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        const state_t id = static_cast<state_t>(states.size());
        ids.emplace(key, id);
        states.push_back(ProductState{g, leaf});
        return id;
    };

    auto leaf_entrance_global = [&](const HierSched<value_t> *leaf_hs, int leaf_entrance_idx) {
        const int leaf_idx = tree.leaf_index[leaf_hs->node_id];
        const auto &leaf_model = leaf_hs->entry->analysis_lower;
        return leaf_offset[leaf_idx] + leaf_model.entrances()[leaf_entrance_idx];
    };

    auto [start_leaf, start_entrance] = descend_to_leaf(&root, entrance_idx);
    const state_t start = intern(leaf_entrance_global(start_leaf, start_entrance), start_leaf);

    const auto diagram_exits = model.omdp.exits();
    std::vector<bool> is_exit(model.omdp.mdp.num_states(), false);
    for (state_t e : diagram_exits) is_exit[e] = true;

    // interning appends product states; process rows in discovery order
    MarkovChain<value_t> chain;
    for (state_t id = 0; id < static_cast<state_t>(states.size()); ++id) {
        const auto [g, leaf_hs] = states[id];
        if (is_exit[g] || model.omdp.mdp.is_terminal(g)) {
            chain.rows.push_back({{id, value_t(1)}});
            continue;
        }
        int action;
        if (model.leaf_action_count[g] > 0) {
            action = leaf_hs->node_sched.choice[model.origin_state[g]];
            if (action < 0) throw model_error("hierarchical scheduler undefined at a reachable state");
        } else {
            action = 0;  // forced bridge at a leaf exit
        }
        const auto &dist = model.omdp.mdp.actions[g][action].dist;
        auto bridge = model.bridges.find({g, action});
        Dist<value_t> row;
        for (const auto &[t, p] : dist) {
            const HierSched<value_t> *next_leaf = leaf_hs;
            if (bridge != model.bridges.end()) {
                // locate the governing instance of the bridging node, then descend
                const auto &info = bridge->second;
                const HierSched<value_t> *anchor = leaf_hs;
                while (anchor && anchor->node_id != info.node_id) anchor = anchor->parent;
                if (!anchor) throw model_error("bridge outside the scheduler tree");
                auto [nl, nidx] = descend_to_leaf(
                    anchor->children[info.slot][info.entrance_idx].get(), info.entrance_idx);
                next_leaf = nl;
                if (leaf_entrance_global(nl, nidx) != t)
                    throw model_error("bridge wiring mismatch during replay");
            }
            row.emplace_back(intern(t, next_leaf), p);
        }
        chain.rows.push_back(std::move(row));
    }

    // per-exit absorption from the start
    std::vector<std::vector<state_t>> groups(diagram_exits.size());
    for (state_t id = 0; id < static_cast<state_t>(states.size()); ++id) {
        for (std::size_t j = 0; j < diagram_exits.size(); ++j)
            if (states[id].global == diagram_exits[j]) groups[j].push_back(id);
    }
    auto probs = multi_reach_probs<value_t>(chain, groups);
    Point<value_t> out(diagram_exits.size());
    for (std::size_t j = 0; j < diagram_exits.size(); ++j) out[j] = probs[j][start];
    return out;
}

// ---------------------------------------------------------------------------
// compositional error bounds

enum class ComposeKind { sum, rightward_seq };

// a-priori bound on the composed L-infinity error: the sum takes the max of
// the component gaps; the rightward sequential case pays |O^A| times the left
// gap plus the right gap plus both stage-analysis gaps
template <typename value_t>
value_t compose_error_bounds(ComposeKind kind, const Arity &a, const Arity &b, value_t gap_a,
                             value_t gap_b, value_t stage_gap_lower = value_t(0),
                             value_t stage_gap_upper = value_t(0)) {
    if (kind == ComposeKind::sum) return std::max(gap_a, gap_b);
    const bool rightward = a.left_in == 0 && a.left_out == 0 && b.left_in == 0 && b.left_out == 0;
    if (!rightward || a.right_out != b.right_in)
        throw model_error("rightward-seq bound requires rightward arities " + a.to_string() + " then " +
                          b.to_string());
    return value_t(a.right_out) * gap_a + gap_b + stage_gap_lower + stage_gap_upper;
}

// ---------------------------------------------------------------------------
// the single-exit query

template <typename value_t>
struct SingleExitResult {
    value_t lower{}, upper{};
    value_t replayed{};
    std::shared_ptr<HierSched<value_t>> scheduler;
    value_t eta_final{};
    bool converged = false;
    std::shared_ptr<const CacheEntry<value_t>> entry;
};

// tighten eta until the bracket at the queried coordinate closes below epsilon,
// then extract and replay the witness chain
template <typename value_t>
SingleExitResult<value_t> check_single_exit(const DiagramPtr &diagram, const ModelTable<value_t> &table,
                                            int entrance_idx, int exit_idx, value_t epsilon,
                                            CurveCache<value_t> &cache, const SolveOptions &opts = {}) {
    const Arity arity = type_check(diagram, table);
    const int entrances = arity.right_in + arity.left_in;
    const int exits = arity.right_out + arity.left_out;
    if (entrance_idx < 0 || entrance_idx >= entrances || exit_idx < 0 || exit_idx >= exits)
        throw model_error("entrance or exit index outside the diagram arity");
    if (!number_traits<value_t>::exact && !(epsilon > value_t(0)))
        throw model_error("epsilon = 0 requires the rational engine");
    const DiagramPtr canonical = canonicalize(diagram);
    const TreeIndex tree = TreeIndex::build(canonical);

    SingleExitResult<value_t> best;
    value_t eta = epsilon;
    if (number_traits<value_t>::exact && epsilon == value_t(0)) eta = value_t(0);
    for (int round = 0; round < 16; ++round) {
        if (!number_traits<value_t>::exact && eta < value_t(1e-12)) break;
        auto entry = approx_multiobj_sd(canonical, table, eta, cache, opts);
        const auto &ea = entry->approx.entrances[entrance_idx];
        Point<value_t> unit(exits, value_t(0));
        unit[exit_idx] = value_t(1);
        const value_t lower = ea.lower.support(unit);
        const value_t upper = ea.upper.support(unit);
        if (best.scheduler == nullptr || upper - lower < best.upper - best.lower) {
            best.lower = lower;
            best.upper = upper;
            best.eta_final = eta;
            best.entry = entry;
            // witness: the annotated vertex with the best queried coordinate
            std::size_t arg = 0;
            for (std::size_t k = 1; k < ea.lower.vertices().size(); ++k)
                if (ea.lower.vertices()[k][exit_idx] > ea.lower.vertices()[arg][exit_idx]) arg = k;
            best.scheduler = extract_hier_scheduler(canonical, entry, ea.witnesses[arg], tree);
            HierReplayer<value_t> replayer;
            best.replayed = replayer.value(*best.scheduler, entrance_idx)[exit_idx];
        }
        if (best.upper - best.lower <= epsilon) {
            best.converged = true;
            return best;
        }
        if (number_traits<value_t>::exact && eta == value_t(0)) break;
        eta = eta / value_t(10);
        if (number_traits<value_t>::exact && eta < value_from_double<value_t>(1e-10)) eta = value_t(0);
    }
    return best;  // cap reached; achieved bounds reported
}

}  // namespace sdmc
