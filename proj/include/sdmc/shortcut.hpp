#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdmc/multiobj.hpp"

namespace sdmc {

// open-end list lengths; the state identities of a shortcut are fresh
struct IoSignature {
    int in_right = 0, in_left = 0, out_right = 0, out_left = 0;
    int entrances() const { return in_right + in_left; }
    int exits() const { return out_right + out_left; }
};

template <typename value_t>
IoSignature signature_of(const OpenMdp<value_t> &m) {
    return IoSignature{static_cast<int>(m.enter_right.size()), static_cast<int>(m.enter_left.size()),
                       static_cast<int>(m.exit_right.size()), static_cast<int>(m.exit_left.size())};
}

template <typename value_t>
struct ShortcutAction {
    Point<value_t> point;
    std::optional<Scheduler> witness;  // memoryless scheduler on the source model
};

// two-layer oMDP: entrances act by jumping to exits per a chosen point, the
// residual mass falls into an absorbing star state
template <typename value_t>
struct ShortcutMdp {
    OpenMdp<value_t> omdp;
    state_t star = -1;
    std::vector<std::vector<ShortcutAction<value_t>>> provenance;  // per entrance, per action

    state_t entrance_state(int i) const { return static_cast<state_t>(i); }
};

namespace detail {

template <typename value_t>
void check_subdistribution(const Point<value_t> &p) {
    const value_t tol = number_traits<value_t>::geometry_tolerance();
    value_t total(0);
    for (const auto &x : p) {
        if (x < -tol) throw model_error("point outside subdistribution simplex");
        total += x;
    }
    if (total > value_t(1) + tol) throw model_error("point outside subdistribution simplex");
}

}  // namespace detail

// shortcut oMDP for explicit per-entrance point families (entrance enumeration order)
template <typename value_t>
ShortcutMdp<value_t> shortcut_from_points(const IoSignature &sig,
                                          std::vector<std::vector<ShortcutAction<value_t>>> families) {
    if (static_cast<int>(families.size()) != sig.entrances())
        throw model_error("family count does not match the signature");
    ShortcutMdp<value_t> sc;
    const int n_in = sig.entrances(), n_out = sig.exits();
    // layout: entrances, exits, star
    for (int i = 0; i < n_in; ++i) sc.omdp.mdp.add_state("in" + std::to_string(i));
    for (int j = 0; j < n_out; ++j) sc.omdp.mdp.add_state("out" + std::to_string(j));
    sc.star = sc.omdp.mdp.add_state("star");
    sc.omdp.mdp.add_action(sc.star, "loop", {{sc.star, value_t(1)}});
    for (int i = 0; i < sig.in_right; ++i) sc.omdp.enter_right.push_back(i);
    for (int i = 0; i < sig.in_left; ++i) sc.omdp.enter_left.push_back(sig.in_right + i);
    for (int j = 0; j < sig.out_right; ++j) sc.omdp.exit_right.push_back(n_in + j);
    for (int j = 0; j < sig.out_left; ++j) sc.omdp.exit_left.push_back(n_in + sig.out_right + j);
    for (int i = 0; i < n_in; ++i) {
        for (std::size_t k = 0; k < families[i].size(); ++k) {
            const auto &p = families[i][k].point;
            if (static_cast<int>(p.size()) != n_out) throw model_error("point dimension mismatch");
            detail::check_subdistribution(p);
            Dist<value_t> dist;
            value_t total(0);
            for (int j = 0; j < n_out; ++j) {
                if (p[j] > value_t(0)) dist.emplace_back(static_cast<state_t>(n_in + j), p[j]);
                total += p[j];
            }
            value_t residual = value_t(1) - total;
            if (residual > value_t(0)) dist.emplace_back(sc.star, residual);
            sc.omdp.mdp.add_action(static_cast<state_t>(i), "p" + std::to_string(k), std::move(dist));
        }
    }
    sc.provenance = std::move(families);
    return sc;
}

// shortcut over the lower sets; scheduler annotations travel into the provenance
template <typename value_t>
ShortcutMdp<value_t> shortcut_from_lower(const IoSignature &sig, const SoundApprox<value_t> &approx) {
    std::vector<std::vector<ShortcutAction<value_t>>> families(approx.entrances.size());
    for (std::size_t i = 0; i < approx.entrances.size(); ++i) {
        const auto &ea = approx.entrances[i];
        for (std::size_t k = 0; k < ea.lower.vertices().size(); ++k)
            families[i].push_back(ShortcutAction<value_t>{ea.lower.vertices()[k], ea.witnesses.size() > k
                                                              ? std::optional<Scheduler>(ea.witnesses[k])
                                                              : std::nullopt});
    }
    return shortcut_from_points<value_t>(sig, std::move(families));
}

// shortcut over the upper sets' vertex enumeration; no annotations exist here
template <typename value_t>
ShortcutMdp<value_t> shortcut_from_upper(const IoSignature &sig, const SoundApprox<value_t> &approx,
                                         int dim_cap = 6) {
    std::vector<std::vector<ShortcutAction<value_t>>> families(approx.entrances.size());
    for (std::size_t i = 0; i < approx.entrances.size(); ++i)
        for (auto &v : approx.entrances[i].upper.enumerate_vertices(dim_cap))
            families[i].push_back(ShortcutAction<value_t>{std::move(v), std::nullopt});
    return shortcut_from_points<value_t>(sig, std::move(families));
}

// scheduler recovery: per entrance, play the annotated scheduler of the point
// the shortcut scheduler picked there
template <typename value_t>
CompositeScheduler recover_scheduler(const OpenMdp<value_t> &source, const ShortcutMdp<value_t> &shortcut,
                                     const Scheduler &shortcut_sched) {
    CompositeScheduler composite;
    const int n_in = static_cast<int>(shortcut.provenance.size());
    for (int i = 0; i < n_in; ++i) {
        const state_t entrance = shortcut.entrance_state(i);
        const auto choice = shortcut_sched.choice[entrance];
        if (choice < 0 || choice >= static_cast<std::int32_t>(shortcut.provenance[i].size()))
            throw model_error("shortcut scheduler undefined at entrance " + std::to_string(i));
        const auto &action = shortcut.provenance[i][choice];
        if (!action.witness) throw model_error("missing annotation: shortcut not built from a lower set");
        composite.per_entrance.push_back(*action.witness);
        (void)source;
    }
    return composite;
}

}  // namespace sdmc
