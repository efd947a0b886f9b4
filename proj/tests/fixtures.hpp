#pragma once

#include "sdmc/mdp.hpp"

// small hand-built open MDPs used across the test suites

namespace sdmc::fixtures {

template <typename value_t>
value_t frac(long num, long den) {
    return value_t(num) / value_t(den);
}

// two-room model A: one rightward entrance, one leftward entrance, exits on both sides
template <typename value_t>
OpenMdp<value_t> room_a() {
    OpenMdp<value_t> m;
    auto enr = m.mdp.add_state("enr1");
    auto s1 = m.mdp.add_state("s1");
    auto s2 = m.mdp.add_state("s2");
    auto enl = m.mdp.add_state("enl1");
    auto exr = m.mdp.add_state("exr1");
    auto exl = m.mdp.add_state("exl1");
    m.mdp.add_action(enr, "go", {{s1, value_t(1)}});
    m.mdp.add_action(s1, "top", {{exr, frac<value_t>(1, 2)}, {s2, frac<value_t>(1, 2)}});
    m.mdp.add_action(s1, "bottom", {{s2, value_t(1)}});
    m.mdp.add_action(s2, "out", {{exl, value_t(1)}});
    m.mdp.add_action(enl, "go", {{s2, frac<value_t>(3, 10)}, {exr, frac<value_t>(7, 10)}});
    m.enter_right = {enr};
    m.enter_left = {enl};
    m.exit_right = {exr};
    m.exit_left = {exl};
    return m;
}

// companion model B: single action splitting 0.3/0.7
template <typename value_t>
OpenMdp<value_t> room_b() {
    OpenMdp<value_t> m;
    auto enr = m.mdp.add_state("enr1");
    auto t1 = m.mdp.add_state("t1");
    auto exr = m.mdp.add_state("exr1");
    auto exl = m.mdp.add_state("exl1");
    m.mdp.add_action(enr, "go", {{t1, frac<value_t>(3, 10)}, {exr, frac<value_t>(7, 10)}});
    m.mdp.add_action(t1, "out", {{exl, value_t(1)}});
    m.enter_right = {enr};
    m.exit_right = {exr};
    m.exit_left = {exl};
    return m;
}

// one entrance, two exits, three Pareto-optimal schedulers
template <typename value_t>
OpenMdp<value_t> two_exit_tradeoff() {
    OpenMdp<value_t> m;
    auto enr = m.mdp.add_state("enr1");
    auto s1 = m.mdp.add_state("s1");
    auto exr1 = m.mdp.add_state("exr1");
    auto exr2 = m.mdp.add_state("exr2");
    auto sink = m.mdp.add_state("sink");
    m.mdp.add_action(enr, "a", {{s1, value_t(1)}});
    m.mdp.add_action(enr, "b",
                     {{exr1, frac<value_t>(27, 100)}, {exr2, frac<value_t>(3, 10)}, {sink, frac<value_t>(43, 100)}});
    m.mdp.add_action(s1, "a",
                     {{exr1, frac<value_t>(1, 5)}, {exr2, frac<value_t>(2, 5)}, {sink, frac<value_t>(2, 5)}});
    m.mdp.add_action(s1, "b",
                     {{exr1, frac<value_t>(3, 10)}, {exr2, frac<value_t>(1, 10)}, {sink, frac<value_t>(3, 5)}});
    m.mdp.add_action(sink, "loop", {{sink, value_t(1)}});
    m.enter_right = {enr};
    m.exit_right = {exr1, exr2};
    return m;
}

// exploding-error pair: passthrough A (leftward entrance rejoins the rightward flow)
template <typename value_t>
OpenMdp<value_t> loop_a() {
    OpenMdp<value_t> m;
    auto enr = m.mdp.add_state("enr1");
    auto enl = m.mdp.add_state("enl1");
    auto exr = m.mdp.add_state("exr1");
    m.mdp.add_action(enr, "go", {{exr, value_t(1)}});
    m.mdp.add_action(enl, "go", {{exr, value_t(1)}});
    m.enter_right = {enr};
    m.enter_left = {enl};
    m.exit_right = {exr};
    return m;
}

// exploding-error pair: B loops 0.99 of the mass back leftward
template <typename value_t>
OpenMdp<value_t> loop_b() {
    OpenMdp<value_t> m;
    auto enr = m.mdp.add_state("enr1");
    auto t1 = m.mdp.add_state("t1");
    auto exr = m.mdp.add_state("exr1");
    auto exl = m.mdp.add_state("exl1");
    m.mdp.add_action(enr, "go",
                     {{exr, frac<value_t>(9, 1000)}, {t1, frac<value_t>(1, 1000)}, {exl, frac<value_t>(99, 100)}});
    m.mdp.add_action(t1, "loop", {{t1, value_t(1)}});
    m.enter_right = {enr};
    m.exit_right = {exr};
    m.exit_left = {exl};
    return m;
}

// collapsing-error pair: nondeterministic two-exit splitter
template <typename value_t>
OpenMdp<value_t> split_a() {
    OpenMdp<value_t> m;
    auto enr = m.mdp.add_state("enr1");
    auto exr1 = m.mdp.add_state("exr1");
    auto exr2 = m.mdp.add_state("exr2");
    m.mdp.add_action(enr, "a", {{exr1, value_t(1)}});
    m.mdp.add_action(enr, "b", {{exr2, value_t(1)}});
    m.enter_right = {enr};
    m.exit_right = {exr1, exr2};
    return m;
}

// collapsing-error pair: both entrances merge into the single exit
template <typename value_t>
OpenMdp<value_t> merge_b() {
    OpenMdp<value_t> m;
    auto enr1 = m.mdp.add_state("enr1");
    auto enr2 = m.mdp.add_state("enr2");
    auto exr = m.mdp.add_state("exr1");
    m.mdp.add_action(enr1, "go", {{exr, value_t(1)}});
    m.mdp.add_action(enr2, "go", {{exr, value_t(1)}});
    m.enter_right = {enr1, enr2};
    m.exit_right = {exr};
    return m;
}

// identity wire: one rightward entrance hits one rightward exit with probability one
template <typename value_t>
OpenMdp<value_t> id_omdp() {
    OpenMdp<value_t> m;
    auto en = m.mdp.add_state("en");
    auto ex = m.mdp.add_state("ex");
    m.mdp.add_action(en, "go", {{ex, value_t(1)}});
    m.enter_right = {en};
    m.exit_right = {ex};
    return m;
}

}  // namespace sdmc::fixtures
