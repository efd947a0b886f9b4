#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdmc/diagram.hpp"

namespace sdmc {

// deterministic cross-platform generator state for seeded placement
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }
};

// grid room with imprecise movement; defaults follow the safe/calm variant
struct RoomSpec {
    int side = 7;
    bool unsafe = false;      // more holes
    bool windy = false;       // more slip
    int slip_permille = -1;   // -1: derived from windy (calm 100, windy 300)
    int hole_permille = -1;   // -1: derived from unsafe (safe 20, unsafe 80)
    std::uint64_t seed = 0;

    int slip() const { return slip_permille >= 0 ? slip_permille : (windy ? 300 : 100); }
    int holes() const { return hole_permille >= 0 ? hole_permille : (unsafe ? 80 : 20); }
};

// which door channels a room exposes; "in" spawns an entrance, "out" an exit
struct RoomDoors {
    bool w_in = true, w_out = true;
    bool e_in = true, e_out = true;
    bool n_in = true, n_out = true;
    bool s_in = true, s_out = true;
};

// round-based dice game: pick one of the biased dice each round, bands on the
// final score decide the exit taken
struct DieFace {
    int delta;
    long num, den;
};

struct DiceSpec {
    int rounds = 100;
    int score_max = 100;
    std::vector<std::vector<DieFace>> dice;          // empty: three skewed +-{1,2,3}
    std::vector<std::pair<int, int>> bands;          // empty: equal split into exit_count
    int exit_count = 2;

    std::vector<std::vector<DieFace>> dice_or_default() const {
        if (!dice.empty()) return dice;
        return {{{+1, 11, 20}, {-1, 9, 20}},
                {{+2, 13, 25}, {-2, 12, 25}},
                {{+3, 51, 100}, {-3, 49, 100}}};
    }

    std::vector<std::pair<int, int>> bands_or_default() const {
        if (!bands.empty()) return bands;
        std::vector<std::pair<int, int>> out;
        const int width = (score_max + 1) / exit_count;
        int lo = 0;
        for (int k = 0; k < exit_count; ++k) {
            const int hi = k + 1 == exit_count ? score_max : lo + width - 1;
            out.push_back({lo, hi});
            lo = hi + 1;
        }
        return out;
    }
};

template <typename value_t>
struct GeneratedDiagram {
    DiagramPtr diagram;
    ModelTable<value_t> models;
};

// ---------------------------------------------------------------------------
// room generator

template <typename value_t>
OpenMdp<value_t> gen_room(const RoomSpec &spec, const RoomDoors &doors = {}) {
    const int n = spec.side;
    if (n < 3 || n % 2 == 0) throw model_error("room side must be odd and at least 3");
    const int mid = n / 2;
    const value_t slip = value_t(spec.slip()) / value_t(1000);
    const value_t keep = value_t(1) - slip;
    const value_t lateral = slip / value_t(2);

    // door cell positions (row, col); row 0 is the north edge
    const std::pair<int, int> door_cell[4] = {
        {0, mid},      // north
        {mid, n - 1},  // east
        {n - 1, mid},  // south
        {mid, 0},      // west
    };
    const bool door_out[4] = {doors.n_out, doors.e_out, doors.s_out, doors.w_out};
    const bool door_in[4] = {doors.n_in, doors.e_in, doors.s_in, doors.w_in};
    // first interior cell behind each door
    const std::pair<int, int> door_inside[4] = {{1, mid}, {mid, n - 2}, {n - 2, mid}, {mid, 1}};

    auto door_at = [&](int r, int c) {
        for (int d = 0; d < 4; ++d)
            if (door_cell[d] == std::make_pair(r, c)) return d;
        return -1;
    };

    // seeded hole placement; doors and their inside cells stay clear
    std::vector<std::pair<int, int>> candidates;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            if (door_at(r, c) >= 0) continue;
            bool shielded = false;
            for (int d = 0; d < 4; ++d)
                if (door_inside[d] == std::make_pair(r, c)) shielded = true;
            if (!shielded) candidates.push_back({r, c});
        }
    SplitMix64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + 0x5bd1e995);
    const std::size_t hole_count = candidates.size() * spec.holes() / 1000;
    std::vector<bool> is_hole_cell(n * n, false);
    for (std::size_t h = 0; h < hole_count && !candidates.empty(); ++h) {
        const std::size_t pick = rng.below(candidates.size());
        is_hole_cell[candidates[pick].first * n + candidates[pick].second] = true;
        candidates.erase(candidates.begin() + pick);
    }

    OpenMdp<value_t> room;
    std::vector<state_t> cell_state(n * n, -1);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const int d = door_at(r, c);
            if (d >= 0 && !door_out[d]) continue;  // wall from the inside
            cell_state[r * n + c] =
                room.mdp.add_state("c" + std::to_string(r) + "_" + std::to_string(c));
        }
    const state_t sink = room.mdp.add_state("dead");
    room.mdp.add_action(sink, "loop", {{sink, value_t(1)}});

    // entrances are fresh states injecting just inside each in-door
    state_t entrance_state[4] = {-1, -1, -1, -1};
    const char *door_name[4] = {"n", "e", "s", "w"};
    for (int d = 0; d < 4; ++d) {
        if (!door_in[d]) continue;
        entrance_state[d] = room.mdp.add_state(std::string("in_") + door_name[d]);
        const state_t target = cell_state[door_inside[d].first * n + door_inside[d].second];
        room.mdp.add_action(entrance_state[d], "enter", {{target, value_t(1)}});
    }

    // movement: succeed with 1 - slip, deviate laterally with slip/2 each;
    // walls bounce back to the current cell
    const int dr[4] = {-1, 0, 1, 0};  // n, e, s, w
    const int dc[4] = {0, 1, 0, -1};
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const state_t s = cell_state[r * n + c];
            if (s < 0) continue;
            const int here = door_at(r, c);
            if (here >= 0) continue;  // door cells are exits (terminals)
            if (is_hole_cell[r * n + c]) {
                room.mdp.add_action(s, "fall", {{sink, value_t(1)}});
                continue;
            }
            auto landing = [&](int rr, int cc) -> state_t {
                if (rr < 0 || rr >= n || cc < 0 || cc >= n) return s;  // outer wall
                const state_t t = cell_state[rr * n + cc];
                return t < 0 ? s : t;  // doorless door cell acts as a wall
            };
            for (int d = 0; d < 4; ++d) {
                std::vector<value_t> mass(room.mdp.num_states(), value_t(0));
                mass[landing(r + dr[d], c + dc[d])] += keep;
                const int left = (d + 3) % 4, right = (d + 1) % 4;
                mass[landing(r + dr[left], c + dc[left])] += lateral;
                mass[landing(r + dr[right], c + dc[right])] += lateral;
                Dist<value_t> dist;
                for (state_t t = 0; t < room.mdp.num_states(); ++t)
                    if (!(mass[t] == value_t(0))) dist.emplace_back(t, mass[t]);
                room.mdp.add_action(s, door_name[d], std::move(dist));
            }
        }
    }

    // open-end orders: rightward entrances W, N, S; leftward entrance E;
    // rightward exits E, N, S; leftward exit W
    if (doors.w_in) room.enter_right.push_back(entrance_state[3]);
    if (doors.n_in) room.enter_right.push_back(entrance_state[0]);
    if (doors.s_in) room.enter_right.push_back(entrance_state[2]);
    if (doors.e_in) room.enter_left.push_back(entrance_state[1]);
    if (doors.e_out) room.exit_right.push_back(cell_state[door_cell[1].first * n + door_cell[1].second]);
    if (doors.n_out) room.exit_right.push_back(cell_state[door_cell[0].first * n + door_cell[0].second]);
    if (doors.s_out) room.exit_right.push_back(cell_state[door_cell[2].first * n + door_cell[2].second]);
    if (doors.w_out) room.exit_left.push_back(cell_state[door_cell[3].first * n + door_cell[3].second]);
    return room;
}

// ---------------------------------------------------------------------------
// dice generator

template <typename value_t>
OpenMdp<value_t> gen_dice(const DiceSpec &spec) {
    const auto dice = spec.dice_or_default();
    const auto bands = spec.bands_or_default();
    // bands must partition [0, score_max]
    int expect = 0;
    for (const auto &[lo, hi] : bands) {
        if (lo != expect || hi < lo || hi > spec.score_max) throw model_error("malformed score bands");
        expect = hi + 1;
    }
    if (expect != spec.score_max + 1) throw model_error("malformed score bands");
    if (spec.rounds < 1) throw model_error("dice game needs at least one round");

    OpenMdp<value_t> game;
    // states (round, score), reachable slice only, interned in scan order
    std::vector<state_t> id((spec.rounds + 1) * (spec.score_max + 1), -1);
    auto intern = [&](int round, int score) {
        auto &slot = id[round * (spec.score_max + 1) + score];
        if (slot < 0)
            slot = game.mdp.add_state("r" + std::to_string(round) + "s" + std::to_string(score));
        return slot;
    };
    std::vector<state_t> band_exit;
    auto band_of = [&](int score) {
        for (std::size_t k = 0; k < bands.size(); ++k)
            if (score >= bands[k].first && score <= bands[k].second) return k;
        throw model_error("score outside every band");
    };

    const state_t start = intern(0, 0);
    std::vector<std::pair<int, int>> frontier{{0, 0}};
    std::vector<bool> seen((spec.rounds + 1) * (spec.score_max + 1), false);
    seen[0] = true;
    while (!frontier.empty()) {
        auto [round, score] = frontier.back();
        frontier.pop_back();
        const state_t s = intern(round, score);
        if (round == spec.rounds) continue;  // band transition added afterwards
        for (std::size_t d = 0; d < dice.size(); ++d) {
            std::vector<std::pair<int, value_t>> outcomes;
            for (const auto &face : dice[d]) {
                int next = score + face.delta;
                next = std::max(0, std::min(spec.score_max, next));  // clamp
                bool merged = false;
                for (auto &[other, p] : outcomes)
                    if (other == next) {
                        p += value_t(face.num) / value_t(face.den);
                        merged = true;
                    }
                if (!merged) outcomes.push_back({next, value_t(face.num) / value_t(face.den)});
            }
            Dist<value_t> dist;
            for (const auto &[next, p] : outcomes) {
                const state_t t = intern(round + 1, next);
                dist.emplace_back(t, p);
                if (!seen[(round + 1) * (spec.score_max + 1) + next]) {
                    seen[(round + 1) * (spec.score_max + 1) + next] = true;
                    frontier.push_back({round + 1, next});
                }
            }
            game.mdp.add_action(s, "die" + std::to_string(d), std::move(dist));
        }
    }
    for (std::size_t k = 0; k < bands.size(); ++k)
        band_exit.push_back(game.mdp.add_state("band" + std::to_string(k)));
    for (int score = 0; score <= spec.score_max; ++score) {
        const state_t s = id[spec.rounds * (spec.score_max + 1) + score];
        if (s < 0) continue;
        game.mdp.add_action(s, "band", {{band_exit[band_of(score)], value_t(1)}});
    }
    game.enter_right = {start};
    game.exit_right = band_exit;
    return game;
}

// ---------------------------------------------------------------------------
// wiring helpers: pure Dirac routers used by the grid and chain diagrams

// route[i] is the exit fed by entrance i; both use the rightward-then-leftward
// enumeration determined by the four counts
template <typename value_t>
OpenMdp<value_t> wire_omdp(int in_r, int in_l, int out_r, int out_l, const std::vector<int> &route) {
    OpenMdp<value_t> w;
    const int n_in = in_r + in_l, n_out = out_r + out_l;
    if (static_cast<int>(route.size()) != n_in) throw model_error("wire route size mismatch");
    for (int i = 0; i < n_in; ++i) w.mdp.add_state("wi" + std::to_string(i));
    for (int j = 0; j < n_out; ++j) w.mdp.add_state("wo" + std::to_string(j));
    for (int i = 0; i < n_in; ++i) {
        if (route[i] < 0 || route[i] >= n_out) throw model_error("wire route target out of range");
        w.mdp.add_action(i, "wire", {{static_cast<state_t>(n_in + route[i]), value_t(1)}});
    }
    for (int i = 0; i < in_r; ++i) w.enter_right.push_back(i);
    for (int i = 0; i < in_l; ++i) w.enter_left.push_back(in_r + i);
    for (int j = 0; j < out_r; ++j) w.exit_right.push_back(n_in + j);
    for (int j = 0; j < out_l; ++j) w.exit_left.push_back(n_in + out_r + j);
    return w;
}

namespace benchdetail {

inline std::string room_key(int col, int row, int n) {
    // positions collapse to corner/edge/interior classes so identical rooms share one model
    auto cls = [&](int x) { return x == 1 ? 0 : (x == n ? 2 : 1); };
    return "room_c" + std::to_string(cls(col)) + "r" + std::to_string(cls(row));
}

}  // namespace benchdetail

// ---------------------------------------------------------------------------
// grid diagrams

// unidirectional N x N grid: doors east and north only, goal leaving (N,N)
template <typename value_t>
GeneratedDiagram<value_t> gen_unigrid(int n, const RoomSpec &leaf) {
    if (n < 1) throw model_error("grid size must be positive");
    GeneratedDiagram<value_t> out;
    auto doors_for = [&](int col, int row) {
        RoomDoors d;
        d.w_in = col > 1 || (col == 1 && row == 1);
        d.w_out = false;
        d.e_out = col < n || (col == n && row == n);
        d.e_in = false;
        d.n_out = row < n;
        d.n_in = false;
        d.s_in = row > 1;
        d.s_out = false;
        return d;
    };
    // one model per position class
    for (int col = 1; col <= n; ++col)
        for (int row = 1; row <= n; ++row) {
            const std::string key = benchdetail::room_key(col, row, n);
            if (!out.models.count(key)) out.models[key] = gen_room<value_t>(leaf, doors_for(col, row));
        }

    std::vector<DiagramPtr> columns;
    for (int col = 1; col <= n; ++col) {
        std::vector<DiagramPtr> rooms;
        // stack rightward-entrance order: per room, W then S
        std::vector<std::string> stack_in, stack_out;
        for (int row = 1; row <= n; ++row) {
            rooms.push_back(DiagramNode::leaf(benchdetail::room_key(col, row, n)));
            const auto d = doors_for(col, row);
            if (d.w_in) stack_in.push_back("w" + std::to_string(row));
            if (d.s_in) stack_in.push_back("s" + std::to_string(row));
            if (d.e_out) stack_out.push_back("e" + std::to_string(row));
            if (d.n_out) stack_out.push_back("n" + std::to_string(row));
        }
        // desired outer order: externals by row, then the vertical loop channels
        std::vector<std::string> outer_in, outer_out;
        for (int row = 1; row <= n; ++row)
            if (doors_for(col, row).w_in) outer_in.push_back("w" + std::to_string(row));
        for (int row = 1; row < n; ++row) outer_in.push_back("s" + std::to_string(row + 1));
        for (int row = 1; row <= n; ++row)
            if (doors_for(col, row).e_out) outer_out.push_back("e" + std::to_string(row));
        for (int row = 1; row < n; ++row) outer_out.push_back("n" + std::to_string(row));

        auto route_of = [](const std::vector<std::string> &from, const std::vector<std::string> &to) {
            std::vector<int> route(from.size());
            for (std::size_t i = 0; i < from.size(); ++i) {
                auto it = std::find(to.begin(), to.end(), from[i]);
                if (it == to.end()) throw model_error("channel bookkeeping mismatch");
                route[i] = static_cast<int>(it - to.begin());
            }
            return route;
        };
        // P1: outer_in -> stack_in; P2: stack_out -> outer_out
        const std::string p1_key = "uniwire_in_c" + std::to_string(col == 1 ? 1 : (col == n ? 3 : 2)) +
                                   "_n" + std::to_string(n);
        const std::string p2_key = "uniwire_out_c" + std::to_string(col == 1 ? 1 : (col == n ? 3 : 2)) +
                                   "_n" + std::to_string(n);
        if (!out.models.count(p1_key))
            out.models[p1_key] = wire_omdp<value_t>(static_cast<int>(outer_in.size()), 0,
                                                    static_cast<int>(stack_in.size()), 0,
                                                    route_of(outer_in, stack_in));
        if (!out.models.count(p2_key))
            out.models[p2_key] = wire_omdp<value_t>(static_cast<int>(stack_out.size()), 0,
                                                    static_cast<int>(outer_out.size()), 0,
                                                    route_of(stack_out, outer_out));
        auto column = DiagramNode::seq(
            {DiagramNode::leaf(p1_key), DiagramNode::sum(rooms), DiagramNode::leaf(p2_key)});
        columns.push_back(n > 1 ? DiagramNode::trace(column, n - 1) : column);
    }
    out.diagram = columns.size() == 1 ? columns[0] : DiagramNode::seq(columns);
    return out;
}

// bidirectional N x N grid: every internal door works both ways
template <typename value_t>
GeneratedDiagram<value_t> gen_bigrid(int n, const RoomSpec &leaf) {
    if (n < 1) throw model_error("grid size must be positive");
    GeneratedDiagram<value_t> out;
    auto doors_for = [&](int col, int row) {
        RoomDoors d;
        d.w_in = col > 1 || (col == 1 && row == 1);
        d.w_out = col > 1;
        d.e_out = col < n || (col == n && row == n);
        d.e_in = col < n;
        d.n_out = row < n;
        d.n_in = row < n;
        d.s_out = row > 1;
        d.s_in = row > 1;
        return d;
    };
    for (int col = 1; col <= n; ++col)
        for (int row = 1; row <= n; ++row) {
            const std::string key = "bi" + benchdetail::room_key(col, row, n);
            if (!out.models.count(key)) out.models[key] = gen_room<value_t>(leaf, doors_for(col, row));
        }

    std::vector<DiagramPtr> columns;
    for (int col = 1; col <= n; ++col) {
        std::vector<DiagramPtr> rooms;
        std::vector<std::string> stack_in, stack_out;
        int stack_in_l = 0, stack_out_l = 0;
        for (int row = 1; row <= n; ++row) {
            rooms.push_back(DiagramNode::leaf("bi" + benchdetail::room_key(col, row, n)));
            const auto d = doors_for(col, row);
            if (d.w_in) stack_in.push_back("w" + std::to_string(row));
            if (d.n_in) stack_in.push_back("n" + std::to_string(row));
            if (d.s_in) stack_in.push_back("s" + std::to_string(row));
            if (d.e_out) stack_out.push_back("e" + std::to_string(row));
            if (d.n_out) stack_out.push_back("nu" + std::to_string(row));
            if (d.s_out) stack_out.push_back("sd" + std::to_string(row));
            if (d.e_in) ++stack_in_l;
            if (d.w_out) ++stack_out_l;
        }
        // outer rightward order: externals by row, then up channels, then down channels
        std::vector<std::string> outer_in, outer_out;
        for (int row = 1; row <= n; ++row)
            if (doors_for(col, row).w_in) outer_in.push_back("w" + std::to_string(row));
        for (int row = 1; row < n; ++row) outer_in.push_back("s" + std::to_string(row + 1));
        for (int row = 1; row < n; ++row) outer_in.push_back("n" + std::to_string(row));
        for (int row = 1; row <= n; ++row)
            if (doors_for(col, row).e_out) outer_out.push_back("e" + std::to_string(row));
        for (int row = 1; row < n; ++row) outer_out.push_back("nu" + std::to_string(row));
        for (int row = 1; row < n; ++row) outer_out.push_back("sd" + std::to_string(row + 1));
        auto route_of = [](const std::vector<std::string> &from, const std::vector<std::string> &to) {
            std::vector<int> route(from.size());
            for (std::size_t i = 0; i < from.size(); ++i) {
                auto it = std::find(to.begin(), to.end(), from[i]);
                if (it == to.end()) throw model_error("channel bookkeeping mismatch");
                route[i] = static_cast<int>(it - to.begin());
            }
            return route;
        };
        // trace pairing: up channel r couples n_out(r) -> s_in(r+1); down channel
        // couples s_out(r+1) -> n_in(r); both live at the tail of the lists
        const int cls = col == 1 ? 1 : (col == n ? 3 : 2);
        const std::string p1_key = "biwire_in_c" + std::to_string(cls) + "_n" + std::to_string(n);
        const std::string p2_key = "biwire_out_c" + std::to_string(cls) + "_n" + std::to_string(n);
        // leftward channels pass straight through the wire leaves
        std::vector<int> p1_route = route_of(outer_in, stack_in);
        std::vector<int> p2_route = route_of(stack_out, outer_out);
        const int p1_l = stack_out_l;  // w_out channels flowing left through P1
        const int p2_l = stack_in_l;   // e_in channels flowing left through P2
        for (int i = 0; i < p1_l; ++i) p1_route.push_back(static_cast<int>(stack_in.size()) + i);
        for (int i = 0; i < p2_l; ++i) p2_route.push_back(static_cast<int>(outer_out.size()) + i);
        if (!out.models.count(p1_key))
            out.models[p1_key] =
                wire_omdp<value_t>(static_cast<int>(outer_in.size()), p1_l,
                                   static_cast<int>(stack_in.size()), p1_l, p1_route);
        if (!out.models.count(p2_key))
            out.models[p2_key] =
                wire_omdp<value_t>(static_cast<int>(stack_out.size()), p2_l,
                                   static_cast<int>(outer_out.size()), p2_l, p2_route);
        auto column = DiagramNode::seq(
            {DiagramNode::leaf(p1_key), DiagramNode::sum(rooms), DiagramNode::leaf(p2_key)});
        columns.push_back(n > 1 ? DiagramNode::trace(column, 2 * (n - 1)) : column);
    }
    out.diagram = columns.size() == 1 ? columns[0] : DiagramNode::seq(columns);
    return out;
}

// ---------------------------------------------------------------------------
// chain with a loop-back exit

// stages run left to right through exit "continue"; goal exits merge into one
// channel; after the last stage the continue channel loops back to the start
template <typename value_t>
GeneratedDiagram<value_t> gen_chain(int n, const std::string &leaf_name, OpenMdp<value_t> leaf) {
    if (n < 1) throw model_error("chain length must be positive");
    const Arity arity = leaf.arity();
    if (arity.right_in != 1 || arity.left_out != 0 || arity.right_out != 2 || arity.left_in != 0)
        throw model_error("chain leaf must have arity (1,0)->(2,0): continue then goal");
    GeneratedDiagram<value_t> out;
    out.models[leaf_name] = std::move(leaf);
    out.models["merge2"] = wire_omdp<value_t>(2, 0, 1, 0, {0, 0});
    out.models["id1"] = wire_omdp<value_t>(1, 0, 1, 0, {0});
    out.models["swap2"] = wire_omdp<value_t>(2, 0, 2, 0, {1, 0});

    // entry merge: [external start, loop-back] into the first stage
    std::vector<DiagramPtr> parts{DiagramNode::leaf("merge2"), DiagramNode::leaf(leaf_name)};
    for (int stage = 2; stage <= n; ++stage) {
        // channels [continue, goal-so-far] -> leaf continues, goals accumulate
        parts.push_back(
            DiagramNode::sum({DiagramNode::leaf(leaf_name), DiagramNode::leaf("id1")}));
        parts.push_back(
            DiagramNode::sum({DiagramNode::leaf("id1"), DiagramNode::leaf("merge2")}));
    }
    // order exits [goal, continue] so the loop channel is the traced one
    parts.push_back(DiagramNode::leaf("swap2"));
    out.diagram = DiagramNode::trace(DiagramNode::seq(parts), 1);
    return out;
}

// room variant for chains: west in, east out as "continue", north out as "goal"
template <typename value_t>
OpenMdp<value_t> gen_chain_room(const RoomSpec &spec) {
    RoomDoors doors;
    doors.w_in = true;
    doors.w_out = false;
    doors.e_in = false;
    doors.e_out = true;
    doors.n_in = false;
    doors.n_out = true;
    doors.s_in = false;
    doors.s_out = false;
    return gen_room<value_t>(spec, doors);
}

// dice variant for chains: band 0 continues, band 1 is the goal
template <typename value_t>
OpenMdp<value_t> gen_chain_dice(DiceSpec spec) {
    spec.exit_count = 2;
    spec.bands.clear();
    return gen_dice<value_t>(spec);
}

}  // namespace sdmc
