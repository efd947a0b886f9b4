#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "sdmc/benchgen.hpp"
#include "sdmc/compositional.hpp"
#include "sdmc/diagram.hpp"

namespace sdmc {

struct parse_error : model_error {
    using model_error::model_error;
};

template <typename value_t>
struct Document {
    ModelTable<value_t> models;
    DiagramPtr root;
    std::string root_name;
};

namespace io_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string &path, const std::string &what) {
    throw parse_error(what + " at " + path);
}

template <typename value_t>
value_t parse_probability(const json &j, const std::string &path) {
    std::string text;
    if (j.is_string())
        text = j.get<std::string>();
    else if (j.is_number_integer())
        text = std::to_string(j.get<long>());
    else if (j.is_number())
        fail(path, "probabilities must be strings (exact parsing); got a float literal");
    else
        fail(path, "probability must be a string like \"0.27\" or \"27/100\"");
    auto q = parse_rational(text);
    if (!q) fail(path, "malformed probability '" + text + "'");
    if (*q < 0 || *q > 1) fail(path, "probability '" + text + "' outside [0,1]");
    if constexpr (number_traits<value_t>::exact)
        return *q;
    else
        return q->get_d();
}

inline RoomSpec parse_room_spec(const json &j, const std::string &path) {
    RoomSpec spec;
    if (j.contains("side")) spec.side = j.at("side").get<int>();
    if (j.contains("unsafe")) spec.unsafe = j.at("unsafe").get<bool>();
    if (j.contains("windy")) spec.windy = j.at("windy").get<bool>();
    if (j.contains("slip_permille")) spec.slip_permille = j.at("slip_permille").get<int>();
    if (j.contains("hole_permille")) spec.hole_permille = j.at("hole_permille").get<int>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    (void)path;
    return spec;
}

inline DiceSpec parse_dice_spec(const json &j, const std::string &path) {
    DiceSpec spec;
    if (j.contains("rounds")) spec.rounds = j.at("rounds").get<int>();
    if (j.contains("score_max")) spec.score_max = j.at("score_max").get<int>();
    if (j.contains("exits")) spec.exit_count = j.at("exits").get<int>();
    if (j.contains("bands")) {
        for (const auto &b : j.at("bands"))
            spec.bands.push_back({b.at(0).get<int>(), b.at(1).get<int>()});
    }
    if (j.contains("dice")) {
        for (const auto &die : j.at("dice")) {
            std::vector<DieFace> faces;
            for (const auto &f : die) {
                auto q = parse_rational(f.at("p").get<std::string>());
                if (!q) fail(path, "malformed die probability");
                faces.push_back(DieFace{f.at("delta").get<int>(), static_cast<long>(q->get_num().get_si()),
                                        static_cast<long>(q->get_den().get_si())});
            }
            spec.dice.push_back(std::move(faces));
        }
    }
    return spec;
}

template <typename value_t>
OpenMdp<value_t> parse_explicit_model(const json &j, const std::string &path) {
    OpenMdp<value_t> m;
    std::map<std::string, state_t> state_of;
    if (!j.contains("states")) fail(path, "missing 'states'");
    for (const auto &s : j.at("states")) {
        const std::string name = s.get<std::string>();
        if (state_of.count(name)) fail(path + ".states", "duplicate state '" + name + "'");
        state_of[name] = m.mdp.add_state(name);
    }
    auto lookup = [&](const json &list, std::vector<state_t> &out, const char *field) {
        if (!j.contains(field)) return;
        for (const auto &s : list) {
            auto it = state_of.find(s.get<std::string>());
            if (it == state_of.end())
                fail(path + "." + field, "unknown state '" + s.get<std::string>() + "'");
            out.push_back(it->second);
        }
    };
    if (j.contains("entrances_right")) lookup(j.at("entrances_right"), m.enter_right, "entrances_right");
    if (j.contains("entrances_left")) lookup(j.at("entrances_left"), m.enter_left, "entrances_left");
    if (j.contains("exits_right")) lookup(j.at("exits_right"), m.exit_right, "exits_right");
    if (j.contains("exits_left")) lookup(j.at("exits_left"), m.exit_left, "exits_left");
    if (j.contains("transitions")) {
        for (const auto &[state_name, actions] : j.at("transitions").items()) {
            auto it = state_of.find(state_name);
            if (it == state_of.end())
                fail(path + ".transitions", "unknown state '" + state_name + "'");
            for (const auto &[action_name, dist] : actions.items()) {
                Dist<value_t> d;
                for (const auto &[target_name, prob] : dist.items()) {
                    auto target = state_of.find(target_name);
                    if (target == state_of.end())
                        fail(path + ".transitions." + state_name + "." + action_name,
                             "unknown state '" + target_name + "'");
                    d.emplace_back(target->second,
                                   parse_probability<value_t>(prob, path + ".transitions." + state_name +
                                                                        "." + action_name + "." +
                                                                        target_name));
                }
                m.mdp.add_action(it->second, action_name, std::move(d));
            }
        }
    }
    return m;
}

template <typename value_t>
void parse_model(const std::string &name, const json &j, ModelTable<value_t> &models,
                 const std::string &path) {
    if (j.contains("generator")) {
        const std::string kind = j.at("generator").get<std::string>();
        if (kind == "room")
            models[name] = gen_room<value_t>(parse_room_spec(j, path));
        else if (kind == "chain_room")
            models[name] = gen_chain_room<value_t>(parse_room_spec(j, path));
        else if (kind == "dice")
            models[name] = gen_dice<value_t>(parse_dice_spec(j, path));
        else if (kind == "chain_dice")
            models[name] = gen_chain_dice<value_t>(parse_dice_spec(j, path));
        else
            fail(path, "unknown model generator '" + kind + "'");
        return;
    }
    models[name] = parse_explicit_model<value_t>(j, path);
}

// terms: a string reference, {"seq": [...]}, {"sum": [...]},
// {"trace": {"term": t, "k": n}}, or a diagram generator stanza
template <typename value_t>
DiagramPtr parse_term(const json &j, const json &terms, ModelTable<value_t> &models,
                      std::set<std::string> &visiting, const std::string &path);

template <typename value_t>
DiagramPtr parse_term_ref(const std::string &name, const json &terms, ModelTable<value_t> &models,
                          std::set<std::string> &visiting, const std::string &path) {
    if (models.count(name)) return DiagramNode::leaf(name);
    if (terms.contains(name)) {
        if (visiting.count(name)) fail(path, "cyclic term reference '" + name + "'");
        visiting.insert(name);
        auto node = parse_term(terms.at(name), terms, models, visiting, "terms." + name);
        visiting.erase(name);
        return node;
    }
    fail(path, "unknown reference '" + name + "'");
}

template <typename value_t>
DiagramPtr parse_term(const json &j, const json &terms, ModelTable<value_t> &models,
                      std::set<std::string> &visiting, const std::string &path) {
    if (j.is_string()) return parse_term_ref(j.get<std::string>(), terms, models, visiting, path);
    if (!j.is_object()) fail(path, "term must be a string or an object");
    if (j.contains("seq") || j.contains("sum")) {
        const bool is_seq = j.contains("seq");
        std::vector<DiagramPtr> children;
        const auto &list = j.at(is_seq ? "seq" : "sum");
        if (!list.is_array() || list.empty()) fail(path, "composition needs a nonempty array");
        for (std::size_t i = 0; i < list.size(); ++i)
            children.push_back(parse_term(list.at(i), terms, models, visiting,
                                          path + (is_seq ? ".seq[" : ".sum[") + std::to_string(i) + "]"));
        return is_seq ? DiagramNode::seq(std::move(children)) : DiagramNode::sum(std::move(children));
    }
    if (j.contains("trace")) {
        const auto &t = j.at("trace");
        return DiagramNode::trace(parse_term(t.at("term"), terms, models, visiting, path + ".trace"),
                                  t.at("k").get<int>());
    }
    if (j.contains("generator")) {
        const std::string kind = j.at("generator").get<std::string>();
        GeneratedDiagram<value_t> gen;
        if (kind == "unigrid")
            gen = gen_unigrid<value_t>(j.at("n").get<int>(), parse_room_spec(j.value("leaf", json::object()), path));
        else if (kind == "bigrid")
            gen = gen_bigrid<value_t>(j.at("n").get<int>(), parse_room_spec(j.value("leaf", json::object()), path));
        else if (kind == "chain") {
            const std::string leaf_name = j.at("leaf").get<std::string>();
            if (!models.count(leaf_name)) fail(path, "chain leaf model '" + leaf_name + "' not defined");
            gen = gen_chain<value_t>(j.at("n").get<int>(), leaf_name, models.at(leaf_name));
        } else
            fail(path, "unknown diagram generator '" + kind + "'");
        for (auto &[name, model] : gen.models) models[name] = std::move(model);
        return gen.diagram;
    }
    fail(path, "unrecognized term shape");
}

}  // namespace io_detail

// parse a diagram document; probabilities come in as decimal or p/q strings and
// are converted into the active engine without a double round-trip
template <typename value_t>
Document<value_t> parse_document(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw parse_error(std::string("syntax error: ") + e.what());
    }
    try {
        Document<value_t> doc;
        if (j.contains("format_version") && j.at("format_version").get<int>() != 1)
            io_detail::fail("format_version", "unsupported format version");
        if (j.contains("models"))
            for (const auto &[name, body] : j.at("models").items())
                io_detail::parse_model<value_t>(name, body, doc.models, "models." + name);
        if (!j.contains("root")) io_detail::fail("root", "no root");
        doc.root_name = j.at("root").get<std::string>();
        std::set<std::string> visiting;
        const auto terms = j.contains("terms") ? j.at("terms") : nlohmann::json::object();
        doc.root =
            io_detail::parse_term_ref<value_t>(doc.root_name, terms, doc.models, visiting, "root");
        type_check(doc.root, doc.models);
        return doc;
    } catch (const nlohmann::json::exception &e) {
        throw parse_error(std::string("schema error: ") + e.what());
    }
}

// canonical printing: explicit models, exact probability strings, inline root
template <typename value_t>
std::string print_document(const Document<value_t> &doc) {
    using nlohmann::ordered_json;
    ordered_json out;
    out["format_version"] = 1;
    ordered_json models = ordered_json::object();
    for (const auto &[name, m] : doc.models) {
        ordered_json body;
        ordered_json states = ordered_json::array();
        for (state_t s = 0; s < m.mdp.num_states(); ++s) {
            std::string label = m.mdp.state_names[s].empty() ? "s" + std::to_string(s)
                                                             : m.mdp.state_names[s];
            states.push_back(label);
        }
        auto state_label = [&](state_t s) { return states[s].template get<std::string>(); };
        body["states"] = states;
        auto ends = [&](const std::vector<state_t> &ids) {
            ordered_json arr = ordered_json::array();
            for (state_t s : ids) arr.push_back(state_label(s));
            return arr;
        };
        body["entrances_right"] = ends(m.enter_right);
        body["entrances_left"] = ends(m.enter_left);
        body["exits_right"] = ends(m.exit_right);
        body["exits_left"] = ends(m.exit_left);
        ordered_json transitions = ordered_json::object();
        for (state_t s = 0; s < m.mdp.num_states(); ++s) {
            if (m.mdp.actions[s].empty()) continue;
            ordered_json acts = ordered_json::object();
            for (std::size_t a = 0; a < m.mdp.actions[s].size(); ++a) {
                ordered_json dist = ordered_json::object();
                for (const auto &[t, p] : m.mdp.actions[s][a].dist) {
                    if constexpr (number_traits<value_t>::exact)
                        dist[state_label(t)] = p.get_str();
                    else
                        dist[state_label(t)] = format_double(p);
                }
                std::string label = m.mdp.actions[s][a].label.empty() ? "a" + std::to_string(a)
                                                                      : m.mdp.actions[s][a].label;
                acts[label] = dist;
            }
            transitions[state_label(s)] = acts;
        }
        body["transitions"] = transitions;
        models[name] = body;
    }
    out["models"] = models;
    std::function<ordered_json(const DiagramPtr &)> term_of = [&](const DiagramPtr &node) -> ordered_json {
        switch (node->kind) {
            case DiagramNode::Kind::leaf:
                return node->leaf_name;
            case DiagramNode::Kind::trace: {
                ordered_json t;
                t["trace"] = {{"term", term_of(node->children[0])}, {"k", node->trace_count}};
                return t;
            }
            default: {
                ordered_json arr = ordered_json::array();
                for (const auto &c : node->children) arr.push_back(term_of(c));
                ordered_json t;
                t[node->kind == DiagramNode::Kind::seq ? "seq" : "sum"] = arr;
                return t;
            }
        }
    };
    out["terms"] = ordered_json::object();
    out["terms"][doc.root_name] = term_of(doc.root);
    out["root"] = doc.root_name;
    return out.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// run reports

struct RunReport {
    std::string command;
    std::string engine;  // mono | comp
    std::string arith;   // float | rational
    std::string norm;    // l2 | linf
    double eta = 0;
    double t = 0;    // total seconds
    double t_m = 0;  // model building seconds
    double error = 0;
    long vertex_total = 0;
    long cache_hits = 0, cache_misses = 0;
    std::vector<std::vector<std::vector<double>>> lower_vertices;  // per entrance
    std::vector<std::vector<std::vector<double>>> upper_vertices;
    bool converged = true;
    std::string note;
};

inline std::string emit_report(const RunReport &r) {
    using nlohmann::ordered_json;
    ordered_json out;
    out["format_version"] = 1;
    out["command"] = r.command;
    out["engine"] = r.engine;
    out["arith"] = r.arith;
    out["norm"] = r.norm;
    out["eta"] = r.eta;
    out["t"] = r.t;
    out["t_m"] = r.t_m;
    out["E"] = r.error;
    out["p"] = r.vertex_total;
    out["cache_hits"] = r.cache_hits;
    out["cache_misses"] = r.cache_misses;
    out["converged"] = r.converged;
    if (!r.note.empty()) out["note"] = r.note;
    ordered_json entrances = ordered_json::array();
    for (std::size_t i = 0; i < r.lower_vertices.size(); ++i) {
        ordered_json e;
        e["index"] = i;
        e["lower_vertices"] = r.lower_vertices[i];
        if (i < r.upper_vertices.size()) e["upper_vertices"] = r.upper_vertices[i];
        entrances.push_back(e);
    }
    out["entrances"] = entrances;
    return out.dump(2) + "\n";
}

// report-side view of a sound approximation
template <typename value_t>
void fill_report_vertices(RunReport &report, const SoundApprox<value_t> &approx, int dim_cap = 6) {
    for (const auto &ea : approx.entrances) {
        std::vector<std::vector<double>> lows;
        for (const auto &v : ea.lower.vertices()) {
            std::vector<double> row;
            for (const auto &x : v) row.push_back(number_traits<value_t>::to_double(x));
            lows.push_back(std::move(row));
        }
        report.lower_vertices.push_back(std::move(lows));
        std::vector<std::vector<double>> ups;
        if (approx.exit_count <= dim_cap) {
            for (const auto &v : ea.upper.enumerate_vertices(dim_cap)) {
                std::vector<double> row;
                for (const auto &x : v) row.push_back(number_traits<value_t>::to_double(x));
                ups.push_back(std::move(row));
            }
        }
        report.upper_vertices.push_back(std::move(ups));
    }
    report.vertex_total = vertex_count(approx);
}

// minimal SVG polyline plot of a 2-D lower curve
template <typename value_t>
std::string curve_svg(std::vector<Point<value_t>> verts) {
    std::sort(verts.begin(), verts.end(),
              [](const auto &a, const auto &b) { return a[0] > b[0]; });
    const int w = 420, h = 420, margin = 40;
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    svg << "<rect width='" << w << "' height='" << h << "' fill='white'/>\n";
    svg << "<line x1='" << margin << "' y1='" << h - margin << "' x2='" << w - margin << "' y2='"
        << h - margin << "' stroke='black'/>\n";
    svg << "<line x1='" << margin << "' y1='" << h - margin << "' x2='" << margin << "' y2='" << margin
        << "' stroke='black'/>\n";
    auto sx = [&](double x) { return margin + x * (w - 2 * margin); };
    auto sy = [&](double y) { return h - margin - y * (h - 2 * margin); };
    svg << "<polyline fill='none' stroke='steelblue' stroke-width='2' points='";
    for (const auto &v : verts)
        svg << sx(number_traits<value_t>::to_double(v[0])) << ","
            << sy(v.size() > 1 ? number_traits<value_t>::to_double(v[1]) : 0.0) << " ";
    svg << "'/>\n";
    for (const auto &v : verts)
        svg << "<circle cx='" << sx(number_traits<value_t>::to_double(v[0])) << "' cy='"
            << sy(v.size() > 1 ? number_traits<value_t>::to_double(v[1]) : 0.0)
            << "' r='4' fill='crimson'/>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace sdmc
