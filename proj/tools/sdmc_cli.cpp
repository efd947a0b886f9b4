// command-line driver: monolithic and compositional Pareto analyses, the
// single-exit check, benchmark generation, and side-by-side comparison

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "sdmc/model_io.hpp"

namespace {

using namespace sdmc;

struct RunConfig {
    std::string command;
    std::string input_path;
    double eta = 1e-4;
    double epsilon = 1e-4;
    std::string engine = "comp";     // mono | comp
    std::string arith = "float";     // float | rational
    std::string norm_name = "l2";    // l2 | linf
    bool no_cache = false;
    std::string out_path;
    std::string plot_path;
    std::uint64_t seed = 0;
    int jobs = 1;
    int entrance = 0;
    int exit = 0;
    std::string family;  // bench
    int n = 10;
    std::string leaf = "rms";
};

double seconds_since(const std::chrono::steady_clock::time_point &t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Norm norm_of(const RunConfig &config) { return config.norm_name == "linf" ? Norm::linf : Norm::l2; }

template <typename value_t>
value_t eta_of(const RunConfig &config) {
    if constexpr (number_traits<value_t>::exact) {
        auto q = parse_rational(format_double(config.eta));
        return q ? *q : Rational(0);
    } else {
        return config.eta;
    }
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open input file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path);
    if (!out) throw model_error("cannot write to '" + path + "'");
    out << content;
}

template <typename value_t>
void write_artifacts(const RunConfig &config, const SoundApprox<value_t> &approx) {
    if (!config.out_path.empty() && approx.exit_count <= 2 && !approx.entrances.empty()) {
        std::string csv;
        for (const auto &ea : approx.entrances) csv += vertices_to_csv(ea.lower.vertices());
        write_file(config.out_path, csv);
    }
    if (!config.plot_path.empty() && approx.exit_count == 2 && !approx.entrances.empty())
        write_file(config.plot_path, curve_svg(approx.entrances[0].lower.vertices()));
}

template <typename value_t>
double safe_error(const SoundApprox<value_t> &approx, Norm norm, RunReport &report) {
    if (approx.exit_count > 6) {
        report.note = "error metric skipped: exit count above the vertex enumeration cap";
        return -1.0;
    }
    return number_traits<value_t>::to_double(measure_error(approx, norm));
}

template <typename value_t>
int run_pareto_like(const RunConfig &config, bool monolithic) {
    const auto t0 = std::chrono::steady_clock::now();
    auto doc = parse_document<value_t>(read_file(config.input_path));
    auto model = semantics(doc.root, doc.models);
    const double t_m = seconds_since(t0);

    SolveOptions opts;
    opts.jobs = config.jobs;
    RunReport report;
    report.command = config.command;
    report.engine = monolithic ? "mono" : "comp";
    report.arith = number_traits<value_t>::name;
    report.norm = config.norm_name;
    report.eta = config.eta;
    report.t_m = t_m;

    if (monolithic || doc.root->kind == DiagramNode::Kind::leaf) {
        auto approx = approx_multiobj<value_t>(model.omdp, eta_of<value_t>(config), opts);
        report.error = safe_error(approx, norm_of(config), report);
        fill_report_vertices(report, approx);
        report.t = seconds_since(t0);
        write_artifacts(config, approx);
        std::cout << emit_report(report);
    } else {
        CurveCache<value_t> cache(!config.no_cache);
        auto entry = approx_multiobj_sd(doc.root, doc.models, eta_of<value_t>(config), cache, opts);
        report.error = safe_error(entry->approx, norm_of(config), report);
        fill_report_vertices(report, entry->approx);
        report.cache_hits = cache.hits();
        report.cache_misses = cache.misses();
        report.t = seconds_since(t0);
        write_artifacts(config, entry->approx);
        std::cout << emit_report(report);
    }
    return 0;
}

template <typename value_t>
int run_check(const RunConfig &config) {
    const auto t0 = std::chrono::steady_clock::now();
    auto doc = parse_document<value_t>(read_file(config.input_path));
    const double t_m = seconds_since(t0);
    CurveCache<value_t> cache(!config.no_cache);
    SolveOptions opts;
    opts.jobs = config.jobs;
    value_t epsilon;
    if constexpr (number_traits<value_t>::exact) {
        auto q = parse_rational(format_double(config.epsilon));
        epsilon = q ? *q : Rational(0);
    } else {
        epsilon = config.epsilon;
    }
    auto result =
        check_single_exit(doc.root, doc.models, config.entrance, config.exit, epsilon, cache, opts);
    RunReport report;
    report.command = "check";
    report.engine = "comp";
    report.arith = number_traits<value_t>::name;
    report.norm = config.norm_name;
    report.eta = number_traits<value_t>::to_double(result.eta_final);
    report.t_m = t_m;
    report.t = seconds_since(t0);
    report.converged = result.converged;
    report.cache_hits = cache.hits();
    report.cache_misses = cache.misses();
    report.error = number_traits<value_t>::to_double(result.upper - result.lower);
    if (result.entry) fill_report_vertices(report, result.entry->approx);
    std::ostringstream note;
    note << "lower=" << format_double(number_traits<value_t>::to_double(result.lower))
         << " upper=" << format_double(number_traits<value_t>::to_double(result.upper))
         << " replayed=" << format_double(number_traits<value_t>::to_double(result.replayed));
    report.note = note.str();
    std::cout << emit_report(report);
    return result.converged ? 0 : 2;
}

template <typename value_t>
int run_compare(const RunConfig &config) {
    const auto t0 = std::chrono::steady_clock::now();
    auto doc = parse_document<value_t>(read_file(config.input_path));
    auto model = semantics(doc.root, doc.models);
    const double t_m = seconds_since(t0);
    SolveOptions opts;
    opts.jobs = config.jobs;

    const auto t_mono = std::chrono::steady_clock::now();
    auto mono = approx_multiobj<value_t>(model.omdp, eta_of<value_t>(config), opts);
    const double mono_time = seconds_since(t_mono);

    const auto t_comp = std::chrono::steady_clock::now();
    CurveCache<value_t> cache(!config.no_cache);
    auto comp = approx_multiobj_sd(doc.root, doc.models, eta_of<value_t>(config), cache, opts);
    const double comp_time = seconds_since(t_comp);

    // sandwich cross-check between the two engines
    for (std::size_t i = 0; i < mono.entrances.size(); ++i) {
        for (const auto &v : mono.entrances[i].lower.vertices())
            if (!comp->approx.entrances[i].upper.contains(v))
                throw geometry_error("compare: monolithic point escapes the compositional upper set");
        for (const auto &v : comp->approx.entrances[i].lower.vertices())
            if (!mono.entrances[i].upper.contains(v))
                throw geometry_error("compare: compositional point escapes the monolithic upper set");
    }

    RunReport mono_report, comp_report;
    mono_report.command = comp_report.command = "compare";
    mono_report.engine = "mono";
    comp_report.engine = "comp";
    mono_report.arith = comp_report.arith = number_traits<value_t>::name;
    mono_report.norm = comp_report.norm = config.norm_name;
    mono_report.eta = comp_report.eta = config.eta;
    mono_report.t_m = comp_report.t_m = t_m;
    mono_report.t = mono_time;
    comp_report.t = comp_time;
    mono_report.error = safe_error(mono, norm_of(config), mono_report);
    comp_report.error = safe_error(comp->approx, norm_of(config), comp_report);
    fill_report_vertices(mono_report, mono);
    fill_report_vertices(comp_report, comp->approx);
    comp_report.cache_hits = cache.hits();
    comp_report.cache_misses = cache.misses();

    nlohmann::ordered_json out;
    out["format_version"] = 1;
    out["command"] = "compare";
    out["total_states_mono"] = model.omdp.mdp.num_states();
    out["mono"] = nlohmann::ordered_json::parse(emit_report(mono_report));
    out["comp"] = nlohmann::ordered_json::parse(emit_report(comp_report));
    out["sandwich_check"] = "ok";
    (void)t0;
    std::cout << out.dump(2) << "\n";
    return 0;
}

template <typename value_t>
int run_bench(const RunConfig &config) {
    // generate a named family instance, then run the selected engine on it
    RoomSpec room;
    room.seed = config.seed;
    if (config.leaf == "rmb") room.side = 101;
    if (config.leaf == "rms") room.side = 7;
    DiceSpec dice;

    Document<value_t> doc;
    if (config.family == "rms" || config.family == "rmb") {
        RoomSpec spec = room;
        spec.side = config.family == "rmb" ? 101 : 7;
        doc.models["room"] = gen_room<value_t>(spec);
        doc.root = DiagramNode::leaf("room");
        doc.root_name = "room";
    } else if (config.family == "dice") {
        doc.models["dice"] = gen_dice<value_t>(dice);
        doc.root = DiagramNode::leaf("dice");
        doc.root_name = "dice";
    } else if (config.family == "unigrid") {
        auto gen = gen_unigrid<value_t>(config.n, room);
        doc.models = std::move(gen.models);
        doc.root = gen.diagram;
        doc.root_name = "unigrid";
    } else if (config.family == "bigrid") {
        auto gen = gen_bigrid<value_t>(config.n, room);
        doc.models = std::move(gen.models);
        doc.root = gen.diagram;
        doc.root_name = "bigrid";
    } else if (config.family == "chain") {
        auto leaf = config.leaf == "dice" ? gen_chain_dice<value_t>(dice)
                                          : gen_chain_room<value_t>(room);
        auto gen = gen_chain<value_t>(config.n, "leaf", std::move(leaf));
        doc.models = std::move(gen.models);
        doc.root = gen.diagram;
        doc.root_name = "chain";
    } else {
        throw parse_error("unknown benchmark family '" + config.family + "'");
    }

    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    report.command = "bench";
    report.arith = number_traits<value_t>::name;
    report.norm = config.norm_name;
    report.eta = config.eta;
    SolveOptions opts;
    opts.jobs = config.jobs;
    if (config.engine == "mono") {
        auto model = semantics(doc.root, doc.models);
        report.t_m = seconds_since(t0);
        auto approx = approx_multiobj<value_t>(model.omdp, eta_of<value_t>(config), opts);
        report.engine = "mono";
        report.error = safe_error(approx, norm_of(config), report);
        fill_report_vertices(report, approx);
        report.t = seconds_since(t0);
        write_artifacts(config, approx);
        std::cout << emit_report(report);
    } else {
        report.t_m = seconds_since(t0);
        CurveCache<value_t> cache(!config.no_cache);
        auto entry = approx_multiobj_sd(doc.root, doc.models, eta_of<value_t>(config), cache, opts);
        report.engine = "comp";
        report.error = safe_error(entry->approx, norm_of(config), report);
        fill_report_vertices(report, entry->approx);
        report.cache_hits = cache.hits();
        report.cache_misses = cache.misses();
        report.t = seconds_since(t0);
        write_artifacts(config, entry->approx);
        std::cout << emit_report(report);
    }
    return 0;
}

template <typename value_t>
int dispatch(const RunConfig &config) {
    if (config.command == "pareto") return run_pareto_like<value_t>(config, false);
    if (config.command == "mono") return run_pareto_like<value_t>(config, true);
    if (config.command == "check") return run_check<value_t>(config);
    if (config.command == "compare") return run_compare<value_t>(config);
    if (config.command == "bench") return run_bench<value_t>(config);
    throw parse_error("unknown command");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"string-diagram MDP model checker"};
    app.require_subcommand(1);
    RunConfig config;

    auto add_common = [&](CLI::App *cmd, bool needs_input) {
        if (needs_input) cmd->add_option("input", config.input_path, "input JSON document")->required();
        cmd->add_option("--eta", config.eta, "target approximation gap");
        cmd->add_option("--epsilon", config.epsilon, "single-exit bracket width");
        cmd->add_option("--engine", config.engine, "mono | comp")
            ->check(CLI::IsMember({"mono", "comp"}));
        cmd->add_option("--arith", config.arith, "float | rational")
            ->check(CLI::IsMember({"float", "rational"}));
        cmd->add_option("--norm", config.norm_name, "l2 | linf")->check(CLI::IsMember({"l2", "linf"}));
        cmd->add_flag("--no-cache", config.no_cache, "disable curve caching");
        cmd->add_option("--out", config.out_path, "CSV output path for 2-D curves");
        cmd->add_option("--plot", config.plot_path, "SVG output path for 2-D curves");
        cmd->add_option("--seed", config.seed, "generator seed");
        cmd->add_option("--jobs", config.jobs, "parallel workers");
    };

    auto *pareto = app.add_subcommand("pareto", "Pareto sandwich of a single oMDP");
    add_common(pareto, true);
    auto *mono = app.add_subcommand("mono", "monolithic multi-objective baseline");
    add_common(mono, true);
    auto *check = app.add_subcommand("check", "single-exit bounds and scheduler");
    add_common(check, true);
    check->add_option("--entrance", config.entrance, "entrance index");
    check->add_option("--exit", config.exit, "exit index");
    auto *compare = app.add_subcommand("compare", "run both engines and cross-check");
    add_common(compare, true);
    auto *bench = app.add_subcommand("bench", "generate and run a benchmark family");
    add_common(bench, false);
    bench->add_option("--family", config.family, "rms | rmb | dice | unigrid | bigrid | chain")
        ->required();
    bench->add_option("-n,--size", config.n, "instance size");
    bench->add_option("--leaf", config.leaf, "leaf kind for composite families (rms | rmb | dice)");

    CLI11_PARSE(app, argc, argv);
    config.command = app.get_subcommands().front()->get_name();

    try {
        if (config.eta == 0.0 && config.arith != "rational") {
            std::cerr << "config error: eta = 0 requires --arith rational\n";
            return 1;
        }
        if (config.command == "check" && config.epsilon == 0.0 && config.arith != "rational") {
            std::cerr << "config error: epsilon = 0 requires --arith rational\n";
            return 1;
        }
        if (config.arith == "rational") return dispatch<sdmc::Rational>(config);
        return dispatch<double>(config);
    } catch (const sdmc::parse_error &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const sdmc::type_error &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const sdmc::convergence_error &e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 2;
    } catch (const sdmc::geometry_error &e) {
        std::cerr << "invariant breach: " << e.what() << "\n";
        return 3;
    } catch (const sdmc::model_error &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
