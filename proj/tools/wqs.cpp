// wqs.cpp: command-line front end. Every capability of the library is
// exposed over the market file format; matchings on the command line use
// the tuple notation, e.g. "(w1w2,w3w4)" with '-' for an empty firm.
//
// Exit status: 0 success / verdict holds, 1 verdict fails, 2 usage, parse
// or domain errors (all error text goes to stderr).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wqs/wqs.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitVerdictFails = 1;
constexpr int kExitError = 2;

wqs::Market load_market(const std::string& path, std::uint64_t budget) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw wqs::Error("cannot open market file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    wqs::Market m = wqs::parse_market(buf.str());
    m.set_enumeration_budget(budget);
    return m;
}

void emit(const std::string& text, const ordered_json& json, bool as_json) {
    if (as_json)
        std::cout << json.dump(2) << "\n";
    else
        std::cout << text;
}

int run_axioms(const wqs::Market& m, bool as_json) {
    std::string text;
    ordered_json firms = ordered_json::array();
    bool all_hold = true;
    for (int fi = 0; fi < m.firm_count(); ++fi) {
        wqs::FirmId f{fi};
        const wqs::SubstVerdict& sv = m.substitutability(f);
        text += "substitutable " + m.firm_name(f) + ": " + (sv.holds ? "yes" : "no");
        if (!sv.holds) text += "  witness " + m.format_subst_witness(*sv.witness);
        text += "\n";
        const wqs::LadVerdict& lv = m.lad(f);
        text += "lad " + m.firm_name(f) + ": " + (lv.holds ? "yes" : "no");
        if (!lv.holds) text += "  witness " + m.format_lad_witness(*lv.witness);
        text += "\n";
        all_hold = all_hold && sv.holds && lv.holds;

        ordered_json entry{{"firm", m.firm_name(f)}, {"substitutable", sv.holds}, {"lad", lv.holds}};
        if (!sv.holds) entry["substitutability_witness"] = m.format_subst_witness(*sv.witness);
        if (!lv.holds) entry["lad_witness"] = m.format_lad_witness(*lv.witness);
        firms.push_back(entry);
    }
    emit(text, ordered_json{{"firms", firms}, {"all_hold", all_hold}}, as_json);
    return all_hold ? kExitOk : kExitVerdictFails;
}

int run_check(const wqs::Market& m, const std::string& literal, bool as_json) {
    wqs::Matching mu = wqs::parse_matching(m, literal);
    bool ir = wqs::is_individually_rational(m, mu);
    bool quasi = wqs::is_worker_quasi_stable(m, mu);
    bool stable = wqs::is_stable(m, mu);
    std::vector<wqs::BlockingPair> blocks = wqs::blocking_pairs(m, mu);

    std::string text = "matching: " + wqs::format_matching(m, mu) + "\n";
    text += std::string("individually rational: ") + (ir ? "yes" : "no") + "\n";
    text += std::string("worker-quasi-stable: ") + (quasi ? "yes" : "no") + "\n";
    text += std::string("stable: ") + (stable ? "yes" : "no") + "\n";
    text += "blocking pairs:";
    for (const wqs::BlockingPair& bp : blocks) text += " " + wqs::format_blocking_pair(m, bp);
    if (blocks.empty()) text += " none";
    text += "\n";

    ordered_json pairs = ordered_json::array();
    for (const wqs::BlockingPair& bp : blocks)
        pairs.push_back({{"firm", m.firm_name(bp.firm)}, {"worker", m.worker_name(bp.worker)}});
    emit(text,
         ordered_json{{"matching", wqs::format_matching(m, mu)},
                      {"individually_rational", ir},
                      {"worker_quasi_stable", quasi},
                      {"stable", stable},
                      {"blocking_pairs", pairs}},
         as_json);
    return stable ? kExitOk : kExitVerdictFails;
}

int run_enumerate(const wqs::Market& m, bool as_json) {
    wqs::WqsLattice lat = wqs::enumerate_wqs(m);
    std::string text;
    ordered_json elements = ordered_json::array();
    for (const wqs::Matching& mu : lat.elements()) {
        bool stable = wqs::is_stable(m, mu);
        text += wqs::format_matching(m, mu) + (stable ? "  [stable]" : "") + "\n";
        elements.push_back({{"matching", wqs::format_matching(m, mu)}, {"stable", stable}});
    }
    emit(text, ordered_json{{"count", lat.size()}, {"elements", elements}}, as_json);
    return kExitOk;
}

int run_join_meet(const wqs::Market& m, const std::string& a, const std::string& b, bool is_join,
                  bool as_json) {
    wqs::Matching ma = wqs::parse_matching(m, a);
    wqs::Matching mb = wqs::parse_matching(m, b);
    wqs::Matching result;
    if (is_join) {
        result = wqs::join(m, ma, mb);
    } else {
        wqs::WqsLattice lat = wqs::enumerate_wqs(m);
        result = wqs::meet(m, lat, ma, mb);
    }
    emit(wqs::format_matching(m, result) + "\n",
         ordered_json{{is_join ? "join" : "meet", wqs::format_matching(m, result)}}, as_json);
    return kExitOk;
}

int run_stabilize(const wqs::Market& m, const std::string& literal, std::uint64_t max_rounds, bool as_json) {
    wqs::Matching mu = wqs::parse_matching(m, literal);
    wqs::StabilizationTrace trace = wqs::stabilize(m, mu, max_rounds);
    emit(wqs::format_trace(m, trace), wqs::trace_to_json(m, trace), as_json);
    return kExitOk;
}

int run_fixed_points(const wqs::Market& m, bool as_json) {
    wqs::WqsLattice lat = wqs::enumerate_wqs(m);
    std::vector<wqs::Matching> stable = wqs::fixed_points(m, lat);
    std::string text;
    ordered_json arr = ordered_json::array();
    for (const wqs::Matching& mu : stable) {
        text += wqs::format_matching(m, mu) + "\n";
        arr.push_back(wqs::format_matching(m, mu));
    }
    emit(text, ordered_json{{"stable", arr}}, as_json);
    return kExitOk;
}

int run_hasse(const wqs::Market& m, const std::string& out_path) {
    wqs::WqsLattice lat = wqs::enumerate_wqs(m);
    std::string dot = wqs::export_hasse(m, lat, wqs::fixed_points(m, lat));
    if (out_path.empty()) {
        std::cout << dot;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw wqs::Error("cannot open output file '" + out_path + "'");
        out << dot;
    }
    return kExitOk;
}

int run_verify(const std::vector<std::string>& market_paths, std::uint64_t seed, int gen_count,
               std::uint64_t budget, bool as_json) {
    std::vector<std::pair<std::string, wqs::Market>> markets;
    for (const std::string& path : market_paths) markets.emplace_back(path, load_market(path, budget));

    // deterministic generated corpus: dimensions cycle, seeds increment
    const int dims[][3] = {{2, 4, 2}, {3, 5, 2}, {1, 4, 3}, {2, 5, 1}, {3, 6, 2}, {2, 6, 3}};
    for (int i = 0; i < gen_count; ++i) {
        wqs::oracle::GeneratorConfig cfg;
        cfg.firm_count = dims[i % 6][0];
        cfg.worker_count = dims[i % 6][1];
        cfg.quota_min = 1;
        cfg.quota_max = dims[i % 6][2];
        cfg.seed = seed + static_cast<std::uint64_t>(i);
        cfg.mode = wqs::oracle::GeneratorConfig::Mode::responsive;
        std::string label = "responsive(seed=" + std::to_string(cfg.seed) + ",firms=" +
                            std::to_string(cfg.firm_count) + ",workers=" + std::to_string(cfg.worker_count) +
                            ",quota=1.." + std::to_string(cfg.quota_max) + ")";
        wqs::Market m = wqs::oracle::generate_market(cfg);
        m.set_enumeration_budget(budget);
        markets.emplace_back(label, std::move(m));
    }

    bool all = true;
    std::string text;
    ordered_json reports = ordered_json::array();
    for (const auto& [label, m] : markets) {
        wqs::VerificationReport report = wqs::run_verification(m, label);
        all = all && report.all_pass();
        text += wqs::format_report(report);
        reports.push_back(wqs::report_to_json(report));
    }
    text += std::string("verify: ") + (all ? "PASS" : "FAIL") + "\n";
    emit(text, ordered_json{{"reports", reports}, {"all_pass", all}}, as_json);
    return all ? kExitOk : kExitVerdictFails;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"many-to-one matching markets: worker-quasi-stable lattice and re-stabilization"};
    app.require_subcommand(1);

    std::string market_path, out_path, format = "text";
    std::string literal, literal_b;
    std::uint64_t budget = 100'000'000;
    std::uint64_t max_rounds = 0;
    std::uint64_t seed = 1;
    int gen_count = -1;
    std::vector<std::string> verify_markets;

    auto add_common = [&](CLI::App* sub, bool needs_market) {
        if (needs_market) sub->add_option("--market", market_path, "market file")->required();
        sub->add_option("--budget", budget, "enumeration budget (abstract operations)");
        sub->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));
    };

    CLI::App* axioms = app.add_subcommand("axioms", "per-firm substitutability and LAD verdicts");
    add_common(axioms, true);

    CLI::App* check = app.add_subcommand("check", "classify one matching");
    add_common(check, true);
    check->add_option("matching", literal, "matching literal, e.g. \"(w1w2,w3)\"")->required();

    CLI::App* enumerate = app.add_subcommand("enumerate", "list the worker-quasi-stable set");
    add_common(enumerate, true);

    CLI::App* join = app.add_subcommand("join", "least upper bound of two worker-quasi-stable matchings");
    add_common(join, true);
    join->add_option("first", literal, "matching literal")->required();
    join->add_option("second", literal_b, "matching literal")->required();

    CLI::App* meet = app.add_subcommand("meet", "greatest lower bound within the enumerated lattice");
    add_common(meet, true);
    meet->add_option("first", literal, "matching literal")->required();
    meet->add_option("second", literal_b, "matching literal")->required();

    CLI::App* stabilize = app.add_subcommand("stabilize", "iterate the re-stabilization operator");
    add_common(stabilize, true);
    stabilize->add_option("matching", literal, "starting matching literal")->required();
    stabilize->add_option("--max-rounds", max_rounds, "round cap (0 = theoretical bound)");

    CLI::App* fixed = app.add_subcommand("fixed-points", "the stable set, as operator fixed points");
    add_common(fixed, true);

    CLI::App* hasse = app.add_subcommand("hasse", "DOT rendering of the lattice, stable set highlighted");
    add_common(hasse, true);
    hasse->add_option("-o,--out", out_path, "output file (stdout if omitted)");

    CLI::App* verify = app.add_subcommand("verify", "run the full invariant battery");
    verify->add_option("--market", verify_markets, "market file (repeatable)");
    verify->add_option("--seed", seed, "base seed for generated markets");
    verify->add_option("--gen", gen_count, "number of generated markets (default 8, or 0 with --market)");
    verify->add_option("--budget", budget, "enumeration budget (abstract operations)");
    verify->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    const bool as_json = format == "json";
    try {
        if (app.got_subcommand(verify)) {
            if (gen_count < 0) gen_count = verify_markets.empty() ? 8 : 0;
            return run_verify(verify_markets, seed, gen_count, budget, as_json);
        }
        wqs::Market m = load_market(market_path, budget);
        if (app.got_subcommand(axioms)) return run_axioms(m, as_json);
        if (app.got_subcommand(check)) return run_check(m, literal, as_json);
        if (app.got_subcommand(enumerate)) return run_enumerate(m, as_json);
        if (app.got_subcommand(join)) return run_join_meet(m, literal, literal_b, true, as_json);
        if (app.got_subcommand(meet)) return run_join_meet(m, literal, literal_b, false, as_json);
        if (app.got_subcommand(stabilize)) return run_stabilize(m, literal, max_rounds, as_json);
        if (app.got_subcommand(fixed)) return run_fixed_points(m, as_json);
        if (app.got_subcommand(hasse)) return run_hasse(m, out_path);
    } catch (const wqs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
