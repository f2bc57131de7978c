// Acceptance suite: one binary, one pass/fail line per criterion.
// Usage: wqs_acceptance <path-to-cli>   (the CLI path drives criterion 8)

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "wqs/wqs.hpp"

#include "test_util.hpp"

using namespace wqs;
using testutil::load_corpus;
using testutil::mu;

namespace {

std::string g_cli_path;

struct Harness {
    int passed = 0;
    int total = 0;

    void criterion(int number, const std::string& name, const std::function<std::string()>& run) {
        ++total;
        std::string failure;
        try {
            failure = run();
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        if (failure.empty()) {
            ++passed;
            std::cout << "criterion " << number << " (" << name << "): PASS\n";
        } else {
            std::cout << "criterion " << number << " (" << name << "): FAIL - " << failure << "\n";
        }
    }
};

std::set<std::string> labels(const Market& m, const std::vector<Matching>& set) {
    std::set<std::string> out;
    for (const Matching& x : set) out.insert(format_matching(m, x));
    return out;
}

std::string run_cli(const std::string& args, int& exit_code) {
    std::string cmd = g_cli_path + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

// ≥ 50 seeded responsive markets within |F| ≤ 3, |W| ≤ 6
std::vector<std::pair<std::string, Market>> seeded_corpus() {
    std::vector<std::pair<std::string, Market>> out;
    const int dims[][3] = {{2, 4, 2}, {3, 5, 2}, {1, 4, 3}, {2, 5, 1}, {3, 6, 2}, {2, 6, 3}};
    for (int i = 0; i < 50; ++i) {
        oracle::GeneratorConfig cfg;
        cfg.firm_count = dims[i % 6][0];
        cfg.worker_count = dims[i % 6][1];
        cfg.quota_min = 1;
        cfg.quota_max = dims[i % 6][2];
        cfg.seed = 1000 + static_cast<std::uint64_t>(i);
        out.emplace_back("responsive(seed=" + std::to_string(cfg.seed) + ")", oracle::generate_market(cfg));
    }
    return out;
}

const char* kFigure1Nodes[] = {"(-,-)",    "(w1,-)",      "(w2,-)",    "(-,w3)",    "(-,w4)",
                               "(w1w2,-)", "(-,w3w4)",    "(w1,w3)",   "(w1,w4)",   "(w2,w3)",
                               "(w2,w4)",  "(w1w2,w3)",   "(w1w2,w4)", "(w1,w3w4)", "(w2,w3w4)",
                               "(w3,w2)",  "(w1w2,w3w4)", "(w3,w2w4)", "(w3,w1w2)"};

const char* kFigure2Nodes[] = {"(-,-)",    "(w1,-)",   "(w2,-)",   "(w3,-)",
                               "(w1w3,-)", "(w2w3,-)", "(w1w2,-)", "(w1w2,w3)"};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];
    auto started = std::chrono::steady_clock::now();
    Harness h;

    h.criterion(1, "example 1 reproduction", [] {
        Market m = load_corpus("example1.market");
        WqsLattice lat = enumerate_wqs(m);
        if (lat.size() != 19) return "expected 19 elements, got " + std::to_string(lat.size());
        std::set<std::string> expected(std::begin(kFigure1Nodes), std::end(kFigure1Nodes));
        if (labels(m, lat.elements()) != expected) return std::string("node set differs from the figure");
        std::set<std::string> stable = labels(m, fixed_points(m, lat));
        if (stable != std::set<std::string>{"(w1w2,w3w4)", "(w3,w1w2)"})
            return std::string("stable subset is not the printed pair");
        return std::string();
    });

    h.criterion(2, "example 1 join with printed intermediate choices", [] {
        Market m = load_corpus("example1.market");
        Matching a = mu(m, "(w3,w2)");
        Matching b = mu(m, "(w1w2,w3w4)");
        FirmId f1{0}, f2{1};
        WorkerSet ch1 = m.choice(f1, a.firm_side(f1) | b.firm_side(f1));
        if (m.format_worker_set(ch1) != "{w3}")
            return "first firm's choice is " + m.format_worker_set(ch1) + ", expected {w3}";
        WorkerSet ch2 = m.choice(f2, a.firm_side(f2) | b.firm_side(f2));
        if (m.format_worker_set(ch2) != "{w2 w4}")
            return "second firm's choice is " + m.format_worker_set(ch2) + ", expected {w2 w4}";
        Matching j = join(m, a, b);
        if (format_matching(m, j) != "(w3,w2w4)")
            return "join is " + format_matching(m, j) + ", expected (w3,w2w4)";
        return std::string();
    });

    h.criterion(3, "example 2 reproduction and the printed trace", [] {
        Market m = load_corpus("example2.market");
        WqsLattice lat = enumerate_wqs(m);
        if (lat.size() != 8) return "expected 8 elements, got " + std::to_string(lat.size());
        std::set<std::string> expected(std::begin(kFigure2Nodes), std::end(kFigure2Nodes));
        if (labels(m, lat.elements()) != expected) return std::string("node set differs from the figure");

        StabilizationTrace t = stabilize(m, mu(m, "(w2w3,-)"));
        if (t.rounds.size() != 2) return "expected 2 rounds, got " + std::to_string(t.rounds.size());
        if (t.rounds[0].star_pairs != std::vector<BlockingPair>{{FirmId{0}, WorkerId{0}}})
            return std::string("round 1 star set is not {(f1,w1)}");
        if (format_matching(m, t.rounds[0].after) != "(w1w2,-)")
            return std::string("round 1 image is not (w1w2,-)");
        if (t.rounds[1].star_pairs != std::vector<BlockingPair>{{FirmId{1}, WorkerId{2}}})
            return std::string("round 2 star set is not {(f2,w3)}");
        if (format_matching(m, t.fixed_point) != "(w1w2,w3)")
            return std::string("fixed point is not (w1w2,w3)");
        return std::string();
    });

    h.criterion(4, "LAD witness and the gate around the unstable join", [] {
        Market m = load_corpus("example1.market");
        const LadVerdict& v = m.lad(FirmId{0});
        if (v.holds) return std::string("f1 unexpectedly satisfies LAD");
        if (m.format_lad_witness(*v.witness) != "({w1 w2}, {w1 w2 w3})")
            return "witness is " + m.format_lad_witness(*v.witness);
        WqsLattice lat = enumerate_wqs(m);
        try {
            check_join_with_stable(m, lat);
            return std::string("the gated check failed to refuse");
        } catch (const LadError&) {
        }
        Matching j = join(m, mu(m, "(w3,w2)"), mu(m, "(w1w2,w3w4)"));
        if (is_stable(m, j)) return std::string("the unguarded join is unexpectedly stable");
        std::vector<BlockingPair> blocks = blocking_pairs(m, j);
        if (blocks != std::vector<BlockingPair>{{FirmId{1}, WorkerId{0}}})
            return std::string("the blocking pair is not (f2,w1)");
        return std::string();
    });

    h.criterion(5, "single-firm quota market", [] {
        Market m = load_corpus("wu.market");
        Matching j = join(m, mu(m, "(w1w2)"), mu(m, "(w2w3)"));
        if (format_matching(m, j) != "(w1w2w3)")
            return "join is " + format_matching(m, j) + ", expected (w1w2w3)";
        if (!is_stable(m, j)) return std::string("the join is not stable");
        return std::string();
    });

    // one battery run per corpus market, shared by criteria 6 and 7
    std::vector<VerificationReport> reports;
    for (const char* name : {"example1.market", "example2.market", "wu.market", "tiny.market",
                             "unacceptable.market", "gen_r1.market", "gen_r2.market", "gen_free1.market"})
        reports.push_back(run_verification(load_corpus(name), name));
    for (const auto& [label, m] : seeded_corpus()) reports.push_back(run_verification(m, label));

    h.criterion(6, "oracle equivalence across the corpus", [&] {
        const std::set<std::string> oracle_props{"wqs-oracle-equivalence", "stable-oracle-equivalence",
                                                 "order-oracle-equivalence", "join-is-least-upper-bound"};
        int markets = 0;
        for (const VerificationReport& r : reports) {
            ++markets;
            for (const PropertyResult& p : r.properties)
                if (oracle_props.count(p.name) && !p.pass)
                    return r.label + ": " + p.name + ": " + p.detail;
        }
        if (markets < 52) return std::string("corpus smaller than required");
        return std::string();
    });

    h.criterion(7, "theorem battery across the corpus", [&] {
        for (const VerificationReport& r : reports)
            for (const PropertyResult& p : r.properties)
                if (!p.pass) return r.label + ": " + p.name + ": " + p.detail;
        return std::string();
    });

    h.criterion(8, "byte-identical verify runs", [] {
        if (g_cli_path.empty()) return std::string("CLI path not supplied");
        int e1 = 0, e2 = 0;
        std::string r1 = run_cli("verify --seed 7", e1);
        std::string r2 = run_cli("verify --seed 7", e2);
        if (e1 != 0 || e2 != 0) return std::string("verify exited nonzero");
        if (r1 != r2) return std::string("reports differ between runs");
        if (r1.empty()) return std::string("verify produced no output");
        return std::string();
    });

    auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    std::cout << "acceptance: " << h.passed << "/" << h.total << " criteria passed in " << elapsed.count()
              << " ms\n";
    if (elapsed.count() >= 60'000) {
        std::cout << "acceptance: FAIL - battery exceeded the 60 s bound\n";
        return 1;
    }
    return h.passed == h.total ? 0 : 1;
}
