#include "catch_amalgamated.hpp"

#include "test_util.hpp"

using namespace wqs;
using testutil::load_corpus;

namespace {

WorkerSet ws(const Market& m, std::initializer_list<const char*> names) {
    WorkerSet s;
    for (const char* n : names) s.add(*m.find_worker(n));
    return s;
}

}  // namespace

TEST_CASE("parsing the first worked example") {
    Market m = load_corpus("example1.market");
    REQUIRE(m.firm_count() == 2);
    REQUIRE(m.worker_count() == 4);
    // eight listed subsets; the empty set is the implicit ninth, floor entry
    REQUIRE(m.firm_pref(*m.find_firm("f2")).ranking.size() == 8);
    REQUIRE(m.worker_pref(*m.find_worker("w4")).ranking.size() == 1);
}

TEST_CASE("parse errors carry positions") {
    SECTION("no firms declared") {
        REQUIRE_THROWS_WITH(parse_market("firms:\nworkers: w1\n"),
                            Catch::Matchers::ContainsSubstring("no firms declared"));
    }
    SECTION("missing firm section entirely") {
        REQUIRE_THROWS_WITH(parse_market("# nothing\n"),
                            Catch::Matchers::ContainsSubstring("no firms declared"));
    }
    SECTION("duplicate member in a subset") {
        std::string text = "firms: f1\nworkers: w1\npref f1: {w1 w1}\n";
        try {
            parse_market(text);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            REQUIRE(e.line() == 3);
            REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("duplicate worker 'w1'"));
        }
    }
    SECTION("unknown agent name") {
        REQUIRE_THROWS_WITH(parse_market("firms: f1\nworkers: w1\npref f9: {w1}\n"),
                            Catch::Matchers::ContainsSubstring("unknown agent 'f9'"));
        REQUIRE_THROWS_WITH(parse_market("firms: f1\nworkers: w1\npref f1: {w9}\n"),
                            Catch::Matchers::ContainsSubstring("unknown worker 'w9'"));
    }
    SECTION("duplicate ranking entries") {
        REQUIRE_THROWS_AS(parse_market("firms: f1 f2\nworkers: w1\npref w1: f1 f1\n"), ParseError);
        REQUIRE_THROWS_AS(parse_market("firms: f1\nworkers: w1 w2\npref f1: {w1 w2} {w2 w1}\n"), ParseError);
    }
    SECTION("empty subset forbidden") {
        REQUIRE_THROWS_AS(parse_market("firms: f1\nworkers: w1\npref f1: {}\n"), ParseError);
    }
    SECTION("agent names must be unambiguous") {
        REQUIRE_THROWS_AS(parse_market("firms: a\nworkers: a\n"), ParseError);
        REQUIRE_THROWS_AS(parse_market("firms: -\nworkers: w1\n"), ParseError);
    }
    SECTION("worker cap") {
        std::string text = "firms: f1\nworkers:";
        for (int i = 0; i < 25; ++i) text += " w" + std::to_string(i);
        REQUIRE_THROWS_AS(parse_market(text + "\n"), ParseError);
    }
}

TEST_CASE("serialization round-trips exactly") {
    for (const char* name : {"example1.market", "example2.market", "wu.market", "unacceptable.market"}) {
        Market m = load_corpus(name);
        std::string once = serialize_market(m);
        Market back = parse_market(once);
        REQUIRE(back == m);
        REQUIRE(serialize_market(back) == once);
    }
}

TEST_CASE("choice picks the best listed subset of the available set") {
    Market m = load_corpus("example1.market");
    FirmId f1 = *m.find_firm("f1");
    FirmId f2 = *m.find_firm("f2");

    REQUIRE(m.choice(f1, ws(m, {"w1", "w2", "w3"})) == ws(m, {"w3"}));
    REQUIRE(m.choice(f1, ws(m, {"w1", "w2"})) == ws(m, {"w1", "w2"}));
    REQUIRE(m.choice(f2, ws(m, {"w2", "w3", "w4"})) == ws(m, {"w2", "w4"}));
    REQUIRE(m.choice(f1, WorkerSet{}) == WorkerSet{});
    REQUIRE(m.choice(f2, WorkerSet{}) == WorkerSet{});
}

TEST_CASE("choice laws hold on every subset") {
    Market m = load_corpus("example1.market");
    for (int fi = 0; fi < m.firm_count(); ++fi) {
        for (std::uint32_t s = 0; s < (1u << m.worker_count()); ++s) {
            WorkerSet set = WorkerSet::from_bits(s);
            WorkerSet ch = m.choice(FirmId{fi}, set);
            REQUIRE(ch.subset_of(set));
            REQUIRE(m.choice(FirmId{fi}, ch) == ch);
        }
    }
}

TEST_CASE("substitutability verdicts") {
    SECTION("both worked examples hold") {
        Market m1 = load_corpus("example1.market");
        REQUIRE(m1.substitutability(*m1.find_firm("f1")).holds);
        REQUIRE(m1.substitutability(*m1.find_firm("f2")).holds);
        Market m2 = load_corpus("example2.market");
        REQUIRE(m2.substitutability(*m2.find_firm("f1")).holds);
        REQUIRE(m2.substitutability(*m2.find_firm("f2")).holds);
    }
    SECTION("a complementarities ranking fails with the smallest witness") {
        Market m = parse_market("firms: f1\nworkers: w1 w2 w3\npref f1: {w1 w2} {w3}\n");
        const SubstVerdict& v = m.substitutability(FirmId{0});
        REQUIRE_FALSE(v.holds);
        REQUIRE(v.witness->worker == *m.find_worker("w1"));
        REQUIRE(v.witness->outer == ws(m, {"w1", "w2"}));
        REQUIRE(v.witness->inner == ws(m, {"w1"}));
        // the witness is real: w1 chosen from the pair, dropped alone
        REQUIRE(m.choice(FirmId{0}, v.witness->outer).contains(v.witness->worker));
        REQUIRE_FALSE(m.choice(FirmId{0}, v.witness->inner).contains(v.witness->worker));
    }
}

TEST_CASE("law of aggregate demand verdicts") {
    SECTION("example 1, f1 fails with the printed witness") {
        Market m = load_corpus("example1.market");
        const LadVerdict& v = m.lad(*m.find_firm("f1"));
        REQUIRE_FALSE(v.holds);
        REQUIRE(v.witness->subset == ws(m, {"w1", "w2"}));
        REQUIRE(v.witness->superset == ws(m, {"w1", "w2", "w3"}));
        REQUIRE(m.lad(*m.find_firm("f2")).holds);
    }
    SECTION("example 2 holds everywhere") {
        Market m = load_corpus("example2.market");
        REQUIRE(m.lad(FirmId{0}).holds);
        REQUIRE(m.lad(FirmId{1}).holds);
    }
    SECTION("singleton-only rankings always hold") {
        Market m = parse_market("firms: f1\nworkers: w1 w2 w3\npref f1: {w2} {w1} {w3}\n");
        REQUIRE(m.lad(FirmId{0}).holds);
    }
    SECTION("monotone along every chain when it holds") {
        Market m = load_corpus("example2.market");
        for (int fi = 0; fi < m.firm_count(); ++fi) {
            for (std::uint32_t a = 0; a < (1u << m.worker_count()); ++a)
                for (std::uint32_t b = 0; b < (1u << m.worker_count()); ++b) {
                    if ((a & ~b) != 0) continue;  // need a ⊆ b
                    REQUIRE(m.choice(FirmId{fi}, WorkerSet::from_bits(a)).size() <=
                            m.choice(FirmId{fi}, WorkerSet::from_bits(b)).size());
                }
        }
    }
}

TEST_CASE("choice consistency agrees with substitutability") {
    SECTION("worked examples") {
        Market m1 = load_corpus("example1.market");
        REQUIRE(m1.choice_consistency(FirmId{0}).holds);
        REQUIRE(m1.choice_consistency(FirmId{1}).holds);
        Market m2 = load_corpus("example2.market");
        REQUIRE(m2.choice_consistency(FirmId{0}).holds);
        REQUIRE(m2.choice_consistency(FirmId{1}).holds);
    }
    SECTION("the two sweeps agree on a failing firm too") {
        Market m = parse_market("firms: f1\nworkers: w1 w2 w3\npref f1: {w1 w2} {w3}\n");
        REQUIRE(m.choice_consistency(FirmId{0}).holds == m.substitutability(FirmId{0}).holds);
    }
    SECTION("the printed instance of the identity") {
        Market m = load_corpus("example1.market");
        FirmId f2 = *m.find_firm("f2");
        WorkerSet s = ws(m, {"w2"});
        WorkerSet s2 = ws(m, {"w3", "w4"});
        REQUIRE(m.choice(f2, s | s2) == ws(m, {"w2", "w4"}));
        REQUIRE(m.choice(f2, m.choice(f2, s) | s2) == ws(m, {"w2", "w4"}));
    }
}

TEST_CASE("responsive sugar expands to the quota-filling ranking") {
    Market m = load_corpus("wu.market");
    const FirmPreference& p = m.firm_pref(FirmId{0});
    // 4 + 6 + 4 subsets of size <= 3
    REQUIRE(p.ranking.size() == 14);
    REQUIRE(p.ranking.front() == ws(m, {"w1", "w2", "w3"}));
    REQUIRE(p.ranking[1] == ws(m, {"w1", "w2", "w4"}));
    REQUIRE(p.ranking.back() == ws(m, {"w4"}));
    // choice fills the quota with the best available
    REQUIRE(m.choice(FirmId{0}, m.all_workers()) == ws(m, {"w1", "w2", "w3"}));
    REQUIRE(m.choice(FirmId{0}, ws(m, {"w2", "w3", "w4"})) == ws(m, {"w2", "w3", "w4"}));
    // responsive preferences are substitutable and satisfy LAD by construction
    REQUIRE(m.substitutability(FirmId{0}).holds);
    REQUIRE(m.lad(FirmId{0}).holds);
}

TEST_CASE("axiom gates") {
    Market bad = parse_market(
        "firms: f1 f2\nworkers: w1 w2 w3\n"
        "pref w1: f1\npref w2: f1\npref w3: f2\n"
        "pref f1: {w1 w2} {w3}\npref f2: {w3}\n");
    REQUIRE_THROWS_AS(bad.require_substitutable(), SubstitutabilityError);

    Market e1 = load_corpus("example1.market");
    e1.require_substitutable();  // fine
    REQUIRE_THROWS_AS(e1.require_lad(), LadError);
}

TEST_CASE("budget guard refuses oversized sweeps") {
    Market m = load_corpus("example1.market");
    m.set_enumeration_budget(4);
    REQUIRE_THROWS_AS(m.substitutability(*m.find_firm("f2")), BudgetError);
    REQUIRE_THROWS_AS(m.choice_consistency(*m.find_firm("f2")), BudgetError);
    // raising the budget afterwards lets the cached check run
    m.set_enumeration_budget(100'000'000);
    REQUIRE(m.substitutability(*m.find_firm("f2")).holds);
}

TEST_CASE("markets copy cheaply and share verdicts") {
    Market m = load_corpus("example2.market");
    REQUIRE(m.substitutability(FirmId{0}).holds);
    Market copy = m;
    REQUIRE(copy == m);
    REQUIRE(copy.substitutability(FirmId{0}).holds);
}
