// market.hpp: markets, preferences, the choice function, and the
// preference axioms (substitutability, law of aggregate demand, choice
// consistency) with exhaustive, witness-producing checks.
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wqs/errors.hpp"
#include "wqs/types.hpp"

namespace wqs {

// Strict ranking over individual firms; firms absent from the list are
// unacceptable (ranked below staying unmatched).
struct WorkerPreference {
    WorkerId owner;
    std::vector<FirmId> ranking;

    std::optional<int> rank_of(FirmId f) const {
        for (int i = 0; i < static_cast<int>(ranking.size()); ++i)
            if (ranking[i] == f) return i;
        return std::nullopt;
    }

    bool accepts(FirmId f) const { return rank_of(f).has_value(); }

    bool operator==(const WorkerPreference&) const = default;
};

// Strict ranking over acceptable worker subsets; unlisted subsets are
// strictly worse than the empty set, which is the implicit floor and never
// appears in the list.
struct FirmPreference {
    FirmId owner;
    std::vector<WorkerSet> ranking;

    std::optional<int> rank_of(WorkerSet s) const {
        for (int i = 0; i < static_cast<int>(ranking.size()); ++i)
            if (ranking[i] == s) return i;
        return std::nullopt;
    }

    bool operator==(const FirmPreference&) const = default;
};

// Witness for a substitutability failure: worker ∈ inner ⊆ outer with
// worker chosen from outer but not from inner.
struct SubstWitness {
    WorkerId worker;
    WorkerSet outer;
    WorkerSet inner;
};

struct SubstVerdict {
    bool holds = false;
    std::optional<SubstWitness> witness;
};

// Witness for a LAD failure: subset ⊆ superset with |Ch(subset)| > |Ch(superset)|.
struct LadWitness {
    WorkerSet subset;
    WorkerSet superset;
};

struct LadVerdict {
    bool holds = false;
    std::optional<LadWitness> witness;
};

// Witness pair (S, S') with Ch(S ∪ S') ≠ Ch(Ch(S) ∪ S').
struct ConsistencyWitness {
    WorkerSet first;
    WorkerSet second;
};

struct ConsistencyVerdict {
    bool holds = false;
    std::optional<ConsistencyWitness> witness;
};

namespace detail {

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<std::uint64_t>::max() / b) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = a + b;
    return r < a ? std::numeric_limits<std::uint64_t>::max() : r;
}

inline std::uint64_t sat_pow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) r = sat_mul(r, base);
    return r;
}

// The workers a firm's ranking actually mentions. Choice ignores everyone
// else, so axiom sweeps can run over this smaller universe; failure
// witnesses restricted to it are exactly the lexicographically smallest
// ones over the full worker set.
struct SubsetUniverse {
    std::vector<WorkerId> members;  // ascending

    int size() const { return static_cast<int>(members.size()); }

    std::uint32_t compress(WorkerSet s) const {
        std::uint32_t c = 0;
        for (int i = 0; i < size(); ++i)
            if (s.contains(members[i])) c |= 1u << i;
        return c;
    }

    WorkerSet expand(std::uint32_t c) const {
        WorkerSet s;
        for (int i = 0; i < size(); ++i)
            if ((c >> i) & 1u) s.add(members[i]);
        return s;
    }
};

}  // namespace detail

// Expands a quota-capped strict worker ranking into the induced subset
// ranking: subsets are compared by their sorted tuples of worker ranks,
// padded to the quota with a worse-than-any-rank sentinel, so the induced
// choice hires the q best available workers.
inline std::vector<WorkerSet> expand_responsive(const std::vector<WorkerId>& ranked, int quota) {
    const int n = static_cast<int>(ranked.size());
    if (n > 20) throw Error("responsive expansion too large: " + std::to_string(n) + " ranked workers");
    const int q = std::min(quota, n);
    std::vector<std::uint32_t> masks;  // over rank positions; bit i = worker with rank i
    masks.reserve(1u << n);
    for (std::uint32_t m = 1; m < (1u << n); ++m)
        if (std::popcount(m) <= q) masks.push_back(m);
    // Rank positions in a mask come out ascending, so element-wise mask
    // comparison with sentinel padding is a comparison of rank tuples.
    std::sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
        while (a || b) {
            int ra = a ? std::countr_zero(a) : n;
            int rb = b ? std::countr_zero(b) : n;
            if (ra != rb) return ra < rb;
            a &= a - 1;
            b &= b - 1;
        }
        return false;
    });
    std::vector<WorkerSet> out;
    out.reserve(masks.size());
    for (std::uint32_t m : masks) {
        WorkerSet s;
        for (std::uint32_t t = m; t; t &= t - 1) s.add(ranked[std::countr_zero(t)]);
        out.push_back(s);
    }
    return out;
}

// A many-to-one matching market: the two agent sides with their preference
// data. Immutable after construction and safe to share across concurrent
// readers; the axiom verdicts are cached write-once per firm.
class Market {
  public:
    Market(std::vector<std::string> firm_names, std::vector<std::string> worker_names,
           std::vector<WorkerPreference> worker_prefs, std::vector<FirmPreference> firm_prefs)
        : firm_names_(std::move(firm_names)),
          worker_names_(std::move(worker_names)),
          worker_prefs_(std::move(worker_prefs)),
          firm_prefs_(std::move(firm_prefs)),
          axioms_(std::make_shared<std::deque<FirmAxioms>>(firm_names_.size())) {
        if (worker_names_.size() > WorkerSet::kMaxWorkers)
            throw Error("markets are capped at " + std::to_string(WorkerSet::kMaxWorkers) + " workers");
        if (worker_prefs_.size() != worker_names_.size() || firm_prefs_.size() != firm_names_.size())
            throw Error("exactly one preference record per agent required");
        validate_prefs();
    }

    int firm_count() const { return static_cast<int>(firm_names_.size()); }
    int worker_count() const { return static_cast<int>(worker_names_.size()); }

    const std::string& firm_name(FirmId f) const { return firm_names_[f.index]; }
    const std::string& worker_name(WorkerId w) const { return worker_names_[w.index]; }

    std::optional<FirmId> find_firm(std::string_view name) const {
        for (int i = 0; i < firm_count(); ++i)
            if (firm_names_[i] == name) return FirmId{i};
        return std::nullopt;
    }

    std::optional<WorkerId> find_worker(std::string_view name) const {
        for (int i = 0; i < worker_count(); ++i)
            if (worker_names_[i] == name) return WorkerId{i};
        return std::nullopt;
    }

    const WorkerPreference& worker_pref(WorkerId w) const { return worker_prefs_[w.index]; }
    const FirmPreference& firm_pref(FirmId f) const { return firm_prefs_[f.index]; }

    WorkerSet all_workers() const { return WorkerSet::from_bits((1u << worker_count()) - 1u); }

    // Ch_f(available): the highest-ranked listed subset contained in
    // `available`, or the empty set when none is. Total, and always a
    // subset of `available`.
    WorkerSet choice(FirmId f, WorkerSet available) const {
        for (WorkerSet t : firm_prefs_[f.index].ranking)
            if (t.subset_of(available)) return t;
        return {};
    }

    // Strict worker-side comparison over F ∪ {unmatched}: listed firms in
    // ranking order, then the unmatched option, then unlisted firms.
    bool worker_prefers(WorkerId w, std::optional<FirmId> a, std::optional<FirmId> b) const {
        return worker_rank(w, a) < worker_rank(w, b);
    }

    std::uint64_t enumeration_budget() const { return budget_; }
    void set_enumeration_budget(std::uint64_t b) { budget_ = b; }

    // Exhaustive substitutability check; verdicts are cached write-once.
    // A failing verdict carries the lexicographically smallest witness
    // (worker, then outer set, then inner set).
    const SubstVerdict& substitutability(FirmId f) const {
        FirmAxioms& ax = (*axioms_)[f.index];
        std::call_once(ax.subst_once, [&] { ax.subst = compute_substitutability(f); });
        return ax.subst;
    }

    // Exhaustive law-of-aggregate-demand check, cached like substitutability.
    const LadVerdict& lad(FirmId f) const {
        FirmAxioms& ax = (*axioms_)[f.index];
        std::call_once(ax.lad_once, [&] { ax.lad = compute_lad(f); });
        return ax.lad;
    }

    // Exhaustive check of the identity Ch(S ∪ S') = Ch(Ch(S) ∪ S'), which
    // holds exactly when the firm is substitutable; serves as a redundant
    // validation oracle for the choice implementation.
    ConsistencyVerdict choice_consistency(FirmId f) const {
        detail::SubsetUniverse u = universe(f);
        const int r = u.size();
        ensure_budget(detail::sat_add(table_cost(f, r), detail::sat_pow(4, r)),
                      "choice consistency sweep for firm " + firm_name(f));
        std::vector<std::uint32_t> ch = choice_table(f, u);
        for (std::uint32_t a = 0; a < (1u << r); ++a)
            for (std::uint32_t b = 0; b < (1u << r); ++b)
                if (ch[a | b] != ch[ch[a] | b])
                    return {false, ConsistencyWitness{u.expand(a), u.expand(b)}};
        return {true, std::nullopt};
    }

    // Throws SubstitutabilityError if any firm fails the axiom. Order and
    // lattice operations call this: the theory assumes substitutability and
    // their output is meaningless without it.
    void require_substitutable() const {
        for (int i = 0; i < firm_count(); ++i) {
            const SubstVerdict& v = substitutability(FirmId{i});
            if (!v.holds)
                throw SubstitutabilityError(FirmId{i}, "firm " + firm_names_[i] +
                                                           " is not substitutable; witness " +
                                                           format_subst_witness(*v.witness));
        }
    }

    // Throws LadError if any firm fails LAD. The LAD-conditional theorems
    // are provably false without it, so gated operations refuse to run.
    void require_lad() const {
        for (int i = 0; i < firm_count(); ++i) {
            const LadVerdict& v = lad(FirmId{i});
            if (!v.holds)
                throw LadError(FirmId{i}, "firm " + firm_names_[i] +
                                              " violates the law of aggregate demand; witness " +
                                              format_lad_witness(*v.witness));
        }
    }

    std::string format_worker_set(WorkerSet s) const {
        std::string out = "{";
        bool first = true;
        for (WorkerId w : s) {
            if (!first) out += ' ';
            out += worker_names_[w.index];
            first = false;
        }
        return out + "}";
    }

    std::string format_subst_witness(const SubstWitness& w) const {
        return "(" + worker_names_[w.worker.index] + ", " + format_worker_set(w.outer) + ", " +
               format_worker_set(w.inner) + ")";
    }

    std::string format_lad_witness(const LadWitness& w) const {
        return "(" + format_worker_set(w.subset) + ", " + format_worker_set(w.superset) + ")";
    }

    // Preference data only; the axiom cache and budget do not participate.
    bool operator==(const Market& other) const {
        return firm_names_ == other.firm_names_ && worker_names_ == other.worker_names_ &&
               worker_prefs_ == other.worker_prefs_ && firm_prefs_ == other.firm_prefs_;
    }

  private:
    struct FirmAxioms {
        std::once_flag subst_once;
        SubstVerdict subst;
        std::once_flag lad_once;
        LadVerdict lad;
    };

    void validate_prefs() {
        for (int i = 0; i < worker_count(); ++i) {
            const WorkerPreference& p = worker_prefs_[i];
            for (size_t a = 0; a < p.ranking.size(); ++a) {
                if (p.ranking[a].index < 0 || p.ranking[a].index >= firm_count())
                    throw Error("worker preference ranks unknown firm");
                for (size_t b = a + 1; b < p.ranking.size(); ++b)
                    if (p.ranking[a] == p.ranking[b]) throw Error("duplicate firm in worker ranking");
            }
        }
        for (int i = 0; i < firm_count(); ++i) {
            const FirmPreference& p = firm_prefs_[i];
            for (size_t a = 0; a < p.ranking.size(); ++a) {
                if (p.ranking[a].empty()) throw Error("empty set listed in firm ranking");
                if (!p.ranking[a].subset_of(all_workers())) throw Error("firm ranking mentions unknown worker");
                for (size_t b = a + 1; b < p.ranking.size(); ++b)
                    if (p.ranking[a] == p.ranking[b]) throw Error("duplicate subset in firm ranking");
            }
        }
    }

    int worker_rank(WorkerId w, std::optional<FirmId> f) const {
        const WorkerPreference& p = worker_prefs_[w.index];
        int len = static_cast<int>(p.ranking.size());
        if (!f) return len;  // unmatched sits just below the listed firms
        if (std::optional<int> r = p.rank_of(*f)) return *r;
        return len + 1;  // unacceptable firms sit below unmatched
    }

    void ensure_budget(std::uint64_t cost, const std::string& what) const {
        if (cost > budget_)
            throw BudgetError(what + " needs ~" + std::to_string(cost) + " operations, budget is " +
                              std::to_string(budget_));
    }

    detail::SubsetUniverse universe(FirmId f) const {
        WorkerSet rel;
        for (WorkerSet t : firm_prefs_[f.index].ranking) rel = rel | t;
        detail::SubsetUniverse u;
        for (WorkerId w : rel) u.members.push_back(w);
        return u;
    }

    std::uint64_t table_cost(FirmId f, int r) const {
        return detail::sat_mul(detail::sat_pow(2, r),
                               std::max<std::uint64_t>(1, firm_prefs_[f.index].ranking.size()));
    }

    // Choice over every subset of the firm's relevant universe, in
    // compressed masks.
    std::vector<std::uint32_t> choice_table(FirmId f, const detail::SubsetUniverse& u) const {
        const int r = u.size();
        std::vector<std::uint32_t> ranked;
        ranked.reserve(firm_prefs_[f.index].ranking.size());
        for (WorkerSet t : firm_prefs_[f.index].ranking) ranked.push_back(u.compress(t));
        std::vector<std::uint32_t> ch(1u << r, 0);
        for (std::uint32_t s = 0; s < (1u << r); ++s) {
            for (std::uint32_t t : ranked) {
                if ((t & ~s) == 0) {
                    ch[s] = t;
                    break;
                }
            }
        }
        return ch;
    }

    SubstVerdict compute_substitutability(FirmId f) const {
        detail::SubsetUniverse u = universe(f);
        const int r = u.size();
        ensure_budget(detail::sat_add(table_cost(f, r), detail::sat_mul(r, detail::sat_pow(3, r))),
                      "substitutability sweep for firm " + firm_name(f));
        std::vector<std::uint32_t> ch = choice_table(f, u);
        // Witnesses are enumerated (worker, outer, inner) ascending with the
        // worker inside both sets; compressed mask order embeds into full
        // mask order, so the first hit is the lexicographically smallest.
        for (int wi = 0; wi < r; ++wi) {
            const std::uint32_t wbit = 1u << wi;
            for (std::uint32_t outer = 0; outer < (1u << r); ++outer) {
                if (!(outer & wbit) || !(ch[outer] & wbit)) continue;
                // submasks of outer in increasing numeric order
                for (std::uint32_t inner = 0;; inner = (inner - outer) & outer) {
                    if ((inner & wbit) && !(ch[inner] & wbit))
                        return {false, SubstWitness{u.members[wi], u.expand(outer), u.expand(inner)}};
                    if (inner == outer) break;
                }
            }
        }
        return {true, std::nullopt};
    }

    LadVerdict compute_lad(FirmId f) const {
        detail::SubsetUniverse u = universe(f);
        const int r = u.size();
        ensure_budget(detail::sat_add(table_cost(f, r), detail::sat_pow(3, r)),
                      "law-of-aggregate-demand sweep for firm " + firm_name(f));
        std::vector<std::uint32_t> ch = choice_table(f, u);
        for (std::uint32_t sub = 0; sub < (1u << r); ++sub) {
            const int chosen = std::popcount(ch[sub]);
            // supersets of sub in increasing numeric order
            const std::uint32_t full = (1u << r) - 1u;
            for (std::uint32_t sup = sub;; sup = (sup + 1) | sub) {
                if (std::popcount(ch[sup]) < chosen)
                    return {false, LadWitness{u.expand(sub), u.expand(sup)}};
                if (sup == full) break;
            }
        }
        return {true, std::nullopt};
    }

    std::vector<std::string> firm_names_;
    std::vector<std::string> worker_names_;
    std::vector<WorkerPreference> worker_prefs_;
    std::vector<FirmPreference> firm_prefs_;
    std::uint64_t budget_ = 100'000'000;
    // Shared so copies reuse the same write-once verdicts; std::deque keeps
    // the non-movable once_flags addressable.
    std::shared_ptr<std::deque<FirmAxioms>> axioms_;
};

}  // namespace wqs
