// oracle.hpp: independent brute-force reference implementations and random
// market generation. The predicates here are written from the definitions
// alone and deliberately share no code with the main modules: the choice
// function is recomputed by scanning every subset of the available set, and
// stability notions are re-derived from raw rankings. Equivalence against
// these is what the property suites test.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wqs/market_io.hpp"
#include "wqs/matching.hpp"

namespace wqs::oracle {

// Every matching of the market: all assignments of workers to at most one
// firm each, generated directly in canonical (firm-mask tuple) order.
inline std::vector<Matching> enumerate_all_matchings(const Market& m) {
    std::uint64_t count = detail::sat_pow(m.firm_count() + 1, m.worker_count());
    if (count > m.enumeration_budget())
        throw BudgetError("enumerating " + std::to_string(count) + " matchings exceeds budget " +
                          std::to_string(m.enumeration_budget()));
    std::vector<Matching> out;
    std::vector<WorkerSet> by_firm(m.firm_count());
    auto recurse = [&](auto&& self, int fi, WorkerSet remaining) -> void {
        if (fi == m.firm_count()) {
            out.push_back(Matching::from_firm_sides(m, by_firm));
            return;
        }
        const std::uint32_t rem = remaining.bits();
        for (std::uint32_t s = 0;; s = (s - rem) & rem) {
            by_firm[fi] = WorkerSet::from_bits(s);
            self(self, fi + 1, remaining - by_firm[fi]);
            if (s == rem) break;
        }
    };
    recurse(recurse, 0, m.all_workers());
    return out;
}

namespace detail {

// Rank positions keyed by subset bitmask, one map per firm.
inline std::vector<std::unordered_map<std::uint32_t, int>> rank_maps(const Market& m) {
    std::vector<std::unordered_map<std::uint32_t, int>> maps(m.firm_count());
    for (int fi = 0; fi < m.firm_count(); ++fi) {
        const auto& ranking = m.firm_pref(FirmId{fi}).ranking;
        for (int r = 0; r < static_cast<int>(ranking.size()); ++r) maps[fi][ranking[r].bits()] = r;
    }
    return maps;
}

}  // namespace detail

// The brute-force counterpart of the market: every predicate recomputed
// from scratch against the printed rankings.
class BruteForce {
  public:
    explicit BruteForce(const Market& m) : m_(m), ranks_(detail::rank_maps(m)) {}

    // Best listed subset of `available`, found by scanning all of its
    // subsets and comparing rank positions (not by walking the ranking).
    WorkerSet choice(FirmId f, WorkerSet available) const {
        const auto& rank = ranks_[f.index];
        std::uint32_t best_mask = 0;
        int best_rank = -1;
        const std::uint32_t avail = available.bits();
        for (std::uint32_t s = 0;; s = (s - avail) & avail) {
            auto it = rank.find(s);
            if (it != rank.end() && (best_rank < 0 || it->second < best_rank)) {
                best_rank = it->second;
                best_mask = s;
            }
            if (s == avail) break;
        }
        return WorkerSet::from_bits(best_mask);
    }

    bool worker_accepts(WorkerId w, FirmId f) const {
        for (FirmId g : m_.worker_pref(w).ranking)
            if (g == f) return true;
        return false;
    }

    // f strictly above the current assignment in w's list (unmatched counts
    // as ranked just below the last listed firm).
    bool worker_prefers_to_own(WorkerId w, FirmId f, std::optional<FirmId> current) const {
        const auto& ranking = m_.worker_pref(w).ranking;
        for (FirmId g : ranking) {
            if (g == f) return !current || !(g == *current);
            if (current && g == *current) return false;
        }
        return false;  // f unlisted: never preferred
    }

    bool individually_rational(const Matching& mu) const {
        for (int wi = 0; wi < m_.worker_count(); ++wi) {
            std::optional<FirmId> f = mu.worker_side(WorkerId{wi});
            if (f && !worker_accepts(WorkerId{wi}, *f)) return false;
        }
        for (int fi = 0; fi < m_.firm_count(); ++fi)
            if (!(choice(FirmId{fi}, mu.firm_side(FirmId{fi})) == mu.firm_side(FirmId{fi}))) return false;
        return true;
    }

    bool blocks(FirmId f, WorkerId w, const Matching& mu) const {
        if (mu.firm_side(f).contains(w)) return false;
        if (!choice(f, mu.firm_side(f) | WorkerSet::single(w)).contains(w)) return false;
        return worker_prefers_to_own(w, f, mu.worker_side(w));
    }

    bool stable(const Matching& mu) const {
        if (!individually_rational(mu)) return false;
        for (int fi = 0; fi < m_.firm_count(); ++fi)
            for (int wi = 0; wi < m_.worker_count(); ++wi)
                if (blocks(FirmId{fi}, WorkerId{wi}, mu)) return false;
        return true;
    }

    bool worker_quasi_stable(const Matching& mu) const {
        if (!individually_rational(mu)) return false;
        for (int fi = 0; fi < m_.firm_count(); ++fi)
            for (int wi = 0; wi < m_.worker_count(); ++wi)
                if (blocks(FirmId{fi}, WorkerId{wi}, mu) && mu.worker_side(WorkerId{wi})) return false;
        return true;
    }

    bool dominates(const Matching& a, const Matching& b) const {
        for (int fi = 0; fi < m_.firm_count(); ++fi) {
            FirmId f{fi};
            if (!(choice(f, a.firm_side(f) | b.firm_side(f)) == a.firm_side(f))) return false;
        }
        return true;
    }

  private:
    const Market& m_;
    std::vector<std::unordered_map<std::uint32_t, int>> ranks_;
};

// The worker-quasi-stable set by filtering every matching through the
// from-scratch predicate. Canonically sorted by construction.
inline std::vector<Matching> wqs_set(const Market& m) {
    BruteForce bf(m);
    std::vector<Matching> out;
    for (Matching& mu : enumerate_all_matchings(m))
        if (bf.worker_quasi_stable(mu)) out.push_back(std::move(mu));
    return out;
}

inline std::vector<Matching> stable_set(const Market& m) {
    BruteForce bf(m);
    std::vector<Matching> out;
    for (Matching& mu : enumerate_all_matchings(m))
        if (bf.stable(mu)) out.push_back(std::move(mu));
    return out;
}

// Least upper bound by exhaustive search over the given worker-quasi-stable
// set: the unique common upper bound every other one dominates. Throws when
// none is unique, which would falsify the lattice theorem.
inline Matching join_by_search(const Market& m, const std::vector<Matching>& wqs, const Matching& a,
                               const Matching& b) {
    BruteForce bf(m);
    std::vector<const Matching*> uppers;
    for (const Matching& nu : wqs)
        if (bf.dominates(nu, a) && bf.dominates(nu, b)) uppers.push_back(&nu);
    const Matching* least = nullptr;
    for (const Matching* cand : uppers) {
        bool below_all = true;
        for (const Matching* other : uppers)
            if (!bf.dominates(*other, *cand)) {
                below_all = false;
                break;
            }
        if (below_all) {
            if (least) throw InternalError("two distinct least upper bounds of " + format_matching(m, a) +
                                           " and " + format_matching(m, b));
            least = cand;
        }
    }
    if (!least)
        throw InternalError("no least upper bound of " + format_matching(m, a) + " and " +
                            format_matching(m, b) + " in the worker-quasi-stable set");
    return *least;
}

// Seeded market generation. `responsive` draws a quota and a full worker
// ranking per firm and expands it, which is substitutable and satisfies LAD
// by construction; `free_substitutable` rejection-samples raw subset
// rankings per firm until the substitutability check passes. Deterministic
// per seed: sampling is hand-rolled on top of mt19937_64 so no standard-
// library distribution details leak into the output.
struct GeneratorConfig {
    int firm_count = 2;
    int worker_count = 4;
    int quota_min = 1;
    int quota_max = 2;
    std::uint64_t seed = 0;
    enum class Mode { responsive, free_substitutable } mode = Mode::responsive;
    int free_ranking_max = 5;    // longest subset list drawn in free mode
    int free_attempt_cap = 10000;
};

namespace detail {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        // xorshift* keeps the stream identical everywhere; quality is ample
        // for test-market sampling
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1Dull;
    }

    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

    bool coin() { return next() & 1; }

  private:
    std::uint64_t state_;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) std::swap(v[i], v[rng.below(i + 1)]);
}

}  // namespace detail

inline Market generate_market(const GeneratorConfig& cfg) {
    if (cfg.firm_count < 1 || cfg.worker_count < 1 || cfg.quota_min < 1 || cfg.quota_max < cfg.quota_min)
        throw Error("invalid generator configuration");
    if (cfg.worker_count > WorkerSet::kMaxWorkers) throw Error("too many workers for generation");

    // seed 0 would freeze xorshift; offset keeps distinct seeds distinct
    detail::Rng rng(cfg.seed * 2 + 1);

    std::vector<std::string> firm_names, worker_names;
    for (int i = 0; i < cfg.firm_count; ++i) firm_names.push_back("f" + std::to_string(i + 1));
    for (int i = 0; i < cfg.worker_count; ++i) worker_names.push_back("w" + std::to_string(i + 1));

    std::vector<FirmPreference> fprefs;
    for (int fi = 0; fi < cfg.firm_count; ++fi) {
        if (cfg.mode == GeneratorConfig::Mode::responsive) {
            int quota = cfg.quota_min + rng.below(cfg.quota_max - cfg.quota_min + 1);
            std::vector<WorkerId> ranked;
            for (int wi = 0; wi < cfg.worker_count; ++wi) ranked.push_back(WorkerId{wi});
            detail::shuffle(ranked, rng);
            fprefs.push_back({FirmId{fi}, expand_responsive(ranked, quota)});
        } else {
            const std::uint32_t full = (1u << cfg.worker_count) - 1u;
            bool accepted = false;
            for (int attempt = 0; attempt < cfg.free_attempt_cap && !accepted; ++attempt) {
                std::vector<WorkerSet> ranking;
                int len = 1 + rng.below(cfg.free_ranking_max);
                for (int k = 0; k < len; ++k) {
                    WorkerSet s = WorkerSet::from_bits(1u + rng.below(static_cast<int>(full)));
                    bool dup = false;
                    for (WorkerSet prev : ranking) dup = dup || prev == s;
                    if (!dup) ranking.push_back(s);
                }
                std::vector<FirmPreference> probe_prefs;
                for (int gi = 0; gi < cfg.firm_count; ++gi)
                    probe_prefs.push_back({FirmId{gi}, gi == fi ? ranking : std::vector<WorkerSet>{}});
                Market probe(firm_names, worker_names,
                             std::vector<WorkerPreference>(cfg.worker_count), probe_prefs);
                if (probe.substitutability(FirmId{fi}).holds) {
                    fprefs.push_back({FirmId{fi}, std::move(ranking)});
                    accepted = true;
                }
            }
            if (!accepted)
                throw Error("free-mode generation exhausted " + std::to_string(cfg.free_attempt_cap) +
                            " attempts for firm " + firm_names[fi]);
        }
    }

    std::vector<WorkerPreference> wprefs;
    for (int wi = 0; wi < cfg.worker_count; ++wi) {
        std::vector<FirmId> listed;
        while (listed.empty()) {
            listed.clear();
            for (int fi = 0; fi < cfg.firm_count; ++fi)
                if (rng.coin()) listed.push_back(FirmId{fi});
        }
        detail::shuffle(listed, rng);
        wprefs.push_back({WorkerId{wi}, std::move(listed)});
    }

    return Market(std::move(firm_names), std::move(worker_names), std::move(wprefs), std::move(fprefs));
}

}  // namespace wqs::oracle
