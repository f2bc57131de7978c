// matching.hpp: matchings and the per-matching predicates (individual
// rationality, blocking pairs, stability, worker-quasi-stability), plus the
// textual tuple notation used by the CLI and golden files.
#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wqs/market.hpp"

namespace wqs {

// A bipartite assignment: each firm a worker set, each worker at most one
// firm, the two sides consistent by construction. Totally ordered by the
// tuple of firm-side bitmasks in firm declaration order; every set of
// matchings this library returns is sorted by that order.
class Matching {
  public:
    Matching() = default;

    // Builds from the firm side, deriving the worker side. Throws
    // OverlapError naming the first doubly-assigned worker.
    static Matching from_firm_sides(const Market& m, std::vector<WorkerSet> by_firm) {
        Matching mu;
        mu.by_firm_ = std::move(by_firm);
        if (static_cast<int>(mu.by_firm_.size()) != m.firm_count())
            throw Error("matching must assign every firm");
        mu.by_worker_.assign(m.worker_count(), std::nullopt);
        for (int fi = 0; fi < m.firm_count(); ++fi) {
            if (!mu.by_firm_[fi].subset_of(m.all_workers()))
                throw Error("matching assigns unknown worker");
            for (WorkerId w : mu.by_firm_[fi]) {
                if (mu.by_worker_[w.index])
                    throw OverlapError(w, "worker " + m.worker_name(w) + " assigned to both " +
                                              m.firm_name(*mu.by_worker_[w.index]) + " and " +
                                              m.firm_name(FirmId{fi}));
                mu.by_worker_[w.index] = FirmId{fi};
            }
        }
        return mu;
    }

    WorkerSet firm_side(FirmId f) const { return by_firm_[f.index]; }
    std::optional<FirmId> worker_side(WorkerId w) const { return by_worker_[w.index]; }

    int firm_count() const { return static_cast<int>(by_firm_.size()); }

    bool everyone_unmatched() const {
        for (WorkerSet s : by_firm_)
            if (!s.empty()) return false;
        return true;
    }

    int total_hired() const {
        int n = 0;
        for (WorkerSet s : by_firm_) n += s.size();
        return n;
    }

    bool operator==(const Matching& other) const { return by_firm_ == other.by_firm_; }

    std::strong_ordering operator<=>(const Matching& other) const {
        return std::lexicographical_compare_three_way(by_firm_.begin(), by_firm_.end(),
                                                      other.by_firm_.begin(), other.by_firm_.end());
    }

  private:
    std::vector<WorkerSet> by_firm_;
    std::vector<std::optional<FirmId>> by_worker_;
};

inline Matching make_matching(const Market& m, std::vector<WorkerSet> by_firm) {
    return Matching::from_firm_sides(m, std::move(by_firm));
}

inline Matching empty_matching(const Market& m) {
    return Matching::from_firm_sides(m, std::vector<WorkerSet>(m.firm_count()));
}

// A firm-worker pair certifying instability: the firm would hire the worker
// given its current set and the worker prefers the firm to her assignment.
struct BlockingPair {
    FirmId firm;
    WorkerId worker;
    auto operator<=>(const BlockingPair&) const = default;
};

// No worker holds an unacceptable firm and no firm would fire part of its set.
inline bool is_individually_rational(const Market& m, const Matching& mu) {
    for (int wi = 0; wi < m.worker_count(); ++wi) {
        std::optional<FirmId> f = mu.worker_side(WorkerId{wi});
        if (f && !m.worker_pref(WorkerId{wi}).accepts(*f)) return false;
    }
    for (int fi = 0; fi < m.firm_count(); ++fi) {
        WorkerSet s = mu.firm_side(FirmId{fi});
        if (m.choice(FirmId{fi}, s) != s) return false;
    }
    return true;
}

// All blocking pairs, in (firm index, worker index) lexicographic order.
inline std::vector<BlockingPair> blocking_pairs(const Market& m, const Matching& mu) {
    std::vector<BlockingPair> out;
    for (int fi = 0; fi < m.firm_count(); ++fi) {
        FirmId f{fi};
        WorkerSet held = mu.firm_side(f);
        for (int wi = 0; wi < m.worker_count(); ++wi) {
            WorkerId w{wi};
            if (held.contains(w)) continue;
            if (!m.choice(f, held | WorkerSet::single(w)).contains(w)) continue;
            if (m.worker_prefers(w, f, mu.worker_side(w))) out.push_back({f, w});
        }
    }
    return out;
}

inline bool is_stable(const Market& m, const Matching& mu) {
    return is_individually_rational(m, mu) && blocking_pairs(m, mu).empty();
}

// Individually rational and every blocking pair involves an unemployed worker.
inline bool is_worker_quasi_stable(const Market& m, const Matching& mu) {
    if (!is_individually_rational(m, mu)) return false;
    for (const BlockingPair& bp : blocking_pairs(m, mu))
        if (mu.worker_side(bp.worker)) return false;
    return true;
}

// Tuple notation mirroring the figures: one component per firm in
// declaration order, members concatenated in index order, '-' for the
// empty set. Example: "(w1w2,w3w4)", "(w2w3,-)".
inline std::string format_matching(const Market& m, const Matching& mu) {
    std::string out = "(";
    for (int fi = 0; fi < m.firm_count(); ++fi) {
        if (fi) out += ',';
        WorkerSet s = mu.firm_side(FirmId{fi});
        if (s.empty()) {
            out += '-';
        } else {
            for (WorkerId w : s) out += m.worker_name(w);
        }
    }
    return out + ")";
}

inline std::string format_blocking_pair(const Market& m, const BlockingPair& bp) {
    return "(" + m.firm_name(bp.firm) + "," + m.worker_name(bp.worker) + ")";
}

// Parses the tuple notation. Worker names are matched greedily (longest
// name first) since components concatenate them without separators.
inline Matching parse_matching(const Market& m, std::string_view text) {
    auto fail = [&](const std::string& what) -> FormatError {
        return FormatError("bad matching literal '" + std::string(text) + "': " + what);
    };

    size_t i = 0, j = text.size();
    while (i < j && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    while (j > i && std::isspace(static_cast<unsigned char>(text[j - 1]))) --j;
    if (i >= j || text[i] != '(' || text[j - 1] != ')') throw fail("expected '(...)'");
    std::string_view body = text.substr(i + 1, j - i - 2);

    std::vector<std::string_view> parts;
    size_t start = 0;
    while (true) {
        size_t comma = body.find(',', start);
        parts.push_back(body.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                           : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (static_cast<int>(parts.size()) != m.firm_count())
        throw fail("expected " + std::to_string(m.firm_count()) + " components, got " +
                   std::to_string(parts.size()));

    std::vector<WorkerSet> by_firm(m.firm_count());
    for (int fi = 0; fi < m.firm_count(); ++fi) {
        std::string_view part = parts[fi];
        while (!part.empty() && std::isspace(static_cast<unsigned char>(part.front()))) part.remove_prefix(1);
        while (!part.empty() && std::isspace(static_cast<unsigned char>(part.back()))) part.remove_suffix(1);
        if (part.empty()) throw fail("empty component; use '-' for the empty set");
        if (part == "-") continue;
        while (!part.empty()) {
            std::optional<WorkerId> best;
            size_t best_len = 0;
            for (int wi = 0; wi < m.worker_count(); ++wi) {
                const std::string& n = m.worker_name(WorkerId{wi});
                if (n.size() > best_len && part.size() >= n.size() && part.substr(0, n.size()) == n) {
                    best = WorkerId{wi};
                    best_len = n.size();
                }
            }
            if (!best) throw fail("no worker name matches '" + std::string(part) + "'");
            if (by_firm[fi].contains(*best))
                throw fail("worker '" + m.worker_name(*best) + "' listed twice");
            by_firm[fi].add(*best);
            part.remove_prefix(best_len);
        }
    }
    return Matching::from_firm_sides(m, std::move(by_firm));
}

}  // namespace wqs
