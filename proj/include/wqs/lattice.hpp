// lattice.hpp: the Blair partial order over matchings, the closed-form join
// of worker-quasi-stable matchings, enumeration of the full worker-quasi-
// stable set with its covering relation, meet by search, and DOT export.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wqs/matching.hpp"

namespace wqs {

enum class BlairComparison { equal, first_dominates, second_dominates, incomparable };

namespace detail {

// mu(f) keeps its workers when offered mu2(f) as well, for every firm.
inline bool blair_ge(const Market& m, const Matching& a, const Matching& b) {
    for (int fi = 0; fi < m.firm_count(); ++fi) {
        FirmId f{fi};
        if (m.choice(f, a.firm_side(f) | b.firm_side(f)) != a.firm_side(f)) return false;
    }
    return true;
}

inline void require_wqs(const Market& m, const Matching& mu, const char* op) {
    if (!is_worker_quasi_stable(m, mu))
        throw NotWqsError(std::string(op) + ": input is not worker-quasi-stable: " + format_matching(m, mu));
}

// Fixed-width row bitset helpers for order matrices.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(int n) : n_(n), words_((n + 63) / 64), bits_(static_cast<size_t>(n) * words_, 0) {}

    void set(int i, int j) { bits_[static_cast<size_t>(i) * words_ + j / 64] |= 1ull << (j % 64); }
    bool get(int i, int j) const {
        return (bits_[static_cast<size_t>(i) * words_ + j / 64] >> (j % 64)) & 1ull;
    }

    // row i of x meets row j of y?
    static bool cross_intersect(const BitMatrix& x, int i, const BitMatrix& y, int j) {
        const std::uint64_t* a = &x.bits_[static_cast<size_t>(i) * x.words_];
        const std::uint64_t* b = &y.bits_[static_cast<size_t>(j) * y.words_];
        for (int k = 0; k < x.words_; ++k)
            if (a[k] & b[k]) return true;
        return false;
    }

    // row(i) ⊇ row(j)?
    bool row_contains(int i, int j) const {
        const std::uint64_t* a = &bits_[static_cast<size_t>(i) * words_];
        const std::uint64_t* b = &bits_[static_cast<size_t>(j) * words_];
        for (int k = 0; k < words_; ++k)
            if (b[k] & ~a[k]) return false;
        return true;
    }

    int size() const { return n_; }

  private:
    int n_ = 0;
    int words_ = 0;
    std::vector<std::uint64_t> bits_;
};

}  // namespace detail

// Compares two matchings in the Blair order lifted to all firms. Refuses to
// run on a market with a non-substitutable firm.
inline BlairComparison blair_compare(const Market& m, const Matching& a, const Matching& b) {
    m.require_substitutable();
    if (a == b) return BlairComparison::equal;
    bool ge = detail::blair_ge(m, a, b);
    bool le = detail::blair_ge(m, b, a);
    if (ge) return BlairComparison::first_dominates;
    if (le) return BlairComparison::second_dominates;
    return BlairComparison::incomparable;
}

// The join: each firm chooses from the union of its two assignments, and
// workers follow the firms that picked them. Defined for worker-quasi-stable
// inputs, where the result is again worker-quasi-stable and is the least
// upper bound in the Blair order.
inline Matching join(const Market& m, const Matching& a, const Matching& b) {
    m.require_substitutable();
    detail::require_wqs(m, a, "join");
    detail::require_wqs(m, b, "join");
    std::vector<WorkerSet> by_firm(m.firm_count());
    for (int fi = 0; fi < m.firm_count(); ++fi) {
        FirmId f{fi};
        by_firm[fi] = m.choice(f, a.firm_side(f) | b.firm_side(f));
    }
    try {
        return Matching::from_firm_sides(m, std::move(by_firm));
    } catch (const OverlapError& e) {
        throw InternalError(std::string("join produced a doubly-assigned worker, ") +
                            "which the theory rules out: " + e.what());
    }
}

// The enumerated worker-quasi-stable set with its Blair order: sorted
// elements, the covering relation (transitive reduction), the bottom (the
// empty matching) and the top. Immutable after construction.
class WqsLattice {
  public:
    const std::vector<Matching>& elements() const { return elements_; }

    // (lower, upper) index pairs, sorted; upper covers lower.
    const std::vector<std::pair<int, int>>& covers() const { return covers_; }

    int bottom() const { return bottom_; }
    int top() const { return top_; }
    int size() const { return static_cast<int>(elements_.size()); }

    std::optional<int> index_of(const Matching& mu) const {
        auto it = std::lower_bound(elements_.begin(), elements_.end(), mu);
        if (it == elements_.end() || !(*it == mu)) return std::nullopt;
        return static_cast<int>(it - elements_.begin());
    }

    // element i Blair-dominates (⪰) element j
    bool dominates(int i, int j) const { return i == j || ge_.get(i, j); }

  private:
    friend WqsLattice enumerate_wqs(const Market& m);

    std::vector<Matching> elements_;
    std::vector<std::pair<int, int>> covers_;
    int bottom_ = 0;
    int top_ = 0;
    detail::BitMatrix ge_;  // strict domination; diagonal handled by dominates()
};

// Enumerates every worker-quasi-stable matching by sweeping all
// (|F|+1)^|W| assignments, then builds the Blair order and its transitive
// reduction. Candidates are generated directly in canonical order.
inline WqsLattice enumerate_wqs(const Market& m) {
    m.require_substitutable();
    std::uint64_t candidates = detail::sat_pow(m.firm_count() + 1, m.worker_count());
    if (candidates > m.enumeration_budget())
        throw BudgetError("enumerating " + std::to_string(candidates) +
                          " candidate matchings exceeds budget " + std::to_string(m.enumeration_budget()));

    WqsLattice lat;
    std::vector<WorkerSet> by_firm(m.firm_count());
    auto recurse = [&](auto&& self, int fi, WorkerSet remaining) -> void {
        if (fi == m.firm_count()) {
            Matching mu = Matching::from_firm_sides(m, by_firm);
            if (is_worker_quasi_stable(m, mu)) lat.elements_.push_back(std::move(mu));
            return;
        }
        // submasks of `remaining` in increasing numeric order, so the
        // element list comes out sorted by the firm-mask tuple
        const std::uint32_t rem = remaining.bits();
        for (std::uint32_t s = 0;; s = (s - rem) & rem) {
            by_firm[fi] = WorkerSet::from_bits(s);
            self(self, fi + 1, remaining - by_firm[fi]);
            if (s == rem) break;
        }
    };
    recurse(recurse, 0, m.all_workers());

    const int n = lat.size();
    if (n == 0 || !lat.elements_[0].everyone_unmatched())
        throw InternalError("the empty matching must be worker-quasi-stable and sort first");

    detail::BitMatrix below(n);  // below(i) = {j : i ≻ j}
    detail::BitMatrix above(n);  // above(i) = {j : j ≻ i}
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (detail::blair_ge(m, lat.elements_[i], lat.elements_[j])) {
                below.set(i, j);
                above.set(j, i);
            }
        }
    }
    lat.ge_ = below;

    for (int i = 0; i < n; ++i)
        if (!lat.dominates(i, 0))
            throw InternalError("the empty matching must be the minimum of the lattice");
    lat.top_ = -1;
    for (int i = 0; i < n && lat.top_ < 0; ++i) {
        bool all = true;
        for (int j = 0; j < n && all; ++j) all = lat.dominates(i, j);
        if (all) lat.top_ = i;
    }
    if (lat.top_ < 0) throw InternalError("the worker-quasi-stable set has no maximum element");

    // b covers a iff b ≻ a with nothing strictly between them; an
    // intermediate is any c with b ≻ c and c ≻ a.
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (below.get(b, a) && !detail::BitMatrix::cross_intersect(below, b, above, a))
                lat.covers_.emplace_back(a, b);
    std::sort(lat.covers_.begin(), lat.covers_.end());
    return lat;
}

// Greatest lower bound, computed by search: the Blair-maximum of the common
// lower bounds within the enumerated set (nonempty, since the bottom always
// qualifies; unique by the lattice theorem).
inline Matching meet(const Market& m, const WqsLattice& lat, const Matching& a, const Matching& b) {
    std::optional<int> ia = lat.index_of(a);
    if (!ia) throw NotInLatticeError("meet: not an element of the lattice: " + format_matching(m, a));
    std::optional<int> ib = lat.index_of(b);
    if (!ib) throw NotInLatticeError("meet: not an element of the lattice: " + format_matching(m, b));

    std::vector<int> lower;
    for (int k = 0; k < lat.size(); ++k)
        if (lat.dominates(*ia, k) && lat.dominates(*ib, k)) lower.push_back(k);
    // The theorem guarantees a unique maximum, so a single pass that climbs
    // whenever possible ends on it; the verification pass makes the
    // guarantee checked rather than assumed.
    int best = lower.front();  // nonempty: the bottom is a common lower bound
    for (int k : lower)
        if (lat.dominates(k, best)) best = k;
    for (int k : lower)
        if (!lat.dominates(best, k))
            throw InternalError("common lower bounds of " + format_matching(m, a) + " and " +
                                format_matching(m, b) +
                                " have no maximum; the lattice theorem rules this out");
    return lat.elements()[best];
}

// DOT rendering of the Hasse diagram, bottom-up, one node per element in
// canonical order, highlighted nodes drawn with penwidth=2.
inline std::string export_hasse(const Market& m, const WqsLattice& lat,
                                const std::vector<Matching>& highlight = {}) {
    std::string out = "digraph wqs {\n  rankdir=BT;\n";
    for (int i = 0; i < lat.size(); ++i) {
        out += "  m" + std::to_string(i) + " [label=\"" + format_matching(m, lat.elements()[i]) + "\"";
        if (std::find(highlight.begin(), highlight.end(), lat.elements()[i]) != highlight.end())
            out += ", penwidth=2";
        out += "];\n";
    }
    for (const auto& [lower, upper] : lat.covers())
        out += "  m" + std::to_string(lower) + " -> m" + std::to_string(upper) + ";\n";
    return out + "}\n";
}

}  // namespace wqs
