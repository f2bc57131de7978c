// tarski.hpp: the re-stabilization operator on the worker-quasi-stable
// lattice. One round has every unemployed blocking worker propose to her
// single best blocking firm, then every firm re-choose from its current set
// plus the proposals. Iterating from any worker-quasi-stable matching
// reaches a stable matching; the fixed points are exactly the stable set.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wqs/lattice.hpp"
#include "wqs/matching.hpp"

#include "json.hpp"

namespace wqs {

// One synchronized round: the selected blocking pairs, the proposals they
// induce per firm, and the matchings before and after the firms re-choose.
struct ProposalRound {
    std::vector<BlockingPair> star_pairs;       // one per proposing worker, (firm, worker) sorted
    std::vector<WorkerSet> proposals_by_firm;   // indexed by firm
    Matching before;
    Matching after;
};

struct StabilizationTrace {
    std::vector<ProposalRound> rounds;  // only rounds that changed the matching
    Matching fixed_point;
};

// For each worker involved in any blocking pair, the pair with her most
// preferred blocking firm. Uniqueness is guaranteed by strict preferences.
inline std::vector<BlockingPair> star_blocking_pairs(const Market& m, const Matching& mu) {
    detail::require_wqs(m, mu, "star_blocking_pairs");
    std::vector<std::optional<FirmId>> best(m.worker_count());
    for (const BlockingPair& bp : blocking_pairs(m, mu)) {
        std::optional<FirmId>& cur = best[bp.worker.index];
        if (!cur) {
            cur = bp.firm;
        } else if (m.worker_prefers(bp.worker, bp.firm, *cur)) {
            cur = bp.firm;
        } else if (!m.worker_prefers(bp.worker, *cur, bp.firm)) {
            throw InternalError("two blocking firms tie for worker " + m.worker_name(bp.worker) +
                                "; strict preferences rule this out");
        }
    }
    std::vector<BlockingPair> out;
    for (int fi = 0; fi < m.firm_count(); ++fi)
        for (int wi = 0; wi < m.worker_count(); ++wi)
            if (best[wi] && best[wi]->index == fi) out.push_back({FirmId{fi}, WorkerId{wi}});
    return out;
}

// Applies one round of the operator. The result is again worker-quasi-stable
// and weakly Blair-dominates the input.
inline ProposalRound tarski_step(const Market& m, const Matching& mu) {
    m.require_substitutable();
    ProposalRound round;
    round.before = mu;
    round.star_pairs = star_blocking_pairs(m, mu);
    round.proposals_by_firm.assign(m.firm_count(), {});
    for (const BlockingPair& bp : round.star_pairs)
        round.proposals_by_firm[bp.firm.index].add(bp.worker);

    std::vector<WorkerSet> by_firm(m.firm_count());
    for (int fi = 0; fi < m.firm_count(); ++fi) {
        FirmId f{fi};
        by_firm[fi] = m.choice(f, mu.firm_side(f) | round.proposals_by_firm[fi]);
    }
    try {
        round.after = Matching::from_firm_sides(m, std::move(by_firm));
    } catch (const OverlapError& e) {
        throw InternalError(std::string("operator round produced a doubly-assigned worker, ") +
                            "which the theory rules out: " + e.what());
    }
    return round;
}

// Iterates the operator from mu until it stops moving, recording every
// changing round. max_rounds = 0 means the theoretical termination bound
// (the matching strictly improves in a finite poset); exceeding the cap is
// a bug, never a valid outcome.
inline StabilizationTrace stabilize(const Market& m, const Matching& mu, std::uint64_t max_rounds = 0) {
    m.require_substitutable();
    detail::require_wqs(m, mu, "stabilize");
    if (max_rounds == 0) max_rounds = detail::sat_pow(m.firm_count() + 1, m.worker_count());

    StabilizationTrace trace;
    Matching current = mu;
    while (true) {
        ProposalRound round = tarski_step(m, current);
        if (round.after == round.before) break;
        if (!detail::blair_ge(m, round.after, round.before))
            throw InternalError("operator round failed to Blair-improve " + format_matching(m, round.before));
        current = round.after;
        trace.rounds.push_back(std::move(round));
        if (trace.rounds.size() > max_rounds)
            throw InternalError("round cap " + std::to_string(max_rounds) +
                                " exceeded; the operator must terminate");
    }
    trace.fixed_point = current;
    if (!is_stable(m, trace.fixed_point))
        throw InternalError("fixed point " + format_matching(m, trace.fixed_point) + " is not stable");
    return trace;
}

struct IsotonicityVerdict {
    bool holds = false;
    std::optional<std::pair<Matching, Matching>> witness;  // comparable pair whose images are not
};

// Exhaustive isotonicity sweep: whenever one element dominates another,
// their images under the operator compare the same way. A failure would
// falsify the theory and is reported as a witness, not thrown.
inline IsotonicityVerdict check_isotone(const Market& m, const WqsLattice& lat) {
    const int n = lat.size();
    std::vector<int> image(n);
    for (int i = 0; i < n; ++i) {
        std::optional<int> idx = lat.index_of(tarski_step(m, lat.elements()[i]).after);
        if (!idx)
            throw InternalError("operator image of " + format_matching(m, lat.elements()[i]) +
                                " is not worker-quasi-stable");
        image[i] = *idx;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (lat.dominates(i, j) && !lat.dominates(image[i], image[j]))
                return {false, std::make_pair(lat.elements()[i], lat.elements()[j])};
    return {true, std::nullopt};
}

// The fixed points of the operator over the enumerated set. The theory
// pins these down as exactly the stable matchings and guarantees at least
// one; both facts are re-checked here and violations are bugs.
inline std::vector<Matching> fixed_points(const Market& m, const WqsLattice& lat) {
    std::vector<Matching> out;
    for (const Matching& mu : lat.elements()) {
        bool fixed = tarski_step(m, mu).after == mu;
        if (fixed != is_stable(m, mu))
            throw InternalError("fixed points of the operator must be exactly the stable matchings; " +
                                format_matching(m, mu) + " disagrees");
        if (fixed) out.push_back(mu);
    }
    if (out.empty()) throw InternalError("the operator must have at least one fixed point");
    return out;
}

// The stable matching every worker weakly prefers to every other stable
// matching. Exists whenever firms are substitutable; found by a unanimity
// scan over the enumerated stable set.
inline Matching worker_optimal_stable(const Market& m, const WqsLattice& lat) {
    m.require_substitutable();
    std::vector<Matching> stable = fixed_points(m, lat);
    for (const Matching& candidate : stable) {
        bool unanimous = true;
        for (const Matching& other : stable) {
            for (int wi = 0; wi < m.worker_count() && unanimous; ++wi) {
                WorkerId w{wi};
                if (m.worker_prefers(w, other.worker_side(w), candidate.worker_side(w))) unanimous = false;
            }
            if (!unanimous) break;
        }
        if (unanimous) return candidate;
    }
    throw InternalError("no worker-unanimous optimum in the stable set; "
                        "substitutability guarantees one exists");
}

struct SweepVerdict {
    bool holds = false;
    std::optional<std::pair<Matching, Matching>> witness;
};

// Under LAD, joining any worker-quasi-stable matching with a stable one
// lands in the stable set. Refuses to run without LAD, where it is false.
inline SweepVerdict check_join_with_stable(const Market& m, const WqsLattice& lat) {
    m.require_lad();
    std::vector<Matching> stable = fixed_points(m, lat);
    for (const Matching& mu : lat.elements())
        for (const Matching& s : stable)
            if (!is_stable(m, join(m, mu, s))) return {false, std::make_pair(mu, s)};
    return {true, std::nullopt};
}

// Under LAD, the fixed point reached from mu is the join of mu with the
// worker-optimal stable matching.
inline SweepVerdict check_fixed_point_formula(const Market& m, const WqsLattice& lat) {
    m.require_lad();
    Matching mw = worker_optimal_stable(m, lat);
    for (const Matching& mu : lat.elements()) {
        Matching reached = stabilize(m, mu).fixed_point;
        if (!(reached == join(m, mu, mw))) return {false, std::make_pair(mu, reached)};
    }
    return {true, std::nullopt};
}

struct CorollaryVerdict {
    bool hire_bound = false;         // no worker-quasi-stable matching hires more than a stable one
    bool above_optimum_stable = false;  // dominating the worker-optimal stable matching implies stable
    bool rural_hospital = false;     // per-firm hire counts constant across the stable set
    std::string detail;              // first violation, when any

    bool holds() const { return hire_bound && above_optimum_stable && rural_hospital; }
};

inline CorollaryVerdict check_corollaries(const Market& m, const WqsLattice& lat) {
    m.require_lad();
    CorollaryVerdict v;
    v.hire_bound = v.above_optimum_stable = v.rural_hospital = true;

    std::vector<Matching> stable = fixed_points(m, lat);
    for (const Matching& s : stable) {
        for (int fi = 0; fi < m.firm_count(); ++fi) {
            if (s.firm_side(FirmId{fi}).size() != stable.front().firm_side(FirmId{fi}).size()) {
                v.rural_hospital = false;
                v.detail = "firm " + m.firm_name(FirmId{fi}) + " hires differently in " +
                           format_matching(m, s) + " and " + format_matching(m, stable.front());
            }
        }
    }

    const int stable_total = stable.front().total_hired();
    Matching mw = worker_optimal_stable(m, lat);
    int mw_index = *lat.index_of(mw);
    for (int i = 0; i < lat.size(); ++i) {
        const Matching& mu = lat.elements()[i];
        if (mu.total_hired() > stable_total && v.hire_bound) {
            v.hire_bound = false;
            v.detail = format_matching(m, mu) + " hires " + std::to_string(mu.total_hired()) +
                       " > stable total " + std::to_string(stable_total);
        }
        if (lat.dominates(i, mw_index) && !is_stable(m, mu) && v.above_optimum_stable) {
            v.above_optimum_stable = false;
            v.detail = format_matching(m, mu) + " dominates the worker-optimal stable matching but is unstable";
        }
    }
    return v;
}

// Trace rendering: text per round plus the fixed point, and a JSON mirror
// with the same fields.
inline std::string format_trace(const Market& m, const StabilizationTrace& trace) {
    std::string out;
    for (size_t k = 0; k < trace.rounds.size(); ++k) {
        const ProposalRound& r = trace.rounds[k];
        out += "round " + std::to_string(k + 1) + ":\n";
        out += "star:";
        for (const BlockingPair& bp : r.star_pairs) out += " " + format_blocking_pair(m, bp);
        out += "\n";
        out += "T -> " + format_matching(m, r.after) + "\n";
    }
    out += "fixed point: " + format_matching(m, trace.fixed_point) + "\n";
    return out;
}

inline nlohmann::ordered_json trace_to_json(const Market& m, const StabilizationTrace& trace) {
    nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
    for (size_t k = 0; k < trace.rounds.size(); ++k) {
        const ProposalRound& r = trace.rounds[k];
        nlohmann::ordered_json star = nlohmann::ordered_json::array();
        for (const BlockingPair& bp : r.star_pairs)
            star.push_back({{"firm", m.firm_name(bp.firm)}, {"worker", m.worker_name(bp.worker)}});
        nlohmann::ordered_json proposals = nlohmann::ordered_json::object();
        for (int fi = 0; fi < m.firm_count(); ++fi) {
            nlohmann::ordered_json names = nlohmann::ordered_json::array();
            for (WorkerId w : r.proposals_by_firm[fi]) names.push_back(m.worker_name(w));
            proposals[m.firm_name(FirmId{fi})] = names;
        }
        rounds.push_back({{"round", k + 1},
                          {"star", star},
                          {"proposals", proposals},
                          {"before", format_matching(m, r.before)},
                          {"after", format_matching(m, r.after)}});
    }
    return {{"rounds", rounds}, {"fixed_point", format_matching(m, trace.fixed_point)}};
}

}  // namespace wqs
