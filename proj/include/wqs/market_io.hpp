// market_io.hpp: the line-oriented market file grammar.
//
//   # comment to end of line
//   firms: f1 f2 ...
//   workers: w1 w2 ...
//   pref <worker>: <firm> <firm> ...            strict descending
//   pref <firm>: {a b} {c} ...                  strict descending subset list
//   pref <firm>: responsive q=<k>: <w> <w> ...  expanded at parse time
//
// Omitted agents in a ranking are unacceptable; an omitted or empty pref
// line is an empty ranking. Serialization re-emits the grammar with agents
// in declaration order and subset members sorted by worker index, so
// parse ∘ serialize ∘ parse is the identity.
#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wqs/market.hpp"

namespace wqs {

namespace detail {

inline bool name_char_ok(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '{' && c != '}' && c != ':' && c != ',' &&
           c != '(' && c != ')' && c != '#';
}

class LineScanner {
  public:
    LineScanner(std::string_view text, int line_no) : text_(text), line_(line_no) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    int col() const { return static_cast<int>(pos_) + 1; }
    int line() const { return line_; }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c, const std::string& what) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) throw ParseError(line_, col(), what);
        ++pos_;
    }

    // Bare token: maximal run of name characters.
    std::string token(const std::string& what) {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() && name_char_ok(text_[pos_])) ++pos_;
        if (pos_ == start) throw ParseError(line_, static_cast<int>(start) + 1, what);
        return std::string(text_.substr(start, pos_ - start));
    }

  private:
    std::string_view text_;
    int line_;
    size_t pos_ = 0;
};

}  // namespace detail

inline Market parse_market(std::string_view text) {
    std::vector<std::string> firm_names, worker_names;
    std::vector<std::optional<std::vector<FirmId>>> worker_rankings;
    std::vector<std::optional<std::vector<WorkerSet>>> firm_rankings;
    int firms_line = 0, workers_line = 0;

    auto find_name = [](const std::vector<std::string>& names, std::string_view n) -> std::optional<int> {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return static_cast<int>(i);
        return std::nullopt;
    };

    auto check_new_name = [&](const std::string& n, detail::LineScanner& sc, int col) {
        if (n == "-") throw ParseError(sc.line(), col, "'-' is reserved and cannot name an agent");
        if (find_name(firm_names, n) || find_name(worker_names, n))
            throw ParseError(sc.line(), col, "duplicate agent name '" + n + "'");
    };

    int line_no = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        std::string_view raw =
            text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (size_t hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

        detail::LineScanner sc(raw, line_no);
        if (sc.at_end()) continue;

        int head_col = sc.col();
        std::string head = sc.token("expected a directive");
        if (head == "firms") {
            sc.expect(':', "expected ':' after 'firms'");
            if (firms_line) throw ParseError(line_no, head_col, "firms already declared");
            firms_line = line_no;
            while (!sc.at_end()) {
                int c = sc.col();
                std::string n = sc.token("expected a firm name");
                check_new_name(n, sc, c);
                firm_names.push_back(n);
            }
            if (firm_names.empty()) throw ParseError(line_no, sc.col(), "no firms declared");
            firm_rankings.resize(firm_names.size());
        } else if (head == "workers") {
            sc.expect(':', "expected ':' after 'workers'");
            if (workers_line) throw ParseError(line_no, head_col, "workers already declared");
            workers_line = line_no;
            while (!sc.at_end()) {
                int c = sc.col();
                std::string n = sc.token("expected a worker name");
                check_new_name(n, sc, c);
                worker_names.push_back(n);
            }
            if (worker_names.empty()) throw ParseError(line_no, sc.col(), "no workers declared");
            if (worker_names.size() > WorkerSet::kMaxWorkers)
                throw ParseError(line_no, head_col,
                                 "markets are capped at " + std::to_string(WorkerSet::kMaxWorkers) + " workers");
            worker_rankings.resize(worker_names.size());
        } else if (head == "pref") {
            if (!firms_line || !workers_line)
                throw ParseError(line_no, head_col, "pref lines must follow the firms: and workers: declarations");
            int owner_col = sc.col();
            std::string owner = sc.token("expected an agent name after 'pref'");
            sc.expect(':', "expected ':' after the agent name");

            if (std::optional<int> wi = find_name(worker_names, owner)) {
                if (worker_rankings[*wi]) throw ParseError(line_no, owner_col, "duplicate pref for '" + owner + "'");
                std::vector<FirmId> ranking;
                while (!sc.at_end()) {
                    int c = sc.col();
                    std::string n = sc.token("expected a firm name");
                    std::optional<int> fi = find_name(firm_names, n);
                    if (!fi) throw ParseError(line_no, c, "unknown firm '" + n + "'");
                    for (FirmId prev : ranking)
                        if (prev.index == *fi) throw ParseError(line_no, c, "duplicate firm '" + n + "' in ranking");
                    ranking.push_back(FirmId{*fi});
                }
                worker_rankings[*wi] = std::move(ranking);
            } else if (std::optional<int> fi = find_name(firm_names, owner)) {
                if (firm_rankings[*fi]) throw ParseError(line_no, owner_col, "duplicate pref for '" + owner + "'");
                if (sc.peek() != '{' && !sc.at_end()) {
                    int kw_col = sc.col();
                    std::string kw = sc.token("expected '{' or 'responsive'");
                    if (kw != "responsive") throw ParseError(line_no, kw_col, "expected '{' or 'responsive'");
                    int q_col = sc.col();
                    std::string q_tok = sc.token("expected q=<count>");
                    if (q_tok.size() < 3 || q_tok.substr(0, 2) != "q=")
                        throw ParseError(line_no, q_col, "expected q=<count>");
                    int quota = 0;
                    for (size_t i = 2; i < q_tok.size(); ++i) {
                        if (!std::isdigit(static_cast<unsigned char>(q_tok[i])))
                            throw ParseError(line_no, q_col, "expected q=<count>");
                        quota = quota * 10 + (q_tok[i] - '0');
                    }
                    if (quota < 1) throw ParseError(line_no, q_col, "quota must be at least 1");
                    sc.expect(':', "expected ':' after the quota");
                    std::vector<WorkerId> ranked;
                    while (!sc.at_end()) {
                        int c = sc.col();
                        std::string n = sc.token("expected a worker name");
                        std::optional<int> wi2 = find_name(worker_names, n);
                        if (!wi2) throw ParseError(line_no, c, "unknown worker '" + n + "'");
                        for (WorkerId prev : ranked)
                            if (prev.index == *wi2)
                                throw ParseError(line_no, c, "duplicate worker '" + n + "' in ranking");
                        ranked.push_back(WorkerId{*wi2});
                    }
                    try {
                        firm_rankings[*fi] = expand_responsive(ranked, quota);
                    } catch (const Error& e) {
                        throw ParseError(line_no, owner_col, e.what());
                    }
                } else {
                    std::vector<WorkerSet> ranking;
                    while (!sc.at_end()) {
                        int open_col = sc.col();
                        sc.expect('{', "expected '{'");
                        WorkerSet s;
                        while (sc.peek() != '}') {
                            if (sc.at_end()) throw ParseError(line_no, sc.col(), "unterminated subset");
                            int c = sc.col();
                            std::string n = sc.token("expected a worker name");
                            std::optional<int> wi2 = find_name(worker_names, n);
                            if (!wi2) throw ParseError(line_no, c, "unknown worker '" + n + "'");
                            if (s.contains(WorkerId{*wi2}))
                                throw ParseError(line_no, c, "duplicate worker '" + n + "' in subset");
                            s.add(WorkerId{*wi2});
                        }
                        sc.expect('}', "expected '}'");
                        if (s.empty())
                            throw ParseError(line_no, open_col, "the empty set is the implicit floor; '{}' is not allowed");
                        for (WorkerSet prev : ranking)
                            if (prev == s)
                                throw ParseError(line_no, open_col, "duplicate subset in ranking");
                        ranking.push_back(s);
                    }
                    firm_rankings[*fi] = std::move(ranking);
                }
            } else {
                throw ParseError(line_no, owner_col, "unknown agent '" + owner + "'");
            }
        } else {
            throw ParseError(line_no, head_col, "unknown directive '" + head + "'");
        }
    }

    if (firm_names.empty()) throw ParseError(line_no, 1, "no firms declared");
    if (worker_names.empty()) throw ParseError(line_no, 1, "no workers declared");

    std::vector<WorkerPreference> wprefs;
    for (size_t i = 0; i < worker_names.size(); ++i)
        wprefs.push_back({WorkerId{static_cast<int>(i)},
                          worker_rankings[i] ? std::move(*worker_rankings[i]) : std::vector<FirmId>{}});
    std::vector<FirmPreference> fprefs;
    for (size_t i = 0; i < firm_names.size(); ++i)
        fprefs.push_back({FirmId{static_cast<int>(i)},
                          firm_rankings[i] ? std::move(*firm_rankings[i]) : std::vector<WorkerSet>{}});
    return Market(std::move(firm_names), std::move(worker_names), std::move(wprefs), std::move(fprefs));
}

inline std::string serialize_market(const Market& m) {
    std::string out = "firms:";
    for (int i = 0; i < m.firm_count(); ++i) out += " " + m.firm_name(FirmId{i});
    out += "\nworkers:";
    for (int i = 0; i < m.worker_count(); ++i) out += " " + m.worker_name(WorkerId{i});
    out += "\n";
    for (int i = 0; i < m.worker_count(); ++i) {
        out += "pref " + m.worker_name(WorkerId{i}) + ":";
        for (FirmId f : m.worker_pref(WorkerId{i}).ranking) out += " " + m.firm_name(f);
        out += "\n";
    }
    for (int i = 0; i < m.firm_count(); ++i) {
        out += "pref " + m.firm_name(FirmId{i}) + ":";
        for (WorkerSet s : m.firm_pref(FirmId{i}).ranking) out += " " + m.format_worker_set(s);
        out += "\n";
    }
    return out;
}

}  // namespace wqs
