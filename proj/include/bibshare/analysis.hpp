/*
 * Copyright 2026 The bibshare authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// The study orchestration layer: per-(discipline, year) impact-share
// breakdowns, pooled density profiles, and FIC covariate analyses, collected
// into a flat matrix and emitted as a deterministic CSV.
//
// Grouping is whole-counting: a record whose categories map to k disciplines
// appears in all k per-discipline groups and exactly once in "Total".
// Records whose categories are all unmapped appear in "Total" only. Rows
// whose total outcome is zero are omitted with a notice.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "bibshare/common.hpp"
#include "bibshare/corpus.hpp"
#include "bibshare/inequality.hpp"
#include "bibshare/linking.hpp"
#include "bibshare/normalize.hpp"
#include "bibshare/parallel.hpp"

namespace bibshare {

/// Paper attributes whose relation to citation impact is analyzed.
enum class FicKind : std::uint8_t { AllRefs, LinkedRefs, Authors, Pages, Jif };

inline const char* to_token(FicKind f) {
    switch (f) {
        case FicKind::AllRefs: return "all_refs";
        case FicKind::LinkedRefs: return "linked_refs";
        case FicKind::Authors: return "authors";
        case FicKind::Pages: return "pages";
        case FicKind::Jif: return "jif";
    }
    return "?";
}

inline std::optional<FicKind> fic_from_token(std::string_view s) {
    for (FicKind f : {FicKind::AllRefs, FicKind::LinkedRefs, FicKind::Authors, FicKind::Pages, FicKind::Jif})
        if (s == to_token(f)) return f;
    return std::nullopt;
}

/// Ranking column of a report row: the outcome itself or one FIC.
struct RankingKind {
    bool self = true;
    FicKind fic = FicKind::AllRefs;

    static RankingKind self_rank() { return {}; }
    static RankingKind by(FicKind f) { return {false, f}; }

    std::string token() const { return self ? "self" : to_token(fic); }
    int order() const { return self ? 0 : 1 + static_cast<int>(fic); }
    bool operator==(const RankingKind&) const = default;
};

enum class OutcomeKind : std::uint8_t { TimesCited, Mncs, LinkedRefs };

inline const char* to_token(OutcomeKind o) {
    switch (o) {
        case OutcomeKind::TimesCited: return "times_cited";
        case OutcomeKind::Mncs: return "mncs";
        case OutcomeKind::LinkedRefs: return "linked_refs";
    }
    return "?";
}

struct AnalysisRow {
    std::string discipline;       // discipline token or "Total"
    std::optional<int> pub_year;  // nullopt: pooled over the snapshot's years
    RankingKind ranking;
    OutcomeKind outcome = OutcomeKind::TimesCited;
    std::optional<WindowSpec> window;  // none for linked-reference outcomes
    ShareBreakdown breakdown;
    std::size_t n_missing = 0;  // excluded for a missing ranking attribute

    std::string window_token() const { return window ? window->to_string() : "none"; }
};

struct AnalysisMatrix {
    std::vector<AnalysisRow> rows;
    std::vector<std::string> notices;

    void merge(AnalysisMatrix&& other) {
        rows.insert(rows.end(), std::make_move_iterator(other.rows.begin()),
                    std::make_move_iterator(other.rows.end()));
        notices.insert(notices.end(), std::make_move_iterator(other.notices.begin()),
                       std::make_move_iterator(other.notices.end()));
    }
};

namespace detail {

struct RecordGroup {
    std::string name;             // discipline token or "Total"
    std::optional<int> pub_year;  // nullopt when pooled
    std::vector<std::uint32_t> members;
};

/// Whole-counting groups in deterministic order: disciplines first (fixed
/// enum order), then Total; years ascending inside each.
inline std::vector<RecordGroup> build_groups(const CorpusSnapshot& snapshot, bool per_year) {
    const auto& records = snapshot.records();
    std::map<std::pair<int, std::optional<int>>, RecordGroup> groups;  // (disc order, year)
    auto slot = [&](int disc_order, const std::string& name,
                    std::optional<int> year) -> RecordGroup& {
        auto key = std::make_pair(disc_order, year);
        auto it = groups.find(key);
        if (it == groups.end()) {
            it = groups.emplace(key, RecordGroup{name, year, {}}).first;
        }
        return it->second;
    };

    for (std::uint32_t i = 0; i < records.size(); ++i) {
        const auto year = per_year ? std::optional<int>(records[i].pub_year) : std::nullopt;
        const auto set = assign_disciplines(records[i], snapshot.scheme());
        for (Discipline d : kAllDisciplines)
            if (set.contains(d)) slot(static_cast<int>(d), to_string(d), year).members.push_back(i);
        slot(6, "Total", year).members.push_back(i);
    }

    std::vector<RecordGroup> out;
    out.reserve(groups.size());
    for (auto& [key, group] : groups) out.push_back(std::move(group));
    return out;
}

inline std::string row_note(const std::string& group, std::optional<int> year, const std::string& what) {
    std::string y = year ? std::to_string(*year) : std::string("pooled");
    return "row omitted (" + group + ", " + y + "): " + what;
}

// Open windows must reach at least to the newest publication year.
inline void check_window(const CorpusSnapshot& snapshot, const WindowSpec& window) {
    if (window.kind != WindowSpec::Kind::Open) return;
    const auto& per_year = snapshot.stats().per_year;
    if (per_year.empty()) return;
    const int latest = per_year.rbegin()->first;
    if (window.horizon_year < latest)
        throw Error("open window horizon " + std::to_string(window.horizon_year) +
                    " precedes the latest publication year " + std::to_string(latest));
}

}  // namespace detail

/// Citation and linked-reference breakdowns, self-ranked, per discipline and
/// year plus Total. Linked-reference rows carry outcome `linked_refs` and no
/// window.
inline AnalysisMatrix impact_distribution(const CorpusSnapshot& snapshot, const CitationIndex& index,
                                          const WindowSpec& window, const CutSpec& cuts = {},
                                          int threads = 1) {
    detail::check_window(snapshot, window);
    const int horizon = data_horizon(snapshot);
    const auto groups = detail::build_groups(snapshot, true);
    const auto& records = snapshot.records();

    AnalysisMatrix matrix;
    struct Slot {
        std::optional<AnalysisRow> cited, linked;
        std::string note_cited, note_linked;
    };
    std::vector<Slot> slots(groups.size());

    parallel_chunks(groups.size(), 1, threads, [&](std::size_t g, std::size_t, std::size_t) {
        const auto& group = groups[g];
        std::vector<double> cited, linked;
        cited.reserve(group.members.size());
        linked.reserve(group.members.size());
        for (auto i : group.members) {
            cited.push_back(static_cast<double>(citations_for(records[i], &index, window, horizon).count));
            linked.push_back(static_cast<double>(index.at(records[i].record_id).linked_ref_count));
        }
        auto emit = [&](std::vector<double>& outcomes, OutcomeKind kind, std::optional<AnalysisRow>& dst,
                        std::string& note) {
            double total = 0.0;
            for (double v : outcomes) total += v;
            if (outcomes.empty() || total <= 0.0) {
                note = detail::row_note(group.name, group.pub_year,
                                        std::string("zero total ") + to_token(kind));
                return;
            }
            AnalysisRow row;
            row.discipline = group.name;
            row.pub_year = group.pub_year;
            row.ranking = RankingKind::self_rank();
            row.outcome = kind;
            if (kind != OutcomeKind::LinkedRefs) row.window = window;
            row.breakdown = percentile_shares(outcomes, cuts);
            dst = std::move(row);
        };
        emit(cited, OutcomeKind::TimesCited, slots[g].cited, slots[g].note_cited);
        emit(linked, OutcomeKind::LinkedRefs, slots[g].linked, slots[g].note_linked);
    });

    for (auto& slot : slots) {
        if (slot.cited) matrix.rows.push_back(std::move(*slot.cited));
        if (!slot.note_cited.empty()) matrix.notices.push_back(slot.note_cited);
        if (slot.linked) matrix.rows.push_back(std::move(*slot.linked));
        if (!slot.note_linked.empty()) matrix.notices.push_back(slot.note_linked);
    }
    return matrix;
}

/// Per-discipline share densities under a fixed window, pooled across the
/// snapshot's publication years (each record counted in its own window).
inline AnalysisMatrix density_profile(const CorpusSnapshot& snapshot, const CitationIndex& index,
                                      const WindowSpec& fixed_window, const CutSpec& cuts = {},
                                      int threads = 1) {
    if (fixed_window.kind != WindowSpec::Kind::Fixed)
        throw Error("density_profile: requires a fixed window");
    const int horizon = data_horizon(snapshot);
    const auto groups = detail::build_groups(snapshot, false);
    const auto& records = snapshot.records();

    AnalysisMatrix matrix;
    std::vector<std::optional<AnalysisRow>> slots(groups.size());
    std::vector<std::string> notes(groups.size());

    parallel_chunks(groups.size(), 1, threads, [&](std::size_t g, std::size_t, std::size_t) {
        const auto& group = groups[g];
        std::vector<double> outcomes;
        outcomes.reserve(group.members.size());
        for (auto i : group.members)
            outcomes.push_back(
                static_cast<double>(citations_for(records[i], &index, fixed_window, horizon).count));
        double total = 0.0;
        for (double v : outcomes) total += v;
        if (outcomes.empty() || total <= 0.0) {
            notes[g] = detail::row_note(group.name, group.pub_year, "zero total times_cited (pooled)");
            return;
        }
        AnalysisRow row;
        row.discipline = group.name;
        row.pub_year = std::nullopt;
        row.ranking = RankingKind::self_rank();
        row.outcome = OutcomeKind::TimesCited;
        row.window = fixed_window;
        row.breakdown = percentile_shares(outcomes, cuts);
        slots[g] = std::move(row);
    });

    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (slots[g]) matrix.rows.push_back(std::move(*slots[g]));
        if (!notes[g].empty()) matrix.notices.push_back(notes[g]);
    }
    return matrix;
}

/// The ranking attribute of a record, absent when the record misses it.
inline std::optional<double> fic_value(const PublicationRecord& record, const CitationIndex& index,
                                       FicKind fic) {
    switch (fic) {
        case FicKind::AllRefs: return static_cast<double>(record.cited_refs.size());
        case FicKind::LinkedRefs: return static_cast<double>(index.at(record.record_id).linked_ref_count);
        case FicKind::Authors: return static_cast<double>(record.author_count);
        case FicKind::Pages:
            if (!record.page_count) return std::nullopt;
            return static_cast<double>(*record.page_count);
        case FicKind::Jif:
            if (!record.jif) return std::nullopt;
            return *record.jif;
    }
    return std::nullopt;
}

/// Citation impact (raw or normalized) ranked by one FIC, per discipline and
/// year plus Total. Records missing the attribute are excluded and counted.
inline AnalysisMatrix fic_covariate(const CorpusSnapshot& snapshot, const CitationIndex& index,
                                    const CellTable* cells, FicKind fic, OutcomeKind outcome,
                                    const WindowSpec& window, const CutSpec& cuts = {},
                                    int threads = 1) {
    if (outcome == OutcomeKind::LinkedRefs)
        throw Error("fic_covariate: outcome must be times_cited or mncs");
    if (outcome == OutcomeKind::Mncs) {
        if (!cells) throw Error("fic_covariate: mncs outcome needs reference cells");
        if (!(cells->window() == window))
            throw Error("fic_covariate: cells were computed under a different window");
    }
    detail::check_window(snapshot, window);
    const int horizon = data_horizon(snapshot);
    const auto groups = detail::build_groups(snapshot, true);
    const auto& records = snapshot.records();

    AnalysisMatrix matrix;
    std::vector<std::optional<AnalysisRow>> slots(groups.size());
    std::vector<std::string> notes(groups.size());

    parallel_chunks(groups.size(), 1, threads, [&](std::size_t g, std::size_t, std::size_t) {
        const auto& group = groups[g];
        std::vector<double> outcomes, ranking;
        std::size_t missing = 0;
        for (auto i : group.members) {
            const auto value = fic_value(records[i], index, fic);
            if (!value) {
                ++missing;
                continue;
            }
            ranking.push_back(*value);
            if (outcome == OutcomeKind::TimesCited) {
                outcomes.push_back(
                    static_cast<double>(citations_for(records[i], &index, window, horizon).count));
            } else {
                outcomes.push_back(mncs(records[i], *cells, &index, window, horizon).mncs);
            }
        }
        double total = 0.0;
        for (double v : outcomes) total += v;
        if (outcomes.empty() || total <= 0.0) {
            notes[g] = detail::row_note(group.name, group.pub_year,
                                        outcomes.empty() ? std::string("all records miss ") + to_token(fic)
                                                         : std::string("zero total ") + to_token(outcome));
            return;
        }
        AnalysisRow row;
        row.discipline = group.name;
        row.pub_year = group.pub_year;
        row.ranking = RankingKind::by(fic);
        row.outcome = outcome;
        row.window = window;
        row.breakdown = percentile_shares_by(outcomes, ranking, cuts);
        row.n_missing = missing;
        slots[g] = std::move(row);
    });

    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (slots[g]) matrix.rows.push_back(std::move(*slots[g]));
        if (!notes[g].empty()) matrix.notices.push_back(notes[g]);
    }
    return matrix;
}

namespace detail {

inline std::tuple<std::string, int, int, int, std::string> row_sort_key(const AnalysisRow& row) {
    return {row.discipline, row.pub_year.value_or(-1), row.ranking.order(),
            static_cast<int>(row.outcome), row.window_token()};
}

}  // namespace detail

/// Report CSV, deterministically ordered; numbers carry 9 significant digits.
inline void emit_report(const AnalysisMatrix& matrix, std::ostream& out) {
    if (matrix.rows.empty()) throw Error("emit_report: empty matrix");
    std::vector<const AnalysisRow*> ordered;
    ordered.reserve(matrix.rows.size());
    for (const auto& row : matrix.rows) ordered.push_back(&row);
    std::sort(ordered.begin(), ordered.end(), [](const AnalysisRow* a, const AnalysisRow* b) {
        return detail::row_sort_key(*a) < detail::row_sort_key(*b);
    });

    out << "discipline,pub_year,ranking,outcome,window,group,width_pct,share_pct,density,gini,"
           "n_papers,total_outcome\n";
    for (const AnalysisRow* row : ordered) {
        const auto& b = row->breakdown;
        for (std::size_t g = 0; g < b.shares.size(); ++g) {
            out << row->discipline << ','
                << (row->pub_year ? std::to_string(*row->pub_year) : std::string("pooled")) << ','
                << row->ranking.token() << ',' << to_token(row->outcome) << ',' << row->window_token()
                << ',' << b.labels[g] << ',' << format_sig(b.widths[g]) << ','
                << format_sig(b.shares[g]) << ',' << format_sig(b.densities[g]) << ','
                << format_sig(b.gini) << ',' << b.n_units << ',' << format_sig(b.total_outcome)
                << '\n';
        }
    }
}

// --- matrix persistence (for re-emitting reports without recomputation) ---

inline nlohmann::json matrix_to_json(const AnalysisMatrix& matrix) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : matrix.rows) {
        nlohmann::json r;
        r["discipline"] = row.discipline;
        if (row.pub_year)
            r["pub_year"] = *row.pub_year;
        else
            r["pub_year"] = "pooled";
        r["ranking"] = row.ranking.token();
        r["outcome"] = to_token(row.outcome);
        r["window"] = row.window_token();
        r["labels"] = row.breakdown.labels;
        r["widths"] = row.breakdown.widths;
        r["shares"] = row.breakdown.shares;
        r["densities"] = row.breakdown.densities;
        r["n_units"] = row.breakdown.n_units;
        r["total_outcome"] = row.breakdown.total_outcome;
        r["gini"] = row.breakdown.gini;
        r["gini_zero_total"] = row.breakdown.gini_zero_total;
        r["n_missing"] = row.n_missing;
        rows.push_back(std::move(r));
    }
    return nlohmann::json{{"rows", std::move(rows)}, {"notices", matrix.notices}};
}

inline AnalysisMatrix matrix_from_json(const nlohmann::json& j) {
    AnalysisMatrix matrix;
    if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array())
        throw SchemaError("matrix json: missing rows array");
    for (const auto& r : j["rows"]) {
        AnalysisRow row;
        row.discipline = r.at("discipline").get<std::string>();
        if (r.at("pub_year").is_number_integer())
            row.pub_year = r.at("pub_year").get<int>();
        const std::string ranking = r.at("ranking").get<std::string>();
        if (ranking == "self") {
            row.ranking = RankingKind::self_rank();
        } else if (auto f = fic_from_token(ranking)) {
            row.ranking = RankingKind::by(*f);
        } else {
            throw SchemaError("matrix json: unknown ranking token " + ranking);
        }
        const std::string outcome = r.at("outcome").get<std::string>();
        if (outcome == "times_cited")
            row.outcome = OutcomeKind::TimesCited;
        else if (outcome == "mncs")
            row.outcome = OutcomeKind::Mncs;
        else if (outcome == "linked_refs")
            row.outcome = OutcomeKind::LinkedRefs;
        else
            throw SchemaError("matrix json: unknown outcome token " + outcome);
        const std::string window = r.at("window").get<std::string>();
        if (window != "none") row.window = WindowSpec::parse(window);
        row.breakdown.labels = r.at("labels").get<std::vector<std::string>>();
        row.breakdown.widths = r.at("widths").get<std::vector<double>>();
        row.breakdown.shares = r.at("shares").get<std::vector<double>>();
        row.breakdown.densities = r.at("densities").get<std::vector<double>>();
        row.breakdown.n_units = r.at("n_units").get<std::size_t>();
        row.breakdown.total_outcome = r.at("total_outcome").get<double>();
        row.breakdown.gini = r.at("gini").get<double>();
        row.breakdown.gini_zero_total = r.value("gini_zero_total", false);
        row.n_missing = r.value("n_missing", std::size_t{0});
        matrix.rows.push_back(std::move(row));
    }
    if (j.contains("notices")) matrix.notices = j["notices"].get<std::vector<std::string>>();
    return matrix;
}

}  // namespace bibshare
