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

// Record schema, JSON-lines ingestion, validation, and the mapping from
// subject categories to the six OECD disciplines.
//
// Input is one JSON object per line. Required fields: record_id, pub_year,
// doc_type, journal_id, subject_categories (non-empty array), author_count.
// Optional: jif, page_count, cited_refs, citations_by_year, plus the
// matching-side identifiers doi / first_author_key / volume / first_page
// that the linking module consumes when present. Unknown fields are ignored.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bibshare/common.hpp"
#include "bibshare/parallel.hpp"

namespace bibshare {

enum class Discipline : std::uint8_t {
    NaturalSciences = 0,
    EngineeringTechnology,
    MedicalHealth,
    Agricultural,
    SocialSciences,
    Humanities,
};

inline constexpr std::array<Discipline, 6> kAllDisciplines{
    Discipline::NaturalSciences,  Discipline::EngineeringTechnology,
    Discipline::MedicalHealth,    Discipline::Agricultural,
    Discipline::SocialSciences,   Discipline::Humanities,
};

inline const char* to_string(Discipline d) {
    switch (d) {
        case Discipline::NaturalSciences: return "NaturalSciences";
        case Discipline::EngineeringTechnology: return "EngineeringTechnology";
        case Discipline::MedicalHealth: return "MedicalHealth";
        case Discipline::Agricultural: return "Agricultural";
        case Discipline::SocialSciences: return "SocialSciences";
        case Discipline::Humanities: return "Humanities";
    }
    return "?";
}

inline std::optional<Discipline> discipline_from_string(std::string_view s) {
    for (Discipline d : kAllDisciplines)
        if (s == to_string(d)) return d;
    return std::nullopt;
}

/// Set of disciplines as a 6-bit mask; empty means every category unmapped.
class DisciplineSet {
public:
    void insert(Discipline d) { bits_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(d)); }
    bool contains(Discipline d) const {
        return bits_ & static_cast<std::uint8_t>(1u << static_cast<unsigned>(d));
    }
    bool empty() const { return bits_ == 0; }
    std::size_t size() const { return static_cast<std::size_t>(__builtin_popcount(bits_)); }

    std::vector<Discipline> values() const {
        std::vector<Discipline> out;
        for (Discipline d : kAllDisciplines)
            if (contains(d)) out.push_back(d);
        return out;
    }
    bool operator==(const DisciplineSet&) const = default;

private:
    std::uint8_t bits_ = 0;
};

/// subject-category code -> OECD discipline, loaded from two-column CSV.
class FieldScheme {
public:
    void add(std::string category, Discipline d) { map_[std::move(category)] = d; }

    std::optional<Discipline> lookup(const std::string& category) const {
        auto it = map_.find(category);
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const { return map_.size(); }

    static FieldScheme from_stream(std::istream& in) {
        FieldScheme scheme;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string_view v = trim(line);
            if (v.empty() || v.front() == '#') continue;
            if (line_no == 1 && v.substr(0, 13) == "category_code") continue;  // optional header
            auto comma = v.find(',');
            if (comma == std::string_view::npos)
                throw SchemaError("scheme line " + std::to_string(line_no) + ": expected category_code,discipline");
            auto cat = trim(v.substr(0, comma));
            auto disc = discipline_from_string(trim(v.substr(comma + 1)));
            if (cat.empty() || !disc)
                throw SchemaError("scheme line " + std::to_string(line_no) + ": unknown discipline token");
            scheme.add(std::string(cat), *disc);
        }
        return scheme;
    }

    static FieldScheme from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open scheme file: " + path);
        return from_stream(in);
    }

private:
    std::unordered_map<std::string, Discipline> map_;
};

/// One cited reference. Empty strings mean "absent"; `raw` is always kept
/// verbatim. Valid references carry a doi or the full composite triple.
struct CitedReference {
    std::string doi;
    std::string first_author_key;
    std::optional<int> ref_year;
    std::string source_token;
    std::string volume;
    std::string first_page;
    std::string raw;

    bool has_doi() const { return !doi.empty(); }
    bool has_composite() const {
        return !first_author_key.empty() && ref_year.has_value() && !source_token.empty();
    }
};

/// Per-year counts as sorted (year, count) pairs.
using YearCounts = std::vector<std::pair<std::int32_t, std::uint32_t>>;

inline std::uint64_t year_counts_total(const YearCounts& yc) {
    std::uint64_t t = 0;
    for (auto [y, c] : yc) t += c;
    return t;
}

struct PublicationRecord {
    std::string record_id;
    int pub_year = 0;
    std::string doc_type;
    std::string journal_id;
    std::optional<double> jif;
    std::vector<std::string> subject_categories;
    int author_count = 1;
    std::optional<int> page_count;
    std::vector<CitedReference> cited_refs;
    std::optional<YearCounts> citations_by_year;  // pre-aggregated alternative to links

    // matching-side identifiers; optional, used by the linking module
    std::string doi;
    std::string first_author_key;
    std::string volume;
    std::string first_page;
};

struct IngestConfig {
    int min_year = 1900;
    int horizon_year = 2100;
    bool fatal_on_malformed = false;  // default: skip and log
    int threads = 1;
    std::size_t chunk_lines = 16384;
    std::size_t max_logged_rejects = 10000;
};

struct RejectedLine {
    std::size_t line_no = 0;
    std::string reason;
};

struct IngestStats {
    std::size_t n_records = 0;
    std::size_t n_rejected = 0;
    std::map<int, std::size_t> per_year;
    std::array<std::size_t, 6> per_discipline{};  // whole counting
    std::size_t n_all_unmapped = 0;               // kept, but in no discipline
    std::size_t n_missing_jif = 0;
    std::size_t n_missing_pages = 0;
    std::size_t n_with_citation_histogram = 0;
    int max_citation_year = 0;  // highest citing year seen in histograms
    std::vector<RejectedLine> rejects;            // first max_logged_rejects of them

    std::string summary() const {
        std::string s;
        s += "records=" + std::to_string(n_records);
        s += " rejected=" + std::to_string(n_rejected);
        for (const auto& [year, n] : per_year) s += " y" + std::to_string(year) + "=" + std::to_string(n);
        for (Discipline d : kAllDisciplines) {
            s += std::string(" ") + to_string(d) + "=" +
                 std::to_string(per_discipline[static_cast<std::size_t>(d)]);
        }
        s += " unmapped=" + std::to_string(n_all_unmapped);
        s += " missing_jif=" + std::to_string(n_missing_jif);
        s += " missing_pages=" + std::to_string(n_missing_pages);
        s += " with_histogram=" + std::to_string(n_with_citation_histogram);
        return s;
    }
};

/// Pure function of (record.subject_categories, scheme). Empty result means
/// every category was unmapped; such records stay in "Total" only.
inline DisciplineSet assign_disciplines(const PublicationRecord& record, const FieldScheme& scheme) {
    DisciplineSet set;
    for (const auto& cat : record.subject_categories) {
        if (auto d = scheme.lookup(cat)) set.insert(*d);
    }
    return set;
}

/// Immutable validated corpus. Statistics are derived at construction and
/// re-derivable from the contents.
class CorpusSnapshot {
public:
    CorpusSnapshot(std::vector<PublicationRecord> records, FieldScheme scheme, IngestStats stats)
        : records_(std::move(records)), scheme_(std::move(scheme)), stats_(std::move(stats)) {
        by_id_.reserve(records_.size() * 2);
        for (std::size_t i = 0; i < records_.size(); ++i) {
            auto [it, inserted] = by_id_.emplace(records_[i].record_id, i);
            if (!inserted) throw SchemaError("duplicate record_id: " + records_[i].record_id);
        }
        recompute_stats();
    }

    const std::vector<PublicationRecord>& records() const { return records_; }
    const FieldScheme& scheme() const { return scheme_; }
    const IngestStats& stats() const { return stats_; }
    std::size_t size() const { return records_.size(); }

    const PublicationRecord* find(const std::string& record_id) const {
        auto it = by_id_.find(record_id);
        return it == by_id_.end() ? nullptr : &records_[it->second];
    }

    std::optional<std::size_t> index_of(const std::string& record_id) const {
        auto it = by_id_.find(record_id);
        if (it == by_id_.end()) return std::nullopt;
        return it->second;
    }

    /// Consumes the snapshot, releasing its record storage.
    std::vector<PublicationRecord> take_records() && {
        by_id_.clear();
        return std::move(records_);
    }

private:
    void recompute_stats() {
        stats_.n_records = records_.size();
        stats_.per_year.clear();
        stats_.per_discipline.fill(0);
        stats_.n_all_unmapped = 0;
        stats_.n_missing_jif = 0;
        stats_.n_missing_pages = 0;
        stats_.n_with_citation_histogram = 0;
        stats_.max_citation_year = 0;
        for (const auto& r : records_) {
            ++stats_.per_year[r.pub_year];
            auto set = assign_disciplines(r, scheme_);
            if (set.empty()) ++stats_.n_all_unmapped;
            for (Discipline d : kAllDisciplines)
                if (set.contains(d)) ++stats_.per_discipline[static_cast<std::size_t>(d)];
            if (!r.jif) ++stats_.n_missing_jif;
            if (!r.page_count) ++stats_.n_missing_pages;
            if (r.citations_by_year) {
                ++stats_.n_with_citation_histogram;
                for (auto [y, c] : *r.citations_by_year)
                    stats_.max_citation_year = std::max(stats_.max_citation_year, static_cast<int>(y));
            }
        }
    }

    std::vector<PublicationRecord> records_;
    FieldScheme scheme_;
    IngestStats stats_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

namespace detail {

using json = nlohmann::json;

inline const char* extract_record(const json& j, const IngestConfig& cfg, PublicationRecord& out) {
    if (!j.is_object()) return "invalid json";

    auto str_field = [&](const char* name, std::string& dst, bool required) -> const char* {
        auto it = j.find(name);
        if (it == j.end()) return required ? "missing field" : nullptr;
        if (!it->is_string()) return "invalid field";
        dst = it->get<std::string>();
        if (required && dst.empty()) return "empty field";
        return nullptr;
    };

    if (str_field("record_id", out.record_id, true)) return "invalid record_id";
    if (str_field("doc_type", out.doc_type, true)) return "invalid doc_type";
    if (str_field("journal_id", out.journal_id, true)) return "invalid journal_id";

    auto py = j.find("pub_year");
    if (py == j.end() || !py->is_number_integer()) return "invalid year";
    out.pub_year = py->get<int>();
    if (out.pub_year < cfg.min_year || out.pub_year > cfg.horizon_year) return "invalid year";

    auto ac = j.find("author_count");
    if (ac == j.end() || !ac->is_number_integer() || ac->get<int>() < 1) return "invalid author_count";
    out.author_count = ac->get<int>();

    auto sc = j.find("subject_categories");
    if (sc == j.end() || !sc->is_array() || sc->empty()) return "invalid subject_categories";
    out.subject_categories.reserve(sc->size());
    for (const auto& c : *sc) {
        if (!c.is_string()) return "invalid subject_categories";
        out.subject_categories.push_back(c.get<std::string>());
    }

    if (auto it = j.find("jif"); it != j.end()) {
        if (!it->is_number() || it->get<double>() < 0.0) return "invalid jif";
        out.jif = it->get<double>();
    }
    if (auto it = j.find("page_count"); it != j.end()) {
        if (!it->is_number_integer() || it->get<int>() < 1) return "invalid page_count";
        out.page_count = it->get<int>();
    }

    str_field("doi", out.doi, false);
    str_field("first_author_key", out.first_author_key, false);
    str_field("volume", out.volume, false);
    str_field("first_page", out.first_page, false);

    if (auto it = j.find("cited_refs"); it != j.end()) {
        if (!it->is_array()) return "invalid cited_refs";
        out.cited_refs.reserve(it->size());
        for (const auto& rj : *it) {
            if (!rj.is_object()) return "invalid cited_ref";
            CitedReference ref;
            if (auto f = rj.find("doi"); f != rj.end() && f->is_string()) ref.doi = f->get<std::string>();
            if (auto f = rj.find("first_author_key"); f != rj.end() && f->is_string())
                ref.first_author_key = f->get<std::string>();
            if (auto f = rj.find("source_token"); f != rj.end() && f->is_string())
                ref.source_token = f->get<std::string>();
            if (auto f = rj.find("volume"); f != rj.end() && f->is_string()) ref.volume = f->get<std::string>();
            if (auto f = rj.find("first_page"); f != rj.end() && f->is_string())
                ref.first_page = f->get<std::string>();
            if (auto f = rj.find("ref_year"); f != rj.end()) {
                if (!f->is_number_integer()) return "invalid cited_ref";
                ref.ref_year = f->get<int>();
            }
            if (auto f = rj.find("raw"); f != rj.end() && f->is_string()) ref.raw = f->get<std::string>();
            if (!ref.has_doi() && !ref.has_composite()) return "invalid cited_ref";
            out.cited_refs.push_back(std::move(ref));
        }
    }

    if (auto it = j.find("citations_by_year"); it != j.end()) {
        if (!it->is_object()) return "invalid citations_by_year";
        YearCounts yc;
        yc.reserve(it->size());
        for (const auto& [key, val] : it->items()) {
            auto year = parse_int(key);
            if (!year || !val.is_number_integer() || val.get<std::int64_t>() < 0)
                return "invalid citations_by_year";
            yc.emplace_back(static_cast<std::int32_t>(*year),
                            static_cast<std::uint32_t>(val.get<std::int64_t>()));
        }
        std::sort(yc.begin(), yc.end());
        out.citations_by_year = std::move(yc);
    }

    return nullptr;
}

}  // namespace detail

/// Parses one JSON record line; returns the failure reason or fills `out`.
inline const char* parse_record_line(std::string_view line, const IngestConfig& cfg,
                                     PublicationRecord& out) {
    auto j = detail::json::parse(line, nullptr, false);
    if (j.is_discarded()) return "invalid json";
    return detail::extract_record(j, cfg, out);
}

/// Ingests a JSON-lines stream. Malformed lines are skipped and logged (or
/// fatal per config); duplicate record ids are always fatal. Chunks may be
/// parsed in parallel; the result is independent of the thread count.
inline CorpusSnapshot ingest_records(std::istream& in, FieldScheme scheme,
                                     const IngestConfig& cfg = {}) {
    std::vector<PublicationRecord> records;
    IngestStats stats;
    std::unordered_set<std::string> seen_ids;

    std::vector<std::string> lines;
    lines.reserve(cfg.chunk_lines);
    std::size_t base_line_no = 0;

    struct Slot {
        PublicationRecord record;
        const char* reason = nullptr;
        bool blank = false;
    };

    std::string line;
    bool eof = false;
    while (!eof) {
        lines.clear();
        while (lines.size() < cfg.chunk_lines) {
            if (!std::getline(in, line)) {
                eof = true;
                break;
            }
            lines.push_back(line);
        }
        if (lines.empty()) break;

        std::vector<Slot> slots(lines.size());
        parallel_chunks(lines.size(), 1024, cfg.threads,
                        [&](std::size_t, std::size_t begin, std::size_t end) {
                            for (std::size_t i = begin; i < end; ++i) {
                                std::string_view v = trim(lines[i]);
                                if (v.empty()) {
                                    slots[i].blank = true;
                                    continue;
                                }
                                slots[i].reason = parse_record_line(v, cfg, slots[i].record);
                            }
                        });

        for (std::size_t i = 0; i < slots.size(); ++i) {
            const std::size_t line_no = base_line_no + i + 1;
            if (slots[i].blank) continue;
            if (slots[i].reason) {
                if (cfg.fatal_on_malformed)
                    throw SchemaError("line " + std::to_string(line_no) + ": " + slots[i].reason);
                ++stats.n_rejected;
                if (stats.rejects.size() < cfg.max_logged_rejects)
                    stats.rejects.push_back({line_no, slots[i].reason});
                continue;
            }
            if (!seen_ids.insert(slots[i].record.record_id).second)
                throw SchemaError("duplicate record_id: " + slots[i].record.record_id);
            records.push_back(std::move(slots[i].record));
        }
        base_line_no += lines.size();
    }

    return CorpusSnapshot(std::move(records), std::move(scheme), std::move(stats));
}

inline CorpusSnapshot ingest_file(const std::string& path, FieldScheme scheme,
                                  const IngestConfig& cfg = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open records file: " + path);
    return ingest_records(in, std::move(scheme), cfg);
}

/// Sub-snapshot with doc_type == "article" and pub_year in `years`.
inline CorpusSnapshot filter_articles(const CorpusSnapshot& snapshot, const std::set<int>& years) {
    std::vector<PublicationRecord> kept;
    for (const auto& r : snapshot.records())
        if (r.doc_type == "article" && years.count(r.pub_year)) kept.push_back(r);
    IngestStats stats;
    stats.n_rejected = snapshot.stats().n_rejected;
    stats.rejects = snapshot.stats().rejects;
    return CorpusSnapshot(std::move(kept), snapshot.scheme(), std::move(stats));
}

/// Move overload: avoids holding two corpus-sized copies at once.
inline CorpusSnapshot filter_articles(CorpusSnapshot&& snapshot, const std::set<int>& years) {
    IngestStats stats;
    stats.n_rejected = snapshot.stats().n_rejected;
    stats.rejects = snapshot.stats().rejects;
    FieldScheme scheme = snapshot.scheme();
    std::vector<PublicationRecord> all = std::move(snapshot).take_records();
    std::vector<PublicationRecord> kept;
    for (auto& r : all)
        if (r.doc_type == "article" && years.count(r.pub_year)) kept.push_back(std::move(r));
    all.clear();
    all.shrink_to_fit();
    return CorpusSnapshot(std::move(kept), std::move(scheme), std::move(stats));
}

}  // namespace bibshare
