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

// Reference matching and citation windows.
//
// A cited reference links to a corpus record by (a) exact identifier match
// (reference doi against record doi or record_id), else (b) composite key
// (first_author_key, ref_year, source_token) against the record's
// (first_author_key, pub_year, journal_id), narrowed by volume/first_page
// when both sides carry them. References that stay ambiguous under (b) are
// counted as unlinked. Every successful link increments the cited record's
// inbound histogram at the citing record's publication year and the citing
// record's linked_ref_count, so inbound and linked totals balance exactly.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bibshare/common.hpp"
#include "bibshare/corpus.hpp"
#include "bibshare/parallel.hpp"

namespace bibshare {

/// Citing-year range. Fixed windows exclude the publication year (offsets
/// start at 1); open windows include it and run through a horizon year.
struct WindowSpec {
    enum class Kind { Fixed, Open };
    Kind kind = Kind::Fixed;
    int start_offset = 1;  // Fixed only
    int end_offset = 3;    // Fixed only
    int horizon_year = 0;  // Open only

    static WindowSpec fixed(int start, int end) {
        if (start < 1 || end < start) throw Error("WindowSpec: need 1 <= start_offset <= end_offset");
        WindowSpec w;
        w.kind = Kind::Fixed;
        w.start_offset = start;
        w.end_offset = end;
        return w;
    }

    static WindowSpec open(int horizon) {
        WindowSpec w;
        w.kind = Kind::Open;
        w.horizon_year = horizon;
        return w;
    }

    // grammar: fixed:3 (offsets 1..3) or open:2014
    static WindowSpec parse(std::string_view text) {
        auto colon = text.find(':');
        if (colon != std::string_view::npos) {
            auto head = text.substr(0, colon);
            auto num = parse_int(text.substr(colon + 1));
            if (head == "fixed" && num && *num >= 1) return fixed(1, static_cast<int>(*num));
            if (head == "open" && num) return open(static_cast<int>(*num));
        }
        throw Error("window: expected fixed:<years> or open:<year>, got '" + std::string(text) + "'");
    }

    std::string to_string() const {
        if (kind == Kind::Fixed) return "fixed:" + std::to_string(end_offset);
        return "open:" + std::to_string(horizon_year);
    }

    bool operator==(const WindowSpec&) const = default;
};

struct WindowedCount {
    std::uint64_t count = 0;
    bool truncated = false;  // fixed window reaches past the data horizon
};

/// Sum of per-year counts inside the window for a record published in
/// `pub_year`. `horizon` is the last citing year covered by the data.
inline WindowedCount window_sum(const YearCounts& counts, int pub_year, const WindowSpec& window,
                                int horizon) {
    int lo, hi;
    if (window.kind == WindowSpec::Kind::Fixed) {
        lo = pub_year + window.start_offset;
        hi = pub_year + window.end_offset;
    } else {
        lo = pub_year;
        hi = window.horizon_year;
    }
    WindowedCount out;
    out.truncated = window.kind == WindowSpec::Kind::Fixed && hi > horizon;
    for (auto [year, n] : counts) {
        if (year >= lo && year <= hi) out.count += n;
    }
    return out;
}

struct LinkTableRow {
    std::uint32_t citing_index = 0;
    std::uint32_t cited_index = 0;
    std::int32_t citing_year = 0;
};

struct LinkOptions {
    int threads = 1;
    bool collect_table = false;  // keep (citing, cited, year) rows for audit export
};

/// Per-record inbound histograms and linked/all reference counts.
class CitationIndex {
public:
    struct Entry {
        YearCounts inbound;
        std::uint32_t linked_ref_count = 0;
        std::uint32_t all_ref_count = 0;
        std::int32_t pub_year = 0;
    };

    struct Metadata {
        std::string match_rule = "doi-then-composite/v1";
        int horizon_year = 0;          // max citing year observed
        std::uint64_t n_refs = 0;      // all cited references seen
        std::uint64_t n_linked = 0;    // successfully matched
        std::uint64_t n_ambiguous = 0; // unlinked because several records matched
        std::uint64_t n_backdated = 0; // linked with citing year < cited pub_year
    };

    const Entry* find(const std::string& record_id) const {
        auto it = slots_.find(record_id);
        return it == slots_.end() ? nullptr : &entries_[it->second];
    }

    const Entry& at(const std::string& record_id) const {
        if (const Entry* e = find(record_id)) return *e;
        throw Error("CitationIndex: unknown record_id: " + record_id);
    }

    const Metadata& metadata() const { return meta_; }
    const std::vector<LinkTableRow>& link_table() const { return link_table_; }
    std::size_t size() const { return entries_.size(); }
    const Entry& entry(std::size_t i) const { return entries_[i]; }

    std::uint64_t total_inbound() const {
        std::uint64_t t = 0;
        for (const auto& e : entries_) t += year_counts_total(e.inbound);
        return t;
    }

    std::uint64_t total_linked_refs() const {
        std::uint64_t t = 0;
        for (const auto& e : entries_) t += e.linked_ref_count;
        return t;
    }

private:
    friend CitationIndex link_references(const CorpusSnapshot&, const LinkOptions&);

    std::unordered_map<std::string, std::size_t> slots_;
    std::vector<Entry> entries_;
    std::vector<LinkTableRow> link_table_;
    Metadata meta_;
};

namespace detail {

constexpr std::uint32_t kAmbiguousSlot = std::numeric_limits<std::uint32_t>::max();

inline std::string composite_key(std::string_view author, int year, std::string_view source) {
    std::string key;
    key.reserve(author.size() + source.size() + 8);
    key.append(author);
    key.push_back('\x1f');
    key.append(std::to_string(year));
    key.push_back('\x1f');
    key.append(source);
    return key;
}

}  // namespace detail

/// Matches every cited reference of every record against the snapshot.
/// Deterministic: output is independent of record iteration order and of
/// `options.threads`.
inline CitationIndex link_references(const CorpusSnapshot& snapshot, const LinkOptions& options = {}) {
    const auto& records = snapshot.records();
    const std::size_t n = records.size();

    CitationIndex index;
    index.entries_.resize(n);
    index.slots_.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        index.slots_.emplace(records[i].record_id, i);
        index.entries_[i].pub_year = records[i].pub_year;
        index.entries_[i].all_ref_count = static_cast<std::uint32_t>(records[i].cited_refs.size());
        index.meta_.horizon_year = std::max(index.meta_.horizon_year, records[i].pub_year);
    }

    // identifier index: record_id and, when present, record doi
    std::unordered_map<std::string, std::uint32_t> by_identifier;
    by_identifier.reserve(n * 2);
    auto add_identifier = [&](const std::string& key, std::uint32_t idx) {
        auto [it, inserted] = by_identifier.emplace(key, idx);
        if (!inserted && it->second != idx) it->second = detail::kAmbiguousSlot;
    };
    for (std::size_t i = 0; i < n; ++i) {
        add_identifier(records[i].record_id, static_cast<std::uint32_t>(i));
        if (!records[i].doi.empty()) add_identifier(records[i].doi, static_cast<std::uint32_t>(i));
    }

    // composite index over records that carry an author key
    std::unordered_map<std::string, std::vector<std::uint32_t>> by_composite;
    by_composite.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = records[i];
        if (r.first_author_key.empty() || r.journal_id.empty()) continue;
        by_composite[detail::composite_key(r.first_author_key, r.pub_year, r.journal_id)]
            .push_back(static_cast<std::uint32_t>(i));
    }

    struct ChunkOut {
        std::vector<std::pair<std::uint32_t, std::int32_t>> inbound_events;  // (cited, citing year)
        std::vector<LinkTableRow> table;
        std::uint64_t n_refs = 0;
        std::uint64_t n_ambiguous = 0;
    };

    constexpr std::size_t kChunk = 8192;
    const std::size_t n_chunks = n == 0 ? 0 : (n + kChunk - 1) / kChunk;
    std::vector<ChunkOut> chunks(n_chunks);

    parallel_chunks(n, kChunk, options.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
        ChunkOut& out = chunks[c];
        for (std::size_t i = begin; i < end; ++i) {
            const auto& citing = records[i];
            std::uint32_t linked = 0;
            for (const auto& ref : citing.cited_refs) {
                ++out.n_refs;
                std::uint32_t target = detail::kAmbiguousSlot;
                bool matched = false;
                if (ref.has_doi()) {
                    auto it = by_identifier.find(ref.doi);
                    if (it != by_identifier.end() && it->second != detail::kAmbiguousSlot) {
                        target = it->second;
                        matched = true;
                    }
                }
                if (!matched && ref.has_composite()) {
                    auto it = by_composite.find(
                        detail::composite_key(ref.first_author_key, *ref.ref_year, ref.source_token));
                    if (it != by_composite.end()) {
                        const std::vector<std::uint32_t>* cands = &it->second;
                        std::vector<std::uint32_t> narrowed;
                        if (cands->size() > 1 && !ref.volume.empty()) {
                            for (auto idx : *cands)
                                if (records[idx].volume == ref.volume) narrowed.push_back(idx);
                            if (!narrowed.empty()) cands = &narrowed;
                        }
                        std::vector<std::uint32_t> narrowed2;
                        if (cands->size() > 1 && !ref.first_page.empty()) {
                            for (auto idx : *cands)
                                if (records[idx].first_page == ref.first_page) narrowed2.push_back(idx);
                            if (!narrowed2.empty()) cands = &narrowed2;
                        }
                        if (cands->size() == 1) {
                            target = cands->front();
                            matched = true;
                        } else if (cands->size() > 1) {
                            ++out.n_ambiguous;
                        }
                    }
                }
                if (matched) {
                    ++linked;
                    out.inbound_events.emplace_back(target, citing.pub_year);
                    if (options.collect_table)
                        out.table.push_back({static_cast<std::uint32_t>(i), target, citing.pub_year});
                }
            }
            index.entries_[i].linked_ref_count = linked;
        }
    });

    // merge in chunk order; integer counts make the totals order-independent
    std::vector<std::pair<std::uint32_t, std::int32_t>> events;
    std::size_t total_events = 0;
    for (const auto& c : chunks) total_events += c.inbound_events.size();
    events.reserve(total_events);
    for (auto& c : chunks) {
        events.insert(events.end(), c.inbound_events.begin(), c.inbound_events.end());
        index.meta_.n_refs += c.n_refs;
        index.meta_.n_ambiguous += c.n_ambiguous;
        if (options.collect_table)
            index.link_table_.insert(index.link_table_.end(), c.table.begin(), c.table.end());
        c.inbound_events.clear();
        c.inbound_events.shrink_to_fit();
    }
    index.meta_.n_linked = events.size();

    std::sort(events.begin(), events.end());
    std::size_t i = 0;
    while (i < events.size()) {
        const std::uint32_t cited = events[i].first;
        auto& entry = index.entries_[cited];
        std::size_t j = i;
        while (j < events.size() && events[j].first == cited) ++j;
        YearCounts& inbound = entry.inbound;
        for (std::size_t k = i; k < j;) {
            const std::int32_t year = events[k].second;
            std::size_t m = k;
            while (m < j && events[m].second == year) ++m;
            inbound.emplace_back(year, static_cast<std::uint32_t>(m - k));
            if (year < entry.pub_year) index.meta_.n_backdated += m - k;
            k = m;
        }
        i = j;
    }

    return index;
}

/// Citations of `record_id` inside `window`, per the index's inbound data.
inline WindowedCount citation_count(const CitationIndex& index, const std::string& record_id,
                                    const WindowSpec& window, int pub_year) {
    const auto& entry = index.at(record_id);
    return window_sum(entry.inbound, pub_year, window, index.metadata().horizon_year);
}

inline std::uint32_t linked_ref_count(const CitationIndex& index, const std::string& record_id) {
    return index.at(record_id).linked_ref_count;
}

inline std::uint32_t all_ref_count(const CitationIndex& index, const std::string& record_id) {
    return index.at(record_id).all_ref_count;
}

/// Last citing year covered by the corpus data (histograms or links).
inline int data_horizon(const CorpusSnapshot& snapshot) {
    int horizon = snapshot.stats().max_citation_year;
    for (const auto& r : snapshot.records()) horizon = std::max(horizon, r.pub_year);
    return horizon;
}

/// Citation count of one record: its pre-aggregated histogram when present,
/// the link-derived inbound map otherwise.
inline WindowedCount citations_for(const PublicationRecord& record, const CitationIndex* index,
                                   const WindowSpec& window, int horizon) {
    if (record.citations_by_year)
        return window_sum(*record.citations_by_year, record.pub_year, window, horizon);
    if (index) {
        if (const auto* e = index->find(record.record_id))
            return window_sum(e->inbound, record.pub_year, window, horizon);
    }
    return {};
}

/// Audit export: `citing_id,cited_id,citing_year`, one line per link, in the
/// deterministic build order. The snapshot must be the one the index was
/// built from.
inline void write_link_table(const CitationIndex& index, const CorpusSnapshot& snapshot,
                             std::ostream& out) {
    out << "citing_id,cited_id,citing_year\n";
    for (const auto& row : index.link_table()) {
        out << snapshot.records()[row.citing_index].record_id << ','
            << snapshot.records()[row.cited_index].record_id << ',' << row.citing_year << '\n';
    }
}

}  // namespace bibshare
