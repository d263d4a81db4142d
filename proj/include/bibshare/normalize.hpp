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

// Field- and time-normalized citation scores. The reference cell of a paper
// is its (subject category, publication year) pair; a paper's score is its
// citation count divided by the cell's mean, averaged arithmetically over
// the paper's categories. Cells whose mean is zero contribute a ratio of 0
// (every record in such a cell necessarily has zero citations).

#include <cstdint>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bibshare/common.hpp"
#include "bibshare/corpus.hpp"
#include "bibshare/linking.hpp"

namespace bibshare {

struct ReferenceCell {
    std::string category;
    int pub_year = 0;
    std::size_t n_papers = 0;
    double mean_citations = 0.0;
    bool all_zero = false;
};

struct NormalizedScore {
    std::string record_id;
    double mncs = 0.0;
    std::vector<std::string> cell_keys;  // "category@year" of each contributing cell
    bool used_zero_cell = false;
};

/// Mean citation rates per (category, pub_year), under one window.
class CellTable {
public:
    void insert(ReferenceCell cell) {
        std::string key = make_key(cell.category, cell.pub_year);
        cells_.emplace(std::move(key), std::move(cell));
    }

    const ReferenceCell* find(const std::string& category, int pub_year) const {
        auto it = cells_.find(make_key(category, pub_year));
        return it == cells_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return cells_.size(); }

    std::vector<const ReferenceCell*> sorted() const {
        std::vector<const ReferenceCell*> out;
        out.reserve(cells_.size());
        for (const auto& [key, cell] : cells_) out.push_back(&cell);
        std::sort(out.begin(), out.end(), [](const ReferenceCell* a, const ReferenceCell* b) {
            if (a->category != b->category) return a->category < b->category;
            return a->pub_year < b->pub_year;
        });
        return out;
    }

    const WindowSpec& window() const { return window_; }
    void set_window(const WindowSpec& w) { window_ = w; }

    static std::string make_key(const std::string& category, int pub_year) {
        return category + '@' + std::to_string(pub_year);
    }

private:
    std::unordered_map<std::string, ReferenceCell> cells_;
    WindowSpec window_;
};

/// One cell per (category, year) pair with at least one paper. A paper in k
/// categories contributes its full citation count to all k cells.
inline CellTable compute_cell_means(const CorpusSnapshot& snapshot, const CitationIndex* index,
                                    const WindowSpec& window) {
    struct Accum {
        std::uint64_t total = 0;
        std::size_t n = 0;
    };
    const int horizon = data_horizon(snapshot);
    std::unordered_map<std::string, Accum> acc;
    for (const auto& r : snapshot.records()) {
        const std::uint64_t c = citations_for(r, index, window, horizon).count;
        for (const auto& cat : r.subject_categories) {
            auto& a = acc[CellTable::make_key(cat, r.pub_year)];
            a.total += c;
            ++a.n;
        }
    }

    CellTable table;
    table.set_window(window);
    for (const auto& r : snapshot.records()) {
        for (const auto& cat : r.subject_categories) {
            if (table.find(cat, r.pub_year)) continue;
            const auto& a = acc[CellTable::make_key(cat, r.pub_year)];
            ReferenceCell cell;
            cell.category = cat;
            cell.pub_year = r.pub_year;
            cell.n_papers = a.n;
            cell.mean_citations = static_cast<double>(a.total) / static_cast<double>(a.n);
            cell.all_zero = a.total == 0;
            table.insert(std::move(cell));
        }
    }
    return table;
}

/// MNCS of one record: arithmetic mean of per-category citation ratios.
inline NormalizedScore mncs(const PublicationRecord& record, const CellTable& cells,
                            const CitationIndex* index, const WindowSpec& window, int horizon) {
    NormalizedScore score;
    score.record_id = record.record_id;
    const double c = static_cast<double>(citations_for(record, index, window, horizon).count);

    KahanSum ratios;
    std::size_t k = 0;
    for (const auto& cat : record.subject_categories) {
        const ReferenceCell* cell = cells.find(cat, record.pub_year);
        if (!cell)
            throw Error("mncs: no reference cell for " + cat + "@" + std::to_string(record.pub_year) +
                        " (record " + record.record_id + " not in the cells' snapshot?)");
        score.cell_keys.push_back(CellTable::make_key(cat, record.pub_year));
        if (cell->all_zero) {
            score.used_zero_cell = true;
            ratios.add(0.0);
        } else {
            ratios.add(c / cell->mean_citations);
        }
        ++k;
    }
    score.mncs = ratios.value() / static_cast<double>(k);
    return score;
}

/// CSV export: `category,pub_year,n_papers,mean_citations`.
inline void write_cells(const CellTable& cells, std::ostream& out) {
    out << "category,pub_year,n_papers,mean_citations\n";
    for (const ReferenceCell* cell : cells.sorted()) {
        out << cell->category << ',' << cell->pub_year << ',' << cell->n_papers << ','
            << format_sig(cell->mean_citations) << '\n';
    }
}

}  // namespace bibshare
