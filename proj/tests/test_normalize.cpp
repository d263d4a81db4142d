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

#include "bibshare/normalize.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

#include "bibshare/synth.hpp"

using namespace bibshare;

namespace {

FieldScheme two_cat_scheme() {
    FieldScheme s;
    s.add("A", Discipline::NaturalSciences);
    s.add("B", Discipline::SocialSciences);
    return s;
}

PublicationRecord record(const std::string& id, int year, std::vector<std::string> cats,
                         std::uint32_t citations) {
    PublicationRecord r;
    r.record_id = id;
    r.pub_year = year;
    r.doc_type = "article";
    r.journal_id = "J";
    r.subject_categories = std::move(cats);
    r.author_count = 1;
    if (citations > 0)
        r.citations_by_year = YearCounts{{year + 1, citations}};
    else
        r.citations_by_year = YearCounts{};
    return r;
}

}  // namespace

TEST_CASE("cell means: arithmetic and degenerate cells") {
    std::vector<PublicationRecord> records{
        record("a", 2000, {"A"}, 0),
        record("b", 2000, {"A"}, 2),
        record("c", 2000, {"A"}, 4),
        record("z1", 2000, {"B"}, 0),
        record("z2", 2000, {"B"}, 0),
    };
    CorpusSnapshot snap(std::move(records), two_cat_scheme(), {});
    auto cells = compute_cell_means(snap, nullptr, WindowSpec::open(2014));
    REQUIRE(cells.size() == 2);

    const auto* a = cells.find("A", 2000);
    REQUIRE(a != nullptr);
    CHECK(a->n_papers == 3);
    CHECK(a->mean_citations == 2.0);
    CHECK_FALSE(a->all_zero);

    const auto* b = cells.find("B", 2000);
    REQUIRE(b != nullptr);
    CHECK(b->mean_citations == 0.0);
    CHECK(b->all_zero);

    CHECK(cells.find("A", 1999) == nullptr);
}

TEST_CASE("multi-category paper contributes its full count to every cell") {
    std::vector<PublicationRecord> records{
        record("m", 2000, {"A", "B"}, 4),
        record("a", 2000, {"A"}, 0),
        record("b", 2000, {"B"}, 0),
    };
    CorpusSnapshot snap(std::move(records), two_cat_scheme(), {});
    auto cells = compute_cell_means(snap, nullptr, WindowSpec::open(2014));
    CHECK(cells.find("A", 2000)->mean_citations == 2.0);
    CHECK(cells.find("B", 2000)->mean_citations == 2.0);
}

TEST_CASE("mncs fixtures") {
    SUBCASE("single category, cell mean 2, record with 2 citations -> 1.0") {
        std::vector<PublicationRecord> records{
            record("a", 2000, {"A"}, 2),
            record("b", 2000, {"A"}, 2),
        };
        CorpusSnapshot snap(std::move(records), two_cat_scheme(), {});
        auto cells = compute_cell_means(snap, nullptr, WindowSpec::open(2014));
        auto score = mncs(snap.records()[0], cells, nullptr, WindowSpec::open(2014), 2014);
        CHECK(score.mncs == 1.0);
    }

    SUBCASE("two categories with means 2 and 4, record with 4 citations -> 1.5") {
        // cells primed so that A averages 2 and B averages 4, with the probe
        // record m (4 citations, both categories) included in both cells
        std::vector<PublicationRecord> records{
            record("m", 2000, {"A", "B"}, 4),
            record("a1", 2000, {"A"}, 0),
            record("b1", 2000, {"B"}, 4),
        };
        CorpusSnapshot snap(std::move(records), two_cat_scheme(), {});
        auto cells = compute_cell_means(snap, nullptr, WindowSpec::open(2014));
        REQUIRE(cells.find("A", 2000)->mean_citations == 2.0);
        REQUIRE(cells.find("B", 2000)->mean_citations == 4.0);
        auto score = mncs(snap.records()[0], cells, nullptr, WindowSpec::open(2014), 2014);
        CHECK(score.mncs == 1.5);
        CHECK(score.cell_keys == std::vector<std::string>{"A@2000", "B@2000"});
    }

    SUBCASE("all-zero cell: ratio 0, no division error") {
        std::vector<PublicationRecord> records{record("a", 2000, {"A"}, 0)};
        CorpusSnapshot snap(std::move(records), two_cat_scheme(), {});
        auto cells = compute_cell_means(snap, nullptr, WindowSpec::open(2014));
        auto score = mncs(snap.records()[0], cells, nullptr, WindowSpec::open(2014), 2014);
        CHECK(score.mncs == 0.0);
        CHECK(score.used_zero_cell);
    }

    SUBCASE("record outside the cells' snapshot is an error") {
        std::vector<PublicationRecord> records{record("a", 2000, {"A"}, 1)};
        CorpusSnapshot snap(std::move(records), two_cat_scheme(), {});
        auto cells = compute_cell_means(snap, nullptr, WindowSpec::open(2014));
        auto stranger = record("s", 1999, {"A"}, 1);
        CHECK_THROWS_AS(mncs(stranger, cells, nullptr, WindowSpec::open(2014), 2014), Error);
    }
}

TEST_CASE("within-cell mean of mncs is 1 for non-degenerate single-category cells") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PublicationRecord> records;
        const int n = 200 + static_cast<int>(rng() % 200);
        for (int i = 0; i < n; ++i) {
            const std::string cat = rng() % 2 ? "A" : "B";
            const int year = 2000 + static_cast<int>(rng() % 2);
            records.push_back(record("r" + std::to_string(i), year, {cat},
                                     static_cast<std::uint32_t>(rng() % 20)));
        }
        CorpusSnapshot snap(std::move(records), two_cat_scheme(), {});
        auto cells = compute_cell_means(snap, nullptr, WindowSpec::open(2014));

        std::unordered_map<std::string, std::pair<double, std::size_t>> cell_sums;
        for (const auto& r : snap.records()) {
            auto score = mncs(r, cells, nullptr, WindowSpec::open(2014), 2014);
            auto& agg = cell_sums[score.cell_keys[0]];
            agg.first += score.mncs;
            agg.second += 1;
        }
        for (const auto& [key, agg] : cell_sums) {
            auto at = key.find('@');
            const auto* cell = cells.find(key.substr(0, at), std::stoi(key.substr(at + 1)));
            REQUIRE(cell != nullptr);
            if (cell->all_zero) continue;
            CHECK(std::abs(agg.first / static_cast<double>(agg.second) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("mncs is scale covariant and zero iff uncited (single category)") {
    std::mt19937_64 rng(14);
    std::vector<PublicationRecord> records;
    const std::uint32_t scale = 7;
    std::vector<PublicationRecord> scaled;
    for (int i = 0; i < 150; ++i) {
        const std::uint32_t c = static_cast<std::uint32_t>(rng() % 9);
        records.push_back(record("r" + std::to_string(i), 2000, {"A"}, c));
        scaled.push_back(record("r" + std::to_string(i), 2000, {"A"}, c * scale));
    }
    CorpusSnapshot snap(std::move(records), two_cat_scheme(), {});
    CorpusSnapshot snap_scaled(std::move(scaled), two_cat_scheme(), {});
    auto cells = compute_cell_means(snap, nullptr, WindowSpec::open(2014));
    auto cells_scaled = compute_cell_means(snap_scaled, nullptr, WindowSpec::open(2014));
    for (std::size_t i = 0; i < snap.size(); ++i) {
        auto a = mncs(snap.records()[i], cells, nullptr, WindowSpec::open(2014), 2014);
        auto b = mncs(snap_scaled.records()[i], cells_scaled, nullptr, WindowSpec::open(2014), 2014);
        CHECK(std::abs(a.mncs - b.mncs) <= 1e-12);
        const bool uncited = year_counts_total(*snap.records()[i].citations_by_year) == 0;
        CHECK((a.mncs == 0.0) == uncited);
    }
}

TEST_CASE("planted negative-binomial cell mean is recovered at scale") {
    SynthConfig cfg;
    cfg.seed = 321;
    cfg.years = {2000};
    cfg.records_per_year = {100000};
    cfg.horizon_year = 2014;
    cfg.disciplines = {Discipline::NaturalSciences};
    cfg.discipline_weights = {1.0};
    cfg.categories_per_discipline = 1;  // one cell holding every record
    cfg.internal_link_fraction = 0.0;
    cfg.base.refs_mu = 1.0;
    cfg.base.citation_mu = 5.0;
    cfg.base.citation_dispersion = 1.2;
    std::ostringstream stream;
    auto ledger = generate_corpus(cfg, stream);
    FieldScheme scheme;
    scheme.add("CNS0", Discipline::NaturalSciences);
    std::istringstream in(stream.str());
    auto snap = ingest_records(in, scheme);
    REQUIRE(snap.size() == 100000);

    auto cells = compute_cell_means(snap, nullptr, WindowSpec::open(2014));
    REQUIRE(cells.size() == 1);
    const auto* cell = cells.find("CNS0", 2000);
    REQUIRE(cell != nullptr);
    CHECK(cell->n_papers == 100000);
    CHECK(std::abs(cell->mean_citations - ledger.cell_mu.at({"CNS0", 2000})) <= 0.2);
}

TEST_CASE("cells CSV export") {
    std::vector<PublicationRecord> records{
        record("a", 2000, {"A"}, 1),
        record("b", 1990, {"A"}, 3),
    };
    CorpusSnapshot snap(std::move(records), two_cat_scheme(), {});
    auto cells = compute_cell_means(snap, nullptr, WindowSpec::open(2014));
    std::ostringstream out;
    write_cells(cells, out);
    CHECK(out.str() ==
          "category,pub_year,n_papers,mean_citations\n"
          "A,1990,1,3\n"
          "A,2000,1,1\n");
}
