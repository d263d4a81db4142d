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

// Seedable synthetic corpora with a ground-truth ledger.
//
// Citation totals follow a negative binomial parameterized by (mean,
// dispersion) — dispersion <= 0 selects the Poisson limit — sampled through
// the inverse CDF from per-record counter-based uniform streams. That makes
// every draw a pure function of (seed, record, draw index): changing one
// coupling coefficient perturbs nothing except the citation means, and a
// record's count is monotone in its mean for a fixed seed.
//
// FIC attributes: author and page counts are rounded shifted lognormals,
// reference counts negative binomial, JIF per-journal lognormal. Couplings
// multiply the citation mean by (value / reference level)^beta per FIC.
// A configurable fraction of each record's references points at earlier
// generated records (mild linear preferential attachment); those links are
// matchable by construction and recorded in the ledger.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bibshare/common.hpp"
#include "bibshare/corpus.hpp"
#include "bibshare/inequality.hpp"
#include "bibshare/parallel.hpp"

namespace bibshare {

namespace rngdetail {

inline std::uint64_t splitmix_step(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic stream keyed by (seed, stream tag, element). Statistical
/// quality is plenty for simulation; the standard engines are avoided so the
/// byte stream is identical on every platform.
class SplitMix {
public:
    SplitMix(std::uint64_t seed, std::uint64_t stream, std::uint64_t element) {
        state_ = splitmix_step(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
        state_ ^= splitmix_step(element + 0x632be59bd9b4e019ULL);
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix_step(state_);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    double normal(double mean, double sigma) {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::uint64_t state_ = 0;
};

}  // namespace rngdetail

/// Inverse-CDF sample of a count model with the given mean. dispersion <= 0
/// means Poisson; otherwise negative binomial with variance mu + mu^2/r.
inline std::uint32_t count_quantile(double u, double mu, double dispersion) {
    if (mu <= 0.0) return 0;
    constexpr std::uint32_t kCap = 4000000;
    double p, cdf;
    if (dispersion <= 0.0) {
        p = std::exp(-mu);
    } else {
        const double r = dispersion;
        p = std::exp(r * (std::log(r) - std::log(r + mu)));
    }
    cdf = p;
    std::uint32_t k = 0;
    while (u > cdf && k < kCap) {
        if (dispersion <= 0.0) {
            p *= mu / (k + 1.0);
        } else {
            p *= ((k + dispersion) / (k + 1.0)) * (mu / (mu + dispersion));
        }
        cdf += p;
        ++k;
        if (p < 1e-310) break;  // tail underflow; remaining mass is negligible
    }
    return k;
}

/// Per-discipline count and attribute models.
struct DisciplineModel {
    double citation_mu = 10.0;
    double citation_dispersion = 1.5;  // <= 0 selects Poisson
    double refs_mu = 20.0;
    double refs_dispersion = 6.0;
    double authors_log_mean = 0.8;
    double authors_log_sigma = 0.6;
    double pages_log_mean = 2.1;
    double pages_log_sigma = 0.5;
    double jif_log_mean = 0.7;
    double jif_log_sigma = 0.7;
};

struct SynthConfig {
    std::uint64_t seed = 42;
    std::vector<int> years{1990, 2000, 2010};
    std::vector<std::size_t> records_per_year{400, 350, 250};
    int horizon_year = 2014;
    std::vector<Discipline> disciplines{Discipline::NaturalSciences};
    std::vector<double> discipline_weights{1.0};
    int categories_per_discipline = 3;
    int journals_per_category = 8;
    double multi_category_rate = 0.1;  // second category, same discipline
    double non_article_rate = 0.0;
    double internal_link_fraction = 0.3;
    double pref_attach = 0.5;
    double jif_missing_rate = 0.0;
    double pages_missing_rate = 0.0;
    double coupling_refs = 0.0;
    double coupling_authors = 0.0;
    double coupling_pages = 0.0;
    double coupling_jif = 0.0;
    DisciplineModel base;
    std::map<Discipline, DisciplineModel> models;  // resolved in validate()

    std::size_t total_records() const {
        std::size_t t = 0;
        for (auto n : records_per_year) t += n;
        return t;
    }

    const DisciplineModel& model(Discipline d) const {
        auto it = models.find(d);
        return it == models.end() ? base : it->second;
    }

    void validate() {
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (years.empty() || years.size() != records_per_year.size())
            throw Error("synth config: years and records_per_year must align");
        for (std::size_t i = 1; i < years.size(); ++i)
            if (years[i] <= years[i - 1]) throw Error("synth config: years must be strictly increasing");
        if (horizon_year < years.back()) throw Error("synth config: horizon_year before the last year");
        if (disciplines.empty() || disciplines.size() != discipline_weights.size())
            throw Error("synth config: disciplines and discipline_weights must align");
        double wsum = 0.0;
        for (double w : discipline_weights) {
            if (w < 0.0) throw Error("synth config: negative discipline weight");
            wsum += w;
        }
        if (wsum <= 0.0) throw Error("synth config: discipline weights sum to zero");
        if (categories_per_discipline < 1 || journals_per_category < 1)
            throw Error("synth config: need at least one category and journal");
        if (!in01(multi_category_rate) || !in01(non_article_rate) || !in01(internal_link_fraction) ||
            !in01(pref_attach) || !in01(jif_missing_rate) || !in01(pages_missing_rate))
            throw Error("synth config: rates must lie in [0, 1]");
        if (internal_link_fraction > 0.0 && total_records() < 2)
            throw Error("synth config: internal links need at least 2 records");
        for (Discipline d : disciplines) {
            DisciplineModel m = models.count(d) ? models.at(d) : base;
            if (!(m.citation_mu > 0.0) || m.citation_mu > 500.0)
                throw Error("synth config: citation_mu must lie in (0, 500]");
            if (!(m.refs_mu >= 0.0)) throw Error("synth config: refs_mu must be >= 0");
            if (!std::isfinite(m.citation_dispersion) || !std::isfinite(m.refs_dispersion))
                throw Error("synth config: dispersion must be finite");
            models[d] = m;
        }
        for (double c : {coupling_refs, coupling_authors, coupling_pages, coupling_jif})
            if (!std::isfinite(c)) throw Error("synth config: coupling coefficients must be finite");
    }

    static SynthConfig from_stream(std::istream& in);
    static SynthConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open synth config: " + path);
        return from_stream(in);
    }

    std::string canonical() const;
};

/// Ground truth for everything the generator planted.
struct GeneratorLedger {
    struct Link {
        std::uint32_t citing = 0;
        std::uint32_t cited = 0;
        std::int32_t citing_year = 0;
    };

    std::size_t n_records = 0;
    std::vector<Link> links;                                       // planted internal links
    std::map<std::pair<std::string, int>, double> cell_mu;         // (category, year) -> base mean
    std::map<int, std::size_t> per_year;
    std::map<std::pair<int, std::string>, std::size_t> per_year_doctype;
    std::map<std::pair<int, std::string>, std::size_t> per_year_discipline;
    std::vector<std::uint32_t> citation_totals;    // per record
    std::vector<std::uint32_t> internal_ref_counts;  // per record, all matchable
    std::uint64_t total_refs = 0;

    static std::string record_id_of(std::size_t index) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "r%07zu", index);
        return buf;
    }
};

namespace detail {

struct SynthJournal {
    std::string id;
    double jif = 1.0;
    std::vector<std::string> categories;
    std::size_t discipline_pos = 0;  // into config.disciplines
};

struct Skeleton {
    std::uint32_t journal = 0;
    std::int16_t pub_year = 0;
    std::uint8_t discipline_pos = 0;
    std::uint8_t doc_code = 0;  // 0 article, 1 review, 2 letter
    bool jif_missing = false;
    std::uint16_t author_count = 1;
    std::int16_t page_count = -1;  // -1 missing
    std::uint16_t n_refs = 0;
    std::uint32_t total_citations = 0;
    YearCounts hist;
};

inline const char* doc_type_name(std::uint8_t code) {
    switch (code) {
        case 1: return "review";
        case 2: return "letter";
        default: return "article";
    }
}

inline const char* discipline_abbrev(Discipline d) {
    switch (d) {
        case Discipline::NaturalSciences: return "NS";
        case Discipline::EngineeringTechnology: return "ET";
        case Discipline::MedicalHealth: return "MH";
        case Discipline::Agricultural: return "AG";
        case Discipline::SocialSciences: return "SS";
        case Discipline::Humanities: return "HU";
    }
    return "XX";
}

// fixed per-record draw order; changing a coupling shifts nothing here
enum RecordDraw : std::uint64_t {
    kDrawJournal = 0,
    kDrawDocType,
    kDrawAuthorsA,
    kDrawAuthorsB,
    kDrawPagesA,
    kDrawPagesB,
    kDrawPagesMissing,
    kDrawJifMissing,
    kDrawRefs,
    kDrawCitations,
    kDrawSpreadBase,  // kDrawSpreadBase + j for citation j
};

inline void append_json_escaped(std::string& out, std::string_view s) {
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
}

}  // namespace detail

/// Deterministic synthetic corpus in the JSON-lines record schema, plus its
/// ledger. Identical config yields byte-identical output and ledger.
inline GeneratorLedger generate_corpus(SynthConfig config, std::ostream& out, int threads = 1) {
    config.validate();
    const std::size_t n_total = config.total_records();

    // --- universe: categories and journals, one stream per journal ---
    std::vector<detail::SynthJournal> journals;
    std::vector<std::vector<std::uint32_t>> journals_of_disc(config.disciplines.size());
    std::vector<std::vector<std::string>> cats_of_disc(config.disciplines.size());
    for (std::size_t dp = 0; dp < config.disciplines.size(); ++dp) {
        const Discipline d = config.disciplines[dp];
        const auto& model = config.model(d);
        for (int c = 0; c < config.categories_per_discipline; ++c)
            cats_of_disc[dp].push_back(std::string("C") + detail::discipline_abbrev(d) + std::to_string(c));
        for (int c = 0; c < config.categories_per_discipline; ++c) {
            for (int j = 0; j < config.journals_per_category; ++j) {
                detail::SynthJournal journal;
                journal.discipline_pos = dp;
                journal.id = std::string("J") + detail::discipline_abbrev(d) + std::to_string(c) + "x" +
                             std::to_string(j);
                rngdetail::SplitMix rng(config.seed, 10, journals.size());
                journal.jif = std::exp(rng.normal(model.jif_log_mean, model.jif_log_sigma));
                journal.categories.push_back(cats_of_disc[dp][static_cast<std::size_t>(c)]);
                if (config.categories_per_discipline > 1 && rng.uniform01() < config.multi_category_rate) {
                    std::size_t other = rng.below(static_cast<std::uint64_t>(config.categories_per_discipline - 1));
                    if (other >= static_cast<std::size_t>(c)) ++other;
                    journal.categories.push_back(cats_of_disc[dp][other]);
                }
                journals_of_disc[dp].push_back(static_cast<std::uint32_t>(journals.size()));
                journals.push_back(std::move(journal));
            }
        }
    }

    // --- apportion records to (year, discipline) by largest remainder ---
    double wsum = 0.0;
    for (double w : config.discipline_weights) wsum += w;
    std::vector<std::vector<std::size_t>> counts(config.years.size(),
                                                 std::vector<std::size_t>(config.disciplines.size(), 0));
    for (std::size_t yi = 0; yi < config.years.size(); ++yi) {
        const std::size_t ny = config.records_per_year[yi];
        std::size_t assigned = 0;
        std::vector<std::pair<double, std::size_t>> remainders;
        for (std::size_t dp = 0; dp < config.disciplines.size(); ++dp) {
            const double exact = static_cast<double>(ny) * config.discipline_weights[dp] / wsum;
            counts[yi][dp] = static_cast<std::size_t>(exact);
            assigned += counts[yi][dp];
            remainders.emplace_back(-(exact - std::floor(exact)), dp);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; assigned < ny; ++k, ++assigned)
            ++counts[yi][remainders[k % remainders.size()].second];
    }

    // global order: years ascending, disciplines in config order
    std::vector<std::int16_t> year_of(n_total);
    std::vector<std::uint8_t> disc_of(n_total);
    std::vector<std::size_t> year_end(config.years.size(), 0);
    {
        std::size_t g = 0;
        for (std::size_t yi = 0; yi < config.years.size(); ++yi) {
            for (std::size_t dp = 0; dp < config.disciplines.size(); ++dp) {
                for (std::size_t k = 0; k < counts[yi][dp]; ++k) {
                    year_of[g] = static_cast<std::int16_t>(config.years[yi]);
                    disc_of[g] = static_cast<std::uint8_t>(dp);
                    ++g;
                }
            }
            year_end[yi] = g;
        }
    }

    // citing-year aging profile per publication year
    std::vector<std::vector<double>> spread_cdf(config.years.size());
    for (std::size_t yi = 0; yi < config.years.size(); ++yi) {
        const int span = config.horizon_year - config.years[yi];
        std::vector<double> w(static_cast<std::size_t>(span) + 1);
        w[0] = 0.3;
        double decay = 1.0;
        for (int k = 1; k <= span; ++k) {
            w[static_cast<std::size_t>(k)] = decay;
            decay *= 0.75;
        }
        double total = 0.0;
        for (double v : w) total += v;
        double cum = 0.0;
        for (auto& v : w) {
            cum += v / total;
            v = cum;
        }
        spread_cdf[yi] = std::move(w);
    }
    std::map<int, std::size_t> year_index;
    for (std::size_t yi = 0; yi < config.years.size(); ++yi) year_index[config.years[yi]] = yi;

    // --- phase 1: skeletons, one counter-based stream per record ---
    std::vector<detail::Skeleton> skeletons(n_total);
    parallel_chunks(n_total, 65536, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t g = begin; g < end; ++g) {
            detail::Skeleton& sk = skeletons[g];
            sk.pub_year = year_of[g];
            sk.discipline_pos = disc_of[g];
            const Discipline d = config.disciplines[sk.discipline_pos];
            const auto& model = config.model(d);
            rngdetail::SplitMix rng(config.seed, 1, g);

            const auto& jlist = journals_of_disc[sk.discipline_pos];
            const double u_journal = rng.uniform01();
            sk.journal = jlist[static_cast<std::size_t>(u_journal * static_cast<double>(jlist.size())) %
                               jlist.size()];

            const double u_doc = rng.uniform01();
            if (u_doc < config.non_article_rate) sk.doc_code = (g % 2) ? 1 : 2;

            const double authors_raw = std::exp(rng.normal(model.authors_log_mean, model.authors_log_sigma));
            sk.author_count = static_cast<std::uint16_t>(std::min(60000.0, 1.0 + std::floor(authors_raw)));

            const double pages_raw = std::exp(rng.normal(model.pages_log_mean, model.pages_log_sigma));
            const double u_pages_missing = rng.uniform01();
            sk.page_count = u_pages_missing < config.pages_missing_rate
                                ? static_cast<std::int16_t>(-1)
                                : static_cast<std::int16_t>(std::min(30000.0, 2.0 + std::floor(pages_raw)));

            const double u_jif_missing = rng.uniform01();
            sk.jif_missing = u_jif_missing < config.jif_missing_rate;

            const double u_refs = rng.uniform01();
            sk.n_refs = static_cast<std::uint16_t>(
                std::min<std::uint32_t>(2000, count_quantile(u_refs, model.refs_mu, model.refs_dispersion)));

            // multiplicative FIC coupling on the citation mean; reference
            // levels come from the base model so that between-discipline
            // attribute differences show up as citation-mean differences
            double mu = model.citation_mu;
            if (config.coupling_refs != 0.0)
                mu *= std::pow((sk.n_refs + 1.0) / (config.base.refs_mu + 1.0), config.coupling_refs);
            if (config.coupling_authors != 0.0)
                mu *= std::pow(sk.author_count / (1.0 + std::exp(config.base.authors_log_mean)),
                               config.coupling_authors);
            if (config.coupling_pages != 0.0 && sk.page_count > 0)
                mu *= std::pow(sk.page_count / (2.0 + std::exp(config.base.pages_log_mean)),
                               config.coupling_pages);
            if (config.coupling_jif != 0.0 && !sk.jif_missing)
                mu *= std::pow(journals[sk.journal].jif / std::exp(config.base.jif_log_mean),
                               config.coupling_jif);
            mu = std::min(500.0, std::max(0.05, mu));

            const double u_cite = rng.uniform01();
            sk.total_citations = count_quantile(u_cite, mu, model.citation_dispersion);

            const auto& cdf = spread_cdf[year_index.at(sk.pub_year)];
            std::vector<std::uint32_t> bins(cdf.size(), 0);
            for (std::uint32_t c = 0; c < sk.total_citations; ++c) {
                const double u = rng.uniform01();
                const std::size_t k = static_cast<std::size_t>(
                    std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
                ++bins[std::min(k, bins.size() - 1)];
            }
            for (std::size_t k = 0; k < bins.size(); ++k)
                if (bins[k] > 0)
                    sk.hist.emplace_back(static_cast<std::int32_t>(sk.pub_year) + static_cast<std::int32_t>(k),
                                         bins[k]);
        }
    });

    // --- phase 2: internal links (sequential, mild preferential attachment) ---
    GeneratorLedger ledger;
    ledger.n_records = n_total;
    ledger.citation_totals.resize(n_total);
    ledger.internal_ref_counts.assign(n_total, 0);

    std::vector<std::pair<std::uint32_t, std::uint8_t>> targets;  // (cited, flags)
    std::vector<std::uint64_t> target_offset(n_total + 1, 0);
    std::vector<std::uint32_t> pa_pool;
    {
        rngdetail::SplitMix rng(config.seed, 2, 0);
        for (std::size_t g = 0; g < n_total; ++g) {
            target_offset[g] = targets.size();
            const std::size_t eligible =
                year_end[static_cast<std::size_t>(
                    std::lower_bound(config.years.begin(), config.years.end(), year_of[g]) -
                    config.years.begin())];
            for (std::uint16_t r = 0; r < skeletons[g].n_refs; ++r) {
                const double u_internal = rng.uniform01();
                if (u_internal >= config.internal_link_fraction) continue;
                if (eligible <= 1) continue;  // nothing citable but this record itself
                std::uint32_t t = 0;
                bool picked = false;
                if (!pa_pool.empty() && rng.uniform01() < config.pref_attach) {
                    for (int attempt = 0; attempt < 4 && !picked; ++attempt) {
                        const std::uint32_t cand = pa_pool[rng.below(pa_pool.size())];
                        if (cand != g) {
                            t = cand;
                            picked = true;
                        }
                    }
                }
                if (!picked) {
                    std::uint64_t idx = rng.below(eligible - 1);
                    if (idx >= g) ++idx;
                    t = static_cast<std::uint32_t>(idx);
                }
                const std::uint8_t flags = static_cast<std::uint8_t>(rng.next() & 0x07);
                targets.emplace_back(t, flags);
                pa_pool.push_back(t);
                ++ledger.internal_ref_counts[g];
                ledger.links.push_back({static_cast<std::uint32_t>(g), t, year_of[g]});
            }
        }
        target_offset[n_total] = targets.size();
    }

    // --- ledger bookkeeping ---
    for (std::size_t g = 0; g < n_total; ++g) {
        ledger.citation_totals[g] = skeletons[g].total_citations;
        ledger.total_refs += skeletons[g].n_refs;
        ++ledger.per_year[year_of[g]];
        ++ledger.per_year_doctype[{year_of[g], detail::doc_type_name(skeletons[g].doc_code)}];
        ++ledger.per_year_discipline[{year_of[g], to_string(config.disciplines[disc_of[g]])}];
    }
    for (std::size_t yi = 0; yi < config.years.size(); ++yi) {
        for (std::size_t dp = 0; dp < config.disciplines.size(); ++dp) {
            if (counts[yi][dp] == 0) continue;
            const auto& model = config.model(config.disciplines[dp]);
            for (const auto& cat : cats_of_disc[dp])
                ledger.cell_mu[{cat, config.years[yi]}] = model.citation_mu;
        }
    }

    // --- phase 3: serialize in order ---
    std::string buf;
    buf.reserve(1 << 20);
    for (std::size_t g = 0; g < n_total; ++g) {
        const detail::Skeleton& sk = skeletons[g];
        const detail::SynthJournal& journal = journals[sk.journal];
        buf.clear();
        buf += "{\"record_id\":\"";
        buf += GeneratorLedger::record_id_of(g);
        buf += "\",\"pub_year\":";
        buf += std::to_string(sk.pub_year);
        buf += ",\"doc_type\":\"";
        buf += detail::doc_type_name(sk.doc_code);
        buf += "\",\"journal_id\":\"";
        buf += journal.id;
        buf += "\"";
        if (!sk.jif_missing) {
            buf += ",\"jif\":";
            buf += format_sig(journal.jif);
        }
        buf += ",\"subject_categories\":[";
        for (std::size_t c = 0; c < journal.categories.size(); ++c) {
            if (c) buf += ',';
            buf += '"';
            buf += journal.categories[c];
            buf += '"';
        }
        buf += "],\"author_count\":";
        buf += std::to_string(sk.author_count);
        if (sk.page_count > 0) {
            buf += ",\"page_count\":";
            buf += std::to_string(sk.page_count);
        }
        buf += ",\"first_author_key\":\"a";
        buf += std::to_string(g);
        buf += "\",\"volume\":\"";
        buf += std::to_string(1 + g % 97);
        buf += "\",\"first_page\":\"";
        buf += std::to_string(1 + (g * 7) % 999);
        buf += "\",\"cited_refs\":[";

        bool first_ref = true;
        const std::uint64_t t0 = target_offset[g];
        const std::uint64_t t1 = target_offset[g + 1];
        for (std::uint64_t t = t0; t < t1; ++t) {
            const auto [cited, flags] = targets[t];
            if (!first_ref) buf += ',';
            first_ref = false;
            buf += '{';
            if (flags & 0x1) {
                buf += "\"doi\":\"";
                buf += GeneratorLedger::record_id_of(cited);
                buf += "\",";
            } else {
                buf += "\"first_author_key\":\"a";
                buf += std::to_string(cited);
                buf += "\",\"ref_year\":";
                buf += std::to_string(year_of[cited]);
                buf += ",\"source_token\":\"";
                buf += journals[skeletons[cited].journal].id;
                buf += "\",";
                if (flags & 0x2) {
                    buf += "\"volume\":\"";
                    buf += std::to_string(1 + cited % 97);
                    buf += "\",";
                }
            }
            buf += "\"raw\":\"ref ";
            buf += GeneratorLedger::record_id_of(cited);
            buf += "\"}";
        }
        const std::uint32_t n_external = sk.n_refs - static_cast<std::uint32_t>(t1 - t0);
        for (std::uint32_t e = 0; e < n_external; ++e) {
            if (!first_ref) buf += ',';
            first_ref = false;
            const std::uint64_t h = rngdetail::splitmix_step(config.seed ^ (g * 0x9e3779b97f4a7c15ULL + e));
            buf += "{\"first_author_key\":\"x";
            buf += std::to_string(h % 1000000);
            buf += "\",\"ref_year\":";
            buf += std::to_string(sk.pub_year - static_cast<int>(h % 30));
            buf += ",\"source_token\":\"ext";
            buf += std::to_string(h % 997);
            buf += "\",\"raw\":\"ext ref ";
            buf += std::to_string(h % 100000);
            buf += "\"}";
        }
        buf += "],\"citations_by_year\":{";
        for (std::size_t k = 0; k < sk.hist.size(); ++k) {
            if (k) buf += ',';
            buf += '"';
            buf += std::to_string(sk.hist[k].first);
            buf += "\":";
            buf += std::to_string(sk.hist[k].second);
        }
        buf += "}}\n";
        out << buf;
    }
    out.flush();
    return ledger;
}

/// Top-10% share (percent) of an n-sample from the count model, fixed seed.
inline double simulate_top_share(double mu, double dispersion, std::size_t n, std::uint64_t seed) {
    std::vector<double> sample(n);
    rngdetail::SplitMix rng(seed, 77, 0);
    for (auto& v : sample) v = static_cast<double>(count_quantile(rng.uniform01(), mu, dispersion));
    CutSpec top_only;
    top_only.cuts = {90.0};
    auto b = percentile_shares(sample, top_only);
    return b.shares[1];
}

/// Finds the negative-binomial dispersion whose expected top-10% share of a
/// size-`sample_n` sample hits `target_pct`. Smaller dispersion means a
/// heavier tail and a larger top share, so bisection applies.
inline double calibrate_dispersion(double target_pct, double mu, double tolerance_pp,
                                   std::uint64_t seed = 20260101, std::size_t sample_n = 100000) {
    if (!(target_pct > 10.0 && target_pct < 100.0))
        throw Error("calibrate_dispersion: target must lie in (10, 100) percent");
    if (!(mu > 0.0 && mu <= 500.0)) throw Error("calibrate_dispersion: mu must lie in (0, 500]");
    if (!(tolerance_pp > 0.0)) throw Error("calibrate_dispersion: tolerance must be positive");

    double r_lo = 0.01;    // heavy tail, large top share
    double r_hi = 1e6;     // Poisson-like, small top share
    // fixed uniforms: the share is then monotone in r and bisection is exact
    std::vector<double> us(sample_n);
    rngdetail::SplitMix rng(seed, 78, 0);
    for (auto& u : us) u = rng.uniform01();

    auto share_at = [&](double r) {
        std::vector<double> sample(sample_n);
        for (std::size_t i = 0; i < sample_n; ++i)
            sample[i] = static_cast<double>(count_quantile(us[i], mu, r));
        CutSpec top_only;
        top_only.cuts = {90.0};
        return percentile_shares(sample, top_only).shares[1];
    };

    const double hi_share = share_at(r_lo);
    const double lo_share = share_at(r_hi);
    if (target_pct > hi_share || target_pct < lo_share) {
        throw Error("calibrate_dispersion: target " + format_sig(target_pct) +
                    " outside reachable bracket [" + format_sig(lo_share) + ", " + format_sig(hi_share) +
                    "] for mu=" + format_sig(mu));
    }

    double lo = std::log(r_lo), hi = std::log(r_hi);
    double best_r = r_lo, best_err = std::abs(hi_share - target_pct);
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double r = std::exp(mid);
        const double s = share_at(r);
        if (std::abs(s - target_pct) < best_err) {
            best_err = std::abs(s - target_pct);
            best_r = r;
        }
        if (best_err <= tolerance_pp * 0.5) break;
        if (s > target_pct)
            lo = mid;  // too concentrated: raise r
        else
            hi = mid;
    }
    if (best_err > tolerance_pp)
        throw Error("calibrate_dispersion: could not reach target " + format_sig(target_pct) +
                    " within tolerance; best error " + format_sig(best_err));
    return best_r;
}

// --- config file: documented key=value format, one key per line ---

inline SynthConfig SynthConfig::from_stream(std::istream& in) {
    SynthConfig cfg;
    cfg.disciplines.clear();
    cfg.discipline_weights.clear();
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v = trim(line);
        if (v.empty() || v.front() == '#') continue;
        auto eq = v.find('=');
        if (eq == std::string_view::npos)
            throw Error("synth config line " + std::to_string(line_no) + ": expected key = value");
        kv[std::string(trim(v.substr(0, eq)))] = std::string(trim(v.substr(eq + 1)));
    }

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string val = it->second;
        kv.erase(it);
        return val;
    };
    auto need_double = [&](const std::string& val, const char* key) {
        auto d = parse_double(val);
        if (!d) throw Error(std::string("synth config: bad number for ") + key);
        return *d;
    };
    auto need_int = [&](const std::string& val, const char* key) {
        auto n = parse_int(val);
        if (!n) throw Error(std::string("synth config: bad integer for ") + key);
        return *n;
    };

    if (auto v = take("seed")) cfg.seed = static_cast<std::uint64_t>(need_int(*v, "seed"));
    if (auto v = take("years")) {
        cfg.years.clear();
        for (const auto& tok : split(*v, ','))
            cfg.years.push_back(static_cast<int>(need_int(tok, "years")));
    }
    if (auto v = take("records_per_year")) {
        cfg.records_per_year.clear();
        for (const auto& tok : split(*v, ',')) {
            const long n = need_int(tok, "records_per_year");
            if (n < 0) throw Error("synth config: negative records_per_year");
            cfg.records_per_year.push_back(static_cast<std::size_t>(n));
        }
    }
    if (auto v = take("horizon_year")) cfg.horizon_year = static_cast<int>(need_int(*v, "horizon_year"));
    if (auto v = take("disciplines")) {
        for (const auto& tok : split(*v, ',')) {
            auto d = discipline_from_string(trim(tok));
            if (!d) throw Error("synth config: unknown discipline '" + tok + "'");
            cfg.disciplines.push_back(*d);
        }
    }
    if (auto v = take("discipline_weights")) {
        for (const auto& tok : split(*v, ','))
            cfg.discipline_weights.push_back(need_double(tok, "discipline_weights"));
    }
    if (cfg.disciplines.empty()) {
        cfg.disciplines = {Discipline::NaturalSciences};
    }
    if (cfg.discipline_weights.empty()) cfg.discipline_weights.assign(cfg.disciplines.size(), 1.0);

    auto scalar = [&](const char* key, double& dst) {
        if (auto v = take(key)) dst = need_double(*v, key);
    };
    auto int_scalar = [&](const char* key, int& dst) {
        if (auto v = take(key)) dst = static_cast<int>(need_int(*v, key));
    };
    int_scalar("categories_per_discipline", cfg.categories_per_discipline);
    int_scalar("journals_per_category", cfg.journals_per_category);
    scalar("multi_category_rate", cfg.multi_category_rate);
    scalar("non_article_rate", cfg.non_article_rate);
    scalar("internal_link_fraction", cfg.internal_link_fraction);
    scalar("pref_attach", cfg.pref_attach);
    scalar("jif_missing_rate", cfg.jif_missing_rate);
    scalar("pages_missing_rate", cfg.pages_missing_rate);
    scalar("coupling_refs", cfg.coupling_refs);
    scalar("coupling_authors", cfg.coupling_authors);
    scalar("coupling_pages", cfg.coupling_pages);
    scalar("coupling_jif", cfg.coupling_jif);

    auto model_field = [&](const char* key, double DisciplineModel::* member) {
        if (auto v = take(key)) cfg.base.*member = need_double(*v, key);
        for (Discipline d : kAllDisciplines) {
            std::string dotted = std::string(key) + "." + to_string(d);
            if (auto v = take(dotted.c_str())) {
                auto it = cfg.models.find(d);
                if (it == cfg.models.end()) it = cfg.models.emplace(d, cfg.base).first;
                it->second.*member = need_double(*v, dotted.c_str());
            }
        }
    };
    // base values must land before overrides copy them
    model_field("citation_mu", &DisciplineModel::citation_mu);
    model_field("citation_dispersion", &DisciplineModel::citation_dispersion);
    model_field("refs_mu", &DisciplineModel::refs_mu);
    model_field("refs_dispersion", &DisciplineModel::refs_dispersion);
    model_field("authors_log_mean", &DisciplineModel::authors_log_mean);
    model_field("authors_log_sigma", &DisciplineModel::authors_log_sigma);
    model_field("pages_log_mean", &DisciplineModel::pages_log_mean);
    model_field("pages_log_sigma", &DisciplineModel::pages_log_sigma);
    model_field("jif_log_mean", &DisciplineModel::jif_log_mean);
    model_field("jif_log_sigma", &DisciplineModel::jif_log_sigma);

    if (!kv.empty()) throw Error("synth config: unknown key '" + kv.begin()->first + "'");
    cfg.validate();
    return cfg;
}

inline std::string SynthConfig::canonical() const {
    std::ostringstream out;
    out << "seed = " << seed << "\n";
    out << "years = ";
    for (std::size_t i = 0; i < years.size(); ++i) out << (i ? "," : "") << years[i];
    out << "\nrecords_per_year = ";
    for (std::size_t i = 0; i < records_per_year.size(); ++i) out << (i ? "," : "") << records_per_year[i];
    out << "\nhorizon_year = " << horizon_year << "\n";
    out << "disciplines = ";
    for (std::size_t i = 0; i < disciplines.size(); ++i) out << (i ? "," : "") << to_string(disciplines[i]);
    out << "\ndiscipline_weights = ";
    for (std::size_t i = 0; i < discipline_weights.size(); ++i)
        out << (i ? "," : "") << format_sig(discipline_weights[i]);
    out << "\ncategories_per_discipline = " << categories_per_discipline << "\n";
    out << "journals_per_category = " << journals_per_category << "\n";
    out << "multi_category_rate = " << format_sig(multi_category_rate) << "\n";
    out << "non_article_rate = " << format_sig(non_article_rate) << "\n";
    out << "internal_link_fraction = " << format_sig(internal_link_fraction) << "\n";
    out << "pref_attach = " << format_sig(pref_attach) << "\n";
    out << "jif_missing_rate = " << format_sig(jif_missing_rate) << "\n";
    out << "pages_missing_rate = " << format_sig(pages_missing_rate) << "\n";
    out << "coupling_refs = " << format_sig(coupling_refs) << "\n";
    out << "coupling_authors = " << format_sig(coupling_authors) << "\n";
    out << "coupling_pages = " << format_sig(coupling_pages) << "\n";
    out << "coupling_jif = " << format_sig(coupling_jif) << "\n";

    auto emit_model = [&](const std::string& suffix, const DisciplineModel& m) {
        out << "citation_mu" << suffix << " = " << format_sig(m.citation_mu) << "\n";
        out << "citation_dispersion" << suffix << " = " << format_sig(m.citation_dispersion) << "\n";
        out << "refs_mu" << suffix << " = " << format_sig(m.refs_mu) << "\n";
        out << "refs_dispersion" << suffix << " = " << format_sig(m.refs_dispersion) << "\n";
        out << "authors_log_mean" << suffix << " = " << format_sig(m.authors_log_mean) << "\n";
        out << "authors_log_sigma" << suffix << " = " << format_sig(m.authors_log_sigma) << "\n";
        out << "pages_log_mean" << suffix << " = " << format_sig(m.pages_log_mean) << "\n";
        out << "pages_log_sigma" << suffix << " = " << format_sig(m.pages_log_sigma) << "\n";
        out << "jif_log_mean" << suffix << " = " << format_sig(m.jif_log_mean) << "\n";
        out << "jif_log_sigma" << suffix << " = " << format_sig(m.jif_log_sigma) << "\n";
    };
    emit_model("", base);
    for (const auto& [d, m] : models) emit_model(std::string(".") + to_string(d), m);
    return out.str();
}

/// Ledger sidecars: links, expected cell means, per-year/doc-type counts.
inline void write_ledger_links(const GeneratorLedger& ledger, std::ostream& out) {
    out << "citing_id,cited_id,citing_year\n";
    for (const auto& link : ledger.links)
        out << GeneratorLedger::record_id_of(link.citing) << ','
            << GeneratorLedger::record_id_of(link.cited) << ',' << link.citing_year << '\n';
}

inline void write_ledger_cells(const GeneratorLedger& ledger, std::ostream& out) {
    out << "category,pub_year,expected_mu\n";
    for (const auto& [key, mu] : ledger.cell_mu)
        out << key.first << ',' << key.second << ',' << format_sig(mu) << '\n';
}

inline void write_ledger_counts(const GeneratorLedger& ledger, std::ostream& out) {
    out << "pub_year,doc_type,n_records\n";
    for (const auto& [key, n] : ledger.per_year_doctype)
        out << key.first << ',' << key.second << ',' << n << '\n';
}

}  // namespace bibshare
