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

// Percentile shares, share densities and Gini coefficients over individual
// level outcome data.
//
// The construction: units are sorted ascending by a ranking variable (the
// outcome itself, or an alternative variable). Units with an identical
// ranking value are pooled into one block; the block's combined outcome mass
// is spread uniformly over the block's rank interval. This yields a
// piecewise linear generalized Lorenz curve L(p) on [0,1] whose value does
// not depend on the ordering of tied units. The share of the rank group
// (p1, p2] is (L(p2) - L(p1)) / L(1).
//
// Gini is the uncorrected normalized mean absolute pairwise difference,
//     G = sum_ij |y_i - y_j| / (2 n^2 ybar),
// computed via the equivalent sorted form sum_i (2i - n - 1) y_(i) / (n Y).
// Under the pooled-tie Lorenz construction this is identical to
// 1 - 2 * integral of L(p)/L(1) dp (exact trapezoid), which tests verify.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bibshare/common.hpp"

namespace bibshare {

/// Percentile cut points in percent, strictly increasing, inside (0, 100).
/// k cuts define k+1 rank groups whose widths sum to 100.
struct CutSpec {
    std::vector<double> cuts{50.0, 90.0};

    void validate() const {
        double prev = 0.0;
        for (double c : cuts) {
            if (!(c > prev && c < 100.0))
                throw Error("CutSpec: cuts must be strictly increasing inside (0, 100)");
            prev = c;
        }
    }

    std::size_t group_count() const { return cuts.size() + 1; }

    std::vector<double> group_widths() const {
        std::vector<double> w;
        double prev = 0.0;
        for (double c : cuts) {
            w.push_back(c - prev);
            prev = c;
        }
        w.push_back(100.0 - prev);
        return w;
    }

    // bottom50 / mid40 / top10 for two-cut specs; p<lo>_<hi> otherwise.
    std::vector<std::string> group_labels() const {
        std::vector<std::string> labels;
        if (cuts.size() == 2) {
            labels.push_back("bottom" + format_sig(cuts[0], 6));
            labels.push_back("mid" + format_sig(cuts[1] - cuts[0], 6));
            labels.push_back("top" + format_sig(100.0 - cuts[1], 6));
            return labels;
        }
        double prev = 0.0;
        for (std::size_t i = 0; i <= cuts.size(); ++i) {
            double hi = i < cuts.size() ? cuts[i] : 100.0;
            labels.push_back("p" + format_sig(prev, 6) + "_" + format_sig(hi, 6));
            prev = hi;
        }
        return labels;
    }

    static CutSpec parse(std::string_view text) {
        CutSpec spec;
        spec.cuts.clear();
        for (const auto& tok : split(text, ',')) {
            auto v = parse_double(tok);
            if (!v) throw Error("CutSpec: bad cut value '" + std::string(tok) + "'");
            spec.cuts.push_back(*v);
        }
        spec.validate();
        return spec;
    }
};

/// Group shares of total outcome for one population, plus the Gini of the
/// outcome variable. densities[i] == shares[i] / widths[i].
struct ShareBreakdown {
    std::vector<std::string> labels;
    std::vector<double> widths;
    std::vector<double> shares;
    std::vector<double> densities;
    std::size_t n_units = 0;
    double total_outcome = 0.0;
    double gini = 0.0;
    bool gini_zero_total = false;  // gini reported as 0 for an all-zero vector
};

namespace detail {

// Pooled rank blocks: intervals partition [0,1], masses sum to the total.
struct RankedMass {
    struct Block {
        double lo, hi;  // rank interval, fractions of [0,1]
        double mass;    // combined outcome of the pooled units
    };
    std::vector<Block> blocks;
    std::size_t n_units = 0;
};

inline void check_outcomes(std::span<const double> outcomes) {
    if (outcomes.empty()) throw Error("percentile shares: empty input");
    for (double y : outcomes) {
        if (!(y >= 0.0) || !std::isfinite(y))
            throw Error("percentile shares: outcomes must be finite and non-negative");
    }
}

inline RankedMass pooled_ranked_mass(std::span<const double> outcomes,
                                     std::span<const double> ranking) {
    const std::size_t n = outcomes.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return ranking[a] < ranking[b];
    });

    RankedMass rm;
    rm.n_units = n;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        KahanSum mass;
        while (j < n && ranking[order[j]] == ranking[order[i]]) {
            mass.add(outcomes[order[j]]);
            ++j;
        }
        rm.blocks.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n, mass.value()});
        i = j;
    }
    return rm;
}

// L at each cut plus the total; cum sums are compensated so that 1e-9 share
// tolerances survive 1e6-unit populations.
inline std::vector<double> lorenz_at_cuts(const RankedMass& rm, const std::vector<double>& cuts_pct) {
    std::vector<double> values;
    values.reserve(cuts_pct.size());
    std::size_t b = 0;
    KahanSum cum;
    for (double cut : cuts_pct) {
        const double p = cut / 100.0;
        while (b < rm.blocks.size() && rm.blocks[b].hi <= p) {
            cum.add(rm.blocks[b].mass);
            ++b;
        }
        double L = cum.value();
        if (b < rm.blocks.size() && rm.blocks[b].lo < p) {
            const auto& blk = rm.blocks[b];
            L += blk.mass * ((p - blk.lo) / (blk.hi - blk.lo));
        }
        values.push_back(L);
    }
    return values;
}

inline double total_mass(const RankedMass& rm) {
    KahanSum t;
    for (const auto& blk : rm.blocks) t.add(blk.mass);
    return t.value();
}

}  // namespace detail

/// Gini coefficient in [0, 1). An all-zero vector yields 0; `zero_total` is
/// set when given so callers can tell it apart from genuine equality.
inline double gini(std::span<const double> outcomes, bool* zero_total = nullptr) {
    detail::check_outcomes(outcomes);
    if (zero_total) *zero_total = false;

    std::vector<double> sorted(outcomes.begin(), outcomes.end());
    std::sort(sorted.begin(), sorted.end());

    KahanSum total;
    for (double y : sorted) total.add(y);
    if (total.value() <= 0.0) {
        if (zero_total) *zero_total = true;
        return 0.0;
    }

    const double n = static_cast<double>(sorted.size());
    KahanSum weighted;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        weighted.add((2.0 * (static_cast<double>(i) + 1.0) - n - 1.0) * sorted[i]);
    }
    return weighted.value() / (n * total.value());
}

/// Percentile shares of `outcomes` with rank positions taken from `ranking`.
/// Ties in the ranking variable are pooled; results are independent of the
/// ordering of tied units. The attached Gini is that of the outcome variable.
inline ShareBreakdown percentile_shares_by(std::span<const double> outcomes,
                                           std::span<const double> ranking,
                                           const CutSpec& cuts = CutSpec{}) {
    cuts.validate();
    detail::check_outcomes(outcomes);
    if (outcomes.size() != ranking.size())
        throw Error("percentile shares: outcome and ranking lengths differ");
    for (double r : ranking) {
        if (!std::isfinite(r)) throw Error("percentile shares: ranking values must be finite");
    }

    auto rm = detail::pooled_ranked_mass(outcomes, ranking);
    const double total = detail::total_mass(rm);
    if (total <= 0.0) throw Error("percentile shares: degenerate distribution (total outcome is zero)");

    auto at_cuts = detail::lorenz_at_cuts(rm, cuts.cuts);

    ShareBreakdown b;
    b.labels = cuts.group_labels();
    b.widths = cuts.group_widths();
    b.n_units = outcomes.size();
    b.total_outcome = total;

    double prev = 0.0;
    for (double L : at_cuts) {
        b.shares.push_back((L - prev) / total * 100.0);
        prev = L;
    }
    b.shares.push_back((total - prev) / total * 100.0);
    for (std::size_t i = 0; i < b.shares.size(); ++i) b.densities.push_back(b.shares[i] / b.widths[i]);
    b.gini = gini(outcomes, &b.gini_zero_total);
    return b;
}

/// Percentile shares with units ranked by the outcome itself.
inline ShareBreakdown percentile_shares(std::span<const double> outcomes,
                                        const CutSpec& cuts = CutSpec{}) {
    return percentile_shares_by(outcomes, outcomes, cuts);
}

/// density_i = share_i / width_i; 1 means the group holds its proportional share.
inline std::vector<double> share_density(const ShareBreakdown& b) {
    std::vector<double> d;
    d.reserve(b.shares.size());
    for (std::size_t i = 0; i < b.shares.size(); ++i) d.push_back(b.shares[i] / b.widths[i]);
    return d;
}

}  // namespace bibshare
