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

// bibshare: percentile-share analytics over bibliographic corpora.
//
// Subcommands: synth (generate a corpus), ingest (validate only),
// analyze (full pipeline to report files), shares (stdin calculator),
// report (re-emit a saved matrix).
//
// Exit codes: 0 success, 2 missing/unreadable input or usage error,
// 3 schema violation, 4 degenerate analysis (zero rows), 1 other failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bibshare/analysis.hpp"
#include "bibshare/corpus.hpp"
#include "bibshare/inequality.hpp"
#include "bibshare/linking.hpp"
#include "bibshare/normalize.hpp"
#include "bibshare/parallel.hpp"
#include "bibshare/synth.hpp"

namespace fs = std::filesystem;
using namespace bibshare;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSchema = 3;
constexpr int kExitDegenerate = 4;

std::size_t peak_rss_kb() {
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            if (auto v = parse_int(trim(std::string_view(line).substr(6, line.size() - 6 - 3))))
                return static_cast<std::size_t>(*v);
        }
    }
    return 0;
}

void require_readable(const std::string& path, const char* what) {
    if (!fs::exists(path)) throw IoError(std::string(what) + " not found: " + path);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

using Clock = std::chrono::steady_clock;

long ms_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

struct SynthArgs {
    std::string config_path;
    std::string out_path;
    std::string ledger_dir;
    std::int64_t seed = -1;  // override when >= 0
    int threads = default_threads();
};

int run_synth(const SynthArgs& args) {
    require_readable(args.config_path, "config");
    auto cfg = SynthConfig::from_file(args.config_path);
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);

    auto out = open_out(args.out_path);
    const auto t0 = Clock::now();
    auto ledger = generate_corpus(cfg, out, args.threads);
    out.close();
    std::cerr << "synth: " << ledger.n_records << " records, " << ledger.links.size()
              << " planted links in " << ms_since(t0) << " ms\n";

    if (!args.ledger_dir.empty()) {
        fs::create_directories(args.ledger_dir);
        const fs::path dir(args.ledger_dir);
        {
            auto f = open_out(dir / "links.csv");
            write_ledger_links(ledger, f);
        }
        {
            auto f = open_out(dir / "cells.csv");
            write_ledger_cells(ledger, f);
        }
        {
            auto f = open_out(dir / "counts.csv");
            write_ledger_counts(ledger, f);
        }
        {
            auto f = open_out(dir / "config.txt");
            f << cfg.canonical();
        }
    }
    return kExitOk;
}

struct IngestArgs {
    std::string records_path;
    std::string scheme_path;
    int horizon = 2100;
    bool strict = false;
    int threads = default_threads();
};

int run_ingest(const IngestArgs& args) {
    require_readable(args.records_path, "records");
    require_readable(args.scheme_path, "scheme");
    auto scheme = FieldScheme::from_file(args.scheme_path);
    IngestConfig cfg;
    cfg.horizon_year = args.horizon;
    cfg.fatal_on_malformed = args.strict;
    cfg.threads = args.threads;
    auto snapshot = ingest_file(args.records_path, std::move(scheme), cfg);
    std::cout << snapshot.stats().summary() << "\n";
    for (const auto& reject : snapshot.stats().rejects)
        std::cerr << "line " << reject.line_no << ": " << reject.reason << "\n";
    return kExitOk;
}

struct AnalyzeArgs {
    std::string records_path;
    std::string scheme_path;
    std::vector<int> years;
    std::string window = "open:2014";
    std::string density_window = "fixed:3";
    std::string cuts = "50,90";
    std::vector<std::string> fics;
    std::vector<std::string> outcomes{"raw"};
    std::string out_dir;
    std::string export_links;
    std::string export_cells;
    int horizon = 2100;
    int threads = default_threads();
};

int run_analyze(const AnalyzeArgs& args) {
    require_readable(args.records_path, "records");
    require_readable(args.scheme_path, "scheme");
    if (args.years.empty()) throw IoError("analyze: --years must name at least one year");

    const auto window = WindowSpec::parse(args.window);
    const auto density_window = WindowSpec::parse(args.density_window);
    const auto cuts = CutSpec::parse(args.cuts);
    std::vector<FicKind> fics;
    for (const auto& tok : args.fics) {
        auto f = fic_from_token(tok);
        if (!f) throw Error("analyze: unknown fic token '" + tok + "'");
        fics.push_back(*f);
    }
    bool want_raw = false, want_mncs = false;
    for (const auto& tok : args.outcomes) {
        if (tok == "raw" || tok == "times_cited")
            want_raw = true;
        else if (tok == "mncs")
            want_mncs = true;
        else
            throw Error("analyze: unknown outcome token '" + tok + "' (use raw, mncs)");
    }

    nlohmann::json timings;
    const auto t_total = Clock::now();

    // ingest the full corpus
    auto t = Clock::now();
    auto scheme = FieldScheme::from_file(args.scheme_path);
    IngestConfig icfg;
    icfg.horizon_year = args.horizon;
    icfg.threads = args.threads;
    auto full = ingest_file(args.records_path, std::move(scheme), icfg);
    timings["ingest_ms"] = ms_since(t);
    const auto ingest_summary = full.stats().summary();
    const std::size_t n_ingested = full.size();
    const std::size_t n_rejected = full.stats().n_rejected;
    auto rejects = full.stats().rejects;

    // link on the full corpus so linked counts cover every document type
    t = Clock::now();
    LinkOptions lopt;
    lopt.threads = args.threads;
    lopt.collect_table = !args.export_links.empty();
    auto index = link_references(full, lopt);
    timings["link_ms"] = ms_since(t);

    if (!args.export_links.empty()) {
        auto f = open_out(args.export_links);
        write_link_table(index, full, f);
    }

    // restrict to articles from the requested years
    t = Clock::now();
    std::set<int> years(args.years.begin(), args.years.end());
    auto snapshot = filter_articles(std::move(full), years);
    timings["filter_ms"] = ms_since(t);
    if (snapshot.size() == 0) {
        std::cerr << "analyze: no articles left after filtering\n";
        return kExitDegenerate;
    }

    CellTable cells;
    if (want_mncs) {
        t = Clock::now();
        cells = compute_cell_means(snapshot, &index, window);
        timings["cells_ms"] = ms_since(t);
        if (!args.export_cells.empty()) {
            auto f = open_out(args.export_cells);
            write_cells(cells, f);
        }
    }

    t = Clock::now();
    auto matrix = impact_distribution(snapshot, index, window, cuts, args.threads);
    matrix.merge(density_profile(snapshot, index, density_window, cuts, args.threads));
    for (FicKind fic : fics) {
        if (want_raw)
            matrix.merge(
                fic_covariate(snapshot, index, nullptr, fic, OutcomeKind::TimesCited, window, cuts,
                              args.threads));
        if (want_mncs)
            matrix.merge(fic_covariate(snapshot, index, &cells, fic, OutcomeKind::Mncs, window, cuts,
                                       args.threads));
    }
    timings["analyze_ms"] = ms_since(t);

    if (matrix.rows.empty()) {
        std::cerr << "analyze: analysis produced zero rows\n";
        return kExitDegenerate;
    }

    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    t = Clock::now();
    {
        auto f = open_out(dir / "report.csv");
        emit_report(matrix, f);
    }
    {
        auto f = open_out(dir / "matrix.json");
        f << matrix_to_json(matrix).dump(1) << "\n";
    }
    {
        auto f = open_out(dir / "analysis.log");
        for (const auto& reject : rejects) f << "ingest line " << reject.line_no << ": " << reject.reason << "\n";
        for (const auto& notice : matrix.notices) f << notice << "\n";
    }
    timings["report_ms"] = ms_since(t);
    timings["total_ms"] = ms_since(t_total);

    // run manifest: inputs, config hash, row counts, timings
    {
        std::string config_echo = args.records_path + "|" + args.scheme_path + "|" + args.window + "|" +
                                  args.density_window + "|" + args.cuts + "|";
        for (int y : args.years) config_echo += std::to_string(y) + ",";
        for (const auto& f : args.fics) config_echo += f + ",";
        for (const auto& o : args.outcomes) config_echo += o + ",";
        nlohmann::json manifest;
        manifest["command"] = "analyze";
        manifest["records"] = args.records_path;
        manifest["scheme"] = args.scheme_path;
        manifest["years"] = args.years;
        manifest["window"] = window.to_string();
        manifest["density_window"] = density_window.to_string();
        manifest["cuts"] = args.cuts;
        manifest["fics"] = args.fics;
        manifest["outcomes"] = args.outcomes;
        manifest["threads"] = args.threads;
        char hash_hex[32];
        std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(config_echo)));
        manifest["config_hash"] = hash_hex;
        manifest["n_ingested"] = n_ingested;
        manifest["n_rejected"] = n_rejected;
        manifest["n_articles"] = snapshot.size();
        manifest["ingest_summary"] = ingest_summary;
        manifest["article_summary"] = snapshot.stats().summary();
        manifest["total_refs"] = index.metadata().n_refs;
        manifest["total_linked_refs"] = index.total_linked_refs();
        manifest["total_inbound"] = index.total_inbound();
        manifest["n_ambiguous"] = index.metadata().n_ambiguous;
        manifest["n_backdated"] = index.metadata().n_backdated;
        manifest["n_rows"] = matrix.rows.size();
        manifest["n_notices"] = matrix.notices.size();
        manifest["timings"] = timings;
        manifest["peak_rss_kb"] = peak_rss_kb();
        auto f = open_out(dir / "run_manifest.json");
        f << manifest.dump(1) << "\n";
    }

    std::cerr << "analyze: " << matrix.rows.size() << " rows (" << matrix.notices.size()
              << " notices) in " << timings["total_ms"] << " ms\n";
    return kExitOk;
}

struct SharesArgs {
    std::string cuts = "50,90";
};

int run_shares(const SharesArgs& args) {
    const auto cuts = CutSpec::parse(args.cuts);
    std::vector<double> values;
    double v;
    while (std::cin >> v) values.push_back(v);
    if (!std::cin.eof() && std::cin.fail()) throw Error("shares: non-numeric input on stdin");
    auto b = percentile_shares(values, cuts);
    for (std::size_t g = 0; g < b.shares.size(); ++g)
        std::cout << b.labels[g] << " " << format_sig(b.shares[g]) << " density "
                  << format_sig(b.densities[g]) << "\n";
    std::cout << "gini " << format_sig(b.gini) << "\n";
    std::cout << "n " << b.n_units << " total " << format_sig(b.total_outcome) << "\n";
    return kExitOk;
}

struct ReportArgs {
    std::string matrix_path;
    std::string out_dir;
};

int run_report(const ReportArgs& args) {
    require_readable(args.matrix_path, "matrix");
    std::ifstream in(args.matrix_path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw SchemaError("report: matrix file is not valid json");
    auto matrix = matrix_from_json(j);
    if (matrix.rows.empty()) {
        std::cerr << "report: matrix has zero rows\n";
        return kExitDegenerate;
    }
    fs::create_directories(args.out_dir);
    auto f = open_out(fs::path(args.out_dir) / "report.csv");
    emit_report(matrix, f);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"percentile shares, Gini coefficients and citation covariate analyses over "
                 "bibliographic corpora.\nExit codes: 0 success, 2 missing input/usage, 3 schema "
                 "violation, 4 degenerate analysis, 1 other."};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with a ground-truth ledger");
    synth->add_option("--config", synth_args.config_path, "key=value generator config file")->required();
    synth->add_option("--seed", synth_args.seed, "override the config seed (>= 0)");
    synth->add_option("--out", synth_args.out_path, "output JSON-lines corpus path")->required();
    synth->add_option("--ledger-dir", synth_args.ledger_dir,
                      "also write links.csv / cells.csv / counts.csv / config.txt here");
    synth->add_option("--threads", synth_args.threads, "worker threads (default: cores)");

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "validate a corpus file and print its statistics");
    ingest->add_option("--records", ingest_args.records_path, "JSON-lines corpus")->required();
    ingest->add_option("--scheme", ingest_args.scheme_path, "category,discipline CSV")->required();
    ingest->add_option("--horizon", ingest_args.horizon, "latest acceptable pub_year (default 2100)");
    ingest->add_flag("--strict", ingest_args.strict, "treat malformed lines as fatal");
    ingest->add_option("--threads", ingest_args.threads, "worker threads (default: cores)");

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "full pipeline: ingest, link, normalize, analyze, report");
    analyze->add_option("--records", analyze_args.records_path, "JSON-lines corpus")->required();
    analyze->add_option("--scheme", analyze_args.scheme_path, "category,discipline CSV")->required();
    analyze->add_option("--years", analyze_args.years, "publication years, e.g. 1990,2000,2010")
        ->required()
        ->delimiter(',');
    analyze->add_option("--window", analyze_args.window,
                        "citation window: open:YYYY or fixed:K (default open:2014)");
    analyze->add_option("--density-window", analyze_args.density_window,
                        "fixed window for the pooled density rows (default fixed:3)");
    analyze->add_option("--cuts", analyze_args.cuts, "percentile cut points (default 50,90)");
    analyze->add_option("--fic", analyze_args.fics,
                        "covariates to rank by: all_refs,linked_refs,authors,pages,jif")
        ->delimiter(',');
    analyze->add_option("--outcome", analyze_args.outcomes, "outcomes: raw and/or mncs (default raw)")
        ->delimiter(',');
    analyze->add_option("--out", analyze_args.out_dir, "output directory")->required();
    analyze->add_option("--export-links", analyze_args.export_links, "write the audit link table here");
    analyze->add_option("--export-cells", analyze_args.export_cells, "write the reference cells here");
    analyze->add_option("--horizon", analyze_args.horizon, "latest acceptable pub_year (default 2100)");
    analyze->add_option("--threads", analyze_args.threads, "worker threads (default: cores)");

    SharesArgs shares_args;
    auto* shares = app.add_subcommand("shares", "percentile shares and Gini of numbers on stdin");
    shares->add_option("--cuts", shares_args.cuts, "percentile cut points (default 50,90)");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "re-emit report.csv from a saved matrix.json");
    report->add_option("--matrix", report_args.matrix_path, "matrix.json from a previous run")->required();
    report->add_option("--out", report_args.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(synth_args);
        if (ingest->parsed()) return run_ingest(ingest_args);
        if (analyze->parsed()) return run_analyze(analyze_args);
        if (shares->parsed()) return run_shares(shares_args);
        if (report->parsed()) return run_report(report_args);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
