// geocorpus: label georeferenced text with a trigram MLP language
// identifier and audit the per-country results against population and
// census baselines.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "geocorpus/aggregate.hpp"
#include "geocorpus/baselines.hpp"
#include "geocorpus/geo.hpp"
#include "geocorpus/lid.hpp"
#include "geocorpus/metrics.hpp"
#include "geocorpus/pipeline.hpp"
#include "geocorpus/report.hpp"
#include "geocorpus/text_ingest.hpp"

namespace gc = geocorpus;

namespace {

int cmd_lid_train(const std::string& data, const std::string& out,
                  const gc::lid::ModelConfig& config) {
    auto samples = gc::lid::load_tsv(data);
    std::cerr << "training on " << samples.size() << " samples\n";
    auto model = gc::lid::train(samples, config);
    gc::lid::save_model(model, out);
    std::cerr << "wrote " << out << " (" << model.labels().size() << " labels)\n";
    return 0;
}

int cmd_lid_eval(const std::string& model_path, const std::string& data) {
    auto model = gc::lid::load_model(model_path);
    auto test = gc::lid::load_tsv(data);
    auto report = gc::lid::evaluate(model, test);
    std::printf("label,precision,recall,f1,support\n");
    for (const auto& [label, m] : report.per_label) {
        std::printf("%s,%.4f,%.4f,%.4f,%llu\n", label.code.c_str(), m.precision,
                    m.recall, m.f1, static_cast<unsigned long long>(m.support));
    }
    std::printf("macro_f1,%.4f,,,%llu\n", report.macro_f1,
                static_cast<unsigned long long>(report.n_samples));
    return 0;
}

int cmd_ingest(const std::string& input, const std::string& cities,
               const std::string& tld, const std::string& tld_excluded,
               const std::string& out_path, std::uint64_t min_chars) {
    gc::geo::TldTable tld_table = gc::geo::load_tld_table(tld, tld_excluded);
    gc::geo::CityIndex city_index(gc::geo::load_cities(cities));
    gc::ingest::Deduper deduper;

    std::ifstream in(input);
    if (!in) {
        std::cerr << "cannot open " << input << "\n";
        return 1;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }

    std::uint64_t n_in = 0, malformed = 0, ungeo = 0, short_ = 0, dup = 0, emitted = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++n_in;
        gc::ingest::RawDocument raw;
        try {
            raw = gc::ingest::parse_jsonl_record(line);
        } catch (const gc::Error&) {
            ++malformed;
            continue;
        }
        std::optional<gc::geo::CountryCode> country;
        std::string site;
        if (raw.source == gc::ingest::Source::web) {
            try {
                country = gc::geo::tld_to_country(*raw.url, tld_table);
                site = gc::geo::hostname_of(*raw.url);
            } catch (const gc::geo::BadUrl&) {
            }
        } else {
            site = "twitter";
            if (auto city = city_index.assign_city(*raw.lat, *raw.lon)) {
                country = city->country;
            }
        }
        if (!country) {
            ++ungeo;
            continue;
        }
        std::string text;
        if (raw.source == gc::ingest::Source::web) {
            std::string joined;
            for (const auto& p : gc::ingest::extract_paragraphs(raw.payload)) {
                if (!joined.empty()) joined.push_back(' ');
                joined += p;
            }
            text = gc::ingest::clean_text(joined, raw.source);
        } else {
            text = gc::ingest::clean_text(raw.payload, raw.source);
        }
        if (gc::utf8_length(text) < min_chars) {
            ++short_;
            continue;
        }
        gc::ingest::CleanDocument doc;
        doc.id = raw.id;
        doc.text = std::move(text);
        doc.word_count = gc::ingest::count_words(doc.text);
        doc.site = site;
        doc.time_bucket = gc::ingest::month_bucket(raw.timestamp).value_or("unknown");
        doc.source = raw.source;
        if (!deduper.accept(doc, *country)) {
            ++dup;
            continue;
        }
        ++emitted;
        out << gc::ingest::to_jsonl(doc, *country) << '\n';
    }
    std::cerr << "in=" << n_in << " emitted=" << emitted << " short=" << short_
              << " dedup=" << dup << " ungeolocated=" << ungeo
              << " malformed=" << malformed << "\n";
    return 0;
}

int cmd_aggregate(const std::string& input, const std::string& out) {
    // Reads labeled JSONL: {"country","lang","word_count",...} per line.
    std::ifstream in(input);
    if (!in) {
        std::cerr << "cannot open " << input << "\n";
        return 1;
    }
    gc::agg::CountryLanguageCounts counts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        counts.accumulate(j.at("word_count").get<std::uint64_t>(),
                          j.at("country").get<std::string>(),
                          {j.at("lang").get<std::string>()});
    }
    gc::agg::save_counts(counts, out);
    std::cerr << "total_words=" << counts.total_words << " n_docs=" << counts.n_docs
              << "\n";
    return 0;
}

int cmd_correlate(const std::vector<std::string>& counts_specs,
                  const std::string& baselines_path, const std::string& out) {
    std::map<std::string, std::map<gc::geo::CountryCode, std::uint64_t>> by_source;
    for (const auto& spec : counts_specs) {
        auto eq = spec.find('=');
        if (eq == std::string::npos) {
            std::cerr << "--counts expects name=path, got " << spec << "\n";
            return 1;
        }
        auto counts = gc::agg::load_counts(spec.substr(eq + 1));
        by_source[spec.substr(0, eq)] = gc::agg::country_totals(counts);
    }
    auto baseline_records = gc::baselines::load_baselines(baselines_path);
    auto matrix = gc::metrics::correlation_matrix(by_source, baseline_records);
    gc::report::write_correlation_json(matrix, out);
    std::cerr << "n_countries=" << matrix.n_countries << " dropped="
              << matrix.dropped.size() << "\n";
    return 0;
}

int cmd_represent(const std::string& counts_path, const std::string& baselines_path,
                  const std::string& mode, const std::string& out,
                  const std::string& geojson) {
    auto counts = gc::agg::load_counts(counts_path);
    auto baseline_records = gc::baselines::load_baselines(baselines_path);
    auto pops = gc::baselines::weight_population(
        baseline_records, gc::baselines::parse_weighting_mode(mode));
    auto scores =
        gc::metrics::representation_scores(gc::agg::country_totals(counts), pops);
    gc::report::write_representation_csv(scores, out);
    if (!geojson.empty()) {
        std::map<gc::geo::CountryCode, double> vals;
        for (const auto& s : scores) vals[s.country] = s.score;
        gc::report::emit_choropleth(vals, geojson);
    }
    return 0;
}

int cmd_inventory(const std::string& counts_path, const std::string& census_path,
                  double threshold, const std::string& out) {
    auto counts = gc::agg::load_counts(counts_path);
    auto census = gc::baselines::load_census(census_path);
    std::map<gc::geo::CountryCode, std::map<gc::lid::LanguageLabel, double>> shares;
    for (const auto& [c, total] : gc::agg::country_totals(counts)) {
        shares[c] = gc::agg::country_language_shares(counts, c);
    }
    auto eval = gc::metrics::inventory_eval(shares, census, threshold);
    gc::report::write_inventory_csv(eval, out);
    for (const auto& c : eval.excluded) {
        std::cerr << "excluded (no census data): " << c << "\n";
    }
    return 0;
}

int cmd_report(const std::string& counts_path, const std::string& out_dir,
               std::size_t top_k, std::uint64_t threshold, double svg_cap) {
    auto counts = gc::agg::load_counts(counts_path);
    std::filesystem::create_directories(out_dir);
    auto table = gc::agg::global_table(counts, threshold);
    {
        std::ofstream out(out_dir + "/global_table.csv");
        out << "rank,lang,words,share\n";
        out.precision(12);
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            out << i + 1 << ',' << table.rows[i].language.code << ','
                << table.rows[i].words << ',' << table.rows[i].share << '\n';
        }
    }
    gc::report::ReportSpec spec;
    spec.output_dir = out_dir;
    spec.top_k = top_k;
    spec.svg_share_cap = svg_cap;
    gc::report::emit_distribution_svg(table, spec, out_dir + "/distribution.svg");

    std::map<gc::geo::CountryCode, double> totals;
    for (const auto& [c, words] : gc::agg::country_totals(counts)) {
        totals[c] = static_cast<double>(words);
    }
    gc::report::emit_choropleth(totals, out_dir + "/country_words.geojson");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"georeferenced corpus labeling and demographic auditing"};
    app.require_subcommand(1);

    // lid-train
    auto* train = app.add_subcommand("lid-train", "train a language identifier");
    std::string train_data, train_out = "model.bin";
    gc::lid::ModelConfig cfg;
    train->add_option("--data", train_data, "training TSV (label<TAB>text)")->required();
    train->add_option("--out", train_out, "output model path");
    train->add_option("--feature-dim", cfg.feature_dim, "hash buckets");
    train->add_option("--hidden-dim", cfg.hidden_dim, "hidden layer size");
    train->add_option("--min-chars", cfg.min_chars, "minimum sample length");
    train->add_option("--seed", cfg.seed, "PRNG seed");
    train->add_option("--epochs", cfg.epochs, "training epochs");
    train->add_option("--lr", cfg.learning_rate, "learning rate");
    train->add_option("--batch-size", cfg.batch_size, "mini-batch size");

    // lid-eval
    auto* eval = app.add_subcommand("lid-eval", "evaluate a model on labeled data");
    std::string eval_model, eval_data;
    eval->add_option("--model", eval_model, "model file")->required();
    eval->add_option("--data", eval_data, "test TSV")->required();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "clean, geolocate, dedup a JSONL corpus");
    std::string ing_input, ing_cities, ing_tld, ing_tld_ex, ing_out = "clean.jsonl";
    std::uint64_t ing_min_chars = 50;
    ingest->add_option("--input", ing_input, "raw JSONL corpus")->required();
    ingest->add_option("--cities", ing_cities, "city CSV (name,iso3,lat,lon)")->required();
    ingest->add_option("--tld", ing_tld, "TLD CSV (tld,iso3)")->required();
    ingest->add_option("--tld-excluded", ing_tld_ex, "excluded-TLD CSV");
    ingest->add_option("--out", ing_out, "output JSONL");
    ingest->add_option("--min-chars", ing_min_chars, "length filter in code points");

    // aggregate
    auto* aggregate = app.add_subcommand("aggregate", "fold labeled JSONL into counts");
    std::string agg_input, agg_out = "counts.csv";
    aggregate->add_option("--input", agg_input, "labeled JSONL")->required();
    aggregate->add_option("--out", agg_out, "output counts CSV");

    // audit-correlate
    auto* correlate = app.add_subcommand("audit-correlate", "corpus/population Pearson matrix");
    std::vector<std::string> corr_counts;
    std::string corr_baselines, corr_out = "correlation.json";
    correlate->add_option("--counts", corr_counts, "name=path counts CSV (repeatable)")
        ->required();
    correlate->add_option("--baselines", corr_baselines, "baselines CSV")->required();
    correlate->add_option("--out", corr_out, "output JSON");

    // audit-represent
    auto* represent = app.add_subcommand("audit-represent", "per-country representation scores");
    std::string rep_counts, rep_baselines, rep_mode = "raw", rep_out = "representation.csv";
    std::string rep_geojson;
    represent->add_option("--counts", rep_counts, "counts CSV")->required();
    represent->add_option("--baselines", rep_baselines, "baselines CSV")->required();
    represent->add_option("--mode", rep_mode, "raw|gdp|internet");
    represent->add_option("--out", rep_out, "output CSV");
    represent->add_option("--geojson", rep_geojson, "also emit choropleth GeoJSON");

    // audit-inventory
    auto* inventory = app.add_subcommand("audit-inventory", "language inventory TP/FP audit");
    std::string inv_counts, inv_census, inv_out = "inventory.csv";
    double inv_threshold = 0.05;
    inventory->add_option("--counts", inv_counts, "counts CSV")->required();
    inventory->add_option("--census", inv_census, "census CSV")->required();
    inventory->add_option("--threshold", inv_threshold, "share threshold");
    inventory->add_option("--out", inv_out, "output CSV");

    // report
    auto* report_cmd = app.add_subcommand("report", "global table, SVG chart, choropleth");
    std::string rpt_counts, rpt_out_dir = "out";
    std::size_t rpt_top_k = 100;
    std::uint64_t rpt_threshold = gc::agg::kDefaultMinWords;
    double rpt_cap = 0.02;
    report_cmd->add_option("--counts", rpt_counts, "counts CSV")->required();
    report_cmd->add_option("--out-dir", rpt_out_dir, "output directory");
    report_cmd->add_option("--top-k", rpt_top_k, "languages to chart");
    report_cmd->add_option("--min-words", rpt_threshold, "global word threshold");
    report_cmd->add_option("--svg-cap", rpt_cap, "share axis cap");

    // run
    auto* run = app.add_subcommand("run", "full pipeline from a config file");
    std::string run_config;
    std::string run_input, run_model, run_out_dir;
    std::int64_t run_threads = 0;
    run->add_option("--config", run_config, "key=value config file")->required();
    run->add_option("--input", run_input, "override input.corpus");
    run->add_option("--model", run_model, "override model.path");
    run->add_option("--output-dir", run_out_dir, "override report.output_dir");
    run->add_option("--threads", run_threads, "override pipeline.threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) return cmd_lid_train(train_data, train_out, cfg);
        if (*eval) return cmd_lid_eval(eval_model, eval_data);
        if (*ingest) {
            return cmd_ingest(ing_input, ing_cities, ing_tld, ing_tld_ex, ing_out,
                              ing_min_chars);
        }
        if (*aggregate) return cmd_aggregate(agg_input, agg_out);
        if (*correlate) return cmd_correlate(corr_counts, corr_baselines, corr_out);
        if (*represent) {
            return cmd_represent(rep_counts, rep_baselines, rep_mode, rep_out,
                                 rep_geojson);
        }
        if (*inventory) {
            return cmd_inventory(inv_counts, inv_census, inv_threshold, inv_out);
        }
        if (*report_cmd) {
            return cmd_report(rpt_counts, rpt_out_dir, rpt_top_k, rpt_threshold,
                              rpt_cap);
        }
        if (*run) {
            auto config = gc::pipeline::Config::parse_file(run_config);
            if (!run_input.empty()) config.set("input.corpus", run_input);
            if (!run_model.empty()) config.set("model.path", run_model);
            if (!run_out_dir.empty()) config.set("report.output_dir", run_out_dir);
            if (run_threads > 0) {
                config.set("pipeline.threads", std::to_string(run_threads));
            }
            auto result = gc::pipeline::run_pipeline(config);
            if (result.exit_code != 0) std::cerr << result.error << "\n";
            return result.exit_code;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
