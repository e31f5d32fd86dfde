#include "geocorpus/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "geocorpus/aggregate.hpp"
#include "geocorpus/baselines.hpp"
#include "geocorpus/geo.hpp"
#include "geocorpus/lid.hpp"
#include "geocorpus/metrics.hpp"
#include "geocorpus/report.hpp"
#include "geocorpus/text_ingest.hpp"

namespace geocorpus::pipeline {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": unterminated section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        cfg.entries_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

bool Config::has(const std::string& key) const { return entries_.contains(key); }

std::string Config::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

std::int64_t Config::get_int_or(const std::string& key, std::int64_t fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer: " + it->second);
    }
}

double Config::get_double_or(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a number: " + it->second);
    }
}

void Config::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

unsigned effective_threads(const Config& config) {
    if (const char* env = std::getenv("GEOCORPUS_THREADS")) {
        try {
            auto n = std::stoul(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    auto n = config.get_int_or("pipeline.threads", 1);
    return n > 0 ? static_cast<unsigned>(n) : 1u;
}

namespace {

std::uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open input file: " + path);
    std::uint64_t h = kFnvOffset;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct LabeledDoc {
    ingest::CleanDocument doc;
    geo::CountryCode country;
    lid::LanguageLabel lang;
    double confidence = 0.0;
};

}  // namespace

RunResult run_pipeline(const Config& config) {
    RunResult result;
    std::string stage = "setup";
    const std::string out_dir = config.get_or("report.output_dir", "out");
    try {
        fs::create_directories(out_dir);

        const std::string corpus_path = config.get("input.corpus");
        const std::string model_path = config.get("model.path");

        stage = "load-model";
        lid::LidModel model = lid::load_model(model_path);

        stage = "load-geo";
        geo::TldTable tld_table = geo::load_tld_table(
            config.get("geo.tld"), config.get_or("geo.tld_excluded", ""));
        geo::CityIndex city_index(geo::load_cities(config.get("geo.cities")));

        const std::uint64_t min_chars =
            std::max<std::uint64_t>(config.get_int_or("pipeline.min_chars", 50),
                                    model.config().min_chars);

        stage = "ingest";
        Manifest& m = result.manifest;
        ingest::Deduper deduper;
        std::vector<std::pair<ingest::CleanDocument, geo::CountryCode>> survivors;

        std::ifstream in(corpus_path);
        if (!in) throw Error("cannot open corpus: " + corpus_path);
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            ++m.docs_in;
            ingest::RawDocument raw;
            try {
                raw = ingest::parse_jsonl_record(line);
            } catch (const Error&) {
                ++m.docs_malformed;
                continue;
            }

            // Geolocate before text work: an unmappable record is dropped
            // regardless of its content.
            std::optional<geo::CountryCode> country;
            std::string site;
            if (raw.source == ingest::Source::web) {
                try {
                    country = geo::tld_to_country(*raw.url, tld_table);
                    site = geo::hostname_of(*raw.url);
                } catch (const geo::BadUrl&) {
                    country = std::nullopt;
                }
            } else {
                site = "twitter";
                if (auto city = city_index.assign_city(*raw.lat, *raw.lon)) {
                    country = city->country;
                }
            }
            if (!country) {
                ++m.docs_dropped_ungeolocated;
                continue;
            }

            std::string text;
            if (raw.source == ingest::Source::web) {
                std::string joined;
                for (const auto& p : ingest::extract_paragraphs(raw.payload)) {
                    if (!joined.empty()) joined.push_back(' ');
                    joined += p;
                }
                text = ingest::clean_text(joined, raw.source);
            } else {
                text = ingest::clean_text(raw.payload, raw.source);
            }
            if (utf8_length(text) < min_chars) {
                ++m.docs_dropped_short;
                continue;
            }

            ingest::CleanDocument doc;
            doc.id = raw.id;
            doc.text = std::move(text);
            doc.word_count = ingest::count_words(doc.text);
            doc.site = site;
            doc.time_bucket = ingest::month_bucket(raw.timestamp).value_or("unknown");
            doc.source = raw.source;
            if (!deduper.accept(doc, *country)) {
                ++m.docs_dropped_dedup;
                continue;
            }
            survivors.emplace_back(std::move(doc), *country);
        }
        m.docs_emitted = survivors.size();

        stage = "predict";
        std::vector<LabeledDoc> labeled(survivors.size());
        const unsigned n_threads = std::min<unsigned>(
            effective_threads(config),
            static_cast<unsigned>(std::max<std::size_t>(survivors.size(), 1)));
        auto work = [&](unsigned t) {
            for (std::size_t i = t; i < survivors.size(); i += n_threads) {
                auto [label, conf] = model.predict(survivors[i].first.text);
                labeled[i] = {survivors[i].first, survivors[i].second, label, conf};
            }
        };
        if (n_threads <= 1) {
            work(0);
        } else {
            std::vector<std::thread> workers;
            for (unsigned t = 0; t < n_threads; ++t) workers.emplace_back(work, t);
            for (auto& w : workers) w.join();
        }

        stage = "aggregate";
        agg::CountryLanguageCounts counts;
        for (const auto& ld : labeled) {
            counts.accumulate(ld.doc.word_count, ld.country, ld.lang);
        }

        stage = "write-labeled";
        {
            std::ofstream out(out_dir + "/labeled.jsonl");
            for (const auto& ld : labeled) {
                nlohmann::json j{
                    {"id", ld.doc.id},
                    {"country", ld.country},
                    {"lang", ld.lang.code},
                    {"confidence", ld.confidence},
                    {"word_count", ld.doc.word_count},
                    {"site", ld.doc.site},
                    {"time_bucket", ld.doc.time_bucket},
                    {"source", ld.doc.source == ingest::Source::web ? "web" : "twitter"},
                };
                out << j.dump() << '\n';
            }
        }

        stage = "write-counts";
        agg::save_counts(counts, out_dir + "/counts.csv");
        if (counts.total_words > 0) {
            auto table = agg::global_table(
                counts, static_cast<std::uint64_t>(
                            config.get_int_or("report.global_threshold",
                                              static_cast<std::int64_t>(agg::kDefaultMinWords))));
            {
                std::ofstream out(out_dir + "/global_table.csv");
                out << "rank,lang,words,share\n";
                out.precision(12);
                for (std::size_t i = 0; i < table.rows.size(); ++i) {
                    out << i + 1 << ',' << table.rows[i].language.code << ','
                        << table.rows[i].words << ',' << table.rows[i].share << '\n';
                }
            }
            if (!table.rows.empty() &&
                config.get_or("report.formats", "csv,json").find("svg") !=
                    std::string::npos) {
                report::ReportSpec spec;
                spec.top_k = static_cast<std::size_t>(config.get_int_or("report.top_k", 100));
                spec.svg_share_cap = config.get_double_or("report.svg_cap", 0.02);
                report::emit_distribution_svg(table, spec, out_dir + "/distribution.svg");
            }
        }

        // Audits run only when baseline data is configured.
        const double inv_threshold = config.get_double_or("report.inventory_threshold", 0.05);
        if (config.has("baselines.population")) {
            stage = "metrics";
            auto baseline_records = baselines::load_baselines(config.get("baselines.population"));
            auto pops = baselines::weight_population(baseline_records,
                                                     baselines::WeightingMode::raw);

            // Per-source word totals per country.
            std::map<std::string, std::map<geo::CountryCode, std::uint64_t>> by_source;
            for (const auto& ld : labeled) {
                const char* src = ld.doc.source == ingest::Source::web ? "web" : "twitter";
                by_source[src][ld.country] += ld.doc.word_count;
            }

            for (const auto& [src, words] : by_source) {
                auto scores = metrics::representation_scores(words, pops);
                report::write_representation_csv(
                    scores, out_dir + "/representation_" + src + ".csv");
                if (config.get_or("report.formats", "csv,json").find("geojson") !=
                    std::string::npos) {
                    std::map<geo::CountryCode, double> vals;
                    for (const auto& s : scores) vals[s.country] = s.score;
                    report::emit_choropleth(
                        vals, out_dir + "/representation_" + src + ".geojson");
                }
            }

            try {
                auto corr = metrics::correlation_matrix(by_source, baseline_records);
                report::write_correlation_json(corr, out_dir + "/correlation.json");
            } catch (const metrics::InsufficientOverlap&) {
                // Small corpora cannot support the matrix; skip quietly.
            }

            if (config.has("baselines.census")) {
                stage = "inventory";
                auto census = baselines::load_census(config.get("baselines.census"));
                std::map<geo::CountryCode, std::map<lid::LanguageLabel, double>> shares;
                for (const auto& [c, total] : agg::country_totals(counts)) {
                    shares[c] = agg::country_language_shares(counts, c);
                }
                auto eval = metrics::inventory_eval(shares, census, inv_threshold);
                report::write_inventory_csv(eval, out_dir + "/inventory.csv");
            }
        } else if (config.has("baselines.census")) {
            throw Error("baselines.population is required when baselines.census is set");
        }

        stage = "manifest";
        nlohmann::json manifest{
            {"docs_in", m.docs_in},
            {"docs_emitted", m.docs_emitted},
            {"docs_dropped_short", m.docs_dropped_short},
            {"docs_dropped_dedup", m.docs_dropped_dedup},
            {"docs_dropped_ungeolocated", m.docs_dropped_ungeolocated},
            {"docs_malformed", m.docs_malformed},
            {"input_hashes", {{corpus_path, hex64(file_hash(corpus_path))}}},
            {"config", config.entries()},
            {"timestamp",
             std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
                 .count()},
        };
        std::ofstream mout(out_dir + "/manifest.json");
        mout << manifest.dump(2) << '\n';
    } catch (const std::exception& e) {
        result.exit_code = 1;
        result.error = "[" + stage + "] " + e.what();
        nlohmann::json err{{"stage", stage}, {"error", e.what()}};
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        std::ofstream eout(out_dir + "/error.json");
        eout << err.dump(2) << '\n';
    }
    return result;
}

RunResult run_pipeline_file(const std::string& config_path) {
    return run_pipeline(Config::parse_file(config_path));
}

}  // namespace geocorpus::pipeline
