#pragma once

// Synthetic corpus fixture shared by the pipeline tests and the
// acceptance suite: 1000 JSONL documents with a known number of planted
// duplicates (100), short records (50), and unmappable TLDs (30), plus a
// small two-language model and the geo tables to drive the pipeline.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "geocorpus/lid.hpp"
#include "geocorpus/util.hpp"

namespace fixtures {

struct PipelineFixture {
    std::string dir;
    std::string corpus_path;
    std::string model_path;
    std::string cities_path;
    std::string tld_path;
    std::string config_text;  // without [report] output_dir

    std::uint64_t docs_total = 0;
    std::uint64_t expected_emitted = 0;
    std::uint64_t expected_dup = 0;
    std::uint64_t expected_short = 0;
    std::uint64_t expected_ungeo = 0;
    std::uint64_t expected_malformed = 0;

    // Independent recount: (iso3, lang) -> words over emitted docs.
    std::map<std::pair<std::string, std::string>, std::uint64_t> expected_counts;
};

inline std::string synth_words(geocorpus::Rng& rng, const std::string& alphabet,
                               std::size_t min_chars) {
    std::string text;
    while (text.size() < min_chars) {
        if (!text.empty()) text.push_back(' ');
        const std::size_t len = 4 + rng.next_below(3);
        for (std::size_t i = 0; i < len; ++i) {
            text.push_back(
                alphabet[static_cast<std::size_t>(rng.next_below(alphabet.size()))]);
        }
    }
    return text;
}

// Base-10 index spelled in the language's own alphabet, so uniqueness
// never leaves the alphabet.
inline std::string index_token(std::size_t index, const std::string& alphabet) {
    std::string digits = std::to_string(index);
    std::string token;
    for (char d : digits) token.push_back(alphabet[static_cast<std::size_t>(d - '0')]);
    return token;
}

inline std::uint64_t token_count(const std::string& text) {
    // Independent word recount: plain space-delimited tokens (the fixture
    // is ASCII only).
    std::uint64_t n = 0;
    bool in_token = false;
    for (char c : text) {
        if (c == ' ') {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++n;
        }
    }
    return n;
}

inline PipelineFixture make_pipeline_fixture(const std::string& dir,
                                             bool with_malformed = false) {
    namespace fs = std::filesystem;
    using geocorpus::Rng;
    namespace lid = geocorpus::lid;

    fs::create_directories(dir);
    PipelineFixture fx;
    fx.dir = dir;
    fx.corpus_path = dir + "/corpus.jsonl";
    fx.model_path = dir + "/model.bin";
    fx.cities_path = dir + "/cities.csv";
    fx.tld_path = dir + "/tld.csv";

    const std::string alpha_a = "abcdefghij";
    const std::string alpha_b = "klmnopqrst";

    // Small fast model over the two synthetic languages.
    {
        lid::ModelConfig cfg;
        cfg.feature_dim = 1u << 12;
        cfg.hidden_dim = 16;
        cfg.min_chars = 50;
        cfg.seed = 7;
        cfg.epochs = 3;
        cfg.learning_rate = 0.5;
        cfg.batch_size = 16;
        Rng rng(1001);
        std::vector<std::pair<std::string, lid::LanguageLabel>> samples;
        for (int i = 0; i < 300; ++i) {
            samples.emplace_back(synth_words(rng, alpha_a, 50), lid::LanguageLabel{"lga"});
            samples.emplace_back(synth_words(rng, alpha_b, 50), lid::LanguageLabel{"lgb"});
        }
        lid::save_model(lid::train(samples, cfg), fx.model_path);
    }

    {
        std::ofstream out(fx.cities_path);
        out << "name,iso3,lat,lon\n"
            << "Auckland,NZL,-36.8485,174.7633\n"
            << "Toronto,CAN,43.6532,-79.3832\n"
            << "Mumbai,IND,19.0760,72.8777\n";
    }
    {
        std::ofstream out(fx.tld_path);
        out << "tld,iso3\nca,CAN\nnz,NZL\nin,IND\n";
    }

    struct City {
        const char* iso3;
        double lat, lon;
    };
    const City cities[] = {{"NZL", -36.8485, 174.7633},
                           {"CAN", 43.6532, -79.3832},
                           {"IND", 19.0760, 72.8777}};
    const char* web_tlds[] = {"nz", "ca", "in"};
    const char* web_countries[] = {"NZL", "CAN", "IND"};

    Rng rng(2002);
    std::ofstream out(fx.corpus_path);

    struct Emitted {
        nlohmann::json record;
        std::string country;
        std::string lang;
        std::uint64_t words;
    };
    std::vector<Emitted> emitted;

    auto make_record = [&](std::size_t i, const std::string& text) {
        const bool lang_a = i % 2 == 0;
        const bool web = i % 3 != 0;
        Emitted e;
        e.lang = lang_a ? "lga" : "lgb";
        e.words = token_count(text);
        if (web) {
            const std::size_t c = i % 3 == 1 ? i / 3 % 3 : (i / 3 + 1) % 3;
            e.country = web_countries[c];
            e.record = {
                {"id", "w" + std::to_string(i)},
                {"source", "web"},
                {"url", "http://site" + std::to_string(i) + "." + web_tlds[c] + "/page"},
                {"html", "<p>" + text + "</p>"},
                {"ts", "2019-01-0" + std::to_string(1 + i % 9) + "T12:00:00Z"},
            };
        } else {
            const City& city = cities[i / 3 % 3];
            e.country = city.iso3;
            e.record = {
                {"id", "t" + std::to_string(i)},
                {"source", "twitter"},
                {"text", text},
                {"lat", city.lat + 0.01},
                {"lon", city.lon + 0.01},
                {"ts", "2019-02-0" + std::to_string(1 + i % 9) + "T12:00:00Z"},
            };
        }
        return e;
    };

    const std::size_t n_unique = with_malformed ? 810 : 820;
    const std::size_t n_malformed = with_malformed ? 10 : 0;

    for (std::size_t i = 0; i < n_unique; ++i) {
        const bool lang_a = i % 2 == 0;
        const std::string& alpha = lang_a ? alpha_a : alpha_b;
        std::string text = index_token(i, alpha) + " " + synth_words(rng, alpha, 55);
        auto e = make_record(i, text);
        out << e.record.dump() << '\n';
        fx.expected_counts[{e.country, e.lang}] += e.words;
        emitted.push_back(std::move(e));
    }

    // 100 planted duplicates of the first 100 unique docs: same text,
    // site, month, and country; only the id differs.
    for (std::size_t i = 0; i < 100; ++i) {
        nlohmann::json dup = emitted[i].record;
        dup["id"] = "dup" + std::to_string(i);
        out << dup.dump() << '\n';
    }

    // 50 geolocatable but sub-50-char records.
    for (std::size_t i = 0; i < 50; ++i) {
        nlohmann::json rec{
            {"id", "short" + std::to_string(i)},
            {"source", "web"},
            {"url", "http://tiny" + std::to_string(i) + ".nz/x"},
            {"html", "<p>" + synth_words(rng, alpha_a, 20).substr(0, 30) + "</p>"},
            {"ts", "2019-03-01T00:00:00Z"},
        };
        out << rec.dump() << '\n';
    }

    // 30 records with unmappable TLDs.
    for (std::size_t i = 0; i < 30; ++i) {
        nlohmann::json rec{
            {"id", "ungeo" + std::to_string(i)},
            {"source", "web"},
            {"url", "http://nowhere" + std::to_string(i) + (i % 2 ? ".com" : ".io")},
            {"html", "<p>" + synth_words(rng, alpha_a, 60) + "</p>"},
            {"ts", "2019-03-02T00:00:00Z"},
        };
        out << rec.dump() << '\n';
    }

    for (std::size_t i = 0; i < n_malformed; ++i) {
        out << (i % 2 ? "{not json at all" : R"({"id":"m","source":"web"})") << '\n';
    }

    fx.docs_total = n_unique + 100 + 50 + 30 + n_malformed;
    fx.expected_emitted = n_unique;
    fx.expected_dup = 100;
    fx.expected_short = 50;
    fx.expected_ungeo = 30;
    fx.expected_malformed = n_malformed;

    fx.config_text =
        "[input]\ncorpus = " + fx.corpus_path + "\n" +
        "[model]\npath = " + fx.model_path + "\n" +
        "[geo]\ncities = " + fx.cities_path + "\ntld = " + fx.tld_path + "\n" +
        "[pipeline]\nmin_chars = 50\nthreads = 2\n" +
        "[report]\nformats = csv,json,geojson,svg\nglobal_threshold = 0\n";
    return fx;
}

}  // namespace fixtures
