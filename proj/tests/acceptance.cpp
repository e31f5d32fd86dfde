// Acceptance suite: one pass/fail line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "geocorpus/aggregate.hpp"
#include "geocorpus/baselines.hpp"
#include "geocorpus/geo.hpp"
#include "geocorpus/lid.hpp"
#include "geocorpus/metrics.hpp"
#include "geocorpus/pipeline.hpp"
#include "geocorpus/util.hpp"

using namespace geocorpus;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void run_criterion(int number, const std::string& name,
                   const std::function<void()>& body) {
    try {
        body();
        std::cout << "PASS criterion " << number << ": " << name << "\n";
    } catch (const std::exception& e) {
        ++failures;
        std::cout << "FAIL criterion " << number << ": " << name << " — "
                  << e.what() << "\n";
    }
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

std::string synth_sample(Rng& rng, const std::string& alphabet) {
    // Exactly 50 characters: words of 4, space separated, trimmed.
    std::string text;
    while (text.size() < 50) {
        if (!text.empty()) text.push_back(' ');
        for (int i = 0; i < 4; ++i) {
            text.push_back(
                alphabet[static_cast<std::size_t>(rng.next_below(alphabet.size()))]);
        }
    }
    text.resize(50);
    return text;
}

double pearson_naive(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
    }
    return (n * sxy - sx * sy) /
           std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Five synthetic languages over disjoint code-point alphabets.
const std::vector<std::pair<std::string, std::string>> kFiveLangs = {
    {"lga", "abcdefghij"}, {"lgb", "klmnopqrst"}, {"lgc", "uvwxyzABCD"},
    {"lgd", "EFGHIJKLMN"}, {"lge", "OPQRSTUVWX"},
};

void criterion_lid_benchmark() {
    const auto start = std::chrono::steady_clock::now();

    lid::ModelConfig cfg;  // default config, fixed seed
    cfg.seed = 42;
    Rng rng(9001);
    std::vector<std::pair<std::string, lid::LanguageLabel>> training, test;
    for (const auto& [code, alphabet] : kFiveLangs) {
        for (int i = 0; i < 2000; ++i) {
            training.emplace_back(synth_sample(rng, alphabet),
                                  lid::LanguageLabel{code});
        }
        for (int i = 0; i < 200; ++i) {
            test.emplace_back(synth_sample(rng, alphabet), lid::LanguageLabel{code});
        }
    }
    auto model = lid::train(training, cfg);
    auto report = lid::evaluate(model, test);

    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    require(report.macro_f1 >= 0.99,
            "macro F1 " + std::to_string(report.macro_f1) + " < 0.99");
    require(secs < 120.0, "train+eval took " + std::to_string(secs) + " s >= 120 s");
}

void criterion_gradient_check() {
    lid::ModelConfig cfg;
    cfg.feature_dim = 1u << 10;
    cfg.hidden_dim = 8;
    cfg.seed = 5;
    cfg.epochs = 1;
    Rng rng(31);
    std::vector<std::pair<std::string, lid::LanguageLabel>> warmup;
    for (int i = 0; i < 6; ++i) {
        const auto& [code, alphabet] = kFiveLangs[i % 2];
        warmup.emplace_back(synth_sample(rng, alphabet), lid::LanguageLabel{code});
    }
    auto model = lid::train(warmup, cfg);
    lid::GradientProbe probe(model);

    std::vector<lid::FeatureVector> batch;
    std::vector<std::size_t> targets;
    for (int i = 0; i < 5; ++i) {
        const auto& [code, alphabet] = kFiveLangs[i % 2];
        batch.push_back(lid::featurize(synth_sample(rng, alphabet), cfg));
        targets.push_back(static_cast<std::size_t>(i % 2));
    }
    auto grads = probe.loss_and_gradients(batch, targets);

    const double eps = 1e-4;
    auto check_block = [&](std::vector<float>& params,
                           const std::vector<double>& analytic, std::size_t stride,
                           const char* block) {
        for (std::size_t i = 0; i < params.size(); i += stride) {
            const float saved = params[i];
            params[i] = static_cast<float>(saved + eps);
            const double up = probe.loss_only(batch, targets);
            params[i] = static_cast<float>(saved - eps);
            const double down = probe.loss_only(batch, targets);
            params[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            if (std::abs(numeric) < 1e-10 && std::abs(analytic[i]) < 1e-10) continue;
            const double denom =
                std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
            const double rel = std::abs(numeric - analytic[i]) / denom;
            require(rel < 1e-3, std::string(block) + "[" + std::to_string(i) +
                                    "] relative error " + std::to_string(rel));
        }
    };
    check_block(probe.w2(), grads.w2, 1, "w2");
    check_block(probe.b2(), grads.b2, 1, "b2");
    check_block(probe.b1(), grads.b1, 1, "b1");
    check_block(probe.w1(), grads.w1, 13, "w1");
}

void criterion_pearson_oracle() {
    Rng rng(606);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 3 + rng.next_below(198);
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(rng.next_double(-100, 100));
            y.push_back(rng.next_double(-100, 100));
        }
        const double r = metrics::pearson(x, y);
        require(std::abs(r - pearson_naive(x, y)) < 1e-12,
                "pearson mismatch vs naive formula at trial " + std::to_string(trial));

        // Affine invariance.
        const double a = rng.next_double(0.1, 10.0);
        const double b = rng.next_double(-5, 5);
        std::vector<double> ax;
        for (double v : x) ax.push_back(a * v + b);
        require(std::abs(metrics::pearson(ax, y) - r) < 1e-9,
                "affine invariance violated at trial " + std::to_string(trial));
    }
}

void criterion_representation() {
    Rng rng(505);
    for (int trial = 0; trial < 50; ++trial) {
        std::map<geo::CountryCode, std::uint64_t> words;
        std::map<geo::CountryCode, double> pops;
        for (int i = 0; i < 20; ++i) {
            std::string iso3 = {static_cast<char>('A' + i), 'X', 'X'};
            words[iso3] = 1 + rng.next_below(100000);
            pops[iso3] = 1.0 + rng.next_double() * 1e6;
        }
        auto scores = metrics::representation_scores(words, pops);
        require(scores.size() == 20, "expected 20 scores");
        double total_words = 0, total_pop = 0, sum = 0;
        for (const auto& [c, w] : words) total_words += static_cast<double>(w);
        for (const auto& [c, p] : pops) total_pop += p;
        for (const auto& s : scores) {
            const double cs = static_cast<double>(words.at(s.country)) / total_words;
            const double ps = pops.at(s.country) / total_pop;
            require(s.corpus_share == cs && s.pop_share == ps && s.score == cs - ps,
                    "score does not match recomputation for " + s.country);
            sum += s.score;
        }
        require(std::abs(sum) < 1e-9, "scores do not sum to zero");
    }

    // Documented India value: shares 0.0047 and 0.1777 differ by -0.1730.
    std::map<geo::CountryCode, std::uint64_t> words = {{"IND", 47}, {"ZZZ", 9953}};
    std::map<geo::CountryCode, double> pops = {{"IND", 1777.0}, {"ZZZ", 8223.0}};
    auto scores = metrics::representation_scores(words, pops);
    const auto& ind = scores[0].country == "IND" ? scores[0] : scores[1];
    require(std::abs(ind.score + 0.1730) < 1e-12,
            "India representation score is not -0.1730");
}

void criterion_inventory() {
    // Self-consistency: census fed back as corpus shares.
    std::vector<baselines::CensusRecord> census = {
        {"AAA", {"eng"}, 0.70}, {"AAA", {"fra"}, 0.25}, {"AAA", {"ita"}, 0.05},
        {"BBB", {"deu"}, 0.95}, {"BBB", {"fra"}, 0.04},
        {"CCC", {"spa"}, 0.50}, {"CCC", {"que"}, 0.50},
        {"DDD", {"nld"}, 1.00},
        {"EEE", {"por"}, 0.60}, {"EEE", {"spa"}, 0.39},
    };
    std::map<geo::CountryCode, std::map<lid::LanguageLabel, double>> self;
    for (const auto& rec : census) self[rec.country][rec.language] = rec.population_share;
    auto eval = metrics::inventory_eval(self, census);
    require(eval.results.size() == 5, "expected 5 countries");
    for (const auto& r : eval.results) {
        require(r.tpr == 1.0 && r.fp_count == 0,
                "self-consistency failed for " + r.country);
    }

    // Hand-built 5-country fixture.
    std::vector<baselines::CensusRecord> hand_census = {
        {"AAA", {"aaa"}, 0.9},
        {"BBB", {"bbb"}, 0.6}, {"BBB", {"ccc"}, 0.4},
        {"CCC", {"ccc"}, 0.5}, {"CCC", {"ddd"}, 0.5},
        {"DDD", {"eee"}, 1.0},
        {"EEE", {"fff"}, 0.5}, {"EEE", {"ggg"}, 0.05},
    };
    std::map<geo::CountryCode, std::map<lid::LanguageLabel, double>> shares = {
        {"AAA", {{{"aaa"}, 0.8}, {{"zzz"}, 0.2}}},
        {"BBB", {{{"bbb"}, 1.0}}},
        {"CCC", {{{"ccc"}, 0.5}, {{"ddd"}, 0.5}}},
        {"DDD", {{{"yyy"}, 0.9}, {{"eee"}, 0.04}}},
        {"EEE", {{{"fff"}, 0.9}, {{"ggg"}, 0.1}}},
    };
    auto hand = metrics::inventory_eval(shares, hand_census);
    require(hand.results.size() == 5, "expected 5 hand-fixture results");
    const double expected_tpr[] = {1.0, 0.5, 1.0, 0.0, 1.0};
    const std::size_t expected_fp[] = {1, 0, 0, 1, 0};
    for (std::size_t i = 0; i < 5; ++i) {
        require(hand.results[i].tpr == expected_tpr[i],
                "hand fixture tpr mismatch for " + hand.results[i].country);
        require(hand.results[i].fp_count == expected_fp[i],
                "hand fixture fp_count mismatch for " + hand.results[i].country);
    }
    require(hand.results[0].false_positives == std::set<lid::LanguageLabel>{{"zzz"}},
            "hand fixture false positive identity mismatch");

    // Threshold monotonicity of fp_count + |truth ∩ predicted|.
    for (const auto& [country, share_map] : shares) {
        std::size_t prev = SIZE_MAX;
        for (double t : {0.01, 0.05, 0.10, 0.25}) {
            auto e = metrics::inventory_eval({{country, share_map}}, hand_census, t);
            require(e.results.size() == 1, "missing country at threshold sweep");
            const auto& r = e.results[0];
            std::size_t hits = 0;
            for (const auto& l : r.predicted) {
                if (r.truth.contains(l)) ++hits;
            }
            require(r.fp_count + hits <= prev,
                    "threshold monotonicity violated for " + country);
            prev = r.fp_count + hits;
        }
    }
}

void criterion_end_to_end() {
    auto dir = (fs::temp_directory_path() / "gc_acceptance_e2e").string();
    fs::remove_all(dir);
    auto fx = fixtures::make_pipeline_fixture(dir);

    auto cfg = pipeline::Config::parse_string(fx.config_text);
    cfg.set("report.output_dir", dir + "/out1");
    auto result = pipeline::run_pipeline(cfg);
    require(result.exit_code == 0, "pipeline failed: " + result.error);

    const auto& m = result.manifest;
    require(m.docs_dropped_dedup == 100, "dedup drops != 100");
    require(m.docs_dropped_short == 50, "short drops != 50");
    require(m.docs_dropped_ungeolocated == 30, "ungeolocated drops != 30");
    require(m.balanced(), "manifest accounting does not balance");

    // Aggregated counts equal the fixture's independent recount.
    auto counts = agg::load_counts(dir + "/out1/counts.csv");
    require(counts.counts.size() == fx.expected_counts.size(),
            "count matrix has unexpected keys");
    for (const auto& [key, words] : fx.expected_counts) {
        require(counts.counts.at({key.first, {key.second}}) == words,
                "count mismatch for " + key.first + "/" + key.second);
    }

    // Rerun: byte-identical apart from the manifest timestamp (and the
    // differing output_dir echoed into the manifest config).
    auto cfg2 = pipeline::Config::parse_string(fx.config_text);
    cfg2.set("report.output_dir", dir + "/out2");
    require(pipeline::run_pipeline(cfg2).exit_code == 0, "rerun failed");
    for (const auto& entry : fs::directory_iterator(dir + "/out1")) {
        const auto name = entry.path().filename().string();
        auto a = slurp(entry.path().string());
        auto b = slurp(dir + "/out2/" + name);
        if (name == "manifest.json") {
            auto ja = nlohmann::json::parse(a);
            auto jb = nlohmann::json::parse(b);
            ja.erase("timestamp");
            jb.erase("timestamp");
            ja["config"].erase("report.output_dir");
            jb["config"].erase("report.output_dir");
            require(ja == jb, "manifests differ beyond the timestamp");
        } else {
            require(a == b, "rerun output differs: " + name);
        }
    }
    fs::remove_all(dir);
}

void criterion_geolocation() {
    Rng rng(777);
    std::vector<geo::CityRecord> cities;
    for (int i = 0; i < 100; ++i) {
        cities.push_back({"city" + std::to_string(i), "XXX",
                          rng.next_double(-60, 70), rng.next_double(-180, 180)});
    }
    geo::CityIndex index(cities);

    auto linear_scan = [&](double lat, double lon) -> std::optional<geo::CityRecord> {
        const geo::CityRecord* best = nullptr;
        double best_dist = 0.0;
        for (const auto& c : cities) {
            const double d = geo::haversine_km({lat, lon}, {c.lat, c.lon});
            if (d > geo::kCityRadiusKm) continue;
            if (!best || d < best_dist || (d == best_dist && c.name < best->name)) {
                best = &c;
                best_dist = d;
            }
        }
        if (!best) return std::nullopt;
        return *best;
    };

    for (int q = 0; q < 1000; ++q) {
        double lat, lon;
        if (q % 3 == 0) {
            const auto& c = cities[rng.next_below(cities.size())];
            lat = std::clamp(c.lat + rng.next_double(-0.6, 0.6), -90.0, 90.0);
            lon = std::clamp(c.lon + rng.next_double(-0.6, 0.6), -180.0, 180.0);
        } else {
            lat = rng.next_double(-90, 90);
            lon = rng.next_double(-180, 180);
        }
        auto got = index.assign_city(lat, lon);
        auto want = linear_scan(lat, lon);
        require(got.has_value() == want.has_value(),
                "index/linear-scan disagree on hit at query " + std::to_string(q));
        if (got) {
            require(got->name == want->name,
                    "index/linear-scan disagree on city at query " + std::to_string(q));
        }
    }

    // Reference distances, and symmetry.
    const geo::GeoPoint equator_a{0.0, 0.0}, equator_b{0.0, 180.0};
    require(std::abs(geo::haversine_km(equator_a, equator_b) - 20015.1) < 0.5,
            "antipodal equator distance out of tolerance");
    const geo::GeoPoint paris{48.8566, 2.3522}, london{51.5074, -0.1278};
    const double pl = geo::haversine_km(paris, london);
    require(std::abs(pl - 343.0) < 2.0, "Paris-London distance out of tolerance");
    require(pl == geo::haversine_km(london, paris), "haversine not symmetric");
}

void criterion_monoid() {
    Rng rng(11);
    const char* countries[] = {"NZL", "CAN", "IND", "EST", "AUS", "DEU"};
    const char* langs[] = {"eng", "fra", "hin", "est", "deu", "mri"};
    auto random_counts = [&](int n) {
        agg::CountryLanguageCounts c;
        for (int i = 0; i < n; ++i) {
            c.accumulate(rng.next_below(1000), countries[rng.next_below(6)],
                         {langs[rng.next_below(6)]});
        }
        return c;
    };
    agg::CountryLanguageCounts empty;
    for (int trial = 0; trial < 100; ++trial) {
        auto a = random_counts(10);
        auto b = random_counts(10);
        auto c = random_counts(10);
        require(agg::merge(a, empty) == a, "identity law violated");
        require(agg::merge(a, b) == agg::merge(b, a), "commutativity violated");
        require(agg::merge(agg::merge(a, b), c) == agg::merge(a, agg::merge(b, c)),
                "associativity violated");
    }

    // Parallel partition + merge equals sequential aggregation.
    std::vector<std::tuple<std::uint64_t, std::string, std::string>> docs;
    for (int i = 0; i < 1000; ++i) {
        docs.emplace_back(rng.next_below(100), countries[rng.next_below(6)],
                          langs[rng.next_below(6)]);
    }
    agg::CountryLanguageCounts sequential;
    for (const auto& [w, c, l] : docs) sequential.accumulate(w, c, {l});
    agg::CountryLanguageCounts parts[8];
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& [w, c, l] = docs[i];
        parts[i % 8].accumulate(w, c, {l});
    }
    agg::CountryLanguageCounts merged;
    for (const auto& p : parts) merged = agg::merge(merged, p);
    require(merged == sequential, "partition + merge differs from sequential");
}

void criterion_throughput() {
    lid::ModelConfig cfg;  // default config
    cfg.epochs = 2;
    Rng rng(404);
    std::vector<std::pair<std::string, lid::LanguageLabel>> training;
    for (int i = 0; i < 500; ++i) {
        training.emplace_back(synth_sample(rng, kFiveLangs[0].second),
                              lid::LanguageLabel{"lga"});
        training.emplace_back(synth_sample(rng, kFiveLangs[1].second),
                              lid::LanguageLabel{"lgb"});
    }
    auto model = lid::train(training, cfg);

    std::vector<std::string> samples;
    for (int i = 0; i < 4000; ++i) {
        samples.push_back(synth_sample(rng, kFiveLangs[i % 2].second));
    }
    const auto start = std::chrono::steady_clock::now();
    std::size_t checksum = 0;
    for (const auto& s : samples) {
        checksum += model.predict(s).first.code.size();
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    require(checksum > 0, "unreachable");
    const double rate = static_cast<double>(samples.size()) / secs;
    require(rate >= 2000.0,
            "throughput " + std::to_string(rate) + " samples/s < 2000");
}

}  // namespace

int main() {
    run_criterion(1, "LID synthetic benchmark (5 languages, macro-F1 >= 0.99, < 120 s)",
                  criterion_lid_benchmark);
    run_criterion(2, "LID gradient check vs central finite differences",
                  criterion_gradient_check);
    run_criterion(3, "Pearson oracle (1000 random pairs, affine invariance)",
                  criterion_pearson_oracle);
    run_criterion(4, "Representation scores (oracle match, zero sum, -0.1730 fixture)",
                  criterion_representation);
    run_criterion(5, "Inventory self-consistency, hand fixture, threshold monotonicity",
                  criterion_inventory);
    run_criterion(6, "End-to-end 1000-document fixture with exact manifest accounting",
                  criterion_end_to_end);
    run_criterion(7, "Geolocation linear-scan oracle and haversine references",
                  criterion_geolocation);
    run_criterion(8, "Aggregation monoid laws and partition/merge equality",
                  criterion_monoid);
    run_criterion(9, "Throughput floor: >= 2000 fifty-char predictions/s",
                  criterion_throughput);

    std::cout << (failures == 0 ? "ALL CRITERIA PASSED" :
                                  std::to_string(failures) + " CRITERIA FAILED")
              << "\n";
    return failures;
}
