#include "geocorpus/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace geocorpus::metrics {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw LengthMismatch("vector lengths differ: " + std::to_string(x.size()) +
                             " vs " + std::to_string(y.size()));
    }
    const std::size_t n = x.size();
    if (n < 3) throw TooFewPoints("need at least 3 points, got " + std::to_string(n));

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw ConstantVector("pearson undefined for a constant vector");
    }
    return sxy / std::sqrt(sxx * syy);
}

CorrelationMatrix correlation_matrix(
    const std::map<std::string, std::map<geo::CountryCode, std::uint64_t>>&
        corpus_words_by_source,
    const std::vector<baselines::PopulationRecord>& baseline_records) {
    using baselines::WeightingMode;

    auto pop_raw = baselines::weight_population(baseline_records, WeightingMode::raw);
    auto pop_net = baselines::weight_population(baseline_records, WeightingMode::internet);
    auto pop_gdp = baselines::weight_population(baseline_records, WeightingMode::gdp);

    // Countries present in every input.
    std::set<geo::CountryCode> all, common;
    for (const auto& [c, v] : pop_raw) all.insert(c), common.insert(c);
    for (const auto& [source, words] : corpus_words_by_source) {
        for (const auto& [c, w] : words) all.insert(c);
        std::erase_if(common, [&](const geo::CountryCode& c) {
            return !words.contains(c);
        });
    }

    CorrelationMatrix m;
    for (const auto& c : all) {
        if (!common.contains(c)) m.dropped.push_back(c);
    }
    if (common.size() < 3) {
        throw InsufficientOverlap("only " + std::to_string(common.size()) +
                                  " countries present in all inputs");
    }
    m.n_countries = common.size();

    // Conventional column order: web, then twitter, then anything else.
    std::vector<std::string> sources;
    for (const auto& [source, words] : corpus_words_by_source) sources.push_back(source);
    std::sort(sources.begin(), sources.end(),
              [](const std::string& a, const std::string& b) {
                  auto rank = [](const std::string& s) {
                      if (s == "web") return 0;
                      if (s == "twitter") return 1;
                      return 2;
                  };
                  if (rank(a) != rank(b)) return rank(a) < rank(b);
                  return a < b;
              });

    std::vector<std::vector<double>> columns;
    for (const auto& source : sources) {
        const auto& words = corpus_words_by_source.at(source);
        m.variables.push_back(source + "_words");
        std::vector<double> col;
        for (const auto& c : common) col.push_back(static_cast<double>(words.at(c)));
        columns.push_back(std::move(col));
    }
    const std::vector<std::pair<std::string, const std::map<geo::CountryCode, double>*>>
        pop_columns = {{"pop_raw", &pop_raw},
                       {"pop_internet", &pop_net},
                       {"pop_gdp", &pop_gdp}};
    for (const auto& [name, vec] : pop_columns) {
        m.variables.push_back(name);
        std::vector<double> col;
        for (const auto& c : common) col.push_back(vec->at(c));
        columns.push_back(std::move(col));
    }

    const std::size_t k = columns.size();
    m.r.assign(k, std::vector<double>(k, 1.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double r = pearson(columns[i], columns[j]);
            m.r[i][j] = r;
            m.r[j][i] = r;
        }
    }
    return m;
}

std::vector<RepresentationScore> representation_scores(
    const std::map<geo::CountryCode, std::uint64_t>& corpus_words,
    const std::map<geo::CountryCode, double>& populations) {
    double corpus_total = 0.0;
    for (const auto& [c, w] : corpus_words) corpus_total += static_cast<double>(w);
    if (corpus_total <= 0.0) throw EmptyCorpus("corpus has no words");
    double pop_total = 0.0;
    for (const auto& [c, p] : populations) pop_total += p;
    if (pop_total <= 0.0) throw EmptyPopulation("population total is zero");

    // Every baseline country is scored; countries absent from the corpus
    // score as maximally under-represented. Corpus countries missing from
    // the baselines are scored with pop share 0.
    std::set<geo::CountryCode> countries;
    for (const auto& [c, p] : populations) countries.insert(c);
    for (const auto& [c, w] : corpus_words) countries.insert(c);

    std::vector<RepresentationScore> scores;
    scores.reserve(countries.size());
    for (const auto& c : countries) {
        RepresentationScore s;
        s.country = c;
        auto wit = corpus_words.find(c);
        s.corpus_share = wit == corpus_words.end()
                             ? 0.0
                             : static_cast<double>(wit->second) / corpus_total;
        auto pit = populations.find(c);
        s.pop_share = pit == populations.end() ? 0.0 : pit->second / pop_total;
        s.score = s.corpus_share - s.pop_share;
        scores.push_back(std::move(s));
    }
    return scores;
}

InventoryEval inventory_eval(
    const std::map<geo::CountryCode, std::map<lid::LanguageLabel, double>>&
        corpus_shares,
    const std::vector<baselines::CensusRecord>& census, double threshold) {
    InventoryEval eval;
    for (const auto& [country, shares] : corpus_shares) {
        std::set<lid::LanguageLabel> truth;
        try {
            truth = baselines::census_language_set(census, country, threshold);
        } catch (const baselines::NoCensusData&) {
            eval.excluded.push_back(country);
            continue;
        }
        InventoryResult res;
        res.country = country;
        res.truth = truth;
        for (const auto& [lang, share] : shares) {
            if (share >= threshold) res.predicted.insert(lang);
        }
        std::set<lid::LanguageLabel> hits;
        std::set_intersection(res.truth.begin(), res.truth.end(),
                              res.predicted.begin(), res.predicted.end(),
                              std::inserter(hits, hits.begin()));
        std::set_difference(res.predicted.begin(), res.predicted.end(),
                            res.truth.begin(), res.truth.end(),
                            std::inserter(res.false_positives,
                                          res.false_positives.begin()));
        res.fp_count = res.false_positives.size();
        if (res.truth.empty()) {
            res.empty_truth = true;
            res.tpr = 0.0;
        } else {
            res.tpr = static_cast<double>(hits.size()) /
                      static_cast<double>(res.truth.size());
        }
        eval.results.push_back(std::move(res));
    }
    return eval;
}

}  // namespace geocorpus::metrics
