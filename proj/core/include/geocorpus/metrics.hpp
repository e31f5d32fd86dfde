#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "geocorpus/baselines.hpp"
#include "geocorpus/geo.hpp"
#include "geocorpus/lid.hpp"
#include "geocorpus/util.hpp"

namespace geocorpus::metrics {

struct LengthMismatch : Error {
    using Error::Error;
};
struct ConstantVector : Error {
    using Error::Error;
};
struct TooFewPoints : Error {
    using Error::Error;
};
struct InsufficientOverlap : Error {
    using Error::Error;
};
struct EmptyCorpus : Error {
    using Error::Error;
};
struct EmptyPopulation : Error {
    using Error::Error;
};

// Sample Pearson r, two-pass mean-centered. Requires length >= 3 and
// non-constant vectors.
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
    std::vector<std::string> variables;
    std::vector<std::vector<double>> r;  // symmetric, unit diagonal
    std::size_t n_countries = 0;
    std::vector<geo::CountryCode> dropped;  // missing from some input
};

// Country-aligned Pearson matrix over corpus word counts per source plus
// the three population weightings. Countries missing from any input are
// dropped and reported.
CorrelationMatrix correlation_matrix(
    const std::map<std::string, std::map<geo::CountryCode, std::uint64_t>>&
        corpus_words_by_source,
    const std::vector<baselines::PopulationRecord>& baseline_records);

struct RepresentationScore {
    geo::CountryCode country;
    double corpus_share = 0.0;
    double pop_share = 0.0;
    double score = 0.0;  // corpus_share - pop_share
};

// Normalizes both inputs to shares and subtracts. Every baseline country
// is scored; countries absent from the corpus get corpus share 0.
std::vector<RepresentationScore> representation_scores(
    const std::map<geo::CountryCode, std::uint64_t>& corpus_words,
    const std::map<geo::CountryCode, double>& populations);

struct InventoryResult {
    geo::CountryCode country;
    std::set<lid::LanguageLabel> truth;
    std::set<lid::LanguageLabel> predicted;
    double tpr = 0.0;
    std::set<lid::LanguageLabel> false_positives;
    std::size_t fp_count = 0;
    bool empty_truth = false;  // flagged, not divided by zero
};

struct InventoryEval {
    std::vector<InventoryResult> results;
    std::vector<geo::CountryCode> excluded;  // no census data
};

// predicted = languages with corpus share >= threshold; truth from the
// census at the same threshold. Countries without census rows are
// excluded and reported, not fatal.
InventoryEval inventory_eval(
    const std::map<geo::CountryCode, std::map<lid::LanguageLabel, double>>&
        corpus_shares,
    const std::vector<baselines::CensusRecord>& census, double threshold = 0.05);

}  // namespace geocorpus::metrics
