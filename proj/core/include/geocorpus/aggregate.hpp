#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geocorpus/geo.hpp"
#include "geocorpus/lid.hpp"
#include "geocorpus/util.hpp"

namespace geocorpus::agg {

struct NoDataForCountry : Error {
    using Error::Error;
};
struct EmptyCounts : Error {
    using Error::Error;
};

// Commutative monoid under merge: workers build private counts and
// merge, no shared state. Map keys give a stable (iso3, lang) order.
struct CountryLanguageCounts {
    std::map<std::pair<geo::CountryCode, lid::LanguageLabel>, std::uint64_t> counts;
    std::uint64_t total_words = 0;
    std::uint64_t n_docs = 0;

    void accumulate(std::uint64_t word_count, const geo::CountryCode& country,
                    const lid::LanguageLabel& lang);

    bool operator==(const CountryLanguageCounts&) const = default;
};

CountryLanguageCounts merge(const CountryLanguageCounts& a,
                            const CountryLanguageCounts& b);

// share(l) = words(country, l) / total words of that country; sums to 1.
std::map<lid::LanguageLabel, double> country_language_shares(
    const CountryLanguageCounts& counts, const geo::CountryCode& country);

// Per-country word totals (all languages summed).
std::map<geo::CountryCode, std::uint64_t> country_totals(
    const CountryLanguageCounts& counts);

struct GlobalLanguageRow {
    lid::LanguageLabel language;
    std::uint64_t words = 0;
    double share = 0.0;  // of the untrimmed global total
};

struct GlobalLanguageTable {
    std::vector<GlobalLanguageRow> rows;  // sorted by words descending
    std::uint64_t min_words_threshold = 100000;
    std::uint64_t total_words = 0;

    // Cumulative share of the top k surviving rows.
    double cumulative_share(std::size_t k) const;
};

constexpr std::uint64_t kDefaultMinWords = 100000;

// Ranks languages by global word count; shares are computed against the
// untrimmed total before rows below the threshold are dropped.
GlobalLanguageTable global_table(const CountryLanguageCounts& counts,
                                 std::uint64_t threshold = kDefaultMinWords);

// Alternative relative mode: keep a language when it holds at least
// `share_threshold` of some country's words.
GlobalLanguageTable global_table_relative(const CountryLanguageCounts& counts,
                                          double share_threshold);

// CSV `iso3,lang,words` in stable (iso3, lang) order, plus a JSON
// sidecar `<path>.meta.json` with totals.
void save_counts(const CountryLanguageCounts& counts, const std::string& path);
CountryLanguageCounts load_counts(const std::string& path);

}  // namespace geocorpus::agg
