#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "geocorpus/geo.hpp"
#include "geocorpus/lid.hpp"
#include "geocorpus/util.hpp"

namespace geocorpus::baselines {

struct MissingColumn : Error {
    using Error::Error;
};
struct BadValue : Error {
    BadValue(std::size_t row, std::string msg) : Error(std::move(msg)), row(row) {}
    std::size_t row;
};
struct DuplicateCountry : Error {
    using Error::Error;
};
struct EmptyBaselines : Error {
    using Error::Error;
};
struct NoCensusData : Error {
    using Error::Error;
};

struct PopulationRecord {
    geo::CountryCode country;
    std::uint64_t population = 0;       // > 0
    double gdp_per_capita = 0.0;        // USD, > 0
    double internet_fraction = 0.0;     // [0, 1]
};

struct CensusRecord {
    geo::CountryCode country;
    lid::LanguageLabel language;
    double population_share = 0.0;  // [0, 1]; per-country shares need not sum to 1
};

enum class WeightingMode { raw, gdp, internet };

const char* weighting_mode_name(WeightingMode mode) noexcept;
WeightingMode parse_weighting_mode(const std::string& name);

// CSV `iso3,population,gdp_per_capita,internet_fraction` with header.
std::vector<PopulationRecord> load_baselines(const std::string& path);

// CSV `iso3,lang,share` with header.
std::vector<CensusRecord> load_census(const std::string& path);

// Unnormalized weighted population vector. raw -> population;
// internet -> population * internet_fraction; gdp -> population *
// gdp_per_capita (per-capita GDP times headcount, i.e. total GDP).
std::map<geo::CountryCode, double> weight_population(
    const std::vector<PopulationRecord>& records, WeightingMode mode);

// Languages with census share >= threshold. Throws NoCensusData when the
// country has no census rows at all.
std::set<lid::LanguageLabel> census_language_set(
    const std::vector<CensusRecord>& census, const geo::CountryCode& country,
    double threshold = 0.05);

}  // namespace geocorpus::baselines
