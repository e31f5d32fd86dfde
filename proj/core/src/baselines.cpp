#include "geocorpus/baselines.hpp"

#include <set>

#include "geocorpus/csv.hpp"

namespace geocorpus::baselines {

const char* weighting_mode_name(WeightingMode mode) noexcept {
    switch (mode) {
        case WeightingMode::raw: return "raw";
        case WeightingMode::gdp: return "gdp";
        case WeightingMode::internet: return "internet";
    }
    return "raw";
}

WeightingMode parse_weighting_mode(const std::string& name) {
    if (name == "raw") return WeightingMode::raw;
    if (name == "gdp") return WeightingMode::gdp;
    if (name == "internet") return WeightingMode::internet;
    throw Error("unknown weighting mode: " + name);
}

std::vector<PopulationRecord> load_baselines(const std::string& path) {
    auto table = csv::load_file(path);
    std::size_t c_iso3, c_pop, c_gdp, c_net;
    try {
        c_iso3 = table.column("iso3");
        c_pop = table.column("population");
        c_gdp = table.column("gdp_per_capita");
        c_net = table.column("internet_fraction");
    } catch (const csv::ParseError& e) {
        throw MissingColumn(e.what());
    }
    std::vector<PopulationRecord> records;
    std::set<geo::CountryCode> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        PopulationRecord rec;
        rec.country = row.at(c_iso3);
        if (!geo::is_valid_country(rec.country)) {
            throw BadValue(r, "row " + std::to_string(r + 1) +
                                  ": bad country code '" + rec.country + "'");
        }
        if (!seen.insert(rec.country).second) {
            throw DuplicateCountry("duplicate country: " + rec.country);
        }
        try {
            rec.population = std::stoull(row.at(c_pop));
            rec.gdp_per_capita = std::stod(row.at(c_gdp));
            rec.internet_fraction = std::stod(row.at(c_net));
        } catch (const std::exception&) {
            throw BadValue(r, "row " + std::to_string(r + 1) + ": unparseable number");
        }
        if (rec.population == 0) {
            throw BadValue(r, "row " + std::to_string(r + 1) + ": population must be positive");
        }
        if (rec.gdp_per_capita <= 0.0) {
            throw BadValue(r, "row " + std::to_string(r + 1) + ": gdp_per_capita must be positive");
        }
        if (rec.internet_fraction < 0.0 || rec.internet_fraction > 1.0) {
            throw BadValue(r, "row " + std::to_string(r + 1) +
                                  ": internet_fraction outside [0,1]");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<CensusRecord> load_census(const std::string& path) {
    auto table = csv::load_file(path);
    std::size_t c_iso3, c_lang, c_share;
    try {
        c_iso3 = table.column("iso3");
        c_lang = table.column("lang");
        c_share = table.column("share");
    } catch (const csv::ParseError& e) {
        throw MissingColumn(e.what());
    }
    std::vector<CensusRecord> records;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        CensusRecord rec;
        rec.country = row.at(c_iso3);
        rec.language = {row.at(c_lang)};
        if (!geo::is_valid_country(rec.country)) {
            throw BadValue(r, "row " + std::to_string(r + 1) + ": bad country code");
        }
        if (!lid::is_valid_label(rec.language.code)) {
            throw BadValue(r, "row " + std::to_string(r + 1) + ": bad language code");
        }
        try {
            rec.population_share = std::stod(row.at(c_share));
        } catch (const std::exception&) {
            throw BadValue(r, "row " + std::to_string(r + 1) + ": unparseable share");
        }
        if (rec.population_share < 0.0 || rec.population_share > 1.0) {
            throw BadValue(r, "row " + std::to_string(r + 1) + ": share outside [0,1]");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::map<geo::CountryCode, double> weight_population(
    const std::vector<PopulationRecord>& records, WeightingMode mode) {
    if (records.empty()) throw EmptyBaselines("no baseline records");
    std::map<geo::CountryCode, double> out;
    for (const auto& rec : records) {
        const double pop = static_cast<double>(rec.population);
        switch (mode) {
            case WeightingMode::raw:
                out[rec.country] = pop;
                break;
            case WeightingMode::internet:
                out[rec.country] = pop * rec.internet_fraction;
                break;
            case WeightingMode::gdp:
                out[rec.country] = pop * rec.gdp_per_capita;
                break;
        }
    }
    return out;
}

std::set<lid::LanguageLabel> census_language_set(
    const std::vector<CensusRecord>& census, const geo::CountryCode& country,
    double threshold) {
    std::set<lid::LanguageLabel> langs;
    bool found = false;
    for (const auto& rec : census) {
        if (rec.country != country) continue;
        found = true;
        if (rec.population_share >= threshold) langs.insert(rec.language);
    }
    if (!found) throw NoCensusData("no census data for " + country);
    return langs;
}

}  // namespace geocorpus::baselines
