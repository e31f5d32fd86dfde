#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geocorpus/util.hpp"

namespace geocorpus::geo {

struct BadUrl : Error {
    using Error::Error;
};
struct OutOfRange : Error {
    using Error::Error;
};

// ISO 3166-1 alpha-3, uppercase.
using CountryCode = std::string;

bool is_valid_country(std::string_view iso3) noexcept;

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

struct CityRecord {
    std::string name;
    CountryCode country;
    double lat = 0.0;
    double lon = 0.0;
};

constexpr double kEarthRadiusKm = 6371.0088;
constexpr double kCityRadiusKm = 50.0;

// Great-circle distance. Throws OutOfRange for coordinates outside
// [-90,90] x [-180,180].
double haversine_km(const GeoPoint& a, const GeoPoint& b);

struct TldTable {
    std::map<std::string, CountryCode> mapped;  // tld (no dot) -> iso3
    std::set<std::string> excluded;

    // Repurposed ccTLDs the paper drops, always excluded by default.
    static TldTable with_default_exclusions();
};

// Extracts the hostname from a URL; throws BadUrl if none.
std::string hostname_of(std::string_view url);

// Country for the final hostname label, or nullopt for excluded,
// generic, or unknown TLDs. Exclusion wins over any mapping.
std::optional<CountryCode> tld_to_country(std::string_view url, const TldTable& table);

// Nearest-city lookup over a 1-degree grid. Equivalent to an exhaustive
// linear scan: nearest city when within 50 km, ties broken by
// lexicographic name; nullopt otherwise. Immutable after construction.
class CityIndex {
public:
    explicit CityIndex(std::vector<CityRecord> cities);

    std::optional<CityRecord> assign_city(double lat, double lon) const;

    std::size_t size() const noexcept { return cities_.size(); }
    const std::vector<CityRecord>& cities() const noexcept { return cities_; }

private:
    std::vector<CityRecord> cities_;
    // grid cell (lat_idx * 360 + lon_idx) -> indices into cities_
    std::map<int, std::vector<std::size_t>> grid_;
};

// CSV `name,iso3,lat,lon` with header.
std::vector<CityRecord> load_cities(const std::string& path);

// CSV `tld,iso3` with header, plus optional single-column `excluded` CSV.
TldTable load_tld_table(const std::string& mapped_path,
                        const std::string& excluded_path = "");

}  // namespace geocorpus::geo
