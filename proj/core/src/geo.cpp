#include "geocorpus/geo.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "geocorpus/csv.hpp"

namespace geocorpus::geo {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

void check_point(const GeoPoint& p) {
    if (!(p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0)) {
        throw OutOfRange("coordinates out of range: lat=" + std::to_string(p.lat) +
                         " lon=" + std::to_string(p.lon));
    }
}

int cell_of(double lat, double lon) {
    int lat_idx = static_cast<int>(std::floor(lat)) + 90;   // 0..180
    int lon_idx = static_cast<int>(std::floor(lon)) + 180;  // 0..360
    lat_idx = std::clamp(lat_idx, 0, 180);
    lon_idx = std::clamp(lon_idx, 0, 359);
    return lat_idx * 360 + lon_idx;
}

}  // namespace

bool is_valid_country(std::string_view iso3) noexcept {
    if (iso3.size() != 3) return false;
    for (char c : iso3) {
        if (c < 'A' || c > 'Z') return false;
    }
    return true;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    check_point(a);
    check_point(b);
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = (b.lat - a.lat) * kDegToRad;
    const double dlam = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlam / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

TldTable TldTable::with_default_exclusions() {
    TldTable t;
    t.excluded = {"ai", "fm", "io", "ly", "ag", "tv"};
    return t;
}

std::string hostname_of(std::string_view url) {
    std::string_view rest = url;
    if (auto pos = rest.find("://"); pos != std::string_view::npos) {
        rest = rest.substr(pos + 3);
    }
    if (auto at = rest.find('@'); at != std::string_view::npos &&
                                  at < rest.find_first_of("/?#")) {
        rest = rest.substr(at + 1);
    }
    if (auto end = rest.find_first_of("/?#"); end != std::string_view::npos) {
        rest = rest.substr(0, end);
    }
    if (auto colon = rest.find(':'); colon != std::string_view::npos) {
        rest = rest.substr(0, colon);
    }
    if (rest.empty()) throw BadUrl("no hostname in URL: " + std::string(url));
    std::string host;
    host.reserve(rest.size());
    for (char c : rest) {
        host.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return host;
}

std::optional<CountryCode> tld_to_country(std::string_view url, const TldTable& table) {
    const std::string host = hostname_of(url);
    const auto dot = host.rfind('.');
    const std::string tld = dot == std::string::npos ? host : host.substr(dot + 1);
    if (table.excluded.contains(tld)) return std::nullopt;
    auto it = table.mapped.find(tld);
    if (it == table.mapped.end()) return std::nullopt;
    return it->second;
}

CityIndex::CityIndex(std::vector<CityRecord> cities) : cities_(std::move(cities)) {
    for (std::size_t i = 0; i < cities_.size(); ++i) {
        grid_[cell_of(cities_[i].lat, cities_[i].lon)].push_back(i);
    }
}

std::optional<CityRecord> CityIndex::assign_city(double lat, double lon) const {
    GeoPoint query{lat, lon};
    check_point(query);
    if (cities_.empty()) return std::nullopt;

    // 50 km is under 0.5 degrees of latitude, so one cell of slack in
    // latitude suffices. Longitude span widens toward the poles; when a
    // full wrap is needed the scan degenerates to the whole band.
    const int lat0 = std::clamp(static_cast<int>(std::floor(lat)), -90, 90);
    const double cos_lat = std::cos(lat * kDegToRad);
    int lon_span;
    if (cos_lat * 111.32 <= kCityRadiusKm / 90.0) {
        lon_span = 180;
    } else {
        lon_span = static_cast<int>(std::ceil(kCityRadiusKm / (111.32 * cos_lat))) + 1;
        lon_span = std::min(lon_span, 180);
    }
    const int lon0 = static_cast<int>(std::floor(lon));

    const CityRecord* best = nullptr;
    double best_dist = 0.0;
    auto consider = [&](std::size_t i) {
        const CityRecord& c = cities_[i];
        const double d = haversine_km(query, {c.lat, c.lon});
        if (d > kCityRadiusKm) return;
        if (!best || d < best_dist || (d == best_dist && c.name < best->name)) {
            best = &c;
            best_dist = d;
        }
    };

    for (int dlat = -1; dlat <= 1; ++dlat) {
        const int la = lat0 + dlat;
        if (la < -90 || la > 90) continue;
        const int lat_idx = std::clamp(la + 90, 0, 180);
        for (int dlon = -lon_span; dlon <= lon_span; ++dlon) {
            int lo = lon0 + dlon;
            while (lo < -180) lo += 360;
            while (lo >= 180) lo -= 360;
            const int lon_idx = lo + 180;
            auto it = grid_.find(lat_idx * 360 + lon_idx);
            if (it == grid_.end()) continue;
            for (std::size_t i : it->second) consider(i);
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

std::vector<CityRecord> load_cities(const std::string& path) {
    auto table = csv::load_file(path);
    const auto c_name = table.column("name");
    const auto c_iso3 = table.column("iso3");
    const auto c_lat = table.column("lat");
    const auto c_lon = table.column("lon");
    std::vector<CityRecord> cities;
    cities.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        CityRecord rec;
        rec.name = row.at(c_name);
        rec.country = row.at(c_iso3);
        if (!is_valid_country(rec.country)) {
            throw Error("bad country code in city file: " + rec.country);
        }
        rec.lat = std::stod(row.at(c_lat));
        rec.lon = std::stod(row.at(c_lon));
        if (rec.lat < -90.0 || rec.lat > 90.0 || rec.lon < -180.0 || rec.lon > 180.0) {
            throw OutOfRange("city out of range: " + rec.name);
        }
        cities.push_back(std::move(rec));
    }
    return cities;
}

TldTable load_tld_table(const std::string& mapped_path,
                        const std::string& excluded_path) {
    TldTable t = TldTable::with_default_exclusions();
    auto table = csv::load_file(mapped_path);
    const auto c_tld = table.column("tld");
    const auto c_iso3 = table.column("iso3");
    for (const auto& row : table.rows) {
        std::string tld = row.at(c_tld);
        if (!tld.empty() && tld.front() == '.') tld.erase(0, 1);
        const std::string& iso3 = row.at(c_iso3);
        if (!is_valid_country(iso3)) {
            throw Error("bad country code in TLD table: " + iso3);
        }
        t.mapped[tld] = iso3;
    }
    if (!excluded_path.empty()) {
        auto ex = csv::load_file(excluded_path);
        const auto c_ex = ex.column("tld");
        for (const auto& row : ex.rows) {
            std::string tld = row.at(c_ex);
            if (!tld.empty() && tld.front() == '.') tld.erase(0, 1);
            t.excluded.insert(tld);
        }
    }
    // An excluded TLD never maps, whatever the table says.
    for (const auto& tld : t.excluded) t.mapped.erase(tld);
    return t;
}

}  // namespace geocorpus::geo
