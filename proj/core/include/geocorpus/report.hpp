#pragma once

#include <map>
#include <string>
#include <vector>

#include "geocorpus/aggregate.hpp"
#include "geocorpus/geo.hpp"
#include "geocorpus/metrics.hpp"
#include "geocorpus/util.hpp"

namespace geocorpus::report {

struct EmptyValues : Error {
    using Error::Error;
};
struct EmptyTable : Error {
    using Error::Error;
};

struct ReportSpec {
    std::string output_dir;
    bool csv = true;
    bool json = true;
    bool geojson = false;
    bool svg = false;
    std::size_t top_k = 100;
    double svg_share_cap = 0.02;  // y-axis cap; bars above it are clipped
};

// Geometry-free GeoJSON FeatureCollection: one feature per country with
// properties {iso3, value}; downstream mappers join on iso3.
void emit_choropleth(const std::map<geo::CountryCode, double>& values,
                     const std::string& path);

// Parses a file written by emit_choropleth back into a map.
std::map<geo::CountryCode, double> parse_choropleth(const std::string& path);

// SVG 1.1 bar chart of the top_k language shares, y-axis capped at
// spec.svg_share_cap with an overflow marker on clipped bars.
void emit_distribution_svg(const agg::GlobalLanguageTable& table,
                           const ReportSpec& spec, const std::string& path);

// CSV `iso3,score`
void write_representation_csv(const std::vector<metrics::RepresentationScore>& scores,
                              const std::string& path);

// CSV `iso3,tpr,fp_count,fp_langs,n_truth` (fp_langs space-separated)
void write_inventory_csv(const metrics::InventoryEval& eval, const std::string& path);

// {"variables": [...], "n_countries": n, "r": [[...]], "dropped": [...]}
void write_correlation_json(const metrics::CorrelationMatrix& matrix,
                            const std::string& path);

}  // namespace geocorpus::report
