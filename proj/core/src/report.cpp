#include "geocorpus/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace geocorpus::report {

void emit_choropleth(const std::map<geo::CountryCode, double>& values,
                     const std::string& path) {
    if (values.empty()) throw EmptyValues("no values to emit");
    nlohmann::json features = nlohmann::json::array();
    for (const auto& [iso3, value] : values) {
        features.push_back({
            {"type", "Feature"},
            {"geometry", nullptr},
            {"properties", {{"iso3", iso3}, {"value", value}}},
        });
    }
    nlohmann::json fc{{"type", "FeatureCollection"}, {"features", features}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write GeoJSON: " + path);
    out << fc.dump(2) << '\n';
}

std::map<geo::CountryCode, double> parse_choropleth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open GeoJSON: " + path);
    nlohmann::json fc = nlohmann::json::parse(in);
    std::map<geo::CountryCode, double> values;
    for (const auto& f : fc.at("features")) {
        const auto& props = f.at("properties");
        values[props.at("iso3").get<std::string>()] = props.at("value").get<double>();
    }
    return values;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

void emit_distribution_svg(const agg::GlobalLanguageTable& table,
                           const ReportSpec& spec, const std::string& path) {
    if (table.rows.empty()) throw EmptyTable("no rows to plot");
    const std::size_t n = std::min(spec.top_k, table.rows.size());
    const double cap = spec.svg_share_cap;

    const int bar_w = 10;
    const int gap = 2;
    const int plot_h = 300;
    const int margin = 40;
    const int width = margin * 2 + static_cast<int>(n) * (bar_w + gap);
    const int height = plot_h + margin * 2;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << width << "\" height=\"" << height << "\">\n"
        << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n"
        << "  <line x1=\"" << margin << "\" y1=\"" << margin + plot_h << "\" x2=\""
        << width - margin << "\" y2=\"" << margin + plot_h
        << "\" stroke=\"black\"/>\n";

    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = table.rows[i];
        const bool clipped = row.share > cap;
        const double shown = clipped ? cap : row.share;
        const int h = std::max(1, static_cast<int>(shown / cap * plot_h));
        const int x = margin + static_cast<int>(i) * (bar_w + gap);
        const int y = margin + plot_h - h;
        svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w
            << "\" height=\"" << h << "\" fill=\"steelblue\">"
            << "<title>" << xml_escape(row.language.code) << " "
            << row.share * 100.0 << "%</title></rect>\n";
        if (clipped) {
            // Overflow marker: small triangle above the clipped bar.
            svg << "  <path d=\"M" << x << " " << y - 2 << " L" << x + bar_w
                << " " << y - 2 << " L" << x + bar_w / 2 << " " << y - 8
                << " Z\" fill=\"crimson\"/>\n";
        }
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw Error("cannot write SVG: " + path);
    out << svg.str();
}

void write_representation_csv(const std::vector<metrics::RepresentationScore>& scores,
                              const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write CSV: " + path);
    out << "iso3,corpus_share,pop_share,score\n";
    out.precision(12);
    for (const auto& s : scores) {
        out << s.country << ',' << s.corpus_share << ',' << s.pop_share << ','
            << s.score << '\n';
    }
}

void write_inventory_csv(const metrics::InventoryEval& eval, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write CSV: " + path);
    out << "iso3,tpr,fp_count,fp_langs,n_truth\n";
    out.precision(12);
    for (const auto& r : eval.results) {
        std::string langs;
        for (const auto& l : r.false_positives) {
            if (!langs.empty()) langs.push_back(' ');
            langs += l.code;
        }
        out << r.country << ',' << r.tpr << ',' << r.fp_count << ',' << langs
            << ',' << r.truth.size() << '\n';
    }
}

void write_correlation_json(const metrics::CorrelationMatrix& matrix,
                            const std::string& path) {
    nlohmann::json j{
        {"variables", matrix.variables},
        {"n_countries", matrix.n_countries},
        {"r", matrix.r},
        {"dropped", matrix.dropped},
    };
    std::ofstream out(path);
    if (!out) throw Error("cannot write JSON: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace geocorpus::report
