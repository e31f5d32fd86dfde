#include "geocorpus/aggregate.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "geocorpus/csv.hpp"

namespace geocorpus::agg {

void CountryLanguageCounts::accumulate(std::uint64_t word_count,
                                       const geo::CountryCode& country,
                                       const lid::LanguageLabel& lang) {
    counts[{country, lang}] += word_count;
    total_words += word_count;
    ++n_docs;
}

CountryLanguageCounts merge(const CountryLanguageCounts& a,
                            const CountryLanguageCounts& b) {
    CountryLanguageCounts out = a;
    for (const auto& [key, words] : b.counts) out.counts[key] += words;
    out.total_words += b.total_words;
    out.n_docs += b.n_docs;
    return out;
}

std::map<lid::LanguageLabel, double> country_language_shares(
    const CountryLanguageCounts& counts, const geo::CountryCode& country) {
    std::uint64_t total = 0;
    std::map<lid::LanguageLabel, double> shares;
    for (const auto& [key, words] : counts.counts) {
        if (key.first == country) {
            total += words;
            shares[key.second] = static_cast<double>(words);
        }
    }
    if (total == 0) throw NoDataForCountry("no words for country " + country);
    for (auto& [lang, v] : shares) v /= static_cast<double>(total);
    return shares;
}

std::map<geo::CountryCode, std::uint64_t> country_totals(
    const CountryLanguageCounts& counts) {
    std::map<geo::CountryCode, std::uint64_t> totals;
    for (const auto& [key, words] : counts.counts) totals[key.first] += words;
    return totals;
}

double GlobalLanguageTable::cumulative_share(std::size_t k) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < std::min(k, rows.size()); ++i) sum += rows[i].share;
    return sum;
}

namespace {

std::vector<GlobalLanguageRow> ranked_rows(const CountryLanguageCounts& counts,
                                           std::uint64_t& total_out) {
    if (counts.total_words == 0) throw EmptyCounts("no words aggregated");
    std::map<lid::LanguageLabel, std::uint64_t> by_lang;
    for (const auto& [key, words] : counts.counts) by_lang[key.second] += words;
    total_out = counts.total_words;
    std::vector<GlobalLanguageRow> rows;
    rows.reserve(by_lang.size());
    for (const auto& [lang, words] : by_lang) {
        rows.push_back({lang, words,
                        static_cast<double>(words) /
                            static_cast<double>(counts.total_words)});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const GlobalLanguageRow& a, const GlobalLanguageRow& b) {
                         if (a.words != b.words) return a.words > b.words;
                         return a.language < b.language;
                     });
    return rows;
}

}  // namespace

GlobalLanguageTable global_table(const CountryLanguageCounts& counts,
                                 std::uint64_t threshold) {
    GlobalLanguageTable table;
    table.min_words_threshold = threshold;
    table.rows = ranked_rows(counts, table.total_words);
    std::erase_if(table.rows, [&](const GlobalLanguageRow& r) {
        return r.words < threshold;
    });
    return table;
}

GlobalLanguageTable global_table_relative(const CountryLanguageCounts& counts,
                                          double share_threshold) {
    GlobalLanguageTable table;
    table.min_words_threshold = 0;
    table.rows = ranked_rows(counts, table.total_words);

    std::map<geo::CountryCode, std::uint64_t> totals = country_totals(counts);
    std::set<lid::LanguageLabel> keep;
    for (const auto& [key, words] : counts.counts) {
        const double share = static_cast<double>(words) /
                             static_cast<double>(totals.at(key.first));
        if (share >= share_threshold) keep.insert(key.second);
    }
    std::erase_if(table.rows, [&](const GlobalLanguageRow& r) {
        return !keep.contains(r.language);
    });
    return table;
}

void save_counts(const CountryLanguageCounts& counts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write counts file: " + path);
    out << "iso3,lang,words\n";
    for (const auto& [key, words] : counts.counts) {
        out << key.first << ',' << key.second.code << ',' << words << '\n';
    }
    nlohmann::json meta{
        {"total_words", counts.total_words},
        {"n_docs", counts.n_docs},
    };
    std::ofstream meta_out(path + ".meta.json");
    meta_out << meta.dump(2) << '\n';
}

CountryLanguageCounts load_counts(const std::string& path) {
    auto table = csv::load_file(path);
    const auto c_iso3 = table.column("iso3");
    const auto c_lang = table.column("lang");
    const auto c_words = table.column("words");
    CountryLanguageCounts counts;
    for (const auto& row : table.rows) {
        const auto& iso3 = row.at(c_iso3);
        const auto& lang = row.at(c_lang);
        if (!geo::is_valid_country(iso3)) throw Error("bad country code: " + iso3);
        if (!lid::is_valid_label(lang)) throw Error("bad language code: " + lang);
        const std::uint64_t words = std::stoull(row.at(c_words));
        counts.counts[{iso3, lid::LanguageLabel{lang}}] += words;
        counts.total_words += words;
    }
    std::ifstream meta_in(path + ".meta.json");
    if (meta_in) {
        nlohmann::json meta = nlohmann::json::parse(meta_in, nullptr, false);
        if (meta.is_object() && meta.contains("n_docs")) {
            counts.n_docs = meta["n_docs"].get<std::uint64_t>();
        }
    }
    return counts;
}

}  // namespace geocorpus::agg
