#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "geocorpus/util.hpp"

namespace geocorpus::ingest {

enum class Source { web, twitter };

struct RawDocument {
    std::string id;
    Source source = Source::web;
    std::string payload;          // HTML for web, tweet text for twitter
    std::optional<std::string> url;
    std::optional<double> lat;
    std::optional<double> lon;
    std::string timestamp;        // ISO-8601
};

struct CleanDocument {
    std::string id;
    std::string text;
    std::uint64_t word_count = 0;
    std::string site;         // hostname or "twitter"
    std::string time_bucket;  // YYYY-MM
    Source source = Source::web;
};

// Inner text of each <p>...</p> region: nested tags stripped, the
// entities &amp; &lt; &gt; &quot; &#NNN; &#xNNN; decoded, whitespace
// collapsed. Content outside <p> is discarded. Malformed input is
// tolerated; EOF or a new <p> closes an open paragraph.
std::vector<std::string> extract_paragraphs(std::string_view html);

// Removes scheme-prefixed URL tokens and, for twitter, @-mentions;
// collapses whitespace runs; trims. Hashtag bodies are kept.
std::string clean_text(std::string_view text, Source source);

// Tokens split on Unicode whitespace; each token counts as
// max(1, number of CJK ideographs it contains).
std::uint64_t count_words(std::string_view text);

// Dedup key: (site, month bucket, country, FNV-1a 64 hash of text).
struct DedupKey {
    std::string site;
    std::string time_bucket;
    std::string country;
    std::uint64_t text_hash = 0;

    bool operator==(const DedupKey&) const = default;
};

struct DedupKeyHash {
    std::size_t operator()(const DedupKey& k) const noexcept {
        std::uint64_t h = fnv1a64(k.site);
        h = fnv1a64(k.time_bucket, h);
        h = fnv1a64(k.country, h);
        h ^= k.text_hash + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

// First-occurrence streaming dedup over (site, month, country, text).
// insert-if-absent on the key set; callers needing parallelism must
// synchronize calls to accept().
class Deduper {
public:
    // True when the document is new and should be emitted.
    bool accept(const CleanDocument& doc, const std::string& country);
    std::size_t seen() const noexcept { return seen_.size(); }

private:
    std::unordered_set<DedupKey, DedupKeyHash> seen_;
};

// Month bucket "YYYY-MM" from an ISO-8601 timestamp; nullopt when the
// prefix does not look like a date.
std::optional<std::string> month_bucket(std::string_view iso_timestamp);

// One JSON-lines record. Throws Error for malformed lines (bad JSON,
// missing fields, coordinates out of range).
RawDocument parse_jsonl_record(const std::string& line);

std::string to_jsonl(const CleanDocument& doc, const std::string& country);

}  // namespace geocorpus::ingest
