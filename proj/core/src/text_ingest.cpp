#include "geocorpus/text_ingest.hpp"

#include <cctype>

#include <nlohmann/json.hpp>

namespace geocorpus::ingest {

namespace {

bool starts_tag(std::string_view s, std::size_t i, std::string_view name) {
    // Matches "<name" followed by whitespace, '>', or '/'.
    if (i + 1 + name.size() > s.size() || s[i] != '<') return false;
    for (std::size_t k = 0; k < name.size(); ++k) {
        char c = s[i + 1 + k];
        if (std::tolower(static_cast<unsigned char>(c)) != name[k]) return false;
    }
    std::size_t after = i + 1 + name.size();
    if (after >= s.size()) return true;
    char c = s[after];
    return c == '>' || c == '/' || std::isspace(static_cast<unsigned char>(c));
}

bool starts_close_tag(std::string_view s, std::size_t i, std::string_view name) {
    if (i + 2 + name.size() > s.size() || s[i] != '<' || s[i + 1] != '/') return false;
    for (std::size_t k = 0; k < name.size(); ++k) {
        char c = s[i + 2 + k];
        if (std::tolower(static_cast<unsigned char>(c)) != name[k]) return false;
    }
    return true;
}

// Decodes one entity starting at '&'; returns consumed length or 0.
std::size_t decode_entity(std::string_view s, std::size_t i, std::string& out) {
    static constexpr struct {
        std::string_view name;
        char ch;
    } kNamed[] = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'},
        {"&apos;", '\''},
    };
    for (const auto& e : kNamed) {
        if (s.substr(i, e.name.size()) == e.name) {
            out.push_back(e.ch);
            return e.name.size();
        }
    }
    if (s.substr(i, 2) == "&#") {
        std::size_t j = i + 2;
        bool hex = j < s.size() && (s[j] == 'x' || s[j] == 'X');
        if (hex) ++j;
        char32_t cp = 0;
        std::size_t digits = 0;
        while (j < s.size() && digits < 7) {
            char c = s[j];
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else break;
            cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(d);
            ++j;
            ++digits;
        }
        if (digits > 0 && j < s.size() && s[j] == ';') {
            if (cp == 0 || cp > 0x10FFFF) cp = 0xFFFD;
            utf8_append(out, cp);
            return j + 1 - i;
        }
    }
    return 0;
}

void flush_paragraph(std::string& raw, std::vector<std::string>& out) {
    // Collapse whitespace and trim.
    std::string collapsed;
    bool pending_space = false;
    for (char32_t cp : utf8_decode(raw)) {
        if (is_unicode_space(cp)) {
            pending_space = !collapsed.empty();
        } else {
            if (pending_space) collapsed.push_back(' ');
            pending_space = false;
            utf8_append(collapsed, cp);
        }
    }
    if (!collapsed.empty()) out.push_back(std::move(collapsed));
    raw.clear();
}

}  // namespace

std::vector<std::string> extract_paragraphs(std::string_view html) {
    std::vector<std::string> out;
    std::string current;
    bool in_p = false;
    std::size_t i = 0;
    while (i < html.size()) {
        char c = html[i];
        if (c == '<') {
            if (starts_close_tag(html, i, "p")) {
                if (in_p) flush_paragraph(current, out);
                in_p = false;
            } else if (starts_tag(html, i, "p")) {
                if (in_p) flush_paragraph(current, out);  // implicit close
                in_p = true;
            }
            // Skip the tag itself (any tag, inside or outside <p>).
            std::size_t close = html.find('>', i);
            if (close == std::string_view::npos) break;  // EOF inside a tag
            i = close + 1;
        } else if (c == '&' && in_p) {
            std::size_t used = decode_entity(html, i, current);
            if (used > 0) {
                i += used;
            } else {
                current.push_back('&');
                ++i;
            }
        } else {
            if (in_p && c != '>') current.push_back(c);
            ++i;
        }
    }
    if (in_p) flush_paragraph(current, out);  // EOF closes an open <p>
    return out;
}

std::string clean_text(std::string_view text, Source source) {
    auto cps = utf8_decode(text);
    std::vector<std::pair<std::size_t, std::size_t>> tokens;  // [begin, end)
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_unicode_space(cps[i])) ++i;
        std::size_t begin = i;
        while (i < cps.size() && !is_unicode_space(cps[i])) ++i;
        if (i > begin) tokens.emplace_back(begin, i);
    }

    auto is_url_token = [&](std::size_t b, std::size_t e) {
        // scheme "://" prefix: [A-Za-z][A-Za-z0-9+.-]* then "://"
        std::size_t j = b;
        if (j >= e) return false;
        char32_t c0 = cps[j];
        if (!((c0 >= 'a' && c0 <= 'z') || (c0 >= 'A' && c0 <= 'Z'))) return false;
        ++j;
        while (j < e) {
            char32_t c = cps[j];
            if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                (c >= '0' && c <= '9') || c == '+' || c == '.' || c == '-') {
                ++j;
            } else {
                break;
            }
        }
        return j + 2 < e && cps[j] == ':' && cps[j + 1] == '/' && cps[j + 2] == '/';
    };

    std::string out;
    for (auto [b, e] : tokens) {
        if (is_url_token(b, e)) continue;
        if (source == Source::twitter && cps[b] == '@' && e - b > 1) continue;
        if (!out.empty()) out.push_back(' ');
        for (std::size_t k = b; k < e; ++k) utf8_append(out, cps[k]);
    }
    return out;
}

std::uint64_t count_words(std::string_view text) {
    auto cps = utf8_decode(text);
    std::uint64_t total = 0;
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_unicode_space(cps[i])) ++i;
        std::uint64_t cjk = 0;
        bool any = false;
        while (i < cps.size() && !is_unicode_space(cps[i])) {
            if (is_cjk_ideograph(cps[i])) ++cjk;
            any = true;
            ++i;
        }
        if (any) total += cjk > 0 ? cjk : 1;
    }
    return total;
}

bool Deduper::accept(const CleanDocument& doc, const std::string& country) {
    DedupKey key{doc.site, doc.time_bucket, country, fnv1a64(doc.text)};
    return seen_.insert(std::move(key)).second;
}

std::optional<std::string> month_bucket(std::string_view iso_timestamp) {
    // "YYYY-MM..." prefix
    if (iso_timestamp.size() < 7 || iso_timestamp[4] != '-') return std::nullopt;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u}) {
        if (!std::isdigit(static_cast<unsigned char>(iso_timestamp[i]))) {
            return std::nullopt;
        }
    }
    int month = (iso_timestamp[5] - '0') * 10 + (iso_timestamp[6] - '0');
    if (month < 1 || month > 12) return std::nullopt;
    return std::string(iso_timestamp.substr(0, 7));
}

RawDocument parse_jsonl_record(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error("record is not a JSON object");
    RawDocument doc;
    try {
        doc.id = j.at("id").get<std::string>();
        const std::string source = j.at("source").get<std::string>();
        doc.timestamp = j.value("ts", "");
        if (source == "web") {
            doc.source = Source::web;
            doc.url = j.at("url").get<std::string>();
            doc.payload = j.at("html").get<std::string>();
        } else if (source == "twitter") {
            doc.source = Source::twitter;
            doc.payload = j.at("text").get<std::string>();
            doc.lat = j.at("lat").get<double>();
            doc.lon = j.at("lon").get<double>();
            if (*doc.lat < -90.0 || *doc.lat > 90.0 || *doc.lon < -180.0 ||
                *doc.lon > 180.0) {
                throw Error("coordinates out of range");
            }
        } else {
            throw Error("unknown source: " + source);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("missing or mistyped field: ") + e.what());
    }
    return doc;
}

std::string to_jsonl(const CleanDocument& doc, const std::string& country) {
    nlohmann::json j{
        {"id", doc.id},
        {"text", doc.text},
        {"word_count", doc.word_count},
        {"site", doc.site},
        {"time_bucket", doc.time_bucket},
        {"source", doc.source == Source::web ? "web" : "twitter"},
        {"country", country},
    };
    return j.dump();
}

}  // namespace geocorpus::ingest
