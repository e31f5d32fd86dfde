#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geocorpus/util.hpp"

namespace geocorpus::pipeline {

struct ConfigError : Error {
    using Error::Error;
};
struct StageError : Error {
    StageError(std::string stage, const std::string& msg)
        : Error("[" + stage + "] " + msg), stage(std::move(stage)) {}
    std::string stage;
};

// Flat key=value config with [section] headers. Keys are "section.key".
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;  // throws ConfigError
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
    double get_double_or(const std::string& key, double fallback) const;

    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

struct Manifest {
    std::uint64_t docs_in = 0;
    std::uint64_t docs_emitted = 0;
    std::uint64_t docs_dropped_short = 0;
    std::uint64_t docs_dropped_dedup = 0;
    std::uint64_t docs_dropped_ungeolocated = 0;
    std::uint64_t docs_malformed = 0;

    bool balanced() const {
        return docs_in == docs_emitted + docs_dropped_short + docs_dropped_dedup +
                              docs_dropped_ungeolocated + docs_malformed;
    }
};

struct RunResult {
    int exit_code = 0;
    Manifest manifest;
    std::string error;  // empty on success
};

// Full pipeline: ingest -> geolocate -> predict -> aggregate -> metrics
// -> report. Writes artifacts plus manifest.json under
// [report].output_dir. Deterministic for fixed inputs, config, and seed;
// only the manifest timestamp differs across reruns. Failures produce a
// machine-readable error.json naming the stage.
RunResult run_pipeline(const Config& config);
RunResult run_pipeline_file(const std::string& config_path);

// Worker count: GEOCORPUS_THREADS env var, else [pipeline].threads, else 1.
unsigned effective_threads(const Config& config);

}  // namespace geocorpus::pipeline
