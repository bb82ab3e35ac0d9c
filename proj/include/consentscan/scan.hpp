#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/browser.hpp"
#include "consentscan/darkpattern.hpp"
#include "consentscan/interact.hpp"
#include "consentscan/suite.hpp"

namespace consentscan::scan {

enum class Stage { detect, interact, analyze };

std::string to_string(Stage s);
/// Comma-separated stage names or "all". Throws ConfigError.
std::set<Stage> parse_stages(const std::string& spec);

struct ScanJob {
    std::vector<std::string> urls;
    int passes = 3;
    int workers = 1;
    std::filesystem::path output_dir;
    std::set<Stage> stages{Stage::detect, Stage::interact, Stage::analyze};
    std::uint64_t seed = 0;
    /// Pages per browser session before the worker starts a new one.
    int recycle_after = 25;
    darkpattern::AnalysisConfig analysis;
    /// Set from outside to stop handing out urls; in-flight pages finish.
    const std::atomic<bool>* cancel = nullptr;

    /// Throws ConfigError on invalid counts or stage combinations.
    void validate() const;
};

struct PageTimings {
    double capture_s = 0;
    double detect_s = 0;
    double interact_s = 0;
    double analyze_s = 0;
};

struct PageResult {
    std::string url;
    int pass_index = 0;
    std::optional<capture::CaptureError> error;
    std::string screenshot_ref;
    std::string language = "und";
    Detections detections;
    std::vector<interaction::Clickable> clickables;
    std::optional<std::vector<interaction::ClickOutcome>> outcomes;
    std::optional<darkpattern::NoticeAnalysis> analysis;
    PageTimings timings;

    bool captured() const { return !error.has_value(); }
};

nlohmann::json to_json(const PageResult& r);

/// Runs the configured stages for one url on an existing session.
/// Screenshots go to `shots_dir` when it is non-empty.
PageResult process_url(capture::BrowserSession& session, const std::string& url, int pass_index,
                       const ScanJob& job, const DetectorSuite& suite, const std::filesystem::path& shots_dir);

/// Deterministic per-url file stem: first 16 hex digits of SHA-256(url).
std::string url_key(const std::string& url);

/// Visiting order for a pass: the url list shuffled by a generator seeded from (seed, pass).
std::vector<std::string> pass_order(const std::vector<std::string>& urls, std::uint64_t seed, int pass_index);

/// Passes needed for a url to count as successfully scanned: ceil(2/3 * passes).
int required_successes(int passes);

struct UrlSummary {
    std::string url;
    int successes = 0;
    bool successful = false;
    std::vector<std::string> errors; // one entry per failed pass
    std::vector<std::string> chosen_methods; // per successful pass, "none" when nothing fired
};

struct ScanSummary {
    int passes = 0;
    int required = 0;
    std::vector<UrlSummary> urls; // input order
    long long page_results = 0;
    long long successful_urls() const;
};

nlohmann::json to_json(const ScanSummary& s);

/// Scans every url `passes` times with `workers` sessions. Writes
/// `pass-<n>.jsonl` per pass, `summary.json` and screenshots under `shots/`.
ScanSummary run_scan(const ScanJob& job, capture::BrowserFactory& browsers, const DetectorSuite& suite);

/// Reads a url list: one per line, blank lines and '#' comments skipped.
std::vector<std::string> read_url_list(const std::filesystem::path& path);

} // namespace consentscan::scan
