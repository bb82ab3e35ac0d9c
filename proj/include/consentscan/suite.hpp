#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/detection.hpp"
#include "consentscan/domwalk.hpp"
#include "consentscan/filterlist.hpp"
#include "consentscan/perceptive.hpp"
#include "consentscan/snapshot.hpp"
#include "consentscan/textclass.hpp"

namespace consentscan::scan {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Stage-2 selection order: the first method with a result wins.
inline constexpr std::array<Method, 4> priority_chain{Method::textclass, Method::perceptive, Method::domwalk,
                                                     Method::filterlist};

std::set<Method> all_methods();
/// Comma-separated method names or "all". Throws ConfigError on unknown names.
std::set<Method> parse_methods(const std::string& spec);

/// Everything the four detectors need, loaded once and shared by all workers.
struct DetectorSuite {
    std::set<Method> methods = all_methods();
    domwalk::KeywordConfig keywords;
    perceptive::PerceptiveConfig perceptive;
    std::vector<filterlist::RuleSet> lists;
    std::shared_ptr<textclass::Classifier> classifier;

    /// Throws ConfigError when an enabled method lacks its inputs (filter lists, model).
    void validate() const;
};

/// Results of every enabled detector on one snapshot.
struct Detections {
    std::map<Method, std::optional<DetectionResult>> per_method;
    std::optional<Method> chosen;

    const DetectionResult* chosen_result() const;
};

std::optional<DetectionResult> run_method(Method m, const PageSnapshot& snapshot, const DetectorSuite& suite);

/// Runs all enabled detectors and picks one result by the priority chain.
Detections run_detectors(const PageSnapshot& snapshot, const DetectorSuite& suite);

/// Walks the priority chain and stops at the first enabled method with a result.
std::optional<DetectionResult> detect_first(const PageSnapshot& snapshot, const DetectorSuite& suite);

nlohmann::json to_json(const Detections& d);

/// Offline detection on a stored snapshot. The output carries no timings or
/// timestamps of its own, so equal inputs give byte-identical dumps.
nlohmann::json detect_offline(const PageSnapshot& snapshot, const DetectorSuite& suite);
nlohmann::json detect_offline(const std::filesystem::path& snapshot_path, const DetectorSuite& suite);

} // namespace consentscan::scan
