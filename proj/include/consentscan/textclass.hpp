#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/detection.hpp"
#include "consentscan/language.hpp"
#include "consentscan/snapshot.hpp"

namespace consentscan::textclass {

enum class CandidateSource { z_index, body_edge };

std::string to_string(CandidateSource s);

struct Candidate {
    int node_id = 0;
    std::string text;
    CandidateSource source = CandidateSource::z_index;
    int z_index = 0;
    std::size_t position = 0; // document order, second component of the order key

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Outermost visible positive-z nodes plus the first and last three visible
/// text-bearing nodes under body, ordered by (z_index descending, document order),
/// with identical texts collapsed to the first occurrence.
std::vector<Candidate> extract_candidates(const PageSnapshot& snapshot);

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ModelKind { baseline_logistic, external };

/// Contents of a model file.
///
/// Baseline files carry `vocabulary` and `bias`. External files carry either
/// `command` (argv, resolved against the model file's directory) speaking the
/// line protocol, or `endpoint` (http URL) speaking the JSON contract.
struct ClassifierModel {
    ModelKind kind = ModelKind::baseline_logistic;
    std::string version;
    double threshold = 0.5;
    std::map<std::string, double> vocabulary;
    double bias = 0.0;
    std::vector<std::string> command;
    std::string endpoint;
    std::filesystem::path base_dir;

    /// Throws ModelError on non-finite weights, a threshold outside (0,1) or a missing external target.
    void validate() const;
};

ClassifierModel model_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json model_to_json(const ClassifierModel& m);
/// Throws ModelError when the file is missing or invalid.
ClassifierModel load_model(const std::filesystem::path& path);

/// σ(bias + Σ weight over the distinct lowercased word tokens of `text`).
double classify_baseline(const ClassifierModel& model, std::string_view text);

/// Scores texts in [0, 1]. Implementations are safe to share across threads.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual double score(const std::string& text) = 0;
    virtual double threshold() const = 0;
};

std::unique_ptr<Classifier> make_classifier(const ClassifierModel& model);

/// Encodes one request line of the external line protocol (a JSON string literal).
std::string encode_request_line(const std::string& text);
/// Parses one response line; throws ModelError unless it is a number in [0, 1].
double parse_score_line(const std::string& line);

/// First candidate scoring at least the threshold; confidence is its score.
std::optional<DetectionResult> detect_textclass(const PageSnapshot& snapshot, Classifier& classifier);

} // namespace consentscan::textclass
