#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/detection.hpp"
#include "consentscan/geometry.hpp"

namespace consentscan::evaluation {

struct GroundTruthRecord {
    std::string url;
    bool has_notice = false;
    std::optional<Rect> notice_bbox;
    std::optional<std::string> notice_text_hash;
    std::optional<bool> has_decline_first_layer;
    std::optional<bool> colors_differ;
    std::optional<std::string> language;
    std::string annotator;

    /// Throws std::invalid_argument when notice fields are set on a record without a notice.
    void validate() const;
};

GroundTruthRecord ground_truth_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GroundTruthRecord& r);
/// One record per line; blank lines are skipped.
std::vector<GroundTruthRecord> load_ground_truth(const std::filesystem::path& path);

/// SHA-256 of the whitespace-normalized notice text, as stored in ground truth.
std::string notice_text_hash(const std::string& notice_text);

enum class Verdict { tp, fp, fn, tn };

std::string to_string(Verdict v);

/// TP needs IoU >= iou_threshold or an equal text hash; a detection of the wrong element is an FP.
Verdict match_detection(const GroundTruthRecord& gt, const std::optional<DetectionResult>& det,
                        double iou_threshold = 0.5);

/// Ratio rounded half-up to hundredths with integer arithmetic; nullopt when den == 0.
std::optional<long long> ratio_hundredths(long long num, long long den);

struct EvalMetrics {
    std::string method;
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    /// Two-decimal values, as printed in the results table.
    double precision = 0, recall = 0, f1 = 0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;

    long long total() const { return tp + fp + fn + tn; }
};

/// Precision and recall are rounded first; F1 is the harmonic mean of the
/// rounded values, itself rounded half-up.
EvalMetrics compute_metrics(const std::string& method, long long tp, long long fp, long long fn, long long tn);
EvalMetrics compute_metrics(const std::string& method, const std::vector<Verdict>& verdicts);

nlohmann::json to_json(const EvalMetrics& m);

/// Per-url detections of one method.
using MethodResults = std::map<std::string, std::optional<DetectionResult>>;

/// Scores one method over the whole ground truth; urls without a result count as no detection.
EvalMetrics evaluate_method(const std::string& method, const std::vector<GroundTruthRecord>& gt,
                            const MethodResults& results, double iou_threshold = 0.5);

struct DarkPatternObservation {
    bool decline_detected = false;
    bool color_diversion = false;
};

struct DarkPatternSummary {
    long long decline_ground_truth = 0;
    long long decline_detected = 0;
    long long decline_both = 0;
    double decline_fraction = 0; // both / ground truth, two decimals; 0 without ground truth
    long long colors_ground_truth = 0;
    long long colors_detected = 0;
    long long colors_both = 0;
    double colors_fraction = 0;
};

DarkPatternSummary summarize_darkpatterns(long long decline_gt, long long decline_both, long long colors_gt,
                                          long long colors_both);
DarkPatternSummary evaluate_darkpatterns(const std::vector<GroundTruthRecord>& gt,
                                         const std::map<std::string, DarkPatternObservation>& observed);

nlohmann::json to_json(const DarkPatternSummary& s);

/// Fixed-width text table and CSV renderings of a metrics list.
std::string format_table(const std::vector<EvalMetrics>& rows);
std::string format_csv(const std::vector<EvalMetrics>& rows);

} // namespace consentscan::evaluation
