#include "consentscan/evaluation.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "consentscan/text.hpp"

namespace consentscan::evaluation {

using nlohmann::json;

void GroundTruthRecord::validate() const
{
    if (url.empty()) {
        throw std::invalid_argument("ground truth record without url");
    }
    if (!has_notice && (notice_bbox || notice_text_hash || has_decline_first_layer || colors_differ)) {
        throw std::invalid_argument("ground truth for " + url + " has notice fields but has_notice=false");
    }
}

GroundTruthRecord ground_truth_from_json(const json& j)
{
    GroundTruthRecord r;
    r.url = j.at("url").get<std::string>();
    r.has_notice = j.at("has_notice").get<bool>();
    if (j.contains("notice_bbox") && !j["notice_bbox"].is_null()) {
        const auto& b = j["notice_bbox"];
        r.notice_bbox = Rect{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
    }
    const auto opt_string = [&](const char* key) -> std::optional<std::string> {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        return j[key].get<std::string>();
    };
    const auto opt_bool = [&](const char* key) -> std::optional<bool> {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        return j[key].get<bool>();
    };
    r.notice_text_hash = opt_string("notice_text_hash");
    r.has_decline_first_layer = opt_bool("has_decline_first_layer");
    r.colors_differ = opt_bool("colors_differ");
    r.language = opt_string("language");
    r.annotator = j.value("annotator", "");
    r.validate();
    return r;
}

json to_json(const GroundTruthRecord& r)
{
    const auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
    return {
        {"url", r.url},
        {"has_notice", r.has_notice},
        {"notice_bbox",
         r.notice_bbox ? json{r.notice_bbox->x, r.notice_bbox->y, r.notice_bbox->w, r.notice_bbox->h} : json(nullptr)},
        {"notice_text_hash", opt(r.notice_text_hash)},
        {"has_decline_first_layer", opt(r.has_decline_first_layer)},
        {"colors_differ", opt(r.colors_differ)},
        {"language", opt(r.language)},
        {"annotator", r.annotator},
    };
}

std::vector<GroundTruthRecord> load_ground_truth(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open ground truth " + path.string());
    }
    std::vector<GroundTruthRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::normalize_whitespace(line).empty()) continue;
        try {
            out.push_back(ground_truth_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::string notice_text_hash(const std::string& notice_text)
{
    return text::sha256_hex(text::normalize_whitespace(notice_text));
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::tp: return "TP";
    case Verdict::fp: return "FP";
    case Verdict::fn: return "FN";
    case Verdict::tn: return "TN";
    }
    return "TN";
}

Verdict match_detection(const GroundTruthRecord& gt, const std::optional<DetectionResult>& det, double iou_threshold)
{
    if (!gt.has_notice) {
        return det ? Verdict::fp : Verdict::tn;
    }
    if (!det) {
        return Verdict::fn;
    }
    if (gt.notice_bbox && iou(det->bbox, *gt.notice_bbox) >= iou_threshold) {
        return Verdict::tp;
    }
    if (gt.notice_text_hash && notice_text_hash(det->notice_text) == *gt.notice_text_hash) {
        return Verdict::tp;
    }
    return Verdict::fp;
}

std::optional<long long> ratio_hundredths(long long num, long long den)
{
    if (den == 0) return std::nullopt;
    return (200 * num + den) / (2 * den);
}

EvalMetrics compute_metrics(const std::string& method, long long tp, long long fp, long long fn, long long tn)
{
    EvalMetrics m;
    m.method = method;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    const auto p = ratio_hundredths(tp, tp + fp);
    const auto r = ratio_hundredths(tp, tp + fn);
    m.precision_undefined = !p;
    m.recall_undefined = !r;
    m.precision = p ? *p / 100.0 : 0.0;
    m.recall = r ? *r / 100.0 : 0.0;
    const long long ph = p.value_or(0);
    const long long rh = r.value_or(0);
    // F1 in hundredths: 2 * (ph/100) * (rh/100) / ((ph + rh)/100) * 100 = 2*ph*rh / (ph + rh).
    const auto f = ratio_hundredths(2 * ph * rh, 100 * (ph + rh));
    m.f1_undefined = !f || m.precision_undefined || m.recall_undefined;
    m.f1 = f ? *f / 100.0 : 0.0;
    return m;
}

EvalMetrics compute_metrics(const std::string& method, const std::vector<Verdict>& verdicts)
{
    long long c[4] = {0, 0, 0, 0};
    for (auto v : verdicts) ++c[static_cast<int>(v)];
    return compute_metrics(method, c[0], c[1], c[2], c[3]);
}

json to_json(const EvalMetrics& m)
{
    return {
        {"method", m.method},
        {"tp", m.tp},
        {"fp", m.fp},
        {"fn", m.fn},
        {"tn", m.tn},
        {"precision", m.precision},
        {"recall", m.recall},
        {"f1", m.f1},
        {"precision_undefined", m.precision_undefined},
        {"recall_undefined", m.recall_undefined},
        {"f1_undefined", m.f1_undefined},
    };
}

EvalMetrics evaluate_method(const std::string& method, const std::vector<GroundTruthRecord>& gt,
                            const MethodResults& results, double iou_threshold)
{
    std::vector<Verdict> verdicts;
    verdicts.reserve(gt.size());
    for (const auto& r : gt) {
        auto it = results.find(r.url);
        const std::optional<DetectionResult> none;
        verdicts.push_back(match_detection(r, it == results.end() ? none : it->second, iou_threshold));
    }
    return compute_metrics(method, verdicts);
}

DarkPatternSummary summarize_darkpatterns(long long decline_gt, long long decline_both, long long colors_gt,
                                          long long colors_both)
{
    DarkPatternSummary s;
    s.decline_ground_truth = decline_gt;
    s.decline_both = decline_both;
    s.colors_ground_truth = colors_gt;
    s.colors_both = colors_both;
    if (const auto f = ratio_hundredths(decline_both, decline_gt)) s.decline_fraction = *f / 100.0;
    if (const auto f = ratio_hundredths(colors_both, colors_gt)) s.colors_fraction = *f / 100.0;
    return s;
}

DarkPatternSummary evaluate_darkpatterns(const std::vector<GroundTruthRecord>& gt,
                                         const std::map<std::string, DarkPatternObservation>& observed)
{
    long long decline_gt = 0, decline_both = 0, decline_detected = 0;
    long long colors_gt = 0, colors_both = 0, colors_detected = 0;
    for (const auto& r : gt) {
        auto it = observed.find(r.url);
        const bool d = it != observed.end() && it->second.decline_detected;
        const bool c = it != observed.end() && it->second.color_diversion;
        decline_detected += d;
        colors_detected += c;
        if (r.has_decline_first_layer.value_or(false)) {
            ++decline_gt;
            decline_both += d;
        }
        if (r.colors_differ.value_or(false)) {
            ++colors_gt;
            colors_both += c;
        }
    }
    auto s = summarize_darkpatterns(decline_gt, decline_both, colors_gt, colors_both);
    s.decline_detected = decline_detected;
    s.colors_detected = colors_detected;
    return s;
}

json to_json(const DarkPatternSummary& s)
{
    return {
        {"decline_ground_truth", s.decline_ground_truth},
        {"decline_detected", s.decline_detected},
        {"decline_ground_truth_and_detected", s.decline_both},
        {"decline_fraction", s.decline_fraction},
        {"colors_ground_truth", s.colors_ground_truth},
        {"colors_detected", s.colors_detected},
        {"colors_ground_truth_and_detected", s.colors_both},
        {"colors_fraction", s.colors_fraction},
    };
}

std::string format_table(const std::vector<EvalMetrics>& rows)
{
    std::ostringstream out;
    out << std::left << std::setw(14) << "method" << std::right << std::setw(6) << "TP" << std::setw(6) << "FP"
        << std::setw(6) << "FN" << std::setw(6) << "TN" << std::setw(11) << "precision" << std::setw(8) << "recall"
        << std::setw(6) << "F1" << '\n';
    out << std::fixed << std::setprecision(2);
    for (const auto& m : rows) {
        out << std::left << std::setw(14) << m.method << std::right << std::setw(6) << m.tp << std::setw(6) << m.fp
            << std::setw(6) << m.fn << std::setw(6) << m.tn << std::setw(11) << m.precision << std::setw(8)
            << m.recall << std::setw(6) << m.f1 << '\n';
    }
    return out.str();
}

std::string format_csv(const std::vector<EvalMetrics>& rows)
{
    std::ostringstream out;
    out << "method,tp,fp,fn,tn,precision,recall,f1\n" << std::fixed << std::setprecision(2);
    for (const auto& m : rows) {
        out << m.method << ',' << m.tp << ',' << m.fp << ',' << m.fn << ',' << m.tn << ',' << m.precision << ','
            << m.recall << ',' << m.f1 << '\n';
    }
    return out.str();
}

} // namespace consentscan::evaluation
