#include "consentscan/textclass.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "consentscan/text.hpp"
#include "external_classifier.hpp"

namespace consentscan::textclass {

using nlohmann::json;

std::string to_string(CandidateSource s)
{
    return s == CandidateSource::z_index ? "z_index" : "body_edge";
}

std::vector<Candidate> extract_candidates(const PageSnapshot& snapshot)
{
    std::vector<Candidate> raw;
    std::set<int> taken;
    std::vector<int> overlays;

    for (const auto& n : snapshot.nodes()) {
        if (!n.visible || n.z_index <= 0) continue;
        bool nested = false;
        for (int o : overlays) {
            if (snapshot.is_ancestor(o, n.node_id)) {
                nested = true;
                break;
            }
        }
        if (nested) continue;
        overlays.push_back(n.node_id);
        auto t = subtree_text(snapshot, n.node_id);
        if (t.empty()) continue;
        raw.push_back({n.node_id, std::move(t), CandidateSource::z_index, n.z_index, snapshot.position(n.node_id)});
        taken.insert(n.node_id);
    }

    std::vector<int> text_nodes;
    for (int id : snapshot.subtree(snapshot.body_id())) {
        if (id == snapshot.body_id()) continue;
        const auto& n = snapshot.node(id);
        if (n.visible && !n.own_text.empty()) text_nodes.push_back(id);
    }
    std::vector<int> edge;
    for (std::size_t i = 0; i < text_nodes.size() && i < 3; ++i) edge.push_back(text_nodes[i]);
    for (std::size_t i = text_nodes.size() > 3 ? text_nodes.size() - 3 : 0; i < text_nodes.size(); ++i) {
        if (std::find(edge.begin(), edge.end(), text_nodes[i]) == edge.end()) edge.push_back(text_nodes[i]);
    }
    for (int id : edge) {
        if (taken.contains(id)) continue;
        const auto& n = snapshot.node(id);
        raw.push_back({id, subtree_text(snapshot, id), CandidateSource::body_edge, n.z_index, snapshot.position(id)});
    }

    std::sort(raw.begin(), raw.end(), [](const Candidate& a, const Candidate& b) {
        if (a.z_index != b.z_index) return a.z_index > b.z_index;
        return a.position < b.position;
    });
    std::vector<Candidate> out;
    std::set<std::string> texts;
    for (auto& c : raw) {
        if (texts.insert(c.text).second) out.push_back(std::move(c));
    }
    return out;
}

void ClassifierModel::validate() const
{
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ModelError("threshold must be in (0, 1)");
    }
    if (kind == ModelKind::baseline_logistic) {
        if (!std::isfinite(bias)) throw ModelError("bias is not finite");
        for (const auto& [token, w] : vocabulary) {
            if (!std::isfinite(w)) throw ModelError("weight for '" + token + "' is not finite");
        }
    } else if (command.empty() && endpoint.empty()) {
        throw ModelError("external model needs a command or an endpoint");
    }
}

ClassifierModel model_from_json(const json& j, const std::filesystem::path& base_dir)
{
    ClassifierModel m;
    try {
        const auto kind = j.at("model_kind").get<std::string>();
        if (kind == "baseline_logistic") {
            m.kind = ModelKind::baseline_logistic;
            m.bias = j.at("bias").get<double>();
            for (const auto& [token, w] : j.at("vocabulary").items()) {
                m.vocabulary[text::to_lower_utf8(token)] = w.get<double>();
            }
        } else if (kind == "external") {
            m.kind = ModelKind::external;
            if (j.contains("command")) {
                const auto& c = j.at("command");
                m.command = c.is_string() ? std::vector<std::string>{c.get<std::string>()}
                                          : c.get<std::vector<std::string>>();
            }
            m.endpoint = j.value("endpoint", "");
        } else {
            throw ModelError("unknown model_kind: " + kind);
        }
        m.version = j.value("version", "");
        m.threshold = j.value("threshold", 0.5);
    } catch (const json::exception& e) {
        throw ModelError(std::string("invalid model file: ") + e.what());
    }
    m.base_dir = base_dir;
    m.validate();
    return m;
}

json model_to_json(const ClassifierModel& m)
{
    json j = {{"version", m.version}, {"threshold", m.threshold}};
    if (m.kind == ModelKind::baseline_logistic) {
        j["model_kind"] = "baseline_logistic";
        j["bias"] = m.bias;
        j["vocabulary"] = m.vocabulary;
    } else {
        j["model_kind"] = "external";
        if (!m.command.empty()) j["command"] = m.command;
        if (!m.endpoint.empty()) j["endpoint"] = m.endpoint;
    }
    return j;
}

ClassifierModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ModelError("cannot open model file " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ModelError("model file " + path.string() + " is not JSON: " + e.what());
    }
    return model_from_json(j, path.parent_path());
}

double classify_baseline(const ClassifierModel& model, std::string_view input)
{
    const auto tokens = text::word_tokens(input);
    const std::set<std::string> unique(tokens.begin(), tokens.end());
    double z = model.bias;
    for (const auto& t : unique) {
        auto it = model.vocabulary.find(t);
        if (it != model.vocabulary.end()) z += it->second;
    }
    return 1.0 / (1.0 + std::exp(-z));
}

std::string encode_request_line(const std::string& input)
{
    return json(input).dump(-1, ' ', false, json::error_handler_t::replace);
}

double parse_score_line(const std::string& line)
{
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(line, &used);
    } catch (const std::exception&) {
        throw ModelError("external model returned a non-numeric line: '" + line + "'");
    }
    if (line.find_first_not_of(" \t\r", used) != std::string::npos || !(v >= 0.0 && v <= 1.0)) {
        throw ModelError("external model returned an invalid score: '" + line + "'");
    }
    return v;
}

namespace {

class BaselineClassifier final : public Classifier {
public:
    explicit BaselineClassifier(ClassifierModel m) : model_(std::move(m)) {}
    double score(const std::string& t) override { return classify_baseline(model_, t); }
    double threshold() const override { return model_.threshold; }

private:
    ClassifierModel model_;
};

} // namespace

std::unique_ptr<Classifier> make_classifier(const ClassifierModel& model)
{
    model.validate();
    if (model.kind == ModelKind::baseline_logistic) {
        return std::make_unique<BaselineClassifier>(model);
    }
    return make_external_classifier(model);
}

std::optional<DetectionResult> detect_textclass(const PageSnapshot& snapshot, Classifier& classifier)
{
    for (const auto& c : extract_candidates(snapshot)) {
        const double s = classifier.score(c.text);
        if (s >= classifier.threshold()) {
            return make_detection(snapshot, Method::textclass, c.node_id, s);
        }
    }
    return std::nullopt;
}

} // namespace consentscan::textclass
