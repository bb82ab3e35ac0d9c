#include "consentscan/detection.hpp"

#include <nlohmann/json.hpp>

#include "consentscan/language.hpp"

namespace consentscan {

using nlohmann::json;

std::string to_string(Method m)
{
    switch (m) {
    case Method::domwalk: return "domwalk";
    case Method::perceptive: return "perceptive";
    case Method::filterlist: return "filterlist";
    case Method::textclass: return "textclass";
    }
    return "domwalk";
}

Method parse_method(const std::string& s)
{
    if (s == "domwalk") return Method::domwalk;
    if (s == "perceptive") return Method::perceptive;
    if (s == "filterlist") return Method::filterlist;
    if (s == "textclass") return Method::textclass;
    throw std::invalid_argument("unknown method: " + s);
}

DetectionResult make_detection(const PageSnapshot& snapshot, Method method, int node_id, double confidence)
{
    DetectionResult d;
    d.method = method;
    d.node_id = node_id;
    d.bbox = snapshot.node(node_id).bbox.intersection(snapshot.viewport().rect());
    d.notice_text = subtree_text(snapshot, node_id);
    d.language = textclass::detect_language(d.notice_text);
    d.confidence = confidence;
    return d;
}

json to_json(const DetectionResult& d)
{
    json j = {
        {"method", to_string(d.method)},
        {"node_id", d.node_id},
        {"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}},
        {"notice_text", d.notice_text},
        {"language", d.language},
        {"confidence", d.confidence},
    };
    if (!d.source.empty()) {
        j["source"] = d.source;
    }
    return j;
}

DetectionResult detection_from_json(const json& j)
{
    DetectionResult d;
    d.method = parse_method(j.at("method").get<std::string>());
    d.node_id = j.at("node_id").get<int>();
    const auto& b = j.at("bbox");
    d.bbox = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
    d.notice_text = j.at("notice_text").get<std::string>();
    d.language = j.value("language", "und");
    d.confidence = j.value("confidence", 1.0);
    d.source = j.value("source", "");
    return d;
}

} // namespace consentscan
