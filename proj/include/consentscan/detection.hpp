#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/geometry.hpp"
#include "consentscan/snapshot.hpp"

namespace consentscan {

enum class Method { domwalk, perceptive, filterlist, textclass };

std::string to_string(Method m);
Method parse_method(const std::string& s);

/// A detector's claim that `node_id` is the consent notice.
struct DetectionResult {
    Method method = Method::domwalk;
    int node_id = 0;
    Rect bbox;               // clipped to the viewport
    std::string notice_text; // subtree_text(node_id)
    std::string language = "und";
    double confidence = 1.0;
    std::string source; // filter list name for Method::filterlist, otherwise empty

    friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

/// Fills bbox, notice_text and language for `node_id` from the snapshot.
DetectionResult make_detection(const PageSnapshot& snapshot, Method method, int node_id, double confidence);

nlohmann::json to_json(const DetectionResult& d);
DetectionResult detection_from_json(const nlohmann::json& j);

} // namespace consentscan
