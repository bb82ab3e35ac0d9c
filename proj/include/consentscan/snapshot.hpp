#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/geometry.hpp"
#include "consentscan/image.hpp"

namespace consentscan {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(const std::string& iso);

enum class Phase { initial_load, post_click };

std::string to_string(Phase p);
Phase parse_phase(const std::string& s);

struct Viewport {
    int width_px = 1920;
    int height_px = 1080;

    Rect rect() const { return {0, 0, double(width_px), double(height_px)}; }
    friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct DomNode {
    int node_id = 0;
    std::optional<int> parent_id;
    std::string tag;
    std::map<std::string, std::string> attributes;
    std::string own_text;
    Rect bbox;
    int z_index = 0;
    bool visible = false;
    std::string cursor_style = "auto";

    const std::string* attribute(const std::string& name) const
    {
        auto it = attributes.find(name);
        return it == attributes.end() ? nullptr : &it->second;
    }

    friend bool operator==(const DomNode&, const DomNode&) = default;
};

struct CookieRecord {
    std::string name;
    std::string value;
    std::string domain;
    std::string path = "/";
    std::optional<Timestamp> expires;
    Phase set_at_phase = Phase::initial_load;

    friend bool operator==(const CookieRecord&, const CookieRecord&) = default;
};

struct RequestRecord {
    std::string url;
    std::string method = "GET";
    Phase phase = Phase::initial_load;
    bool is_third_party = false;

    friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw snapshot fields, before validation and indexing.
struct SnapshotData {
    std::string url;
    Timestamp fetched_at{};
    Viewport viewport;
    std::vector<DomNode> nodes;
    RgbImage screenshot;
    std::vector<CookieRecord> cookies;
    std::vector<RequestRecord> requests;
};

/// Immutable page capture consumed by all offline detectors.
///
/// Nodes are kept in document order with the root at index 0. Construction
/// validates the structural invariants (unique ids, parents precede children,
/// a single body, screenshot matching the viewport, zero-area nodes invisible)
/// and throws SnapshotError on violation.
class PageSnapshot {
public:
    explicit PageSnapshot(SnapshotData data);

    const std::string& url() const { return data_.url; }
    Timestamp fetched_at() const { return data_.fetched_at; }
    const Viewport& viewport() const { return data_.viewport; }
    const std::vector<DomNode>& nodes() const { return data_.nodes; }
    const RgbImage& screenshot() const { return data_.screenshot; }
    const std::vector<CookieRecord>& cookies() const { return data_.cookies; }
    const std::vector<RequestRecord>& requests() const { return data_.requests; }
    const SnapshotData& data() const { return data_; }

    bool has_node(int node_id) const { return index_.contains(node_id); }
    /// Throws SnapshotError for unknown ids.
    const DomNode& node(int node_id) const;
    /// Position of the node in document order.
    std::size_t position(int node_id) const;
    const std::vector<int>& children(int node_id) const;
    /// Number of ancestors (root has depth 0).
    int depth(int node_id) const;
    std::optional<int> parent(int node_id) const { return node(node_id).parent_id; }
    bool is_ancestor(int ancestor, int node_id) const;
    /// Node ids of the subtree rooted at node_id, in document order, including the root.
    std::vector<int> subtree(int node_id) const;

    int body_id() const { return body_id_; }
    int root_id() const { return data_.nodes.front().node_id; }

    friend bool operator==(const PageSnapshot& a, const PageSnapshot& b);

private:
    void collect(int node_id, std::vector<int>& out) const;

    SnapshotData data_;
    std::unordered_map<int, std::size_t> index_;
    std::vector<std::vector<int>> children_;
    std::vector<int> depth_;
    int body_id_ = -1;
};

/// Concatenated own_text of the node and its descendants in document order,
/// single-space separated and trimmed. Throws SnapshotError for unknown ids.
std::string subtree_text(const PageSnapshot& snapshot, int node_id);

/// Same, restricted to visible nodes (what a user would read).
std::string visible_subtree_text(const PageSnapshot& snapshot, int node_id);

/// Topmost visible node containing (x, y), ranked by (z_index, depth, document order).
/// Throws SnapshotError when the point lies outside the viewport.
std::optional<int> node_at_point(const PageSnapshot& snapshot, double x, double y);

inline constexpr int snapshot_schema_version = 1;

nlohmann::json to_json(const CookieRecord& c);
CookieRecord cookie_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RequestRecord& r);
RequestRecord request_from_json(const nlohmann::json& j);

nlohmann::json snapshot_to_json(const PageSnapshot& snapshot, const std::string& screenshot_ref);
/// Builds a snapshot from JSON; `screenshot` is supplied separately (sidecar image).
PageSnapshot snapshot_from_json(const nlohmann::json& doc, RgbImage screenshot);

/// Writes `<path>` (JSON) and a PNG sidecar next to it; returns the sidecar path.
std::filesystem::path serialize_snapshot(const PageSnapshot& snapshot, const std::filesystem::path& json_path);
/// Reads a snapshot written by serialize_snapshot. Throws SnapshotError on schema mismatch.
PageSnapshot deserialize_snapshot(const std::filesystem::path& json_path);

} // namespace consentscan
