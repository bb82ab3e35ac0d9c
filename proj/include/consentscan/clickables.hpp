#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/image.hpp"
#include "consentscan/snapshot.hpp"

namespace consentscan::interaction {

enum class ClickableKind { button, link, checkbox };

std::string to_string(ClickableKind k);
ClickableKind parse_clickable_kind(const std::string& s);

/// An interactive element inside a notice.
struct Clickable {
    int node_id = 0;
    ClickableKind kind = ClickableKind::button;
    std::string text;
    Rect bbox;
    std::optional<bool> checked;            // checkboxes only
    std::optional<std::string> href_target; // links only
    std::optional<Rgb> dominant_color;      // filled during analysis

    friend bool operator==(const Clickable&, const Clickable&) = default;
};

struct ClickableClass {
    ClickableKind kind = ClickableKind::button;
    std::optional<bool> checked;
    std::optional<std::string> href_target;
};

/// True for elements a user can click: pointer cursor, or a button/anchor/clickable input tag.
bool is_clickable(const DomNode& node);

/// Checkbox if the node or a descendant carries `checked`/`aria-checked` (or is a
/// checkbox/radio input); otherwise link if it carries an href that leads to a
/// different document; otherwise button.
ClickableClass classify_clickable(const PageSnapshot& snapshot, int node_id);

/// Visible clickable descendants of the notice, deduplicated to the outermost
/// clickable and ordered by document position.
std::vector<Clickable> extract_clickables(const PageSnapshot& snapshot, int notice_node);

/// True when the subtree of `node_id` (inclusive) holds a visible clickable classified as a button.
bool subtree_has_button(const PageSnapshot& snapshot, int node_id);

/// First node (document order) in the notice subtree whose normalized visible
/// text equals `text` exactly.
std::optional<int> find_clickable_by_text(const PageSnapshot& snapshot, int notice_node, const std::string& text);

/// Resolves `href` against `base` (absolute, scheme-relative, root-relative, relative forms).
std::string resolve_url(const std::string& base, const std::string& href);

nlohmann::json to_json(const Clickable& c);
Clickable clickable_from_json(const nlohmann::json& j);

} // namespace consentscan::interaction
