#include "consentscan/domwalk.hpp"

#include <fstream>
#include <stdexcept>

#include "consentscan/clickables.hpp"
#include "consentscan/text.hpp"

namespace consentscan::domwalk {

KeywordConfig KeywordConfig::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open keyword file " + path.string());
    }
    KeywordConfig cfg;
    cfg.keywords.clear();
    std::string line;
    while (std::getline(in, line)) {
        line = text::normalize_whitespace(line);
        if (line.empty() || line[0] == '#') continue;
        cfg.keywords.push_back(line);
    }
    cfg.validate();
    return cfg;
}

void KeywordConfig::validate()
{
    if (keywords.empty()) {
        throw std::invalid_argument("keyword list is empty");
    }
    for (auto& k : keywords) {
        if (k.empty()) {
            throw std::invalid_argument("empty keyword");
        }
        k = text::to_lower_utf8(k);
    }
}

std::vector<KeywordHit> find_keyword_hits(const PageSnapshot& snapshot, const KeywordConfig& kw)
{
    const auto viewport = snapshot.viewport().rect();
    std::vector<KeywordHit> hits;
    for (const auto& n : snapshot.nodes()) {
        if (!n.visible || n.own_text.empty()) continue;
        const auto visible_part = n.bbox.intersection(viewport);
        if (visible_part.empty()) continue;
        const auto folded = text::to_lower_utf8(n.own_text);
        bool match = false;
        for (const auto& k : kw.keywords) {
            if (folded.find(text::to_lower_utf8(k)) != std::string::npos) {
                match = true;
                break;
            }
        }
        if (!match) continue;
        const auto c = visible_part.center();
        hits.push_back({n.node_id, text::word_count(subtree_text(snapshot, n.node_id)), c.x, c.y});
    }
    return hits;
}

std::optional<KeywordHit> select_longest_hit(const std::vector<KeywordHit>& hits)
{
    std::optional<KeywordHit> best;
    for (const auto& h : hits) {
        if (!best || h.word_count > best->word_count ||
            (h.word_count == best->word_count && h.node_id < best->node_id)) {
            best = h;
        }
    }
    return best;
}

int walk_up(const PageSnapshot& snapshot, int start_node)
{
    const auto& start = snapshot.node(start_node);
    if (start.tag == "body" || start.tag == "html" || !start.parent_id) {
        throw std::invalid_argument("walk_up must not start at body/html");
    }
    int current = start_node;
    while (true) {
        if (interaction::subtree_has_button(snapshot, current)) {
            return current;
        }
        const auto parent = snapshot.node(current).parent_id;
        if (!parent || *parent == snapshot.body_id() || snapshot.node(*parent).tag == "html") {
            return current;
        }
        current = *parent;
    }
}

std::optional<DetectionResult> detect_domwalk(const PageSnapshot& snapshot, const KeywordConfig& kw)
{
    const auto hit = select_longest_hit(find_keyword_hits(snapshot, kw));
    if (!hit) {
        return std::nullopt;
    }
    const auto& start = snapshot.node(hit->node_id);
    if (start.tag == "body" || start.tag == "html") {
        return std::nullopt; // keyword text sits directly in body
    }
    const int node = walk_up(snapshot, hit->node_id);
    if (snapshot.node(node).bbox.area() == 0) {
        return std::nullopt;
    }
    return make_detection(snapshot, Method::domwalk, node, 1.0);
}

} // namespace consentscan::domwalk
