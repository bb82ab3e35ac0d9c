#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "consentscan/detection.hpp"
#include "consentscan/snapshot.hpp"

namespace consentscan::domwalk {

struct KeywordConfig {
    std::vector<std::string> keywords{"cookie"};

    /// One keyword per line; blank lines and lines starting with '#' are ignored.
    static KeywordConfig from_file(const std::filesystem::path& path);
    /// Lowercases entries and throws std::invalid_argument if the list or any entry is empty.
    void validate();
};

struct KeywordHit {
    int node_id = 0;
    std::size_t word_count = 0;
    /// Center of the node's visible part (its bbox clipped to the viewport).
    double x = 0;
    double y = 0;

    friend bool operator==(const KeywordHit&, const KeywordHit&) = default;
};

/// Visible nodes whose own text contains a keyword (case-insensitive substring)
/// and whose bbox is not entirely outside the viewport. Document order.
std::vector<KeywordHit> find_keyword_hits(const PageSnapshot& snapshot, const KeywordConfig& kw);

/// The hit with the most words; ties go to the smaller node id.
std::optional<KeywordHit> select_longest_hit(const std::vector<KeywordHit>& hits);

/// Ascends from start_node until the current subtree holds a button or the
/// parent is body. Never returns body or html; throws std::invalid_argument
/// when started there.
int walk_up(const PageSnapshot& snapshot, int start_node);

std::optional<DetectionResult> detect_domwalk(const PageSnapshot& snapshot, const KeywordConfig& kw);

} // namespace consentscan::domwalk
