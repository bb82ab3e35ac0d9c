#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "consentscan/css.hpp"
#include "consentscan/detection.hpp"
#include "consentscan/snapshot.hpp"

namespace consentscan::filterlist {

struct CosmeticRule {
    /// Domain patterns as written; "~" marks an excluded domain. Empty for generic rules.
    std::vector<std::string> domains;
    std::string selector;
    css::Selector parsed;
    bool is_exception = false;

    /// True when the rule's domain scope covers `host`.
    bool applies_to(const std::string& host) const;
};

struct RuleSet {
    std::string source_name;
    /// Rules without an included domain (exclusions only, or no domains at all).
    std::vector<CosmeticRule> generic;
    /// Rules keyed by each included domain pattern.
    std::map<std::string, std::vector<CosmeticRule>> specific;
    std::size_t rule_count = 0;

    std::size_t skipped_network = 0;
    std::size_t skipped_comments = 0;
    /// Cosmetic rules whose selector is malformed or outside the supported grammar.
    std::size_t skipped_unsupported = 0;
    /// Extended syntaxes such as "#?#" and "#$#".
    std::size_t skipped_extended = 0;
};

/// Parses Adblock-format text. Never throws: unusable lines are counted and skipped.
RuleSet parse_filter_list(const std::string& text, const std::string& source_name);
/// Reads a list file; the source name defaults to the file stem. Throws std::runtime_error on I/O failure.
RuleSet load_filter_list(const std::filesystem::path& path, const std::string& source_name = "");

/// Non-exception rules applicable to `host` (generic plus those keyed by the host
/// or a parent domain), minus rules cancelled by an applicable exception with the
/// same selector.
std::vector<const CosmeticRule*> applicable_rules(const RuleSet& rules, const std::string& host);

/// Largest visible node matched by any applicable rule; ties keep document order.
std::optional<DetectionResult> detect_filterlist(const PageSnapshot& snapshot, const RuleSet& rules,
                                                 const std::string& page_host);

/// Same over several lists; `source` names the first list that matched the chosen node.
std::optional<DetectionResult> detect_filterlist(const PageSnapshot& snapshot, const std::vector<RuleSet>& lists,
                                                 const std::string& page_host);

} // namespace consentscan::filterlist
