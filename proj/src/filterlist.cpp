#include "consentscan/filterlist.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "consentscan/domain.hpp"

namespace consentscan::filterlist {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s)
{
    for (auto& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

std::vector<std::string> split_domains(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string part;
    while (std::getline(in, part, ',')) {
        part = lower(trim(part));
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

} // namespace

bool CosmeticRule::applies_to(const std::string& host) const
{
    bool has_include = false;
    bool included = false;
    for (const auto& d : domains) {
        if (d[0] == '~') {
            if (domain_matches(host, d.substr(1))) return false;
        } else {
            has_include = true;
            included = included || domain_matches(host, d);
        }
    }
    return !has_include || included;
}

RuleSet parse_filter_list(const std::string& text, const std::string& source_name)
{
    RuleSet rs;
    rs.source_name = source_name;
    std::stringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        const auto line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '!' || line[0] == '[') {
            ++rs.skipped_comments;
            continue;
        }
        if (line.find("#?#") != std::string::npos || line.find("#$#") != std::string::npos ||
            line.find("#@?#") != std::string::npos || line.find("#@$#") != std::string::npos) {
            ++rs.skipped_extended;
            continue;
        }
        CosmeticRule rule;
        std::size_t sep = line.find("#@#");
        std::size_t sep_len = 3;
        if (sep != std::string::npos) {
            rule.is_exception = true;
        } else {
            sep = line.find("##");
            sep_len = 2;
        }
        if (sep == std::string::npos) {
            ++rs.skipped_network;
            continue;
        }
        rule.domains = split_domains(line.substr(0, sep));
        rule.selector = trim(line.substr(sep + sep_len));
        try {
            rule.parsed = css::parse(rule.selector);
        } catch (const css::UnsupportedSelector& e) {
            ++rs.skipped_unsupported;
            spdlog::debug("{}: skipping rule '{}': {}", source_name, line, e.what());
            continue;
        }
        std::vector<std::string> includes;
        for (const auto& d : rule.domains) {
            if (d[0] != '~') includes.push_back(d);
        }
        if (includes.empty()) {
            rs.generic.push_back(std::move(rule));
            ++rs.rule_count;
        } else {
            for (const auto& d : includes) {
                rs.specific[d].push_back(rule);
                ++rs.rule_count;
            }
        }
    }
    if (rs.skipped_unsupported > 0) {
        spdlog::warn("{}: skipped {} cosmetic rules with unsupported selectors", source_name, rs.skipped_unsupported);
    }
    return rs;
}

RuleSet load_filter_list(const std::filesystem::path& path, const std::string& source_name)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open filter list " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_filter_list(buf.str(), source_name.empty() ? path.stem().string() : source_name);
}

std::vector<const CosmeticRule*> applicable_rules(const RuleSet& rules, const std::string& host)
{
    std::vector<const CosmeticRule*> candidates;
    for (const auto& r : rules.generic) {
        if (r.applies_to(host)) candidates.push_back(&r);
    }
    for (const auto& d : domain_chain(host)) {
        auto it = rules.specific.find(d);
        if (it == rules.specific.end()) continue;
        for (const auto& r : it->second) {
            if (r.applies_to(host)) candidates.push_back(&r);
        }
    }
    std::set<std::string> cancelled;
    for (const auto* r : candidates) {
        if (r->is_exception) cancelled.insert(r->selector);
    }
    std::vector<const CosmeticRule*> out;
    std::set<const CosmeticRule*> seen;
    for (const auto* r : candidates) {
        if (r->is_exception || cancelled.contains(r->selector)) continue;
        if (seen.insert(r).second) out.push_back(r);
    }
    return out;
}

namespace {

struct Match {
    int node_id = -1;
    double area = -1;
    std::size_t position = 0;
    std::string source;
};

void collect_best(const PageSnapshot& snapshot, const RuleSet& rules, const std::string& host, Match& best)
{
    for (const auto* r : applicable_rules(rules, host)) {
        for (int id : css::match_all(snapshot, r->parsed)) {
            const auto& n = snapshot.node(id);
            if (!n.visible) continue;
            const double area = n.bbox.area();
            const auto pos = snapshot.position(id);
            if (area > best.area || (area == best.area && pos < best.position)) {
                best = {id, area, pos, rules.source_name};
            }
        }
    }
}

std::optional<DetectionResult> to_result(const PageSnapshot& snapshot, const Match& best)
{
    if (best.node_id < 0 || best.area <= 0) {
        return std::nullopt;
    }
    auto d = make_detection(snapshot, Method::filterlist, best.node_id, 1.0);
    d.source = best.source;
    return d;
}

} // namespace

std::optional<DetectionResult> detect_filterlist(const PageSnapshot& snapshot, const RuleSet& rules,
                                                 const std::string& page_host)
{
    Match best;
    collect_best(snapshot, rules, page_host, best);
    return to_result(snapshot, best);
}

std::optional<DetectionResult> detect_filterlist(const PageSnapshot& snapshot, const std::vector<RuleSet>& lists,
                                                 const std::string& page_host)
{
    Match best;
    for (const auto& rules : lists) {
        collect_best(snapshot, rules, page_host, best);
    }
    return to_result(snapshot, best);
}

} // namespace consentscan::filterlist
