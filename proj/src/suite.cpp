#include "consentscan/suite.hpp"

#include <nlohmann/json.hpp>

#include "consentscan/domain.hpp"

namespace consentscan::scan {

using nlohmann::json;

std::set<Method> all_methods()
{
    return {priority_chain.begin(), priority_chain.end()};
}

std::set<Method> parse_methods(const std::string& spec)
{
    if (spec == "all") return all_methods();
    std::set<Method> out;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto comma = std::min(spec.find(',', start), spec.size());
        const auto name = spec.substr(start, comma - start);
        if (!name.empty()) {
            try {
                out.insert(parse_method(name));
            } catch (const std::exception&) {
                throw ConfigError("unknown detection method: " + name);
            }
        }
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("no detection method selected");
    return out;
}

void DetectorSuite::validate() const
{
    if (methods.empty()) throw ConfigError("no detection method selected");
    if (methods.contains(Method::filterlist) && lists.empty()) {
        throw ConfigError("filterlist detection needs at least one filter list");
    }
    if (methods.contains(Method::textclass) && !classifier) {
        throw ConfigError("textclass detection needs a classifier model");
    }
    perceptive.validate();
}

const DetectionResult* Detections::chosen_result() const
{
    if (!chosen) return nullptr;
    const auto it = per_method.find(*chosen);
    return it != per_method.end() && it->second ? &*it->second : nullptr;
}

std::optional<DetectionResult> run_method(Method m, const PageSnapshot& snapshot, const DetectorSuite& suite)
{
    switch (m) {
    case Method::domwalk: return domwalk::detect_domwalk(snapshot, suite.keywords);
    case Method::perceptive: return perceptive::detect_perceptive(snapshot, suite.keywords, suite.perceptive);
    case Method::filterlist: return filterlist::detect_filterlist(snapshot, suite.lists, host_of(snapshot.url()));
    case Method::textclass: return textclass::detect_textclass(snapshot, *suite.classifier);
    }
    return std::nullopt;
}

Detections run_detectors(const PageSnapshot& snapshot, const DetectorSuite& suite)
{
    Detections d;
    for (Method m : priority_chain) {
        if (!suite.methods.contains(m)) continue;
        d.per_method[m] = run_method(m, snapshot, suite);
        if (!d.chosen && d.per_method[m]) d.chosen = m;
    }
    return d;
}

std::optional<DetectionResult> detect_first(const PageSnapshot& snapshot, const DetectorSuite& suite)
{
    for (Method m : priority_chain) {
        if (!suite.methods.contains(m)) continue;
        if (auto r = run_method(m, snapshot, suite)) return r;
    }
    return std::nullopt;
}

json to_json(const Detections& d)
{
    json methods = json::object();
    for (Method m : priority_chain) {
        const auto it = d.per_method.find(m);
        if (it == d.per_method.end()) continue;
        methods[to_string(m)] = it->second ? to_json(*it->second) : json(nullptr);
    }
    return {{"methods", std::move(methods)}, {"chosen_method", d.chosen ? json(to_string(*d.chosen)) : json(nullptr)}};
}

json detect_offline(const PageSnapshot& snapshot, const DetectorSuite& suite)
{
    suite.validate();
    const auto d = run_detectors(snapshot, suite);
    json out = {{"schema_version", 1}, {"url", snapshot.url()}, {"fetched_at", format_timestamp(snapshot.fetched_at())}};
    out.update(to_json(d));
    return out;
}

json detect_offline(const std::filesystem::path& snapshot_path, const DetectorSuite& suite)
{
    suite.validate();
    return detect_offline(deserialize_snapshot(snapshot_path), suite);
}

} // namespace consentscan::scan
