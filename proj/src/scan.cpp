#include "consentscan/scan.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "consentscan/language.hpp"
#include "consentscan/text.hpp"

namespace consentscan::scan {

using nlohmann::json;

namespace {

const std::vector<std::pair<Stage, std::string>> stage_names = {
    {Stage::detect, "detect"},
    {Stage::interact, "interact"},
    {Stage::analyze, "analyze"},
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string save_shot(const std::filesystem::path& shots_dir, const std::string& name, const RgbImage& image)
{
    if (shots_dir.empty() || image.empty()) return {};
    write_png(shots_dir / name, image);
    return (shots_dir.filename() / name).generic_string();
}

} // namespace

std::string to_string(Stage s)
{
    for (const auto& [k, name] : stage_names) {
        if (k == s) return name;
    }
    return "detect";
}

std::set<Stage> parse_stages(const std::string& spec)
{
    if (spec == "all") return {Stage::detect, Stage::interact, Stage::analyze};
    std::set<Stage> out;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto comma = std::min(spec.find(',', start), spec.size());
        const auto name = spec.substr(start, comma - start);
        if (!name.empty()) {
            const auto it = std::find_if(stage_names.begin(), stage_names.end(),
                                         [&](const auto& p) { return p.second == name; });
            if (it == stage_names.end()) throw ConfigError("unknown stage: " + name);
            out.insert(it->first);
        }
        start = comma + 1;
    }
    return out;
}

void ScanJob::validate() const
{
    if (passes < 1) throw ConfigError("passes must be at least 1");
    if (workers < 1) throw ConfigError("workers must be at least 1");
    if (recycle_after < 1) throw ConfigError("recycle_after must be at least 1");
    if (!stages.contains(Stage::detect)) throw ConfigError("the detect stage is required");
    if (stages.contains(Stage::analyze) && !stages.contains(Stage::interact)) {
        throw ConfigError("the analyze stage needs the interact stage");
    }
    if (output_dir.empty()) throw ConfigError("output directory is required");
    if (!(analysis.ssim_threshold >= -1.0 && analysis.ssim_threshold <= 1.0)) {
        throw ConfigError("ssim threshold must be in [-1, 1]");
    }
    if (!(analysis.color_distance >= 0.0)) throw ConfigError("color distance must be non-negative");
}

json to_json(const PageResult& r)
{
    json j = {
        {"url", r.url},
        {"pass", r.pass_index},
        {"status", r.error ? capture::to_string(r.error->kind) : "ok"},
    };
    if (r.error) {
        j["error_detail"] = r.error->detail;
    } else {
        j["screenshot"] = r.screenshot_ref;
        j["language"] = r.language;
        j.update(to_json(r.detections));
        json clickables = json::array();
        for (const auto& c : r.clickables) clickables.push_back(interaction::to_json(c));
        j["clickables"] = std::move(clickables);
        if (r.outcomes) {
            json outcomes = json::array();
            for (const auto& o : *r.outcomes) outcomes.push_back(interaction::to_json(o));
            j["outcomes"] = std::move(outcomes);
        }
        if (r.analysis) j["analysis"] = darkpattern::to_json(*r.analysis);
    }
    j["timings"] = {{"capture_s", r.timings.capture_s},
                    {"detect_s", r.timings.detect_s},
                    {"interact_s", r.timings.interact_s},
                    {"analyze_s", r.timings.analyze_s}};
    return j;
}

PageResult process_url(capture::BrowserSession& session, const std::string& url, int pass_index, const ScanJob& job,
                       const DetectorSuite& suite, const std::filesystem::path& shots_dir)
{
    PageResult r;
    r.url = url;
    r.pass_index = pass_index;
    const auto stem = url_key(url) + "-p" + std::to_string(pass_index);

    auto t0 = std::chrono::steady_clock::now();
    auto captured = session.capture_page(url);
    r.timings.capture_s = seconds_since(t0);
    if (auto* err = std::get_if<capture::CaptureError>(&captured)) {
        r.error = std::move(*err);
        return r;
    }
    const auto& snapshot = std::get<PageSnapshot>(captured);
    r.screenshot_ref = save_shot(shots_dir, stem + ".png", snapshot.screenshot());
    r.language = textclass::detect_language(visible_subtree_text(snapshot, snapshot.body_id()));

    t0 = std::chrono::steady_clock::now();
    r.detections = run_detectors(snapshot, suite);
    const auto* notice = r.detections.chosen_result();
    if (notice) r.clickables = interaction::extract_clickables(snapshot, notice->node_id);
    r.timings.detect_s = seconds_since(t0);

    if (job.stages.contains(Stage::interact)) {
        t0 = std::chrono::steady_clock::now();
        r.outcomes.emplace();
        if (notice) {
            *r.outcomes = interaction::interact_all(session, url, snapshot, r.clickables, suite, job.analysis.ssim);
            for (std::size_t i = 0; i < r.outcomes->size(); ++i) {
                auto& o = (*r.outcomes)[i];
                o.post_screenshot_ref =
                    save_shot(shots_dir, stem + "-c" + std::to_string(i) + ".png", o.post_screenshot);
            }
        }
        r.timings.interact_s = seconds_since(t0);
    }

    if (job.stages.contains(Stage::analyze) && notice) {
        t0 = std::chrono::steady_clock::now();
        r.analysis = darkpattern::analyze_notice(snapshot.screenshot(), notice->bbox, r.clickables, *r.outcomes,
                                                 job.analysis);
        // Dominant colors were filled into r.clickables; keep outcome copies in sync.
        for (auto& o : *r.outcomes) {
            for (const auto& c : r.clickables) {
                if (c.node_id == o.clickable.node_id) o.clickable.dominant_color = c.dominant_color;
            }
        }
        r.timings.analyze_s = seconds_since(t0);
    }
    return r;
}

std::string url_key(const std::string& url)
{
    return text::sha256_hex(url).substr(0, 16);
}

std::vector<std::string> pass_order(const std::vector<std::string>& urls, std::uint64_t seed, int pass_index)
{
    std::vector<std::string> order = urls;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(pass_index)};
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

int required_successes(int passes)
{
    return (2 * passes + 2) / 3;
}

long long ScanSummary::successful_urls() const
{
    return std::count_if(urls.begin(), urls.end(), [](const UrlSummary& u) { return u.successful; });
}

json to_json(const ScanSummary& s)
{
    json urls = json::array();
    for (const auto& u : s.urls) {
        urls.push_back({{"url", u.url},
                        {"successes", u.successes},
                        {"successful", u.successful},
                        {"errors", u.errors},
                        {"chosen_methods", u.chosen_methods}});
    }
    return {{"schema_version", 1},
            {"passes", s.passes},
            {"required_successes", s.required},
            {"page_results", s.page_results},
            {"urls_total", s.urls.size()},
            {"urls_successful", s.successful_urls()},
            {"urls", std::move(urls)}};
}

ScanSummary run_scan(const ScanJob& job, capture::BrowserFactory& browsers, const DetectorSuite& suite)
{
    job.validate();
    suite.validate();
    const auto shots_dir = job.output_dir / "shots";
    std::filesystem::create_directories(shots_dir);

    ScanSummary summary;
    summary.passes = job.passes;
    summary.required = required_successes(job.passes);
    std::map<std::string, std::size_t> index;
    for (const auto& u : job.urls) {
        if (!index.emplace(u, summary.urls.size()).second) continue;
        UrlSummary entry;
        entry.url = u;
        summary.urls.push_back(std::move(entry));
    }
    std::vector<std::string> unique_urls;
    for (const auto& u : summary.urls) unique_urls.push_back(u.url);

    struct Worker {
        std::unique_ptr<capture::BrowserSession> session;
        int pages = 0;
    };
    std::vector<Worker> workers(static_cast<std::size_t>(job.workers));
    std::mutex sink_mutex;
    const auto cancelled = [&] { return job.cancel && job.cancel->load(); };

    for (int pass = 1; pass <= job.passes && !cancelled(); ++pass) {
        const auto order = pass_order(unique_urls, job.seed, pass);
        std::ofstream sink(job.output_dir / ("pass-" + std::to_string(pass) + ".jsonl"), std::ios::binary);
        if (!sink) throw std::runtime_error("cannot write to " + job.output_dir.string());
        std::atomic<std::size_t> next{0};

        const auto work = [&](Worker& w) {
            while (!cancelled()) {
                const auto i = next.fetch_add(1);
                if (i >= order.size()) return;
                const auto& url = order[i];
                PageResult r;
                try {
                    if (!w.session || w.pages >= job.recycle_after) {
                        w.session.reset();
                        w.session = browsers.create();
                        w.pages = 0;
                    }
                    ++w.pages;
                    r = process_url(*w.session, url, pass, job, suite, shots_dir);
                } catch (const std::exception& e) {
                    spdlog::warn("{} (pass {}): {}", url, pass, e.what());
                    w.session.reset();
                    r = PageResult{};
                    r.url = url;
                    r.pass_index = pass;
                    r.error = capture::CaptureError{capture::CaptureErrorKind::scanner_failure, e.what()};
                }
                const auto line = to_json(r).dump();
                std::lock_guard lock(sink_mutex);
                sink << line << '\n';
                sink.flush();
                auto& u = summary.urls[index.at(url)];
                ++summary.page_results;
                if (r.error) {
                    u.errors.push_back(capture::to_string(r.error->kind));
                } else {
                    ++u.successes;
                    u.chosen_methods.push_back(r.detections.chosen ? to_string(*r.detections.chosen) : "none");
                }
            }
        };

        if (job.workers == 1) {
            work(workers[0]);
        } else {
            std::vector<std::thread> threads;
            for (auto& w : workers) threads.emplace_back(work, std::ref(w));
            for (auto& t : threads) t.join();
        }
        spdlog::info("pass {}/{} done", pass, job.passes);
    }

    for (auto& u : summary.urls) u.successful = u.successes >= summary.required;
    std::ofstream(job.output_dir / "summary.json", std::ios::binary) << to_json(summary).dump(2) << '\n';
    return summary;
}

std::vector<std::string> read_url_list(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open url list " + path.string());
    std::vector<std::string> urls;
    std::string line;
    while (std::getline(in, line)) {
        line = text::normalize_whitespace(line);
        if (line.empty() || line[0] == '#') continue;
        urls.push_back(line);
    }
    if (urls.empty()) throw ConfigError("url list is empty: " + path.string());
    return urls;
}

} // namespace consentscan::scan
