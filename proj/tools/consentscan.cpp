// Command-line front end: scan, detect, eval, fixtures, lists.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "consentscan/chrome.hpp"
#include "consentscan/evaluation.hpp"
#include "consentscan/fixture_server.hpp"
#include "consentscan/fixtures.hpp"
#include "consentscan/http_client.hpp"
#include "consentscan/scan.hpp"
#include "consentscan/suite.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace consentscan;

namespace {

std::atomic<bool> interrupted{false};

fs::path data_dir()
{
    if (const char* env = std::getenv("CONSENTSCAN_DATA"); env && *env) return env;
    return CONSENTSCAN_DEFAULT_DATA;
}

struct SuiteOptions {
    std::string methods = "all";
    std::vector<std::string> lists;
    std::string model;
    std::string keywords;
    std::string contour_strategy = "smallest";
    int threshold = 10;

    void add_to(CLI::App& app)
    {
        app.add_option("--methods", methods, "Detection methods: all or a comma list of "
                                             "domwalk,perceptive,filterlist,textclass")
            ->capture_default_str();
        app.add_option("--lists", lists, "Filter list files (default: bundled lists)");
        app.add_option("--model", model, "Classifier model file (default: bundled baseline)");
        app.add_option("--keywords", keywords, "Keyword file, one per line (default: cookie)");
        app.add_option("--contour-strategy", contour_strategy, "Perceptive contour choice: smallest or largest")
            ->capture_default_str();
        app.add_option("--threshold", threshold, "Perceptive binarization threshold")->capture_default_str();
    }

    scan::DetectorSuite build() const
    {
        scan::DetectorSuite suite;
        suite.methods = scan::parse_methods(methods);
        if (!keywords.empty()) suite.keywords = domwalk::KeywordConfig::from_file(keywords);
        suite.perceptive.contour_strategy = perceptive::parse_contour_strategy(contour_strategy);
        suite.perceptive.threshold = threshold;
        if (suite.methods.contains(Method::filterlist)) {
            std::vector<fs::path> paths(lists.begin(), lists.end());
            if (paths.empty()) {
                for (const auto& e : fs::directory_iterator(data_dir() / "filterlists")) {
                    if (e.path().extension() == ".txt") paths.push_back(e.path());
                }
                std::sort(paths.begin(), paths.end());
            }
            for (const auto& p : paths) suite.lists.push_back(filterlist::load_filter_list(p));
        }
        if (suite.methods.contains(Method::textclass)) {
            const fs::path path = model.empty() ? data_dir() / "models" / "baseline-en.json" : fs::path(model);
            suite.classifier = textclass::make_classifier(textclass::load_model(path));
        }
        suite.validate();
        return suite;
    }
};

void write_text(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

// ---- scan ----

struct ScanOptions {
    std::string urls;
    std::string out;
    int workers = 1;
    int passes = 3;
    std::string stages = "all";
    std::uint64_t seed = 0;
    std::string browser;
    bool simulate = false;
    std::string fixtures;
    double settle_wait = 5;
    double page_timeout = 60;
    std::string viewport = "1920x1080";
    std::string user_agent;
    bool no_suppress_media = false;
    int recycle_after = 25;
    double ssim_threshold = 0.99;
    double color_distance = 32;
    SuiteOptions suite;
};

capture::CaptureConfig capture_config(const ScanOptions& o)
{
    capture::CaptureConfig c;
    c.settle_wait = std::chrono::milliseconds(static_cast<long long>(o.settle_wait * 1000));
    c.page_timeout = std::chrono::milliseconds(static_cast<long long>(o.page_timeout * 1000));
    int w = 0, h = 0;
    if (std::sscanf(o.viewport.c_str(), "%dx%d", &w, &h) != 2) {
        throw scan::ConfigError("viewport must look like 1920x1080");
    }
    c.viewport = {w, h};
    if (!o.user_agent.empty()) c.user_agent = o.user_agent;
    c.suppress_media = !o.no_suppress_media;
    c.recycle_after = o.recycle_after;
    c.validate();
    return c;
}

int run_scan_command(const ScanOptions& o)
{
    scan::ScanJob job;
    job.urls = scan::read_url_list(o.urls);
    job.output_dir = o.out;
    job.workers = o.workers;
    job.passes = o.passes;
    job.stages = scan::parse_stages(o.stages);
    job.seed = o.seed;
    job.recycle_after = o.recycle_after;
    job.analysis.ssim_threshold = o.ssim_threshold;
    job.analysis.color_distance = o.color_distance;
    job.cancel = &interrupted;
    job.validate();
    const auto suite = o.suite.build();
    const auto config = capture_config(o);

    std::unique_ptr<capture::BrowserFactory> factory;
    std::optional<fixtures::Corpus> corpus;
    if (o.simulate) {
        corpus = fixtures::Corpus::load(o.fixtures.empty() ? fixtures::default_fixture_dir() : fs::path(o.fixtures));
        fixtures::FixtureBrowser::Options opts;
        opts.page_timeout = config.page_timeout;
        factory = std::make_unique<fixtures::FixtureBrowserFactory>(*corpus, opts);
    } else {
        const auto browser = capture::find_browser(o.browser);
        if (browser.empty()) {
            throw scan::ConfigError("no browser found; pass --browser or set CONSENTSCAN_BROWSER");
        }
        factory = std::make_unique<capture::ChromeBrowserFactory>(browser, config);
    }

    fs::create_directories(job.output_dir);
    const auto summary = scan::run_scan(job, *factory, suite);
    std::cout << summary.successful_urls() << "/" << summary.urls.size() << " urls successful, "
              << summary.page_results << " page results in " << job.output_dir.string() << "\n";
    return interrupted ? 130 : 0;
}

// ---- detect ----

int run_detect_command(const std::string& snapshot, const std::string& out, const SuiteOptions& so)
{
    const auto suite = so.build();
    const auto result = scan::detect_offline(fs::path(snapshot), suite).dump(2) + "\n";
    if (out.empty()) {
        std::cout << result;
    } else {
        write_text(out, result);
    }
    return 0;
}

// ---- eval ----

struct EvalInputs {
    std::map<Method, evaluation::MethodResults> per_method;
    std::map<std::string, evaluation::DarkPatternObservation> darkpatterns;
};

void absorb_record(const json& j, int wanted_pass, EvalInputs& in, std::set<std::string>& seen)
{
    if (!j.contains("methods") || !j.contains("url")) return;
    if (j.value("status", "ok") != "ok") return;
    if (wanted_pass > 0 && j.value("pass", 0) != wanted_pass) return;
    const auto url = j.at("url").get<std::string>();
    if (!seen.insert(url).second) return; // first usable record per url wins
    for (const auto& [name, det] : j.at("methods").items()) {
        const auto m = parse_method(name);
        in.per_method[m][url] = det.is_null() ? std::nullopt : std::optional(detection_from_json(det));
    }
    if (j.contains("analysis") && !j.at("analysis").is_null()) {
        const auto& a = j.at("analysis");
        in.darkpatterns[url] = {a.value("decline_detected", false), a.value("color_diversion", false)};
    }
}

EvalInputs load_results(const fs::path& path, int wanted_pass)
{
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::directory_iterator(path)) {
            const auto ext = e.path().extension();
            if (ext == ".jsonl" || ext == ".json") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    EvalInputs in;
    std::set<std::string> seen;
    for (const auto& f : files) {
        std::ifstream is(f);
        if (f.extension() == ".jsonl") {
            std::string line;
            while (std::getline(is, line)) {
                if (!line.empty()) absorb_record(json::parse(line), wanted_pass, in, seen);
            }
        } else {
            absorb_record(json::parse(is), wanted_pass, in, seen);
        }
    }
    return in;
}

int run_eval_command(const std::string& gt_path, const std::string& results, const std::string& methods, double iou,
                     int pass, const std::string& json_out, const std::string& csv_out)
{
    const auto gt = evaluation::load_ground_truth(gt_path);
    const auto in = load_results(results, pass);
    std::vector<evaluation::EvalMetrics> rows;
    for (Method m : scan::priority_chain) {
        if (!scan::parse_methods(methods).contains(m)) continue;
        const auto it = in.per_method.find(m);
        rows.push_back(evaluation::evaluate_method(to_string(m), gt,
                                                   it == in.per_method.end() ? evaluation::MethodResults{} : it->second,
                                                   iou));
    }
    std::cout << evaluation::format_table(rows);
    const auto dp = evaluation::evaluate_darkpatterns(gt, in.darkpatterns);
    if (!in.darkpatterns.empty()) {
        std::cout << "\n" << evaluation::to_json(dp).dump(2) << "\n";
    }
    if (!json_out.empty()) {
        json j = {{"methods", json::array()}, {"darkpatterns", evaluation::to_json(dp)}};
        for (const auto& r : rows) j["methods"].push_back(evaluation::to_json(r));
        write_text(json_out, j.dump(2) + "\n");
    }
    if (!csv_out.empty()) write_text(csv_out, evaluation::format_csv(rows));
    return 0;
}

// ---- fixtures ----

std::string served_url(const std::string& base, const fixtures::Fixture& fx)
{
    auto b = base;
    while (!b.empty() && b.back() == '/') b.pop_back();
    return b + "/f/" + fx.id;
}

int run_fixtures_export(const std::string& dir, const std::string& out, const std::string& base_url)
{
    const auto corpus = fixtures::Corpus::load(dir.empty() ? fixtures::default_fixture_dir() : fs::path(dir));
    const fs::path out_dir = out.empty() ? corpus.dir() : fs::path(out);
    fixtures::export_corpus(corpus, out_dir);
    std::ofstream gt(out_dir / "ground-truth.jsonl", std::ios::binary);
    std::ofstream urls(out_dir / "urls.txt", std::ios::binary);
    for (const auto& fx : corpus.fixtures()) {
        auto truth = fixtures::truth_for(fx);
        if (!base_url.empty()) truth.url = served_url(base_url, fx);
        gt << evaluation::to_json(truth).dump() << "\n";
        urls << truth.url << "\n";
    }
    std::cout << "exported " << corpus.fixtures().size() << " fixtures to " << out_dir.string() << "\n";
    return 0;
}


int run_fixtures_serve(const std::string& dir, const std::string& host, int port)
{
    const auto corpus = fixtures::Corpus::load(dir.empty() ? fixtures::default_fixture_dir() : fs::path(dir));
    fixtures::FixtureServer server(corpus);
    const int bound = server.start(port, host);
    std::cout << "serving " << corpus.fixtures().size() << " fixtures at http://" << host << ":" << bound << "/f/<id>"
              << std::endl;
    while (!interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return 0;
}

int run_fixtures_list(const std::string& dir)
{
    const auto corpus = fixtures::Corpus::load(dir.empty() ? fixtures::default_fixture_dir() : fs::path(dir));
    for (const auto& fx : corpus.fixtures()) {
        std::cout << fx.id << "  " << fixtures::to_string(fx.behavior) << "  " << fx.url << "\n";
    }
    return 0;
}

// ---- lists ----

const std::map<std::string, std::string>& known_lists()
{
    static const std::map<std::string, std::string> lists = {
        {"easylist-cookie", "https://secure.fanboy.co.nz/fanboy-cookiemonster.txt"},
        {"idcac", "https://www.i-dont-care-about-cookies.eu/abp/"},
    };
    return lists;
}

int run_lists_fetch(const std::string& name, std::string url, const std::string& out)
{
    if (url.empty()) {
        const auto it = known_lists().find(name);
        if (it == known_lists().end()) throw scan::ConfigError("unknown list name: " + name);
        url = it->second;
    }
    const auto response = http::get(url);
    if (response.status != 200) {
        throw std::runtime_error("fetching " + url + " returned HTTP " + std::to_string(response.status));
    }
    const auto rules = filterlist::parse_filter_list(response.body, name);
    write_text(out, response.body);
    std::cout << "saved " << rules.rule_count << " cosmetic rules from " << url << " to " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    spdlog::set_default_logger(spdlog::stderr_color_mt("consentscan"));
    std::signal(SIGINT, [](int) { interrupted = true; });
    std::signal(SIGTERM, [](int) { interrupted = true; });

    CLI::App app{"Consent notice scanner"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    ScanOptions so;
    auto* scan_cmd = app.add_subcommand("scan", "Scan a list of urls with a headless browser");
    scan_cmd->add_option("--urls", so.urls, "File with one url per line")->required()->check(CLI::ExistingFile);
    scan_cmd->add_option("--out", so.out, "Output directory")->required();
    scan_cmd->add_option("--workers", so.workers, "Parallel browser sessions")->capture_default_str();
    scan_cmd->add_option("--passes", so.passes, "Passes over the shuffled url list")->capture_default_str();
    scan_cmd->add_option("--stages", so.stages, "all or a comma list of detect,interact,analyze")
        ->capture_default_str();
    scan_cmd->add_option("--seed", so.seed, "Shuffle seed")->capture_default_str();
    scan_cmd->add_option("--browser", so.browser, "Chrome/Chromium binary (default: $CONSENTSCAN_BROWSER or PATH)");
    scan_cmd->add_flag("--simulate", so.simulate, "Use the offline fixture browser instead of Chrome");
    scan_cmd->add_option("--fixtures", so.fixtures, "Fixture directory for --simulate");
    scan_cmd->add_option("--settle-wait", so.settle_wait, "Seconds to wait after load and after clicks")
        ->capture_default_str();
    scan_cmd->add_option("--page-timeout", so.page_timeout, "Seconds until a page load counts as timed out")
        ->capture_default_str();
    scan_cmd->add_option("--viewport", so.viewport, "Viewport as WIDTHxHEIGHT")->capture_default_str();
    scan_cmd->add_option("--user-agent", so.user_agent, "User agent override");
    scan_cmd->add_flag("--no-suppress-media", so.no_suppress_media, "Keep images and media visible");
    scan_cmd->add_option("--recycle-after", so.recycle_after, "Pages per browser session")->capture_default_str();
    scan_cmd->add_option("--ssim-threshold", so.ssim_threshold, "Decline detection SSIM threshold")
        ->capture_default_str();
    scan_cmd->add_option("--color-distance", so.color_distance, "Color diversion distance")->capture_default_str();
    so.suite.add_to(*scan_cmd);

    std::string snapshot, detect_out;
    SuiteOptions detect_suite;
    auto* detect_cmd = app.add_subcommand("detect", "Run detectors on a stored snapshot");
    detect_cmd->add_option("--snapshot", snapshot, "Snapshot JSON file")->required()->check(CLI::ExistingFile);
    detect_cmd->add_option("--out", detect_out, "Write JSON here instead of stdout");
    detect_suite.add_to(*detect_cmd);

    std::string gt_path, results, eval_methods = "all", json_out, csv_out;
    double iou = 0.5;
    int eval_pass = 0;
    auto* eval_cmd = app.add_subcommand("eval", "Score detector results against ground truth");
    eval_cmd->add_option("--ground-truth", gt_path, "Ground truth JSON-lines file")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--results", results, "Scan output directory, JSON-lines file or detect output")
        ->required()
        ->check(CLI::ExistingPath);
    eval_cmd->add_option("--method", eval_methods, "all or a comma list of methods")->capture_default_str();
    eval_cmd->add_option("--iou", iou, "IoU needed for a match")->capture_default_str();
    eval_cmd->add_option("--pass", eval_pass, "Only use this pass (default: first usable record per url)");
    eval_cmd->add_option("--json", json_out, "Also write metrics as JSON");
    eval_cmd->add_option("--csv", csv_out, "Also write metrics as CSV");

    std::string fixture_dir, export_out, base_url, host = "127.0.0.1";
    int port = 8080;
    auto* fixtures_cmd = app.add_subcommand("fixtures", "Fixture corpus tools");
    fixtures_cmd->require_subcommand(1);
    fixtures_cmd->add_option("--dir", fixture_dir, "Fixture directory (default: bundled corpus)");
    auto* export_cmd = fixtures_cmd->add_subcommand("export", "Write snapshots, HTML, truth and manifest");
    export_cmd->add_option("--out", export_out, "Output directory (default: the fixture directory)");
    export_cmd->add_option("--base-url", base_url, "Served base url used in ground-truth.jsonl and urls.txt");
    auto* serve_cmd = fixtures_cmd->add_subcommand("serve", "Serve fixtures over HTTP");
    serve_cmd->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
    serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
    auto* list_cmd = fixtures_cmd->add_subcommand("list", "List fixtures");

    std::string list_name = "easylist-cookie", list_url, list_out;
    auto* lists_cmd = app.add_subcommand("lists", "Filter list tools");
    lists_cmd->require_subcommand(1);
    auto* fetch_cmd = lists_cmd->add_subcommand("fetch", "Download a filter list");
    fetch_cmd->add_option("--name", list_name, "easylist-cookie or idcac")->capture_default_str();
    fetch_cmd->add_option("--url", list_url, "Explicit list url");
    fetch_cmd->add_option("--out", list_out, "Destination file")->required();

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    try {
        if (*scan_cmd) return run_scan_command(so);
        if (*detect_cmd) return run_detect_command(snapshot, detect_out, detect_suite);
        if (*eval_cmd) return run_eval_command(gt_path, results, eval_methods, iou, eval_pass, json_out, csv_out);
        if (*export_cmd) return run_fixtures_export(fixture_dir, export_out, base_url);
        if (*serve_cmd) return run_fixtures_serve(fixture_dir, host, port);
        if (*list_cmd) return run_fixtures_list(fixture_dir);
        if (*fetch_cmd) return run_lists_fetch(list_name, list_url, list_out);
    } catch (const scan::ConfigError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
