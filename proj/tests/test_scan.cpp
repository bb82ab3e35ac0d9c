#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "consentscan/fixtures.hpp"
#include "consentscan/interact.hpp"
#include "consentscan/scan.hpp"
#include "suite_support.hpp"

using namespace consentscan;
using namespace consentscan::scan;

namespace {

const fixtures::Corpus& corpus()
{
    static const fixtures::Corpus c = fixtures::Corpus::load(testkit::source_dir() / "fixtures");
    return c;
}

const DetectorSuite& suite()
{
    static const DetectorSuite s = testkit::standard_suite();
    return s;
}

std::vector<std::string> fixture_urls(std::size_t n)
{
    std::vector<std::string> urls;
    for (const auto& fx : corpus().fixtures()) {
        if (urls.size() < n) urls.push_back(fx.url);
    }
    return urls;
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& p)
{
    std::vector<nlohmann::json> out;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) out.push_back(nlohmann::json::parse(line));
    return out;
}

int button_with_text(const PageSnapshot& s, const std::string& text)
{
    for (const auto& n : s.nodes()) {
        if (n.tag == "button" && n.own_text == text) return n.node_id;
    }
    return -1;
}

PageResult scan_fixture(const std::string& id, bool honor_clear_state = true)
{
    fixtures::FixtureBrowser browser(corpus(), {.honor_clear_state = honor_clear_state});
    ScanJob job;
    job.output_dir = "unused";
    return process_url(browser, corpus().find(id)->url, 1, job, suite(), {});
}

} // namespace

TEST(Suite, Validation)
{
    DetectorSuite s;
    s.methods = {Method::filterlist};
    EXPECT_THROW(s.validate(), ConfigError);
    s.methods = {Method::textclass};
    EXPECT_THROW(s.validate(), ConfigError);
    s.methods = {};
    EXPECT_THROW(s.validate(), ConfigError);
    s.methods = {Method::domwalk, Method::perceptive};
    EXPECT_NO_THROW(s.validate());
    EXPECT_NO_THROW(suite().validate());
}

TEST(Suite, ParseNames)
{
    EXPECT_EQ(parse_methods("all"), all_methods());
    EXPECT_EQ(parse_methods("domwalk,perceptive"), (std::set<Method>{Method::domwalk, Method::perceptive}));
    EXPECT_THROW(parse_methods("magic"), ConfigError);
    EXPECT_EQ(parse_stages("detect"), std::set<Stage>{Stage::detect});
    EXPECT_EQ(parse_stages("all").size(), 3u);
    EXPECT_THROW(parse_stages("detect,paint"), ConfigError);
}

TEST(Suite, PriorityChainPicksFirstResult)
{

    fixtures::FixtureBrowser b(corpus());
    for (const auto& fx : corpus().fixtures()) {
        const auto snap = std::get<PageSnapshot>(b.capture_page(fx.url));
        const auto d = run_detectors(snap, suite());
        std::optional<Method> want;
        for (const auto m : priority_chain) {
            if (d.per_method.at(m)) {
                want = m;
                break;
            }
        }
        EXPECT_EQ(d.chosen, want) << fx.id;
        const auto first = detect_first(snap, suite());
        EXPECT_EQ(first.has_value(), want.has_value()) << fx.id;
        if (first) {
            EXPECT_EQ(*first, *d.chosen_result()) << fx.id;
        }
    }
}

TEST(ScanJob, Validation)
{
    ScanJob job;
    job.output_dir = "out";
    EXPECT_NO_THROW(job.validate());
    auto bad = job;
    bad.passes = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = job;
    bad.workers = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = job;
    bad.stages = {Stage::detect, Stage::analyze};
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = job;
    bad.stages = {Stage::interact};
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = job;
    bad.output_dir.clear();
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = job;
    bad.analysis.ssim_threshold = 1.5;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(ScanJob, PassOrder)
{
    std::vector<std::string> urls;
    for (int i = 0; i < 30; ++i) urls.push_back("https://s" + std::to_string(i) + ".example/");
    const auto a = pass_order(urls, 7, 1);
    EXPECT_EQ(a, pass_order(urls, 7, 1));
    EXPECT_NE(a, pass_order(urls, 7, 2));
    EXPECT_NE(a, pass_order(urls, 8, 1));
    EXPECT_EQ(std::multiset<std::string>(a.begin(), a.end()), std::multiset<std::string>(urls.begin(), urls.end()));
}

TEST(ScanJob, RequiredSuccesses)
{
    EXPECT_EQ(required_successes(1), 1);
    EXPECT_EQ(required_successes(2), 2);
    EXPECT_EQ(required_successes(3), 2);
    EXPECT_EQ(required_successes(4), 3);
    EXPECT_EQ(required_successes(6), 4);
    for (int p = 1; p < 50; ++p) {
        const int r = required_successes(p);
        EXPECT_GE(3 * r, 2 * p);
        EXPECT_LT(3 * (r - 1), 2 * p);
    }
}

TEST(RunScan, ThreePassesOverTenUrls)
{
    testkit::TempDir tmp;
    fixtures::FixtureBrowserFactory factory(corpus());
    ScanJob job;
    job.urls = fixture_urls(10);
    job.passes = 3;
    job.output_dir = tmp.path();
    job.seed = 42;
    const auto summary = run_scan(job, factory, suite());
    EXPECT_EQ(summary.page_results, 30);
    EXPECT_EQ(summary.successful_urls(), 10);
    EXPECT_EQ(summary.required, 2);
    for (int pass = 1; pass <= 3; ++pass) {
        const auto lines = read_jsonl(tmp.path() / ("pass-" + std::to_string(pass) + ".jsonl"));
        ASSERT_EQ(lines.size(), 10u);
        for (const auto& l : lines) {
            EXPECT_EQ(l.at("status"), "ok");
            EXPECT_EQ(l.at("pass"), pass);
            EXPECT_TRUE(std::filesystem::exists(tmp.path() / l.at("screenshot").get<std::string>()));
        }
    }
    const auto s = nlohmann::json::parse(std::ifstream(tmp.path() / "summary.json"));
    EXPECT_EQ(s.at("urls_successful"), 10);
}

TEST(RunScan, UnresolvableHostFailsEveryPass)
{
    testkit::TempDir tmp;
    fixtures::FixtureBrowserFactory factory(corpus());
    ScanJob job;
    job.urls = {"https://does-not-exist.invalid/", corpus().find("F16")->url};
    job.output_dir = tmp.path();
    const auto summary = run_scan(job, factory, suite());
    EXPECT_EQ(summary.page_results, 6);
    EXPECT_EQ(summary.urls[0].errors, std::vector<std::string>(3, "dns_unresolved"));
    EXPECT_FALSE(summary.urls[0].successful);
    EXPECT_TRUE(summary.urls[1].successful);
    EXPECT_EQ(summary.urls[1].chosen_methods, std::vector<std::string>(3, "none"));
}

TEST(RunScan, DetectOnlyHasNoInteraction)
{
    testkit::TempDir tmp;
    fixtures::FixtureBrowserFactory factory(corpus());
    ScanJob job;
    job.urls = {corpus().find("F03")->url};
    job.passes = 1;
    job.stages = {Stage::detect};
    job.output_dir = tmp.path();
    run_scan(job, factory, suite());
    const auto lines = read_jsonl(tmp.path() / "pass-1.jsonl");
    ASSERT_EQ(lines.size(), 1u);
    EXPECT_FALSE(lines[0].contains("outcomes"));
    EXPECT_FALSE(lines[0].contains("analysis"));
    EXPECT_FALSE(lines[0].at("clickables").empty());
}

TEST(RunScan, WorkersShareTheLoad)
{
    testkit::TempDir tmp;
    fixtures::FixtureBrowserFactory factory(corpus());
    ScanJob job;
    job.urls = fixture_urls(22);
    job.passes = 1;
    job.workers = 3;
    job.recycle_after = 2;
    job.stages = {Stage::detect};
    job.output_dir = tmp.path();
    const auto summary = run_scan(job, factory, suite());
    EXPECT_EQ(summary.page_results, 22);
    const auto lines = read_jsonl(tmp.path() / "pass-1.jsonl");
    std::set<std::string> seen;
    for (const auto& l : lines) seen.insert(l.at("url").get<std::string>());
    EXPECT_EQ(seen.size(), 22u);
}

TEST(RunScan, CancelStopsBeforeWork)
{
    testkit::TempDir tmp;
    fixtures::FixtureBrowserFactory factory(corpus());
    const std::atomic<bool> cancel{true};
    ScanJob job;
    job.urls = fixture_urls(5);
    job.output_dir = tmp.path();
    job.cancel = &cancel;
    EXPECT_EQ(run_scan(job, factory, suite()).page_results, 0);
}

TEST(RunScan, UrlList)
{
    testkit::TempDir tmp;
    const auto p = tmp.path() / "urls.txt";
    std::ofstream(p) << "# corpus\nhttps://a.example/\n\n  https://b.example/  \n";
    EXPECT_EQ(read_url_list(p), (std::vector<std::string>{"https://a.example/", "https://b.example/"}));
    std::ofstream(p) << "# nothing\n";
    EXPECT_THROW(read_url_list(p), ConfigError);
    EXPECT_THROW(read_url_list(tmp.path() / "missing"), ConfigError);
}

TEST(Interaction, HideOnBothDeclineEvidence)
{
    const auto r = scan_fixture("F03");
    ASSERT_TRUE(r.captured());
    ASSERT_TRUE(r.analysis);
    fixtures::FixtureBrowser b(corpus());
    const auto snap = std::get<PageSnapshot>(b.capture_page(corpus().find("F03")->url));
    const int accept = button_with_text(snap, "Accept");
    const int reject = button_with_text(snap, "Reject");
    EXPECT_TRUE(r.analysis->decline_detected);
    EXPECT_EQ(r.analysis->decline_evidence, std::make_pair(accept, reject));
    EXPECT_FALSE(r.analysis->color_diversion);
    ASSERT_EQ(r.outcomes->size(), 2u);
    for (const auto& o : *r.outcomes) {
        EXPECT_TRUE(o.clicked());
        EXPECT_EQ(o.cookies_delta.size(), 1u);
        EXPECT_EQ(o.cookies_delta[0].name, "consent");
        EXPECT_LT(o.ssim_vs_initial, 1.0);
    }
}

TEST(Interaction, ColourDiversionFixture)
{
    const auto r = scan_fixture("F01");
    ASSERT_TRUE(r.analysis);
    EXPECT_TRUE(r.analysis->color_diversion);
    EXPECT_TRUE(r.analysis->decline_detected);
}

TEST(Interaction, AcceptOnlyFixtureHasNoDecline)
{
    const auto r = scan_fixture("F02");
    ASSERT_TRUE(r.analysis);
    EXPECT_FALSE(r.analysis->decline_detected);
    EXPECT_TRUE(r.analysis->color_diversion);
}

TEST(Interaction, StickyConsentMeansNoRenotice)
{
    const auto r = scan_fixture("F03", false);
    ASSERT_TRUE(r.outcomes);
    ASSERT_EQ(r.outcomes->size(), 2u);
    EXPECT_FALSE((*r.outcomes)[0].error);
    EXPECT_EQ((*r.outcomes)[1].error, std::string(interaction::renotice_not_found));
    EXPECT_FALSE(r.analysis->decline_detected);
}

TEST(Interaction, CheckboxesAreObservedOnly)
{
    const auto r = scan_fixture("F08");
    ASSERT_TRUE(r.outcomes);
    int observed = 0;
    for (const auto& o : *r.outcomes) {
        if (o.clickable.kind == interaction::ClickableKind::checkbox) {
            EXPECT_TRUE(o.observed_only);
            EXPECT_TRUE(o.post_screenshot.empty());
            ++observed;
        }
    }
    EXPECT_GE(observed, 1);
}

TEST(Interaction, ResultJsonShape)
{
    const auto j = to_json(scan_fixture("F03"));
    for (const char* key : {"url", "pass", "status", "screenshot", "language", "methods", "chosen_method",
                            "clickables", "outcomes", "analysis", "timings"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j.at("language"), "en");
}

TEST(DetectOffline, DeterministicOnEveryBundledSnapshot)
{
    for (const auto& fx : corpus().fixtures()) {
        const auto path = corpus().dir() / fx.id / "snapshot.json";
        const auto a = detect_offline(path, suite()).dump();
        const auto b = detect_offline(path, suite()).dump();
        EXPECT_EQ(a, b) << fx.id;
    }
}

TEST(UrlKey, StableHexPrefix)
{
    EXPECT_EQ(url_key("https://example.com/").size(), 16u);
    EXPECT_EQ(url_key("https://example.com/"), url_key("https://example.com/"));
    EXPECT_NE(url_key("https://example.com/"), url_key("https://example.com/x"));
}
