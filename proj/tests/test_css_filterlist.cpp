#include <gtest/gtest.h>

#include <random>

#include "consentscan/css.hpp"
#include "consentscan/filterlist.hpp"
#include "support.hpp"

using namespace consentscan;
using testkit::PageBuilder;

TEST(Css, ParsesSupportedGrammar)
{
    const auto s = css::parse("div.banner.gdpr#x[role=dialog] > p, [data-cc*=\"consent\"] span");
    ASSERT_EQ(s.alternatives.size(), 2u);
    const auto& first = s.alternatives[0];
    ASSERT_EQ(first.parts.size(), 2u);
    EXPECT_EQ(first.parts[0].tag, "div");
    EXPECT_EQ(first.parts[0].classes, (std::vector<std::string>{"banner", "gdpr"}));
    EXPECT_EQ(first.parts[0].ids, (std::vector<std::string>{"x"}));
    EXPECT_EQ(first.parts[0].attrs, (std::vector<css::AttrTest>{{"role", css::AttrOp::equals, "dialog"}}));
    EXPECT_EQ(first.combinators, (std::vector<css::Combinator>{css::Combinator::child}));
    EXPECT_EQ(s.alternatives[1].parts[0].attrs[0].op, css::AttrOp::contains);
    EXPECT_EQ(s.alternatives[1].combinators, (std::vector<css::Combinator>{css::Combinator::descendant}));
}

TEST(Css, RejectsUnsupportedSyntax)
{
    for (const char* bad : {":has(> .x)", "div:not(.a)", "a + b", "a ~ b", ".a\\:b", "", "div,", "[x=", "#"}) {
        EXPECT_THROW(css::parse(bad), css::UnsupportedSelector) << bad;
    }
}

TEST(Css, MatchesIdClassSetAndAttributes)
{
    PageBuilder b;
    const int consent = b.add(1, "div", {0, 0, 10, 10});
    b.attr(consent, "id", "cookieConsent");
    const int banner = b.add(1, "div", {0, 0, 10, 10});
    b.attr(banner, "class", "gdpr banner x");
    const int link = b.add(banner, "a", {0, 0, 5, 5});
    b.attr(link, "href", "https://example.com/privacy");
    const auto s = b.build();
    EXPECT_EQ(css::css_match(s, "#cookieConsent"), (std::vector<int>{consent}));
    EXPECT_EQ(css::css_match(s, "div.banner.gdpr"), (std::vector<int>{banner}));
    EXPECT_EQ(css::css_match(s, "div.banner.other"), (std::vector<int>{}));
    EXPECT_EQ(css::css_match(s, "a[href^=\"https://\"]"), (std::vector<int>{link}));
    EXPECT_EQ(css::css_match(s, "a[href$=privacy]"), (std::vector<int>{link}));
    EXPECT_EQ(css::css_match(s, "[class~=banner]"), (std::vector<int>{banner}));
    EXPECT_EQ(css::css_match(s, "body > .banner > a"), (std::vector<int>{link}));
    EXPECT_EQ(css::css_match(s, "body > a"), (std::vector<int>{}));
    EXPECT_EQ(css::css_match(s, "html a"), (std::vector<int>{link}));
    EXPECT_EQ(css::css_match(s, "#cookieConsent, .x"), (std::vector<int>{consent, banner}));
}

namespace {

// Independent brute-force matcher over a generated selector description.
struct GenCompound {
    std::string tag;
    std::string id;
    std::vector<std::string> classes;
    std::string attr;
    int op = -1; // -1 none, 0 exists, 1 =, 2 *=, 3 ^=, 4 $=, 5 ~=
    std::string value;
};

struct GenComplex {
    std::vector<GenCompound> parts;
    std::vector<bool> child; // combinator before parts[i + 1]
};

std::string render(const GenComplex& c)
{
    static const char* ops[] = {"", "=", "*=", "^=", "$=", "~="};
    std::string out;
    for (std::size_t i = 0; i < c.parts.size(); ++i) {
        if (i > 0) out += c.child[i - 1] ? " > " : " ";
        const auto& p = c.parts[i];
        std::string s = p.tag;
        if (!p.id.empty()) s += "#" + p.id;
        for (const auto& k : p.classes) s += "." + k;
        if (p.op >= 0) {
            s += "[" + p.attr;
            if (p.op > 0) s += std::string(ops[p.op]) + "\"" + p.value + "\"";
            s += "]";
        }
        out += s.empty() ? "*" : s;
    }
    return out;
}

std::vector<std::string> words(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s + " ") {
        if (ch == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    return out;
}

bool oracle_compound(const DomNode& n, const GenCompound& p)
{
    if (!p.tag.empty() && n.tag != p.tag) return false;
    if (!p.id.empty() && (!n.attribute("id") || *n.attribute("id") != p.id)) return false;
    const auto cls = n.attribute("class") ? words(*n.attribute("class")) : std::vector<std::string>{};
    for (const auto& k : p.classes) {
        if (std::find(cls.begin(), cls.end(), k) == cls.end()) return false;
    }
    if (p.op >= 0) {
        const auto* v = n.attribute(p.attr);
        if (!v) return false;
        const std::string& x = *v;
        const std::string& w = p.value;
        switch (p.op) {
        case 1: return x == w;
        case 2: return !w.empty() && x.find(w) != std::string::npos;
        case 3: return !w.empty() && x.size() >= w.size() && x.substr(0, w.size()) == w;
        case 4: return !w.empty() && x.size() >= w.size() && x.substr(x.size() - w.size()) == w;
        case 5: {
            const auto ws = words(x);
            return std::find(ws.begin(), ws.end(), w) != ws.end();
        }
        default: return true;
        }
    }
    return true;
}

// Every way of assigning parts right-to-left to the node's ancestor chain.
bool oracle_assign(const PageSnapshot& s, const std::vector<int>& chain, std::size_t chain_pos, const GenComplex& c,
                   int part)
{
    if (!oracle_compound(s.node(chain[chain_pos]), c.parts[static_cast<std::size_t>(part)])) return false;
    if (part == 0) return true;
    const bool child = c.child[static_cast<std::size_t>(part - 1)];
    for (std::size_t next = chain_pos + 1; next < chain.size(); ++next) {
        if (child && next != chain_pos + 1) break;
        if (oracle_assign(s, chain, next, c, part - 1)) return true;
    }
    return false;
}

std::vector<int> oracle_match(const PageSnapshot& s, const GenComplex& c)
{
    std::vector<int> out;
    for (const auto& n : s.nodes()) {
        std::vector<int> chain{n.node_id};
        for (auto p = n.parent_id; p; p = s.node(*p).parent_id) chain.push_back(*p);
        if (oracle_assign(s, chain, 0, c, static_cast<int>(c.parts.size()) - 1)) out.push_back(n.node_id);
    }
    return out;
}

} // namespace

TEST(Css, MatchesBruteForceOracleOnRandomTrees)
{
    std::mt19937_64 rng(404);
    const std::vector<std::string> tags{"div", "p", "span", "section"};
    const std::vector<std::string> ids{"a", "b", "c"};
    const std::vector<std::string> classes{"x", "y", "z", "cc-window"};
    const std::vector<std::string> values{"dialog", "cookie banner", "cookie", "ban", "ner", ""};
    auto pick = [&](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
    auto chance = [&](int pct) { return std::uniform_int_distribution<int>(0, 99)(rng) < pct; };

    int total_matches = 0;
    for (int tree = 0; tree < 60; ++tree) {
        PageBuilder b;
        for (int i = 0; i < 60; ++i) {
            const int parent = std::uniform_int_distribution<int>(1, static_cast<int>(b.data().nodes.size()) - 1)(rng);
            const int id = b.add(parent, pick(tags), {0, 0, 10, 10});
            if (chance(30)) b.attr(id, "id", pick(ids));
            if (chance(60)) {
                std::string cls = pick(classes);
                if (chance(50)) cls += " " + pick(classes);
                b.attr(id, "class", cls);
            }
            if (chance(40)) b.attr(id, "role", pick(values));
        }
        const auto s = b.build();
        for (int q = 0; q < 40; ++q) {
            GenComplex c;
            const int parts = std::uniform_int_distribution<int>(1, 3)(rng);
            for (int i = 0; i < parts; ++i) {
                GenCompound p;
                if (chance(50)) p.tag = pick(tags);
                if (chance(20)) p.id = pick(ids);
                if (chance(50)) p.classes.push_back(pick(classes));
                if (chance(15)) p.classes.push_back(pick(classes));
                if (chance(30)) {
                    p.attr = "role";
                    p.op = std::uniform_int_distribution<int>(0, 5)(rng);
                    p.value = pick(values);
                    if (p.op == 5 && p.value.find(' ') != std::string::npos) p.value = "cookie";
                }
                c.parts.push_back(p);
                if (i > 0) c.child.push_back(chance(50));
            }
            const auto text = render(c);
            const auto got = css::css_match(s, text);
            EXPECT_EQ(got, oracle_match(s, c)) << text;
            total_matches += static_cast<int>(got.size());
        }
    }
    EXPECT_GT(total_matches, 500); // the generator must exercise real matches
}

TEST(FilterList, ParsesRuleClasses)
{
    const auto rs = filterlist::parse_filter_list("[Adblock Plus 2.0]\n"
                                                  "! comment\n"
                                                  "##.cc-window\n"
                                                  "example.com##.cookie-bar\n"
                                                  "a.example,b.example##.both\n"
                                                  "~shop.example##.not-shop\n"
                                                  "#@#.cc-window\n"
                                                  "||ads.example.com^\n"
                                                  "example.com#?#div:-abp-has(.x)\n"
                                                  "##div:has(> .x)\n",
                                                  "custom");
    EXPECT_EQ(rs.source_name, "custom");
    EXPECT_EQ(rs.generic.size(), 3u); // .cc-window, ~shop, exception
    EXPECT_EQ(rs.specific.at("example.com").size(), 1u);
    EXPECT_EQ(rs.specific.at("a.example").size(), 1u);
    EXPECT_EQ(rs.specific.at("b.example").size(), 1u);
    EXPECT_EQ(rs.rule_count, 6u);
    EXPECT_EQ(rs.skipped_comments, 2u);
    EXPECT_EQ(rs.skipped_network, 1u);
    EXPECT_EQ(rs.skipped_extended, 1u);
    EXPECT_EQ(rs.skipped_unsupported, 1u);
}

TEST(FilterList, Examples)
{
    const auto one = filterlist::parse_filter_list("example.com##.cookie-bar", "x");
    EXPECT_EQ(one.specific.at("example.com").size(), 1u);
    EXPECT_TRUE(one.generic.empty());
    EXPECT_EQ(filterlist::parse_filter_list("! comment", "x").rule_count, 0u);
    const auto net = filterlist::parse_filter_list("||ads.example.com^", "x");
    EXPECT_EQ(net.rule_count, 0u);
    EXPECT_EQ(net.skipped_network, 1u);
}

TEST(FilterList, DomainScoping)
{
    const auto rs = filterlist::parse_filter_list("news.example,~sport.news.example##.gdpr-layer\n"
                                                  "~shop.example##.generic-but-not-shop\n",
                                                  "x");
    auto selectors = [&](const std::string& host) {
        std::vector<std::string> out;
        for (const auto* r : filterlist::applicable_rules(rs, host)) out.push_back(r->selector);
        return out;
    };
    EXPECT_EQ(selectors("www.news.example"), (std::vector<std::string>{".generic-but-not-shop", ".gdpr-layer"}));
    EXPECT_EQ(selectors("sport.news.example"), (std::vector<std::string>{".generic-but-not-shop"}));
    EXPECT_EQ(selectors("shop.example"), (std::vector<std::string>{}));
}

namespace {

PageSnapshot banner_page(bool visible)
{
    PageBuilder b;
    const int small = b.add(1, "div", {0, 0, 50, 20});
    b.attr(small, "class", "cc-window");
    const int big = b.add(1, "div", {0, 200, 400, 100}, "We use cookies");
    b.attr(big, "class", "cc-window cc-banner");
    if (!visible) {
        for (int id : {small, big}) {
            b.node(id).visible = false;
            b.node(id).bbox = {};
        }
    }
    return b.build();
}

} // namespace

TEST(FilterList, LargestVisibleMatchWins)
{
    const auto rs = filterlist::parse_filter_list("##.cc-window", "easylist-cookie");
    const auto d = filterlist::detect_filterlist(banner_page(true), rs, "www.example.com");
    ASSERT_TRUE(d);
    EXPECT_EQ(d->node_id, 3);
    EXPECT_EQ(d->method, Method::filterlist);
    EXPECT_EQ(d->source, "easylist-cookie");
    EXPECT_EQ(d->notice_text, "We use cookies");
}

TEST(FilterList, InvisibleNodesExcluded)
{
    const auto rs = filterlist::parse_filter_list("##.cc-window", "x");
    EXPECT_FALSE(filterlist::detect_filterlist(banner_page(false), rs, "www.example.com"));
}

TEST(FilterList, ExceptionCancelsRule)
{
    const auto rs = filterlist::parse_filter_list("##.cc-window\nexample.com#@#.cc-window", "x");
    EXPECT_FALSE(filterlist::detect_filterlist(banner_page(true), rs, "www.example.com"));
    EXPECT_TRUE(filterlist::detect_filterlist(banner_page(true), rs, "www.other.org"));
}

TEST(FilterList, MultipleListsReportFirstSource)
{
    const std::vector<filterlist::RuleSet> lists{filterlist::parse_filter_list("##.nothing", "a"),
                                                 filterlist::parse_filter_list("##.cc-banner", "b"),
                                                 filterlist::parse_filter_list("##.cc-window", "c")};
    const auto d = filterlist::detect_filterlist(banner_page(true), lists, "www.example.com");
    ASSERT_TRUE(d);
    EXPECT_EQ(d->source, "b");
}

TEST(FilterList, BundledListsLoad)
{
    for (const char* name : {"easylist-cookie", "idcac"}) {
        const auto rs =
            filterlist::load_filter_list(testkit::source_dir() / "data" / "filterlists" / (std::string(name) + ".txt"));
        EXPECT_EQ(rs.source_name, name);
        EXPECT_GT(rs.rule_count, 10u);
    }
    EXPECT_THROW(filterlist::load_filter_list("/nonexistent/list.txt"), std::runtime_error);
}
