#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <random>

#include "consentscan/domwalk.hpp"
#include "consentscan/perceptive.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace consentscan;
using testkit::PageBuilder;

// ---------------------------------------------------------------- domwalk

TEST(DomWalk, KeywordHitsRespectViewportAndCase)
{
    PageBuilder b(400, 300);
    const int visible = b.add(1, "div", {0, 0, 200, 20}, "We use cookies.");
    b.add(1, "div", {0, 2000, 200, 20}, "cookie policy far below");
    const int german = b.add(1, "span", {0, 50, 200, 20}, "Cookie-Einstellungen");
    const int hidden = b.add(1, "span", {}, "cookie hidden");
    const auto s = b.build();
    const auto hits = domwalk::find_keyword_hits(s, {});
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].node_id, visible);
    EXPECT_EQ(hits[0].word_count, 3u);
    EXPECT_DOUBLE_EQ(hits[0].x, 100);
    EXPECT_DOUBLE_EQ(hits[0].y, 10);
    EXPECT_EQ(hits[1].node_id, german);
    EXPECT_FALSE(s.node(hidden).visible);
}

TEST(DomWalk, HitCenterUsesVisiblePart)
{
    PageBuilder b(400, 300);
    b.add(1, "div", {0, 250, 400, 100}, "cookie");
    const auto hits = domwalk::find_keyword_hits(b.build(), {});
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_DOUBLE_EQ(hits[0].y, 275);
}

TEST(DomWalk, LongestHitWinsTiesToSmallerId)
{
    const std::vector<domwalk::KeywordHit> hits{{5, 12, 0, 0}, {9, 80, 0, 0}, {3, 80, 0, 0}};
    EXPECT_EQ(domwalk::select_longest_hit(hits)->node_id, 3);
    EXPECT_FALSE(domwalk::select_longest_hit({}));
}

TEST(DomWalk, WalkUpStopsAtButtonOrBodyChild)
{
    {
        PageBuilder b;
        const int div = b.add(1, "div", {0, 0, 300, 100});
        const int p = b.add(div, "p", {0, 0, 300, 40}, "cookies");
        b.add(div, "button", {0, 50, 60, 30}, "OK");
        EXPECT_EQ(domwalk::walk_up(b.build(), p), div);
    }
    {
        PageBuilder b;
        const int div = b.add(1, "div", {0, 0, 300, 100});
        const int section = b.add(div, "section", {0, 0, 300, 100});
        const int p = b.add(section, "p", {0, 0, 300, 40}, "cookies");
        EXPECT_EQ(domwalk::walk_up(b.build(), p), div);
    }
    {
        PageBuilder b;
        const int div = b.add(1, "div", {0, 0, 300, 100});
        const int inner = b.add(div, "div", {0, 0, 300, 100}, "cookies");
        b.add(inner, "button", {0, 50, 60, 30}, "OK");
        EXPECT_EQ(domwalk::walk_up(b.build(), inner), inner);
    }
    EXPECT_THROW(domwalk::walk_up(PageBuilder().build(), 1), std::invalid_argument);
}

TEST(DomWalk, DetectsFromLongestHit)
{
    PageBuilder b(400, 300);
    const int footer = b.add(1, "div", {0, 0, 400, 40});
    b.add(footer, "a", {0, 0, 100, 20}, "Cookie policy");
    const int banner = b.add(1, "div", {0, 200, 400, 100});
    b.add(banner, "p", {0, 200, 300, 60}, "We use cookies to personalise content and ads and to analyse our traffic.");
    b.add(banner, "button", {300, 200, 80, 40}, "Accept");
    const auto d = domwalk::detect_domwalk(b.build(), {});
    ASSERT_TRUE(d);
    EXPECT_EQ(d->node_id, banner);
    EXPECT_EQ(d->method, Method::domwalk);
    EXPECT_DOUBLE_EQ(d->confidence, 1.0);
    EXPECT_EQ(d->bbox, (Rect{0, 200, 400, 100}));
    EXPECT_EQ(d->language, "en");
}

TEST(DomWalk, NoKeywordNoResult)
{
    PageBuilder b;
    b.add(1, "p", {0, 0, 100, 20}, "Nothing to see here");
    EXPECT_FALSE(domwalk::detect_domwalk(b.build(), {}));
}

TEST(DomWalk, KeywordConfigValidation)
{
    domwalk::KeywordConfig kw{{"Cookie", "Consent"}};
    kw.validate();
    EXPECT_EQ(kw.keywords, (std::vector<std::string>{"cookie", "consent"}));
    domwalk::KeywordConfig empty{{}};
    EXPECT_THROW(empty.validate(), std::invalid_argument);
    domwalk::KeywordConfig blank{{""}};
    EXPECT_THROW(blank.validate(), std::invalid_argument);
    const auto bundled = domwalk::KeywordConfig::from_file(testkit::source_dir() / "data" / "keywords.txt");
    EXPECT_EQ(bundled.keywords, (std::vector<std::string>{"cookie"}));
}

// ---------------------------------------------------------------- perceptive image steps

using perceptive::BinaryImage;
using perceptive::Contour;

TEST(Perceptive, BackgroundSampleMajorityAndTies)
{
    RgbImage img(10, 10, {255, 255, 255});
    for (int i = 0; i < 30; ++i) img.set(i % 10, i / 10, {0, 0, 0});
    EXPECT_EQ(perceptive::sample_background_color(img, {0, 0, 10, 10}), (Rgb{255, 255, 255}));
    RgbImage tie(10, 10, {255, 0, 0});
    tie.fill_rect({0, 0, 5, 10}, {0, 0, 255});
    EXPECT_EQ(perceptive::sample_background_color(tie, {0, 0, 10, 10}), (Rgb{0, 0, 255}));
    EXPECT_THROW(perceptive::sample_background_color(img, {50, 50, 5, 5}), std::invalid_argument);
}

TEST(Perceptive, XorPerChannel)
{
    RgbImage img(3, 1);
    img.set(0, 0, {255, 255, 255});
    img.set(1, 0, {200, 100, 50});
    img.set(2, 0, {12, 34, 56});
    const auto white = perceptive::xor_image(img, {255, 255, 255});
    EXPECT_EQ(white.at(0, 0), (Rgb{0, 0, 0}));
    EXPECT_EQ(white.at(1, 0), (Rgb{55, 155, 205}));
    const auto black = perceptive::xor_image(img, {0, 0, 0});
    EXPECT_EQ(black.at(0, 0), (Rgb{255, 255, 255}));
    std::mt19937_64 rng(3);
    const auto r = testkit::random_image(rng, 16, 16);
    const Rgb c{0x5a, 0xa5, 0x3c};
    const auto x = perceptive::xor_image(r, c);
    for (int y = 0; y < 16; ++y) {
        for (int xx = 0; xx < 16; ++xx) {
            const auto p = r.at(xx, y);
            EXPECT_EQ(x.at(xx, y), (Rgb{std::uint8_t(p.r ^ c.r), std::uint8_t(p.g ^ c.g), std::uint8_t(p.b ^ c.b)}));
        }
    }
}

TEST(Perceptive, BinarizeIsStrictAndPadded)
{
    GrayImage g(3, 2, 0);
    g.set(0, 0, 10);
    g.set(1, 0, 11);
    g.set(2, 1, 255);
    const auto bin = perceptive::binarize(g, 10);
    ASSERT_EQ(bin.width(), 5);
    ASSERT_EQ(bin.height(), 4);
    EXPECT_FALSE(bin.at(1, 1));
    EXPECT_TRUE(bin.at(2, 1));
    EXPECT_TRUE(bin.at(3, 2));
    for (int x = 0; x < 5; ++x) EXPECT_FALSE(bin.at(x, 0) || bin.at(x, 3));
    const auto zero = perceptive::binarize(GrayImage(4, 4, 0), 10);
    EXPECT_EQ(zero, BinaryImage(6, 6, false));
}

TEST(Perceptive, InvertKeepsBorderFalse)
{
    const auto inv = perceptive::invert_interior(perceptive::binarize(GrayImage(3, 3, 0), 10));
    for (int y = 0; y < 5; ++y) {
        for (int x = 0; x < 5; ++x) {
            const bool border = x == 0 || y == 0 || x == 4 || y == 4;
            EXPECT_EQ(inv.at(x, y), !border);
        }
    }
}

TEST(Perceptive, ContourExamples)
{
    EXPECT_TRUE(perceptive::find_contours(BinaryImage(100, 100, false)).empty());
    BinaryImage sq(100, 100, false);
    for (int y = 20; y < 30; ++y) {
        for (int x = 20; x < 30; ++x) sq.set(x, y, true);
    }
    const auto one = perceptive::find_contours(sq);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].bbox, (PixelRect{20, 20, 10, 10}));
    EXPECT_EQ(one[0].area_px, 100);
    for (int y = 60; y < 70; ++y) {
        for (int x = 60; x < 65; ++x) sq.set(x, y, true);
    }
    EXPECT_EQ(perceptive::find_contours(sq).size(), 2u);
}

TEST(Perceptive, DiagonalPixelsAreConnected)
{
    BinaryImage b(4, 4, false);
    b.set(0, 0, true);
    b.set(1, 1, true);
    b.set(3, 0, true);
    const auto c = perceptive::find_contours(b);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0].area_px, 2);
}

TEST(Perceptive, ContoursMatchFloodFillOracle)
{
    std::mt19937_64 rng(1604);
    for (int i = 0; i < 200; ++i) {
        const double density = 0.2 + 0.5 * (i % 10) / 10.0;
        std::bernoulli_distribution on(density);
        BinaryImage b(64, 64, false);
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) b.set(x, y, on(rng));
        }
        const auto got = perceptive::find_contours(b);
        const auto want = oracles::flood_fill_oracle(b);
        ASSERT_EQ(got.size(), want.size()) << "image " << i;
        for (std::size_t k = 0; k < got.size(); ++k) {
            EXPECT_EQ(got[k].bbox, want[k].bbox) << "image " << i << " contour " << k;
            EXPECT_EQ(got[k].area_px, want[k].area_px) << "image " << i << " contour " << k;
        }
    }
}

TEST(Perceptive, LabelsAgreeWithContours)
{
    std::mt19937_64 rng(5);
    std::bernoulli_distribution on(0.45);
    BinaryImage b(32, 32, false);
    for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) b.set(x, y, on(rng));
    }
    const auto labels = perceptive::label_regions(b);
    const auto contours = perceptive::find_contours(b);
    for (const auto& c : contours) {
        long long count = 0;
        for (int y = 0; y < 32; ++y) {
            for (int x = 0; x < 32; ++x) count += labels.at(x, y) == c.region_id;
        }
        EXPECT_EQ(count, c.area_px);
    }
}

TEST(Perceptive, PickContourStrategies)
{
    const std::vector<Contour> contours{{{100, 100, 300, 200}, 60000, 0}, {{150, 150, 50, 50}, 2500, 1},
                                        {{0, 0, 20, 20}, 400, 2}};
    perceptive::PerceptiveConfig cfg;
    const double vp = 1920.0 * 1080.0;
    EXPECT_EQ(perceptive::pick_contour(contours, {160, 160}, cfg, vp)->region_id, 1);
    cfg.contour_strategy = perceptive::ContourStrategy::largest_containing;
    EXPECT_EQ(perceptive::pick_contour(contours, {160, 160}, cfg, vp)->region_id, 0);
    EXPECT_FALSE(perceptive::pick_contour(contours, {1000, 1000}, cfg, vp));
    cfg.min_contour_area_px = 401;
    EXPECT_FALSE(perceptive::pick_contour(contours, {5, 5}, cfg, vp));
}

TEST(Perceptive, PickContourRejectsFullViewport)
{
    const std::vector<Contour> contours{{{0, 0, 1920, 1080}, 1920LL * 1080, 0}};
    perceptive::PerceptiveConfig cfg;
    EXPECT_FALSE(perceptive::pick_contour(contours, {10, 10}, cfg, 1920.0 * 1080.0));
}

TEST(Perceptive, ConfigValidation)
{
    perceptive::PerceptiveConfig cfg;
    cfg.validate();
    cfg.threshold = 300;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.max_contour_frac = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    EXPECT_EQ(perceptive::parse_contour_strategy("largest"), perceptive::ContourStrategy::largest_containing);
    EXPECT_EQ(perceptive::parse_contour_strategy(perceptive::to_string(perceptive::ContourStrategy::smallest_containing)),
              perceptive::ContourStrategy::smallest_containing);
    EXPECT_THROW(perceptive::parse_contour_strategy("median"), std::invalid_argument);
}

TEST(Perceptive, RefineUpward)
{
    PageBuilder b(400, 300);
    const int notice = b.add(1, "div", {0, 200, 400, 100});
    const int p = b.add(notice, "p", {10, 210, 200, 30}, "cookies");
    const int loose = b.add(1, "div", {50, 50, 101, 101});
    const int inner = b.add(loose, "span", {60, 60, 50, 20});
    const auto s = b.build();
    EXPECT_EQ(perceptive::refine_upward(s, p, {0, 200, 400, 100}), notice);
    EXPECT_EQ(perceptive::refine_upward(s, notice, {0, 200, 400, 100}), notice);
    EXPECT_EQ(perceptive::refine_upward(s, inner, {50, 50, 100, 100}), loose);
    EXPECT_EQ(perceptive::refine_upward(s, inner, {50, 50, 100, 100}, 0), inner);
}

namespace {

PageSnapshot painted_banner(Rgb page, Rgb banner)
{
    PageBuilder b(400, 300, page);
    b.add(1, "p", {10, 10, 300, 20}, "Welcome to our shop");
    const int n = b.add(1, "div", {0, 220, 400, 80}, "", 100);
    b.add(n, "p", {10, 230, 250, 30}, "We use cookies for analytics");
    b.add(n, "button", {300, 240, 80, 30}, "Accept");
    b.paint({0, 220, 400, 80}, banner);
    b.paint({12, 235, 200, 10}, {250, 250, 250}); // glyph-ish text
    b.paint({300, 240, 80, 30}, {30, 130, 76});
    return b.build();
}

} // namespace

TEST(Perceptive, DetectsSolidBannerToThePixel)
{
    const auto s = painted_banner({255, 255, 255}, {31, 41, 55});
    const auto d = perceptive::detect_perceptive(s, {}, {});
    ASSERT_TRUE(d);
    EXPECT_EQ(d->bbox, (Rect{0, 220, 400, 80}));
    EXPECT_EQ(d->method, Method::perceptive);
}

TEST(Perceptive, KeywordOnPlainPageIsFiltered)
{
    PageBuilder b(400, 300);
    b.add(1, "p", {10, 10, 300, 20}, "Our cookie recipes");
    EXPECT_FALSE(perceptive::detect_perceptive(b.build(), {}, {}));
    EXPECT_FALSE(perceptive::detect_perceptive(PageBuilder().build(), {}, {}));
}
