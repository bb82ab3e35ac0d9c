#include <gtest/gtest.h>

#include <random>

#include "consentscan/domain.hpp"
#include "consentscan/geometry.hpp"
#include "consentscan/image.hpp"
#include "consentscan/text.hpp"
#include "support.hpp"

using namespace consentscan;

TEST(Geometry, ContainmentIsHalfOpen)
{
    const Rect r{10, 10, 20, 20};
    EXPECT_TRUE(r.contains({10, 10}));
    EXPECT_TRUE(r.contains({29.9, 29.9}));
    EXPECT_FALSE(r.contains({30, 10}));
    EXPECT_FALSE(r.contains({10, 30}));
}

TEST(Geometry, IouOfIdenticalDisjointAndHalfOverlap)
{
    const Rect a{0, 980, 1920, 100};
    EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
    EXPECT_DOUBLE_EQ(iou(a, {0, 0, 100, 100}), 0.0);
    EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0);
    EXPECT_DOUBLE_EQ(iou({0, 0, 0, 10}, {0, 0, 0, 10}), 0.0);
}

TEST(Geometry, EnclosesWithTolerance)
{
    const Rect outer{10, 10, 100, 50};
    EXPECT_TRUE(outer.encloses({10, 10, 100, 50}));
    EXPECT_FALSE(outer.encloses({9, 10, 101, 50}));
    EXPECT_TRUE(outer.encloses({9, 10, 101, 50}, 2));
}

TEST(Image, HexColorsRoundTrip)
{
    EXPECT_EQ(parse_hex_color("#1e824c"), (Rgb{0x1e, 0x82, 0x4c}));
    EXPECT_EQ(parse_hex_color("#fff"), (Rgb{255, 255, 255}));
    EXPECT_EQ(to_hex({0x1e, 0x82, 0x4c}), "#1e824c");
    EXPECT_THROW(parse_hex_color("red"), ImageError);
    EXPECT_THROW(parse_hex_color("#12345"), ImageError);
}

TEST(Image, LumaMatchesWeightedSum)
{
    EXPECT_EQ(luma({255, 255, 255}), 255);
    EXPECT_EQ(luma({0, 0, 0}), 0);
    EXPECT_EQ(luma({255, 0, 0}), 76);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> d(0, 255);
    for (int i = 0; i < 2000; ++i) {
        const Rgb c{std::uint8_t(d(rng)), std::uint8_t(d(rng)), std::uint8_t(d(rng))};
        const double y = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
        EXPECT_NEAR(luma(c), y, 0.5 + 1e-9);
    }
}

TEST(Image, PngRoundTripIsLossless)
{
    std::mt19937_64 rng(11);
    const auto img = testkit::random_image(rng, 37, 23);
    EXPECT_EQ(decode_png(encode_png(img)), img);
    testkit::TempDir dir;
    write_png(dir.path() / "a.png", img);
    EXPECT_EQ(read_png(dir.path() / "a.png"), img);
}

TEST(Image, DecodeRejectsGarbage)
{
    const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
    EXPECT_THROW(decode_png(junk), ImageError);
}

TEST(Image, FillRectClips)
{
    RgbImage img(10, 10);
    img.fill_rect({-5, -5, 8, 8}, {9, 9, 9});
    EXPECT_EQ(img.at(2, 2), (Rgb{9, 9, 9}));
    EXPECT_EQ(img.at(3, 3), (Rgb{0, 0, 0}));
    EXPECT_EQ(img.clip({-5, -5, 8, 8}), (PixelRect{0, 0, 3, 3}));
}

TEST(Text, NormalizeWhitespace)
{
    EXPECT_EQ(text::normalize_whitespace("  We\tuse \n\n cookies  "), "We use cookies");
    EXPECT_EQ(text::normalize_whitespace("a b"), "a b");
    EXPECT_EQ(text::normalize_whitespace(""), "");
}

TEST(Text, LowercaseCoversEuropeanLetters)
{
    EXPECT_EQ(text::to_lower_utf8("Cookie-Einstellungen ÄÖÜ"), "cookie-einstellungen äöü");
    EXPECT_EQ(text::to_lower_utf8("ÉTÉ"), "été");
    EXPECT_EQ(text::to_lower_utf8("ŁÓDŹ"), "łódź");
}

TEST(Text, WordTokens)
{
    EXPECT_EQ(text::word_tokens("We use cookies, OK?"),
              (std::vector<std::string>{"we", "use", "cookies", "ok"}));
    EXPECT_EQ(text::word_tokens("Süßigkeiten-Cookies"), (std::vector<std::string>{"süßigkeiten", "cookies"}));
    EXPECT_EQ(text::word_count(" one two  three "), 3u);
}

TEST(Text, ContainsFolded)
{
    EXPECT_TRUE(text::contains_folded("Cookie-Einstellungen", "cookie"));
    EXPECT_FALSE(text::contains_folded("Biscuits", "cookie"));
}

TEST(Text, Sha256KnownVectors)
{
    EXPECT_EQ(text::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(text::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Text, Base64Decode)
{
    const auto s = text::base64_decode("aGVsbG8=");
    EXPECT_EQ(std::string(s.begin(), s.end()), "hello");
    EXPECT_TRUE(text::base64_decode("").empty());
    const auto t = text::base64_decode("YWI=");
    EXPECT_EQ(std::string(t.begin(), t.end()), "ab");
    EXPECT_THROW(text::base64_decode("a$=="), std::invalid_argument);
}

TEST(Text, LevenshteinSimilarity)
{
    EXPECT_DOUBLE_EQ(text::normalized_levenshtein_similarity("abc", "abc"), 1.0);
    EXPECT_DOUBLE_EQ(text::normalized_levenshtein_similarity("", ""), 1.0);
    EXPECT_DOUBLE_EQ(text::normalized_levenshtein_similarity("kitten", "sitting"), 1.0 - 3.0 / 7.0);
    EXPECT_DOUBLE_EQ(text::normalized_levenshtein_similarity("abc", ""), 0.0);
}

TEST(Domain, HostOf)
{
    EXPECT_EQ(host_of("https://User@WWW.Example.com:8443/a?b"), "www.example.com");
    EXPECT_EQ(host_of("http://127.0.0.1:8080/f/F03"), "127.0.0.1");
    EXPECT_EQ(host_of("/relative/path"), "");
}

TEST(Domain, RegistrableDomain)
{
    EXPECT_EQ(registrable_domain("a.b.example.com"), "example.com");
    EXPECT_EQ(registrable_domain("www.bbc.co.uk"), "bbc.co.uk");
    EXPECT_EQ(registrable_domain("localhost"), "localhost");
    EXPECT_EQ(registrable_domain("10.0.0.1"), "10.0.0.1");
}

TEST(Domain, ChainAndMatching)
{
    EXPECT_EQ(domain_chain("a.b.example.com"),
              (std::vector<std::string>{"a.b.example.com", "b.example.com", "example.com"}));
    EXPECT_TRUE(domain_matches("sport.news.example", "news.example"));
    EXPECT_TRUE(domain_matches("news.example", "news.example"));
    EXPECT_FALSE(domain_matches("badnews.example", "news.example"));
}
