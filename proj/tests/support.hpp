#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "consentscan/snapshot.hpp"

namespace consentscan::testkit {

/// Small DOM builder: html (id 0) and body (id 1) come pre-made; add() appends in document order.
class PageBuilder {
public:
    explicit PageBuilder(int width = 400, int height = 300, Rgb bg = {255, 255, 255})
        : screenshot_(width, height, bg)
    {
        data_.url = "https://www.example.com/";
        data_.fetched_at = parse_timestamp("2023-06-01T12:00:00Z");
        data_.viewport = {width, height};
        DomNode html;
        html.node_id = 0;
        html.tag = "html";
        html.bbox = {0, 0, double(width), double(height)};
        html.visible = true;
        DomNode body = html;
        body.node_id = 1;
        body.parent_id = 0;
        body.tag = "body";
        data_.nodes = {html, body};
    }

    int add(int parent, const std::string& tag, Rect bbox, const std::string& text = "", int z = 0)
    {
        DomNode n;
        n.node_id = static_cast<int>(data_.nodes.size());
        n.parent_id = parent;
        n.tag = tag;
        n.bbox = bbox;
        n.own_text = text;
        n.z_index = z;
        n.visible = !bbox.empty();
        if (tag == "button" || tag == "a") n.cursor_style = "pointer";
        data_.nodes.push_back(n);
        return n.node_id;
    }

    DomNode& node(int id) { return data_.nodes.at(static_cast<std::size_t>(id)); }
    void attr(int id, const std::string& k, const std::string& v) { node(id).attributes[k] = v; }

    /// Paints a filled rectangle on the screenshot.
    void paint(Rect r, Rgb c)
    {
        screenshot_.fill_rect({int(r.x), int(r.y), int(r.w), int(r.h)}, c);
    }

    RgbImage& screenshot() { return screenshot_; }
    SnapshotData& data() { return data_; }

    PageSnapshot build() const
    {
        SnapshotData d = data_;
        d.screenshot = screenshot_;
        return PageSnapshot(std::move(d));
    }

private:
    SnapshotData data_;
    RgbImage screenshot_;
};

inline RgbImage random_image(std::mt19937_64& rng, int w, int h)
{
    RgbImage img(w, h);
    std::uniform_int_distribution<int> d(0, 255);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.set(x, y, {std::uint8_t(d(rng)), std::uint8_t(d(rng)), std::uint8_t(d(rng))});
        }
    }
    return img;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir()
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("consentscan-test-" + std::to_string(rd()) + "-" +
                                                          std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::filesystem::path source_dir()
{
    return CONSENTSCAN_TEST_SOURCE_DIR;
}

} // namespace consentscan::testkit
