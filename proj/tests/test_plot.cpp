#include <string>

#include <doctest.h>

#include "drtsoh/plot.hpp"

using namespace drtsoh;

namespace {

double attr_value(const std::string& svg, const std::string& name) {
    const std::string needle = name + "=\"";
    const std::size_t at = svg.find(needle);
    REQUIRE(at != std::string::npos);
    return std::stod(svg.substr(at + needle.size()));
}

} // namespace

TEST_SUITE("plot") {

TEST_CASE("svg axes cover the data extrema") {
    std::vector<plot::Series> series;
    series.push_back({"a", {-3.0, 0.0, 2.5}, {0.1, 7.5, 0.4}});
    series.push_back({"b", {-1.0, 4.0}, {-2.0, 3.0}});
    const std::string svg = plot::render_svg(series);
    CHECK(attr_value(svg, "data-xmin") == -3.0);
    CHECK(attr_value(svg, "data-xmax") == 4.0);
    CHECK(attr_value(svg, "data-ymin") == -2.0);
    CHECK(attr_value(svg, "data-ymax") == 7.5);
    CHECK(svg.find("<polyline") != std::string::npos);
    // one polyline and one legend entry per series
    std::size_t count = 0, at = 0;
    while ((at = svg.find("<polyline", at)) != std::string::npos) {
        ++count;
        ++at;
    }
    CHECK(count == 2);
}

TEST_CASE("empty series list renders a valid empty plot") {
    const std::string svg = plot::render_svg({});
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") == std::string::npos);
}

TEST_CASE("rendering is deterministic") {
    std::vector<plot::Series> series{{"s", {0.0, 1.0, 2.0}, {1.0, 0.5, 2.0}}};
    CHECK(plot::render_svg(series) == plot::render_svg(series));
}

} // TEST_SUITE
