#include "doctest.h"

#include "mvsne/svg.hpp"

using namespace mvsne;

namespace {

std::vector<ScatterPoint> toy_points() {
    return {
        {0.0, 0.0, 0, true},  {1.0, 0.5, 0, true},  {4.0, 4.0, 1, true},
        {4.5, 3.5, 1, false}, {-2.0, 3.0, 2, true}, {-2.5, 2.5, 2, false},
    };
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

}  // namespace

TEST_CASE("three classes produce three legend entries") {
    auto svg = render_scatter(toy_points(), {"alpha", "beta", "gamma"}, {});
    CHECK(svg.find("alpha") != std::string::npos);
    CHECK(svg.find("beta") != std::string::npos);
    CHECK(svg.find("gamma") != std::string::npos);
    // four train circles + two test squares
    CHECK(count_occurrences(svg, "<circle") >= 4);
    CHECK(count_occurrences(svg, "<rect") >= 2);
}

TEST_CASE("all-train input renders no test squares") {
    auto pts = toy_points();
    for (auto& p : pts) p.train = true;
    auto svg = render_scatter(pts, {"a", "b", "c"}, {});
    // the only rect is the background canvas
    CHECK(count_occurrences(svg, "<rect") == 1);
}

TEST_CASE("rendering is byte-deterministic") {
    ScatterOptions opt;
    opt.title = "fixed";
    auto a = render_scatter(toy_points(), {"a", "b", "c"}, opt);
    auto b = render_scatter(toy_points(), {"a", "b", "c"}, opt);
    CHECK(a == b);
}

TEST_CASE("black-squares option paints test markers black") {
    ScatterOptions opt;
    opt.black_test_squares = true;
    auto svg = render_scatter(toy_points(), {"a", "b", "c"}, opt);
    CHECK(svg.find("#000000") != std::string::npos);
}

TEST_CASE("legend lists only classes present in the points") {
    std::vector<ScatterPoint> pts = {{0, 0, 0, true}, {1, 1, 0, false}};
    auto svg = render_scatter(pts, {"used", "unused"}, {});
    CHECK(svg.find("used") != std::string::npos);
    CHECK(svg.find("unused") == std::string::npos);
}

TEST_CASE("titles are XML-escaped") {
    ScatterOptions opt;
    opt.title = "a<b & c>d";
    auto svg = render_scatter(toy_points(), {"a", "b", "c"}, opt);
    CHECK(svg.find("a&lt;b &amp; c&gt;d") != std::string::npos);
    CHECK(svg.find("a<b") == std::string::npos);
}

TEST_CASE("unlabelled points render in the neutral colour") {
    std::vector<ScatterPoint> pts = {{0, 0, -1, true}, {1, 1, 0, true}};
    auto svg = render_scatter(pts, {"only"}, {});
    CHECK(svg.find("#444444") != std::string::npos);
}

TEST_CASE("non-finite coordinates are rejected") {
    std::vector<ScatterPoint> pts = {{std::nan(""), 0, 0, true}};
    CHECK_THROWS_AS(render_scatter(pts, {"a"}, {}), DataError);
    std::vector<ScatterPoint> bad_label = {{0, 0, 5, true}};
    CHECK_THROWS_AS(render_scatter(bad_label, {"a"}, {}), DataError);
    CHECK_THROWS_AS(render_scatter({}, {"a"}, {}), DataError);
}

TEST_CASE("degenerate spans still produce finite geometry") {
    std::vector<ScatterPoint> pts = {{2, 2, 0, true}, {2, 2, 0, false}};
    auto svg = render_scatter(pts, {"a"}, {});
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);
}
