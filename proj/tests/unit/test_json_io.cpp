#include "aptsp/errors.hpp"
#include "aptsp/json_io.hpp"

#include <doctest.h>

using namespace aptsp;

TEST_CASE("instance round trip") {
    const Instance a(3, {0, 1, 2, 1, 0, 1.5, 2, 1.5, 0}, {1, 0.25, 0.5}, 0, {"d", "x", "y"});
    const Instance b = instance_from_json(Json::parse(instance_to_json(a).dump()));
    CHECK(b.size() == 3);
    CHECK(b.dist(1, 2) == 1.5);
    CHECK(b.prob(1) == 0.25);
    CHECK(b.depot() == 0);
    CHECK(b.names() == a.names());
}

TEST_CASE("malformed inputs") {
    CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"n":2,"matrix":[[0,1]],"p":[1,1]})")), InvalidInput);
    CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"n":2,"matrix":[[0,1],[1,0]]})")), InvalidInput);
    CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"n":1,"matrix":[["a"]],"p":[1]})")), InvalidInput);
    CHECK_THROWS_AS(tour_from_json(Json::parse(R"({"order":[0,1.5]})")), InvalidInput);
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), InvalidInput);
}

TEST_CASE("tours, active sets, reports and rationals") {
    CHECK(tour_from_json(tour_to_json(Tour({2, 0, 1}))).order() == std::vector<int>{2, 0, 1});
    CHECK(active_set_from_json(active_set_to_json({{1, 4}})).members == std::vector<int>{1, 4});
    ExpectedCostReport r;
    r.value = 2.5;
    const Json j = report_to_json(r);
    CHECK(j["method"] == "exact");
    CHECK(j["stderr"].is_null());
    CHECK(rational_from_json(Json(0.1)) == Rational(1, 10));
    CHECK(rational_from_json(Json("2/6")) == Rational(1, 3));
    CHECK(rational_from_json(Json(7)) == Rational(7));
    CHECK_THROWS_AS(rational_from_json(Json(true)), InvalidInput);
}
