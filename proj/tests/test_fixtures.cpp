#include <doctest.h>

#include "tilq/fixtures.hpp"

using namespace tilq;

TEST_CASE("all embedded examples pass") {
    for (const auto& row : run_examples()) {
        INFO(row.name);
        for (const auto& f : row.failures) MESSAGE(f);
        CHECK(row.pass);
        CHECK(row.checked > 0);
    }
}

TEST_CASE("embedded data validates") {
    for (const auto& f : example_fixtures()) CHECK(f.data.validate().empty());
}

TEST_CASE("corrupted expectation fails its row") {
    auto fixtures = example_fixtures();
    ExampleFixture f = fixtures[2];
    f.expected[1].value(0, 0) += 0.01;
    FixtureRow row = run_fixture(f);
    CHECK_FALSE(row.pass);
    REQUIRE(row.failures.size() == 1);
    CHECK(row.failures[0].rfind(f.expected[1].key, 0) == 0);
}

TEST_CASE("unknown key is reported, not thrown") {
    ExampleFixture f = example_fixtures()[0];
    f.expected.push_back({"nothing.here", Matrix::Zero(1, 1), 0.0});
    FixtureRow row = run_fixture(f);
    CHECK_FALSE(row.pass);
    CHECK(row.failures.back() == "nothing.here: not computed");
}

TEST_CASE("scalar example reports both anchored gains") {
    FixtureRow row = run_fixture(example_fixtures()[0]);
    CHECK(std::abs(row.observed.at("inconsistency.gain_from_t0")(0, 0) + 0.6038) < 5e-4);
    CHECK(std::abs(row.observed.at("inconsistency.gain_from_t1")(0, 0) + 0.4979) < 5e-4);
}
