#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include "ksbox/io.hpp"
#include "ksbox/verify.hpp"

TEST_CASE("state dump round-trips exactly", "[io]") {
    ksbox::DomainSpec dom{2.0, 3.5};
    auto f = ksbox::random_field(dom, {5, 4}, 42, 1.0);

    std::ostringstream out;
    ksbox::write_state(out, f);
    const std::string text = out.str();

    std::istringstream in(text);
    auto g = ksbox::read_state(in);
    REQUIRE(g.domain.n == 2);
    REQUIRE(g.resolution == f.resolution);
    REQUIRE(g.domain.lengths == f.domain.lengths);
    REQUIRE(g.coeffs.size() == f.coeffs.size());
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) CHECK(g.coeffs[i] == f.coeffs[i]);

    // a second dump of the loaded field is byte-identical
    std::ostringstream out2;
    ksbox::write_state(out2, g);
    CHECK(out2.str() == text);
}

TEST_CASE("state dump header is pinned", "[io]") {
    ksbox::DomainSpec dom{2.0};
    auto f = ksbox::make_field(dom, {3});
    f.coeffs[1] = 1.0;

    std::ostringstream out;
    ksbox::write_state(out, f);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "1 3 2.0000000000000000e+00");
    std::getline(lines, line);
    CHECK(line == "0.0000000000000000e+00");
    std::getline(lines, line);
    CHECK(line == "1.0000000000000000e+00");
}

TEST_CASE("state loader rejects malformed dumps", "[io]") {
    auto load = [](const std::string& s) {
        std::istringstream in(s);
        return ksbox::read_state(in);
    };
    CHECK_THROWS_AS(load(""), std::runtime_error);
    CHECK_THROWS_AS(load("0 3 1.0\n"), std::runtime_error);           // bad dimension
    CHECK_THROWS_AS(load("1 -3 1.0\n"), std::runtime_error);          // bad resolution
    CHECK_THROWS_AS(load("1 2 -1.0\n0\n0\n"), std::runtime_error);    // bad length
    CHECK_THROWS_AS(load("1 2 1.0\n0\n"), std::runtime_error);        // truncated
    CHECK_THROWS_AS(load("1 2 1.0\n0\n0\n0\n"), std::runtime_error);  // trailing data
    CHECK_THROWS_AS(load("1 2 1.0\nnan\n0\n"), std::runtime_error);   // non-finite
}
