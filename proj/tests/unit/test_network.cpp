#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "supercoh/network.hpp"

using namespace supercoh;

namespace {

double normalization_residual(const InteractionNetwork& net) {
    return std::abs(net.total_abs_weight() - (static_cast<double>(net.size()) - 1.0));
}

}  // namespace

TEST_CASE("all-to-all weights and connectivity") {
    auto net = InteractionNetwork::all_to_all(1000);
    for (std::size_t i = 0; i < 20; ++i) CHECK(net.edges()[i].weight == doctest::Approx(-0.001));
    CHECK(net.connectivity() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(normalization_residual(net) < 1e-9);

    auto tiny = InteractionNetwork::all_to_all(2);
    CHECK(tiny.edges().size() == 1);
    CHECK(tiny.edges()[0].weight == doctest::Approx(-0.5));
    CHECK(tiny.total_abs_weight() == doctest::Approx(1.0));
}

TEST_CASE("ring lattice weights") {
    auto ring = InteractionNetwork::lattice({1000}, true);
    CHECK(ring.edges().size() == 1000);
    CHECK(std::abs(ring.edges()[0].weight) == doctest::Approx(999.0 / 2000.0));
    CHECK(ring.connectivity() == doctest::Approx(2.0 / 999.0));
    CHECK(ring.is_connected());

    auto four = InteractionNetwork::lattice({4}, true);
    CHECK(four.connectivity() == doctest::Approx(2.0 / 3.0));

    auto square = InteractionNetwork::lattice({2, 2}, false);
    CHECK(square.edges().size() == 4);
    CHECK(std::abs(square.edges()[0].weight) == doctest::Approx(3.0 / 8.0));
}

TEST_CASE("lattice normalization across shapes") {
    for (auto dims : {std::vector<std::size_t>{17}, {5, 5}, {3, 4, 5}, {2, 2, 2, 2}}) {
        for (bool periodic : {true, false}) {
            auto net = InteractionNetwork::lattice(dims, periodic);
            CHECK(normalization_residual(net) < 1e-9);
            CHECK(net.is_connected());
        }
    }
}

TEST_CASE("watts-strogatz p=0 equals the ring bitwise") {
    auto ws0 = InteractionNetwork::watts_strogatz(64, 4, 0.0, 7);
    auto ws1 = InteractionNetwork::watts_strogatz(64, 4, 0.0, 12345);
    REQUIRE(ws0.edges().size() == ws1.edges().size());
    for (std::size_t e = 0; e < ws0.edges().size(); ++e) {
        CHECK(ws0.edges()[e].i == ws1.edges()[e].i);
        CHECK(ws0.edges()[e].j == ws1.edges()[e].j);
        CHECK(ws0.edges()[e].weight == ws1.edges()[e].weight);
    }
    // next-nearest ring: every vertex has degree 4
    auto degs = ws0.degrees();
    CHECK(std::all_of(degs.begin(), degs.end(), [](std::size_t d) { return d == 4; }));
}

TEST_CASE("watts-strogatz preserves edge count and degree sum") {
    for (double p : {0.0, 0.3, 1.0}) {
        auto ws = InteractionNetwork::watts_strogatz(1000, 4, p, 99);
        CHECK(ws.edges().size() == 2000);
        CHECK(ws.connectivity() == doctest::Approx(4.0 / 999.0).epsilon(1e-15));
        CHECK(normalization_residual(ws) < 1e-9);
        // no duplicates
        std::vector<std::uint64_t> keys;
        for (const auto& e : ws.edges()) {
            keys.push_back((static_cast<std::uint64_t>(e.i) << 32) | static_cast<std::uint64_t>(e.j));
        }
        std::sort(keys.begin(), keys.end());
        CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
    }
    CHECK_THROWS_AS(InteractionNetwork::watts_strogatz(10, 3, 0.5, 1), ValidationError);
    CHECK_THROWS_AS(InteractionNetwork::watts_strogatz(10, 10, 0.5, 1), ValidationError);
}

TEST_CASE("erdos-renyi complete and empty cases") {
    auto er = InteractionNetwork::erdos_renyi(200, 1.0, 5);
    auto full = InteractionNetwork::all_to_all(200);
    REQUIRE(er.edges().size() == full.edges().size());
    for (std::size_t e = 0; e < er.edges().size(); ++e) {
        CHECK(er.edges()[e].i == full.edges()[e].i);
        CHECK(er.edges()[e].j == full.edges()[e].j);
        CHECK(std::abs(er.edges()[e].weight - full.edges()[e].weight) < 1e-12);
    }
    CHECK_THROWS_AS(InteractionNetwork::erdos_renyi(1000, 0.0, 5), EmptyGraphError);
}

TEST_CASE("erdos-renyi edge count within binomial statistics") {
    const std::size_t n = 1000;
    const double p = 0.01;
    auto er = InteractionNetwork::erdos_renyi(n, p, 42);
    const double pairs = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    const double mean = pairs * p;
    const double sd = std::sqrt(pairs * p * (1.0 - p));
    CHECK(std::abs(static_cast<double>(er.edges().size()) - mean) < 5.0 * sd);
    CHECK(normalization_residual(er) < 1e-9);
}

TEST_CASE("barabasi-albert structure") {
    auto complete = InteractionNetwork::barabasi_albert(5, 4, 11);
    CHECK(complete.edges().size() == 10);  // m = n-1 forces completeness

    auto ba = InteractionNetwork::barabasi_albert(1000, 2, 31);
    CHECK(ba.edges().size() == 3 + 998 * 2);
    CHECK(ba.is_connected());
    CHECK(normalization_residual(ba) < 1e-9);

    CHECK_THROWS_AS(InteractionNetwork::barabasi_albert(10, 0, 1), ValidationError);
    CHECK_THROWS_AS(InteractionNetwork::barabasi_albert(10, 10, 1), ValidationError);
}

TEST_CASE("barabasi-albert degree distribution is heavy tailed") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto ba = InteractionNetwork::barabasi_albert(1000, 2, seed);
        auto degs = ba.degrees();
        std::sort(degs.begin(), degs.end());
        const double median = static_cast<double>(degs[degs.size() / 2]);
        const double max = static_cast<double>(degs.back());
        CHECK(max > 10.0 * median);
    }
}

TEST_CASE("generators are deterministic given parameters and seed") {
    for (int pass = 0; pass < 2; ++pass) {
        auto a = InteractionNetwork::erdos_renyi(300, 0.02, 77);
        auto b = InteractionNetwork::erdos_renyi(300, 0.02, 77);
        REQUIRE(a.edges().size() == b.edges().size());
        for (std::size_t e = 0; e < a.edges().size(); ++e) {
            CHECK(a.edges()[e].i == b.edges()[e].i);
            CHECK(a.edges()[e].j == b.edges()[e].j);
        }
    }
}

TEST_CASE("edge list round trip") {
    auto ws = InteractionNetwork::watts_strogatz(128, 4, 0.4, 9, Sign::Repulsive);
    std::stringstream ss;
    ws.save_edge_list(ss);
    auto loaded = InteractionNetwork::load_edge_list(ss);
    CHECK(loaded.size() == ws.size());
    CHECK(loaded.sign() == ws.sign());
    REQUIRE(loaded.edges().size() == ws.edges().size());
    for (std::size_t e = 0; e < ws.edges().size(); ++e) {
        CHECK(loaded.edges()[e].i == ws.edges()[e].i);
        CHECK(loaded.edges()[e].j == ws.edges()[e].j);
        CHECK(loaded.edges()[e].weight == ws.edges()[e].weight);  // full-precision format
    }
}

TEST_CASE("network spec grammar") {
    auto all = NetworkSpec::parse("all");
    CHECK(all.family == NetworkSpec::Family::All);
    CHECK(all.sign == Sign::Attractive);

    auto ws = NetworkSpec::parse("ws:k=4,p=1");
    CHECK(ws.family == NetworkSpec::Family::WattsStrogatz);
    CHECK(ws.k == 4);
    CHECK(ws.p == doctest::Approx(1.0));

    auto lat = NetworkSpec::parse("lattice:d=10x10,periodic=false,sign=+");
    CHECK(lat.dims == std::vector<std::size_t>{10, 10});
    CHECK_FALSE(lat.periodic);
    CHECK(lat.sign == Sign::Repulsive);

    CHECK_THROWS_AS(NetworkSpec::parse("ws:k=3,p=0.5"), ParseError);
    CHECK_THROWS_AS(NetworkSpec::parse("er:p=1.5"), ParseError);
    CHECK_THROWS_AS(NetworkSpec::parse("blah"), ParseError);
    CHECK_THROWS_AS(NetworkSpec::parse("ws:k=4"), ParseError);  // missing p
    CHECK_THROWS_AS(NetworkSpec::parse(""), ParseError);

    try {
        NetworkSpec::parse("ws:k=4,q=2");
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.position() == 5);  // points at the offending key
    }
}
