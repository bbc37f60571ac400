#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "mcsched/instance.hpp"

using namespace mcsched;

namespace {

// Two sources, one destination each, laid out so that simultaneous
// transmission at 300 mW starves destination 0 but not destination 1.
NetworkInstance cross_pair() {
    NetworkInstance inst;
    inst.num_sources = 2;
    inst.groups = {{0}, {1}};
    inst.distances = {{0.5, 1.0},
                      {1.0, 0.5}};
    inst.path_loss_exponent = 3.0;
    inst.noise_power = 0.1;
    return inst;
}

}  // namespace

TEST_CASE("instance config rejects bad parameters") {
    InstanceConfig c;
    c.num_sources = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.group_size = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.path_loss_exponent = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.noise_power = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.distance_min = 0.0;  // zero distance would make the gain singular
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.distance_min = 0.5;
    c.distance_max = 0.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("generation is deterministic per seed") {
    InstanceConfig c;
    c.num_sources = 4;
    c.group_size = 3;
    c.seed = 12345;
    const NetworkInstance a = generate_instance(c);
    const NetworkInstance b = generate_instance(c);
    REQUIRE(a.distances == b.distances);  // bit-identical doubles
    REQUIRE(a.groups == b.groups);

    c.seed = 12346;
    const NetworkInstance d = generate_instance(c);
    CHECK(a.distances != d.distances);
}

TEST_CASE("generated instances are well formed") {
    InstanceConfig c;
    c.num_sources = 3;
    c.group_size = 2;
    c.seed = 7;
    const NetworkInstance inst = generate_instance(c);
    CHECK_NOTHROW(inst.validate());
    CHECK(inst.num_destinations() == 6);
    CHECK(inst.groups[0] == std::vector<int>{0, 1});
    CHECK(inst.groups[2] == std::vector<int>{4, 5});
    for (const auto& row : inst.distances)
        for (double d : row) {
            CHECK(d >= c.distance_min);
            CHECK(d <= c.distance_max);
        }
    CHECK(inst.dest_owner(0) == 0);
    CHECK(inst.dest_owner(5) == 2);
}

TEST_CASE("gain follows the power law") {
    NetworkInstance inst = cross_pair();
    CHECK(inst.gain(0, 1) == 1.0);   // d = 1.0, a = 3
    CHECK(inst.gain(0, 0) == 8.0);   // d = 0.5, a = 3
    inst.distances[0][0] = 0.2;
    inst.path_loss_exponent = 4.0;
    CHECK(inst.gain(0, 0) == Catch::Approx(625.0));
    CHECK_THROWS_AS(inst.gain(2, 0), LookupError);
    CHECK_THROWS_AS(inst.gain(0, 9), LookupError);
}

TEST_CASE("instance validation catches structural defects") {
    NetworkInstance inst = cross_pair();
    CHECK_NOTHROW(inst.validate());

    NetworkInstance bad = cross_pair();
    bad.groups = {{0}, {0}};  // shared destination
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cross_pair();
    bad.distances[1].pop_back();  // short row
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cross_pair();
    bad.distances[0][1] = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cross_pair();
    bad.groups[1].clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sinr matches hand calculations") {
    const NetworkInstance inst = cross_pair();

    const std::vector<double> solo = {300.0, 0.0};
    // 300 * 8 / 0.1, no interference
    CHECK(sinr(inst, solo, 0, 0) == Catch::Approx(24000.0).epsilon(1e-12));
    CHECK(sinr(inst, solo, 1, 1) == 0.0);  // silent transmitter

    const std::vector<double> both = {300.0, 300.0};
    // 300 * 8 / (0.1 + 300 * 1)
    CHECK(sinr(inst, both, 0, 0) == Catch::Approx(2400.0 / 300.1).epsilon(1e-12));
    CHECK(sinr(inst, both, 0, 0) == Catch::Approx(7.997334).margin(1e-5));

    CHECK_THROWS_AS(sinr(inst, std::vector<double>{300.0}, 0, 0), InputError);
    CHECK_THROWS_AS(sinr(inst, std::vector<double>{300.0, -1.0}, 0, 0), DomainError);
}

TEST_CASE("sinr grows when all powers scale up") {
    const NetworkInstance inst = cross_pair();
    const std::vector<double> base = {100.0, 100.0};
    const std::vector<double> doubled = {200.0, 200.0};
    // noise stays fixed, so scaling every transmitter helps everyone
    CHECK(sinr(inst, doubled, 0, 0) > sinr(inst, base, 0, 0));
    CHECK(sinr(inst, doubled, 1, 1) > sinr(inst, base, 1, 1));
}

TEST_CASE("uniform draws stay inside the interval") {
    std::mt19937_64 eng(99);
    for (int k = 0; k < 1000; ++k) {
        const double u = uniform_draw(eng, 0.25, 0.75);
        CHECK(u >= 0.25);
        CHECK(u < 0.75);
    }
}

TEST_CASE("conflict graph flags mutually starving links") {
    const NetworkInstance inst = cross_pair();
    const ConflictGraph g = build_conflict_graph(inst, 300.0, 10.0);
    REQUIRE(g.num_links() == 2);
    // simultaneous activation gives destination 0 a ratio of about 8, below
    // the threshold of 10, so the two links clash
    CHECK(g.num_edges() == 1);
    CHECK(g.conflict(0, 1));
    CHECK(g.conflict(1, 0));
    CHECK_FALSE(g.conflict(0, 0));

    // a looser threshold clears the pair
    const ConflictGraph loose = build_conflict_graph(inst, 300.0, 2.0);
    CHECK(loose.num_edges() == 0);
}

TEST_CASE("links sharing a transmitter never conflict") {
    NetworkInstance inst;
    inst.num_sources = 1;
    inst.groups = {{0, 1}};
    inst.distances = {{0.1, 0.9}};
    inst.path_loss_exponent = 3.0;
    inst.noise_power = 0.1;
    const ConflictGraph g = build_conflict_graph(inst, 300.0, 10.0);
    REQUIRE(g.num_links() == 2);
    CHECK(g.num_edges() == 0);
}
