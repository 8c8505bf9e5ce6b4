#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "dyadic/selftest.hpp"

// End-to-end acceptance suite: one test per criterion, each printing a
// single verdict line. The fixed seed keeps every run identical.

namespace {

constexpr std::uint64_t kSeed = 20260817;

void run(int index) {
    const dyadic::CriterionResult r = dyadic::run_criterion(index, kSeed);
    std::printf("criterion %d (%s): %s [%.2fs] %s\n", r.index, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    std::fflush(stdout);
    INFO(r.detail);
    CHECK(r.pass);
}

} // namespace

TEST_CASE("full-group algebra", "[c1]") { run(1); }
TEST_CASE("cocycle chain rule", "[c2]") { run(2); }
TEST_CASE("leaf-shift embedding", "[c3]") { run(3); }
TEST_CASE("tuple conjugation", "[c4]") { run(4); }
TEST_CASE("equidecomposition", "[c5]") { run(5); }
TEST_CASE("densification", "[c6]") { run(6); }
TEST_CASE("three-cycle ladder", "[c7]") { run(7); }
TEST_CASE("pointwise toolkit", "[c8]") { run(8); }
TEST_CASE("census invariance", "[c9]") { run(9); }
