#include <catch2/catch_amalgamated.hpp>

#include "dyadic/equidecompose.hpp"
#include "oracles.hpp"

using namespace dyadic;

TEST_CASE("binomial table") {
    CHECK(binom(0, 0) == 1);
    CHECK(binom(7, 3) == 35);
    CHECK(binom(25, 13) == 5200300);
    CHECK(binom(5, 6) == 0);
    CHECK(binom(5, -1) == 0);
    Int row = 0;
    for (int k = 0; k <= 20; ++k) row += binom(20, k);
    CHECK(row == (Int(1) << 20));
}

TEST_CASE("transport order respects kraft comparison") {
    const auto a = CylinderSet::canonical({parse_word("10")});
    const auto b = CylinderSet::canonical({parse_word("0")});
    CHECK_FALSE(prec(b, a).possible);
    const auto p = prec(a, b);
    REQUIRE(p.possible);
    CHECK(p.kraft_a == Rat(1, 4));
    CHECK(p.kraft_b == Rat(1, 2));
    REQUIRE(p.map.rows().size() == 1);
    CHECK(p.map.rows().front() == TablePair{parse_word("10"), parse_word("00")});
    CHECK_THROWS_AS(prec(CylinderSet{}, b), DomainError);
}

TEST_CASE("equal kraft gives an exact rearrangement") {
    const auto a = CylinderSet::canonical({parse_word("00"), parse_word("1")});
    const auto b = CylinderSet::canonical(
        {parse_word("0"), parse_word("110"), parse_word("111")});
    const auto res = equidecompose_onto(a, b, Lambda(Rat(2, 3)), Rat(1, 100));
    CHECK(res.rounds == 0);
    CHECK(res.uncovered_dom.empty());
    CHECK(res.uncovered_rng.empty());
    CHECK(res.map.domain() == a);
    CHECK(res.map.range() == b);
}

TEST_CASE("shedding the lightest leaves of the heavy side") {
    const Lambda l23(Rat(2, 3));
    const auto a = CylinderSet::canonical({parse_word("0")});
    const auto b = CylinderSet::canonical({parse_word("10")});

    const auto quick = equidecompose_onto(a, b, l23, Rat(1, 2));
    CHECK(quick.rounds == 1);
    CHECK(quick.masses == std::vector<Rat>{Rat(2, 9)});
    CHECK(quick.uncovered_dom == CylinderSet::canonical({parse_word("01")}));
    CHECK(quick.uncovered_rng.empty());
    REQUIRE(quick.map.rows().size() == 1);
    CHECK(quick.map.rows().front() == TablePair{parse_word("00"), parse_word("10")});

    const auto fine = equidecompose_onto(a, b, l23, Rat(1, 8));
    CHECK(fine.rounds == 7);
    CHECK(fine.masses.back() == Rat(758, 6561));
    CHECK(mu(fine.uncovered_dom, l23) == Rat(758, 6561));
    CHECK(kraft(fine.uncovered_dom) == Rat(1, 4));
    for (std::size_t i = 0; i < fine.masses.size(); ++i) {
        const int level = 2 + static_cast<int>(i);
        CHECK(fine.masses[i] ==
              oracle::naive_lightest_mass(a, level, std::uint64_t(1) << (level - 2), l23));
    }
}

TEST_CASE("heavier sides with several words shed canonically") {
    const Lambda l23(Rat(2, 3));
    const auto a = CylinderSet::full();
    const auto b = CylinderSet::canonical({parse_word("0")});
    const auto res = equidecompose_onto(a, b, l23, Rat(1, 3));
    CHECK(res.rounds == 1);
    CHECK(res.masses == std::vector<Rat>{Rat(1, 3)});
    CHECK(res.uncovered_dom == CylinderSet::canonical({parse_word("1")}));
    CHECK(res.map.range() == b);
    CHECK(res.map.domain() == CylinderSet::canonical({parse_word("0")}));
    CHECK(res.map.rows() == std::vector<TablePair>{{parse_word("0"), parse_word("0")}});
}

TEST_CASE("light domains get carried into the heavy side") {
    const Lambda l23(Rat(2, 3));
    const auto a = CylinderSet::canonical({parse_word("10")});
    const auto b = CylinderSet::canonical({parse_word("0")});
    const auto res = equidecompose_onto(a, b, l23, Rat(1, 2));
    CHECK(res.uncovered_dom.empty());
    CHECK(mu(res.uncovered_rng, l23) <= Rat(1, 2));
    CHECK(res.map.domain() == a);
    CHECK(disjoint(res.map.range(), res.uncovered_rng));
    CHECK(set_union(res.map.range(), res.uncovered_rng) == b);
}

TEST_CASE("invariant measure obstructs unequal kraft") {
    const auto a = CylinderSet::canonical({parse_word("0")});
    const auto b = CylinderSet::canonical({parse_word("10")});
    CHECK_THROWS_WITH(equidecompose_onto(a, b, Lambda(Rat(1, 2)), Rat(1, 4)),
                      Catch::Matchers::ContainsSubstring("invariant-measure obstruction"));
}

TEST_CASE("depth bound failures carry the exact floor") {
    const auto a = CylinderSet::canonical({parse_word("0")});
    const auto b = CylinderSet::canonical({parse_word("10")});
    CHECK_THROWS_WITH(equidecompose_onto(a, b, Lambda(Rat(2, 3)), Rat(1, 128)),
                      Catch::Matchers::ContainsSubstring("cannot reach leftover <= 1/128"));
    CHECK_THROWS_WITH(equidecompose_onto(a, b, Lambda(Rat(2, 3)), Rat(1, 128)),
                      Catch::Matchers::ContainsSubstring("within depth 32"));
}

TEST_CASE("partial map defect distance") {
    const Lambda l23(Rat(2, 3));
    const TableMap id = TableMap::identity();
    const TableMap part = TableMap::identity_on(CylinderSet::canonical({parse_word("0")}));
    CHECK(defect_du(part, id, l23) == Rat(1, 3));
    const TableMap moved = TableMap::from_pairs({{parse_word("0"), parse_word("1")}});
    CHECK(defect_du(moved, id, l23) == 1);
    CHECK(defect_du(id, id, l23) == 0);
    CHECK_THROWS_AS(defect_du(id, part, l23), DomainError);
}

TEST_CASE("three-cycle ladders cube to the identity") {
    const Lambda l23(Rat(2, 3));
    const auto [phi, psi] = pre_three_cycle(l23);
    CHECK(phi.rows().size() == 1);
    CHECK(phi.rows().front() == TablePair{parse_word("00"), parse_word("01")});
    CHECK(psi.rows().front() == TablePair{parse_word("01"), parse_word("10")});

    const FullMap c = three_cycle(phi, psi);
    const TableMap expected = TableMap::from_pairs({{parse_word("00"), parse_word("01")},
                                                    {parse_word("01"), parse_word("10")},
                                                    {parse_word("10"), parse_word("00")},
                                                    {parse_word("11"), parse_word("11")}});
    CHECK(c.table() == expected);
    CHECK(compose(c, compose(c, c)) == TableMap::identity());
    CHECK(mu(support(c), l23) == Rat(8, 9));

    CHECK_THROWS_AS(three_cycle(phi, phi), DomainError);
    const TableMap overlap = TableMap::from_pairs({{parse_word("00"), parse_word("00")}});
    CHECK_THROWS_AS(three_cycle(overlap, psi), DomainError);
}
