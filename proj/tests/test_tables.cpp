#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dyadic/table_map.hpp"
#include "oracles.hpp"

using namespace dyadic;

namespace {

LeafPerm rand_leaf_perm(std::mt19937_64& rng, int level) {
    std::vector<std::uint32_t> img(std::size_t(1) << level);
    std::iota(img.begin(), img.end(), 0u);
    for (std::size_t i = img.size(); i > 1; --i) std::swap(img[i - 1], img[rng() % i]);
    return LeafPerm::from_images(level, std::move(img));
}

FullMap rand_full(std::mt19937_64& rng, int max_level) {
    return from_leaf_perm(rand_leaf_perm(rng, 1 + static_cast<int>(rng() % max_level)));
}

} // namespace

TEST_CASE("table construction canonicalizes") {
    const TableMap merged = TableMap::from_pairs(
        {{parse_word("00"), parse_word("10")}, {parse_word("01"), parse_word("11")}});
    REQUIRE(merged.rows().size() == 1);
    CHECK(merged.rows().front().src == parse_word("0"));
    CHECK(merged.rows().front().dst == parse_word("1"));

    const TableMap crossed = TableMap::from_pairs(
        {{parse_word("00"), parse_word("11")}, {parse_word("01"), parse_word("10")}});
    CHECK(crossed.rows().size() == 2);

    CHECK(TableMap::identity().rows().size() == 1);
    CHECK(TableMap::identity().is_full());
}

TEST_CASE("table construction rejects malformed rows") {
    CHECK_THROWS_AS(TableMap::from_pairs({{parse_word("0"), parse_word("11")}}), DomainError);
    CHECK_THROWS_AS(TableMap::from_pairs({{parse_word("0"), parse_word("1")},
                                          {parse_word("01"), parse_word("00")}}),
                    DomainError);
    CHECK_THROWS_AS(TableMap::from_pairs({{parse_word("0"), parse_word("1")},
                                          {parse_word("0"), parse_word("0")}}),
                    DomainError);
    CHECK_THROWS_AS(TableMap::from_pairs({{parse_word("0"), parse_word("1")},
                                          {parse_word("1"), parse_word("1")}}),
                    DomainError);
}

TEST_CASE("prefix application walks the right row") {
    const TableMap swap = TableMap::from_pairs(
        {{parse_word("0"), parse_word("1")}, {parse_word("1"), parse_word("0")}});
    CHECK(apply_prefix(swap, parse_word("01")) == parse_word("11"));
    CHECK(apply_prefix(swap, parse_word("1")) == parse_word("0"));

    const TableMap fine = TableMap::from_pairs(
        {{parse_word("00"), parse_word("01")}, {parse_word("01"), parse_word("00")}});
    CHECK_THROWS_WITH(apply_prefix(fine, parse_word("0")),
                      Catch::Matchers::ContainsSubstring("coarser than table row source"));
    CHECK_THROWS_WITH(apply_prefix(fine, parse_word("10")),
                      Catch::Matchers::ContainsSubstring("outside the domain"));
}

TEST_CASE("composition and inverse agree with pointwise evaluation") {
    std::mt19937_64 rng(101);
    for (int it = 0; it < 300; ++it) {
        const FullMap f = rand_full(rng, 5);
        const FullMap g = rand_full(rng, 5);
        const TableMap k = compose(f, g);
        for (std::uint64_t leaf = 0; leaf < 64; ++leaf)
            CHECK(oracle::apply_leaf(k, leaf, 6) ==
                  oracle::apply_leaf(f, oracle::apply_leaf(g, leaf, 6), 6));
        CHECK(compose(f, inverse(f)) == TableMap::identity());
        CHECK(compose(inverse(f), f) == TableMap::identity());
    }
}

TEST_CASE("uniform distance agrees with leaf counting") {
    std::mt19937_64 rng(103);
    const Lambda l12(Rat(1, 2)), l23(Rat(2, 3));
    for (int it = 0; it < 200; ++it) {
        const FullMap f = rand_full(rng, 5);
        const FullMap g = rand_full(rng, 5);
        CHECK(du(f, g, l12) == oracle::naive_du(f, g, l12, 6));
        CHECK(du(f, g, l23) == oracle::naive_du(f, g, l23, 6));
        CHECK(du(f, f, l23) == 0);
    }
    const TableMap swap = TableMap::from_pairs(
        {{parse_word("0"), parse_word("1")}, {parse_word("1"), parse_word("0")}});
    CHECK(du(swap, TableMap::identity(), l23) == 1);
}

TEST_CASE("support finds the moved part") {
    const TableMap swap = TableMap::from_pairs(
        {{parse_word("0"), parse_word("1")}, {parse_word("1"), parse_word("0")}});
    CHECK(support(swap) == CylinderSet::full());
    const TableMap half = TableMap::from_pairs({{parse_word("00"), parse_word("01")},
                                                {parse_word("01"), parse_word("00")},
                                                {parse_word("1"), parse_word("1")}});
    CHECK(support(half) == CylinderSet::canonical({parse_word("0")}));
    CHECK(support(TableMap::identity()).empty());
}

TEST_CASE("derivative values are destination over source mass") {
    const TableMap swap = TableMap::from_pairs(
        {{parse_word("0"), parse_word("1")}, {parse_word("1"), parse_word("0")}});
    const auto at13 = rn_cocycle(swap, Lambda(Rat(1, 3)));
    REQUIRE(at13.size() == 2);
    CHECK(at13[0] == std::pair{parse_word("0"), Rat(2)});
    CHECK(at13[1] == std::pair{parse_word("1"), Rat(1, 2)});

    const TableMap corner = TableMap::from_pairs({{parse_word("00"), parse_word("11")}});
    const auto at23 = rn_cocycle(corner, Lambda(Rat(2, 3)));
    REQUIRE(at23.size() == 1);
    CHECK(at23[0].second == Rat(1, 4));

    std::mt19937_64 rng(107);
    const Lambda l12(Rat(1, 2));
    for (int it = 0; it < 50; ++it)
        for (const auto& [w, v] : rn_cocycle(rand_full(rng, 6), l12)) CHECK(v == 1);
}

TEST_CASE("gluing merges disjoint partial maps") {
    const TableMap a = TableMap::from_pairs({{parse_word("00"), parse_word("01")}});
    const TableMap b = TableMap::from_pairs({{parse_word("01"), parse_word("00")}});
    const TableMap c = TableMap::from_pairs({{parse_word("1"), parse_word("1")}});
    const TableMap whole = glue({a, b, c});
    CHECK(whole.is_full());
    CHECK(whole.rows().size() == 3);
    CHECK_THROWS_AS(glue({a, a}), DomainError);
}

TEST_CASE("odometer truncation carries and leaves the all-ones defect") {
    const TruncatedMap o = odometer(3);
    REQUIRE(o.table.rows().size() == 3);
    CHECK(o.table.rows()[0] == TablePair{parse_word("0"), parse_word("1")});
    CHECK(o.table.rows()[1] == TablePair{parse_word("10"), parse_word("01")});
    CHECK(o.table.rows()[2] == TablePair{parse_word("110"), parse_word("001")});
    CHECK(o.defect_dom == CylinderSet::canonical({parse_word("111")}));
    CHECK(o.defect_rng == CylinderSet::canonical({parse_word("000")}));
    CHECK(mu(o.defect_dom, Lambda(Rat(2, 3))) == Rat(1, 27));
    CHECK(kraft(o.table.domain()) == Rat(7, 8));
    CHECK_THROWS_AS(odometer(0), DomainError);
}

TEST_CASE("leaf permutations round-trip through tables") {
    std::mt19937_64 rng(109);
    for (int it = 0; it < 200; ++it) {
        const int level = 1 + static_cast<int>(rng() % 5);
        const LeafPerm p = rand_leaf_perm(rng, level);
        const FullMap f = from_leaf_perm(p);
        CHECK(to_leaf_perm(f, level) == p);
        const LeafPerm q = rand_leaf_perm(rng, level);
        CHECK(from_leaf_perm(compose(p, q)).table() ==
              compose(from_leaf_perm(p), from_leaf_perm(q)));
    }
    const TableMap swap = TableMap::from_pairs(
        {{parse_word("0"), parse_word("1")}, {parse_word("1"), parse_word("0")}});
    const LeafPerm refined = to_leaf_perm(FullMap(swap), 2);
    CHECK(refined.img == std::vector<std::uint32_t>{2, 3, 0, 1});
    CHECK_THROWS_AS(to_leaf_perm(FullMap(swap), 0), DomainError);
}

TEST_CASE("identity on a set fixes exactly that set") {
    const auto a = CylinderSet::canonical({parse_word("01"), parse_word("1")});
    const TableMap f = TableMap::identity_on(a);
    CHECK(f.domain() == a);
    CHECK(f.range() == a);
    for (const auto& row : f.rows()) CHECK(row.src == row.dst);
}
