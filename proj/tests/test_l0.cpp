#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dyadic/step_fn.hpp"
#include "oracles.hpp"

using namespace dyadic;

namespace {

Perm rand_perm(std::mt19937_64& rng, int degree) {
    std::vector<std::uint32_t> img(static_cast<std::size_t>(degree));
    std::iota(img.begin(), img.end(), 0u);
    for (std::size_t i = img.size(); i > 1; --i) std::swap(img[i - 1], img[rng() % i]);
    return Perm::from_images(std::move(img));
}

StepFn<Perm> rand_step(std::mt19937_64& rng, int degree, int maxd) {
    std::vector<Word> stack{Word{}};
    std::vector<std::pair<Word, Perm>> pieces;
    while (!stack.empty()) {
        const Word w = stack.back();
        stack.pop_back();
        if (w.size() < maxd && rng() % 2 == 0) {
            stack.push_back(w.push(0));
            stack.push_back(w.push(1));
        } else {
            pieces.emplace_back(w, rand_perm(rng, degree));
        }
    }
    return StepFn<Perm>::from_pieces(std::move(pieces));
}

} // namespace

TEST_CASE("step functions canonicalize and validate") {
    const auto c = StepFn<int>::from_pieces(
        {{parse_word("0"), 5}, {parse_word("10"), 5}, {parse_word("11"), 5}});
    CHECK(c == StepFn<int>::constant(5));
    CHECK(c.pieces().size() == 1);

    CHECK_THROWS_AS(StepFn<int>::from_pieces({{parse_word("0"), 1}}), DomainError);
    CHECK_THROWS_AS(StepFn<int>::from_pieces({{parse_word("0"), 1},
                                              {parse_word("1"), 2},
                                              {parse_word("11"), 3}}),
                    DomainError);

    const auto f = StepFn<int>::from_pieces({{parse_word("0"), 1}, {parse_word("1"), 2}});
    CHECK(f.value_at(parse_word("00")) == 1);
    CHECK(f.value_at(parse_word("1")) == 2);
}

TEST_CASE("pointwise products form a group") {
    std::mt19937_64 rng(201);
    const auto e = StepFn<Perm>::constant(Perm::identity(4));
    for (int it = 0; it < 300; ++it) {
        const auto f = rand_step(rng, 4, 4);
        const auto g = rand_step(rng, 4, 4);
        const auto h = rand_step(rng, 4, 4);
        CHECK(l0_product(l0_product(f, g), h) == l0_product(f, l0_product(g, h)));
        CHECK(l0_product(f, l0_inverse(f)) == e);
        CHECK(l0_product(l0_inverse(f), f) == e);
        CHECK(l0_product(f, e) == f);
    }
    CHECK_THROWS_AS(l0_product(StepFn<Perm>::constant(Perm::identity(3)), e), DomainError);
}

TEST_CASE("gauge measures the disagreement set") {
    const Lambda l23(Rat(2, 3));
    const Perm swap = Perm::from_images({1, 0});
    const auto id = StepFn<Perm>::constant(Perm::identity(2));
    CHECK(gauge(StepFn<Perm>::constant(swap), id, l23) == 1);
    CHECK(gauge(id, id, l23) == 0);
    const auto half = StepFn<Perm>::from_pieces(
        {{parse_word("0"), swap}, {parse_word("1"), Perm::identity(2)}});
    CHECK(gauge(half, id, l23) == Rat(2, 3));
    CHECK(gauge(half, id, Lambda(Rat(1, 2))) == Rat(1, 2));
}

TEST_CASE("point gauge sees single coordinates") {
    const Lambda l23(Rat(2, 3));
    const auto id4 = StepFn<Perm>::constant(Perm::identity(4));
    const auto move2 = StepFn<Perm>::constant(Perm::from_images({0, 1, 3, 2}));
    CHECK(gauge_at_point(move2, id4, 0, l23) == 0);
    CHECK(gauge_at_point(move2, id4, 2, l23) == 1);
    CHECK_THROWS_AS(gauge_at_point(move2, id4, 4, l23), DomainError);
}

TEST_CASE("contraction keeps the map left of the parameter") {
    const auto f = StepFn<int>::from_pieces({{parse_word("0"), 7}, {parse_word("1"), 9}});
    CHECK(contraction(f, Rat(1), 3) == f);
    CHECK(contraction(f, Rat(0), 3) == StepFn<int>::constant(3));
    CHECK(contraction(f, Rat(1, 2), 3) ==
          StepFn<int>::from_pieces({{parse_word("0"), 7}, {parse_word("1"), 3}}));
    CHECK(contraction(f, Rat(3, 4), 3) ==
          StepFn<int>::from_pieces(
              {{parse_word("0"), 7}, {parse_word("10"), 9}, {parse_word("11"), 3}}));
    CHECK_THROWS_AS(contraction(f, Rat(1, 3), 3), DomainError);
    CHECK_THROWS_AS(contraction(f, Rat(3, 2), 3), DomainError);
}

TEST_CASE("metric validation catches bad matrices") {
    CHECK_THROWS_AS(FiniteMetric::from_matrix({{Rat(0), Rat(1)}, {Rat(2), Rat(0)}}), DomainError);
    CHECK_THROWS_AS(FiniteMetric::from_matrix({{Rat(1)}}), DomainError);
    CHECK_THROWS_AS(FiniteMetric::from_matrix({{Rat(0), Rat(5), Rat(1)},
                                               {Rat(5), Rat(0), Rat(1)},
                                               {Rat(1), Rat(1), Rat(0)}}),
                    DomainError);
    CHECK(FiniteMetric::discrete(3).d(0, 2) == 1);
    CHECK(FiniteMetric::discrete(3).d(1, 1) == 0);
}

TEST_CASE("quantization picks the first net point strictly within budget") {
    const auto f = StepFn<int>::from_pieces({{parse_word("0"), 0}, {parse_word("1"), 1}});
    const FiniteMetric m = FiniteMetric::discrete(4);
    CHECK(quantize(f, m, {3, 1}, Rat(2)) == StepFn<int>::constant(3));
    CHECK(quantize(f, m, {0, 1, 2, 3}, Rat(1, 2)) == f);
    CHECK_THROWS_WITH(quantize(f, m, {3, 1}, Rat(1)),
                      Catch::Matchers::ContainsSubstring("net is not 1/1-dense at value 0"));
    CHECK_THROWS_AS(quantize(f, m, {7}, Rat(1)), DomainError);
}

TEST_CASE("orbit membership produces a checkable witness") {
    const FiniteGroup c3 = FiniteGroup::cyclic(3);
    const auto f = StepFn<int>::from_pieces(
        {{parse_word("0"), 1}, {parse_word("10"), 2}, {parse_word("11"), 0}});
    const auto r = orbit_member(f, c3, 0);
    REQUIRE(r.member);
    REQUIRE(r.witness.has_value());
    const auto hits = zip_with(*r.witness, f, [](const Perm& g, int v) {
        return static_cast<int>(g(0)) == v ? 1 : 0;
    });
    CHECK(hits == StepFn<int>::constant(1));

    const FiniteGroup trivial = FiniteGroup::from_generators(3, {Perm::identity(3)});
    const auto miss = orbit_member(f, trivial, 0);
    CHECK_FALSE(miss.member);
    REQUIRE(miss.offending.has_value());
    CHECK(miss.offending->first == parse_word("0"));
    CHECK(miss.offending->second == 1);
}

TEST_CASE("block conjugation returns the least solution") {
    const Perm t = Perm::from_images({1, 2, 0});
    const Perm s = Perm::from_images({2, 0, 1});
    const auto g = cyclic_block_conjugate({StepFn<Perm>::constant(s)},
                                          {StepFn<Perm>::constant(t)}, {t});
    REQUIRE(g.pieces().size() == 1);
    CHECK(g.pieces().front().second == Perm::from_images({0, 2, 1}));
    const Perm v = g.pieces().front().second;
    CHECK(v * t * v.inverse() == s);

    const Perm flip = Perm::from_images({1, 0, 2});
    CHECK_THROWS_WITH(cyclic_block_conjugate({StepFn<Perm>::constant(flip)},
                                             {StepFn<Perm>::constant(t)}, {t}),
                      Catch::Matchers::ContainsSubstring("not conjugate to the reference tuple"));
}

TEST_CASE("leaf-shift embedding produces the expected pieces") {
    const LeafPerm rot = LeafPerm::from_images(2, {1, 2, 3, 0});
    CHECK(phi_embed(rot) == StepFn<Perm>::constant(Perm::from_images({1, 2, 3, 0})));
    CHECK(phi_embed(LeafPerm::identity(2)) == StepFn<Perm>::constant(Perm::identity(4)));

    const LeafPerm swap01 = LeafPerm::from_images(2, {1, 0, 2, 3});
    const auto f = phi_embed(swap01);
    REQUIRE(f.pieces().size() == 4);
    CHECK(f.value_at(parse_word("00")) == Perm::from_images({1, 0, 2, 3}));
    CHECK(f.value_at(parse_word("01")) == Perm::from_images({3, 1, 2, 0}));
    CHECK(f.value_at(parse_word("10")) == Perm::from_images({0, 1, 3, 2}));
    CHECK(f.value_at(parse_word("11")) == Perm::from_images({0, 2, 1, 3}));

    const Lambda l23(Rat(2, 3));
    CHECK(gauge_at_point(f, StepFn<Perm>::constant(Perm::identity(4)), 0, l23) == Rat(2, 3));
}
