#include <catch2/catch_amalgamated.hpp>

#include "dyadic/json_io.hpp"

using namespace dyadic;

TEST_CASE("cylinder sets round-trip as sorted word arrays") {
    const auto a = CylinderSet::canonical({parse_word("10"), parse_word("0")});
    const Json j = to_json(a);
    REQUIRE(j.is_array());
    CHECK(j[0] == "0");
    CHECK(j[1] == "10");
    CHECK(cylinder_from_json(j) == a);
    CHECK(cylinder_from_json(parse_json(dump_json(j))) == a);
    CHECK(cylinder_from_json(Json::array()) == CylinderSet{});
    CHECK_THROWS_AS(cylinder_from_json(Json{{"not", "array"}}), ParseError);
    CHECK_THROWS_AS(cylinder_from_json(Json::array({"02"})), ParseError);
}

TEST_CASE("tables round-trip as pair lists") {
    const TableMap f = TableMap::from_pairs({{parse_word("00"), parse_word("01")},
                                             {parse_word("01"), parse_word("00")},
                                             {parse_word("1"), parse_word("1")}});
    const Json j = to_json(f);
    CHECK(table_from_json(j) == f);
    CHECK(table_from_json(parse_json(dump_json(j))) == f);
    CHECK_THROWS_AS(table_from_json(Json{{"pairs", 3}}), ParseError);
    CHECK_THROWS_AS(table_from_json(Json::array()), ParseError);
}

TEST_CASE("truncated maps carry their defects") {
    const TruncatedMap o = odometer(4);
    const Json j = to_json(o);
    const TruncatedMap back = truncated_from_json(j);
    CHECK(back.table == o.table);
    CHECK(back.defect_dom == o.defect_dom);
    CHECK(back.defect_rng == o.defect_rng);
}

TEST_CASE("step functions name their group and list pieces") {
    const auto f = phi_embed(LeafPerm::from_images(2, {1, 0, 2, 3}));
    const Json j = to_json(f);
    CHECK(j["group"] == "S_4");
    REQUIRE(j["pieces"].is_array());
    CHECK(j["pieces"].size() == 4);
    CHECK(stepfn_from_json(j) == f);
    CHECK(stepfn_from_json(parse_json(dump_json(j))) == f);
}

TEST_CASE("equidecomposition reports serialize with exact masses") {
    const auto res = equidecompose_onto(CylinderSet::canonical({parse_word("0")}),
                                        CylinderSet::canonical({parse_word("10")}),
                                        Lambda(Rat(2, 3)), Rat(1, 2));
    const Json j = to_json(res);
    CHECK(j["rounds"] == 1);
    CHECK(j["masses"][0] == "2/9");
    CHECK(table_from_json(j["map"]) == res.map);
    CHECK(cylinder_from_json(j["uncovered_dom"]) == res.uncovered_dom);
}

TEST_CASE("census entries round-trip through encodings") {
    const Lambda l23(Rat(2, 3));
    const OrbitCensus c = census({LeafPerm::from_images(2, {1, 0, 2, 3})}, l23);
    const Json j = to_json(c);
    const auto back = census_entries_from_json(parse_json(dump_json(j)));
    REQUIRE(back.size() == c.entries.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].type == c.entries[i].type);
        CHECK(back[i].count == c.entries[i].count);
        CHECK(back[i].mass == c.entries[i].mass);
        CHECK(back[i].blocks == c.entries[i].blocks);
    }
}

TEST_CASE("type encodings parse strictly") {
    CHECK(type_from_encoding("2:1,0").encode() == "2:1,0");
    CHECK(type_from_encoding("2:0,1|1,0").n == 2);
    CHECK_THROWS_AS(type_from_encoding("nocolon"), ParseError);
    CHECK_THROWS_AS(type_from_encoding("2:1,x"), ParseError);
    CHECK_THROWS_AS(type_from_encoding("3:1,0"), ParseError);
    CHECK_THROWS_AS(type_from_encoding("2:"), ParseError);
}

TEST_CASE("dumps are stable and reparseable") {
    const Json j = to_json(odometer(3));
    CHECK(dump_json(j) == dump_json(parse_json(dump_json(j))));
    CHECK_THROWS_AS(parse_json("{ not json"), ParseError);
}
