#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dyadic/cylinder.hpp"
#include "dyadic/equidecompose.hpp"
#include "dyadic/error.hpp"
#include "dyadic/orbit_census.hpp"
#include "dyadic/perm.hpp"
#include "dyadic/rational.hpp"
#include "dyadic/step_fn.hpp"
#include "dyadic/table_map.hpp"
#include "dyadic/word.hpp"

// Shared serialization: words as "01" strings (empty = root), cylinder sets
// as sorted string arrays, rationals as "p/q", tables as sorted pair arrays.
// Every writer here round-trips bit-exactly through its reader.

namespace dyadic {

using Json = nlohmann::ordered_json;

inline Json to_json(const CylinderSet& a) {
    Json arr = Json::array();
    for (const Word& w : a.words()) arr.push_back(w.str());
    return arr;
}

inline CylinderSet cylinder_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("cylinder set must be an array of words");
    std::vector<Word> ws;
    for (const Json& e : j) {
        if (!e.is_string()) throw ParseError("cylinder set entries must be word strings");
        ws.push_back(parse_word(e.get<std::string>()));
    }
    return CylinderSet::canonical(std::move(ws));
}

inline Json to_json(const TableMap& f) {
    Json pairs = Json::array();
    for (const TablePair& r : f.rows()) pairs.push_back(Json::array({r.src.str(), r.dst.str()}));
    return Json{{"pairs", std::move(pairs)}};
}

inline TableMap table_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array())
        throw ParseError("table must be an object with a \"pairs\" array");
    std::vector<TablePair> rows;
    for (const Json& e : j["pairs"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
            throw ParseError("table pairs must be two-element word arrays");
        rows.push_back({parse_word(e[0].get<std::string>()), parse_word(e[1].get<std::string>())});
    }
    return TableMap::from_pairs(std::move(rows));
}

inline Json to_json(const TruncatedMap& f) {
    Json j = to_json(f.table);
    j["defect_dom"] = to_json(f.defect_dom);
    j["defect_rng"] = to_json(f.defect_rng);
    return j;
}

inline TruncatedMap truncated_from_json(const Json& j) {
    TruncatedMap t;
    t.table = table_from_json(j);
    if (j.contains("defect_dom")) t.defect_dom = cylinder_from_json(j["defect_dom"]);
    if (j.contains("defect_rng")) t.defect_rng = cylinder_from_json(j["defect_rng"]);
    return t;
}

inline Json to_json(const StepFn<Perm>& f) {
    Json pieces = Json::array();
    int degree = 0;
    for (const auto& [w, v] : f.pieces()) {
        degree = v.degree();
        Json imgs = Json::array();
        for (const std::uint32_t i : v.images()) imgs.push_back(i);
        pieces.push_back(Json::array({w.str(), std::move(imgs)}));
    }
    return Json{{"group", "S_" + std::to_string(degree)}, {"pieces", std::move(pieces)}};
}

inline StepFn<Perm> stepfn_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("pieces") || !j["pieces"].is_array())
        throw ParseError("step function must be an object with a \"pieces\" array");
    std::vector<std::pair<Word, Perm>> pieces;
    for (const Json& e : j["pieces"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_array())
            throw ParseError("step function pieces must be [word, images] arrays");
        std::vector<std::uint32_t> img;
        for (const Json& x : e[1]) img.push_back(x.get<std::uint32_t>());
        pieces.emplace_back(parse_word(e[0].get<std::string>()),
                            Perm::from_images(std::move(img)));
    }
    return StepFn<Perm>::from_pieces(std::move(pieces));
}

inline Json to_json(const EquidecompResult& r) {
    Json masses = Json::array();
    for (const Rat& m : r.masses) masses.push_back(format_rat(m));
    return Json{{"map", to_json(r.map)},
                {"uncovered_dom", to_json(r.uncovered_dom)},
                {"uncovered_rng", to_json(r.uncovered_rng)},
                {"rounds", r.rounds},
                {"masses", std::move(masses)}};
}

inline Json census_entries_to_json(const std::vector<CensusEntry>& entries) {
    Json arr = Json::array();
    for (const CensusEntry& e : entries) {
        Json blocks = Json::array();
        for (const auto& block : e.blocks) {
            Json b = Json::array();
            for (const std::uint32_t leaf : block) b.push_back(leaf);
            blocks.push_back(std::move(b));
        }
        arr.push_back(Json{{"type", e.type.encode()},
                           {"count", e.count},
                           {"mass", format_rat(e.mass)},
                           {"blocks", std::move(blocks)}});
    }
    return arr;
}

inline Json to_json(const OrbitCensus& c) { return census_entries_to_json(c.entries); }

inline TransitiveTupleType type_from_encoding(const std::string& enc) {
    const auto colon = enc.find(':');
    if (colon == std::string::npos) throw ParseError("type encoding lacks the size prefix");
    TransitiveTupleType t;
    try {
        t.q = std::stoi(enc.substr(0, colon));
    } catch (const std::exception&) {
        throw ParseError("bad type size in encoding \"" + enc + "\"");
    }
    std::string body = enc.substr(colon + 1);
    std::vector<std::uint32_t> img;
    std::string num;
    const auto flush_num = [&] {
        if (num.empty()) throw ParseError("bad image list in encoding \"" + enc + "\"");
        img.push_back(static_cast<std::uint32_t>(std::stoul(num)));
        num.clear();
    };
    for (const char ch : body) {
        if (ch >= '0' && ch <= '9') {
            num += ch;
        } else if (ch == ',') {
            flush_num();
        } else if (ch == '|') {
            flush_num();
            t.gens.push_back(Perm::from_images(std::move(img)));
            img.clear();
        } else {
            throw ParseError("bad character in type encoding \"" + enc + "\"");
        }
    }
    flush_num();
    t.gens.push_back(Perm::from_images(std::move(img)));
    t.n = static_cast<int>(t.gens.size());
    for (const Perm& g : t.gens)
        if (g.degree() != t.q) throw ParseError("type encoding images do not match its size");
    return t;
}

inline std::vector<CensusEntry> census_entries_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("census must be an array of type entries");
    std::vector<CensusEntry> out;
    for (const Json& e : j) {
        if (!e.is_object() || !e.contains("type") || !e.contains("count") ||
            !e.contains("mass") || !e.contains("blocks"))
            throw ParseError("census entries need type, count, mass, and blocks");
        CensusEntry c;
        c.type = type_from_encoding(e["type"].get<std::string>());
        c.count = e["count"].get<int>();
        c.mass = parse_rat(e["mass"].get<std::string>());
        for (const Json& b : e["blocks"]) {
            std::vector<std::uint32_t> block;
            for (const Json& x : b) block.push_back(x.get<std::uint32_t>());
            c.blocks.push_back(std::move(block));
        }
        out.push_back(std::move(c));
    }
    return out;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse_json(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON input");
    return j;
}

} // namespace dyadic
