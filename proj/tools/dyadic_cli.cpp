#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dyadic/dyadic.hpp"

using namespace dyadic;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

// Inline comma-separated words, or @file for a serialized word array.
CylinderSet parse_set_arg(const std::string& arg) {
    if (!arg.empty() && arg.front() == '@') return cylinder_from_json(parse_json(slurp(arg.substr(1))));
    std::vector<Word> ws;
    for (const std::string& part : split(arg, ',')) ws.push_back(parse_word(part));
    return CylinderSet::canonical(std::move(ws));
}

TableMap load_table(const std::string& path) { return table_from_json(parse_json(slurp(path))); }

Perm parse_perm_arg(const std::string& arg) {
    std::vector<std::uint32_t> img;
    for (const std::string& part : split(arg, ',')) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(part, &used);
        } catch (const std::exception&) {
            throw ParseError("bad permutation image \"" + part + "\"");
        }
        if (used != part.size()) throw ParseError("bad permutation image \"" + part + "\"");
        img.push_back(static_cast<std::uint32_t>(v));
    }
    return Perm::from_images(std::move(img));
}

FiniteGroup parse_group_arg(const std::string& arg) {
    if (arg.size() > 2 && (arg[0] == 'S' || arg[0] == 'C') && arg[1] == '_') {
        int deg = 0;
        try {
            deg = std::stoi(arg.substr(2));
        } catch (const std::exception&) {
            throw ParseError("bad group degree in \"" + arg + "\"");
        }
        return arg[0] == 'S' ? FiniteGroup::symmetric(deg) : FiniteGroup::cyclic(deg);
    }
    throw ParseError("group must look like S_4 or C_3, got \"" + arg + "\"");
}

StepFn<int> parse_pieces_arg(const std::string& arg) {
    std::vector<std::pair<Word, int>> pieces;
    for (const std::string& part : split(arg, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw ParseError("piece \"" + part + "\" lacks word=value");
        int v = 0;
        try {
            v = std::stoi(part.substr(eq + 1));
        } catch (const std::exception&) {
            throw ParseError("bad piece value in \"" + part + "\"");
        }
        pieces.emplace_back(parse_word(part.substr(0, eq)), v);
    }
    return StepFn<int>::from_pieces(std::move(pieces));
}

std::vector<LeafPerm> load_tuple(const std::vector<std::string>& paths, int level) {
    std::vector<TableMap> tables;
    tables.reserve(paths.size());
    for (const std::string& p : paths) tables.push_back(load_table(p));
    int lvl = level;
    if (lvl < 0) {
        lvl = 1;
        for (const TableMap& t : tables) lvl = std::max(lvl, t.max_len());
    }
    std::vector<LeafPerm> out;
    out.reserve(tables.size());
    for (TableMap& t : tables) out.push_back(to_leaf_perm(FullMap(std::move(t)), lvl));
    return out;
}

struct Output {
    std::string path;
    void emit(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DomainError("cannot write file: " + path);
        out << text;
    }
};

Json conjugacy_to_json(const ConjugacyResult& r) {
    Json residuals = Json::array();
    for (const Rat& x : r.residuals) residuals.push_back(format_rat(x));
    return Json{{"exact", r.exact},
                {"map", to_json(r.map)},
                {"uncovered_dom", to_json(r.uncovered_dom)},
                {"uncovered_rng", to_json(r.uncovered_rng)},
                {"residuals", std::move(residuals)}};
}

Json densify_to_json(const DensifyResult& r) {
    Json tuple = Json::array();
    for (const LeafPerm& p : r.tuple) tuple.push_back(to_json(from_leaf_perm(p).table()));
    return Json{{"level", r.level},
                {"region", to_json(r.region)},
                {"region_mass", format_rat(r.region_mass)},
                {"tuple", std::move(tuple)}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact computations in the full group of the binary odometer"};
    app.require_subcommand(1);
    app.fallthrough();

    int depth_bound = -1;
    app.add_option("--max-depth", depth_bound, "word depth bound (default 32, max 60)");

    std::function<void()> run;
    std::string lambda_s = "1/2", eps_s = "1/8";
    int level = -1;
    Output out;

    const auto add_common = [&](CLI::App* cmd, bool needs_lambda) {
        if (needs_lambda) cmd->add_option("--lambda", lambda_s, "measure parameter p/q");
        cmd->add_option("--output", out.path, "write the report here instead of stdout");
        return cmd;
    };

    {
        auto* c = add_common(app.add_subcommand("measure", "mass and kraft sum of a cylinder set"), true);
        auto set_s = std::make_shared<std::string>();
        c->add_option("--set", *set_s, "comma-separated words or @file")->required();
        c->callback([&, set_s] {
            run = [&, set_s] {
                const CylinderSet a = parse_set_arg(*set_s);
                const Lambda l = Lambda::parse(lambda_s);
                out.emit("mu " + format_rat(mu(a, l)) + "\nkraft " + format_rat(kraft(a)) + "\n");
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("compose", "composition of two tables (right first)"), false);
        auto left = std::make_shared<std::string>(), right = std::make_shared<std::string>();
        c->add_option("--left", *left, "table applied second")->required();
        c->add_option("--right", *right, "table applied first")->required();
        c->callback([&, left, right] {
            run = [&, left, right] {
                out.emit(dump_json(to_json(compose(load_table(*left), load_table(*right)))));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("du", "uniform distance between two full tables"), true);
        auto left = std::make_shared<std::string>(), right = std::make_shared<std::string>();
        c->add_option("--left", *left, "first table file")->required();
        c->add_option("--right", *right, "second table file")->required();
        c->callback([&, left, right] {
            run = [&, left, right] {
                out.emit(format_rat(du(load_table(*left), load_table(*right), Lambda::parse(lambda_s))) +
                         "\n");
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("cocycle", "derivative value on every table row"), true);
        auto map = std::make_shared<std::string>();
        c->add_option("--map", *map, "table file")->required();
        c->callback([&, map] {
            run = [&, map] {
                Json arr = Json::array();
                for (const auto& [w, v] : rn_cocycle(load_table(*map), Lambda::parse(lambda_s)))
                    arr.push_back(Json::array({w.str(), format_rat(v)}));
                out.emit(dump_json(arr));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("support", "cylinder set moved by a table"), false);
        auto map = std::make_shared<std::string>();
        c->add_option("--map", *map, "table file")->required();
        c->callback([&, map] {
            run = [&, map] { out.emit(dump_json(to_json(support(load_table(*map))))); };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("odometer", "depth-d truncation of x -> x + 1"), false);
        auto d = std::make_shared<int>(3);
        c->add_option("--depth", *d, "carry resolution depth")->required();
        c->callback([&, d] {
            run = [&, d] { out.emit(dump_json(to_json(odometer(*d)))); };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("census", "orbit types of a leaf-perm tuple"), true);
        auto tuple = std::make_shared<std::vector<std::string>>();
        c->add_option("--tuple", *tuple, "full table file, repeat for tuples")->required();
        c->add_option("--level", level, "refinement level (default: finest table row)");
        c->callback([&, tuple] {
            run = [&, tuple] {
                out.emit(dump_json(
                    to_json(census(load_tuple(*tuple, level), Lambda::parse(lambda_s)))));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("en-check", "per-type multiplicity audit"), true);
        auto tuple = std::make_shared<std::vector<std::string>>();
        auto size = std::make_shared<int>(2);
        auto mult = std::make_shared<int>(1);
        c->add_option("--tuple", *tuple, "full table file, repeat for tuples")->required();
        c->add_option("--level", level, "refinement level (default: finest table row)");
        c->add_option("--size", *size, "largest orbit size to demand");
        c->add_option("--multiplicity", *mult, "copies demanded per type");
        c->callback([&, tuple, size, mult] {
            run = [&, tuple, size, mult] {
                const auto r = en_surrogate_check(load_tuple(*tuple, level),
                                                  Lambda::parse(lambda_s), *size, *mult);
                Json missing = Json::array();
                for (const auto& [t, have] : r.missing)
                    missing.push_back(Json::array({t.encode(), have}));
                out.emit(dump_json(Json{{"ok", r.ok}, {"missing", std::move(missing)}}));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("conjugate", "carry one tuple to another"), true);
        auto st = std::make_shared<std::vector<std::string>>();
        auto tt = std::make_shared<std::vector<std::string>>();
        c->add_option("--s", *st, "source tuple table files")->required();
        c->add_option("--t", *tt, "target tuple table files")->required();
        c->add_option("--level", level, "refinement level (default: finest table row)");
        c->add_option("--epsilon", eps_s, "defect budget p/q");
        c->callback([&, st, tt] {
            run = [&, st, tt] {
                const auto r = conjugate_tuples(load_tuple(*st, level), load_tuple(*tt, level),
                                                Lambda::parse(lambda_s), parse_rat(eps_s));
                out.emit(dump_json(conjugacy_to_json(r)));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("equidecompose", "carry one set onto another"), true);
        auto A = std::make_shared<std::string>(), B = std::make_shared<std::string>();
        c->add_option("--A", *A, "domain set")->required();
        c->add_option("--B", *B, "target set")->required();
        c->add_option("--epsilon", eps_s, "leftover budget p/q");
        c->callback([&, A, B] {
            run = [&, A, B] {
                const auto r = equidecompose_onto(parse_set_arg(*A), parse_set_arg(*B),
                                                  Lambda::parse(lambda_s), parse_rat(eps_s));
                out.emit(dump_json(to_json(r)));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("prec", "kraft comparison with a transport map"), false);
        auto A = std::make_shared<std::string>(), B = std::make_shared<std::string>();
        c->add_option("--A", *A)->required();
        c->add_option("--B", *B)->required();
        c->callback([&, A, B] {
            run = [&, A, B] {
                const auto r = prec(parse_set_arg(*A), parse_set_arg(*B));
                Json j{{"possible", r.possible},
                       {"kraft_a", format_rat(r.kraft_a)},
                       {"kraft_b", format_rat(r.kraft_b)}};
                if (r.possible) j["map"] = to_json(r.map);
                out.emit(dump_json(j));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("three-cycle", "order-3 element from a two-step ladder"), true);
        auto phi = std::make_shared<std::string>(), psi = std::make_shared<std::string>();
        c->add_option("--phi", *phi, "first ladder step (default: canonical)");
        c->add_option("--psi", *psi, "second ladder step");
        c->callback([&, phi, psi] {
            run = [&, phi, psi] {
                TableMap p, q;
                if (phi->empty() != psi->empty())
                    throw ParseError("--phi and --psi must be given together");
                if (phi->empty()) {
                    auto canon = pre_three_cycle(Lambda::parse(lambda_s));
                    p = std::move(canon.first);
                    q = std::move(canon.second);
                } else {
                    p = load_table(*phi);
                    q = load_table(*psi);
                }
                out.emit(dump_json(to_json(three_cycle(p, q).table())));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("psi", "block shift of a 2^k-degree permutation"), false);
        auto perm = std::make_shared<std::string>();
        c->add_option("--perm", *perm, "images, e.g. 1,2,3,0")->required();
        c->callback([&, perm] {
            run = [&, perm] {
                out.emit(dump_json(
                    to_json(from_leaf_perm(psi_embed(parse_perm_arg(*perm))).table())));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("phi", "leaf-shift step function of a full table"), false);
        auto table = std::make_shared<std::string>();
        c->add_option("--table", *table, "table file")->required();
        c->add_option("--level", level, "refinement level (default: finest table row)");
        c->callback([&, table] {
            run = [&, table] {
                const auto tuple = load_tuple({*table}, level);
                out.emit(dump_json(to_json(phi_embed(tuple.front()))));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("densify", "implant every small orbit type nearby"), true);
        auto tuple = std::make_shared<std::vector<std::string>>();
        auto size = std::make_shared<int>(2);
        auto mult = std::make_shared<int>(1);
        c->add_option("--tuple", *tuple, "full table file, repeat for tuples")->required();
        c->add_option("--level", level, "refinement level (default: finest table row)");
        c->add_option("--epsilon", eps_s, "movement budget p/q");
        c->add_option("--size", *size, "largest orbit size to demand");
        c->add_option("--multiplicity", *mult, "copies demanded per type");
        c->callback([&, tuple, size, mult] {
            run = [&, tuple, size, mult] {
                const auto r = densify(load_tuple(*tuple, level), Lambda::parse(lambda_s),
                                       parse_rat(eps_s), *size, *mult);
                out.emit(dump_json(densify_to_json(r)));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("orbit-member", "finite-orbit membership with witness"), false);
        auto group = std::make_shared<std::string>(), pieces = std::make_shared<std::string>();
        auto y0 = std::make_shared<int>(0);
        c->add_option("--group", *group, "S_k or C_k")->required();
        c->add_option("--pieces", *pieces, "word=value list, e.g. 0=1,10=2,11=0")->required();
        c->add_option("--y0", *y0, "orbit base point")->required();
        c->callback([&, group, pieces, y0] {
            run = [&, group, pieces, y0] {
                const auto r = orbit_member(parse_pieces_arg(*pieces), parse_group_arg(*group), *y0);
                Json j{{"member", r.member}};
                if (r.witness) j["witness"] = to_json(*r.witness);
                if (r.offending)
                    j["offending"] = Json::array(
                        {r.offending->first.str(), r.offending->second});
                out.emit(dump_json(j));
            };
        });
    }
    {
        auto* c = add_common(app.add_subcommand("selftest", "run the acceptance property suites"), false);
        auto seed = std::make_shared<std::uint64_t>(20260817u);
        auto only = std::make_shared<int>(0);
        c->add_option("--seed", *seed, "suite seed");
        c->add_option("--only", *only, "run a single criterion 1..9");
        c->callback([&, seed, only] {
            run = [&, seed, only] {
                std::vector<CriterionResult> results;
                if (*only > 0) results.push_back(run_criterion(*only, *seed));
                else results = run_all_criteria(*seed);
                std::string report;
                bool all = true;
                for (const CriterionResult& r : results) {
                    all = all && r.pass;
                    report += "criterion " + std::to_string(r.index) + " (" + r.name +
                              "): " + (r.pass ? "PASS" : "FAIL") + " " + r.detail + "\n";
                }
                out.emit(report);
                if (!all) throw DomainError("acceptance suite reported failures (see report)");
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (depth_bound > 0) set_max_depth(depth_bound);
        run();
    } catch (const dyadic::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
