#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wcoj/brute_force.hpp"
#include "wcoj/generic_join.hpp"
#include "wcoj/graph_join.hpp"
#include "wcoj/io.hpp"
#include "wcoj/lw_join.hpp"
#include "wcoj/preprocess.hpp"
#include "wcoj/relaxed_join.hpp"
#include "wcoj/workbench.hpp"

namespace {

using namespace wcoj;

std::vector<int> parse_order(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<int> resolve_order(const JoinQuery& q, const std::string& orderStr,
                               std::int64_t shuffleSeed) {
    if (!orderStr.empty()) return parse_order(orderStr);
    std::vector<int> order(static_cast<size_t>(q.numEdges()));
    std::iota(order.begin(), order.end(), 0);
    if (shuffleSeed >= 0) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(shuffleSeed));
        std::shuffle(order.begin(), order.end(), rng);
    }
    return order;
}

JoinQuery load_and_prepare(const std::string& path) {
    LoadedQuery lq = load_query(path);
    if (!lq.hadFds) return lq.query;
    std::vector<Fd> fds;
    for (size_t i = 0; i < lq.fdEdges.size(); ++i)
        fds.push_back({lq.fdEdges[i], lq.fdAttrs[i][0], lq.fdAttrs[i][1]});
    return fd_expand(lq.query, fds);
}

void print_relation(const JoinQuery& q, const Relation& r, std::ostream& os) {
    os << "#relation out";
    for (AttrId a : r.schema()) os << " " << q.attrName(a);
    os << "\n";
    for (size_t i = 0; i < r.size(); ++i) {
        auto row = r.row(i);
        for (size_t j = 0; j < row.size(); ++j) {
            if (j) os << "\t";
            if (q.dict)
                os << q.dict->decode(row[j]);
            else
                os << row[j];
        }
        os << "\n";
    }
}

int cmd_solve_lp(const std::string& queryPath) {
    JoinQuery q = load_and_prepare(queryPath);
    CoverSolution x = solve_cover_lp(q);
    nlohmann::json j;
    nlohmann::json weights = nlohmann::json::array();
    for (int e = 0; e < q.numEdges(); ++e) {
        nlohmann::json w;
        w["edge"] = e;
        w["attrs"] = attrSetToString(q, q.edges[e]);
        w["size"] = q.relations[e].size();
        w["x"] = x.x[e];
        weights.push_back(w);
    }
    j["weights"] = weights;
    j["objective"] = x.objective;
    j["bound"] = x.boundValue();
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_plan(const std::string& queryPath, const std::string& orderStr,
             std::int64_t shuffleSeed) {
    JoinQuery q = load_and_prepare(queryPath);
    QpTree t = build_qp_tree(q, resolve_order(q, orderStr, shuffleSeed));
    TotalOrder to = total_order(q, t);
    nlohmann::json j;
    j["nodeCount"] = t.nodeCount();
    j["tree"] = tree_to_string(q, t);
    nlohmann::json ord = nlohmann::json::array();
    for (AttrId a : to.order) ord.push_back(q.attrName(a));
    j["totalOrder"] = ord;
    j["contiguousBlocks"] = order_has_contiguous_blocks(t, to);
    j["consistentSplits"] = order_splits_consistently(q, t, to);
    std::cout << j.dump(2) << "\n";
    std::cout << tree_to_ascii(q, t);
    return 0;
}

int cmd_join(const std::string& queryPath, const std::string& algo, int relax,
             const std::string& orderStr, std::int64_t shuffleSeed,
             const std::string& statsPath, const std::string& tracePath, bool parallel,
             bool quiet) {
    JoinQuery q = load_and_prepare(queryPath);
    Relation out;
    JoinRunStats stats;
    std::ofstream traceFile;

    if (relax >= 0) {
        RelaxedSpec spec{&q, relax};
        RelaxedStats rs;
        out = relaxed_join(spec, &rs);
        stats.work = rs.work;
        stats.outSize = out.size();
    } else if (algo == "generic") {
        GjOptions opt;
        opt.edgeOrder = resolve_order(q, orderStr, shuffleSeed);
        if (!tracePath.empty()) {
            traceFile.open(tracePath);
            opt.trace = &traceFile;
        }
        if (parallel) opt.parallelThreads = 4;
        out = generic_join(q, nullptr, opt, &stats);
    } else if (algo == "lw") {
        LwStats ls;
        out = lw_join(q, {}, &ls);
        stats.work = ls.work;
        stats.outSize = out.size();
    } else if (algo == "triangle") {
        if (q.numEdges() != 3 || q.numAttrs() != 3)
            throw ContractViolation("triangle algo needs the 3-relation triangle shape");
        TriangleStats ts;
        AttrId a = 0, b = 1, c = 2;
        // identify roles: R(A,B), S(B,C), T(A,C)
        int rIdx = -1, sIdx = -1, tIdx = -1;
        for (int e = 0; e < 3; ++e) {
            if (q.edges[e] == AttrSet::of({a, b})) rIdx = e;
            if (q.edges[e] == AttrSet::of({b, c})) sIdx = e;
            if (q.edges[e] == AttrSet::of({a, c})) tIdx = e;
        }
        if (rIdx < 0 || sIdx < 0 || tIdx < 0)
            throw ContractViolation("triangle algo: edges must be (A,B),(B,C),(A,C)");
        out = triangle_join(q.relations[rIdx], q.relations[sIdx], q.relations[tIdx], a, b, c,
                            TauMode::Auto, &ts);
        stats.work = ts.work;
        stats.outSize = out.size();
    } else if (algo == "graph") {
        GraphJoinStats gs;
        out = graph_join(q, &gs);
        stats.work = gs.work;
        stats.outSize = out.size();
    } else if (algo == "binary") {
        std::vector<int> order(static_cast<size_t>(q.numEdges()));
        std::iota(order.begin(), order.end(), 0);
        if (!orderStr.empty()) order = parse_order(orderStr);
        BinaryPlanStats bp;
        out = binary_join_plan(q, order, &bp);
        stats.work = bp.work;
        stats.outSize = out.size();
        std::cerr << "maxIntermediate=" << bp.maxIntermediate << "\n";
    } else {
        throw ValidationError("unknown algorithm: " + algo);
    }

    if (!statsPath.empty()) {
        nlohmann::json j;
        j["outSize"] = out.size();
        j["trieSteps"] = stats.work.trieSteps;
        j["tuplesEmitted"] = stats.work.tuplesEmitted;
        j["workTotal"] = stats.work.total();
        j["recursionCalls"] = stats.recursionCalls;
        j["boundViolations"] = stats.boundViolations;
        j["logBound"] = stats.logBound;
        j["wallMs"] = stats.wallMs;
        std::ofstream f(statsPath);
        f << j.dump(2) << "\n";
    }
    if (!quiet) print_relation(q, out, std::cout);
    std::cerr << "rows=" << out.size() << " work=" << stats.work.total() << "\n";
    return 0;
}

int cmd_verify(const std::string& queryPath, std::uint64_t budget) {
    JoinQuery q = load_and_prepare(queryPath);
    Relation oracle = brute_force_join(q, budget);
    bool ok = true;
    auto check = [&](const std::string& name, auto&& fn) {
        try {
            Relation got = fn();
            bool same = got.sameRows(oracle);
            std::cout << name << ": " << (same ? "ok" : "MISMATCH") << " (" << got.size()
                      << " rows)\n";
            if (!same) ok = false;
        } catch (const ContractViolation&) {
            std::cout << name << ": not applicable\n";
        }
    };
    check("generic", [&] { return generic_join(q); });
    check("lw", [&] { return lw_join(q); });
    check("graph", [&] { return graph_join(q); });
    check("binary", [&] {
        std::vector<int> order(static_cast<size_t>(q.numEdges()));
        std::iota(order.begin(), order.end(), 0);
        return binary_join_plan(q, order, nullptr);
    });
    std::cout << "oracle rows: " << oracle.size() << "\n";
    return ok ? 0 : 1;
}

int cmd_gen_ext(const std::string& specPath, std::uint64_t bigN, const std::string& outDir);

int cmd_gen(const std::string& family, int n, std::uint64_t bigN, const std::string& outDir,
            const std::string& extSpec) {
    JoinQuery q;
    std::string base;
    if (family == "triangle") {
        q = gen_triangle_instance(bigN);
        base = "triangle";
    } else if (family == "lwbad") {
        q = gen_lw_bad_instance(n, bigN);
        base = "lwbad";
    } else if (family == "relaxlb") {
        q = gen_relaxed_lb_instance(n, bigN);
        base = "relaxlb";
    } else if (family == "ext") {
        if (extSpec.empty())
            throw ValidationError("gen ext: --spec <json with attributes/edges/U/F> required");
        return cmd_gen_ext(extSpec, bigN, outDir);
    } else {
        throw ValidationError("gen: unknown family " + family);
    }
    write_instance(outDir, q, base);
    std::cout << "wrote " << outDir << "/query.json (m=" << q.numEdges() << ")\n";
    return 0;
}

int cmd_gen_ext(const std::string& specPath, std::uint64_t bigN, const std::string& outDir) {
    std::ifstream in(specPath);
    if (!in) throw ValidationError("cannot open extension spec " + specPath);
    nlohmann::json j;
    in >> j;
    ExtensionSpec spec;
    for (const auto& a : j.at("attributes")) spec.attrNames.push_back(a.get<std::string>());
    auto idOf = [&](const std::string& name) {
        for (size_t i = 0; i < spec.attrNames.size(); ++i)
            if (spec.attrNames[i] == name) return static_cast<int>(i);
        throw ValidationError("extension spec: unknown attribute " + name);
    };
    for (const auto& e : j.at("edges")) {
        std::vector<int> edge;
        for (const auto& a : e) edge.push_back(idOf(a.get<std::string>()));
        spec.edges.push_back(edge);
    }
    for (const auto& a : j.at("U")) spec.u.push_back(idOf(a.get<std::string>()));
    for (const auto& e : j.at("F")) spec.f.push_back(e.get<int>());
    JoinQuery q = gen_extension_instance(spec, bigN);
    write_instance(outDir, q, "ext");
    std::cout << "wrote " << outDir << "/query.json (m=" << q.numEdges() << ")\n";
    return 0;
}

int cmd_bench(const std::string& family, const std::string& sizesStr, const std::string& algosStr,
              const std::string& csvPath, const std::string& jsonPath, double timeoutMs, int n) {
    std::vector<std::uint64_t> sizes;
    for (int v : parse_order(sizesStr)) sizes.push_back(static_cast<std::uint64_t>(v));
    std::vector<std::string> algos;
    std::stringstream ss(algosStr);
    std::string tok;
    while (std::getline(ss, tok, ',')) algos.push_back(tok);

    BenchReport rep = bench_compare(family, sizes, algos, timeoutMs, n);
    std::cout << rep.toCsv();
    for (auto& [algo, slope] : rep.slopes)
        std::cout << "# slope " << algo << " = " << slope << "\n";
    if (!csvPath.empty()) std::ofstream(csvPath) << rep.toCsv();
    if (!jsonPath.empty()) std::ofstream(jsonPath) << rep.toJson() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"worst-case optimal join workbench"};
    app.require_subcommand(1);

    std::string queryPath, orderStr, statsPath, tracePath, algo = "generic";
    int relax = -1;
    std::int64_t shuffleSeed = -1;
    bool parallel = false, quiet = false;
    std::uint64_t budget = 100000000ULL;

    auto* join = app.add_subcommand("join", "evaluate a join query");
    join->add_option("query", queryPath)->required();
    join->add_option("--algo", algo, "generic|lw|triangle|graph|binary");
    join->add_option("--relax", relax, "relaxation number r");
    join->add_option("--edge-order", orderStr, "comma-separated edge permutation");
    join->add_option("--shuffle-order", shuffleSeed, "randomize the edge order with a seed");
    join->add_option("--stats", statsPath, "write run stats JSON");
    join->add_option("--trace", tracePath, "write per-node decision trace");
    join->add_flag("--parallel", parallel, "process independent tuples with OpenMP");
    join->add_flag("--quiet", quiet, "suppress tuple output");

    auto* lp = app.add_subcommand("solve-lp", "fractional edge cover LP");
    lp->add_option("query", queryPath)->required();

    auto* plan = app.add_subcommand("plan", "query plan tree and total order");
    plan->add_option("query", queryPath)->required();
    plan->add_option("--edge-order", orderStr);
    plan->add_option("--shuffle-order", shuffleSeed, "randomize the edge order with a seed");

    auto* verify = app.add_subcommand("verify", "cross-check algorithms against brute force");
    verify->add_option("query", queryPath)->required();
    verify->add_option("--budget", budget, "brute-force candidate budget");

    std::string family, outDir = ".", sizesStr, algosStr = "generic,binary";
    int genN = 3;
    std::uint64_t genSize = 16;
    std::string extSpec;
    auto* gen = app.add_subcommand("gen", "generate an adversarial instance");
    gen->add_option("family", family, "triangle|lwbad|relaxlb|ext")->required();
    gen->add_option("--n", genN, "attribute count (lwbad/relaxlb)");
    gen->add_option("--N", genSize, "relation size")->required();
    gen->add_option("--out", outDir, "output directory");
    gen->add_option("--spec", extSpec, "ext family: JSON with attributes/edges/U/F");

    std::string csvPath, jsonPath;
    double timeoutMs = 60000;
    auto* bench = app.add_subcommand("bench", "compare algorithms across instance sizes");
    bench->add_option("--family", family)->required();
    bench->add_option("--ns", sizesStr, "comma-separated sizes")->required();
    bench->add_option("--algos", algosStr);
    bench->add_option("--csv", csvPath);
    bench->add_option("--json", jsonPath);
    bench->add_option("--timeout-ms", timeoutMs);
    bench->add_option("--n", genN, "attribute count for lwbad/relaxlb");

    CLI11_PARSE(app, argc, argv);

    try {
        if (join->parsed())
            return cmd_join(queryPath, algo, relax, orderStr, shuffleSeed, statsPath, tracePath,
                            parallel, quiet);
        if (lp->parsed()) return cmd_solve_lp(queryPath);
        if (plan->parsed()) return cmd_plan(queryPath, orderStr, shuffleSeed);
        if (verify->parsed()) return cmd_verify(queryPath, budget);
        if (gen->parsed()) return cmd_gen(family, genN, genSize, outDir, extSpec);
        if (bench->parsed())
            return cmd_bench(family, sizesStr, algosStr, csvPath, jsonPath, timeoutMs, genN);
    } catch (const wcoj::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
