#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>

#include "util.hpp"
#include "wcoj/brute_force.hpp"
#include "wcoj/generic_join.hpp"
#include "wcoj/graph_join.hpp"
#include "wcoj/io.hpp"
#include "wcoj/lw_join.hpp"
#include "wcoj/workbench.hpp"

using namespace wcoj;

TEST_CASE("triangle generator: closed-form cardinalities") {
    JoinQuery q4 = gen_triangle_instance(4);
    CHECK(q4.relations[0].size() == 4);
    CHECK(pair_join_size(q4, 0, 1) == 6);
    CHECK(brute_force_join(q4).empty());

    JoinQuery q2 = gen_triangle_instance(2);
    CHECK(pair_join_size(q2, 0, 1) == 2);

    JoinQuery q1000 = gen_triangle_instance(1000);
    CHECK(pair_join_size(q1000, 0, 1) == 250500);

    CHECK_THROWS_AS(gen_triangle_instance(5), ValidationError);
}

TEST_CASE("lw bad generator: sizes and join cardinality") {
    JoinQuery q = gen_lw_bad_instance(3, 5);
    for (const auto& r : q.relations) CHECK(r.size() == 5);
    CHECK(lw_bad_join_size(3, 5) == 7);
    CHECK(brute_force_join(q).size() == 7);

    JoinQuery q4 = gen_lw_bad_instance(4, 4);  // domain {0,1}, |R_i| = 3*2-2 = 4
    for (const auto& r : q4.relations) CHECK(r.size() == 4);

    CHECK_THROWS_AS(gen_lw_bad_instance(3, 6), ValidationError);
    try {
        gen_lw_bad_instance(3, 6);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("5") != std::string::npos);  // nearest valid N
    }
}

TEST_CASE("relaxed lower-bound generator") {
    JoinQuery q = gen_relaxed_lb_instance(3, 10);
    REQUIRE(q.numEdges() == 4);
    CHECK(q.relations[3].size() == 10);
    CHECK(brute_force_join(q).empty());  // r=0: diagonals exceed [N]
}

TEST_CASE("extension generator: degenerate case U=V, F=E reduces to the bad instance") {
    ExtensionSpec spec;
    spec.attrNames = {"1", "2", "3"};
    spec.edges = {{1, 2}, {0, 2}, {0, 1}};
    spec.u = {0, 1, 2};
    spec.f = {0, 1, 2};
    JoinQuery q = gen_extension_instance(spec, 5);
    for (int e = 0; e < 3; ++e) CHECK(q.relations[e].size() == 5);
    CHECK(brute_force_join(q).size() == 7);
}

TEST_CASE("extension generator: validating instance with a pinned tail attribute") {
    // V={1,2,3,4}, E = {12, 23, 134, {4}}, U={1,2,3}, F={0,1,2}
    ExtensionSpec spec;
    spec.attrNames = {"1", "2", "3", "4"};
    spec.edges = {{0, 1}, {1, 2}, {0, 2, 3}, {3}};
    spec.u = {0, 1, 2};
    spec.f = {0, 1, 2};
    JoinQuery q = gen_extension_instance(spec, 9);

    // baseline must pay at least (1 + (N-1)/(|U|-1))^2 on some pair
    auto [order, st] = best_binary_plan(q);
    CHECK(st.maxIntermediate >= 25);  // (1+4)^2

    // and all joinable pairs of F edges are expensive
    CHECK(pair_join_size(q, 0, 1) >= 25);
    CHECK(pair_join_size(q, 0, 2) >= 25);
    CHECK(pair_join_size(q, 1, 2) >= 25);

    // the engine still answers correctly
    CHECK(generic_join(q).sameRows(brute_force_join(q)));
}

TEST_CASE("extension generator rejects invalid (U,F)") {
    ExtensionSpec spec;
    spec.attrNames = {"1", "2", "3"};
    spec.edges = {{0, 1}, {1, 2}, {0, 2}};
    spec.u = {0, 1, 2};
    spec.f = {0, 1};  // |F| != |U|
    CHECK_THROWS_AS(gen_extension_instance(spec, 5), ValidationError);

    spec.f = {0, 0, 1};  // duplicate restriction
    CHECK_THROWS_AS(gen_extension_instance(spec, 5), ValidationError);
}

TEST_CASE("binary plan on the empty triangle: max intermediate is N^2/4 + N/2 for any order") {
    JoinQuery q = gen_triangle_instance(16);
    std::vector<int> order{0, 1, 2};
    do {
        BinaryPlanStats st;
        Relation out = binary_join_plan(q, order, &st);
        CHECK(out.empty());
        CHECK(st.maxIntermediate == 16 * 16 / 4 + 8);
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("binary plan: single edge has no intermediates") {
    JoinQuery q;
    q.attrNames = {"A"};
    q.edges = {AttrSet::of({0})};
    q.relations.emplace_back(std::vector<AttrId>{0}, std::vector<std::vector<Value>>{{1}, {2}});
    BinaryPlanStats st;
    Relation out = binary_join_plan(q, {0}, &st);
    CHECK(out.size() == 2);
    CHECK(st.maxIntermediate == 0);
    CHECK(st.intermediateSizes.empty());
}

TEST_CASE("binary plan output equals brute force on random instances") {
    testutil::Rng rng(907);
    for (int trial = 0; trial < 100; ++trial) {
        JoinQuery q = testutil::random_nonempty_instance(rng, {4, 4, 10, 4});
        std::vector<int> order(static_cast<size_t>(q.numEdges()));
        std::iota(order.begin(), order.end(), 0);
        Relation out = binary_join_plan(q, order, nullptr);
        REQUIRE(out.sameRows(brute_force_join(q)));
    }
}

TEST_CASE("LW bad pairwise intermediates: every pair costs at least (1+(N-1)/2)^2") {
    JoinQuery q = gen_lw_bad_instance(3, 5);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) CHECK(pair_join_size(q, i, j) >= 9);
    // exact hand count for the simple relations: 9 zero-pair tuples + 2 others
    CHECK(pair_join_size(q, 0, 1) == 11);
}

TEST_CASE("all algorithms agree with the oracle on generated instances") {
    for (std::uint64_t n : {4ULL, 10ULL}) {
        JoinQuery q = gen_triangle_instance(n);
        Relation oracle = brute_force_join(q);
        CHECK(generic_join(q).sameRows(oracle));
        CHECK(lw_join(q).sameRows(oracle));
        CHECK(graph_join(q).sameRows(oracle));
        std::vector<int> order{0, 1, 2};
        CHECK(binary_join_plan(q, order, nullptr).sameRows(oracle));
    }
    JoinQuery bad = gen_lw_bad_instance(3, 9);
    Relation oracle = brute_force_join(bad);
    CHECK(generic_join(bad).sameRows(oracle));
    CHECK(lw_join(bad).sameRows(oracle));
}

TEST_CASE("bench produces one row per (algo, N) and fits slopes") {
    BenchReport rep = bench_compare("triangle", {64, 256}, {"generic", "binary"}, 60000.0);
    CHECK(rep.cells.size() == 4);
    REQUIRE(rep.slopes.size() == 2);
    // generic is ~linear on this family; binary is ~quadratic
    CHECK(rep.slopes[0].second < 1.6);
    CHECK(rep.slopes[1].second > 1.6);
    CHECK(rep.toCsv().find("family,N,algo,work,maxIntermediate,outSize,wallMs") == 0);

    BenchReport empty = bench_compare("triangle", {64}, {});
    CHECK(empty.cells.empty());
}

TEST_CASE("relation and query files round-trip") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "wcoj_io_test";
    fs::create_directories(dir);

    JoinQuery q = gen_triangle_instance(6);
    q.dict = std::make_shared<Dictionary>();
    write_instance(dir, q, "tri");
    LoadedQuery lq = load_query(dir / "query.json");
    REQUIRE(lq.query.numEdges() == 3);
    for (int e = 0; e < 3; ++e) {
        CHECK(lq.query.edges[e] == q.edges[e]);
        CHECK(lq.query.relations[e].sameRows(q.relations[e]));
    }
    CHECK(brute_force_join(lq.query).empty());
    fs::remove_all(dir);
}

TEST_CASE("relation files may mix integers and strings") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "wcoj_io_str";
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "s.rel");
        f << "#relation S c0 c1\n1\tapple\n2\tbanana\n";
    }
    Dictionary dict;
    Relation r = load_relation(dir / "s.rel", {0, 1}, dict);
    REQUIRE(r.size() == 2);
    CHECK(r.row(0)[0] == 1);
    CHECK(dict.decode(r.row(0)[1]) == "apple");
    fs::remove_all(dir);
}
