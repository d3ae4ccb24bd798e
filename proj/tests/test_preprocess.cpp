#include <doctest.h>

#include <cmath>

#include "util.hpp"
#include "wcoj/brute_force.hpp"
#include "wcoj/cover_lp.hpp"
#include "wcoj/preprocess.hpp"

using namespace wcoj;

namespace {

// Appendix family: R_i(A,B_i) with A -> B_i, S_i(B_i,C). Data satisfies the FDs.
JoinQuery k_family_instance(int k, int n, std::vector<Fd>* fds) {
    // attrs: A=0, B_1..B_k = 1..k, C = k+1
    JoinQuery q;
    q.attrNames.push_back("A");
    for (int i = 1; i <= k; ++i) q.attrNames.push_back("B" + std::to_string(i));
    q.attrNames.push_back("C");
    for (int i = 1; i <= k; ++i) {
        std::vector<std::vector<Value>> rows;
        for (int a = 0; a < n; ++a)
            rows.push_back({a, a * 100 + i});  // B_i functionally determined by A
        q.edges.push_back(AttrSet::of({0, i}));
        q.relations.emplace_back(std::vector<AttrId>{0, i}, rows);
        if (fds) fds->push_back({i - 1, 0, i});
    }
    for (int i = 1; i <= k; ++i) {
        std::vector<std::vector<Value>> rows;
        for (int a = 0; a < n; ++a) rows.push_back({a * 100 + i, a});
        q.edges.push_back(AttrSet::of({i, k + 1}));
        q.relations.emplace_back(std::vector<AttrId>{i, k + 1}, rows);
    }
    return q;
}

}  // namespace

TEST_CASE("reduce: R(x,x,3) over {(1,1,3),(1,2,3),(2,2,4)} -> R'(x) = {1}") {
    FullQuery fq;
    fq.attrNames = {"x"};
    RawTable t;
    t.name = "R";
    t.columnNames = {"c0", "c1", "c2"};
    t.rows = {{1, 1, 3}, {1, 2, 3}, {2, 2, 4}};
    fq.tables.push_back(t);
    FullQueryAtom atom;
    atom.vars = {0, 0};
    atom.constants[2] = 3;
    atom.tableIndex = 0;
    fq.atoms.push_back(atom);

    JoinQuery q = reduce_full_query(fq);
    REQUIRE(q.numEdges() == 1);
    REQUIRE(q.relations[0].size() == 1);
    CHECK(q.relations[0].row(0)[0] == 1);
}

TEST_CASE("reduce is the identity on already-reduced queries") {
    FullQuery fq;
    fq.attrNames = {"x", "y"};
    RawTable t;
    t.name = "R";
    t.columnNames = {"c0", "c1"};
    t.rows = {{1, 2}, {3, 4}};
    fq.tables.push_back(t);
    FullQueryAtom atom;
    atom.vars = {0, 1};
    atom.tableIndex = 0;
    fq.atoms.push_back(atom);
    JoinQuery q = reduce_full_query(fq);
    CHECK(q.relations[0].rowsCopy() == t.rows);
}

TEST_CASE("two subgoals over the same stored relation become two edges") {
    FullQuery fq;
    fq.attrNames = {"x", "y", "z"};
    RawTable t;
    t.name = "R";
    t.columnNames = {"c0", "c1"};
    t.rows = {{1, 2}, {2, 3}};
    fq.tables.push_back(t);
    FullQueryAtom a1, a2;
    a1.vars = {0, 1};
    a1.tableIndex = 0;
    a2.vars = {1, 2};
    a2.tableIndex = 0;
    fq.atoms = {a1, a2};
    JoinQuery q = reduce_full_query(fq);
    REQUIRE(q.numEdges() == 2);
    CHECK(q.relations[0].rowsCopy() == q.relations[1].rowsCopy());
}

TEST_CASE("non-full queries are rejected") {
    FullQuery fq;
    fq.attrNames = {"x", "y"};  // y appears in no atom
    RawTable t;
    t.name = "R";
    t.columnNames = {"c0"};
    t.rows = {{1}};
    fq.tables.push_back(t);
    FullQueryAtom atom;
    atom.vars = {0};
    atom.tableIndex = 0;
    fq.atoms.push_back(atom);
    CHECK_THROWS_AS(reduce_full_query(fq), SchemaError);
}

TEST_CASE("reduce preserves brute-force answers on random full CQs") {
    testutil::Rng rng(809);
    for (int trial = 0; trial < 100; ++trial) {
        FullQuery fq = testutil::random_full_cq(rng);
        JoinQuery q = reduce_full_query(fq);
        Relation viaReduce = brute_force_join(q);
        Relation oracle = testutil::full_cq_oracle(fq);
        REQUIRE(viaReduce.sameRows(oracle));
    }
}

TEST_CASE("fd_expand with no FDs is the identity") {
    testutil::Rng rng(811);
    JoinQuery q = testutil::random_nonempty_instance(rng);
    JoinQuery out = fd_expand(q, {});
    CHECK(out.edges == q.edges);
}

TEST_CASE("appendix family: edges expand and the LP bound drops to N^2") {
    for (int k : {2, 3}) {
        std::vector<Fd> fds;
        JoinQuery q = k_family_instance(k, 6, &fds);
        CoverSolution before = solve_cover_lp(q);
        // FD-unaware bound is N^k
        CHECK(before.objective ==
              doctest::Approx(k * std::log(6.0)).epsilon(1e-6));

        JoinQuery expanded = fd_expand(q, fds);
        // each R_i edge expands to {A, B_1..B_k}
        AttrSet want;
        want.add(0);
        for (int i = 1; i <= k; ++i) want.add(i);
        for (int e = 0; e < k; ++e) CHECK(expanded.edges[e] == want);

        CoverSolution after = solve_cover_lp(expanded);
        CHECK(after.objective == doctest::Approx(2 * std::log(6.0)).epsilon(1e-6));
        CHECK(after.objective <= before.objective + 1e-9);

        // expansion adds determined attributes only: join unchanged
        CHECK(brute_force_join(expanded).sameRows(brute_force_join(q)));
    }
}

TEST_CASE("chain FDs close transitively: edge {A} grows to {A,B,C}") {
    JoinQuery q;
    q.attrNames = {"A", "B", "C"};
    q.edges = {AttrSet::of({0}), AttrSet::of({0, 1}), AttrSet::of({1, 2})};
    q.relations.emplace_back(std::vector<AttrId>{0}, std::vector<std::vector<Value>>{{1}, {2}});
    q.relations.emplace_back(std::vector<AttrId>{0, 1},
                             std::vector<std::vector<Value>>{{1, 10}, {2, 20}});
    q.relations.emplace_back(std::vector<AttrId>{1, 2},
                             std::vector<std::vector<Value>>{{10, 100}, {20, 200}});
    std::vector<Fd> fds{{1, 0, 1}, {2, 1, 2}};  // A->B on edge 1, B->C on edge 2
    JoinQuery out = fd_expand(q, fds);
    CHECK(out.edges[0] == AttrSet::of({0, 1, 2}));
    CHECK(brute_force_join(out).sameRows(brute_force_join(q)));
}

TEST_CASE("FD violated by the data names the offending pair") {
    JoinQuery q;
    q.attrNames = {"A", "B"};
    q.edges = {AttrSet::of({0, 1})};
    q.relations.emplace_back(std::vector<AttrId>{0, 1},
                             std::vector<std::vector<Value>>{{1, 10}, {1, 20}});
    try {
        fd_expand(q, {{0, 0, 1}});
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        CHECK(msg.find("10") != std::string::npos);
        CHECK(msg.find("20") != std::string::npos);
    }
}

TEST_CASE("unreachable FD source values are a validation error") {
    JoinQuery q;
    q.attrNames = {"A", "B", "C"};
    q.edges = {AttrSet::of({0}), AttrSet::of({0, 1}), AttrSet::of({1, 2})};
    q.relations.emplace_back(std::vector<AttrId>{0},
                             std::vector<std::vector<Value>>{{1}, {7}});  // 7 not in the FD map
    q.relations.emplace_back(std::vector<AttrId>{0, 1},
                             std::vector<std::vector<Value>>{{1, 10}});
    q.relations.emplace_back(std::vector<AttrId>{1, 2},
                             std::vector<std::vector<Value>>{{10, 100}});
    CHECK_THROWS_AS(fd_expand(q, {{1, 0, 1}}), ValidationError);
}
