#include <doctest.h>

#include "util.hpp"
#include "wcoj/brute_force.hpp"
#include "wcoj/workbench.hpp"

using namespace wcoj;

namespace {

Relation rel(std::vector<AttrId> schema, std::vector<std::vector<Value>> rows) {
    return Relation(std::move(schema), rows);
}

}  // namespace

TEST_CASE("dictionary encodes integers as themselves and interns strings") {
    Dictionary d;
    CHECK(d.encode("42") == 42);
    CHECK(d.encode("-7") == -7);
    Value a = d.encode("apple");
    Value b = d.encode("banana");
    CHECK(a != b);
    CHECK(d.encode("apple") == a);
    CHECK(d.decode(a) == "apple");
    CHECK(d.decode(42) == "42");
    CHECK(a >= Dictionary::kStringBase);
}

TEST_CASE("project collapses duplicates and keeps schema order") {
    // project({(1,2),(1,3)} over (A,B), {A}) -> {(1)}
    Relation r = rel({0, 1}, {{1, 2}, {1, 3}});
    Relation p = project(r, AttrSet::of({0}));
    CHECK(p.size() == 1);
    CHECK(p.row(0)[0] == 1);

    // identity projection
    CHECK(project(r, r.attrs()) == r);

    CHECK_THROWS_AS(project(r, AttrSet::of({5})), SchemaError);
}

TEST_CASE("project on the empty-triangle instance, N = 4") {
    JoinQuery q = gen_triangle_instance(4);
    // R = {(0,1),(0,2),(1,0),(2,0)}; pi_B(R) = {0,1,2}
    Relation p = project(q.relations[0], AttrSet::of({1}));
    REQUIRE(p.size() == 3);
    CHECK(p.row(0)[0] == 0);
    CHECK(p.row(1)[0] == 1);
    CHECK(p.row(2)[0] == 2);
}

TEST_CASE("section") {
    JoinQuery q = gen_triangle_instance(4);
    const Relation& r = q.relations[0];  // over (A,B)

    // t_B = 0 section -> {(1),(2)} on {A}
    Relation s = section(r, Tuple{{1}, {0}});
    REQUIRE(s.size() == 2);
    CHECK(s.row(0)[0] == 1);
    CHECK(s.row(1)[0] == 2);

    // empty-tuple section is the relation itself
    CHECK(section(r, Tuple{}) == r);

    // no match
    Relation r2 = rel({0, 1}, {{0, 1}});
    CHECK(section(r2, Tuple{{0}, {5}}).empty());
}

TEST_CASE("semijoin") {
    Relation r = rel({0, 1}, {{0, 1}, {1, 0}});
    CHECK(semijoin(r, r) == r);

    Relation s = rel({1}, {{1}});
    Relation out = semijoin(r, s);
    REQUIRE(out.size() == 1);
    CHECK(out.row(0)[0] == 0);
    CHECK(out.row(0)[1] == 1);

    // disjoint schemas, s nonempty -> r
    Relation t = rel({3}, {{9}});
    CHECK(semijoin(r, t) == r);
    // disjoint schemas, s empty -> empty
    Relation e = rel({3}, {});
    CHECK(semijoin(r, e).empty());
}

TEST_CASE("brute force join on the generated families") {
    // empty-triangle family: empty full join at any N
    for (std::uint64_t n : {2ULL, 4ULL, 10ULL}) {
        JoinQuery q = gen_triangle_instance(n);
        CHECK(brute_force_join(q).empty());
    }

    // single edge -> that relation
    JoinQuery single;
    single.attrNames = {"A", "B"};
    single.edges = {AttrSet::of({0, 1})};
    single.relations = {rel({0, 1}, {{1, 2}, {3, 4}})};
    Relation out = brute_force_join(single);
    CHECK(out.sameRows(single.relations[0]));

    // LW bad instance n=3, N=5 -> N + (N-1)/(n-1) = 7 tuples
    JoinQuery bad = gen_lw_bad_instance(3, 5);
    CHECK(brute_force_join(bad).size() == 7);
}

TEST_CASE("brute force refuses past the candidate budget") {
    JoinQuery q = gen_triangle_instance(1000);
    CHECK_THROWS_AS(brute_force_join(q, 1000), BudgetExceeded);
}

TEST_CASE("set semantics: operators idempotent under duplicate insertion") {
    Relation r({0, 1}, {{1, 2}, {1, 2}, {3, 4}});
    CHECK(r.size() == 2);
    testutil::Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto schema = std::vector<AttrId>{0, 1, 2};
        Relation a = testutil::random_relation(rng, schema, 20, 4);
        auto rows = a.rowsCopy();
        auto doubled = rows;
        doubled.insert(doubled.end(), rows.begin(), rows.end());
        CHECK(Relation(schema, doubled) == a);
    }
}

TEST_CASE("project composition: project(project(r,S),T) == project(r,T) for T <= S") {
    testutil::Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<AttrId> schema{0, 1, 2, 3};
        Relation r = testutil::random_relation(rng, schema, 30, 3);
        AttrSet s = AttrSet::of({0, 1, 2});
        AttrSet t = AttrSet::of({0, 2});
        CHECK(project(project(r, s), t) == project(r, t));
    }
}

TEST_CASE("section/semijoin consistency") {
    testutil::Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<AttrId> schema{0, 1, 2};
        Relation r = testutil::random_relation(rng, schema, 25, 3);
        Tuple t{{0, 1},
                {testutil::randint(rng, 0, 2), testutil::randint(rng, 0, 2)}};
        Relation sec = section(r, t);
        Relation single({0, 1}, {t.values});
        Relation semi = semijoin(r, single);
        CHECK((sec.size() > 0) == (semi.size() > 0));
    }
}
