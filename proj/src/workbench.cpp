#include "wcoj/workbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "wcoj/generic_join.hpp"
#include "wcoj/graph_join.hpp"
#include "wcoj/lw_join.hpp"

namespace wcoj {

namespace {

std::vector<std::vector<Value>> example1_rows(std::uint64_t n) {
    std::vector<std::vector<Value>> rows;
    for (std::uint64_t j = 1; j <= n / 2; ++j) {
        rows.push_back({0, static_cast<Value>(j)});
        rows.push_back({static_cast<Value>(j), 0});
    }
    return rows;
}

}  // namespace

JoinQuery gen_triangle_instance(std::uint64_t n) {
    if (n % 2 != 0) throw ValidationError("gen_triangle_instance: N must be even");
    JoinQuery q;
    q.attrNames = {"A", "B", "C"};
    auto rows = example1_rows(n);
    q.edges = {AttrSet::of({0, 1}), AttrSet::of({1, 2}), AttrSet::of({0, 2})};
    q.relations.emplace_back(std::vector<AttrId>{0, 1}, rows);
    q.relations.emplace_back(std::vector<AttrId>{1, 2}, rows);
    q.relations.emplace_back(std::vector<AttrId>{0, 2}, rows);

    for (const auto& r : q.relations)
        if (r.size() != n) throw ValidationError("gen_triangle_instance: |R| != N");
    if (pair_join_size(q, 0, 1) != n * n / 4 + n / 2)
        throw ValidationError("gen_triangle_instance: |R join S| != N^2/4 + N/2");
    return q;
}

std::uint64_t lw_bad_join_size(int n, std::uint64_t bigN) {
    return bigN + (bigN - 1) / static_cast<std::uint64_t>(n - 1);
}

JoinQuery gen_lw_bad_instance(int n, std::uint64_t bigN) {
    if (n < 2) throw ValidationError("gen_lw_bad_instance: n >= 2 required");
    if ((bigN - 1) % static_cast<std::uint64_t>(n - 1) != 0) {
        std::uint64_t down = bigN - (bigN - 1) % (n - 1);
        throw ValidationError("gen_lw_bad_instance: need N = 1 mod (n-1); nearest valid N is " +
                              std::to_string(down));
    }
    const std::uint64_t d = (bigN - 1) / static_cast<std::uint64_t>(n - 1);
    JoinQuery q;
    for (int a = 0; a < n; ++a) q.attrNames.push_back("x" + std::to_string(a + 1));
    for (int i = 0; i < n; ++i) {
        AttrSet e = AttrSet::universe(n);
        e.remove(i);
        std::vector<AttrId> schema = e.toVector();
        std::vector<std::vector<Value>> rows;
        rows.push_back(std::vector<Value>(schema.size(), 0));
        for (size_t p = 0; p < schema.size(); ++p) {
            for (std::uint64_t v = 1; v <= d; ++v) {
                std::vector<Value> row(schema.size(), 0);
                row[p] = static_cast<Value>(v);
                rows.push_back(std::move(row));
            }
        }
        q.edges.push_back(e);
        q.relations.emplace_back(schema, rows);
        if (q.relations.back().size() != bigN)
            throw ValidationError("gen_lw_bad_instance: |R_i| != N");
    }
    return q;
}

JoinQuery gen_relaxed_lb_instance(int n, std::uint64_t bigN) {
    JoinQuery q;
    for (int a = 0; a < n; ++a) q.attrNames.push_back("x" + std::to_string(a + 1));
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<Value>> rows;
        for (std::uint64_t v = 1; v <= bigN; ++v) rows.push_back({static_cast<Value>(v)});
        q.edges.push_back(AttrSet::of({i}));
        q.relations.emplace_back(std::vector<AttrId>{i}, rows);
    }
    std::vector<AttrId> all;
    for (int a = 0; a < n; ++a) all.push_back(a);
    std::vector<std::vector<Value>> diag;
    for (std::uint64_t i = 1; i <= bigN; ++i)
        diag.push_back(std::vector<Value>(static_cast<size_t>(n),
                                          static_cast<Value>(bigN + i)));
    q.edges.push_back(AttrSet::universe(n));
    q.relations.emplace_back(all, diag);
    return q;
}

JoinQuery gen_extension_instance(const ExtensionSpec& spec, std::uint64_t bigN) {
    const int n = static_cast<int>(spec.attrNames.size());
    AttrSet u = AttrSet::from(spec.u);
    const int usz = u.count();
    if (usz < 2) throw ValidationError("gen_extension_instance: |U| >= 2 required");
    if (static_cast<int>(spec.f.size()) != usz)
        throw ValidationError("gen_extension_instance: |F| must equal |U|");

    std::vector<AttrSet> edges;
    for (const auto& e : spec.edges) edges.push_back(AttrSet::from(e));

    // condition (1): each attr of U occurs in exactly |U|-1 edges of F, and the
    // U-restrictions of F are the distinct (|U|-1)-subsets of U
    std::vector<AttrSet> restrictions;
    for (int fe : spec.f) {
        AttrSet ru = edges[fe] & u;
        if (ru.count() != usz - 1)
            throw ValidationError("gen_extension_instance: F edge restriction to U is not a (|U|-1)-subset");
        if (std::find(restrictions.begin(), restrictions.end(), ru) != restrictions.end())
            throw ValidationError("gen_extension_instance: duplicate F restriction on U");
        restrictions.push_back(ru);
    }
    u.forEach([&](AttrId a) {
        int cnt = 0;
        for (int fe : spec.f)
            if (edges[fe].contains(a)) ++cnt;
        if (cnt != usz - 1)
            throw ValidationError("gen_extension_instance: condition (1) violated at attribute " +
                                  spec.attrNames[a]);
    });
    // condition (2): every U-relevant attribute outside U sits in >= |U|-1 F edges
    for (int v = 0; v < n; ++v) {
        if (u.contains(v)) continue;
        bool relevant = true;
        for (const AttrSet& e : edges)
            if (e.contains(v) && !(e & u).count()) relevant = false;
        if (!relevant) continue;
        int cnt = 0;
        for (int fe : spec.f)
            if (edges[fe].contains(v)) ++cnt;
        if (cnt < usz - 1)
            throw ValidationError("gen_extension_instance: condition (2) violated at attribute " +
                                  spec.attrNames[v]);
    }
    // condition (3): no U-troublesome attributes
    for (int v = 0; v < n; ++v) {
        if (u.contains(v)) continue;
        bool troublesome = true;
        bool appears = false;
        for (const AttrSet& e : edges) {
            if (!e.contains(v)) continue;
            appears = true;
            if (!u.subsetOf(e)) troublesome = false;
        }
        if (appears && troublesome)
            throw ValidationError("gen_extension_instance: condition (3) violated at attribute " +
                                  spec.attrNames[v]);
    }

    JoinQuery bad = gen_lw_bad_instance(usz, bigN);
    std::vector<AttrId> uList = u.toVector();

    JoinQuery q;
    q.attrNames = spec.attrNames;
    for (size_t e = 0; e < edges.size(); ++e) {
        std::vector<AttrId> schema = edges[e].toVector();
        std::vector<std::vector<Value>> rows;
        auto fIt = std::find(spec.f.begin(), spec.f.end(), static_cast<int>(e));
        if (fIt != spec.f.end()) {
            // carry the matching bad-LW relation on e & U, pin the rest to 0
            AttrSet ru = edges[e] & u;
            AttrSet localSet;
            ru.forEach([&](AttrId a) {
                localSet.add(static_cast<AttrId>(
                    std::find(uList.begin(), uList.end(), a) - uList.begin()));
            });
            int src = -1;
            for (int i = 0; i < bad.numEdges(); ++i)
                if (bad.edges[i] == localSet) src = i;
            if (src < 0) throw ValidationError("gen_extension_instance: no matching LW edge");
            const Relation& rel = bad.relations[src];
            for (size_t i = 0; i < rel.size(); ++i) {
                std::vector<Value> row(schema.size(), 0);
                auto srow = rel.row(i);
                for (size_t p = 0; p < rel.schema().size(); ++p) {
                    AttrId globalAttr = uList[static_cast<size_t>(rel.schema()[p])];
                    size_t pos = static_cast<size_t>(
                        std::find(schema.begin(), schema.end(), globalAttr) - schema.begin());
                    row[pos] = srow[p];
                }
                rows.push_back(std::move(row));
            }
        } else {
            rows.push_back(std::vector<Value>(schema.size(), 0));
        }
        q.edges.push_back(edges[e]);
        q.relations.emplace_back(schema, rows);
    }
    q.validate();
    return q;
}

std::uint64_t pair_join_size(const JoinQuery& q, int i, int j) {
    const Relation& a = q.relations[i];
    const Relation& b = q.relations[j];
    AttrSet shared = a.attrs() & b.attrs();
    if (shared.empty()) return static_cast<std::uint64_t>(a.size()) * b.size();
    auto groupSizes = [&](const Relation& r) {
        std::map<std::vector<Value>, std::uint64_t> m;
        std::vector<size_t> cols;
        for (AttrId x : shared.toVector())
            cols.push_back(static_cast<size_t>(
                std::find(r.schema().begin(), r.schema().end(), x) - r.schema().begin()));
        std::vector<Value> key(cols.size());
        for (size_t t = 0; t < r.size(); ++t) {
            for (size_t c = 0; c < cols.size(); ++c) key[c] = r.row(t)[cols[c]];
            m[key]++;
        }
        return m;
    };
    auto ga = groupSizes(a);
    auto gb = groupSizes(b);
    std::uint64_t total = 0;
    for (const auto& [k, ca] : ga) {
        auto it = gb.find(k);
        if (it != gb.end()) total += ca * it->second;
    }
    return total;
}

Relation binary_join_plan(const JoinQuery& q, const std::vector<int>& order,
                          BinaryPlanStats* stats) {
    q.validate();
    const int m = q.numEdges();
    if (static_cast<int>(order.size()) != m)
        throw SchemaError("binary_join_plan: order must list every edge once");

    std::vector<AttrId> outSchema;
    for (int a = 0; a < q.numAttrs(); ++a) outSchema.push_back(a);

    // accumulated attribute sets and per-step hash groups on the shared key
    std::vector<AttrSet> acc(static_cast<size_t>(m));
    acc[0] = q.edges[order[0]];
    for (int s = 1; s < m; ++s) acc[s] = acc[s - 1] | q.edges[order[s]];

    struct Step {
        const Relation* rel;
        std::vector<AttrId> keyAttrs;   // shared attributes
        std::vector<AttrId> restAttrs;  // newly contributed attributes
        std::map<std::vector<Value>, std::vector<std::uint32_t>> groups;
        std::vector<size_t> restCols;
    };
    std::vector<Step> steps(static_cast<size_t>(m));
    for (int s = 1; s < m; ++s) {
        Step& st = steps[static_cast<size_t>(s)];
        st.rel = &q.relations[order[s]];
        AttrSet shared = acc[s - 1] & q.edges[order[s]];
        st.keyAttrs = shared.toVector();
        st.restAttrs = (q.edges[order[s]] - shared).toVector();
        std::vector<size_t> keyCols;
        for (AttrId a : st.keyAttrs)
            keyCols.push_back(static_cast<size_t>(
                std::find(st.rel->schema().begin(), st.rel->schema().end(), a) -
                st.rel->schema().begin()));
        for (AttrId a : st.restAttrs)
            st.restCols.push_back(static_cast<size_t>(
                std::find(st.rel->schema().begin(), st.rel->schema().end(), a) -
                st.rel->schema().begin()));
        std::vector<Value> key(keyCols.size());
        for (std::uint32_t i = 0; i < st.rel->size(); ++i) {
            for (size_t c = 0; c < keyCols.size(); ++c) key[c] = st.rel->row(i)[keyCols[c]];
            st.groups[key].push_back(i);
        }
    }

    BinaryPlanStats local;
    BinaryPlanStats* bs = stats ? stats : &local;
    bs->intermediateSizes.assign(static_cast<size_t>(std::max(0, m - 2)), 0);

    std::vector<Value> assign(static_cast<size_t>(q.numAttrs()), 0);
    std::vector<std::vector<Value>> rows;

    // depth-first streaming: J_s tuples are produced one at a time
    auto rec = [&](auto&& self, int s) -> void {
        if (s == m) {
            bs->work.emit();
            std::vector<Value> row;
            row.reserve(outSchema.size());
            for (AttrId a : outSchema) row.push_back(assign[static_cast<size_t>(a)]);
            rows.push_back(std::move(row));
            return;
        }
        Step& st = steps[static_cast<size_t>(s)];
        std::vector<Value> key;
        key.reserve(st.keyAttrs.size());
        for (AttrId a : st.keyAttrs) key.push_back(assign[static_cast<size_t>(a)]);
        bs->work.step();
        auto it = st.groups.find(key);
        if (it == st.groups.end()) return;
        for (auto ri : it->second) {
            auto row = st.rel->row(ri);
            for (size_t c = 0; c < st.restCols.size(); ++c)
                assign[static_cast<size_t>(st.restAttrs[c])] = row[st.restCols[c]];
            if (s < m - 1) {
                bs->intermediateSizes[static_cast<size_t>(s - 1)]++;
                bs->work.step();
            }
            self(self, s + 1);
        }
    };

    const Relation& first = q.relations[order[0]];
    for (size_t i = 0; i < first.size(); ++i) {
        auto row = first.row(i);
        for (size_t c = 0; c < first.schema().size(); ++c)
            assign[static_cast<size_t>(first.schema()[c])] = row[c];
        bs->work.step();
        if (m == 1) {
            rec(rec, m);
        } else {
            rec(rec, 1);
        }
    }

    bs->maxIntermediate = 0;
    for (auto v : bs->intermediateSizes) bs->maxIntermediate = std::max(bs->maxIntermediate, v);
    Relation out(outSchema, rows);
    bs->outSize = out.size();
    return out;
}

std::pair<std::vector<int>, BinaryPlanStats> best_binary_plan(const JoinQuery& q) {
    const int m = q.numEdges();
    if (m > 6) throw BudgetExceeded("best_binary_plan: m! enumeration limited to m <= 6");
    std::vector<int> order(static_cast<size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> bestOrder;
    BinaryPlanStats best;
    bool haveBest = false;
    do {
        BinaryPlanStats st;
        binary_join_plan(q, order, &st);
        if (!haveBest || st.maxIntermediate < best.maxIntermediate) {
            best = st;
            bestOrder = order;
            haveBest = true;
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return {bestOrder, best};
}

namespace {

double fit_slope(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(pts.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::string BenchReport::toCsv() const {
    std::ostringstream os;
    os << "family,N,algo,work,maxIntermediate,outSize,wallMs\n";
    for (const auto& c : cells) {
        os << c.family << "," << c.n << "," << c.algo << "," << c.work << ","
           << c.maxIntermediate << "," << c.outSize << "," << c.wallMs;
        if (c.status != "ok") os << " (" << c.status << ")";
        os << "\n";
    }
    return os.str();
}

std::string BenchReport::toJson() const {
    std::ostringstream os;
    os << "{\"cells\":[";
    for (size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        os << (i ? "," : "") << "{\"family\":\"" << c.family << "\",\"N\":" << c.n
           << ",\"algo\":\"" << c.algo << "\",\"work\":" << c.work
           << ",\"maxIntermediate\":" << c.maxIntermediate << ",\"outSize\":" << c.outSize
           << ",\"wallMs\":" << c.wallMs << ",\"status\":\"" << c.status << "\"}";
    }
    os << "],\"slopes\":{";
    for (size_t i = 0; i < slopes.size(); ++i)
        os << (i ? "," : "") << "\"" << slopes[i].first << "\":" << slopes[i].second;
    os << "}}";
    return os.str();
}

BenchReport bench_compare(const std::string& family, const std::vector<std::uint64_t>& sizes,
                          const std::vector<std::string>& algos, double timeoutMs, int lwBadN) {
    BenchReport rep;
    for (const std::string& algo : algos) {
        bool skipRest = false;
        std::vector<std::pair<double, double>> pts;
        for (std::uint64_t n : sizes) {
            BenchCell cell;
            cell.family = family;
            cell.n = n;
            cell.algo = algo;
            if (skipRest) {
                cell.status = "skipped";
                rep.cells.push_back(cell);
                continue;
            }
            JoinQuery q;
            if (family == "triangle") {
                q = gen_triangle_instance(n);
            } else if (family == "lwbad") {
                q = gen_lw_bad_instance(lwBadN, n);
            } else if (family == "relaxlb") {
                q = gen_relaxed_lb_instance(lwBadN, n);
            } else {
                throw ValidationError("bench: unknown family " + family);
            }
            auto t0 = std::chrono::steady_clock::now();
            try {
                if (algo == "generic" || algo == "generic-par") {
                    JoinRunStats st;
                    GjOptions opt;
                    if (algo == "generic-par") opt.parallelThreads = 4;
                    Relation out = generic_join(q, nullptr, opt, &st);
                    cell.work = st.work.total();
                    cell.outSize = out.size();
                } else if (algo == "lw") {
                    LwStats st;
                    Relation out = lw_join(q, {}, &st);
                    cell.work = st.work.total();
                    cell.outSize = out.size();
                } else if (algo == "graph") {
                    GraphJoinStats st;
                    Relation out = graph_join(q, &st);
                    cell.work = st.work.total();
                    cell.outSize = out.size();
                } else if (algo == "binary") {
                    std::vector<int> order(static_cast<size_t>(q.numEdges()));
                    std::iota(order.begin(), order.end(), 0);
                    BinaryPlanStats st;
                    Relation out = binary_join_plan(q, order, &st);
                    cell.work = st.work.total();
                    cell.maxIntermediate = st.maxIntermediate;
                    cell.outSize = out.size();
                } else {
                    throw ValidationError("bench: unknown algo " + algo);
                }
            } catch (const ContractViolation& e) {
                cell.status = std::string("error: ") + e.what();
            }
            cell.wallMs = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
            if (cell.status == "ok" && cell.wallMs > timeoutMs) {
                cell.status = "timeout";
                skipRest = true;
            }
            if (cell.status == "ok")
                pts.emplace_back(std::log(static_cast<double>(n)),
                                 std::log(static_cast<double>(std::max<std::uint64_t>(1, cell.work))));
            rep.cells.push_back(cell);
        }
        rep.slopes.emplace_back(algo, fit_slope(pts));
    }
    return rep;
}

}  // namespace wcoj
