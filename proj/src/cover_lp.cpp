#include "wcoj/cover_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wcoj {

double CoverSolution::boundValue() const { return std::exp(objective); }

namespace {

constexpr double kPivotEps = 1e-11;

// Dense two-phase primal simplex for  min c.x  s.t.  A x >= b, x >= 0,
// with Bland's anti-cycling rule throughout. Returns the basic optimal
// solution over the structural variables, or nullopt on numerical failure.
struct SimplexOutcome {
    std::vector<double> x;
    double objective;
};

std::optional<SimplexOutcome> simplex_min(const std::vector<std::vector<double>>& A,
                                          const std::vector<double>& b,
                                          const std::vector<double>& c) {
    const int nRows = static_cast<int>(A.size());
    const int nStruct = static_cast<int>(c.size());
    // columns: structural | surplus | artificial | rhs
    const int nCols = nStruct + nRows + nRows;
    std::vector<std::vector<double>> t(nRows, std::vector<double>(nCols + 1, 0.0));
    std::vector<int> basis(nRows);
    for (int r = 0; r < nRows; ++r) {
        for (int j = 0; j < nStruct; ++j) t[r][j] = A[r][j];
        t[r][nStruct + r] = -1.0;           // surplus
        t[r][nStruct + nRows + r] = 1.0;    // artificial
        t[r][nCols] = b[r];
        basis[r] = nStruct + nRows + r;
    }

    auto pivot = [&](int pr, int pc) {
        double pv = t[pr][pc];
        for (double& v : t[pr]) v /= pv;
        for (int r = 0; r < nRows; ++r) {
            if (r == pr) continue;
            double f = t[r][pc];
            if (f == 0.0) continue;
            for (int j = 0; j <= nCols; ++j) t[r][j] -= f * t[pr][j];
        }
        basis[pr] = pc;
    };

    // One simplex phase over the given objective row; allowed limits columns.
    auto run = [&](const std::vector<double>& cost, int allowedCols) -> bool {
        std::vector<double> z(nCols + 1, 0.0);
        auto recomputeZ = [&]() {
            std::fill(z.begin(), z.end(), 0.0);
            for (int j = 0; j < allowedCols; ++j) z[j] = cost[j];
            z[nCols] = 0.0;
            for (int r = 0; r < nRows; ++r) {
                double cb = cost[basis[r]];
                if (cb == 0.0) continue;
                for (int j = 0; j <= nCols; ++j) z[j] -= cb * t[r][j];
            }
        };
        recomputeZ();
        for (long iter = 0; iter < 200L * (nCols + nRows + 4); ++iter) {
            int pc = -1;
            for (int j = 0; j < allowedCols; ++j) {
                if (z[j] < -kPivotEps) { pc = j; break; }  // Bland: lowest index
            }
            if (pc < 0) return true;  // optimal
            int pr = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < nRows; ++r) {
                if (t[r][pc] > kPivotEps) {
                    double ratio = t[r][nCols] / t[r][pc];
                    if (ratio < best - kPivotEps ||
                        (ratio < best + kPivotEps && (pr < 0 || basis[r] < basis[pr]))) {
                        best = ratio;
                        pr = r;
                    }
                }
            }
            if (pr < 0) return false;  // unbounded: impossible here, treat as failure
            pivot(pr, pc);
            recomputeZ();
        }
        return false;  // did not converge
    };

    // Phase 1: minimize the sum of artificials.
    std::vector<double> c1(nCols, 0.0);
    for (int r = 0; r < nRows; ++r) c1[nStruct + nRows + r] = 1.0;
    if (!run(c1, nCols)) return std::nullopt;
    double infeas = 0.0;
    for (int r = 0; r < nRows; ++r)
        if (basis[r] >= nStruct + nRows) infeas += t[r][nCols];
    if (infeas > 1e-7) return std::nullopt;

    // Drive leftover zero-valued artificials out of the basis.
    for (int r = 0; r < nRows; ++r) {
        if (basis[r] < nStruct + nRows) continue;
        int pc = -1;
        for (int j = 0; j < nStruct + nRows; ++j)
            if (std::abs(t[r][j]) > 1e-7) { pc = j; break; }
        if (pc >= 0) pivot(r, pc);
        // else: redundant row; harmless to leave the artificial basic at zero
    }

    // Phase 2 over structural + surplus columns only.
    std::vector<double> c2(nCols, 0.0);
    for (int j = 0; j < nStruct; ++j) c2[j] = c[j];
    if (!run(c2, nStruct + nRows)) return std::nullopt;

    SimplexOutcome out;
    out.x.assign(nStruct, 0.0);
    for (int r = 0; r < nRows; ++r)
        if (basis[r] < nStruct) out.x[basis[r]] = t[r][nCols];
    for (double& v : out.x)
        if (std::abs(v) < 1e-12) v = 0.0;
    out.objective = 0.0;
    for (int j = 0; j < nStruct; ++j) out.objective += c[j] * out.x[j];
    if (!std::isfinite(out.objective)) return std::nullopt;
    return out;
}

std::optional<CoverSolution> solve_lp_over(const JoinQuery& q, const std::vector<int>& edgeIdxs) {
    const int n = q.numAttrs();
    const int k = static_cast<int>(edgeIdxs.size());
    AttrSet covered;
    for (int e : edgeIdxs) covered = covered | q.edges[e];
    if (covered != q.universe()) return std::nullopt;

    std::vector<std::vector<double>> A(n, std::vector<double>(k, 0.0));
    std::vector<double> b(n, 1.0), c(k, 0.0);
    for (int j = 0; j < k; ++j) {
        const int e = edgeIdxs[j];
        if (q.relations[e].empty())
            throw SchemaError("cover lp requires N_e >= 1 (empty relation)");
        c[j] = std::log(static_cast<double>(q.relations[e].size()));
        q.edges[e].forEach([&](AttrId v) { A[v][j] = 1.0; });
    }
    auto res = simplex_min(A, b, c);
    CoverSolution out;
    if (!res) {
        // all-ones cover is always feasible for a well-formed query
        out.x.assign(k, 1.0);
        out.objective = std::accumulate(c.begin(), c.end(), 0.0);
        return out;
    }
    out.x = res->x;
    out.objective = res->objective;
    return out;
}

}  // namespace

CoverSolution solve_cover_lp(const JoinQuery& q) {
    q.validate();
    std::vector<int> all(q.numEdges());
    std::iota(all.begin(), all.end(), 0);
    auto res = solve_lp_over(q, all);
    if (!res) throw SchemaError("cover lp infeasible: query does not cover its universe");
    return *res;
}

std::optional<CoverSolution> solve_cover_lp_subset(const JoinQuery& q,
                                                   const std::vector<int>& edgeIdxs) {
    return solve_lp_over(q, edgeIdxs);
}

bool cover_feasible(const JoinQuery& q, std::span<const double> x, double eps) {
    if (static_cast<int>(x.size()) != q.numEdges()) return false;
    for (double v : x)
        if (v < -eps) return false;
    for (int a = 0; a < q.numAttrs(); ++a) {
        double sum = 0.0;
        for (int e = 0; e < q.numEdges(); ++e)
            if (q.edges[e].contains(a)) sum += x[e];
        if (sum < 1.0 - eps) return false;
    }
    return true;
}

std::optional<std::vector<Rational>> rationalize(std::span<const double> x, long long maxDen,
                                                 double tol) {
    std::vector<Rational> out;
    out.reserve(x.size());
    for (double v : x) {
        bool found = false;
        // Stern-Brocot search for the smallest denominator within tol.
        for (long long den = 1; den <= maxDen; ++den) {
            double scaled = v * static_cast<double>(den);
            long long num = std::llround(scaled);
            if (std::abs(scaled - static_cast<double>(num)) <=
                tol * static_cast<double>(den)) {
                long long g = std::gcd(std::abs(num), den);
                out.push_back({num / g, den / g});
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    }
    return out;
}

bool cover_feasible_exact(const JoinQuery& q, const std::vector<Rational>& x) {
    if (static_cast<int>(x.size()) != q.numEdges()) return false;
    for (const auto& r : x)
        if (r.num < 0) return false;
    for (int a = 0; a < q.numAttrs(); ++a) {
        // sum of fractions >= 1, exactly, via common denominator in __int128
        __int128 num = 0;
        __int128 den = 1;
        for (int e = 0; e < q.numEdges(); ++e) {
            if (!q.edges[e].contains(a)) continue;
            num = num * x[e].den + static_cast<__int128>(x[e].num) * den;
            den *= x[e].den;
        }
        if (num < den) return false;
    }
    return true;
}

TightenResult tighten_cover(const JoinQuery& q, const CoverSolution& cover) {
    q.validate();
    if (!cover_feasible(q, cover.x))
        throw ContractViolation("tighten_cover: input cover not feasible");

    TightenResult out;
    out.query = q;
    std::vector<double> x = cover.x;
    const int n = q.numAttrs();

    auto slack = [&](AttrId v) {
        double sum = 0.0;
        for (size_t e = 0; e < out.query.edges.size(); ++e)
            if (out.query.edges[e].contains(v)) sum += x[e];
        return sum - 1.0;
    };

    const int maxSteps = n + q.numEdges() + 4;
    for (;; ++out.steps) {
        int v = -1;
        for (int a = 0; a < n; ++a)
            if (slack(a) > kFeasEps) { v = a; break; }
        if (v < 0) break;
        if (out.steps > maxSteps)
            throw ContractViolation("tighten_cover: did not converge");

        int f = -1;
        for (size_t e = 0; e < out.query.edges.size(); ++e)
            if (out.query.edges[e].contains(v) && x[e] > kFeasEps) { f = static_cast<int>(e); break; }
        if (f < 0) throw ContractViolation("tighten_cover: non-tight vertex with no positive edge");

        AttrSet ft, fnt;
        double minSlack = std::numeric_limits<double>::infinity();
        out.query.edges[f].forEach([&](AttrId u) {
            double s = slack(u);
            if (s > kFeasEps) {
                fnt.add(u);
                minSlack = std::min(minSlack, s);
            } else {
                ft.add(u);
            }
        });

        double xf = x[f];
        double newEdgeWeight;
        if (xf <= minSlack + kFeasEps) {
            newEdgeWeight = xf;   // case 1: variable drops to zero
            x[f] = 0.0;
        } else {
            newEdgeWeight = minSlack;  // case 2: some constraint becomes tight
            x[f] = xf - minSlack;
        }
        if (!ft.empty()) {
            out.query.edges.push_back(ft);
            out.query.relations.push_back(project(out.query.relations[f], ft));
            x.push_back(newEdgeWeight);
        }
        // ft empty: reducing x_f alone keeps feasibility (every vertex of f had slack)
    }

    out.cover.x = x;
    out.cover.objective = 0.0;
    for (size_t e = 0; e < x.size(); ++e)
        if (x[e] > 0.0 && !out.query.relations[e].empty())
            out.cover.objective += x[e] * std::log(static_cast<double>(out.query.relations[e].size()));
    return out;
}

GraphCoverDecomposition graph_cover_decompose(const JoinQuery& q) {
    q.validate();
    for (const AttrSet& e : q.edges)
        if (e.count() > 2)
            throw ContractViolation("graph_cover_decompose: edge with arity > 2");

    CoverSolution lp = solve_cover_lp(q);
    GraphCoverDecomposition out;
    out.objective = 0.0;
    out.x.resize(q.numEdges());
    for (int e = 0; e < q.numEdges(); ++e) {
        double v = lp.x[e];
        double snapped;
        if (std::abs(v) <= kFeasEps)
            snapped = 0.0;
        else if (std::abs(v - 0.5) <= kFeasEps)
            snapped = 0.5;
        else if (std::abs(v - 1.0) <= kFeasEps)
            snapped = 1.0;
        else
            throw ContractViolation("graph_cover_decompose: weight not half-integral");
        if (q.edges[e].count() == 1 && snapped == 0.5)
            throw ContractViolation("graph_cover_decompose: arity-1 edge with weight 1/2");
        out.x[e] = snapped;
        out.objective += snapped * std::log(static_cast<double>(q.relations[e].size()));
    }

    AttrSet starVerts, halfVerts;
    std::vector<std::vector<int>> halfEdgesAt(q.numAttrs());
    for (int e = 0; e < q.numEdges(); ++e) {
        if (out.x[e] == 1.0) {
            out.stars.push_back(e);
            starVerts = starVerts | q.edges[e];
        } else if (out.x[e] == 0.5) {
            halfVerts = halfVerts | q.edges[e];
            q.edges[e].forEach([&](AttrId v) { halfEdgesAt[v].push_back(e); });
        } else {
            out.zeros.push_back(e);
        }
    }
    if (starVerts.intersects(halfVerts))
        throw ContractViolation("graph_cover_decompose: cycles not vertex-disjoint from stars");
    if ((starVerts | halfVerts) != q.universe())
        throw ContractViolation("graph_cover_decompose: support does not cover the universe");

    // Half-weight edges must decompose into vertex-disjoint odd cycles.
    halfVerts.forEach([&](AttrId v) {
        if (halfEdgesAt[v].size() != 2)
            throw ContractViolation("graph_cover_decompose: half-edge degree != 2 at vertex");
    });
    std::vector<bool> used(q.numEdges(), false);
    halfVerts.forEach([&](AttrId start) {
        if (!halfEdgesAt[start].empty() && !used[halfEdgesAt[start][0]]) {
            std::vector<int> cycle;
            int v = start;
            int e = halfEdgesAt[v][0];
            while (!used[e]) {
                used[e] = true;
                cycle.push_back(e);
                AttrSet other = q.edges[e];
                other.remove(v);
                if (other.empty())
                    throw ContractViolation("graph_cover_decompose: half weight on arity-1 edge");
                v = other.smallest();
                e = (halfEdgesAt[v][0] == cycle.back()) ? halfEdgesAt[v][1] : halfEdgesAt[v][0];
            }
            if (e != cycle.front())
                throw ContractViolation("graph_cover_decompose: half edges do not close a cycle");
            if (cycle.size() % 2 == 0 || cycle.size() < 3)
                throw ContractViolation("graph_cover_decompose: even or degenerate half cycle");
            out.cycles.push_back(std::move(cycle));
        }
    });

    // Star structure: every connected x=1 component shares a common vertex.
    std::vector<int> comp(q.numEdges(), -1);
    for (size_t i = 0; i < out.stars.size(); ++i) {
        if (comp[out.stars[i]] >= 0) continue;
        std::vector<int> stack{out.stars[i]};
        comp[out.stars[i]] = static_cast<int>(i);
        AttrSet common = q.edges[out.stars[i]];
        AttrSet verts = common;
        while (!stack.empty()) {
            int e = stack.back();
            stack.pop_back();
            for (int f : out.stars) {
                if (comp[f] < 0 && q.edges[f].intersects(q.edges[e])) {
                    comp[f] = comp[out.stars[i]];
                    common = common & q.edges[f];
                    verts = verts | q.edges[f];
                    stack.push_back(f);
                }
            }
        }
        size_t compEdges = 0;
        for (int f : out.stars)
            if (comp[f] == comp[out.stars[i]]) ++compEdges;
        if (compEdges > 1 && common.empty())
            throw ContractViolation("graph_cover_decompose: x=1 component is not a star");
    }
    return out;
}

}  // namespace wcoj
