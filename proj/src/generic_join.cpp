#include "wcoj/generic_join.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#ifdef WCOJ_HAVE_OPENMP
#include <omp.h>
#endif

namespace wcoj {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kBoundSlackLog = 1e-9;  // ln(1+1e-9) up to first order

struct TupleBuf {
    std::vector<AttrId> cols;  // sorted by total-order rank
    std::vector<Value> flat;
    std::uint64_t nrows = 0;

    std::span<const Value> row(std::uint64_t i) const {
        return {flat.data() + i * cols.size(), cols.size()};
    }
};

// Per-execution mutable state; one per thread under the parallel driver.
struct Ctx {
    std::vector<Value> assign;   // current partial tuple, indexed by attribute
    WorkCounter wc;
    std::uint64_t recursionCalls = 0;
    std::uint64_t nodeChecks = 0;
    std::uint64_t boundViolations = 0;
    double maxExcessLog = kNegInf;
};

class Engine {
public:
    Engine(const JoinQuery& q, const CoverSolution& cover, const GjOptions& opt)
        : q_(q), opt_(opt) {
        order_ = opt.edgeOrder;
        if (order_.empty()) {
            order_.resize(q.numEdges());
            std::iota(order_.begin(), order_.end(), 0);
        }
        tree_ = build_qp_tree(q, order_);
        to_ = total_order(q, tree_);
        tries_.reserve(q.numEdges());
        for (int e = 0; e < q.numEdges(); ++e) tries_.emplace_back(q.relations[e], to_);
        x_.resize(order_.size());
        for (size_t pos = 0; pos < order_.size(); ++pos) x_[pos] = cover.x[order_[pos]];
    }

    const TotalOrder& totalOrder() const { return to_; }
    const QpTree& tree() const { return tree_; }

    Relation run(JoinRunStats* stats) {
        Ctx ctx;
        ctx.assign.assign(q_.numAttrs(), 0);
        TupleBuf out = recurse(ctx, tree_.root.get(), x_, AttrSet{}, /*atRoot=*/true);
        if (stats) {
            stats->work += ctx.wc;
            stats->recursionCalls += ctx.recursionCalls;
            stats->nodeChecks += ctx.nodeChecks;
            stats->boundViolations += ctx.boundViolations;
            stats->maxExcessLog = std::max(stats->maxExcessLog, ctx.maxExcessLog);
            stats->outSize = out.nrows;
        }
        // The recursion never generates duplicates; assert rather than assume.
        const size_t k = out.cols.size();
        for (std::uint64_t i = 1; i < out.nrows; ++i) {
            auto a = out.row(i - 1);
            auto b = out.row(i);
            if (!std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()))
                throw ContractViolation("recursive join emitted unsorted or duplicate rows");
        }
        (void)k;
        return Relation::fromSortedUnique(out.cols, std::move(out.flat));
    }

private:
    const JoinQuery& q_;
    GjOptions opt_;
    std::vector<int> order_;
    QpTree tree_;
    TotalOrder to_;
    std::vector<TrieIndex> tries_;
    std::vector<double> x_;

    const TrieIndex& trieAt(int pos) const { return tries_[order_[pos]]; }
    AttrSet edgeAt(int pos) const { return q_.edges[order_[pos]]; }

    std::vector<AttrId> colsFor(AttrSet s) const {
        std::vector<AttrId> cols = s.toVector();
        std::sort(cols.begin(), cols.end(),
                  [&](AttrId a, AttrId b) { return to_.rank(a) < to_.rank(b); });
        return cols;
    }

    // Walk the leading trie attributes of e_{pos+1} that lie in `bound`,
    // taking values from ctx.assign. The bound attrs must form a prefix of the
    // trie order (guaranteed by the total-order properties at executed nodes).
    std::optional<TrieIndex::Handle> locateBound(Ctx& ctx, int pos, AttrSet bound,
                                                 WorkCounter* wc) const {
        const TrieIndex& t = trieAt(pos);
        const int p = (edgeAt(pos) & bound).count();
        TrieIndex::Handle h = t.root();
        for (int i = 0; i < p; ++i) {
            AttrId a = t.attrOrder()[static_cast<size_t>(i)];
            if (!bound.contains(a))
                throw ContractViolation("trie prefix not aligned with total order");
            auto next = t.step(h, ctx.assign[a], wc);
            if (!next) return std::nullopt;
            h = *next;
        }
        return h;
    }

    void printTuple(std::ostream& os, Ctx& ctx, AttrSet s) const {
        os << "(";
        bool first = true;
        for (AttrId a : colsFor(s)) {
            if (!first) os << ",";
            os << ctx.assign[a];
            first = false;
        }
        os << ")";
    }

    double entryBoundLog(Ctx& ctx, const PlanNode* u, const std::vector<double>& y, AttrSet S) {
        const int k = u->label;
        double logB = 0.0;
        for (int pos = 0; pos < k; ++pos) {
            AttrSet inU = edgeAt(pos) & u->univ;
            if (inU.empty() || y[pos] == 0.0) continue;
            std::uint64_t cnt = 0;
            if (auto h = locateBound(ctx, pos, S, nullptr))
                cnt = trieAt(pos).count(*h, h->depth + inU.count(), nullptr);
            if (cnt == 0) return kNegInf;
            logB += y[pos] * std::log(static_cast<double>(cnt));
        }
        return logB;
    }

    void checkRet(Ctx& ctx, std::uint64_t retRows, double logB) {
        ctx.nodeChecks++;
        double lhs = retRows == 0 ? kNegInf : std::log(static_cast<double>(retRows));
        double excess = lhs - logB;
        ctx.maxExcessLog = std::max(ctx.maxExcessLog, excess);
        if (lhs > logB + kBoundSlackLog + 1e-12 * std::abs(logB)) ctx.boundViolations++;
    }

    TupleBuf recurse(Ctx& ctx, const PlanNode* u, const std::vector<double>& y, AttrSet S,
                     bool atRoot = false) {
        ctx.recursionCalls++;
        const int k = u->label;
        const AttrSet U = u->univ;
        TupleBuf ret;
        ret.cols = colsFor(S | U);

        double logB = 0.0;
        if (opt_.checkBounds) logB = entryBoundLog(ctx, u, y, S);

        if (opt_.debugChecks) {
            U.forEach([&](AttrId v) {
                double sum = 0.0;
                for (int pos = 0; pos < k; ++pos)
                    if (edgeAt(pos).contains(v)) sum += y[pos];
                if (sum < 1.0 - 1e-6)
                    throw ContractViolation("recursive join called with infeasible weights");
            });
        }

        if (u->isLeaf()) {
            leafCase(ctx, u, S, ret);
        } else {
            internalCase(ctx, u, y, S, ret, atRoot);
        }

        if (opt_.checkBounds) checkRet(ctx, ret.nrows, logB);
        return ret;
    }

    void leafCase(Ctx& ctx, const PlanNode* u, AttrSet S, TupleBuf& ret) {
        const int k = u->label;
        const AttrSet U = u->univ;
        const int w = U.count();

        std::vector<int> cand;
        std::vector<TrieIndex::Handle> handle;
        std::vector<std::uint64_t> cnt;
        for (int pos = 0; pos < k; ++pos) {
            AttrSet inU = edgeAt(pos) & U;
            if (inU.empty()) continue;
            if (inU != U)
                throw ContractViolation("leaf with edge partially overlapping the universe");
            cand.push_back(pos);
            auto h = locateBound(ctx, pos, S, &ctx.wc);
            std::uint64_t c = h ? trieAt(pos).count(*h, h->depth + w, &ctx.wc) : 0;
            handle.push_back(h.value_or(TrieIndex::Handle{}));
            cnt.push_back(c);
        }
        if (cand.empty()) throw ContractViolation("leaf with no covering edge");

        size_t jj = 0;
        for (size_t i = 1; i < cand.size(); ++i)
            if (cnt[i] < cnt[jj]) jj = i;

        if (opt_.trace) {
            auto& os = *opt_.trace;
            os << "leaf k=" << k << " univ=" << attrSetToString(q_, U) << " t=";
            printTuple(os, ctx, S);
            os << " anchor=" << cand[jj] + 1 << " counts=[";
            for (size_t i = 0; i < cand.size(); ++i)
                os << (i ? "," : "") << cand[i] + 1 << ":" << cnt[i];
            os << "]";
        }

        std::uint64_t emitted = 0;
        if (cnt[jj] > 0) {
            const TrieIndex& tj = trieAt(cand[jj]);
            auto uCols = colsFor(U);
            tj.enumerate(handle[jj], handle[jj].depth + w, &ctx.wc,
                         [&](std::span<const Value> vals) {
                for (int i = 0; i < w; ++i) ctx.assign[uCols[static_cast<size_t>(i)]] = vals[i];
                for (size_t i = 0; i < cand.size(); ++i) {
                    if (i == jj) continue;
                    TrieIndex::Handle h = handle[i];
                    const TrieIndex& ti = trieAt(cand[i]);
                    bool ok = true;
                    for (int d = 0; d < w; ++d) {
                        auto next = ti.step(h, vals[d], &ctx.wc);
                        if (!next) { ok = false; break; }
                        h = *next;
                    }
                    if (!ok) return;
                }
                for (AttrId a : ret.cols) ret.flat.push_back(ctx.assign[a]);
                ret.nrows++;
                ctx.wc.emit();
                emitted++;
            });
        }
        if (opt_.trace) *opt_.trace << " out=" << emitted << "\n";
    }

    void internalCase(Ctx& ctx, const PlanNode* u, const std::vector<double>& y, AttrSet S,
                      TupleBuf& ret, bool atRoot) {
        const int k = u->label;
        const AttrSet U = u->univ;

        TupleBuf L;
        if (!u->lc) {
            L.cols = colsFor(S);
            for (AttrId a : L.cols) L.flat.push_back(ctx.assign[a]);
            L.nrows = 1;
        } else {
            std::vector<double> yl(y.begin(), y.begin() + (k - 1));
            L = recurse(ctx, u->lc.get(), yl, S);
        }

        const AttrSet W = U - edgeAt(k - 1);
        const AttrSet Wm = edgeAt(k - 1) & U;
        if (Wm.empty()) {
            ret = std::move(L);
            return;
        }

        // Section of the anchor relation at t_{S ∩ e_k}: constant over L.
        auto hk = locateBound(ctx, k - 1, S, &ctx.wc);
        const int wmLevels = (edgeAt(k - 1) & Wm).count();
        std::uint64_t rhs = hk ? trieAt(k - 1).count(*hk, hk->depth + wmLevels, &ctx.wc) : 0;

        if (opt_.trace) {
            auto& os = *opt_.trace;
            os << "loop k=" << k << " univ=" << attrSetToString(q_, U) << " t=";
            printTuple(os, ctx, S);
            os << " |L|=" << L.nrows << " anchorSection=" << rhs << "\n";
        }

        const double yk = y[k - 1];

#ifdef WCOJ_HAVE_OPENMP
        if (atRoot && opt_.parallelThreads > 1 && !opt_.trace && L.nrows >= 64) {
            parallelLoop(ctx, u, y, S, W, Wm, L, hk, rhs, yk, ret);
            return;
        }
#endif
        for (std::uint64_t r = 0; r < L.nrows; ++r) {
            processTuple(ctx, u, y, S, W, Wm, L.row(r), L.cols, hk, rhs, yk, ret);
        }
        (void)atRoot;
    }

    // Per-tuple body: size check, then either recurse right and filter against
    // the anchor, or scan the anchor section and probe the others.
    void processTuple(Ctx& ctx, const PlanNode* u, const std::vector<double>& y, AttrSet S,
                      AttrSet W, AttrSet Wm, std::span<const Value> lrow,
                      const std::vector<AttrId>& lcols,
                      const std::optional<TrieIndex::Handle>& hk, std::uint64_t rhs, double yk,
                      TupleBuf& ret) {
        const int k = u->label;
        for (size_t i = 0; i < lcols.size(); ++i) ctx.assign[lcols[i]] = lrow[i];
        const AttrSet SW = S | W;

        // Edges of E_{k-1} that reach into W^-; their section counts drive the
        // per-tuple size check.
        std::vector<int> checks;
        std::vector<TrieIndex::Handle> cHandle;
        std::vector<std::uint64_t> cCnt;
        bool anyZero = false;
        for (int pos = 0; pos + 1 < k; ++pos) {
            AttrSet inWm = edgeAt(pos) & Wm;
            if (inWm.empty()) continue;
            checks.push_back(pos);
            auto h = locateBound(ctx, pos, SW, &ctx.wc);
            std::uint64_t c = h ? trieAt(pos).count(*h, h->depth + inWm.count(), &ctx.wc) : 0;
            cHandle.push_back(h.value_or(TrieIndex::Handle{}));
            cCnt.push_back(c);
            if (c == 0) anyZero = true;
        }

        bool caseA = false;
        if (yk < 1.0 && rhs > 0) {
            double lhsLog = 0.0;
            if (anyZero) {
                lhsLog = kNegInf;  // 0^y convention from the size-check product
            } else {
                for (size_t i = 0; i < checks.size(); ++i)
                    lhsLog += (y[checks[i]] / (1.0 - yk)) *
                              std::log(static_cast<double>(cCnt[i]));
            }
            const double rhsLog = std::log(static_cast<double>(rhs));
            const double guard = 1e-12 * std::max(1.0, std::abs(rhsLog));
            caseA = lhsLog < rhsLog - guard;  // ties scan the anchor relation
        }

        if (opt_.trace) {
            auto& os = *opt_.trace;
            os << "node k=" << k << " univ=" << attrSetToString(q_, u->univ) << " t=";
            printTuple(os, ctx, SW);
            os << " case=" << (caseA ? "a" : "b") << " cnts=[";
            for (size_t i = 0; i < checks.size(); ++i)
                os << (i ? "," : "") << checks[i] + 1 << ":" << cCnt[i];
            os << "] rhs=" << rhs << "\n";
        }

        auto wmCols = colsFor(Wm);
        if (caseA) {
            if (!u->rc)
                throw ContractViolation("case-a recursion into nil subtree (infeasible weights)");
            std::vector<double> yr(static_cast<size_t>(k - 1));
            for (int pos = 0; pos + 1 < k; ++pos) yr[pos] = y[pos] / (1.0 - yk);
            if (opt_.debugChecks) {
                Wm.forEach([&](AttrId v) {
                    double sum = 0.0;
                    for (int pos = 0; pos + 1 < k; ++pos)
                        if (edgeAt(pos).contains(v)) sum += yr[pos];
                    if (sum < 1.0 - 1e-6)
                        throw ContractViolation("rescaled weights infeasible for (W-, E_{k-1})");
                });
            }
            TupleBuf z = recurse(ctx, u->rc.get(), yr, SW);
            // filter Z against the anchor relation's section
            std::vector<size_t> wmPos;
            for (AttrId a : wmCols)
                wmPos.push_back(static_cast<size_t>(
                    std::find(z.cols.begin(), z.cols.end(), a) - z.cols.begin()));
            const TrieIndex& tk = trieAt(k - 1);
            std::uint64_t kept = 0;
            for (std::uint64_t r = 0; r < z.nrows; ++r) {
                auto zr = z.row(r);
                TrieIndex::Handle h = *hk;
                bool ok = true;
                for (size_t d = 0; d < wmPos.size(); ++d) {
                    auto next = tk.step(h, zr[wmPos[d]], &ctx.wc);
                    if (!next) { ok = false; break; }
                    h = *next;
                }
                if (!ok) continue;
                ret.flat.insert(ret.flat.end(), zr.begin(), zr.end());
                ret.nrows++;
                ctx.wc.emit();
                ++kept;
            }
            if (opt_.trace) {
                auto& os = *opt_.trace;
                os << "zret k=" << k << " univ=" << attrSetToString(q_, u->univ) << " t=";
                printTuple(os, ctx, SW);
                os << " |Z|=" << z.nrows << " kept=" << kept << "\n";
            }
        } else {
            if (rhs == 0 || anyZero) return;  // some section is empty; nothing can pass
            const TrieIndex& tk = trieAt(k - 1);
            tk.enumerate(*hk, hk->depth + static_cast<int>(wmCols.size()), &ctx.wc,
                         [&](std::span<const Value> vals) {
                for (size_t i = 0; i < wmCols.size(); ++i) ctx.assign[wmCols[i]] = vals[i];
                for (size_t i = 0; i < checks.size(); ++i) {
                    const TrieIndex& ti = trieAt(checks[i]);
                    TrieIndex::Handle h = cHandle[i];
                    const int need = (edgeAt(checks[i]) & Wm).count();
                    bool ok = true;
                    for (int d = 0; d < need; ++d) {
                        AttrId a = ti.attrOrder()[static_cast<size_t>(h.depth)];
                        auto next = ti.step(h, ctx.assign[a], &ctx.wc);
                        if (!next) { ok = false; break; }
                        h = *next;
                    }
                    if (!ok) return;
                }
                for (AttrId a : ret.cols) ret.flat.push_back(ctx.assign[a]);
                ret.nrows++;
                ctx.wc.emit();
            });
        }
    }

#ifdef WCOJ_HAVE_OPENMP
    void parallelLoop(Ctx& main, const PlanNode* u, const std::vector<double>& y, AttrSet S,
                      AttrSet W, AttrSet Wm, const TupleBuf& L,
                      const std::optional<TrieIndex::Handle>& hk, std::uint64_t rhs, double yk,
                      TupleBuf& ret) {
        const int nt = opt_.parallelThreads;
        std::vector<TupleBuf> parts(static_cast<size_t>(nt));
        std::vector<Ctx> ctxs(static_cast<size_t>(nt));
        for (auto& c : ctxs) c.assign = main.assign;
        for (auto& p : parts) p.cols = ret.cols;

#pragma omp parallel for schedule(static) num_threads(nt)
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(L.nrows); ++r) {
            int tid = omp_get_thread_num();
            processTuple(ctxs[static_cast<size_t>(tid)], u, y, S, W, Wm,
                         L.row(static_cast<std::uint64_t>(r)), L.cols, hk, rhs, yk,
                         parts[static_cast<size_t>(tid)]);
        }
        // schedule(static) hands each thread one contiguous block, so
        // concatenation in thread order preserves the sequential row order.
        for (int t = 0; t < nt; ++t) {
            ret.flat.insert(ret.flat.end(), parts[static_cast<size_t>(t)].flat.begin(),
                            parts[static_cast<size_t>(t)].flat.end());
            ret.nrows += parts[static_cast<size_t>(t)].nrows;
        }
        for (auto& c : ctxs) {
            main.wc += c.wc;
            main.recursionCalls += c.recursionCalls;
            main.nodeChecks += c.nodeChecks;
            main.boundViolations += c.boundViolations;
            main.maxExcessLog = std::max(main.maxExcessLog, c.maxExcessLog);
        }
    }
#endif
};

}  // namespace

Relation generic_join(const JoinQuery& q, const CoverSolution* cover, const GjOptions& opt,
                      JoinRunStats* stats) {
    q.validate();
    auto t0 = std::chrono::steady_clock::now();

    if (q.hasEmptyRelation()) {
        QpTree tree = build_qp_tree(q, opt.edgeOrder);
        TotalOrder to = total_order(q, tree);
        if (stats) {
            stats->outSize = 0;
            stats->logBound = kNegInf;
        }
        return Relation(to.order, {});
    }

    CoverSolution local;
    if (!cover) {
        local = solve_cover_lp(q);
        cover = &local;
    }
    if (!cover_feasible(q, cover->x, 1e-6))
        throw ContractViolation("generic_join: cover solution not feasible");

    Engine engine(q, *cover, opt);
    Relation out = engine.run(stats);
    if (stats) {
        stats->logBound = cover->objective;
        stats->wallMs = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    }
    return out;
}

std::string AgmReport::toJson() const {
    std::ostringstream os;
    os << "{\"outSize\":" << outSize << ",\"logBound\":" << logBound
       << ",\"outputWithinBound\":" << (outputWithinBound ? "true" : "false")
       << ",\"nodeChecks\":" << nodeChecks << ",\"nodeViolations\":" << nodeViolations
       << ",\"maxExcessLog\":" << maxExcessLog << "}";
    return os.str();
}

AgmReport agm_bound_check(const JoinQuery& q, const CoverSolution& x, const JoinRunStats& stats) {
    AgmReport rep;
    rep.outSize = stats.outSize;
    rep.logBound = 0.0;
    for (int e = 0; e < q.numEdges(); ++e)
        rep.logBound += x.x[e] * std::log(static_cast<double>(std::max<size_t>(1, q.relations[e].size())));
    double outLog = stats.outSize == 0 ? kNegInf : std::log(static_cast<double>(stats.outSize));
    rep.outputWithinBound = outLog <= rep.logBound + kBoundSlackLog + 1e-12 * std::abs(rep.logBound);
    rep.nodeChecks = stats.nodeChecks;
    rep.nodeViolations = stats.boundViolations;
    rep.maxExcessLog = stats.maxExcessLog;
    if (!rep.outputWithinBound || rep.nodeViolations > 0)
        throw ContractViolation("AGM bound violated: " + rep.toJson());
    return rep;
}

}  // namespace wcoj
