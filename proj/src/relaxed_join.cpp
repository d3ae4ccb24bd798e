#include "wcoj/relaxed_join.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace wcoj {

namespace {

// log(sum exp(a_i)) without overflow
double log_sum_exp(const std::vector<double>& logs) {
    if (logs.empty()) return -std::numeric_limits<double>::infinity();
    double mx = *std::max_element(logs.begin(), logs.end());
    double s = 0;
    for (double l : logs) s += std::exp(l - mx);
    return mx + std::log(s);
}

}  // namespace

double CoverFamily::sizeBoundLog() const {
    std::vector<double> logs;
    for (int i : representatives) logs.push_back(hat[static_cast<size_t>(i)].lpOptLog);
    return log_sum_exp(logs);
}

CoverFamily enumerate_cstar(const RelaxedSpec& spec) {
    const JoinQuery& q = *spec.q;
    q.validate();
    const int m = q.numEdges();
    if (spec.r < 0 || spec.r > m)
        throw ContractViolation("relaxed join: r out of range");
    if (m > 20 && spec.r > 4) {
        double est = 0;
        for (int s = m - spec.r; s <= m; ++s) {
            double c = 0;
            for (int i = 0; i < m - s; ++i) c += std::log2(static_cast<double>(m - i) / (i + 1));
            est += std::exp2(c);
        }
        throw BudgetExceeded("enumerate_cstar: ~" + std::to_string(static_cast<long long>(est)) +
                             " candidate subsets exceed the m^O(r) budget");
    }

    // All qualifying subsets: |S| >= m-r and S covers V. Subsets containing an
    // empty relation join to nothing and are dropped from the working list.
    std::vector<std::vector<int>> qualifying;
    std::uint64_t fullCount = 0;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int next) -> void {
        if (static_cast<int>(cur.size()) + (m - next) < m - spec.r) return;  // cannot reach size
        if (next == m) {
            if (static_cast<int>(cur.size()) < m - spec.r) return;
            AttrSet covered;
            bool anyEmpty = false;
            for (int e : cur) {
                covered = covered | q.edges[e];
                if (q.relations[e].empty()) anyEmpty = true;
            }
            if (covered != q.universe()) return;
            ++fullCount;
            if (!anyEmpty) qualifying.push_back(cur);
            return;
        }
        cur.push_back(next);
        self(self, next + 1);
        cur.pop_back();
        self(self, next + 1);
    };
    rec(rec, 0);

    CoverFamily out;
    out.fullCount = fullCount;

    // Inclusion-minimal members: no single-edge removal stays qualifying.
    auto qualifies = [&](const std::vector<int>& s) {
        if (static_cast<int>(s.size()) < m - spec.r) return false;
        AttrSet covered;
        for (int e : s) covered = covered | q.edges[e];
        return covered == q.universe();
    };
    std::vector<std::vector<int>> minimal;
    for (const auto& s : qualifying) {
        bool isMinimal = true;
        for (size_t drop = 0; drop < s.size() && isMinimal; ++drop) {
            std::vector<int> t;
            for (size_t i = 0; i < s.size(); ++i)
                if (i != drop) t.push_back(s[i]);
            if (qualifies(t)) isMinimal = false;
        }
        if (isMinimal) minimal.push_back(s);
    }

    std::map<std::vector<int>, int> classOf;  // BFS support -> representative index in hat
    for (const auto& s : minimal) {
        auto lp = solve_cover_lp_subset(q, s);
        if (!lp) throw ContractViolation("qualifying subset failed to cover (bug)");
        CoverClassMember member;
        member.edges = s;
        member.weights = lp->x;
        member.lpOptLog = lp->objective;
        for (size_t i = 0; i < s.size(); ++i)
            if (lp->x[i] > kFeasEps) member.bfsSupport.push_back(s[i]);
        out.hat.push_back(std::move(member));
        int idx = static_cast<int>(out.hat.size()) - 1;
        auto [it, inserted] = classOf.emplace(out.hat.back().bfsSupport, idx);
        if (!inserted) {
            // keep the lexicographically smallest S as the class representative
            if (out.hat[static_cast<size_t>(it->second)].edges > out.hat.back().edges)
                it->second = idx;
        }
    }
    for (auto& [sup, idx] : classOf) out.representatives.push_back(idx);
    std::sort(out.representatives.begin(), out.representatives.end());
    return out;
}

Relation relaxed_join(const RelaxedSpec& spec, RelaxedStats* stats) {
    const JoinQuery& q = *spec.q;
    CoverFamily fam = enumerate_cstar(spec);
    const int m = q.numEdges();

    std::vector<AttrId> outSchema;
    for (int a = 0; a < q.numAttrs(); ++a) outSchema.push_back(a);

    std::vector<std::vector<Value>> rows;
    for (int rep : fam.representatives) {
        const CoverClassMember& member = fam.hat[static_cast<size_t>(rep)];
        // T = BFS(S): run the generic join on (V, T) with the restricted x*.
        JoinQuery sub;
        sub.attrNames = q.attrNames;
        sub.dict = q.dict;
        CoverSolution cover;
        for (int e : member.bfsSupport) {
            sub.edges.push_back(q.edges[e]);
            sub.relations.push_back(q.relations[e]);
            size_t pos = static_cast<size_t>(
                std::find(member.edges.begin(), member.edges.end(), e) - member.edges.begin());
            cover.x.push_back(member.weights[pos]);
            cover.objective += member.weights[pos] *
                               std::log(static_cast<double>(q.relations[e].size()));
        }
        JoinRunStats js;
        GjOptions opt;
        Relation phi = generic_join(sub, &cover, opt, &js);
        if (stats) {
            stats->work += js.work;
            stats->representativeJoins++;
        }

        // keep t iff t_e in R_e for at least m - r edges of E
        Relation full = phi.reordered(outSchema);
        std::vector<std::vector<size_t>> edgeCols(static_cast<size_t>(m));
        for (int e = 0; e < m; ++e)
            for (AttrId a : q.relations[e].schema())
                edgeCols[static_cast<size_t>(e)].push_back(static_cast<size_t>(a));
        std::vector<Value> probe;
        for (size_t i = 0; i < full.size(); ++i) {
            auto row = full.row(i);
            int agree = 0;
            for (int e = 0; e < m; ++e) {
                if (stats) stats->work.step();
                probe.clear();
                for (size_t c : edgeCols[static_cast<size_t>(e)]) probe.push_back(row[c]);
                if (q.relations[e].containsRow(probe)) ++agree;
            }
            if (agree >= m - spec.r) {
                if (stats) stats->work.emit();
                rows.emplace_back(row.begin(), row.end());
            }
        }
    }
    return Relation(outSchema, rows);
}

}  // namespace wcoj
