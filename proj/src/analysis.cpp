#include "regprob/analysis.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "regprob/errors.hpp"
#include "regprob/linalg.hpp"

namespace regprob {

std::vector<std::size_t> zero_variables(const PolySystem& p) {
    const std::size_t n = p.size();
    std::vector<bool> nonzero(n, false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (nonzero[i]) continue;
            bool pos = p.polys[i].constant > Rational();
            for (const auto& m : p.polys[i].monomials) {
                if (pos) break;
                bool all = true;
                for (const auto& [v, e] : m.exps)
                    if (!nonzero[v]) all = false;
                pos = all;
            }
            if (pos) {
                nonzero[i] = true;
                changed = true;
            }
        }
    }
    std::vector<std::size_t> zeros;
    for (std::size_t i = 0; i < n; ++i)
        if (!nonzero[i]) zeros.push_back(i);
    return zeros;
}

ReducedSystem remove_zeros(const PolySystem& p) {
    auto zeros = zero_variables(p);
    std::vector<bool> is_zero(p.size(), false);
    for (std::size_t z : zeros) is_zero[z] = true;

    ReducedSystem r;
    r.removed = zeros;
    std::vector<std::size_t> new_index(p.size(), SIZE_MAX);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (is_zero[i]) continue;
        new_index[i] = r.orig_index.size();
        r.orig_index.push_back(i);
        r.system.variables.push_back(p.variables[i]);
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (is_zero[i]) continue;
        Polynomial poly;
        poly.constant = p.polys[i].constant;
        for (const auto& m : p.polys[i].monomials) {
            bool drop = false;
            for (const auto& [v, e] : m.exps)
                if (is_zero[v]) drop = true;
            if (drop) continue;
            Monomial mm;
            mm.coeff = m.coeff;
            for (const auto& [v, e] : m.exps) mm.exps.emplace_back(new_index[v], e);
            poly.monomials.push_back(std::move(mm));
        }
        r.system.polys.push_back(std::move(poly));
    }
    r.system.is_pps = true;
    for (const auto& poly : r.system.polys) {
        Rational sum = poly.constant;
        for (const auto& m : poly.monomials) sum += m.coeff;
        if (sum > Rational(1)) r.system.is_pps = false;
    }
    if (!p.is_pps) r.system.is_pps = false;
    return r;
}

namespace {

void require_pps_no_zeros(const PolySystem& p, const char* who) {
    if (!p.is_pps) throw NotPpsError(std::string(who) + ": system is not a PPS");
    if (!zero_variables(p).empty())
        throw Error(std::string(who) + ": zero variables must be removed first");
}

RatMatrix jacobian_at_one_restricted(const PolySystem& p, const std::vector<std::size_t>& vars) {
    RatVector ones(p.size(), Rational(1));
    RatMatrix full = jacobian(p, ones);
    RatMatrix sub(vars.size(), vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = 0; j < vars.size(); ++j) sub.at(i, j) = full.at(vars[i], vars[j]);
    return sub;
}

// Feasibility of {M u = u, sum u = 1, u >= 0}: detects a nonnegative
// eigenvector for eigenvalue 1, i.e. rho(M) = 1 on an SCC with rho <= 1.
bool unit_eigenvector_feasible(const RatMatrix& M) {
    const std::size_t k = M.rows;
    RatMatrix A(k + 1, k);
    RatVector b(k + 1);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            A.at(i, j) = M.at(i, j) - (i == j ? Rational(1) : Rational());
        b[i] = Rational();
    }
    for (std::size_t j = 0; j < k; ++j) A.at(k, j) = Rational(1);
    b[k] = Rational(1);
    return nonneg_solution_exists(A, b);
}

struct OneClassification {
    std::vector<bool> one;          // per variable
    std::vector<bool> scc_all_one;  // per scc id
};

OneClassification classify_ones(const PolySystem& p, const SccDag& dag) {
    OneClassification out;
    out.one.assign(p.size(), false);
    out.scc_all_one.assign(dag.scc_count(), false);
    // dependencies first: reverse of topo_order
    for (std::size_t k = dag.topo_order.size(); k-- > 0;) {
        std::size_t id = dag.topo_order[k];
        bool below_one = true;
        for (std::size_t v : dag.below[id])
            if (!out.one[v]) below_one = false;
        if (!below_one) continue;
        bool proper = true;
        for (std::size_t v : dag.members[id]) {
            Rational sum = p.polys[v].constant;
            for (const auto& m : p.polys[v].monomials) sum += m.coeff;
            if (sum != Rational(1)) proper = false;
        }
        if (!proper) continue;
        RatMatrix sub = jacobian_at_one_restricted(p, dag.members[id]);
        bool radius_at_most_one =
            inverse_if_nonneg(sub).has_value() || unit_eigenvector_feasible(sub);
        if (!radius_at_most_one) continue;
        out.scc_all_one[id] = true;
        for (std::size_t v : dag.members[id]) out.one[v] = true;
    }
    return out;
}

std::vector<std::size_t> critical_scc_ids(const PolySystem& p, const SccDag& dag) {
    OneClassification ones = classify_ones(p, dag);
    std::vector<std::size_t> out;
    for (std::size_t id = 0; id < dag.scc_count(); ++id) {
        if (!ones.scc_all_one[id]) continue;
        RatMatrix sub = jacobian_at_one_restricted(p, dag.members[id]);
        if (unit_eigenvector_feasible(sub)) out.push_back(id);
    }
    return out;
}

unsigned depth_of(const SccDag& dag, const std::vector<std::size_t>& criticals) {
    std::vector<bool> is_critical(dag.scc_count(), false);
    for (std::size_t id : criticals) is_critical[id] = true;
    // longest chain of critical SCCs along reachability, dependencies first
    std::vector<unsigned> chain(dag.scc_count(), 0);
    unsigned best = 0;
    for (std::size_t k = dag.topo_order.size(); k-- > 0;) {
        std::size_t id = dag.topo_order[k];
        unsigned deepest = 0;
        for (std::size_t succ : dag.successors[id]) deepest = std::max(deepest, chain[succ]);
        chain[id] = deepest + (is_critical[id] ? 1u : 0u);
        best = std::max(best, chain[id]);
    }
    return best;
}

}  // namespace

std::vector<std::size_t> one_variables(const PolySystem& p) {
    require_pps_no_zeros(p, "one_variables");
    SccDag dag = scc_dag(p);
    OneClassification ones = classify_ones(p, dag);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (ones.one[i]) out.push_back(i);
    return out;
}

std::vector<std::size_t> critical_sccs(const PolySystem& p) {
    require_pps_no_zeros(p, "critical_sccs");
    return critical_scc_ids(p, scc_dag(p));
}

unsigned critical_depth(const PolySystem& p) {
    require_pps_no_zeros(p, "critical_depth");
    SccDag dag = scc_dag(p);
    return depth_of(dag, critical_scc_ids(p, dag));
}

AnalysisReport analyze_grammar(const SnfWcfg& g) {
    PolySystem base = build_system(g);
    if (!base.is_pps) throw NotPpsError("analyze_grammar: grammar system is not a PPS");
    AnalysisReport report;
    report.encoding_size = encoding_size(g);

    ReducedSystem reduced = remove_zeros(base);
    for (std::size_t z : reduced.removed) report.zero_vars.push_back(base.variables[z]);

    SccDag dag = scc_dag(reduced.system);
    OneClassification ones = classify_ones(reduced.system, dag);
    for (std::size_t i = 0; i < reduced.system.size(); ++i)
        if (ones.one[i]) report.one_vars.push_back(reduced.system.variables[i]);

    auto criticals = critical_scc_ids(reduced.system, dag);
    for (std::size_t id : criticals) {
        std::vector<std::string> names;
        for (std::size_t v : dag.members[id]) names.push_back(reduced.system.variables[v]);
        report.critical_sccs.push_back(std::move(names));
    }
    report.critical_depth = depth_of(dag, criticals);
    return report;
}

SnfWcfg tweak_grammar(const SnfWcfg& g, const Rational& eps) {
    if (!(eps > Rational()) || eps > Rational(1))
        throw Error("tweak_grammar: eps must lie in (0, 1]");
    PolySystem base = build_system(g);
    if (!base.is_pps) throw NotPpsError("tweak_grammar: grammar system is not a PPS");
    ReducedSystem reduced = remove_zeros(base);
    SccDag dag = scc_dag(reduced.system);
    auto criticals = critical_scc_ids(reduced.system, dag);
    if (criticals.empty()) return g;

    unsigned c = depth_of(dag, criticals);
    std::size_t gsize = encoding_size(g);
    if (c >= 40) throw Error("tweak_grammar: critical depth too large to form delta");
    unsigned long two_c = 1ul << c;
    // delta = 2^-((14|G|+3) * 2^c) * eps^(2^c)
    Rational delta =
        pow2(-static_cast<long>((14 * gsize + 3) * two_c)) * eps.pow(two_c);
    Rational factor = Rational(1) - delta;

    std::set<std::size_t> critical_set(criticals.begin(), criticals.end());
    SnfWcfg out = g;
    for (std::size_t id : criticals) {
        // bottom-critical: no critical SCC below
        bool bottom = true;
        for (std::size_t v : dag.below[id])
            if (critical_set.count(dag.scc_of[v])) bottom = false;
        if (!bottom) continue;

        std::set<std::string> members;
        for (std::size_t v : dag.members[id]) members.insert(reduced.system.variables[v]);
        // lexicographically first kind-L rule A -> B with A, B in the SCC
        std::size_t chosen = SIZE_MAX;
        for (std::size_t i = 0; i < out.g.rules.size(); ++i) {
            const Rule& r = out.g.rules[i];
            if (r.body.size() != 1 || !members.count(r.left) || !members.count(r.body[0]))
                continue;
            if (out.kind_of(r.left) != SnfKind::L) continue;
            if (chosen == SIZE_MAX ||
                std::tie(r.left, r.body[0]) <
                    std::tie(out.g.rules[chosen].left, out.g.rules[chosen].body[0]))
                chosen = i;
        }
        if (chosen == SIZE_MAX)
            throw NoInternalLRuleError("bottom-critical SCC has no internal kind-L rule");
        out.g.rules[chosen].weight *= factor;
    }

    // The tweak is sized to remove criticality; verify that it did.
    PolySystem tweaked = build_system(out);
    ReducedSystem tweaked_reduced = remove_zeros(tweaked);
    if (!critical_sccs(tweaked_reduced.system).empty())
        throw Error("tweak_grammar: output still has a critical SCC");
    return out;
}

nlohmann::json to_json(const AnalysisReport& r) {
    return {{"zero", r.zero_vars},
            {"one", r.one_vars},
            {"critical_sccs", r.critical_sccs},
            {"critical_depth", r.critical_depth},
            {"encoding_size", r.encoding_size}};
}

}  // namespace regprob
