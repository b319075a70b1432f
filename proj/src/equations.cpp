#include "regprob/equations.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "regprob/errors.hpp"

namespace regprob {

unsigned Monomial::total_degree() const {
    unsigned d = 0;
    for (const auto& [v, e] : exps) d += e;
    return d;
}

std::size_t PolySystem::var_index(const std::string& name) const {
    auto it = std::find(variables.begin(), variables.end(), name);
    if (it == variables.end()) throw UnknownNonterminalError("unknown variable: " + name);
    return static_cast<std::size_t>(it - variables.begin());
}

PolySystem build_system(const SnfWcfg& g) {
    validate_snf(g, false);
    PolySystem p;
    p.variables = g.g.nonterminals;
    p.polys.resize(p.variables.size());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < p.variables.size(); ++i) index[p.variables[i]] = i;

    for (const auto& r : g.g.rules) {
        Polynomial& poly = p.polys[index[r.left]];
        std::map<std::size_t, unsigned> exps;
        for (const auto& sym : r.body) {
            auto it = index.find(sym);
            if (it != index.end()) ++exps[it->second];
        }
        if (exps.empty()) {
            poly.constant += r.weight;
            continue;
        }
        Monomial m;
        m.coeff = r.weight;
        m.exps.assign(exps.begin(), exps.end());
        if (m.total_degree() > 2) throw Error("monomial of degree > 2 from SNF grammar");
        // merge with an existing monomial over the same exponent vector
        bool merged = false;
        for (auto& existing : poly.monomials) {
            if (existing.exps == m.exps) {
                existing.coeff += m.coeff;
                merged = true;
                break;
            }
        }
        if (!merged) poly.monomials.push_back(std::move(m));
    }

    p.is_pps = true;
    for (const auto& poly : p.polys) {
        Rational sum = poly.constant;
        for (const auto& m : poly.monomials) sum += m.coeff;
        if (sum > Rational(1)) p.is_pps = false;
    }
    return p;
}

RatVector evaluate(const PolySystem& p, const RatVector& x) {
    if (x.size() != p.size()) throw DimensionMismatchError("evaluate: dimension mismatch");
    RatVector out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        Rational v = p.polys[i].constant;
        for (const auto& m : p.polys[i].monomials) {
            Rational term = m.coeff;
            for (const auto& [var, exp] : m.exps)
                for (unsigned e = 0; e < exp; ++e) term *= x[var];
            v += term;
        }
        out[i] = v;
    }
    return out;
}

RatMatrix jacobian(const PolySystem& p, const RatVector& x) {
    if (x.size() != p.size()) throw DimensionMismatchError("jacobian: dimension mismatch");
    RatMatrix b(p.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (const auto& m : p.polys[i].monomials) {
            if (m.exps.size() == 1) {
                auto [v, e] = m.exps[0];
                if (e == 1)
                    b.at(i, v) += m.coeff;
                else  // e == 2
                    b.at(i, v) += Rational(2) * m.coeff * x[v];
            } else {  // two distinct degree-1 variables
                std::size_t v1 = m.exps[0].first;
                std::size_t v2 = m.exps[1].first;
                b.at(i, v1) += m.coeff * x[v2];
                b.at(i, v2) += m.coeff * x[v1];
            }
        }
    }
    return b;
}

namespace {

struct Tarjan {
    const std::vector<std::vector<std::size_t>>& adj;
    std::vector<long> index, low;
    std::vector<bool> on_stack;
    std::vector<std::size_t> stack;
    long counter = 0;
    std::vector<std::vector<std::size_t>> sccs;  // emitted dependencies-first

    explicit Tarjan(const std::vector<std::vector<std::size_t>>& a)
        : adj(a), index(a.size(), -1), low(a.size(), 0), on_stack(a.size(), false) {}

    void visit(std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w : adj[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> scc;
            for (;;) {
                std::size_t w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                scc.push_back(w);
                if (w == v) break;
            }
            std::sort(scc.begin(), scc.end());
            sccs.push_back(std::move(scc));
        }
    }
};

}  // namespace

SccDag scc_dag(const PolySystem& p) {
    const std::size_t n = p.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> targets;
        for (const auto& m : p.polys[i].monomials)
            for (const auto& [v, e] : m.exps) targets.push_back(v);
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        adj[i] = std::move(targets);
    }
    Tarjan t(adj);
    for (std::size_t v = 0; v < n; ++v)
        if (t.index[v] < 0) t.visit(v);

    SccDag dag;
    dag.members = std::move(t.sccs);
    dag.scc_of.assign(n, 0);
    for (std::size_t id = 0; id < dag.members.size(); ++id)
        for (std::size_t v : dag.members[id]) dag.scc_of[v] = id;

    dag.successors.resize(dag.scc_count());
    dag.has_self_loop.assign(dag.scc_count(), false);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : adj[i]) {
            std::size_t a = dag.scc_of[i], b = dag.scc_of[j];
            if (a == b)
                dag.has_self_loop[a] = true;
            else
                dag.successors[a].push_back(b);
        }
    }
    for (auto& s : dag.successors) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }

    // Tarjan emits dependencies first; dependents-first is the reverse.
    dag.topo_order.resize(dag.scc_count());
    for (std::size_t i = 0; i < dag.scc_count(); ++i)
        dag.topo_order[i] = dag.scc_count() - 1 - i;

    // D(S), computed dependencies-first so successors are already done.
    dag.below.resize(dag.scc_count());
    for (std::size_t id = 0; id < dag.scc_count(); ++id) {
        std::vector<bool> mark(n, false);
        for (std::size_t succ : dag.successors[id]) {
            for (std::size_t v : dag.members[succ]) mark[v] = true;
            for (std::size_t v : dag.below[succ]) mark[v] = true;
        }
        for (std::size_t v = 0; v < n; ++v)
            if (mark[v]) dag.below[id].push_back(v);
    }
    return dag;
}

nlohmann::json to_json(const PolySystem& p) {
    nlohmann::json eqs = nlohmann::json::array();
    for (std::size_t i = 0; i < p.size(); ++i) {
        nlohmann::json monos = nlohmann::json::array();
        for (const auto& m : p.polys[i].monomials) {
            nlohmann::json exps = nlohmann::json::object();
            for (const auto& [v, e] : m.exps) exps[p.variables[v]] = e;
            monos.push_back({m.coeff.to_string(), exps});
        }
        eqs.push_back({{"var", p.variables[i]},
                       {"constant", p.polys[i].constant.to_string()},
                       {"monomials", monos}});
    }
    return {{"variables", p.variables}, {"equations", eqs}, {"is_pps", p.is_pps}};
}

}  // namespace regprob
