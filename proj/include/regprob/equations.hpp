#ifndef REGPROB_EQUATIONS_HPP
#define REGPROB_EQUATIONS_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "regprob/grammar.hpp"
#include "regprob/rational.hpp"

namespace regprob {

/// A monomial c * prod x_v^e with positive coefficient; exps sorted by
/// variable, total degree <= 2 for systems built from SNF grammars.
struct Monomial {
    Rational coeff;
    std::vector<std::pair<std::size_t, unsigned>> exps;

    unsigned total_degree() const;
    bool operator==(const Monomial& o) const = default;
};

struct Polynomial {
    Rational constant;
    std::vector<Monomial> monomials;
};

/// Sparse monotone polynomial fixed-point system x = P(x).
struct PolySystem {
    std::vector<std::string> variables;
    std::vector<Polynomial> polys;
    bool is_pps = false;

    std::size_t size() const { return variables.size(); }
    std::size_t var_index(const std::string& name) const;
};

/// One variable and one equation per nonterminal: kind L rows are linear,
/// kind Q rows a product monomial, kind T rows the constant 1; a nonterminal
/// without rules gets the zero polynomial.
PolySystem build_system(const SnfWcfg& g);

RatVector evaluate(const PolySystem& p, const RatVector& x);

/// B(x)_{i,j} = dP_i(x)/dx_j, exact; nonnegative for nonnegative x.
RatMatrix jacobian(const PolySystem& p, const RatVector& x);

/// Condensation of the dependency graph (edge (i,j) iff x_j occurs in P_i).
struct SccDag {
    std::vector<std::size_t> scc_of;                    // variable -> scc id
    std::vector<std::vector<std::size_t>> members;      // scc id -> variables
    std::vector<std::size_t> topo_order;                // dependents before dependencies
    std::vector<std::vector<std::size_t>> successors;   // condensation edges
    std::vector<std::vector<std::size_t>> below;        // D(S): vars reachable from S, excluding S
    std::vector<bool> has_self_loop;                    // some member depends on a member

    std::size_t scc_count() const { return members.size(); }
};

SccDag scc_dag(const PolySystem& p);

nlohmann::json to_json(const PolySystem& p);

}  // namespace regprob

#endif
