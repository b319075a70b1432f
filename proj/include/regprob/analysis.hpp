#ifndef REGPROB_ANALYSIS_HPP
#define REGPROB_ANALYSIS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "regprob/equations.hpp"
#include "regprob/grammar.hpp"
#include "regprob/rational.hpp"

namespace regprob {

/// Variables whose least-fixed-point value is exactly 0: fixpoint marking —
/// a variable is nonzero iff its polynomial has a positive constant term or
/// a monomial all of whose variables are already nonzero.
std::vector<std::size_t> zero_variables(const PolySystem& p);

/// The system after zero-variable elimination; its LFP is strictly positive.
struct ReducedSystem {
    PolySystem system;
    std::vector<std::size_t> orig_index;  // surviving variable -> original index
    std::vector<std::size_t> removed;     // original indices of zero variables
};

ReducedSystem remove_zeros(const PolySystem& p);

/// Variables with LFP value exactly 1. Requires a PPS with zeros removed.
/// Per SCC, dependencies first: all-one iff everything below is one, every
/// row sums to exactly 1, and rho(B(1)_S) <= 1 — decided exactly by the
/// M-matrix inverse test or the eigenvector feasibility test.
std::vector<std::size_t> one_variables(const PolySystem& p);

/// SCC ids (w.r.t. scc_dag(p)) that are critical: all members classified 1
/// and {B(1)_S u = u, sum u = 1, u >= 0} feasible. Requires a PPS with zeros
/// removed.
std::vector<std::size_t> critical_sccs(const PolySystem& p);

/// Longest chain of critical SCCs ordered by reachability; 0 iff none.
unsigned critical_depth(const PolySystem& p);

struct AnalysisReport {
    std::vector<std::string> zero_vars;
    std::vector<std::string> one_vars;
    std::vector<std::vector<std::string>> critical_sccs;
    unsigned critical_depth = 0;
    std::size_t encoding_size = 0;
};

/// Full qualitative analysis of the PPS x = P_G(x) of an SNF grammar.
AnalysisReport analyze_grammar(const SnfWcfg& g);

/// The probability tweak: in every bottom-critical SCC, the first qualifying
/// kind-L rule A -> B with A, B inside the SCC has its probability multiplied
/// by (1 - delta), delta = 2^-((14|G|+3) * 2^c) * eps^(2^c) with c the
/// critical depth. The result re-analyzes as noncritical. Noncritical input
/// is returned unchanged.
SnfWcfg tweak_grammar(const SnfWcfg& g, const Rational& eps);

nlohmann::json to_json(const AnalysisReport& r);

}  // namespace regprob

#endif
