#ifndef REGPROB_SOLVER_HPP
#define REGPROB_SOLVER_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "regprob/automata.hpp"
#include "regprob/equations.hpp"
#include "regprob/grammar.hpp"
#include "regprob/product.hpp"
#include "regprob/rational.hpp"

namespace regprob {

enum class SolveMode { CertifiedNoncritical, CertifiedTweaked, Adaptive };

std::string to_string(SolveMode m);

struct NewtonConfig {
    unsigned long h = 1;          // rounding parameter; iterates rounded to 2^-(h+2)
    unsigned long max_iters = 0;  // 0 means the default h+1
    SolveMode mode = SolveMode::Adaptive;
    std::optional<Rational> tweak_eps;   // CertifiedTweaked records the eps used to build G'
    std::optional<Rational> target_eps;  // certified modes: the guarantee for the trace

    unsigned long iteration_budget() const { return max_iters ? max_iters : h + 1; }
};

struct SolveTrace {
    std::vector<DyadicVector> iterates;  // x^[0] = 0 first; entries multiples of 2^-(h+2)
    Rational residual;                   // final ||P(x) - x||_inf
    std::optional<Rational> certified_error;
    unsigned long h = 0;
    SolveMode mode = SolveMode::Adaptive;

    const DyadicVector& final_iterate() const { return iterates.back(); }
};

/// One exact Newton step N(z) = z + (I - B(z))^-1 (P(z) - z). The linear
/// solve runs blockwise over the SCC condensation, which is exact and keeps
/// intermediate rationals small. Throws SingularJacobianError when a
/// diagonal block of I - B(z) is singular.
RatVector newton_step(const PolySystem& p, const RatVector& z);

/// Rounded-down Newton from 0: x^[k+1] = round_down(N(x^[k]), h+2), run for
/// h+1 iterations (or cfg.max_iters), stopping early only when an iterate
/// repeats exactly, after which the sequence is constant. In Adaptive mode
/// the whole run is repeated with h doubled until two successive final
/// iterates agree within target_eps/2; the trace of the last run is returned
/// with certified_error empty.
SolveTrace rounded_newton(const PolySystem& p, const NewtonConfig& cfg);

/// h = 14|G| + 3 + ceil(log2(1/eps) + log2(d)); eps in (0,1].
unsigned long required_h_noncritical(std::size_t g_size, std::size_t d_states,
                                     const Rational& eps);

/// h = ceil(log2(d) + (3*2^c + 1)(log2(1/eps) + 14|G| + 3)).
unsigned long required_h_critical(std::size_t g_size, std::size_t d_states, const Rational& eps,
                                  unsigned c);

/// Exact value iteration x <- P(x) from 0; monotone nondecreasing, <= LFP.
/// Bit sizes double per iteration on quadratic systems, so this is only
/// usable for small iteration counts.
RatVector kleene_oracle(const PolySystem& p, unsigned long iters);

/// Value iteration with each iterate rounded down to multiples of
/// 2^-grid_bits: still exact arithmetic, still monotone and below the LFP,
/// and the iterate stalls at most ~2^-grid_bits short of where exact
/// iteration would be. Stops early when the iterate repeats.
RatVector kleene_oracle_rounded(const PolySystem& p, unsigned long iters,
                                unsigned long grid_bits);

/// Monte-Carlo oracle: fraction of sampled leftmost derivations from A that
/// terminate within step_cap rule applications and whose yield the DFA
/// accepts. Substochastic residue counts as non-accepting. Reproducible per
/// seed.
Rational sample_strings(const SnfWcfg& g, const std::string& start, const Dfa& d,
                        unsigned long trials, unsigned long step_cap, std::uint64_t seed);

enum class PipelineMode { Adaptive, Certified };

struct ProbabilityResult {
    Rational value;  // dyadic lower estimate
    Rational lo;
    Rational hi;
    SolveMode mode = SolveMode::Adaptive;
    bool certified = false;
    unsigned long h = 0;
    unsigned long iterations = 0;
    Rational epsilon;
    bool exact_zero = false;  // all accepting triples eliminated as zeros
};

/// End-to-end pipeline: to_snf, criticality analysis on x = P_G(x), the
/// criticality-removing tweak when certified mode meets a critical grammar,
/// product construction, zero elimination on the product, rounded Newton at
/// the mode's h, and extraction of sum over accepting t of (s0, A, t).
ProbabilityResult compute_regular_probability(const Wcfg& g, const Dfa& d,
                                              const std::string& start, const Rational& eps,
                                              PipelineMode mode);

nlohmann::json to_json(const SolveTrace& t);

}  // namespace regprob

#endif
