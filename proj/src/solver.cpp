#include "regprob/solver.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "regprob/analysis.hpp"
#include "regprob/errors.hpp"
#include "regprob/linalg.hpp"

namespace regprob {

std::string to_string(SolveMode m) {
    switch (m) {
        case SolveMode::CertifiedNoncritical: return "certified-noncritical";
        case SolveMode::CertifiedTweaked: return "certified-tweaked";
        case SolveMode::Adaptive: return "adaptive";
    }
    return "?";
}

RatVector newton_step(const PolySystem& p, const RatVector& z) {
    if (z.size() != p.size()) throw DimensionMismatchError("newton_step: dimension mismatch");
    RatVector value = evaluate(p, z);
    RatMatrix b = jacobian(p, z);
    RatVector rhs(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) rhs[i] = value[i] - z[i];

    // Solve (I - B) w = rhs blockwise: row block S only involves w on S and
    // on D(S), so solving dependencies first reduces to per-SCC systems.
    SccDag dag = scc_dag(p);
    RatVector w(p.size());
    for (std::size_t k = dag.topo_order.size(); k-- > 0;) {
        const auto& vars = dag.members[dag.topo_order[k]];
        const std::size_t m = vars.size();
        RatMatrix block(m, m);
        RatVector local(m);
        for (std::size_t i = 0; i < m; ++i) {
            Rational r = rhs[vars[i]];
            // move solved lower-variable terms to the right-hand side
            for (std::size_t j : dag.below[dag.scc_of[vars[i]]]) {
                if (!b.at(vars[i], j).is_zero()) r += b.at(vars[i], j) * w[j];
            }
            local[i] = r;
            for (std::size_t j = 0; j < m; ++j)
                block.at(i, j) =
                    (i == j ? Rational(1) : Rational()) - b.at(vars[i], vars[j]);
        }
        RatVector sol;
        try {
            sol = solve_linear(block, local);
        } catch (const SingularMatrixError&) {
            throw SingularJacobianError("newton_step: I - B(z) is singular");
        }
        for (std::size_t i = 0; i < m; ++i) w[vars[i]] = sol[i];
    }
    for (std::size_t i = 0; i < p.size(); ++i) w[i] += z[i];
    return w;
}

namespace {

// Shared by rounded_newton and the decomposed adaptive strategy. Runs R-NM
// with rounding parameter `param` for at most `budget` steps from x = 0,
// stopping early when the iterate repeats. When tolerate_fixed_point is set,
// a singular Jacobian at an exact fixed point returns that point instead of
// throwing (adaptive mode meets critical SCCs head-on).
SolveTrace run_rnm(const PolySystem& p, unsigned long param, unsigned long budget,
                   bool tolerate_fixed_point, bool keep_iterates) {
    SolveTrace trace;
    DyadicVector x;
    x.bits = param;
    x.values.assign(p.size(), Rational());
    trace.iterates.push_back(x);
    for (unsigned long k = 0; k < budget; ++k) {
        RatVector exact;
        try {
            exact = newton_step(p, x.values);
        } catch (const SingularJacobianError&) {
            if (tolerate_fixed_point) {
                RatVector px = evaluate(p, x.values);
                bool fixed = true;
                for (std::size_t i = 0; i < p.size(); ++i)
                    if (px[i] != x.values[i]) fixed = false;
                if (fixed) break;
            }
            throw;
        }
        DyadicVector next = round_down_dyadic(exact, param);
        // Rounding contract, enforced on every run: iterates never exceed the
        // exact step from the same predecessor and never go negative.
        for (std::size_t i = 0; i < p.size(); ++i) {
            bool ok = !next.values[i].is_negative() &&
                      (exact[i].is_negative() ? next.values[i].is_zero()
                                              : next.values[i] <= exact[i]);
            if (!ok) throw Error("rounded_newton: rounding contract violated");
        }
        bool repeated = (next.values == x.values);
        x = std::move(next);
        if (keep_iterates || trace.iterates.empty())
            trace.iterates.push_back(x);
        else
            trace.iterates.back() = x;
        if (repeated) break;  // the map is deterministic; all later iterates equal
    }
    if (trace.iterates.empty() || !(trace.iterates.back() == x)) trace.iterates.push_back(x);
    RatVector px = evaluate(p, x.values);
    RatVector diff(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) diff[i] = px[i] - x.values[i];
    trace.residual = inf_norm(diff);
    return trace;
}

}  // namespace

SolveTrace rounded_newton(const PolySystem& p, const NewtonConfig& cfg) {
    if (cfg.h < 1) throw Error("rounded_newton: h must be >= 1");
    if (cfg.mode != SolveMode::Adaptive) {
        SolveTrace trace = run_rnm(p, cfg.h + 2, cfg.iteration_budget(), false, true);
        trace.h = cfg.h;
        trace.mode = cfg.mode;
        trace.certified_error = cfg.target_eps;
        return trace;
    }
    if (!cfg.target_eps) throw Error("rounded_newton: Adaptive mode needs target_eps");
    Rational tolerance = *cfg.target_eps / Rational(2);
    unsigned long h = cfg.h;
    std::optional<SolveTrace> prev;
    while (h <= (1ul << 22)) {
        SolveTrace trace = run_rnm(p, h + 2, cfg.max_iters ? cfg.max_iters : h + 1, true, true);
        trace.h = h;
        trace.mode = SolveMode::Adaptive;
        trace.certified_error = std::nullopt;
        if (prev) {
            Rational worst;
            const auto& a = trace.final_iterate().values;
            const auto& b = prev->final_iterate().values;
            for (std::size_t i = 0; i < a.size(); ++i) {
                Rational diff = (a[i] - b[i]).abs();
                if (diff > worst) worst = diff;
            }
            if (worst <= tolerance) return trace;
        }
        prev = std::move(trace);
        h *= 2;
    }
    throw IterationBudgetExceededError("rounded_newton: adaptive h-doubling did not stabilize");
}

unsigned long required_h_noncritical(std::size_t g_size, std::size_t d_states,
                                     const Rational& eps) {
    if (!(eps > Rational()) || eps > Rational(1)) throw Error("eps must lie in (0, 1]");
    if (d_states == 0) throw Error("required_h: DFA must have at least one state");
    // ceil(log2(1/eps) + log2(d)) = ceil(log2(d/eps))
    long tail = ceil_log2(Rational(static_cast<long>(d_states)) / eps);
    return 14 * g_size + 3 + static_cast<unsigned long>(tail);
}

unsigned long required_h_critical(std::size_t g_size, std::size_t d_states, const Rational& eps,
                                  unsigned c) {
    if (!(eps > Rational()) || eps > Rational(1)) throw Error("eps must lie in (0, 1]");
    if (d_states == 0) throw Error("required_h: DFA must have at least one state");
    if (c >= 40) throw Error("required_h_critical: critical depth too large");
    unsigned long factor = 3ul * (1ul << c) + 1ul;
    // ceil(log2 d + K log2(1/eps) + K(14|G|+3))
    //   = K(14|G|+3) + ceil(log2(d * (1/eps)^K))
    Rational inv_eps_pow = (Rational(1) / eps).pow(factor);
    long tail = ceil_log2(Rational(static_cast<long>(d_states)) * inv_eps_pow);
    return factor * (14 * g_size + 3) + static_cast<unsigned long>(tail);
}

RatVector kleene_oracle(const PolySystem& p, unsigned long iters) {
    RatVector x(p.size());
    for (unsigned long k = 0; k < iters; ++k) x = evaluate(p, x);
    return x;
}

RatVector kleene_oracle_rounded(const PolySystem& p, unsigned long iters,
                                unsigned long grid_bits) {
    RatVector x(p.size());
    for (unsigned long k = 0; k < iters; ++k) {
        RatVector next = round_down_dyadic(evaluate(p, x), grid_bits).values;
        if (next == x) break;
        x = std::move(next);
    }
    return x;
}

namespace {

struct SplitMix {
    // splitmix64; fixed algorithm so seeds reproduce across platforms
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

}  // namespace

Rational sample_strings(const SnfWcfg& g, const std::string& start, const Dfa& d,
                        unsigned long trials, unsigned long step_cap, std::uint64_t seed) {
    if (classify(g.g) == GrammarClass::Wcfg)
        throw NotScfgError("sample_strings: weights are not probabilities");

    // Precompiled symbol table: nonterminals get ids < |V|, terminals follow.
    const std::size_t nv = g.g.nonterminals.size();
    std::vector<std::size_t> terminal_sym(g.g.terminals.size());
    for (std::size_t t = 0; t < g.g.terminals.size(); ++t)
        terminal_sym[t] = d.symbol_index(g.g.terminals[t]);
    auto symbol_id = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < nv; ++i)
            if (g.g.nonterminals[i] == name) return i;
        for (std::size_t t = 0; t < g.g.terminals.size(); ++t)
            if (g.g.terminals[t] == name) return nv + t;
        throw UnknownSymbolError("sample_strings: unknown symbol " + name);
    };
    std::size_t start_id = symbol_id(start);
    if (start_id >= nv) throw UnknownNonterminalError("sample_strings: not a nonterminal");

    struct Choice {
        std::uint64_t threshold;  // draw < threshold selects this rule
        bool always;              // proper row: the last rule absorbs the remainder
        std::vector<std::size_t> body;
    };
    std::vector<std::vector<Choice>> table(nv);
    for (std::size_t a = 0; a < nv; ++a) {
        Rational cum;
        auto idx = g.g.rules_of(g.g.nonterminals[a]);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const Rule& r = g.g.rules[idx[j]];
            cum += r.weight;
            Choice c;
            // thresholds quantized to 64 bits; the residual 2^-64 slice dies
            c.always = (j + 1 == idx.size()) && cum == Rational(1);
            mpz_class t = cum.floor_mul_2exp(64);
            c.threshold = mpz_fits_ulong_p(t.get_mpz_t()) ? t.get_ui() : ~0ull;
            for (const auto& sym : r.body) c.body.push_back(symbol_id(sym));
            table[a].push_back(std::move(c));
        }
    }

    SplitMix rng{seed};
    unsigned long accepted = 0;
    std::vector<std::size_t> stack;
    for (unsigned long trial = 0; trial < trials; ++trial) {
        stack.assign(1, start_id);  // top = back = leftmost symbol
        std::size_t state = d.start;
        bool dead = false;
        unsigned long steps = 0;
        while (!stack.empty()) {
            std::size_t sym = stack.back();
            stack.pop_back();
            if (sym >= nv) {
                state = d.step(state, terminal_sym[sym - nv]);
                continue;
            }
            if (++steps > step_cap) {
                dead = true;
                break;
            }
            std::uint64_t u = rng.next();
            const Choice* chosen = nullptr;
            for (const Choice& c : table[sym]) {
                if (c.always || u < c.threshold) {
                    chosen = &c;
                    break;
                }
            }
            if (!chosen) {  // substochastic residue: derivation dies
                dead = true;
                break;
            }
            for (std::size_t i = chosen->body.size(); i-- > 0;) stack.push_back(chosen->body[i]);
        }
        if (!dead && d.accepting[state]) ++accepted;
    }
    if (trials == 0) return Rational();
    return Rational(mpz_class(accepted), mpz_class(trials));
}

namespace {

// Substitutes already-solved values for D(S) variables and restricts the
// system to the SCC's own variables.
PolySystem restrict_to_scc(const PolySystem& p, const std::vector<std::size_t>& vars,
                           const RatVector& solved) {
    std::vector<std::size_t> local(p.size(), SIZE_MAX);
    for (std::size_t i = 0; i < vars.size(); ++i) local[vars[i]] = i;
    PolySystem sub;
    for (std::size_t v : vars) sub.variables.push_back(p.variables[v]);
    for (std::size_t v : vars) {
        const Polynomial& src = p.polys[v];
        Polynomial poly;
        poly.constant = src.constant;
        for (const auto& m : src.monomials) {
            Rational coeff = m.coeff;
            std::vector<std::pair<std::size_t, unsigned>> exps;
            for (const auto& [var, e] : m.exps) {
                if (local[var] != SIZE_MAX) {
                    exps.emplace_back(local[var], e);
                } else {
                    for (unsigned i = 0; i < e; ++i) coeff *= solved[var];
                }
            }
            if (coeff.is_zero()) continue;
            if (exps.empty()) {
                poly.constant += coeff;
                continue;
            }
            bool merged = false;
            for (auto& existing : poly.monomials)
                if (existing.exps == exps) {
                    existing.coeff += coeff;
                    merged = true;
                    break;
                }
            if (!merged) poly.monomials.push_back(Monomial{coeff, std::move(exps)});
        }
        sub.polys.push_back(std::move(poly));
    }
    sub.is_pps = false;  // irrelevant for solving
    return sub;
}

// Decomposed rounded solve: per-SCC R-NM bottom-up with substitution of the
// already-solved values. Adaptive-mode strategy only.
RatVector decomposed_rounded_solve(const PolySystem& p, const SccDag& dag, unsigned long h) {
    const unsigned long param = h + 2;
    RatVector solved(p.size());
    for (std::size_t k = dag.topo_order.size(); k-- > 0;) {
        std::size_t id = dag.topo_order[k];
        const auto& vars = dag.members[id];
        PolySystem sub = restrict_to_scc(p, vars, solved);
        if (vars.size() == 1 && !dag.has_self_loop[id]) {
            // no self-dependence: the equation is already solved by evaluation
            RatVector val = evaluate(sub, RatVector(1));
            solved[vars[0]] = round_down_dyadic(val, param).values[0];
            continue;
        }
        SolveTrace t = run_rnm(sub, param, h + 1, true, false);
        for (std::size_t i = 0; i < vars.size(); ++i)
            solved[vars[i]] = t.final_iterate().values[i];
    }
    return solved;
}

struct AdaptiveOutcome {
    RatVector solution;
    unsigned long h;
    unsigned long iterations;
};

AdaptiveOutcome adaptive_solve(const PolySystem& p, const Rational& tolerance) {
    SccDag dag = scc_dag(p);
    unsigned long h = 16;
    {
        long need = ceil_log2(Rational(1) / tolerance);
        if (need > 0 && static_cast<unsigned long>(need) + 8 > h) h = need + 8;
    }
    std::optional<RatVector> prev;
    while (h <= (1ul << 22)) {
        RatVector sol = decomposed_rounded_solve(p, dag, h);
        if (prev) {
            Rational worst;
            for (std::size_t i = 0; i < sol.size(); ++i) {
                Rational diff = (sol[i] - (*prev)[i]).abs();
                if (diff > worst) worst = diff;
            }
            if (worst <= tolerance) return {sol, h, h + 1};
        }
        prev = std::move(sol);
        h *= 2;
    }
    throw IterationBudgetExceededError("adaptive solve did not stabilize");
}

}  // namespace

ProbabilityResult compute_regular_probability(const Wcfg& g, const Dfa& d,
                                              const std::string& start, const Rational& eps,
                                              PipelineMode mode) {
    if (classify(g) == GrammarClass::Wcfg)
        throw NotScfgError("compute_regular_probability: grammar is not an SCFG");
    if (!(eps > Rational()) || eps > Rational(1)) throw Error("eps must lie in (0, 1]");
    g.nonterminal_index(start);

    SnfWcfg snf = to_snf(g);
    PolySystem base = build_system(snf);
    ReducedSystem base_reduced = remove_zeros(base);

    ProbabilityResult result;
    result.epsilon = eps;

    // The solver tolerance is per coordinate; the reported probability sums
    // |F| coordinates.
    std::size_t f = std::max<std::size_t>(1, d.accepting_count());
    Rational solver_eps = eps / Rational(static_cast<long>(f));

    SnfWcfg solve_grammar = snf;
    unsigned long h = 0;
    if (mode == PipelineMode::Certified) {
        std::size_t gsize = encoding_size(snf);
        bool critical = false;
        {
            auto crit = critical_sccs(base_reduced.system);
            critical = !crit.empty();
        }
        if (critical) {
            unsigned c = critical_depth(base_reduced.system);
            solve_grammar = tweak_grammar(snf, solver_eps);
            h = required_h_critical(gsize, d.states.size(), solver_eps, c);
            result.mode = SolveMode::CertifiedTweaked;
        } else {
            h = required_h_noncritical(gsize, d.states.size(), solver_eps);
            result.mode = SolveMode::CertifiedNoncritical;
        }
        result.certified = true;
    } else {
        result.mode = SolveMode::Adaptive;
        result.certified = false;
    }

    ProductWcfg prod = intersect(solve_grammar, d);
    PolySystem psys = build_system(prod.inner);
    ReducedSystem reduced = remove_zeros(psys);

    RatVector full(psys.size());  // zeros stay exactly zero
    if (!reduced.system.variables.empty()) {
        if (mode == PipelineMode::Certified) {
            NewtonConfig cfg;
            cfg.h = h;
            cfg.mode = result.mode;
            cfg.target_eps = solver_eps;
            if (result.mode == SolveMode::CertifiedTweaked) cfg.tweak_eps = solver_eps;
            SolveTrace trace = rounded_newton(reduced.system, cfg);
            result.h = h;
            result.iterations = trace.iterates.size() - 1;
            for (std::size_t i = 0; i < reduced.orig_index.size(); ++i)
                full[reduced.orig_index[i]] = trace.final_iterate().values[i];
        } else {
            AdaptiveOutcome outcome = adaptive_solve(reduced.system, solver_eps / Rational(2));
            result.h = outcome.h;
            result.iterations = outcome.iterations;
            for (std::size_t i = 0; i < reduced.orig_index.size(); ++i)
                full[reduced.orig_index[i]] = outcome.solution[i];
        }
    }
    std::size_t a = 0;
    {
        auto it = std::find(prod.source_nonterminals.begin(), prod.source_nonterminals.end(),
                            start);
        a = static_cast<std::size_t>(it - prod.source_nonterminals.begin());
    }
    std::vector<bool> removed_mask(psys.size(), false);
    for (std::size_t z : reduced.removed) removed_mask[z] = true;
    bool any_surviving_accepting = false;
    for (std::size_t t = 0; t < prod.d; ++t)
        if (d.accepting[t] && !removed_mask[prod.triple_index(d.start, a, t)])
            any_surviving_accepting = true;

    result.value = regular_probability_of(full, start, d, prod);
    result.lo = result.value;
    if (any_surviving_accepting) {
        Rational hi = result.value + eps;
        if (hi > Rational(1)) hi = Rational(1);
        unsigned long param = (result.h ? result.h : 1) + 2;
        result.hi = round_up_to_dyadic(hi, param);
        if (result.hi > Rational(1)) result.hi = Rational(1);
    } else {
        result.hi = result.value;  // every accepting triple is a proven zero
        result.exact_zero = result.value.is_zero();
    }
    return result;
}

nlohmann::json to_json(const SolveTrace& t) {
    nlohmann::json iterates = nlohmann::json::array();
    for (const auto& it : t.iterates) {
        nlohmann::json vec = nlohmann::json::array();
        for (const auto& v : it.values) vec.push_back(dyadic_decimal_string(v));
        iterates.push_back({{"bits", it.bits}, {"values", vec}});
    }
    nlohmann::json out = {{"iterates", iterates},
                          {"residual", t.residual.to_string()},
                          {"h", t.h},
                          {"mode", to_string(t.mode)},
                          {"certified", t.mode != SolveMode::Adaptive}};
    if (t.certified_error) out["certified_error"] = t.certified_error->to_string();
    return out;
}

}  // namespace regprob
