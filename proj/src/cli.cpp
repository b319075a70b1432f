#include "regprob/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "regprob/analysis.hpp"
#include "regprob/automata.hpp"
#include "regprob/balance.hpp"
#include "regprob/equations.hpp"
#include "regprob/errors.hpp"
#include "regprob/estimation.hpp"
#include "regprob/grammar.hpp"
#include "regprob/product.hpp"
#include "regprob/solver.hpp"

namespace regprob {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct DfaChoice {
    std::string dfa_path;
    std::string infix, prefix, exact;
    bool all = false;
    bool complete = false;

    int sources() const {
        return (dfa_path.empty() ? 0 : 1) + (infix.empty() ? 0 : 1) + (prefix.empty() ? 0 : 1) +
               (exact.empty() ? 0 : 1) + (all ? 1 : 0);
    }

    // Pattern strings are sequences of single-character terminals.
    Dfa build(const Wcfg& g) const {
        if (!dfa_path.empty()) return parse_dfa(slurp(dfa_path), complete);
        auto split_chars = [](const std::string& w) {
            std::vector<std::string> syms;
            for (char c : w) syms.emplace_back(1, c);
            return syms;
        };
        if (!infix.empty()) return build_pattern_dfa(PatternKind::Infix, split_chars(infix), g.terminals);
        if (!prefix.empty())
            return build_pattern_dfa(PatternKind::Prefix, split_chars(prefix), g.terminals);
        if (!exact.empty())
            return build_pattern_dfa(PatternKind::Exact, split_chars(exact), g.terminals);
        return build_pattern_dfa(PatternKind::All, {}, g.terminals);
    }

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--dfa", dfa_path, "DFA file");
        cmd->add_option("--infix", infix, "accept strings containing this infix");
        cmd->add_option("--prefix", prefix, "accept strings with this prefix");
        cmd->add_option("--exact", exact, "accept exactly this string");
        cmd->add_flag("--all", all, "accept every string");
        cmd->add_flag("--complete", complete, "complete a partial DFA with a rejecting sink");
    }
};

Rational parse_eps(const std::string& text) {
    auto eps = Rational::parse(text);
    if (!eps) throw CLI::ValidationError("--eps", "not a rational: " + text);
    if (!(*eps > Rational()) || *eps > Rational(1))
        throw CLI::ValidationError("--eps", "must lie in (0, 1]");
    return *eps;
}

nlohmann::json error_json(const std::string& kind, const std::string& message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"regprob: probability that a stochastic grammar hits a regular language"};
    app.require_subcommand(1);

    // prob
    auto* prob = app.add_subcommand("prob", "probability of generating a string the DFA accepts");
    std::string grammar_path, start_nt, eps_text = "1/1048576", mode_text = "adaptive";
    DfaChoice dfa_choice;
    prob->add_option("--grammar", grammar_path, "grammar file")->required();
    dfa_choice.add_flags(prob);
    prob->add_option("--start", start_nt, "start nonterminal (default: grammar start)");
    prob->add_option("--eps", eps_text, "additive error bound, rational in (0,1]");
    prob->add_option("--mode", mode_text, "adaptive|certified")
        ->check(CLI::IsMember({"adaptive", "certified"}));

    // analyze
    auto* analyze = app.add_subcommand("analyze", "qualitative analysis of the grammar system");
    std::string analyze_grammar_path;
    analyze->add_option("--grammar", analyze_grammar_path, "grammar file")->required();

    // termination
    auto* term = app.add_subcommand("termination", "termination weights q^G of an SCFG");
    std::string term_grammar_path, term_eps_text = "1/1048576", term_mode_text = "adaptive";
    term->add_option("--grammar", term_grammar_path, "grammar file")->required();
    term->add_option("--eps", term_eps_text, "additive error bound for unresolved values");
    term->add_option("--mode", term_mode_text, "adaptive|certified")
        ->check(CLI::IsMember({"adaptive", "certified"}));

    // product
    auto* product = app.add_subcommand("product", "emit the product grammar G (x) D");
    std::string product_grammar_path;
    DfaChoice product_dfa;
    product->add_option("--grammar", product_grammar_path, "grammar file")->required();
    product_dfa.add_flags(product);

    // snf
    auto* snf_cmd = app.add_subcommand("snf", "emit the simple-normal-form grammar");
    std::string snf_grammar_path;
    snf_cmd->add_option("--grammar", snf_grammar_path, "grammar file")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "estimate rule probabilities from a corpus");
    std::string corpus_path;
    est->add_option("--corpus", corpus_path, "corpus JSON file")->required();

    // fixtures
    auto* fixtures = app.add_subcommand("fixtures", "emit the built-in grammar family");
    unsigned fixture_n = 0;
    fixtures->add_option("--n", fixture_n, "family index")->required();

    // balance
    auto* bal = app.add_subcommand("balance", "max balance defect of a triple-indexed vector");
    std::string vector_path;
    bal->add_option("--vector", vector_path, "JSON file with d, n, values")->required();

    // accepted for interface stability; only sampling-based tools consume it
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "random seed");
    bool json_flag = false;
    app.add_flag("--json", json_flag, "force JSON output");
    for (CLI::App* sub : {prob, analyze, term, product, snf_cmd, est, fixtures, bal})
        sub->fallthrough();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    // grammar-emitting subcommands print text by default; --json wraps it
    auto emit_grammar = [&](const std::string& text) {
        if (json_flag)
            out << nlohmann::json{{"grammar", text}}.dump(2) << "\n";
        else
            out << text;
    };

    try {
        if (*prob) {
            Wcfg g = parse_grammar(slurp(grammar_path));
            if (dfa_choice.sources() != 1)
                throw CLI::ValidationError("--dfa", "exactly one DFA source required");
            Dfa d = dfa_choice.build(g);
            Rational eps = parse_eps(eps_text);
            std::string start = start_nt.empty() ? g.start : start_nt;
            PipelineMode mode =
                mode_text == "certified" ? PipelineMode::Certified : PipelineMode::Adaptive;
            ProbabilityResult r = compute_regular_probability(g, d, start, eps, mode);
            nlohmann::json j = {{"probability_lo", dyadic_decimal_string(r.lo)},
                                {"probability_hi", dyadic_decimal_string(r.hi)},
                                {"lo", r.lo.to_string()},
                                {"hi", r.hi.to_string()},
                                {"mode", to_string(r.mode)},
                                {"certified", r.certified},
                                {"h", r.h},
                                {"iterations", r.iterations},
                                {"epsilon", r.epsilon.to_string()},
                                {"start", start},
                                {"exact_zero", r.exact_zero}};
            out << j.dump(2) << "\n";
            return 0;
        }
        if (*analyze) {
            Wcfg g = parse_grammar(slurp(analyze_grammar_path));
            AnalysisReport report = regprob::analyze_grammar(to_snf(g));
            out << to_json(report).dump(2) << "\n";
            return 0;
        }
        if (*term) {
            Wcfg g = parse_grammar(slurp(term_grammar_path));
            if (classify(g) == GrammarClass::Wcfg)
                throw NotScfgError("termination: grammar is not an SCFG");
            Rational eps = parse_eps(term_eps_text);
            SnfWcfg snf = to_snf(g);
            AnalysisReport report = regprob::analyze_grammar(snf);
            PipelineMode mode = term_mode_text == "certified" ? PipelineMode::Certified
                                                              : PipelineMode::Adaptive;
            nlohmann::json values = nlohmann::json::object();
            Dfa all = build_pattern_dfa(PatternKind::All, {}, g.terminals);
            for (const auto& nt : g.nonterminals) {
                bool is_zero = std::find(report.zero_vars.begin(), report.zero_vars.end(),
                                         nt) != report.zero_vars.end();
                bool is_one = std::find(report.one_vars.begin(), report.one_vars.end(), nt) !=
                              report.one_vars.end();
                if (is_zero) {
                    values[nt] = {{"classified", "0"}};
                } else if (is_one) {
                    values[nt] = {{"classified", "1"}};
                } else {
                    ProbabilityResult r = compute_regular_probability(g, all, nt, eps, mode);
                    values[nt] = {{"classified", "interval"},
                                  {"lo", r.lo.to_string()},
                                  {"hi", r.hi.to_string()},
                                  {"probability_lo", dyadic_decimal_string(r.lo)},
                                  {"probability_hi", dyadic_decimal_string(r.hi)}};
                }
            }
            nlohmann::json j = {{"values", values},
                                {"all_one", report.one_vars.size() == snf.g.nonterminals.size()},
                                {"analysis", to_json(report)}};
            out << j.dump(2) << "\n";
            return 0;
        }
        if (*product) {
            Wcfg g = parse_grammar(slurp(product_grammar_path));
            if (product_dfa.sources() != 1)
                throw CLI::ValidationError("--dfa", "exactly one DFA source required");
            Dfa d = product_dfa.build(g);
            ProductWcfg p = intersect(to_snf(g), d);
            emit_grammar(to_text(p.inner.g));
            return 0;
        }
        if (*snf_cmd) {
            Wcfg g = parse_grammar(slurp(snf_grammar_path));
            emit_grammar(to_text(to_snf(g).g));
            return 0;
        }
        if (*est) {
            DerivationCorpus corpus = parse_corpus(slurp(corpus_path));
            Wcfg estimated = estimate(corpus);
            EstimationVerdict v = verify_estimated(estimated);
            nlohmann::json j = {{"grammar", to_text(estimated)},
                                {"consistent", v.consistent},
                                {"noncritical", v.noncritical}};
            out << j.dump(2) << "\n";
            return 0;
        }
        if (*fixtures) {
            emit_grammar(to_text(bad_family(fixture_n)));
            return 0;
        }
        if (*bal) {
            nlohmann::json j = nlohmann::json::parse(slurp(vector_path));
            TripleVector y;
            y.d = j.at("d").get<std::size_t>();
            y.n = j.at("n").get<std::size_t>();
            y.values.resize(y.d * y.d * y.n);
            const auto& vals = j.at("values");
            if (vals.size() != y.values.size())
                throw Error("balance: values array must have d*d*n entries");
            for (std::size_t i = 0; i < y.values.size(); ++i) {
                auto v = Rational::parse(vals[i].get<std::string>());
                if (!v) throw Error("balance: malformed rational");
                y.values[i] = *v;
            }
            Rational defect = balance_defect(y);
            nlohmann::json result = {{"balanced", defect.is_zero()},
                                     {"max_defect", defect.to_string()}};
            out << result.dump(2) << "\n";
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        out << error_json("parse", e.what()).dump(2) << "\n";
        return 1;
    } catch (const Error& e) {
        out << error_json("module", e.what()).dump(2) << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        out << error_json("json", e.what()).dump(2) << "\n";
        return 1;
    }
    err << "no subcommand\n";
    return 2;
}

}  // namespace regprob
