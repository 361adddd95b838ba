#pragma once

#include "alphabet.hpp"
#include "codegen.hpp"
#include "engine.hpp"
#include "parser.hpp"
#include "static_analyzer.hpp"

namespace wright {

struct Translation {
    bool parsed = false;
    std::optional<ArchSpec> spec;  // annotated with alphabets
    std::vector<Diagnostic> diagnostics;
    std::optional<EmitPlan> plan;

    bool ok() const { return plan.has_value() && !hasErrors(diagnostics); }
};

// Front end only: parse and static checks.
inline Translation lint(const std::string& source, const AnalyzerOptions& opt = {}) {
    Translation t;
    ParseResult pr = parseWright(source);
    t.diagnostics = pr.warnings;
    if (!pr.ok()) {
        t.diagnostics.push_back({Severity::Error, pr.error->pos, 0, pr.error->message});
        return t;
    }
    t.parsed = true;
    auto sem = analyze(*pr.spec, opt);
    t.diagnostics.insert(t.diagnostics.end(), sem.begin(), sem.end());
    t.spec = std::move(pr.spec);
    return t;
}

inline Translation translate(const std::string& source, const AnalyzerOptions& opt = {}) {
    Translation t = lint(source, opt);
    if (!t.parsed || hasErrors(t.diagnostics)) return t;
    t.spec = computeAlphabets(std::move(*t.spec), &t.diagnostics);
    if (hasErrors(t.diagnostics)) return t;
    t.plan = emit(*t.spec);
    t.diagnostics.insert(t.diagnostics.end(), t.plan->diagnostics.begin(), t.plan->diagnostics.end());
    return t;
}

}  // namespace wright
