#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wright/wright.hpp"

namespace fs = std::filesystem;

namespace {

bool readFile(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

bool writeAtomically(const std::string& path, const std::string& text) {
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        out << text;
        if (!out.flush()) return false;
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) fs::remove(tmp, ec);
    return !ec;
}

void printDiagnostics(const std::string& file, const std::vector<wright::Diagnostic>& ds) {
    for (const auto& d : ds) std::cerr << file << ":" << d.text() << "\n";
}

int runFront(const std::string& in, const wright::AnalyzerOptions& opt, bool emitCode, wright::Translation& t) {
    std::string src;
    if (!readFile(in, src)) {
        std::cerr << "cannot read " << in << "\n";
        return 1;
    }
    t = emitCode ? wright::translate(src, opt) : wright::lint(src, opt);
    if (t.parsed) std::cerr << "Parsing complete.\n";
    printDiagnostics(in, t.diagnostics);
    if (!t.parsed || wright::hasErrors(t.diagnostics)) {
        std::cerr << "wr2fdr failed\n";
        return 1;
    }
    return 0;
}

int translateCmd(const std::string& in, const std::string& out, const wright::AnalyzerOptions& opt) {
    wright::Translation t;
    if (int rc = runFront(in, opt, true, t)) return rc;
    if (!writeAtomically(out, t.plan->text)) {
        std::cerr << "cannot write " << out << "\n";
        return 1;
    }
    std::cerr << "wr2fdr done.\n";
    return 0;
}

int checkCmd(const std::string& in, const std::string& out, std::size_t maxStates, const wright::AnalyzerOptions& opt) {
    wright::Translation t;
    if (int rc = runFront(in, opt, true, t)) return rc;
    if (!out.empty() && !writeAtomically(out, t.plan->text)) {
        std::cerr << "cannot write " << out << "\n";
        return 1;
    }
    std::cerr << "wr2fdr done.\n";
    bool all = true;
    for (const auto& d : wright::engine::dischargeAssertions(*t.plan, maxStates)) {
        bool pass = d.verdict.holds;
        all = all && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << d.assertion.label << "  (" << wright::kindName(d.assertion.kind)
                  << ", " << d.assertion.subject << ", " << d.verdict.productStates << " product states)";
        if (!pass) std::cout << "  " << wright::engine::describe(d.verdict);
        std::cout << "\n";
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    // Positional form: wright2csp <in> <out>
    if (argc == 3 && std::string(argv[1]) != "translate" && std::string(argv[1]) != "check" &&
        std::string(argv[1]) != "lint" && argv[1][0] != '-')
        return translateCmd(argv[1], argv[2], {});

    CLI::App app{"Wright to CSP translator and refinement checker"};
    app.require_subcommand(1);

    std::string in, out;
    std::size_t maxStates = wright::engine::kDefaultMaxStates;
    bool strict = false;

    auto* tr = app.add_subcommand("translate", "translate a Wright file to FDR input");
    tr->add_option("input", in, "Wright source (.wrt)")->required();
    tr->add_option("output", out, "generated file (.fdr2)")->required();
    tr->add_flag("--strict-attachments", strict, "treat unattached ports and roles as errors");

    auto* ck = app.add_subcommand("check", "translate and discharge every assertion");
    ck->add_option("input", in, "Wright source (.wrt)")->required();
    ck->add_option("-o,--output", out, "also write the generated file");
    ck->add_option("--max-states", maxStates, "state limit per compiled process");
    ck->add_flag("--strict-attachments", strict, "treat unattached ports and roles as errors");

    auto* li = app.add_subcommand("lint", "static checks only");
    li->add_option("input", in, "Wright source (.wrt)")->required();
    li->add_flag("--strict-attachments", strict, "treat unattached ports and roles as errors");

    CLI11_PARSE(app, argc, argv);
    wright::AnalyzerOptions opt;
    opt.strictAttachments = strict;

    if (tr->parsed()) return translateCmd(in, out, opt);
    if (ck->parsed()) return checkCmd(in, out, maxStates, opt);
    wright::Translation t;
    return runFront(in, opt, false, t);
}
