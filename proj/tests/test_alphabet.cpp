#include <gtest/gtest.h>

#include "support.hpp"

using namespace wright;

namespace {

std::set<std::string> keys(const EventSet& s) { return s.keySet(); }

std::set<std::string> names(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

ArchSpec annotated(const std::string& fixture) {
    auto t = ts::translateFixture(fixture);
    EXPECT_TRUE(t.ok()) << fixture;
    return *t.spec;
}

const Connector& connector(const ArchSpec& s, const char* n) { return std::get<Connector>(*s.findType(Identifier(n))); }
const Component& component(const ArchSpec& s, const char* n) { return std::get<Component>(*s.findType(Identifier(n))); }

// Events reachable from a definition by walking references with a visited set.
std::set<std::string> walkAlphabet(const ts::Defs& defs, const Identifier& root) {
    std::set<std::string> out;
    std::set<Identifier> seen;
    std::vector<Identifier> work{root};
    while (!work.empty()) {
        Identifier n = work.back();
        work.pop_back();
        if (!seen.insert(n).second) continue;
        auto it = defs.find(n);
        if (it == defs.end()) continue;
        forEachNode(it->second, [&](const Process& p) {
            if (p.is<Prefix>()) out.insert(p.as<Prefix>().event.key());
            if (p.is<Ref>()) work.push_back(p.as<Ref>().name);
        });
    }
    return out;
}

}  // namespace

TEST(Alphabet, PipeConnRoles) {
    auto s = annotated("PipeConn.wrt");
    const auto& pipe = connector(s, "Pipe");
    EXPECT_EQ(keys(pipe.role(Identifier("Writer"))->alpha.total), names({"close", "write"}));
    EXPECT_EQ(keys(pipe.role(Identifier("Reader"))->alpha.total), names({"readEOF", "read", "close"}));
    EXPECT_EQ(keys(pipe.totalAlphabet),
              names({"Reader.readEOF", "Reader.read", "Reader.close", "Writer.write", "Writer.close"}));
    EXPECT_TRUE(setMinus(pipe.role(Identifier("Writer"))->alpha.paramTotal, pipe.glue.alpha.total).empty());
}

TEST(Alphabet, CalculFormulePorts) {
    auto s = annotated("CalculFormule.wrt");
    const auto& c = component(s, "Calcul");
    const auto* out = c.port(Identifier("Out"));
    const auto* in = c.port(Identifier("In"));
    EXPECT_EQ(keys(out->alpha.total), names({"close", "write"}));
    EXPECT_TRUE(out->alpha.observed.empty());
    EXPECT_EQ(keys(out->alpha.initiated), names({"close", "write"}));
    EXPECT_EQ(keys(in->alpha.observed), names({"close", "read"}));
    EXPECT_EQ(keys(c.totalAlphabet), names({"Out.close", "Out.write", "In.read", "In.close"}));
    EXPECT_EQ(keys(setUnion(in->alpha.total, out->alpha.total)), names({"close", "read", "write"}));
}

TEST(Alphabet, CtypeAndOrigin) {
    auto s = annotated("DT3.wrt");
    const auto& c = connector(s, "Ctype");
    EXPECT_EQ(keys(c.totalAlphabet), names({"Target.c", "Origin.a"}));
    EXPECT_EQ(keys(c.role(Identifier("Origin"))->alpha.total), names({"a"}));
}

TEST(Alphabet, ScopeEvent) {
    EXPECT_EQ(scopeEvent(EventRef::parse("read"), Identifier("In")).key(), "In.read");
    EXPECT_EQ(scopeEvent(EventRef::parse("In.read"), Identifier("A")).key(), "A.In.read");
    EXPECT_THROW(scopeEvent(EventRef::parse("A.In.read"), Identifier("X")), std::invalid_argument);
    auto init = scopeEvent(EventRef::parse("a", Polarity::Initiated), Identifier("Origin"));
    EXPECT_TRUE(init.initiated());
}

TEST(Alphabet, ComponentWithoutStrayEventsWarnsNothing) {
    auto t = translate("Style S\nComponent C\n  Port P = a -> P [] TICK\n  Computation = P.a -> Computation [] TICK\nEnd Style\n");
    ASSERT_TRUE(t.ok());
    EXPECT_TRUE(t.diagnostics.empty());
}

TEST(Alphabet, UndefinedReferenceIsAnError) {
    auto t = translate("Style S\nComponent C\n  Port P = a -> Q\n  Computation = P.a -> Computation\nEnd Style\n");
    EXPECT_TRUE(hasErrors(t.diagnostics));
    EXPECT_FALSE(t.plan.has_value());
}

TEST(Alphabet, MixedPolarityWarns) {
    auto t = translate("Style S\nComponent C\n  Port P = a -> _a -> P\n  Computation = P.a -> Computation\nEnd Style\n");
    ASSERT_TRUE(t.ok());
    bool warned = false;
    for (const auto& d : t.diagnostics) warned = warned || d.severity == Severity::Warning;
    EXPECT_TRUE(warned);
}

// Every ALPHA_ set printed in the reference outputs equals the computed one.
TEST(Alphabet, PrintedSetsMatch) {
    const std::vector<std::pair<std::string, std::string>> pairs = {{"PipeConn.wrt", "PipeConn_alphabets.txt"},
                                                                    {"DT1.wrt", "DT1_connector.txt"},
                                                                    {"CalculFormule.wrt", "CalculFormule_component.txt"},
                                                                    {"DT3.wrt", "DT3_observed.txt"}};
    std::size_t checked = 0;
    for (const auto& [fx, gd] : pairs) {
        auto t = ts::translateFixture(fx);
        ASSERT_TRUE(t.ok()) << fx;
        auto expected = ts::alphaSets(ts::golden(gd));
        auto actual = ts::alphaSets(t.plan->text);
        ASSERT_FALSE(expected.empty()) << gd;
        for (const auto& [name, set] : expected) {
            ASSERT_TRUE(actual.count(name)) << fx << " lacks " << name;
            EXPECT_EQ(actual[name], set) << fx << " " << name;
            ++checked;
        }
    }
    EXPECT_EQ(checked, 3u + 3u + 4u + 3u);
}

TEST(Alphabet, ClosureMatchesReferenceWalk) {
    ts::TermGen gen(21);
    const std::vector<std::string> events = {"a", "b", "c", "d", "_e"};
    for (int round = 0; round < 1000; ++round) {
        int nl = gen.pick(3);
        std::vector<std::string> defNames = {"P"};
        for (int i = 0; i < nl; ++i) defNames.push_back("L" + std::to_string(i));
        Declaration d;
        d.kind = DeclKind::Port;
        d.name = Identifier("P");
        auto body = [&] {
            std::vector<std::string> evs;
            for (const auto& e : events) evs.push_back(e[0] == '_' ? e.substr(1) : e);
            return gen.term(gen.pick(6), evs, defNames);
        };
        d.body = body();
        for (int i = 0; i < nl; ++i) {
            Declaration l;
            l.kind = DeclKind::WhereLocal;
            l.name = Identifier(defNames[i + 1]);
            l.body = body();
            d.locals.push_back(l);
        }
        std::vector<Diagnostic> diags;
        Declaration x = d;
        computeDeclarationAlphabet(x, &diags);
        ASSERT_FALSE(hasErrors(diags));
        ts::Defs defs = ts::defsOf(d);
        EXPECT_EQ(keys(x.alpha.total), walkAlphabet(defs, d.name));
        for (const auto& l : x.locals) EXPECT_EQ(keys(l.alpha.total), walkAlphabet(defs, l.name));
        // Order of where-locals does not matter.
        Declaration y = d;
        std::shuffle(y.locals.begin(), y.locals.end(), gen.rng());
        computeDeclarationAlphabet(y, nullptr);
        EXPECT_EQ(x.alpha.total, y.alpha.total);
    }
}
