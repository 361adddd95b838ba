#include <gtest/gtest.h>

#include "support.hpp"

using namespace wright;

namespace {

Declaration decl(const std::string& name, ProcPtr body) {
    Declaration d;
    d.kind = DeclKind::Port;
    d.name = Identifier(name);
    d.body = std::move(body);
    return d;
}

bool hasInternal(const ProcPtr& p) {
    bool found = false;
    forEachNode(p, [&](const Process& q) { found = found || q.is<InternalChoice>(); });
    return found;
}

}  // namespace

TEST(NormalizeForDet, MergesCommonFirstEvent) {
    auto p = intChoice(prefix("a", ref("P")), prefix("a", ref("Q")));
    EXPECT_TRUE(sameProcess(normalizeForDet(p), prefix("a", extChoice(ref("P"), ref("Q")))));
}

TEST(NormalizeForDet, DistinctEventsUnchanged) {
    auto p = intChoice(prefix("a", ref("P")), prefix("b", ref("Q")));
    EXPECT_TRUE(sameProcess(normalizeForDet(p), p));
}

TEST(NormalizeForDet, ThreeWayMerge) {
    auto p = intChoice(intChoice(prefix("a", ref("P")), prefix("a", ref("Q"))), prefix("a", ref("R")));
    auto n = normalizeForDet(p);
    EXPECT_TRUE(sameProcess(n, prefix("a", extChoice(extChoice(ref("P"), ref("Q")), ref("R")))));
    ts::Defs before{{Identifier("X"), p}, {Identifier("P"), prefix("p", success())},
                    {Identifier("Q"), prefix("q", success())}, {Identifier("R"), prefix("r", success())}};
    ts::Defs after = before;
    after[Identifier("X")] = n;
    EXPECT_EQ(ts::astTraces(before, Identifier("X"), 6), ts::astTraces(after, Identifier("X"), 6));
}

TEST(Determinize, OriginRole) {
    auto origin = intChoice(prefix("a", ref("Origin")), success());
    auto d = determinize(normalizeForDet(origin));
    EXPECT_TRUE(sameProcess(d, extChoice(prefix("a", ref("Origin")), success())));
    EXPECT_TRUE(sameProcess(determinize(prefix("a", success())), prefix("a", success())));
}

TEST(Determinize, EmittedEquations) {
    auto t = ts::translateFixture("DT3.wrt");
    ASSERT_TRUE(t.ok());
    EXPECT_NE(t.plan->text.find("ROLEOriginDET = ((a -> ROLEOriginDET) [] SKIP)"), std::string::npos);
    auto c = ts::translateFixture("CalculFormule.wrt");
    ASSERT_TRUE(c.ok());
    EXPECT_NE(c.plan->text.find("PORTInDETR = ((read -> PORTInDETR) [] (close -> SKIP))"), std::string::npos);
    EXPECT_NE(c.plan->text.find("PORTOutDETR = SKIP"), std::string::npos);
}

TEST(Projection, WorkedExamples) {
    auto keepA = EventSet::of({"a"});
    auto p1 = projectTo(prefix("a", prefix("b", ref("P1"))), keepA, Identifier("P1"));
    EXPECT_TRUE(sameProcess(p1, prefix("a", ref("P1")))) << printProcess(p1);
    auto p2 = projectTo(prefix("b", ref("P2")), keepA, Identifier("P2"));
    EXPECT_TRUE(p2->is<Empty>());
    auto p3 = projectTo(extChoice(prefix("a", ref("P3")), prefix("b", ref("P3"))), keepA, Identifier("P3"));
    EXPECT_TRUE(sameProcess(p3, prefix("a", ref("P3")))) << printProcess(p3);
}

TEST(Projection, RestrictToObserved) {
    auto t = ts::translateFixture("CalculFormule.wrt");
    ASSERT_TRUE(t.ok());
    const auto& c = std::get<Component>(t.spec->types()[0]);
    auto out = restrictToObserved(*c.port(Identifier("Out")));
    EXPECT_TRUE(out.decl.body->is<Success>());
    const auto* in = c.port(Identifier("In"));
    EXPECT_TRUE(sameProcess(restrictToObserved(*in).decl.body, in->body));

    Declaration mixed = decl("P", prefix("read", prefix("_ack", ref("P"))));
    computeDeclarationAlphabet(mixed);
    auto r = restrictToObserved(mixed);
    EXPECT_TRUE(sameProcess(r.decl.body, prefix("read", ref("P"))));
    ts::Trace t0 = {"read", "ack", "read", "ack"};
    EXPECT_EQ(ts::restrictTrace(t0, {"read"}), (ts::Trace{"read", "read"}));
}

TEST(Projection, MutuallyRecursiveLocals) {
    Declaration d = decl("P", prefix("b", ref("Q")));
    Declaration q = decl("Q", extChoice(prefix("a", ref("Q")), prefix("c", ref("P"))));
    q.kind = DeclKind::WhereLocal;
    d.locals.push_back(q);
    auto keep = EventSet::of({"a"});
    auto r = projectDecl(d, keep);
    auto hidden = EventSet::of({"b", "c"});
    EXPECT_EQ(ts::astTraces(ts::defsOf(d), d.name, 6, hidden), ts::astTraces(ts::defsOf(r.decl), d.name, 6));
}

TEST(Projection, EmptiedLocalsAreReported) {
    Declaration d = decl("P", prefix("a", ref("Q")));
    Declaration q = decl("Q", prefix("b", ref("Q")));
    q.kind = DeclKind::WhereLocal;
    d.locals.push_back(q);
    auto r = projectDecl(d, EventSet::of({"a"}));
    ASSERT_EQ(r.emptiedLocals.size(), 1u);
    EXPECT_EQ(r.emptiedLocals[0].str(), "Q");
}

TEST(Projection, UnreachableLocalsDropped) {
    Declaration d = decl("P", extChoice(prefix("a", ref("P")), prefix("b", ref("Q"))));
    Declaration q = decl("Q", prefix("c", ref("P")));
    q.kind = DeclKind::WhereLocal;
    d.locals.push_back(q);
    auto r = projectDecl(d, EventSet::of({"a"}));
    EXPECT_TRUE(r.decl.locals.empty());
    EXPECT_TRUE(sameProcess(r.decl.body, prefix("a", ref("P"))));
}

TEST(Projection, Idempotent) {
    ts::TermGen gen(77);
    const std::vector<std::string> ev = {"a", "b", "c"};
    for (int i = 0; i < 500; ++i) {
        Declaration d = decl("P", gen.term(gen.pick(7), ev, {"P"}));
        EventSet keep;
        for (const auto& e : ev)
            if (gen.coin()) keep.add(EventRef::parse(e));
        auto once = projectDecl(d, keep).decl;
        auto twice = projectDecl(once, keep).decl;
        EXPECT_TRUE(sameDeclaration(once, twice)) << printProcess(d.body);
    }
}

TEST(Rename, WithPrefix) {
    Declaration g = decl("Glue", prefix("Origin.a", prefix("_Target.c", ref("Glue"))));
    auto r = renameWithPrefix(g, Identifier("C"));
    EXPECT_TRUE(sameProcess(r.body, prefix("C.Origin.a", prefix("_C.Target.c", ref("Glue")))));
    Declaration e = decl("E", success());
    EXPECT_TRUE(sameProcess(renameWithPrefix(e, Identifier("X")).body, success()));
}

TEST(Rename, ScopeRoleToPort) {
    Declaration g = decl("Glue", prefix("Origin.a", prefix("Target.c", ref("Glue"))));
    auto r = renameScope(g, Identifier("Origin"), {Identifier("A"), Identifier("Output")});
    EXPECT_TRUE(sameProcess(r.body, prefix("A.Output.a", prefix("Target.c", ref("Glue")))));
}

TEST(Determinize, NoInternalChoiceRemains) {
    ts::TermGen gen(3);
    for (int i = 0; i < 500; ++i) {
        auto p = gen.term(gen.pick(7), {"a", "b", "c"}, {"P"});
        EXPECT_FALSE(hasInternal(determinize(normalizeForDet(p))));
    }
}
