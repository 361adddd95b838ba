#pragma once

#include <functional>

#include "csp.hpp"
#include "transform.hpp"

namespace wright {

enum class AssertKind { DeadlockFree, PortComputation, PortRole };

inline const char* kindName(AssertKind k) {
    switch (k) {
        case AssertKind::DeadlockFree: return "deadlock-free";
        case AssertKind::PortComputation: return "port/computation";
        default: return "port/role";
    }
}

struct Assertion {
    AssertKind kind;
    std::string subject;  // entity the property is about
    std::string spec, impl;
    std::string label;
};

struct EmitPlan {
    std::string text;
    std::vector<Assertion> assertions;
    csp::Module module;
    std::vector<Diagnostic> diagnostics;
};

namespace detail {

inline std::string joined(const EventSet& s, bool scoped = true) {
    std::string out;
    for (const auto& e : s) {
        if (!out.empty()) out += ", ";
        out += scoped ? e.key() : e.name.str();
    }
    return out;
}

inline std::vector<std::string> keys(const EventSet& s) {
    std::vector<std::string> out;
    for (const auto& e : s) out.push_back(e.key());
    return out;
}

}  // namespace detail

class Emitter {
public:
    explicit Emitter(const ArchSpec& spec) : spec_(spec) { planNames(); }

    static std::string header() {
        return "-- FDR compression functions\n"
               "transparent diamond\n"
               "transparent normalise\n"
               "\n\n"
               "-- Wright defined processes\n"
               "channel abstractEvent\n"
               "DFA = abstractEvent -> DFA |~| SKIP\n"
               "\n"
               "quant_semi({},_) = SKIP\n"
               "quant_semi(S,PARAM) = |~| i:S @ PARAM(i) ; quant_semi(diff(S,{i}),PARAM)\n"
               "\n"
               "power_set({}) = {{}}\n"
               "power_set(S) = { union(y,{x}) | x <- S, y <- power_set(diff(S,{x}))}\n"
               "\n\n";
    }

    EmitPlan run() {
        emitHeader();
        bool style = spec_.isStyle();
        text(std::string("-- ") + (style ? "Style " : "Configuration ") + spec_.name().str() + "\n");
        text("-- Types declarations\n");
        text("-- events for abstract specification\n");
        std::vector<std::string> base;
        std::set<std::string> seen;
        auto note = [&](const Declaration& d) {
            forEachNode(d.body, [&](const Process& q) {
                if (q.is<Prefix>() && seen.insert(q.as<Prefix>().event.name.str()).second)
                    base.push_back(q.as<Prefix>().event.name.str());
            });
        };
        for (const auto& t : spec_.types()) {
            auto all = [&](const Declaration& d) {
                note(d);
                for (const auto& l : d.locals) note(l);
            };
            if (auto c = std::get_if<Component>(&t)) {
                for (const auto& p : c->ports) all(p);
                all(c->computation);
            } else {
                const auto& k = std::get<Connector>(t);
                for (const auto& r : k.roles) all(r);
                all(k.glue);
            }
        }
        if (!base.empty()) {
            std::string line = "channel ";
            for (std::size_t i = 0; i < base.size(); ++i) line += (i ? ", " : "") + base[i];
            channel(line + "\n", base);
        }
        text("\n");
        for (const auto& t : spec_.types()) {
            if (auto c = std::get_if<Component>(&t)) emitComponent(*c);
            else emitConnector(std::get<Connector>(t), !style);
        }
        if (style) {
            text("-- No constraints\n");
            text("-- End Style\n");
        } else {
            emitAttachments(std::get<Configuration>(spec_.root));
            text("-- End Configuration\n");
        }
        plan_.text = plan_.module.text();
        return std::move(plan_);
    }

    // Fragments, usable on their own.
    void emitHeader() {
        text("-- FDR compression functions\ntransparent diamond\ntransparent normalise\n\n\n-- Wright defined processes\n");
        channel("channel abstractEvent\n", {"abstractEvent"});
        proc("DFA", csp::intc(csp::pre("abstractEvent", csp::call("DFA")), csp::skip()),
             "DFA = abstractEvent -> DFA |~| SKIP\n");
        text("\nquant_semi({},_) = SKIP\n"
             "quant_semi(S,PARAM) = |~| i:S @ PARAM(i) ; quant_semi(diff(S,{i}),PARAM)\n"
             "\n"
             "power_set({}) = {{}}\n"
             "power_set(S) = { union(y,{x}) | x <- S, y <- power_set(diff(S,{x}))}\n\n\n");
    }

    void emitConnector(const Connector& c, bool withDetRoles) {
        text("-- Connector " + c.name.str() + "\n");
        std::string alphaName = "ALPHA_" + c.name.str();
        setDef(alphaName, csp::lit(detail::keys(c.totalAlphabet), true),
               alphaName + " = {|" + detail::joined(c.totalAlphabet) + "|}\n");
        std::string glue = glueName(c);
        defineWithLocals(c.glue, glue, "", false, [&](const Identifier& n) {
            return n == c.glue.name ? glue : localName(c.glue, n);
        });
        text("\n");
        for (const auto& r : c.roles) {
            std::string an = "ALPHA_" + r.name.str();
            setDef(an, csp::lit(detail::keys(r.alpha.total)), an + " = {" + detail::joined(r.alpha.total) + "}\n");
            std::string rn = "ROLE" + r.name.str();
            defineWithLocals(r, rn, "", false, roleNamer(r, ""));
            std::string a = r.name.str() + "A";
            proc(a, csp::abstractTo(csp::call(rn), "abstractEvent", csp::setName(an)),
                 a + " = " + rn + " [[ x <- abstractEvent | x <- " + an + " ]]\n");
            assertion(AssertKind::DeadlockFree, "role " + c.name.str() + "." + r.name.str(), "DFA", a);
            text("\n");
        }
        for (const auto& r : c.roles) channelFor(r);

        std::string body = c.name.str() + " = ( ";
        std::function<csp::TermPtr(std::size_t)> build = [&](std::size_t i) -> csp::TermPtr {
            if (i == c.roles.size()) return csp::call(glue);
            const auto& r = c.roles[i];
            EventSet internal = setMinus(r.alpha.paramTotal, c.glue.alpha.total);
            body += "(ROLE" + r.name.str() + "[[ x <- " + r.name.str() + ".x | x <- {" + detail::joined(r.alpha.total) +
                    " } ]]\n    [| diff({|" + r.name.str() + "|}, {" +
                    (internal.empty() ? std::string(" ") : detail::joined(internal)) + "}) |]\n    ";
            auto self = csp::renamePrefix(csp::call("ROLE" + r.name.str()), r.name.str(),
                                          csp::lit(detail::keys(r.alpha.total)));
            auto sync = csp::diff(csp::lit({r.name.str()}, true), csp::lit(detail::keys(internal)));
            auto rest = build(i + 1);
            return csp::par(self, sync, rest);
        };
        auto composed = build(0);
        body += glue + std::string(c.roles.size(), ')') + " )\n";
        proc(c.name.str(), composed, body);
        std::string a = c.name.str() + "A";
        proc(a, csp::abstractTo(csp::call(c.name.str()), "abstractEvent", csp::setName(alphaName)),
             a + " = " + c.name.str() + " [[ x <- abstractEvent | x <- " + alphaName + " ]]\n");
        assertion(AssertKind::DeadlockFree, "connector " + c.name.str(), "DFA", a);
        if (withDetRoles) {
            text("--Deterministic roles\n");
            for (const auto& r : c.roles) {
                Declaration d = determinizeDecl(r);
                defineWithLocals(d, "ROLE" + r.name.str() + "DET", "DET", false, roleNamer(r, "DET"));
            }
        }
        text("\n");
    }

    void emitComponent(const Component& c) {
        text("-- Component " + c.name.str() + "\n");
        std::string alphaName = "ALPHA_" + c.name.str();
        setDef(alphaName, csp::lit(detail::keys(c.totalAlphabet), true),
               alphaName + " = {|" + detail::joined(c.totalAlphabet) + "|}\n");
        std::string compName = "Computation" + c.name.str();
        defineWithLocals(c.computation, compName, "", false, [&](const Identifier& n) {
            return n == c.computation.name ? compName : localName(c.computation, n);
        });
        text("--Port Process\n");
        for (const auto& p : c.ports) {
            std::string an = "ALPHA_" + p.name.str();
            setDef(an, csp::lit(detail::keys(p.alpha.total)), an + " = {" + detail::joined(p.alpha.total) + "}\n");
            if (!p.alpha.observed.empty())
                setDef(an + "I", csp::lit(detail::keys(p.alpha.initiated)),
                       an + "I = {" + detail::joined(p.alpha.initiated) + "}\n");
            else
                text("-- no events observed!\n");
            std::string pn = "PORT" + p.name.str();
            defineWithLocals(p, pn, "", false, portNamer(p, ""));
            std::string g = p.name.str() + "G";
            proc(g, csp::renamePrefix(csp::call(pn), p.name.str(), csp::setName(an)),
                 g + " = " + pn + "[[ x <-" + p.name.str() + ".x | x <- " + an + " ]]\n");
            text("\n");
        }
        for (const auto& p : c.ports) channelFor(p);
        text("--Deterministic Process restricted to the observed event\n");
        for (const auto& p : c.ports) {
            auto projected = restrictToObserved(p);
            for (const auto& n : projected.emptiedLocals)
                plan_.diagnostics.push_back({Severity::Warning, p.pos, 0,
                                             "where-local '" + n.str() + "' of port '" + p.name.str() +
                                                 "' has no observed behavior; emitted as STOP"});
            Declaration d = determinizeDecl(projected.decl);
            defineWithLocals(d, "PORT" + p.name.str() + "DETR", "DETR", true, portNamer(p, "DETR"));
        }
        for (const auto& p : c.ports) {
            std::string cn = "COMP" + p.name.str();
            std::vector<const Declaration*> others;
            for (const auto& q : c.ports)
                if (q.name != p.name) others.push_back(&q);
            std::string body = cn + " = (";
            std::function<csp::TermPtr(std::size_t)> build = [&](std::size_t i) -> csp::TermPtr {
                if (i == others.size()) {
                    body += compName;
                    return csp::call(compName);
                }
                const Declaration& q = *others[i];
                std::string qn = "PORT" + q.name.str() + "DETR";
                EventSet obs;
                for (const auto& e : q.alpha.observed) obs.add(scopeEvent(e, q.name));
                EventSet internal = setMinus(q.alpha.paramTotal, c.computation.alpha.total);
                csp::TermPtr self = csp::call(qn);
                body += "( " + qn;
                if (!q.alpha.observed.empty()) {
                    body += " [[ x <- " + q.name.str() + ".x | x <- {" + detail::joined(q.alpha.observed) + " } ]]";
                    self = csp::renamePrefix(self, q.name.str(), csp::lit(detail::keys(q.alpha.observed)));
                }
                body += "\n  [| diff({" + detail::joined(obs) + "}, {" +
                        (internal.empty() ? std::string(" ") : detail::joined(internal)) + "}) |]\n  ";
                auto sync = csp::diff(csp::lit(detail::keys(obs)), csp::lit(detail::keys(internal)));
                auto rest = build(i + 1);
                body += ")";
                return csp::par(self, sync, rest);
            };
            auto inner = build(0);
            body += ")\\ diff(" + alphaName + ", { |" + p.name.str() + "| })\n";
            proc(cn, csp::hide(inner, csp::diff(csp::setName(alphaName), csp::lit({p.name.str()}, true))), body);
            assertion(AssertKind::PortComputation, "component " + c.name.str() + "." + p.name.str(),
                      p.name.str() + "G", cn);
        }
        text("\n");
    }

    void emitAttachments(const Configuration& cfg) {
        text("--Attachment Test\n");
        for (const auto& a : cfg.attachments) {
            const Component* comp = nullptr;
            const Connector* conn = nullptr;
            for (const auto& i : cfg.instances) {
                if (i.name == a.left.instance)
                    if (auto t = spec_.findType(i.type)) comp = std::get_if<Component>(t);
                if (i.name == a.right.instance)
                    if (auto t = spec_.findType(i.type)) conn = std::get_if<Connector>(t);
            }
            if (!comp || !conn || !comp->port(a.left.point) || !conn->role(a.right.point)) continue;
            std::string P = a.left.point.str(), R = a.right.point.str();
            std::string aP = "ALPHA_" + P, aR = "ALPHA_" + R;
            std::string pPlus = a.left.instance.str() + "_" + P + "PLUS";
            std::string rPlus = a.right.instance.str() + "_" + R + "PLUS";
            std::string pDet = pPlus + "DET";
            proc(pPlus, csp::par(csp::call("PORT" + P), csp::diff(csp::setName(aR), csp::setName(aP)), csp::stop()),
                 pPlus + " = PORT" + P + "\n  [| diff( " + aR + " , " + aP + " ) |] STOP\n");
            proc(rPlus, csp::par(csp::call("ROLE" + R), csp::diff(csp::setName(aP), csp::setName(aR)), csp::stop()),
                 rPlus + " = ROLE" + R + "\n  [| diff( " + aP + " , " + aR + " )|] STOP\n");
            proc(pDet, csp::par(csp::call(pPlus), csp::unite(csp::setName(aP), csp::setName(aR)), csp::call("ROLE" + R + "DET")),
                 pDet + " = " + pPlus + "\n  [| union(" + aP + " , " + aR + " ) |]\n  ROLE" + R + "DET\n");
            assertion(AssertKind::PortRole, a.left.instance.str() + "." + P + " as " + a.right.instance.str() + "." + R,
                      rPlus, pDet);
            text("\n");
        }
    }

    EmitPlan take() {
        plan_.text = plan_.module.text();
        return std::move(plan_);
    }

private:
    const ArchSpec& spec_;
    EmitPlan plan_;
    std::set<std::string> qualifiedLocals_;
    bool manyConnectors_ = false;

    void planNames() {
        std::map<std::string, int> uses;
        std::set<std::string> globals{"DFA", "Glue", "abstractEvent"};
        int connectors = 0;
        auto count = [&](const Declaration& d) {
            for (const auto& l : d.locals) ++uses[l.name.str()];
        };
        for (const auto& t : spec_.types()) {
            globals.insert(typeName(t).str());
            if (auto c = std::get_if<Component>(&t)) {
                for (const auto& p : c->ports) {
                    count(p);
                    globals.insert(p.name.str());
                }
                count(c->computation);
            } else {
                ++connectors;
                const auto& k = std::get<Connector>(t);
                for (const auto& r : k.roles) {
                    count(r);
                    globals.insert(r.name.str());
                }
                count(k.glue);
            }
        }
        if (auto cfg = std::get_if<Configuration>(&spec_.root))
            for (const auto& i : cfg->instances) globals.insert(i.name.str());
        for (const auto& [n, k] : uses)
            if (k > 1 || globals.count(n)) qualifiedLocals_.insert(n);
        manyConnectors_ = connectors > 1;
    }

    std::string glueName(const Connector& c) const { return manyConnectors_ ? "Glue" + c.name.str() : "Glue"; }

    std::string localName(const Declaration& owner, const Identifier& n, const std::string& suffix = "") const {
        std::string base = qualifiedLocals_.count(n.str()) ? n.str() + "_" + owner.name.str() : n.str();
        return base + suffix;
    }

    std::function<std::string(const Identifier&)> roleNamer(const Declaration& r, std::string suffix) const {
        return [this, &r, suffix](const Identifier& n) {
            return n == r.name ? "ROLE" + r.name.str() + suffix : localName(r, n, suffix);
        };
    }
    std::function<std::string(const Identifier&)> portNamer(const Declaration& p, std::string suffix) const {
        return [this, &p, suffix](const Identifier& n) {
            return n == p.name ? "PORT" + p.name.str() + suffix : localName(p, n, suffix);
        };
    }

    static csp::TermPtr toTerm(const ProcPtr& p, const std::function<std::string(const Identifier&)>& nameOf) {
        return std::visit(
            [&](const auto& x) -> csp::TermPtr {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Prefix>) return csp::pre(x.event.key(), toTerm(x.rest, nameOf));
                else if constexpr (std::is_same_v<T, ExternalChoice>)
                    return csp::ext(toTerm(x.left, nameOf), toTerm(x.right, nameOf));
                else if constexpr (std::is_same_v<T, InternalChoice>)
                    return csp::intc(toTerm(x.left, nameOf), toTerm(x.right, nameOf));
                else if constexpr (std::is_same_v<T, Ref>) return csp::call(nameOf(x.name));
                else if constexpr (std::is_same_v<T, Success>) return csp::skip();
                else return csp::stop();
            },
            p->node);
    }

    // Locals first, then the main equation. A main body reduced to nothing prints as SKIP.
    void defineWithLocals(const Declaration& d, const std::string& mainName, const std::string& suffix, bool,
                          const std::function<std::string(const Identifier&)>& nameOf) {
        for (const auto& l : d.locals) {
            std::string ln = localName(d, l.name, suffix);
            auto t = toTerm(l.body, nameOf);
            proc(ln, t, ln + " = " + csp::render(t) + "\n");
        }
        auto t = d.body->is<Empty>() ? csp::skip() : toTerm(d.body, nameOf);
        proc(mainName, t, mainName + " = " + csp::render(t) + "\n");
    }

    void channelFor(const Declaration& d) {
        std::vector<std::string> declared;
        for (const auto& e : d.alpha.total) declared.push_back(d.name.str() + "." + e.key());
        channel("channel " + d.name.str() + ": {" + detail::joined(d.alpha.total) + "}\n", declared);
    }

    void text(std::string s) {
        csp::Item i;
        i.text = std::move(s);
        plan_.module.items.push_back(std::move(i));
    }
    void channel(std::string s, std::vector<std::string> declared) {
        csp::Item i;
        i.kind = csp::ItemKind::Channel;
        i.text = std::move(s);
        i.declared = std::move(declared);
        plan_.module.items.push_back(std::move(i));
    }
    void setDef(std::string name, csp::SetPtr set, std::string s) {
        csp::Item i;
        i.kind = csp::ItemKind::SetDef;
        i.name = std::move(name);
        i.set = std::move(set);
        i.text = std::move(s);
        plan_.module.items.push_back(std::move(i));
    }
    void proc(std::string name, csp::TermPtr t, std::string s) {
        csp::Item i;
        i.kind = csp::ItemKind::ProcDef;
        i.name = std::move(name);
        i.proc = std::move(t);
        i.text = std::move(s);
        plan_.module.items.push_back(std::move(i));
    }
    void assertion(AssertKind k, std::string subject, std::string spec, std::string impl) {
        std::string label = "assert " + spec + " [FD= " + impl;
        csp::Item i;
        i.kind = csp::ItemKind::Assert;
        i.spec = spec;
        i.impl = impl;
        i.text = label + "\n";
        plan_.module.items.push_back(i);
        plan_.assertions.push_back({k, std::move(subject), std::move(spec), std::move(impl), std::move(label)});
    }
};

inline std::string emitHeader() { return Emitter::header(); }

inline EmitPlan emit(const ArchSpec& checked) { return Emitter(checked).run(); }

}  // namespace wright
