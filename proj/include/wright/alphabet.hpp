#pragma once

#include "model.hpp"

namespace wright {

inline EventRef scopeEvent(const EventRef& e, const Identifier& owner) {
    if (e.scope.size() >= 2) throw std::invalid_argument("cannot scope '" + e.key() + "' further");
    std::vector<Identifier> s{owner};
    s.insert(s.end(), e.scope.begin(), e.scope.end());
    return EventRef(e.name, e.polarity, std::move(s));
}

namespace detail {

inline void collect(const ProcPtr& p, const Identifier& owner, EventRelation& p2p, EventRelation& p2e,
                    std::vector<std::pair<Identifier, SourcePos>>& refs) {
    forEachNode(p, [&](const Process& q) {
        if (q.is<Prefix>()) p2e.addEvent(owner, q.as<Prefix>().event);
        else if (q.is<Ref>()) refs.emplace_back(q.as<Ref>().name, q.pos);
    });
    p2p.edges[owner];
    p2e.events[owner];
}

}  // namespace detail

// Fills alpha.total/initiated/observed for d and its locals.
inline AlphabetInfo computeDeclarationAlphabet(Declaration& d, std::vector<Diagnostic>* diags = nullptr) {
    auto report = [&](Severity s, SourcePos pos, std::string m) {
        if (diags) diags->push_back({s, pos, 0, std::move(m)});
    };
    std::set<Identifier> names{d.name};
    for (const auto& l : d.locals) {
        if (!names.insert(l.name).second) report(Severity::Error, l.pos, "where-local '" + l.name.str() + "' defined twice");
        if (!l.locals.empty()) report(Severity::Error, l.pos, "nested where-clauses are not supported");
    }
    EventRelation p2p, p2e;
    auto scan = [&](const Declaration& x) {
        std::vector<std::pair<Identifier, SourcePos>> refs;
        detail::collect(x.body, x.name, p2p, p2e, refs);
        for (const auto& [n, pos] : refs) {
            if (names.count(n)) p2p.addEdge(x.name, n);
            else report(Severity::Error, pos, "undefined process '" + n.str() + "' in '" + d.name.str() + "'");
        }
    };
    scan(d);
    for (const auto& l : d.locals) scan(l);
    auto alpha = relationCompose(p2p, p2e);

    auto split = [&](AlphabetInfo& info, const EventSet& total, const std::vector<const Declaration*>& scope) {
        info.total = EventSet{};
        for (const auto& e : total) {
            bool init = false, obs = false;
            for (auto* x : scope)
                forEachNode(x->body, [&](const Process& q) {
                    if (q.is<Prefix>() && q.as<Prefix>().event == e) (q.as<Prefix>().event.initiated() ? init : obs) = true;
                });
            EventRef tagged = e;
            tagged.polarity = init ? Polarity::Initiated : Polarity::Observed;
            if (init && obs)
                report(Severity::Warning, d.pos,
                       "event '" + e.key() + "' used as both initiated and observed in '" + d.name.str() + "'");
            info.total.add(tagged);
            (init ? info.initiated : info.observed).add(tagged);
        }
    };
    std::vector<const Declaration*> all{&d};
    for (const auto& l : d.locals) all.push_back(&l);
    d.alpha = {};
    split(d.alpha, alpha[d.name], all);
    for (auto& l : d.locals) {
        l.alpha = {};
        split(l.alpha, alpha[l.name], all);
    }
    return d.alpha;
}

inline void computeParamAlphabet(Declaration& d, std::vector<Diagnostic>* diags = nullptr) {
    d.alpha.paramTotal = {};
    for (const auto& e : d.alpha.total) {
        if (!e.scope.empty()) {
            if (diags)
                diags->push_back({Severity::Error, d.pos, 0,
                                  "event '" + e.key() + "' of '" + d.name.str() + "' must not carry a scope"});
            continue;
        }
        d.alpha.paramTotal.add(scopeEvent(e, d.name));
    }
}

inline EventSet computeComponentAlphabet(Component& c, std::vector<Diagnostic>* diags = nullptr) {
    auto warn = [&](SourcePos pos, std::string m) {
        if (diags) diags->push_back({Severity::Warning, pos, 0, std::move(m)});
    };
    for (auto& p : c.ports) {
        computeDeclarationAlphabet(p, diags);
        computeParamAlphabet(p, diags);
    }
    computeDeclarationAlphabet(c.computation, diags);

    EventSet kept;
    for (const auto& e : c.computation.alpha.total) {
        if (e.scope.empty()) {
            kept.add(e);
            continue;
        }
        const Declaration* port = e.scope.size() == 1 ? c.port(e.scope[0]) : nullptr;
        if (!port) {
            warn(c.computation.pos, "event '" + e.key() + "' names no port of '" + c.name.str() + "'; removed");
            continue;
        }
        if (!port->alpha.paramTotal.contains(e)) {
            warn(c.computation.pos, "event '" + e.key() + "' is not in the alphabet of port '" + port->name.str() + "'; removed");
            continue;
        }
        kept.add(e);
    }
    c.computation.alpha.total = kept;
    c.computation.alpha.initiated = setIntersect(c.computation.alpha.initiated, kept);
    c.computation.alpha.observed = setIntersect(c.computation.alpha.observed, kept);

    EventSet total;
    for (const auto& p : c.ports) {
        for (const auto& e : p.alpha.paramTotal)
            if (!kept.contains(e)) warn(p.pos, "port event '" + e.key() + "' is never used by the computation");
        total = setUnion(total, p.alpha.paramTotal);
    }
    for (const auto& e : kept)
        if (e.scope.empty()) total.add(e);
    c.totalAlphabet = total;
    return total;
}

inline EventSet computeConnectorAlphabet(Connector& c, std::vector<Diagnostic>* diags = nullptr) {
    for (auto& r : c.roles) {
        computeDeclarationAlphabet(r, diags);
        computeParamAlphabet(r, diags);
    }
    computeDeclarationAlphabet(c.glue, diags);
    for (const auto& e : c.glue.alpha.total) {
        const Declaration* role = e.scope.size() == 1 ? c.role(e.scope[0]) : nullptr;
        if (!e.scope.empty() && (!role || !role->alpha.paramTotal.contains(e)) && diags)
            diags->push_back({Severity::Warning, c.glue.pos, 0,
                              "glue event '" + e.key() + "' matches no role event of '" + c.name.str() + "'"});
    }
    EventSet total = c.glue.alpha.total;
    for (const auto& r : c.roles) total = setUnion(total, r.alpha.paramTotal);
    c.totalAlphabet = total;
    return total;
}

inline ArchSpec computeAlphabets(ArchSpec spec, std::vector<Diagnostic>* diags = nullptr) {
    for (auto& t : spec.types()) {
        if (auto c = std::get_if<Component>(&t)) computeComponentAlphabet(*c, diags);
        else computeConnectorAlphabet(std::get<Connector>(t), diags);
    }
    return spec;
}

}  // namespace wright
