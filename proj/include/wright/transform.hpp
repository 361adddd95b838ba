#pragma once

#include <functional>

#include "alphabet.hpp"

namespace wright {

namespace detail {

inline ProcPtr mapEvents(const ProcPtr& p, const std::function<EventRef(const EventRef&)>& f) {
    return std::visit(
        [&](const auto& x) -> ProcPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Prefix>) return prefix(f(x.event), mapEvents(x.rest, f), p->pos);
            else if constexpr (std::is_same_v<T, ExternalChoice>)
                return extChoice(mapEvents(x.left, f), mapEvents(x.right, f), p->pos);
            else if constexpr (std::is_same_v<T, InternalChoice>)
                return intChoice(mapEvents(x.left, f), mapEvents(x.right, f), p->pos);
            else return p;
        },
        p->node);
}

inline bool isChoice(const ProcPtr& p) { return p->is<ExternalChoice>() || p->is<InternalChoice>(); }

inline std::pair<ProcPtr, ProcPtr> branches(const ProcPtr& p) {
    if (p->is<ExternalChoice>()) return {p->as<ExternalChoice>().left, p->as<ExternalChoice>().right};
    return {p->as<InternalChoice>().left, p->as<InternalChoice>().right};
}

inline void flattenChoice(const ProcPtr& p, std::vector<ProcPtr>& out) {
    if (isChoice(p)) {
        auto [l, r] = branches(p);
        flattenChoice(l, out);
        flattenChoice(r, out);
    } else {
        out.push_back(p);
    }
}

inline ProcPtr collapse(const ProcPtr& l, const ProcPtr& r, bool external, SourcePos pos) {
    if (l->is<Empty>()) return r;
    if (r->is<Empty>()) return l;
    return external ? extChoice(l, r, pos) : intChoice(l, r, pos);
}

}  // namespace detail

// Merges choice branches that start with the same event: (e -> Q) op (e -> S) becomes e -> (Q [] S).
inline ProcPtr normalizeForDet(const ProcPtr& p) {
    if (p->is<Prefix>()) {
        const auto& x = p->as<Prefix>();
        return prefix(x.event, normalizeForDet(x.rest), p->pos);
    }
    if (!detail::isChoice(p)) return p;
    std::vector<ProcPtr> flat;
    detail::flattenChoice(p, flat);
    std::vector<std::size_t> firstOf(flat.size());
    bool merged = false;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        firstOf[i] = i;
        if (!flat[i]->is<Prefix>()) continue;
        for (std::size_t j = 0; j < i; ++j)
            if (flat[j]->is<Prefix>() && flat[j]->as<Prefix>().event == flat[i]->as<Prefix>().event) {
                firstOf[i] = firstOf[j];
                merged = true;
                break;
            }
    }
    if (!merged) {
        auto [l, r] = detail::branches(p);
        return p->is<ExternalChoice>() ? extChoice(normalizeForDet(l), normalizeForDet(r), p->pos)
                                       : intChoice(normalizeForDet(l), normalizeForDet(r), p->pos);
    }
    std::vector<ProcPtr> groups;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        if (firstOf[i] != i) continue;
        if (!flat[i]->is<Prefix>()) {
            groups.push_back(normalizeForDet(flat[i]));
            continue;
        }
        ProcPtr cont;
        for (std::size_t j = i; j < flat.size(); ++j)
            if (firstOf[j] == i) {
                ProcPtr r = flat[j]->as<Prefix>().rest;
                cont = cont ? extChoice(cont, r) : r;
            }
        groups.push_back(prefix(flat[i]->as<Prefix>().event, normalizeForDet(cont), flat[i]->pos));
    }
    ProcPtr out = groups[0];
    for (std::size_t i = 1; i < groups.size(); ++i)
        out = p->is<ExternalChoice>() ? extChoice(out, groups[i], p->pos) : intChoice(out, groups[i], p->pos);
    return out;
}

inline ProcPtr determinize(const ProcPtr& p) {
    return std::visit(
        [&](const auto& x) -> ProcPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Prefix>) return prefix(x.event, determinize(x.rest), p->pos);
            else if constexpr (std::is_same_v<T, ExternalChoice> || std::is_same_v<T, InternalChoice>)
                return extChoice(determinize(x.left), determinize(x.right), p->pos);
            else return p;
        },
        p->node);
}

inline Declaration determinizeDecl(Declaration d) {
    d.body = determinize(normalizeForDet(d.body));
    for (auto& l : d.locals) l.body = determinize(normalizeForDet(l.body));
    return d;
}

namespace detail {

// Removes prefixes on events outside keep; choices with an Empty side collapse.
inline ProcPtr eliminate(const ProcPtr& p, const EventSet& keep) {
    return std::visit(
        [&](const auto& x) -> ProcPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Prefix>) {
                ProcPtr r = eliminate(x.rest, keep);
                if (!keep.contains(x.event)) return r;
                return prefix(x.event, r, p->pos);
            } else if constexpr (std::is_same_v<T, ExternalChoice> || std::is_same_v<T, InternalChoice>) {
                return collapse(eliminate(x.left, keep), eliminate(x.right, keep), std::is_same_v<T, ExternalChoice>,
                                p->pos);
            } else {
                return p;
            }
        },
        p->node);
}

inline void unguardedRefs(const ProcPtr& p, std::set<Identifier>& out) {
    if (p->is<Ref>()) out.insert(p->as<Ref>().name);
    else if (isChoice(p)) {
        auto [l, r] = branches(p);
        unguardedRefs(l, out);
        unguardedRefs(r, out);
    }
}

inline ProcPtr eraseUnguarded(const ProcPtr& p, const std::set<Identifier>& victims) {
    if (p->is<Ref>()) return victims.count(p->as<Ref>().name) ? empty() : p;
    if (isChoice(p)) {
        auto [l, r] = branches(p);
        return collapse(eraseUnguarded(l, victims), eraseUnguarded(r, victims), p->is<ExternalChoice>(), p->pos);
    }
    return p;
}

inline void refsAnywhere(const ProcPtr& p, std::set<Identifier>& out) {
    forEachNode(p, [&](const Process& q) {
        if (q.is<Ref>()) out.insert(q.as<Ref>().name);
    });
}

}  // namespace detail

struct ProjectionResult {
    Declaration decl;
    std::vector<Identifier> emptiedLocals;  // locals that ended up with no behavior but are still referenced
};

// Projection of a declaration and its where-locals onto keep. An unguarded reference to a
// definition on a common unguarded cycle is replaced by that definition's body; a reference
// already expanded along the way (including the direct self-reference) is erased.
inline ProjectionResult projectDecl(const Declaration& d, const EventSet& keep) {
    std::vector<Declaration*> defs;
    Declaration out = d;
    defs.push_back(&out);
    for (auto& l : out.locals) defs.push_back(&l);
    std::map<Identifier, Declaration*> byName;
    for (auto* x : defs) {
        x->body = detail::eliminate(x->body, keep);
        byName[x->name] = x;
    }
    std::map<Identifier, std::set<Identifier>> g;
    for (auto* x : defs) {
        std::set<Identifier> ug;
        detail::unguardedRefs(x->body, ug);
        for (const auto& n : ug)
            if (byName.count(n)) g[x->name].insert(n);
    }
    auto reaches = [&](const Identifier& from, const Identifier& to) {
        std::set<Identifier> seen;
        std::vector<Identifier> st{from};
        while (!st.empty()) {
            auto n = st.back();
            st.pop_back();
            if (n == to) return true;
            if (!seen.insert(n).second) continue;
            for (const auto& m : g[n]) st.push_back(m);
        }
        return false;
    };
    std::map<Identifier, ProcPtr> original;
    for (auto* x : defs) original[x->name] = x->body;
    std::function<ProcPtr(const ProcPtr&, const Identifier&, std::set<Identifier>&)> expand =
        [&](const ProcPtr& p, const Identifier& root, std::set<Identifier>& seen) -> ProcPtr {
        if (p->is<Ref>()) {
            const auto& n = p->as<Ref>().name;
            if (!byName.count(n) || !reaches(n, root)) return p;
            if (seen.count(n)) return empty();
            seen.insert(n);
            return expand(original[n], root, seen);
        }
        if (detail::isChoice(p)) {
            auto [l, r] = detail::branches(p);
            auto el = expand(l, root, seen);
            auto er = expand(r, root, seen);
            return detail::collapse(el, er, p->is<ExternalChoice>(), p->pos);
        }
        return p;
    };
    for (auto* x : defs) {
        std::set<Identifier> seen{x->name};
        x->body = expand(x->body, x->name, seen);
    }
    // Unguarded references to definitions reduced to nothing disappear.
    while (true) {
        bool changed = false;
        for (auto* x : defs) {
            std::set<Identifier> ug, victims;
            detail::unguardedRefs(x->body, ug);
            for (const auto& n : ug)
                if (byName.count(n) && byName[n]->body->is<Empty>()) victims.insert(n);
            if (!victims.empty()) {
                x->body = detail::eraseUnguarded(x->body, victims);
                changed = true;
            }
        }
        if (!changed) break;
    }
    // Drop locals no longer reachable from the main body.
    std::set<Identifier> live{out.name};
    std::vector<Identifier> st{out.name};
    while (!st.empty()) {
        auto n = st.back();
        st.pop_back();
        std::set<Identifier> rs;
        detail::refsAnywhere(byName.at(n)->body, rs);
        for (const auto& m : rs)
            if (byName.count(m) && live.insert(m).second) st.push_back(m);
    }
    ProjectionResult r;
    std::vector<Declaration> kept;
    for (auto& l : out.locals)
        if (live.count(l.name)) {
            if (l.body->is<Empty>()) r.emptiedLocals.push_back(l.name);
            kept.push_back(std::move(l));
        }
    out.locals = std::move(kept);
    r.decl = std::move(out);
    return r;
}

inline ProcPtr projectTo(const ProcPtr& p, const EventSet& keep, const Identifier& selfName) {
    Declaration d;
    d.kind = DeclKind::Port;
    d.name = selfName;
    d.body = p;
    return projectDecl(d, keep).decl.body;
}

inline ProjectionResult restrictToObserved(const Declaration& d) { return projectDecl(d, d.alpha.observed); }

inline Declaration renameWithPrefix(Declaration d, const Identifier& prefixName) {
    auto f = [&](const EventRef& e) { return scopeEvent(e, prefixName); };
    d.body = detail::mapEvents(d.body, f);
    for (auto& l : d.locals) l = renameWithPrefix(std::move(l), prefixName);
    return d;
}

// Re-scopes events owned by `from` (e.g. a role) under `to` (e.g. instance.port).
inline Declaration renameScope(Declaration d, const Identifier& from, const std::vector<Identifier>& to) {
    auto f = [&](const EventRef& e) {
        if (e.scope.size() != 1 || e.scope[0] != from) return e;
        return EventRef(e.name, e.polarity, to);
    };
    d.body = detail::mapEvents(d.body, f);
    for (auto& l : d.locals) l = renameScope(std::move(l), from, to);
    return d;
}

}  // namespace wright
