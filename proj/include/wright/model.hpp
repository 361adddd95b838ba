#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace wright {

struct SourcePos {
    int line = 1;
    int column = 1;
    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

enum class Severity { Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Error;
    SourcePos pos;
    int rule = 0;  // 0 when not tied to a static-semantics rule
    std::string message;

    std::string text() const {
        std::string out = std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": ";
        out += severity == Severity::Error ? "error: " : "warning: ";
        if (rule > 0) out += "rule=" + std::to_string(rule) + " ";
        return out + message;
    }
};

inline bool hasErrors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

class Identifier {
public:
    Identifier() = default;
    explicit Identifier(std::string text) : text_(std::move(text)) {
        if (!valid(text_)) throw std::invalid_argument("invalid identifier '" + text_ + "'");
    }
    static bool valid(const std::string& s) {
        if (s.empty()) return false;
        auto c0 = static_cast<unsigned char>(s[0]);
        if (!std::isalpha(c0) && c0 != '_') return false;
        return std::all_of(s.begin(), s.end(), [](char c) {
            auto u = static_cast<unsigned char>(c);
            return std::isalnum(u) || u == '_';
        });
    }
    const std::string& str() const { return text_; }
    bool empty() const { return text_.empty(); }
    friend bool operator==(const Identifier&, const Identifier&) = default;
    friend auto operator<=>(const Identifier&, const Identifier&) = default;

private:
    std::string text_;
};

enum class Polarity { Observed, Initiated };

// Equality and hashing ignore polarity.
struct EventRef {
    Identifier name;
    Polarity polarity = Polarity::Observed;
    std::vector<Identifier> scope;

    EventRef() = default;
    EventRef(Identifier n, Polarity p = Polarity::Observed, std::vector<Identifier> s = {})
        : name(std::move(n)), polarity(p), scope(std::move(s)) {
        if (scope.size() > 2) throw std::invalid_argument("event scope deeper than two segments");
    }
    static EventRef parse(const std::string& dotted, Polarity p = Polarity::Observed) {
        std::vector<Identifier> parts;
        std::size_t start = 0;
        while (true) {
            auto dot = dotted.find('.', start);
            parts.emplace_back(dotted.substr(start, dot - start));
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
        Identifier n = parts.back();
        parts.pop_back();
        return EventRef(n, p, parts);
    }

    bool initiated() const { return polarity == Polarity::Initiated; }

    std::string key() const {
        std::string k;
        for (const auto& s : scope) k += s.str() + ".";
        return k + name.str();
    }
    friend bool operator==(const EventRef& a, const EventRef& b) { return a.name == b.name && a.scope == b.scope; }
};

class EventSet {
public:
    EventSet() = default;
    EventSet(std::initializer_list<EventRef> es) {
        for (const auto& e : es) add(e);
    }
    static EventSet of(std::initializer_list<const char*> names) {
        EventSet s;
        for (auto n : names) s.add(EventRef::parse(n));
        return s;
    }

    bool add(const EventRef& e) {
        if (!keys_.insert(e.key()).second) return false;
        items_.push_back(e);
        return true;
    }
    bool contains(const EventRef& e) const { return keys_.count(e.key()) > 0; }
    bool containsKey(const std::string& k) const { return keys_.count(k) > 0; }
    void remove(const EventRef& e) {
        if (!keys_.erase(e.key())) return;
        items_.erase(std::find(items_.begin(), items_.end(), e));
    }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    const std::vector<EventRef>& items() const { return items_; }
    const EventRef* find(const EventRef& e) const {
        auto it = std::find(items_.begin(), items_.end(), e);
        return it == items_.end() ? nullptr : &*it;
    }

    std::set<std::string> keySet() const { return {keys_.begin(), keys_.end()}; }

    friend bool operator==(const EventSet& a, const EventSet& b) { return a.keys_ == b.keys_; }

private:
    std::vector<EventRef> items_;
    std::unordered_set<std::string> keys_;
};

inline EventSet setUnion(const EventSet& a, const EventSet& b) {
    EventSet r = a;
    for (const auto& e : b) r.add(e);
    return r;
}

inline EventSet setMinus(const EventSet& a, const EventSet& b) {
    EventSet r;
    for (const auto& e : a)
        if (!b.contains(e)) r.add(e);
    return r;
}

inline EventSet setIntersect(const EventSet& a, const EventSet& b) {
    EventSet r;
    for (const auto& e : a)
        if (b.contains(e)) r.add(e);
    return r;
}

// Name-to-names relation plus name-to-events relation.
struct EventRelation {
    std::map<Identifier, std::set<Identifier>> edges;
    std::map<Identifier, EventSet> events;

    void addEdge(const Identifier& from, const Identifier& to) { edges[from].insert(to); }
    void addEvent(const Identifier& from, const EventRef& e) { events[from].add(e); }

    bool related(const Identifier& a, const Identifier& b) const {
        auto it = edges.find(a);
        return it != edges.end() && it->second.count(b);
    }
    std::size_t pairCount() const {
        std::size_t n = 0;
        for (const auto& [k, v] : edges) n += v.size();
        return n;
    }
    friend bool operator==(const EventRelation&, const EventRelation&) = default;
};

inline EventRelation relationClosure(const EventRelation& r) {
    EventRelation out;
    out.events = r.events;
    for (const auto& [start, _] : r.edges) {
        std::vector<Identifier> stack(r.edges.at(start).begin(), r.edges.at(start).end());
        std::set<Identifier> seen;
        while (!stack.empty()) {
            Identifier n = stack.back();
            stack.pop_back();
            if (!seen.insert(n).second) continue;
            auto it = r.edges.find(n);
            if (it != r.edges.end())
                for (const auto& m : it->second) stack.push_back(m);
        }
        if (!seen.empty()) out.edges[start] = std::move(seen);
    }
    return out;
}

// result(n) = p2e(n) united with p2e(m) for every m reachable from n.
inline std::map<Identifier, EventSet> relationCompose(const EventRelation& p2p, const EventRelation& p2e) {
    std::map<Identifier, EventSet> out;
    std::set<Identifier> names;
    for (const auto& [k, _] : p2p.edges) names.insert(k);
    for (const auto& [k, _] : p2e.events) names.insert(k);
    EventRelation closed = relationClosure(p2p);
    for (const auto& n : names) {
        EventSet s;
        if (auto it = p2e.events.find(n); it != p2e.events.end()) s = it->second;
        if (auto it = closed.edges.find(n); it != closed.edges.end())
            for (const auto& m : it->second)
                if (auto jt = p2e.events.find(m); jt != p2e.events.end()) s = setUnion(s, jt->second);
        out[n] = s;
    }
    return out;
}

// Behavioral AST.
class Process;
using ProcPtr = std::shared_ptr<const Process>;

struct Prefix {
    EventRef event;
    ProcPtr rest;
};
struct ExternalChoice {
    ProcPtr left, right;
};
struct InternalChoice {
    ProcPtr left, right;
};
struct Ref {
    Identifier name;
};
struct Success {};
struct Empty {};

class Process {
public:
    using Node = std::variant<Prefix, ExternalChoice, InternalChoice, Ref, Success, Empty>;
    Node node;
    SourcePos pos;

    template <class T>
    bool is() const { return std::holds_alternative<T>(node); }
    template <class T>
    const T& as() const { return std::get<T>(node); }
};

inline ProcPtr mk(Process::Node n, SourcePos pos = {}) {
    return std::make_shared<const Process>(Process{std::move(n), pos});
}
inline ProcPtr prefix(EventRef e, ProcPtr rest, SourcePos pos = {}) { return mk(Prefix{std::move(e), std::move(rest)}, pos); }
inline ProcPtr prefix(const std::string& e, ProcPtr rest) {
    bool init = !e.empty() && e[0] == '_';
    return prefix(EventRef::parse(init ? e.substr(1) : e, init ? Polarity::Initiated : Polarity::Observed), std::move(rest));
}
inline ProcPtr extChoice(ProcPtr l, ProcPtr r, SourcePos pos = {}) { return mk(ExternalChoice{std::move(l), std::move(r)}, pos); }
inline ProcPtr intChoice(ProcPtr l, ProcPtr r, SourcePos pos = {}) { return mk(InternalChoice{std::move(l), std::move(r)}, pos); }
inline ProcPtr ref(const Identifier& n, SourcePos pos = {}) { return mk(Ref{n}, pos); }
inline ProcPtr ref(const std::string& n) { return ref(Identifier(n)); }
inline ProcPtr success(SourcePos pos = {}) { return mk(Success{}, pos); }
inline ProcPtr empty() { return mk(Empty{}); }

// Structural equality, positions ignored; polarity compared too.
inline bool sameProcess(const ProcPtr& a, const ProcPtr& b) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Prefix>) {
                const auto& y = b->as<Prefix>();
                return x.event == y.event && x.event.polarity == y.event.polarity && sameProcess(x.rest, y.rest);
            } else if constexpr (std::is_same_v<T, ExternalChoice> || std::is_same_v<T, InternalChoice>) {
                const auto& y = std::get<T>(b->node);
                return sameProcess(x.left, y.left) && sameProcess(x.right, y.right);
            } else if constexpr (std::is_same_v<T, Ref>) {
                return x.name == b->as<Ref>().name;
            } else {
                return true;
            }
        },
        a->node);
}

template <class F>
void forEachNode(const ProcPtr& p, F&& f) {
    f(*p);
    if (p->is<Prefix>()) forEachNode(p->as<Prefix>().rest, f);
    else if (p->is<ExternalChoice>()) {
        forEachNode(p->as<ExternalChoice>().left, f);
        forEachNode(p->as<ExternalChoice>().right, f);
    } else if (p->is<InternalChoice>()) {
        forEachNode(p->as<InternalChoice>().left, f);
        forEachNode(p->as<InternalChoice>().right, f);
    }
}

inline std::size_t operatorCount(const ProcPtr& p) {
    std::size_t n = 0;
    forEachNode(p, [&](const Process& q) {
        if (q.is<Prefix>() || q.is<ExternalChoice>() || q.is<InternalChoice>()) ++n;
    });
    return n;
}

struct AlphabetInfo {
    EventSet total;
    EventSet initiated;
    EventSet observed;
    EventSet paramTotal;
};

enum class DeclKind { Port, Role, Glue, Computation, WhereLocal };

struct Declaration {
    DeclKind kind = DeclKind::Port;
    Identifier name;
    ProcPtr body;
    std::vector<Declaration> locals;
    AlphabetInfo alpha;  // filled by the alphabet pass
    SourcePos pos;

    const Declaration* local(const Identifier& n) const {
        for (const auto& l : locals)
            if (l.name == n) return &l;
        return nullptr;
    }
};

inline bool sameDeclaration(const Declaration& a, const Declaration& b) {
    if (a.kind != b.kind || a.name != b.name || !sameProcess(a.body, b.body) || a.locals.size() != b.locals.size())
        return false;
    for (std::size_t i = 0; i < a.locals.size(); ++i)
        if (!sameDeclaration(a.locals[i], b.locals[i])) return false;
    return true;
}

struct Component {
    Identifier name;
    std::vector<Declaration> ports;
    Declaration computation;
    EventSet totalAlphabet;
    SourcePos pos;

    const Declaration* port(const Identifier& n) const {
        for (const auto& p : ports)
            if (p.name == n) return &p;
        return nullptr;
    }
};

struct Connector {
    Identifier name;
    std::vector<Declaration> roles;
    Declaration glue;
    EventSet totalAlphabet;
    SourcePos pos;

    const Declaration* role(const Identifier& n) const {
        for (const auto& r : roles)
            if (r.name == n) return &r;
        return nullptr;
    }
};

using TypeDecl = std::variant<Component, Connector>;

inline const Identifier& typeName(const TypeDecl& t) {
    return std::visit([](const auto& x) -> const Identifier& { return x.name; }, t);
}

struct Instance {
    Identifier name;
    Identifier type;
    SourcePos pos;
};

struct InterfaceRef {
    Identifier instance;
    Identifier point;
    SourcePos pos;
};

struct Attachment {
    InterfaceRef left;
    InterfaceRef right;
    SourcePos pos;
};

struct Configuration {
    Identifier name;
    std::vector<TypeDecl> types;
    std::vector<Instance> instances;
    std::vector<Attachment> attachments;
    SourcePos pos;
};

struct Style {
    Identifier name;
    std::vector<TypeDecl> types;
    SourcePos pos;
};

struct ArchSpec {
    std::variant<Style, Configuration> root;

    bool isStyle() const { return std::holds_alternative<Style>(root); }
    const Identifier& name() const {
        return std::visit([](const auto& r) -> const Identifier& { return r.name; }, root);
    }
    const std::vector<TypeDecl>& types() const {
        return std::visit([](const auto& r) -> const std::vector<TypeDecl>& { return r.types; }, root);
    }
    std::vector<TypeDecl>& types() {
        return std::visit([](auto& r) -> std::vector<TypeDecl>& { return r.types; }, root);
    }
    const TypeDecl* findType(const Identifier& n) const {
        for (const auto& t : types())
            if (typeName(t) == n) return &t;
        return nullptr;
    }
};

namespace detail {
inline bool sameType(const TypeDecl& a, const TypeDecl& b) {
    if (a.index() != b.index()) return false;
    if (auto* c = std::get_if<Component>(&a)) {
        const auto& d = std::get<Component>(b);
        if (c->name != d.name || c->ports.size() != d.ports.size()) return false;
        for (std::size_t i = 0; i < c->ports.size(); ++i)
            if (!sameDeclaration(c->ports[i], d.ports[i])) return false;
        return sameDeclaration(c->computation, d.computation);
    }
    const auto& c = std::get<Connector>(a);
    const auto& d = std::get<Connector>(b);
    if (c.name != d.name || c.roles.size() != d.roles.size()) return false;
    for (std::size_t i = 0; i < c.roles.size(); ++i)
        if (!sameDeclaration(c.roles[i], d.roles[i])) return false;
    return sameDeclaration(c.glue, d.glue);
}
}  // namespace detail

inline bool sameSpec(const ArchSpec& a, const ArchSpec& b) {
    if (a.root.index() != b.root.index() || a.name() != b.name()) return false;
    if (a.types().size() != b.types().size()) return false;
    for (std::size_t i = 0; i < a.types().size(); ++i)
        if (!detail::sameType(a.types()[i], b.types()[i])) return false;
    if (a.isStyle()) return true;
    const auto& x = std::get<Configuration>(a.root);
    const auto& y = std::get<Configuration>(b.root);
    if (x.instances.size() != y.instances.size() || x.attachments.size() != y.attachments.size()) return false;
    for (std::size_t i = 0; i < x.instances.size(); ++i)
        if (x.instances[i].name != y.instances[i].name || x.instances[i].type != y.instances[i].type) return false;
    for (std::size_t i = 0; i < x.attachments.size(); ++i) {
        const auto& l = x.attachments[i];
        const auto& r = y.attachments[i];
        if (l.left.instance != r.left.instance || l.left.point != r.left.point || l.right.instance != r.right.instance ||
            l.right.point != r.right.point)
            return false;
    }
    return true;
}

}  // namespace wright
