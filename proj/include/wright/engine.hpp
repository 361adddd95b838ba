#pragma once

#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "codegen.hpp"
#include "csp.hpp"

namespace wright::engine {

inline constexpr int kTau = 0;
inline constexpr int kTick = 1;
inline constexpr std::size_t kDefaultMaxStates = 200000;

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AlphabetMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Labels {
public:
    Labels() {
        intern("tau");
        intern("tick");
    }
    int intern(const std::string& s) {
        auto [it, fresh] = ids_.emplace(s, static_cast<int>(names_.size()));
        if (fresh) names_.push_back(s);
        return it->second;
    }
    std::optional<int> find(const std::string& s) const {
        auto it = ids_.find(s);
        return it == ids_.end() ? std::nullopt : std::optional(it->second);
    }
    const std::string& name(int id) const { return names_.at(id); }
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> ids_;
};

using LabelSet = std::vector<int>;  // sorted

inline bool member(const LabelSet& s, int x) { return std::binary_search(s.begin(), s.end(), x); }

struct Lts {
    std::shared_ptr<Labels> labels;
    int initial = 0;
    std::vector<std::vector<std::pair<int, int>>> trans;  // (label, target)

    std::size_t size() const { return trans.size(); }
    std::size_t transitionCount() const {
        std::size_t n = 0;
        for (const auto& t : trans) n += t.size();
        return n;
    }
    bool stable(int s) const {
        for (auto [l, _] : trans[s])
            if (l == kTau) return false;
        return true;
    }
    LabelSet ready(int s) const {
        LabelSet r;
        for (auto [l, _] : trans[s])
            if (l != kTau) r.push_back(l);
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        return r;
    }
    // States that can perform an infinite sequence of taus.
    std::vector<bool> divergent() const {
        std::size_t n = size();
        std::vector<int> index(n, -1), low(n, 0);
        std::vector<bool> onStack(n, false), onCycle(n, false);
        std::vector<int> stack;
        int counter = 0;
        std::function<void(int)> strong = [&](int v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            onStack[v] = true;
            for (auto [l, w] : trans[v]) {
                if (l != kTau) continue;
                if (w == v) onCycle[v] = true;
                if (index[w] < 0) {
                    strong(w);
                    low[v] = std::min(low[v], low[w]);
                } else if (onStack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
            if (low[v] == index[v]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    onStack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                if (comp.size() > 1)
                    for (int x : comp) onCycle[x] = true;
            }
        };
        for (std::size_t v = 0; v < n; ++v)
            if (index[v] < 0) strong(static_cast<int>(v));
        // Backward tau reachability to a cycle.
        std::vector<std::vector<int>> rev(n);
        for (std::size_t v = 0; v < n; ++v)
            for (auto [l, w] : trans[v])
                if (l == kTau) rev[w].push_back(static_cast<int>(v));
        std::vector<bool> div = onCycle;
        std::vector<int> work;
        for (std::size_t v = 0; v < n; ++v)
            if (div[v]) work.push_back(static_cast<int>(v));
        while (!work.empty()) {
            int w = work.back();
            work.pop_back();
            for (int v : rev[w])
                if (!div[v]) {
                    div[v] = true;
                    work.push_back(v);
                }
        }
        return div;
    }
};

// Builds an Lts directly from explicit transitions; used by tests and oracles.
inline Lts makeLts(std::shared_ptr<Labels> labels, std::size_t n,
                   const std::vector<std::tuple<int, std::string, int>>& edges, int initial = 0) {
    Lts l;
    l.labels = labels;
    l.initial = initial;
    l.trans.resize(n);
    for (const auto& [s, lab, t] : edges) l.trans[s].push_back({labels->intern(lab), t});
    return l;
}

// Named process and set definitions plus the declared event universe.
class Env {
public:
    explicit Env(std::shared_ptr<Labels> labels = std::make_shared<Labels>()) : labels_(std::move(labels)) {}

    static Env fromModule(const csp::Module& m, std::shared_ptr<Labels> labels = std::make_shared<Labels>()) {
        Env e(std::move(labels));
        for (const auto& i : m.items) {
            if (i.kind == csp::ItemKind::Channel)
                for (const auto& d : i.declared) e.declareEvent(d);
            else if (i.kind == csp::ItemKind::SetDef) e.defineSet(i.name, i.set);
            else if (i.kind == csp::ItemKind::ProcDef) e.defineProc(i.name, i.proc);
        }
        return e;
    }

    void declareEvent(const std::string& e) {
        if (universeSet_.insert(e).second) universe_.push_back(e);
    }
    void defineSet(const std::string& n, csp::SetPtr s) { sets_[n] = std::move(s); }
    void defineProc(const std::string& n, csp::TermPtr t) { procs_[n] = std::move(t); }

    const csp::TermPtr* proc(const std::string& n) const {
        auto it = procs_.find(n);
        return it == procs_.end() ? nullptr : &it->second;
    }
    const std::map<std::string, csp::TermPtr>& procs() const { return procs_; }
    std::shared_ptr<Labels> labels() const { return labels_; }

    std::vector<std::string> evalSet(const csp::SetPtr& s, int depth = 0) const {
        if (depth > 64) throw CompileError("set definitions are circular");
        return std::visit(
            [&](const auto& x) -> std::vector<std::string> {
                using T = std::decay_t<decltype(x)>;
                std::vector<std::string> out;
                if constexpr (std::is_same_v<T, csp::SetLit>) {
                    for (const auto& item : x.items) {
                        if (!x.productions) {
                            out.push_back(item);
                            continue;
                        }
                        bool any = false;
                        for (const auto& u : universe_)
                            if (u == item || u.rfind(item + ".", 0) == 0) {
                                out.push_back(u);
                                any = true;
                            }
                        if (!any) throw CompileError("no declared events for production {|" + item + "|}");
                    }
                } else if constexpr (std::is_same_v<T, csp::SetName>) {
                    auto it = sets_.find(x.name);
                    if (it == sets_.end()) throw CompileError("unresolved set '" + x.name + "'");
                    out = evalSet(it->second, depth + 1);
                } else if constexpr (std::is_same_v<T, csp::SetDiff>) {
                    auto a = evalSet(x.a, depth + 1);
                    auto b = evalSet(x.b, depth + 1);
                    std::set<std::string> bs(b.begin(), b.end());
                    for (auto& e : a)
                        if (!bs.count(e)) out.push_back(e);
                } else {
                    out = evalSet(x.a, depth + 1);
                    for (auto& e : evalSet(x.b, depth + 1)) out.push_back(e);
                }
                std::sort(out.begin(), out.end());
                out.erase(std::unique(out.begin(), out.end()), out.end());
                return out;
            },
            s->v);
    }

    LabelSet evalLabels(const csp::SetPtr& s) const {
        LabelSet out;
        for (const auto& e : evalSet(s)) out.push_back(labels_->intern(e));
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::shared_ptr<Labels> labels_;
    std::map<std::string, csp::TermPtr> procs_;
    std::map<std::string, csp::SetPtr> sets_;
    std::vector<std::string> universe_;
    std::set<std::string> universeSet_;
};

// Hash-consed operational semantics over compiled terms.
class Compiler {
public:
    explicit Compiler(const Env& env, std::size_t maxStates = kDefaultMaxStates) : env_(env), maxStates_(maxStates) {
        omega_ = node({Kind::Omega, -1, -1, -1});
    }

    Lts compile(const csp::TermPtr& t) { return explore(translate(t)); }
    Lts compileNamed(const std::string& name) { return compile(csp::call(name)); }

    // Syntactic alphabet of a term (visible events only).
    LabelSet alphabet(const csp::TermPtr& t) {
        std::set<int> visiting;
        return alphaOf(translate(t), visiting);
    }

    // Every definition translated, so dangling names surface.
    void checkAllResolved() {
        for (const auto& [n, _] : env_.procs()) defId(n);
        for (std::size_t d = 0; d < defs_.size(); ++d) body(static_cast<int>(d));
    }

private:
    enum class Kind { Stop, Skip, Omega, Prefix, Ext, Int, Ref, Par, Hide, Rename };
    struct Node {
        Kind kind;
        int a, b, x;
        bool operator==(const Node& o) const { return kind == o.kind && a == o.a && b == o.b && x == o.x; }
    };
    struct NodeHash {
        std::size_t operator()(const Node& n) const {
            std::size_t h = static_cast<std::size_t>(n.kind);
            for (int v : {n.a, n.b, n.x}) h = h * 1000003u ^ static_cast<std::size_t>(v + 7);
            return h;
        }
    };
    struct Def {
        std::string name;
        int body = -1;
    };

    const Env& env_;
    std::size_t maxStates_;
    std::vector<Node> nodes_;
    std::unordered_map<Node, int, NodeHash> ids_;
    std::deque<LabelSet> sets_;
    std::map<LabelSet, int> setIds_;
    std::deque<std::vector<std::pair<int, int>>> maps_;
    std::map<std::vector<std::pair<int, int>>, int> mapIds_;
    std::vector<Def> defs_;
    std::map<std::string, int> defIds_;
    std::map<int, LabelSet> alphaMemo_;
    int omega_;

    Labels& labels() const { return *env_.labels(); }

    int node(Node n) {
        auto [it, fresh] = ids_.emplace(n, static_cast<int>(nodes_.size()));
        if (fresh) nodes_.push_back(n);
        return it->second;
    }
    int setId(LabelSet s) {
        auto [it, fresh] = setIds_.emplace(s, static_cast<int>(sets_.size()));
        if (fresh) sets_.push_back(std::move(s));
        return it->second;
    }
    int mapId(std::vector<std::pair<int, int>> m) {
        std::sort(m.begin(), m.end());
        auto [it, fresh] = mapIds_.emplace(m, static_cast<int>(maps_.size()));
        if (fresh) maps_.push_back(std::move(m));
        return it->second;
    }
    int defId(const std::string& name) {
        auto it = defIds_.find(name);
        if (it != defIds_.end()) return it->second;
        if (!env_.proc(name)) throw CompileError("unresolved process '" + name + "'");
        int id = static_cast<int>(defs_.size());
        defs_.push_back({name, -1});
        defIds_[name] = id;
        return id;
    }
    int body(int d) {
        if (defs_[d].body < 0) {
            defs_[d].body = -2;  // guard against re-entry while translating
            int b = translate(*env_.proc(defs_[d].name));
            defs_[d].body = b;
        }
        return defs_[d].body;
    }

    int translate(const csp::TermPtr& t) {
        return std::visit(
            [&](const auto& x) -> int {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, csp::Stop>) return node({Kind::Stop, -1, -1, -1});
                else if constexpr (std::is_same_v<T, csp::Skip>) return node({Kind::Skip, -1, -1, -1});
                else if constexpr (std::is_same_v<T, csp::Pre>)
                    return node({Kind::Prefix, translate(x.rest), -1, labels().intern(x.event)});
                else if constexpr (std::is_same_v<T, csp::Ext>)
                    return node({Kind::Ext, translate(x.left), translate(x.right), -1});
                else if constexpr (std::is_same_v<T, csp::Int>)
                    return node({Kind::Int, translate(x.left), translate(x.right), -1});
                else if constexpr (std::is_same_v<T, csp::Call>) return node({Kind::Ref, -1, -1, defId(x.name)});
                else if constexpr (std::is_same_v<T, csp::Par>)
                    return node({Kind::Par, translate(x.left), translate(x.right), setId(env_.evalLabels(x.sync))});
                else if constexpr (std::is_same_v<T, csp::Hide>)
                    return node({Kind::Hide, translate(x.proc), -1, setId(env_.evalLabels(x.hidden))});
                else {
                    std::vector<std::pair<int, int>> m;
                    for (const auto& e : env_.evalSet(x.source)) {
                        std::string to = x.abstract ? x.target : x.target + "." + e;
                        m.push_back({labels().intern(e), labels().intern(to)});
                    }
                    return node({Kind::Rename, translate(x.proc), -1, mapId(std::move(m))});
                }
            },
            t->v);
    }

    void operands(int n, std::vector<int>& out) const {
        const Node& nd = nodes_[n];
        if (nd.kind == Kind::Ext) {
            operands(nd.a, out);
            operands(nd.b, out);
        } else if (nd.kind != Kind::Stop) {
            out.push_back(n);
        }
    }

    // External choice up to associativity, commutativity, idempotence and STOP as unit.
    int choice(int a, int b) {
        std::vector<int> ops;
        operands(a, ops);
        operands(b, ops);
        std::sort(ops.begin(), ops.end());
        ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
        if (ops.empty()) return node({Kind::Stop, -1, -1, -1});
        int acc = ops[0];
        for (std::size_t i = 1; i < ops.size(); ++i) acc = node({Kind::Ext, acc, ops[i], -1});
        return acc;
    }

    using Moves = std::vector<std::pair<int, int>>;

    Moves moves(int n, std::set<int>& active) {
        Node nd = nodes_[n];
        Moves out;
        switch (nd.kind) {
            case Kind::Stop:
            case Kind::Omega:
                break;
            case Kind::Skip:
                out.push_back({kTick, omega_});
                break;
            case Kind::Prefix:
                out.push_back({nd.x, nd.a});
                break;
            case Kind::Int:
                out.push_back({kTau, nd.a});
                out.push_back({kTau, nd.b});
                break;
            case Kind::Ext:
                for (auto [l, t] : moves(nd.a, active))
                    out.push_back(l == kTau ? std::pair{kTau, choice(t, nd.b)} : std::pair{l, t});
                for (auto [l, t] : moves(nd.b, active))
                    out.push_back(l == kTau ? std::pair{kTau, choice(nd.a, t)} : std::pair{l, t});
                break;
            case Kind::Ref: {
                if (active.count(nd.x)) {
                    out.push_back({kTau, n});  // unguarded recursion
                    break;
                }
                active.insert(nd.x);
                out = moves(body(nd.x), active);
                active.erase(nd.x);
                break;
            }
            case Kind::Par: {
                const LabelSet& s = sets_[nd.x];
                Moves l = moves(nd.a, active), r = moves(nd.b, active);
                for (auto [lab, t] : l)
                    if (lab == kTau || (lab != kTick && !member(s, lab)))
                        out.push_back({lab, node({Kind::Par, t, nd.b, nd.x})});
                for (auto [lab, t] : r)
                    if (lab == kTau || (lab != kTick && !member(s, lab)))
                        out.push_back({lab, node({Kind::Par, nd.a, t, nd.x})});
                for (auto [la, ta] : l) {
                    if (la == kTau || (la != kTick && !member(s, la))) continue;
                    for (auto [lb, tb] : r)
                        if (lb == la) out.push_back({la, la == kTick ? omega_ : node({Kind::Par, ta, tb, nd.x})});
                }
                break;
            }
            case Kind::Hide: {
                const LabelSet& h = sets_[nd.x];
                for (auto [lab, t] : moves(nd.a, active)) {
                    if (lab == kTick) out.push_back({kTick, omega_});
                    else out.push_back({member(h, lab) ? kTau : lab, node({Kind::Hide, t, -1, nd.x})});
                }
                break;
            }
            case Kind::Rename: {
                const auto& m = maps_[nd.x];
                for (auto [lab, t] : moves(nd.a, active)) {
                    if (lab == kTick) {
                        out.push_back({kTick, omega_});
                        continue;
                    }
                    if (lab == kTau) {
                        out.push_back({kTau, node({Kind::Rename, t, -1, nd.x})});
                        continue;
                    }
                    auto it = std::lower_bound(m.begin(), m.end(), std::pair{lab, -1});
                    bool mapped = false;
                    for (; it != m.end() && it->first == lab; ++it) {
                        out.push_back({it->second, node({Kind::Rename, t, -1, nd.x})});
                        mapped = true;
                    }
                    if (!mapped) out.push_back({lab, node({Kind::Rename, t, -1, nd.x})});
                }
                break;
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    Lts explore(int root) {
        Lts l;
        l.labels = env_.labels();
        std::unordered_map<int, int> state;
        std::deque<int> work{root};
        state[root] = 0;
        l.trans.emplace_back();
        while (!work.empty()) {
            int n = work.front();
            work.pop_front();
            std::set<int> active;
            Moves ms = moves(n, active);
            int from = state[n];
            for (auto [lab, t] : ms) {
                auto [it, fresh] = state.emplace(t, static_cast<int>(l.trans.size()));
                if (fresh) {
                    if (l.trans.size() >= maxStates_)
                        throw ResourceError("state limit of " + std::to_string(maxStates_) + " exceeded");
                    l.trans.emplace_back();
                    work.push_back(t);
                }
                l.trans[from].push_back({lab, it->second});
            }
        }
        return l;
    }

    LabelSet alphaOf(int n, std::set<int>& visiting) {
        Node nd = nodes_[n];
        auto unite = [](LabelSet a, const LabelSet& b) {
            a.insert(a.end(), b.begin(), b.end());
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
            return a;
        };
        switch (nd.kind) {
            case Kind::Stop:
            case Kind::Skip:
            case Kind::Omega:
                return {};
            case Kind::Prefix:
                return unite(alphaOf(nd.a, visiting), {nd.x});
            case Kind::Ext:
            case Kind::Int:
                return unite(alphaOf(nd.a, visiting), alphaOf(nd.b, visiting));
            case Kind::Ref: {
                if (auto it = alphaMemo_.find(nd.x); it != alphaMemo_.end()) return it->second;
                if (visiting.count(nd.x)) return {};
                visiting.insert(nd.x);
                LabelSet r = alphaOf(body(nd.x), visiting);
                visiting.erase(nd.x);
                if (visiting.empty()) alphaMemo_[nd.x] = r;
                return r;
            }
            case Kind::Par:
                return unite(unite(alphaOf(nd.a, visiting), alphaOf(nd.b, visiting)), sets_[nd.x]);
            case Kind::Hide: {
                LabelSet a = alphaOf(nd.a, visiting), out;
                for (int x : a)
                    if (!member(sets_[nd.x], x)) out.push_back(x);
                return out;
            }
            default: {
                LabelSet out;
                const auto& m = maps_[nd.x];
                for (int x : alphaOf(nd.a, visiting)) {
                    auto it = std::lower_bound(m.begin(), m.end(), std::pair{x, -1});
                    bool mapped = false;
                    for (; it != m.end() && it->first == x; ++it) {
                        out.push_back(it->second);
                        mapped = true;
                    }
                    if (!mapped) out.push_back(x);
                }
                std::sort(out.begin(), out.end());
                out.erase(std::unique(out.begin(), out.end()), out.end());
                return out;
            }
        }
    }
};

// Normalized failures-divergences model: nodes are tau-closed state sets of an Lts.
class FdModel {
public:
    explicit FdModel(const Lts& l, std::size_t maxNodes = kDefaultMaxStates)
        : lts_(l), div_(l.divergent()), maxNodes_(maxNodes) {
        root_ = intern(closure({l.initial}));
    }

    int root() const { return root_; }
    bool divergent(int n) const { return nodes_[n].divergent; }
    const std::vector<LabelSet>& acceptances(int n) const { return nodes_[n].acceptances; }
    std::size_t size() const { return nodes_.size(); }
    const Labels& labels() const { return *lts_.labels; }

    // -1 when the label is impossible.
    int after(int n, int label) {
        auto& cache = nodes_[n].next;
        if (auto it = cache.find(label); it != cache.end()) return it->second;
        std::vector<int> succ;
        for (int s : nodes_[n].states)
            for (auto [l, t] : lts_.trans[s])
                if (l == label) succ.push_back(t);
        int r = succ.empty() ? -1 : intern(closure(succ));
        nodes_[n].next[label] = r;
        return r;
    }

    // Queries over traces given as label names ("tick" for termination).
    bool isTrace(const std::vector<std::string>& t) { return walk(t).has_value(); }
    bool isDivergence(const std::vector<std::string>& t) {
        int n = root_;
        for (const auto& e : t) {
            if (divergent(n)) return true;
            auto id = labels().find(e);
            if (!id) return false;
            n = after(n, *id);
            if (n < 0) return false;
        }
        return divergent(n);
    }
    bool isFailure(const std::vector<std::string>& t, const std::vector<std::string>& refusal) {
        int n = root_;
        for (const auto& e : t) {
            if (divergent(n)) return true;
            auto id = labels().find(e);
            if (!id) return false;
            n = after(n, *id);
            if (n < 0) return false;
        }
        if (divergent(n)) return true;
        for (const auto& acc : acceptances(n)) {
            bool disjoint = true;
            for (const auto& r : refusal) {
                auto id = labels().find(r);
                if (id && member(acc, *id)) disjoint = false;
            }
            if (disjoint) return true;
        }
        return false;
    }

private:
    struct NNode {
        std::vector<int> states;
        bool divergent = false;
        std::vector<LabelSet> acceptances;  // minimal ready sets of stable members
        std::map<int, int> next;
    };
    const Lts& lts_;
    std::vector<bool> div_;
    std::size_t maxNodes_;
    std::vector<NNode> nodes_;
    std::map<std::vector<int>, int> ids_;
    int root_ = 0;

    std::vector<int> closure(std::vector<int> seed) const {
        std::set<int> seen(seed.begin(), seed.end());
        while (!seed.empty()) {
            int s = seed.back();
            seed.pop_back();
            for (auto [l, t] : lts_.trans[s])
                if (l == kTau && seen.insert(t).second) seed.push_back(t);
        }
        return {seen.begin(), seen.end()};
    }

    int intern(std::vector<int> states) {
        auto it = ids_.find(states);
        if (it != ids_.end()) return it->second;
        if (nodes_.size() >= maxNodes_) throw ResourceError("normalization exceeded " + std::to_string(maxNodes_) + " nodes");
        NNode nn;
        nn.states = states;
        std::vector<LabelSet> acc;
        for (int s : states) {
            if (div_[s]) nn.divergent = true;
            if (lts_.stable(s)) acc.push_back(lts_.ready(s));
        }
        std::sort(acc.begin(), acc.end());
        acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
        for (std::size_t i = 0; i < acc.size(); ++i) {
            bool minimal = true;
            for (std::size_t j = 0; j < acc.size() && minimal; ++j)
                if (i != j && std::includes(acc[i].begin(), acc[i].end(), acc[j].begin(), acc[j].end()) &&
                    acc[i] != acc[j])
                    minimal = false;
            if (minimal) nn.acceptances.push_back(acc[i]);
        }
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back(std::move(nn));
        ids_[states] = id;
        return id;
    }

    std::optional<int> walk(const std::vector<std::string>& t) {
        int n = root_;
        for (const auto& e : t) {
            if (divergent(n)) return n;
            auto id = labels().find(e);
            if (!id) return std::nullopt;
            n = after(n, *id);
            if (n < 0) return std::nullopt;
        }
        return n;
    }
};

inline FdModel normalizeFd(const Lts& l) { return FdModel(l); }

enum class Violation { Failure, Divergence };

struct Counterexample {
    std::vector<std::string> trace;
    Violation kind = Violation::Failure;
    std::string detail;
};

struct RefinementVerdict {
    bool holds = false;
    std::optional<Counterexample> counterexample;
    std::string error;  // set when the check could not run
    std::size_t productStates = 0;
    std::size_t specStates = 0;
    std::size_t implStates = 0;
};

inline std::string showSet(const Labels& labels, const LabelSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + labels.name(s[i]);
    return out + "}";
}

inline RefinementVerdict checkRefinementFD(FdModel& spec, const Lts& impl, std::size_t maxStates = kDefaultMaxStates) {
    RefinementVerdict v;
    v.implStates = impl.size();
    auto implDiv = impl.divergent();
    const Labels& labels = *impl.labels;

    struct Pair {
        int n, s, parent, label;
    };
    std::vector<Pair> pairs;
    std::map<std::pair<int, int>, int> seen;
    std::deque<int> work;
    auto push = [&](int n, int s, int parent, int label) {
        if (!seen.emplace(std::pair{n, s}, static_cast<int>(pairs.size())).second) return;
        if (pairs.size() >= maxStates) throw ResourceError("product exceeded " + std::to_string(maxStates) + " states");
        pairs.push_back({n, s, parent, label});
        work.push_back(static_cast<int>(pairs.size()) - 1);
    };
    auto traceTo = [&](int idx) {
        std::vector<std::string> t;
        for (int i = idx; pairs[i].parent >= 0; i = pairs[i].parent)
            if (pairs[i].label != kTau) t.push_back(labels.name(pairs[i].label));
        std::reverse(t.begin(), t.end());
        return t;
    };
    auto fail = [&](int idx, Violation k, std::string detail, std::optional<int> extra = std::nullopt) {
        Counterexample c{traceTo(idx), k, std::move(detail)};
        if (extra) c.trace.push_back(labels.name(*extra));
        v.holds = false;
        v.counterexample = std::move(c);
        v.productStates = pairs.size();
        v.specStates = spec.size();
        return v;
    };

    push(spec.root(), impl.initial, -1, kTau);
    while (!work.empty()) {
        int idx = work.front();
        work.pop_front();
        auto [n, s, parent, label] = pairs[idx];
        if (spec.divergent(n)) continue;
        if (implDiv[s]) return fail(idx, Violation::Divergence, "diverges");
        if (impl.stable(s)) {
            LabelSet ready = impl.ready(s);
            bool ok = false;
            for (const auto& acc : spec.acceptances(n))
                if (std::includes(ready.begin(), ready.end(), acc.begin(), acc.end())) ok = true;
            if (!ok) {
                LabelSet refused;
                for (std::size_t l = 1; l < labels.size(); ++l)
                    if (!member(ready, static_cast<int>(l))) refused.push_back(static_cast<int>(l));
                return fail(idx, Violation::Failure, "refuses " + showSet(labels, refused));
            }
        }
        for (auto [l, t] : impl.trans[s]) {
            if (l == kTau) {
                push(n, t, idx, kTau);
                continue;
            }
            int m = spec.after(n, l);
            if (m < 0) return fail(idx, Violation::Failure, "performs " + labels.name(l) + " which the specification cannot", l);
            push(m, t, idx, l);
        }
    }
    v.holds = true;
    v.productStates = pairs.size();
    v.specStates = spec.size();
    return v;
}

struct Discharged {
    Assertion assertion;
    RefinementVerdict verdict;
};

// Checks one "assert spec [FD= impl" against the definitions in env.
inline RefinementVerdict checkAssertion(const Env& env, const Assertion& a, std::size_t maxStates = kDefaultMaxStates) {
    RefinementVerdict v;
    try {
        Compiler c(env, maxStates);
        csp::TermPtr specT = csp::call(a.spec), implT = csp::call(a.impl);
        LabelSet as = c.alphabet(specT), ai = c.alphabet(implT);
        if (as != ai) {
            LabelSet extra;
            std::set_difference(as.begin(), as.end(), ai.begin(), ai.end(), std::back_inserter(extra));
            bool subset = std::includes(as.begin(), as.end(), ai.begin(), ai.end());
            if (a.kind == AssertKind::DeadlockFree && subset) {
                // Augment the implementation with the events it never performs.
                std::vector<std::string> names;
                for (int x : extra) names.push_back(env.labels()->name(x));
                implT = csp::par(implT, csp::lit(names), csp::skip());
            } else {
                throw AlphabetMismatch("alphabets differ: " + showSet(*env.labels(), as) + " vs " +
                                       showSet(*env.labels(), ai));
            }
        }
        Lts specL = c.compile(specT);
        Lts implL = c.compile(implT);
        FdModel model(specL, maxStates);
        v = checkRefinementFD(model, implL, maxStates);
        v.specStates = specL.size();
    } catch (const std::exception& e) {
        v.holds = false;
        v.error = e.what();
    }
    return v;
}

inline std::vector<Discharged> dischargeAssertions(const EmitPlan& plan, std::size_t maxStates = kDefaultMaxStates) {
    Env env = Env::fromModule(plan.module);
    std::vector<Discharged> out;
    for (const auto& a : plan.assertions) out.push_back({a, checkAssertion(env, a, maxStates)});
    return out;
}

inline std::string describe(const RefinementVerdict& v) {
    if (!v.error.empty()) return "error: " + v.error;
    if (v.holds || !v.counterexample) return "";
    std::string t = "<";
    for (std::size_t i = 0; i < v.counterexample->trace.size(); ++i)
        t += (i ? ", " : "") + v.counterexample->trace[i];
    t += ">";
    return std::string(v.counterexample->kind == Violation::Divergence ? "divergence" : "failure") + " after " + t +
           ": " + v.counterexample->detail;
}

}  // namespace wright::engine
