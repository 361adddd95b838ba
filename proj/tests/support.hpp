#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wright/wright.hpp"

namespace ts {

using Trace = std::vector<std::string>;
using TraceSet = std::set<Trace>;

inline std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture(const std::string& name) { return readFile(std::string(FIXTURES) + "/" + name); }
inline std::string golden(const std::string& name) { return readFile(std::string(GOLDEN) + "/" + name); }

inline wright::Translation translateFixture(const std::string& name, const wright::AnalyzerOptions& opt = {}) {
    return wright::translate(fixture(name), opt);
}

// ---- golden normalization ----

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Sorts comma-separated items inside every innermost brace pair and removes whitespace.
inline std::string canonUnit(std::string u) {
    u = std::regex_replace(u, std::regex(R"(\{\s*\|)"), "{|");
    u = std::regex_replace(u, std::regex(R"(\|\s*\})"), "|}");
    std::string flat;
    for (char c : u)
        if (!std::isspace(static_cast<unsigned char>(c))) flat += c;
    std::string out;
    std::size_t i = 0;
    while (i < flat.size()) {
        if (flat[i] != '{') {
            out += flat[i++];
            continue;
        }
        auto close = flat.find('}', i);
        auto nested = flat.find('{', i + 1);
        if (close == std::string::npos || (nested != std::string::npos && nested < close)) {
            out += flat[i++];
            continue;
        }
        std::string inner = flat.substr(i + 1, close - i - 1);
        bool prod = inner.size() >= 2 && inner.front() == '|' && inner.back() == '|';
        if (prod) inner = inner.substr(1, inner.size() - 2);
        std::vector<std::string> items;
        std::stringstream ss(inner);
        std::string it;
        while (std::getline(ss, it, ','))
            if (!it.empty()) items.push_back(it);
        std::sort(items.begin(), items.end());
        out += prod ? "{|" : "{";
        for (std::size_t k = 0; k < items.size(); ++k) out += (k ? "," : "") + items[k];
        out += prod ? "|}" : "}";
        i = close + 1;
    }
    if (out.rfind("channel", 0) == 0 && out.find(':') == std::string::npos) {
        std::vector<std::string> items;
        std::stringstream ss(out.substr(7));
        std::string it;
        while (std::getline(ss, it, ',')) items.push_back(it);
        std::sort(items.begin(), items.end());
        out = "channel";
        for (std::size_t k = 0; k < items.size(); ++k) out += (k ? "," : " ") + items[k];
    }
    return out;
}

// Splits text into statements; comment, blank and elision lines are dropped, continuation lines joined.
inline std::vector<std::string> units(const std::string& text) {
    static const std::regex start(R"(^(assert\s|channel\s|[A-Za-z_][A-Za-z0-9_]*\s*(\(.*\))?\s*=))");
    std::vector<std::string> raw;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::string t = trim(line);
        if (t.empty() || t.rfind("--", 0) == 0 || t.rfind("```", 0) == 0 || t.find_first_not_of('.') == std::string::npos)
            continue;
        if (raw.empty() || std::regex_search(t, start)) raw.push_back(t);
        else raw.back() += " " + t;
    }
    std::vector<std::string> out;
    for (auto& r : raw) out.push_back(canonUnit(r));
    return out;
}

inline std::string unitName(const std::string& u) {
    auto eq = u.find('=');
    return eq == std::string::npos ? u : u.substr(0, eq);
}

// Units from the first whose name is `from` through the first later one starting with `to`.
inline std::vector<std::string> slice(const std::vector<std::string>& us, const std::string& from, const std::string& to) {
    std::vector<std::string> out;
    bool on = false;
    for (const auto& u : us) {
        if (!on && unitName(u) == from) on = true;
        if (on) out.push_back(u);
        if (on && u.rfind(to, 0) == 0) break;
    }
    return out;
}

inline bool isSubsequence(const std::vector<std::string>& needle, const std::vector<std::string>& hay) {
    std::size_t j = 0;
    for (const auto& h : hay)
        if (j < needle.size() && h == needle[j]) ++j;
    return j == needle.size();
}

// ALPHA_x = {...} equations of a text, as name -> member set.
inline std::map<std::string, std::set<std::string>> alphaSets(const std::string& text) {
    std::map<std::string, std::set<std::string>> out;
    static const std::regex re(R"(^(ALPHA_[A-Za-z0-9_]+)=\{\|?([^{}|]*)\|?\}$)");
    for (const auto& u : units(text)) {
        std::smatch m;
        if (!std::regex_match(u, m, re)) continue;
        std::set<std::string> items;
        std::stringstream ss(m[2].str());
        std::string it;
        while (std::getline(ss, it, ','))
            if (!it.empty()) items.insert(it);
        out[m[1].str()] = items;
    }
    return out;
}

// ---- process terms ----

using Defs = std::map<wright::Identifier, wright::ProcPtr>;

inline Defs defsOf(const wright::Declaration& d) {
    Defs m{{d.name, d.body}};
    for (const auto& l : d.locals) m[l.name] = l.body;
    return m;
}

// Trace set of a definition system up to `depth` visible events; hidden prefixes act as silent moves.
// Empty and unresolved references have no moves; Success performs tick and stops.
inline TraceSet astTraces(const Defs& defs, const wright::Identifier& root, int depth, const wright::EventSet& hidden = {}) {
    using wright::Process;
    const Process* done = nullptr;
    auto closure = [&](std::vector<const Process*> seed) {
        std::set<const Process*> seen;
        std::vector<const Process*> out;
        while (!seed.empty()) {
            const Process* p = seed.back();
            seed.pop_back();
            if (!p || !seen.insert(p).second) continue;
            out.push_back(p);
            if (p->is<wright::ExternalChoice>()) {
                seed.push_back(p->as<wright::ExternalChoice>().left.get());
                seed.push_back(p->as<wright::ExternalChoice>().right.get());
            } else if (p->is<wright::InternalChoice>()) {
                seed.push_back(p->as<wright::InternalChoice>().left.get());
                seed.push_back(p->as<wright::InternalChoice>().right.get());
            } else if (p->is<wright::Ref>()) {
                auto it = defs.find(p->as<wright::Ref>().name);
                if (it != defs.end()) seed.push_back(it->second.get());
            } else if (p->is<wright::Prefix>() && hidden.contains(p->as<wright::Prefix>().event)) {
                seed.push_back(p->as<wright::Prefix>().rest.get());
            }
        }
        return out;
    };
    TraceSet out;
    std::function<void(const std::vector<const Process*>&, Trace&, int)> walk = [&](const auto& states, Trace& t,
                                                                                    int left) {
        out.insert(t);
        if (left == 0) return;
        std::map<std::string, std::vector<const Process*>> next;
        for (const Process* p : states) {
            if (!p) continue;
            if (p->is<wright::Prefix>() && !hidden.contains(p->as<wright::Prefix>().event))
                next[p->as<wright::Prefix>().event.key()].push_back(p->as<wright::Prefix>().rest.get());
            else if (p->is<wright::Success>())
                next["tick"].push_back(done);
        }
        for (auto& [label, succ] : next) {
            t.push_back(label);
            walk(closure(succ), t, label == "tick" ? 0 : left - 1);
            t.pop_back();
        }
    };
    Trace t;
    auto it = defs.find(root);
    if (it != defs.end()) walk(closure({it->second.get()}), t, depth);
    else out.insert(t);
    return out;
}

inline TraceSet ltsTraces(const wright::engine::Lts& l, int depth) {
    auto closure = [&](std::vector<int> seed) {
        std::set<int> seen(seed.begin(), seed.end());
        while (!seed.empty()) {
            int s = seed.back();
            seed.pop_back();
            for (auto [lab, t] : l.trans[s])
                if (lab == wright::engine::kTau && seen.insert(t).second) seed.push_back(t);
        }
        return seen;
    };
    TraceSet out;
    std::function<void(const std::set<int>&, Trace&, int)> walk = [&](const std::set<int>& states, Trace& t, int left) {
        out.insert(t);
        if (left == 0) return;
        std::map<int, std::vector<int>> next;
        for (int s : states)
            for (auto [lab, u] : l.trans[s])
                if (lab != wright::engine::kTau) next[lab].push_back(u);
        for (auto& [lab, succ] : next) {
            t.push_back(l.labels->name(lab));
            walk(closure(succ), t, left - 1);
            t.pop_back();
        }
    };
    Trace t;
    walk(closure({l.initial}), t, depth);
    return out;
}

// Trace-level projection: the elements of t that are in keep, in order.
inline Trace restrictTrace(const Trace& t, const std::set<std::string>& keep) {
    Trace r;
    for (const auto& e : t)
        if (keep.count(e)) r.push_back(e);
    return r;
}

inline wright::csp::TermPtr toTerm(const wright::ProcPtr& p, const std::function<std::string(const wright::Identifier&)>& nameOf) {
    namespace csp = wright::csp;
    return std::visit(
        [&](const auto& x) -> csp::TermPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, wright::Prefix>) return csp::pre(x.event.key(), toTerm(x.rest, nameOf));
            else if constexpr (std::is_same_v<T, wright::ExternalChoice>)
                return csp::ext(toTerm(x.left, nameOf), toTerm(x.right, nameOf));
            else if constexpr (std::is_same_v<T, wright::InternalChoice>)
                return csp::intc(toTerm(x.left, nameOf), toTerm(x.right, nameOf));
            else if constexpr (std::is_same_v<T, wright::Ref>) return csp::call(nameOf(x.name));
            else if constexpr (std::is_same_v<T, wright::Success>) return csp::skip();
            else return csp::stop();
        },
        p->node);
}

inline wright::engine::Lts compileDefs(const Defs& defs, const wright::Identifier& root) {
    using namespace wright::engine;
    Env env;
    auto id = [](const wright::Identifier& n) { return n.str(); };
    for (const auto& [n, b] : defs) env.defineProc(n.str(), toTerm(b, id));
    Compiler c(env);
    return c.compileNamed(root.str());
}

class TermGen {
public:
    explicit TermGen(unsigned seed) : rng_(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    // At most `ops` operators over `events`; leaves are references to `names` or TICK.
    wright::ProcPtr term(int ops, const std::vector<std::string>& events, const std::vector<std::string>& names) {
        if (ops <= 0) {
            if (names.empty() || pick(4) == 0) return wright::success();
            return wright::ref(names[pick(static_cast<int>(names.size()))]);
        }
        int k = pick(4);
        if (k <= 1) return wright::prefix(wright::EventRef::parse(events[pick(static_cast<int>(events.size()))]),
                                          term(ops - 1, events, names));
        int left = pick(ops);
        auto l = term(left, events, names);
        auto r = term(ops - 1 - left, events, names);
        return k == 2 ? wright::extChoice(l, r) : wright::intChoice(l, r);
    }

    std::mt19937& rng() { return rng_; }

private:
    std::mt19937 rng_;
};

// ---- small explicit machines and a brute-force failures/divergences oracle ----

inline wright::engine::Lts randomLts(std::mt19937& rng, std::shared_ptr<wright::engine::Labels> labels, int maxStates,
                                     const std::vector<std::string>& alphabet) {
    std::uniform_int_distribution<int> ns(1, maxStates);
    int n = ns(rng);
    std::uniform_int_distribution<int> st(0, n - 1), edges(0, 2 * n), lab(0, static_cast<int>(alphabet.size()));
    std::vector<std::tuple<int, std::string, int>> es;
    int m = edges(rng);
    for (int i = 0; i < m; ++i) {
        int li = lab(rng);
        es.emplace_back(st(rng), li == static_cast<int>(alphabet.size()) ? "tau" : alphabet[li], st(rng));
    }
    return wright::engine::makeLts(labels, n, es);
}

struct FdOracle {
    const wright::engine::Lts& l;
    std::vector<bool> div;
    explicit FdOracle(const wright::engine::Lts& lts) : l(lts), div(lts.divergent()) {}

    std::set<int> closure(std::set<int> s) const {
        std::vector<int> st(s.begin(), s.end());
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            for (auto [lab, t] : l.trans[x])
                if (lab == wright::engine::kTau && s.insert(t).second) st.push_back(t);
        }
        return s;
    }
    std::set<int> after(const std::set<int>& s, int lab) const {
        std::set<int> out;
        for (int x : s)
            for (auto [la, t] : l.trans[x])
                if (la == lab) out.insert(t);
        return closure(out);
    }
    bool divergentSet(const std::set<int>& s) const {
        return std::any_of(s.begin(), s.end(), [&](int x) { return div[x]; });
    }
};

// spec ⊑FD impl restricted to traces of length <= depth, by explicit trace enumeration.
inline bool bruteRefines(const wright::engine::Lts& spec, const wright::engine::Lts& impl, int depth) {
    FdOracle s(spec), i(impl);
    std::size_t nl = impl.labels->size();
    std::function<bool(const std::set<int>&, const std::set<int>&, int)> go = [&](const std::set<int>& ss,
                                                                                const std::set<int>& is, int left) {
        if (s.divergentSet(ss)) return true;
        if (i.divergentSet(is)) return false;
        for (int x : is) {
            if (!impl.stable(x)) continue;
            auto ready = impl.ready(x);
            bool covered = false;
            for (int y : ss)
                if (spec.stable(y)) {
                    auto r = spec.ready(y);
                    if (std::includes(ready.begin(), ready.end(), r.begin(), r.end())) covered = true;
                }
            if (!covered) return false;
        }
        if (left == 0) return true;
        for (std::size_t lab = 1; lab < nl; ++lab) {
            auto in = i.after(is, static_cast<int>(lab));
            if (in.empty()) continue;
            auto sn = s.after(ss, static_cast<int>(lab));
            if (sn.empty()) return false;
            if (!go(sn, in, left - 1)) return false;
        }
        return true;
    };
    return go(s.closure({spec.initial}), i.closure({impl.initial}), depth);
}

}  // namespace ts
