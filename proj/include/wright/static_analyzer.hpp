#pragma once

#include <array>
#include <list>

#include "model.hpp"

namespace wright {

enum class Nature { Component, Connector, Port, Role, Instance, Configuration, Style };

struct SymbolEntry {
    Identifier name;
    Nature nature;
    const SymbolEntry* link = nullptr;
    SourcePos pos;
};

// Chained hash table; entries never move once inserted.
class SymbolTable {
public:
    explicit SymbolTable(std::size_t size = 211) : buckets_(size) {}

    std::size_t hash(const std::string& s) const {
        std::size_t j = 0;
        for (unsigned char c : s) j = (j * 256 + c) % buckets_.size();
        return j;
    }

    const SymbolEntry* insert(SymbolEntry e) {
        auto& b = buckets_[hash(e.name.str())];
        b.push_front(std::move(e));
        return &b.front();
    }

    const SymbolEntry* lookup(const Identifier& n) const {
        for (const auto& e : buckets_[hash(n.str())])
            if (e.name == n) return &e;
        return nullptr;
    }

    std::size_t bucketSize(std::size_t i) const { return std::distance(buckets_[i].begin(), buckets_[i].end()); }
    std::size_t size() const { return buckets_.size(); }

private:
    std::vector<std::list<SymbolEntry>> buckets_;
};

struct AnalyzerOptions {
    bool strictAttachments = false;
    std::size_t tableSize = 211;
};

namespace msg {
inline constexpr const char* kRedundant = "Identificateur Redondant";
inline constexpr const char* kUndeclaredType = "Type non Declarer";
inline constexpr const char* kUndeclaredIdent = "Identificateur non declarer";
inline constexpr const char* kNotInstance = "La premiere partie doit etre une Instance";
inline constexpr const char* kNotPoint = "La deusieme partie doit etre soit un Port soit un Role";
inline constexpr const char* kWrongType = "L'Instance et l'Interface non pas le meme Type";
inline constexpr const char* kShape = "***Attachement: Composant.Port as Connecteur.Role***";
inline constexpr const char* kPortTwice = "Port deja relier";
inline constexpr const char* kRoleTwice = "Role deja relier";
inline constexpr const char* kPortFree = "Port non relier";
inline constexpr const char* kRoleFree = "Role non relier";
}  // namespace msg

inline std::vector<Diagnostic> analyze(const ArchSpec& spec, const AnalyzerOptions& opt = {}) {
    std::vector<Diagnostic> out;
    SymbolTable table(opt.tableSize);
    auto err = [&](int rule, SourcePos pos, std::string m, Severity sev = Severity::Error) {
        out.push_back({sev, pos, rule, std::move(m)});
    };

    // Rule 1. The enclosing Style/Configuration name is its own scope.
    auto declare = [&](const Identifier& n, Nature nature, const SymbolEntry* link, SourcePos pos) {
        if (table.lookup(n)) err(1, pos, std::string(msg::kRedundant) + " '" + n.str() + "'");
        return table.insert({n, nature, link, pos});
    };
    std::map<std::string, const SymbolEntry*> typeEntries;
    for (const auto& t : spec.types()) {
        if (auto c = std::get_if<Component>(&t)) {
            auto e = declare(c->name, Nature::Component, nullptr, c->pos);
            typeEntries.emplace(c->name.str(), e);
            for (const auto& p : c->ports) declare(p.name, Nature::Port, e, p.pos);
        } else {
            const auto& k = std::get<Connector>(t);
            auto e = declare(k.name, Nature::Connector, nullptr, k.pos);
            typeEntries.emplace(k.name.str(), e);
            for (const auto& r : k.roles) declare(r.name, Nature::Role, e, r.pos);
        }
    }
    auto cfg = std::get_if<Configuration>(&spec.root);
    if (!cfg) return out;

    for (const auto& i : cfg->instances) declare(i.name, Nature::Instance, nullptr, i.pos);

    // Rule 2.
    std::map<std::string, const SymbolEntry*> instType;
    for (const auto& i : cfg->instances) {
        auto t = table.lookup(i.type);
        if (!t || (t->nature != Nature::Component && t->nature != Nature::Connector)) {
            err(2, i.pos, std::string(msg::kUndeclaredType) + " '" + i.type.str() + "'");
            continue;
        }
        instType.emplace(i.name.str(), t);
    }

    // Rules 3 and 4 per interface; both sides must pass before rule 5.
    struct Resolved {
        const SymbolEntry* type = nullptr;
        const SymbolEntry* point = nullptr;
    };
    auto resolveInstance = [&](const InterfaceRef& r) -> bool {
        auto e = table.lookup(r.instance);
        if (!e) {
            err(3, r.pos, std::string(msg::kUndeclaredIdent) + " '" + r.instance.str() + "'");
            return false;
        }
        if (e->nature != Nature::Instance) {
            err(3, r.pos, std::string(msg::kNotInstance) + " '" + r.instance.str() + "'");
            return false;
        }
        return true;
    };
    std::vector<std::array<bool, 2>> instOk;
    for (const auto& a : cfg->attachments) instOk.push_back({resolveInstance(a.left), resolveInstance(a.right)});

    std::vector<std::optional<std::array<Resolved, 2>>> resolved;
    for (std::size_t k = 0; k < cfg->attachments.size(); ++k) {
        const auto& a = cfg->attachments[k];
        std::array<Resolved, 2> rs;
        bool ok = instOk[k][0] && instOk[k][1];
        int side = 0;
        for (const InterfaceRef* r : {&a.left, &a.right}) {
            if (!instOk[k][side]) {
                ++side;
                continue;
            }
            auto it = instType.find(r->instance.str());
            auto p = table.lookup(r->point);
            if (!p || (p->nature != Nature::Port && p->nature != Nature::Role)) {
                err(4, r->pos, std::string(msg::kNotPoint) + " '" + r->instance.str() + "." + r->point.str() + "'");
                ok = false;
            } else if (it == instType.end()) {
                ok = false;  // already reported under rule 2
            } else if (p->link != it->second) {
                err(4, r->pos, std::string(msg::kWrongType) + " '" + r->instance.str() + "." + r->point.str() + "'");
                ok = false;
            } else {
                rs[side] = {it->second, p};
            }
            ++side;
        }
        resolved.push_back(ok ? std::optional(rs) : std::nullopt);
    }

    // Rule 5.
    std::vector<bool> shaped(cfg->attachments.size(), false);
    for (std::size_t k = 0; k < cfg->attachments.size(); ++k) {
        if (!resolved[k]) continue;
        const auto& rs = *resolved[k];
        bool good = rs[0].type->nature == Nature::Component && rs[0].point->nature == Nature::Port &&
                    rs[1].type->nature == Nature::Connector && rs[1].point->nature == Nature::Role;
        if (!good) err(5, cfg->attachments[k].pos, msg::kShape);
        shaped[k] = good;
    }

    // Rule 6.
    std::set<std::pair<std::string, std::string>> ports, roles;
    for (std::size_t k = 0; k < cfg->attachments.size(); ++k) {
        if (!shaped[k]) continue;
        const auto& a = cfg->attachments[k];
        if (!ports.insert({a.left.instance.str(), a.left.point.str()}).second)
            err(6, a.left.pos, std::string(msg::kPortTwice) + " '" + a.left.instance.str() + "." + a.left.point.str() + "'");
        if (!roles.insert({a.right.instance.str(), a.right.point.str()}).second)
            err(6, a.right.pos,
                std::string(msg::kRoleTwice) + " '" + a.right.instance.str() + "." + a.right.point.str() + "'");
    }
    Severity freeSev = opt.strictAttachments ? Severity::Error : Severity::Warning;
    for (const auto& i : cfg->instances) {
        auto t = spec.findType(i.type);
        if (!t || table.lookup(i.name) == nullptr) continue;
        if (auto c = std::get_if<Component>(t)) {
            for (const auto& p : c->ports)
                if (!ports.count({i.name.str(), p.name.str()}))
                    err(6, i.pos, std::string(msg::kPortFree) + " '" + i.name.str() + "." + p.name.str() + "'", freeSev);
        } else {
            for (const auto& r : std::get<Connector>(*t).roles)
                if (!roles.count({i.name.str(), r.name.str()}))
                    err(6, i.pos, std::string(msg::kRoleFree) + " '" + i.name.str() + "." + r.name.str() + "'", freeSev);
        }
    }
    return out;
}

}  // namespace wright
