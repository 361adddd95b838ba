#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace wright::csp {

struct SetExpr;
using SetPtr = std::shared_ptr<const SetExpr>;

struct SetLit {
    std::vector<std::string> items;
    bool productions = false;  // {| ... |}
};
struct SetName {
    std::string name;
};
struct SetDiff {
    SetPtr a, b;
};
struct SetUnion {
    SetPtr a, b;
};
struct SetExpr {
    std::variant<SetLit, SetName, SetDiff, SetUnion> v;
};

inline SetPtr lit(std::vector<std::string> items, bool productions = false) {
    return std::make_shared<const SetExpr>(SetExpr{SetLit{std::move(items), productions}});
}
inline SetPtr setName(std::string n) { return std::make_shared<const SetExpr>(SetExpr{SetName{std::move(n)}}); }
inline SetPtr diff(SetPtr a, SetPtr b) { return std::make_shared<const SetExpr>(SetExpr{SetDiff{std::move(a), std::move(b)}}); }
inline SetPtr unite(SetPtr a, SetPtr b) { return std::make_shared<const SetExpr>(SetExpr{SetUnion{std::move(a), std::move(b)}}); }

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Stop {};
struct Skip {};
struct Pre {
    std::string event;
    TermPtr rest;
};
struct Ext {
    TermPtr left, right;
};
struct Int {
    TermPtr left, right;
};
struct Call {
    std::string name;
};
struct Par {
    TermPtr left;
    SetPtr sync;
    TermPtr right;
};
struct Hide {
    TermPtr proc;
    SetPtr hidden;
};
// [[ x <- target | x <- source ]] when abstract, else [[ x <- target.x | x <- source ]].
struct Rename {
    TermPtr proc;
    std::string target;
    SetPtr source;
    bool abstract = false;
};

struct Term {
    std::variant<Stop, Skip, Pre, Ext, Int, Call, Par, Hide, Rename> v;
};

inline TermPtr term(decltype(Term::v) v) { return std::make_shared<const Term>(Term{std::move(v)}); }
inline TermPtr stop() { return term(Stop{}); }
inline TermPtr skip() { return term(Skip{}); }
inline TermPtr pre(std::string e, TermPtr r) { return term(Pre{std::move(e), std::move(r)}); }
inline TermPtr ext(TermPtr l, TermPtr r) { return term(Ext{std::move(l), std::move(r)}); }
inline TermPtr intc(TermPtr l, TermPtr r) { return term(Int{std::move(l), std::move(r)}); }
inline TermPtr call(std::string n) { return term(Call{std::move(n)}); }
inline TermPtr par(TermPtr l, SetPtr s, TermPtr r) { return term(Par{std::move(l), std::move(s), std::move(r)}); }
inline TermPtr hide(TermPtr p, SetPtr s) { return term(Hide{std::move(p), std::move(s)}); }
inline TermPtr renamePrefix(TermPtr p, std::string channel, SetPtr src) {
    return term(Rename{std::move(p), std::move(channel), std::move(src), false});
}
inline TermPtr abstractTo(TermPtr p, std::string target, SetPtr src) {
    return term(Rename{std::move(p), std::move(target), std::move(src), true});
}

// Fully parenthesized rendering of sequential terms.
inline std::string render(const TermPtr& t) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Stop>) return "STOP";
            else if constexpr (std::is_same_v<T, Skip>) return "SKIP";
            else if constexpr (std::is_same_v<T, Pre>) return "(" + x.event + " -> " + render(x.rest) + ")";
            else if constexpr (std::is_same_v<T, Ext>) return "(" + render(x.left) + " [] " + render(x.right) + ")";
            else if constexpr (std::is_same_v<T, Int>) return "(" + render(x.left) + " |~| " + render(x.right) + ")";
            else if constexpr (std::is_same_v<T, Call>) return x.name;
            else return "<composite>";
        },
        t->v);
}

enum class ItemKind { Text, Channel, SetDef, ProcDef, Assert };

struct Item {
    ItemKind kind = ItemKind::Text;
    std::string text;  // exact emitted lines, newline-terminated
    std::string name;
    std::vector<std::string> declared;  // Channel: the events it introduces
    SetPtr set;
    TermPtr proc;
    std::string spec, impl;  // Assert
};

struct Module {
    std::vector<Item> items;

    std::string text() const {
        std::string out;
        for (const auto& i : items) out += i.text;
        return out;
    }
};

}  // namespace wright::csp
