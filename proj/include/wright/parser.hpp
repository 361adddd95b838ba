#pragma once

#include <cstring>
#include <sstream>

#include "model.hpp"

namespace wright {

struct ParseError {
    SourcePos pos;
    std::string message;
    std::string text() const {
        return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": error: " + message;
    }
};

enum class Tok {
    Ident,      // possibly dotted
    InitEvent,  // leading underscore, possibly dotted
    Arrow,
    ExtChoice,
    IntChoice,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Equals,
    Comma,
    Colon,
    Tick,
    KwStyle,
    KwConfiguration,
    KwComponent,
    KwConnector,
    KwPort,
    KwRole,
    KwGlue,
    KwComputation,
    KwWhere,
    KwConstraints,  // text holds the skipped body
    KwEnd,
    KwInstances,
    KwAttachments,
    KwAs,
};

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
    bool operator==(const Token& o) const { return kind == o.kind && text == o.text; }
};

class LexError : public std::runtime_error {
public:
    LexError(SourcePos p, const std::string& m) : std::runtime_error(m), pos(p) {}
    SourcePos pos;
};

namespace detail {

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline const std::map<std::string, Tok>& keywords() {
    static const std::map<std::string, Tok> k = {
        {"style", Tok::KwStyle},         {"configuration", Tok::KwConfiguration},
        {"component", Tok::KwComponent}, {"connector", Tok::KwConnector},
        {"port", Tok::KwPort},           {"role", Tok::KwRole},
        {"glue", Tok::KwGlue},           {"computation", Tok::KwComputation},
        {"where", Tok::KwWhere},         {"constraints", Tok::KwConstraints},
        {"end", Tok::KwEnd},             {"instances", Tok::KwInstances},
        {"attachments", Tok::KwAttachments}, {"as", Tok::KwAs},
        {"tick", Tok::Tick},             {"skip", Tok::Tick},
    };
    return k;
}

inline bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool identChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace detail

inline std::vector<Token> tokenizeOrThrow(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto starts = [&](const char* s) { return src.compare(i, std::strlen(s), s) == 0; };

    while (i < src.size()) {
        char c = src[i];
        SourcePos pos{line, col};
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (starts("//")) {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (starts("->")) {
            out.push_back({Tok::Arrow, "->", pos});
            advance(2);
        } else if (starts("[]")) {
            out.push_back({Tok::ExtChoice, "[]", pos});
            advance(2);
        } else if (starts("|~|")) {
            out.push_back({Tok::IntChoice, "|~|", pos});
            advance(3);
        } else if (starts("{|")) {
            throw LexError(pos, "channel productions '{|' are not Wright input");
        } else if (c == '(' || c == ')' || c == '{' || c == '}' || c == '=' || c == ',' || c == ':') {
            static const std::map<char, Tok> single = {{'(', Tok::LParen}, {')', Tok::RParen}, {'{', Tok::LBrace},
                                                       {'}', Tok::RBrace}, {'=', Tok::Equals}, {',', Tok::Comma},
                                                       {':', Tok::Colon}};
            out.push_back({single.at(c), std::string(1, c), pos});
            advance(1);
        } else if (detail::identStart(c)) {
            bool init = c == '_';
            std::size_t j = i + (init ? 1 : 0);
            std::string text;
            while (true) {
                std::size_t k = j;
                if (k >= src.size() || !detail::identStart(src[k])) throw LexError(pos, "malformed identifier");
                while (k < src.size() && detail::identChar(src[k])) ++k;
                text += src.substr(j, k - j);
                j = k;
                if (j + 1 < src.size() && src[j] == '.' && detail::identStart(src[j + 1])) {
                    text += '.';
                    ++j;
                    continue;
                }
                break;
            }
            advance(j - i);
            if (init) {
                out.push_back({Tok::InitEvent, text, pos});
                continue;
            }
            auto kw = detail::keywords().find(detail::lower(text));
            if (text.find('.') == std::string::npos && kw != detail::keywords().end()) {
                out.push_back({kw->second, text, pos});
                if (kw->second == Tok::KwConstraints) {
                    // Body is kept raw up to "End Style".
                    std::size_t bodyStart = i;
                    std::string low = detail::lower(src);
                    std::size_t k = i;
                    std::size_t stop = std::string::npos;
                    while ((k = low.find("end", k)) != std::string::npos) {
                        bool boundary = (k == 0 || !detail::identChar(low[k - 1])) &&
                                        (k + 3 >= low.size() || !detail::identChar(low[k + 3]));
                        if (boundary) {
                            std::size_t m = k + 3;
                            while (m < low.size() && std::isspace(static_cast<unsigned char>(low[m]))) ++m;
                            if (low.compare(m, 5, "style") == 0) {
                                stop = k;
                                break;
                            }
                        }
                        k += 3;
                    }
                    if (stop == std::string::npos) throw LexError(pos, "Constraints section without 'End Style'");
                    out.back().text = src.substr(bodyStart, stop - bodyStart);
                    advance(stop - i);
                }
            } else {
                out.push_back({Tok::Ident, text, pos});
            }
        } else if (c == '|') {
            throw LexError(pos, "guarded choice '|' is not supported");
        } else if (c == '!' || c == '?') {
            throw LexError(pos, "data-carrying events are not supported");
        } else {
            throw LexError(pos, std::string("illegal character '") +
                                    (std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "?") + "'");
        }
    }
    return out;
}

struct ParseResult {
    std::optional<ArchSpec> spec;
    std::optional<ParseError> error;
    std::vector<Diagnostic> warnings;
    bool ok() const { return spec.has_value(); }
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ParseResult run() {
        ParseResult r;
        try {
            r.spec = parseSpec();
        } catch (const Failure& f) {
            r.error = ParseError{f.pos, f.msg};
        }
        r.warnings = std::move(warnings_);
        return r;
    }

private:
    struct Failure {
        SourcePos pos;
        std::string msg;
    };
    static constexpr int kMaxDepth = 400;

    std::vector<Token> toks_;
    std::size_t at_ = 0;
    int depth_ = 0;
    std::vector<Diagnostic> warnings_;

    const Token* peek(std::size_t k = 0) const { return at_ + k < toks_.size() ? &toks_[at_ + k] : nullptr; }
    bool is(Tok t, std::size_t k = 0) const { return peek(k) && peek(k)->kind == t; }
    SourcePos here() const {
        if (peek()) return peek()->pos;
        return toks_.empty() ? SourcePos{} : toks_.back().pos;
    }
    [[noreturn]] void fail(const std::string& m) const {
        throw Failure{here(), m + (peek() ? " near '" + peek()->text + "'" : " at end of input")};
    }
    const Token& expect(Tok t, const char* what) {
        if (!is(t)) fail(std::string("expected ") + what);
        return toks_[at_++];
    }
    Identifier plainIdent(const char* what) {
        const Token& t = expect(Tok::Ident, what);
        if (t.text.find('.') != std::string::npos) throw Failure{t.pos, std::string("expected ") + what + ", got dotted name"};
        return Identifier(t.text);
    }

    ArchSpec parseSpec() {
        if (is(Tok::KwStyle)) return ArchSpec{parseStyle()};
        if (is(Tok::KwConfiguration)) return ArchSpec{parseConfiguration()};
        fail("expected 'Style' or 'Configuration'");
    }

    std::vector<TypeDecl> parseTypes() {
        std::vector<TypeDecl> types;
        while (true) {
            if (is(Tok::KwComponent)) types.emplace_back(parseComponent());
            else if (is(Tok::KwConnector)) types.emplace_back(parseConnector());
            else break;
        }
        return types;
    }

    Style parseStyle() {
        Style s;
        s.pos = expect(Tok::KwStyle, "'Style'").pos;
        s.name = plainIdent("style name");
        s.types = parseTypes();
        if (is(Tok::KwConstraints)) ++at_;
        expect(Tok::KwEnd, "'End'");
        expect(Tok::KwStyle, "'Style'");
        if (peek()) fail("unexpected text after 'End Style'");
        return s;
    }

    Configuration parseConfiguration() {
        Configuration c;
        c.pos = expect(Tok::KwConfiguration, "'Configuration'").pos;
        c.name = plainIdent("configuration name");
        c.types = parseTypes();
        expect(Tok::KwInstances, "'Instances'");
        while (is(Tok::Ident)) {
            std::vector<std::pair<Identifier, SourcePos>> names;
            SourcePos p = here();
            names.emplace_back(plainIdent("instance name"), p);
            while (is(Tok::Comma)) {
                ++at_;
                p = here();
                names.emplace_back(plainIdent("instance name"), p);
            }
            expect(Tok::Colon, "':'");
            Identifier type = plainIdent("type name");
            for (auto& [n, pos] : names) c.instances.push_back({n, type, pos});
        }
        expect(Tok::KwAttachments, "'Attachments'");
        while (is(Tok::Ident)) {
            Attachment a;
            a.pos = here();
            a.left = parseInterface();
            expect(Tok::KwAs, "'As'");
            a.right = parseInterface();
            c.attachments.push_back(a);
        }
        expect(Tok::KwEnd, "'End'");
        expect(Tok::KwConfiguration, "'Configuration'");
        if (peek()) fail("unexpected text after 'End Configuration'");
        return c;
    }

    InterfaceRef parseInterface() {
        const Token& t = expect(Tok::Ident, "interface 'instance.point'");
        auto dot = t.text.find('.');
        if (dot == std::string::npos || t.text.find('.', dot + 1) != std::string::npos)
            throw Failure{t.pos, "interface must have the form instance.point"};
        return {Identifier(t.text.substr(0, dot)), Identifier(t.text.substr(dot + 1)), t.pos};
    }

    Component parseComponent() {
        Component c;
        c.pos = expect(Tok::KwComponent, "'Component'").pos;
        c.name = plainIdent("component name");
        while (is(Tok::KwPort)) {
            SourcePos p = toks_[at_++].pos;
            c.ports.push_back(parseBinding(DeclKind::Port, plainIdent("port name"), p));
        }
        if (c.ports.empty()) fail("component needs at least one port");
        SourcePos p = expect(Tok::KwComputation, "'Computation'").pos;
        c.computation = parseBinding(DeclKind::Computation, Identifier("Computation"), p);
        return c;
    }

    Connector parseConnector() {
        Connector c;
        c.pos = expect(Tok::KwConnector, "'Connector'").pos;
        c.name = plainIdent("connector name");
        while (is(Tok::KwRole)) {
            SourcePos p = toks_[at_++].pos;
            c.roles.push_back(parseBinding(DeclKind::Role, plainIdent("role name"), p));
        }
        if (c.roles.empty()) fail("connector needs at least one role");
        SourcePos p = expect(Tok::KwGlue, "'Glue'").pos;
        c.glue = parseBinding(DeclKind::Glue, Identifier("Glue"), p);
        return c;
    }

    Declaration parseBinding(DeclKind kind, Identifier name, SourcePos pos) {
        Declaration d;
        d.kind = kind;
        d.name = std::move(name);
        d.pos = pos;
        expect(Tok::Equals, "'='");
        d.body = parseChoice();
        if (is(Tok::KwWhere)) {
            ++at_;
            expect(Tok::LBrace, "'{'");
            while (is(Tok::Ident)) {
                SourcePos lp = here();
                Identifier ln = plainIdent("local name");
                Declaration l = parseBinding(DeclKind::WhereLocal, ln, lp);
                d.locals.push_back(std::move(l));
            }
            expect(Tok::RBrace, "'}'");
        }
        return d;
    }

    ProcPtr parseChoice() {
        if (++depth_ > kMaxDepth) fail("expression nested too deeply");
        ProcPtr left = parsePrefix();
        bool sawExt = false, sawInt = false;
        while (is(Tok::ExtChoice) || is(Tok::IntChoice)) {
            const Token& op = toks_[at_++];
            ProcPtr right = parsePrefix();
            if (op.kind == Tok::ExtChoice) {
                sawExt = true;
                left = extChoice(left, right, op.pos);
            } else {
                sawInt = true;
                left = intChoice(left, right, op.pos);
            }
            if (sawExt && sawInt) {
                warnings_.push_back({Severity::Warning, op.pos, 0,
                                     "'[]' and '|~|' mixed without parentheses; grouping left to right"});
                sawExt = sawInt = false;
            }
        }
        --depth_;
        return left;
    }

    ProcPtr parsePrefix() {
        if (++depth_ > kMaxDepth) fail("expression nested too deeply");
        ProcPtr r;
        if ((is(Tok::Ident) || is(Tok::InitEvent)) && is(Tok::Arrow, 1)) {
            const Token& e = toks_[at_];
            at_ += 2;
            EventRef ev;
            try {
                ev = EventRef::parse(e.text, e.kind == Tok::InitEvent ? Polarity::Initiated : Polarity::Observed);
            } catch (const std::invalid_argument&) {
                throw Failure{e.pos, "event name has too many segments"};
            }
            r = prefix(ev, parsePrefix(), e.pos);
        } else {
            r = parseAtom();
        }
        --depth_;
        return r;
    }

    ProcPtr parseAtom() {
        const Token* t = peek();
        if (!t) fail("expected a process");
        switch (t->kind) {
            case Tok::Tick:
                ++at_;
                return success(t->pos);
            case Tok::Ident:
                if (t->text.find('.') != std::string::npos) fail("event must be followed by '->'");
                ++at_;
                return ref(Identifier(t->text), t->pos);
            case Tok::KwComputation:
            case Tok::KwGlue:
                ++at_;
                return ref(Identifier(t->kind == Tok::KwGlue ? "Glue" : "Computation"), t->pos);
            case Tok::LParen: {
                ++at_;
                ProcPtr inner = parseChoice();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::InitEvent:
                fail("initiated event must be followed by '->'");
            default:
                fail("expected a process");
        }
    }
};

inline ParseResult parseWright(const std::string& source) {
    std::vector<Token> toks;
    try {
        toks = tokenizeOrThrow(source);
    } catch (const LexError& e) {
        ParseResult r;
        r.error = ParseError{e.pos, e.what()};
        return r;
    }
    return Parser(std::move(toks)).run();
}

// Canonical Wright text.
inline std::string printProcess(const ProcPtr& p, bool nested = false) {
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Prefix>) {
                std::string e = (x.event.initiated() ? "_" : "") + x.event.key();
                return e + " -> " + printProcess(x.rest, true);
            } else if constexpr (std::is_same_v<T, ExternalChoice> || std::is_same_v<T, InternalChoice>) {
                const char* op = std::is_same_v<T, ExternalChoice> ? " [] " : " |~| ";
                std::string s = printProcess(x.left, true) + op + printProcess(x.right, true);
                return nested ? "(" + s + ")" : s;
            } else if constexpr (std::is_same_v<T, Ref>) {
                return x.name.str();
            } else {
                return "TICK";
            }
        },
        p->node);
}

inline std::string printWright(const ArchSpec& spec) {
    std::ostringstream o;
    auto binding = [&](const char* kw, const Declaration& d, bool named) {
        o << "  " << kw << (named ? " " + d.name.str() : "") << " = " << printProcess(d.body) << "\n";
        if (!d.locals.empty()) {
            o << "  where {\n";
            for (const auto& l : d.locals) o << "    " << l.name.str() << " = " << printProcess(l.body) << "\n";
            o << "  }\n";
        }
    };
    auto types = [&](const std::vector<TypeDecl>& ts) {
        for (const auto& t : ts) {
            if (auto c = std::get_if<Component>(&t)) {
                o << "Component " << c->name.str() << "\n";
                for (const auto& p : c->ports) binding("Port", p, true);
                binding("Computation", c->computation, false);
            } else {
                const auto& c2 = std::get<Connector>(t);
                o << "Connector " << c2.name.str() << "\n";
                for (const auto& r : c2.roles) binding("Role", r, true);
                binding("Glue", c2.glue, false);
            }
        }
    };
    if (auto s = std::get_if<Style>(&spec.root)) {
        o << "Style " << s->name.str() << "\n";
        types(s->types);
        o << "Constraints\nEnd Style\n";
    } else {
        const auto& c = std::get<Configuration>(spec.root);
        o << "Configuration " << c.name.str() << "\n";
        types(c.types);
        o << "Instances\n";
        for (const auto& i : c.instances) o << "  " << i.name.str() << " : " << i.type.str() << "\n";
        o << "Attachments\n";
        for (const auto& a : c.attachments)
            o << "  " << a.left.instance.str() << "." << a.left.point.str() << " As " << a.right.instance.str() << "."
              << a.right.point.str() << "\n";
        o << "End Configuration\n";
    }
    return o.str();
}

}  // namespace wright
