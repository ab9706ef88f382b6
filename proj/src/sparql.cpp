/*
 * Copyright (c) 2026 The mapsin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
 * implied. See the License for the specific language governing
 * permissions and limitations under the License.
 */

#include "mapsin/sparql.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "mapsin/errors.hpp"

namespace mapsin {

std::string to_string(const PatternTerm& pt) {
    if (is_variable(pt)) return "?" + as_variable(pt).name;
    return to_string(as_term(pt));
}

std::vector<std::string> TriplePattern::variables() const {
    std::vector<std::string> names;
    for (const PatternTerm* pt : {&subject, &predicate, &object}) {
        if (!is_variable(*pt)) continue;
        const std::string& name = as_variable(*pt).name;
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }
    return names;
}

bool TriplePattern::uses_variable(const std::string& name) const {
    for (const PatternTerm* pt : {&subject, &predicate, &object})
        if (is_variable(*pt) && as_variable(*pt).name == name) return true;
    return false;
}

std::string to_string(const TriplePattern& pattern) {
    return "(" + to_string(pattern.subject) + " " + to_string(pattern.predicate) + " " +
           to_string(pattern.object) + ")";
}

std::string to_string(const SolutionMapping& mapping) {
    std::string out = "{";
    bool first = true;
    for (const auto& [name, term] : mapping.bindings) {
        if (!first) out += ", ";
        first = false;
        out += "?" + name + " -> " + to_string(term);
    }
    return out + "}";
}

bool compatible(const SolutionMapping& a, const SolutionMapping& b) {
    const SolutionMapping& small = a.bindings.size() <= b.bindings.size() ? a : b;
    const SolutionMapping& large = a.bindings.size() <= b.bindings.size() ? b : a;
    for (const auto& [name, term] : small.bindings) {
        const Term* other = large.find(name);
        if (other && *other != term) return false;
    }
    return true;
}

SolutionMapping merge(const SolutionMapping& a, const SolutionMapping& b) {
    SolutionMapping out = a;
    for (const auto& [name, term] : b.bindings) {
        auto [it, inserted] = out.bindings.emplace(name, term);
        if (!inserted && it->second != term) throw IncompatibleMappingsError(name);
    }
    return out;
}

TriplePattern substitute(const SolutionMapping& mapping, const TriplePattern& pattern) {
    TriplePattern out = pattern;
    for (PatternTerm* pt : {&out.subject, &out.predicate, &out.object}) {
        if (!is_variable(*pt)) continue;
        if (const Term* term = mapping.find(as_variable(*pt).name)) *pt = *term;
    }
    return out;
}

std::optional<SolutionMapping> match(const TriplePattern& pattern, const Triple& triple) {
    SolutionMapping mapping;
    const PatternTerm* positions[3] = {&pattern.subject, &pattern.predicate, &pattern.object};
    const Term* terms[3] = {&triple.subject, &triple.predicate, &triple.object};
    for (int i = 0; i < 3; ++i) {
        if (is_term(*positions[i])) {
            if (as_term(*positions[i]) != *terms[i]) return std::nullopt;
        } else {
            const std::string& name = as_variable(*positions[i]).name;
            auto [it, inserted] = mapping.bindings.emplace(name, *terms[i]);
            if (!inserted && it->second != *terms[i]) return std::nullopt;
        }
    }
    return mapping;
}

std::string canonical_key(const SolutionMapping& mapping) {
    std::string key;
    for (const auto& [name, term] : mapping.bindings) {
        key += name;
        key.push_back('\0');
        key += encode_term(term);  // never contains NUL
        key.push_back('\0');
    }
    return key;
}

bool multiset_equal(const MappingList& a, const MappingList& b) {
    if (a.size() != b.size()) return false;
    std::vector<std::string> ka, kb;
    ka.reserve(a.size());
    kb.reserve(b.size());
    for (const auto& m : a) ka.push_back(canonical_key(m));
    for (const auto& m : b) kb.push_back(canonical_key(m));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
}

std::vector<std::string> BasicGraphPattern::effective_projection() const {
    if (!select_all) return projection;
    std::vector<std::string> vars;
    for (const TriplePattern& pattern : patterns) {
        for (const std::string& name : pattern.variables())
            if (std::find(vars.begin(), vars.end(), name) == vars.end()) vars.push_back(name);
    }
    return vars;
}

// ---------------------------------------------------------------------------
// Query parsing

namespace {

struct Token {
    enum class Kind { Var, IriRef, Literal, Word, Punct, End };

    Kind kind = Kind::End;
    std::string text;          // var name, IRI content, literal surface, word, or punct char
    std::string datatype_ns;   // for literals with a prefixed ^^datatype
    std::string datatype_local;
    bool has_pname_datatype = false;
    std::size_t line = 1;
    std::size_t column = 1;
};

bool word_char(char c) {
    switch (c) {
        case ' ':
        case '\t':
        case '\r':
        case '\n':
        case '{':
        case '}':
        case '(':
        case ')':
        case '.':
        case '=':
        case '<':
        case '>':
        case '"':
        case '#':
        case '?':
        case '$':
        case '*':
            return false;
        default:
            return true;
    }
}

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_space();
        Token token;
        token.line = line_;
        token.column = column_;
        if (pos_ >= text_.size()) return token;

        char c = text_[pos_];
        if (c == '?' || c == '$') {
            advance();
            token.kind = Token::Kind::Var;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                           text_[pos_] == '_')) {
                token.text.push_back(text_[pos_]);
                advance();
            }
            if (token.text.empty()) fail("expected variable name after '" + std::string(1, c) + "'", token);
            return token;
        }
        if (c == '<') {
            advance();
            token.kind = Token::Kind::IriRef;
            while (pos_ < text_.size() && text_[pos_] != '>' && text_[pos_] != '\n') {
                token.text.push_back(text_[pos_]);
                advance();
            }
            if (pos_ >= text_.size() || text_[pos_] != '>') fail("unterminated IRI", token);
            advance();
            return token;
        }
        if (c == '"') {
            return lex_literal(token);
        }
        if (c == '{' || c == '}' || c == '(' || c == ')' || c == '.' || c == '=' || c == '*') {
            token.kind = Token::Kind::Punct;
            token.text = std::string(1, c);
            advance();
            return token;
        }
        if (word_char(c)) {
            token.kind = Token::Kind::Word;
            while (pos_ < text_.size() && word_char(text_[pos_])) {
                token.text.push_back(text_[pos_]);
                advance();
            }
            return token;
        }
        fail("unexpected character '" + std::string(1, c) + "'", token);
        return token;  // unreachable
    }

  private:
    Token lex_literal(Token token) {
        token.kind = Token::Kind::Literal;
        token.text.push_back('"');
        advance();
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\n') fail("unterminated literal", token);
            if (text_[pos_] == '\\') {
                token.text.push_back('\\');
                advance();
                if (pos_ >= text_.size()) fail("unterminated literal", token);
            }
            token.text.push_back(text_[pos_]);
            advance();
        }
        if (pos_ >= text_.size()) fail("unterminated literal", token);
        token.text.push_back('"');
        advance();

        if (pos_ < text_.size() && text_[pos_] == '@') {
            token.text.push_back('@');
            advance();
            std::size_t len = 0;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-')) {
                token.text.push_back(text_[pos_]);
                advance();
                ++len;
            }
            if (len == 0) fail("expected language tag after '@'", token);
        } else if (pos_ + 1 < text_.size() && text_[pos_] == '^' && text_[pos_ + 1] == '^') {
            advance();
            advance();
            if (pos_ < text_.size() && text_[pos_] == '<') {
                token.text += "^^<";
                advance();
                while (pos_ < text_.size() && text_[pos_] != '>' && text_[pos_] != '\n') {
                    token.text.push_back(text_[pos_]);
                    advance();
                }
                if (pos_ >= text_.size() || text_[pos_] != '>')
                    fail("unterminated datatype IRI", token);
                token.text.push_back('>');
                advance();
            } else {
                std::string pname;
                while (pos_ < text_.size() && word_char(text_[pos_])) {
                    pname.push_back(text_[pos_]);
                    advance();
                }
                auto colon = pname.find(':');
                if (pname.empty() || colon == std::string::npos)
                    fail("expected datatype after '^^'", token);
                token.has_pname_datatype = true;
                token.datatype_ns = pname.substr(0, colon);
                token.datatype_local = pname.substr(colon + 1);
                token.text += "^^" + pname;
            }
        }
        return token;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg, const Token& at) {
        throw SyntaxError(msg, at.line, at.column);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

bool is_keyword(const Token& token, const char* kw) {
    return token.kind == Token::Kind::Word && upper(token.text) == kw;
}

// Recognized SPARQL keywords outside the supported subset. Seeing one is a
// clear signal the query relies on a feature this engine does not have.
const char* unsupported_keyword(const Token& token) {
    if (token.kind != Token::Kind::Word) return nullptr;
    static const char* keywords[] = {
        "OPTIONAL", "UNION",    "MINUS",  "GRAPH",  "SERVICE", "BIND",    "VALUES",
        "ORDER",    "GROUP",    "HAVING", "LIMIT",  "OFFSET",  "DISTINCT", "REDUCED",
        "CONSTRUCT", "DESCRIBE", "ASK",   "INSERT", "DELETE",  "FROM",    "EXISTS",
    };
    std::string u = upper(token.text);
    for (const char* kw : keywords)
        if (u == kw) return kw;
    return nullptr;
}

class Parser {
  public:
    explicit Parser(std::string_view text) : lexer_(text) { shift(); }

    BasicGraphPattern parse() {
        parse_prefixes();
        if (const char* kw = unsupported_keyword(current_)) throw UnsupportedConstructError(kw);
        if (!is_keyword(current_, "SELECT")) fail("expected SELECT");
        shift();

        BasicGraphPattern query;
        if (current_.kind == Token::Kind::Punct && current_.text == "*") {
            query.select_all = true;
            shift();
        } else {
            while (current_.kind == Token::Kind::Var) {
                if (std::find(query.projection.begin(), query.projection.end(), current_.text) ==
                    query.projection.end())
                    query.projection.push_back(current_.text);
                shift();
            }
            if (const char* kw = unsupported_keyword(current_)) throw UnsupportedConstructError(kw);
            // An empty list is only valid when WHERE follows directly; it
            // round-trips queries whose projection was consumed by filters.
            if (query.projection.empty() && !is_keyword(current_, "WHERE"))
                fail("expected variable or * after SELECT");
        }

        if (!is_keyword(current_, "WHERE")) fail("expected WHERE");
        shift();
        expect_punct("{");

        std::vector<std::pair<std::string, Term>> filters;
        while (!(current_.kind == Token::Kind::Punct && current_.text == "}")) {
            if (current_.kind == Token::Kind::End) fail("unterminated group, expected }");
            if (is_keyword(current_, "FILTER")) {
                shift();
                filters.push_back(parse_filter());
                continue;
            }
            if (const char* kw = unsupported_keyword(current_)) throw UnsupportedConstructError(kw);
            TriplePattern pattern;
            pattern.subject = parse_pattern_term("subject");
            pattern.predicate = parse_pattern_term("predicate");
            pattern.object = parse_pattern_term("object");
            query.patterns.push_back(std::move(pattern));
            if (current_.kind == Token::Kind::Punct && current_.text == ".") shift();
        }
        shift();  // consume }

        if (current_.kind != Token::Kind::End) {
            if (const char* kw = unsupported_keyword(current_)) throw UnsupportedConstructError(kw);
            fail("unexpected trailing tokens after }");
        }

        apply_filters(query, filters);
        return query;
    }

  private:
    void parse_prefixes() {
        while (is_keyword(current_, "PREFIX")) {
            shift();
            if (current_.kind != Token::Kind::Word || current_.text.back() != ':')
                fail("expected prefix name ending in ':'");
            std::string ns = current_.text.substr(0, current_.text.size() - 1);
            shift();
            if (current_.kind != Token::Kind::IriRef) fail("expected IRI after prefix name");
            prefixes_[ns] = current_.text;
            shift();
        }
    }

    std::pair<std::string, Term> parse_filter() {
        expect_punct("(");
        if (current_.kind != Token::Kind::Var)
            throw UnsupportedConstructError("complex FILTER expression");
        std::string var = current_.text;
        shift();
        if (!(current_.kind == Token::Kind::Punct && current_.text == "="))
            throw UnsupportedConstructError("complex FILTER expression");
        shift();
        if (current_.kind == Token::Kind::Var)
            throw UnsupportedConstructError("FILTER comparing two variables");
        PatternTerm constant = parse_pattern_term("FILTER constant");
        expect_punct(")");
        return {var, as_term(constant)};
    }

    PatternTerm parse_pattern_term(const char* position) {
        Token token = current_;
        switch (token.kind) {
            case Token::Kind::Var:
                shift();
                return Variable{token.text};
            case Token::Kind::IriRef:
                shift();
                return Term::iri(token.text);
            case Token::Kind::Literal:
                shift();
                return Term::literal(expand_literal(token));
            case Token::Kind::Word: {
                if (const char* kw = unsupported_keyword(token)) throw UnsupportedConstructError(kw);
                if (is_keyword(token, "SELECT") || is_keyword(token, "WHERE") ||
                    is_keyword(token, "FILTER") || is_keyword(token, "PREFIX"))
                    fail(std::string("unexpected keyword in ") + position + " position");
                shift();
                return Term::iri(expand_pname(token.text));
            }
            default:
                fail(std::string("expected term or variable in ") + position + " position");
        }
        return Variable{};  // unreachable
    }

    // foo:bar with a declared PREFIX foo: expands; otherwise the word is
    // taken verbatim as IRI text (the shorthand style of bare words).
    std::string expand_pname(const std::string& word) const {
        auto colon = word.find(':');
        if (colon == std::string::npos) return word;
        auto it = prefixes_.find(word.substr(0, colon));
        if (it == prefixes_.end()) return word;
        return it->second + word.substr(colon + 1);
    }

    std::string expand_literal(const Token& token) const {
        if (!token.has_pname_datatype) return token.text;
        auto it = prefixes_.find(token.datatype_ns);
        if (it == prefixes_.end()) return token.text;
        auto caret = token.text.rfind("^^");
        return token.text.substr(0, caret) + "^^<" + it->second + token.datatype_local + ">";
    }

    void apply_filters(BasicGraphPattern& query,
                       const std::vector<std::pair<std::string, Term>>& filters) {
        // Duplicate agreeing filters collapse to one; disagreeing ones cannot
        // both hold under the equality-only rewrite we support.
        std::map<std::string, Term> folded;
        for (const auto& [var, constant] : filters) {
            auto [it, inserted] = folded.emplace(var, constant);
            if (!inserted && it->second != constant)
                throw UnsupportedConstructError("contradictory FILTER constraints on ?" + var);
        }
        for (const auto& [var, constant] : folded) {
            bool occurs = false;
            for (const TriplePattern& pattern : query.patterns)
                occurs = occurs || pattern.uses_variable(var);
            if (!occurs)
                fail("FILTER variable ?" + var + " does not occur in the pattern");
            SolutionMapping binding;
            binding.bindings.emplace(var, constant);
            for (TriplePattern& pattern : query.patterns) pattern = substitute(binding, pattern);
            auto it = std::find(query.projection.begin(), query.projection.end(), var);
            if (it != query.projection.end()) query.projection.erase(it);
        }
    }

    void expect_punct(const char* p) {
        if (!(current_.kind == Token::Kind::Punct && current_.text == p))
            fail(std::string("expected '") + p + "'");
        shift();
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw SyntaxError(msg, current_.line, current_.column);
    }

    void shift() { current_ = lexer_.next(); }

    Lexer lexer_;
    Token current_;
    std::map<std::string, std::string> prefixes_;
};

}  // namespace

BasicGraphPattern parse_query(std::string_view text) { return Parser(text).parse(); }

std::string print_query(const BasicGraphPattern& query) {
    std::ostringstream out;
    out << "SELECT";
    if (query.select_all) {
        out << " *";
    } else {
        for (const std::string& var : query.projection) out << " ?" << var;
    }
    out << " WHERE {\n";
    for (const TriplePattern& pattern : query.patterns) {
        out << "  " << to_string(pattern.subject) << " " << to_string(pattern.predicate) << " "
            << to_string(pattern.object) << " .\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace mapsin
