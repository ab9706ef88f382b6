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

#include "mapsin/term.hpp"

#include "mapsin/errors.hpp"

namespace mapsin {

namespace {

constexpr char kIriTag = 'i';
constexpr char kLiteralTag = 'l';
constexpr char kEscape = '\x01';
constexpr char kEscapedNul = '\x02';
constexpr char kEscapedEscape = '\x03';

}  // namespace

std::string to_string(const Term& term) {
    if (term.kind == Term::Kind::Iri) return "<" + term.lexical + ">";
    return term.lexical;
}

std::string to_ntriples(const Triple& triple) {
    return to_string(triple.subject) + " " + to_string(triple.predicate) + " " +
           to_string(triple.object) + " .";
}

Bytes encode_term(const Term& term) {
    Bytes out;
    out.reserve(term.lexical.size() + 1);
    out.push_back(term.kind == Term::Kind::Iri ? kIriTag : kLiteralTag);
    for (char c : term.lexical) {
        if (c == '\0') {
            out.push_back(kEscape);
            out.push_back(kEscapedNul);
        } else if (c == kEscape) {
            out.push_back(kEscape);
            out.push_back(kEscapedEscape);
        } else {
            out.push_back(c);
        }
    }
    return out;
}

Term decode_term(const Bytes& encoded) {
    if (encoded.empty()) throw MalformedEncodingError("empty byte string");
    Term term;
    switch (encoded[0]) {
        case kIriTag: term.kind = Term::Kind::Iri; break;
        case kLiteralTag: term.kind = Term::Kind::Literal; break;
        default: throw MalformedEncodingError("unknown kind tag");
    }
    term.lexical.reserve(encoded.size() - 1);
    for (std::size_t i = 1; i < encoded.size(); ++i) {
        char c = encoded[i];
        if (c == '\0') throw MalformedEncodingError("unescaped NUL byte");
        if (c == kEscape) {
            if (++i == encoded.size()) throw MalformedEncodingError("dangling escape byte");
            if (encoded[i] == kEscapedNul)
                term.lexical.push_back('\0');
            else if (encoded[i] == kEscapedEscape)
                term.lexical.push_back(kEscape);
            else
                throw MalformedEncodingError("invalid escape sequence");
        } else {
            term.lexical.push_back(c);
        }
    }
    return term;
}

}  // namespace mapsin
