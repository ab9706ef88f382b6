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

#pragma once

#include <compare>
#include <string>

#include "mapsin/bytes.hpp"

namespace mapsin {

// An RDF term: an IRI or a literal. For IRIs the lexical form is the IRI
// text without angle brackets. For literals it is the full surface form
// including the surrounding quotes and any ^^<datatype> or @lang suffix,
// so distinct literals stay distinct without modeling datatypes.
struct Term {
    enum class Kind { Iri, Literal };

    Kind kind = Kind::Iri;
    std::string lexical;

    static Term iri(std::string text) { return Term{Kind::Iri, std::move(text)}; }
    static Term literal(std::string surface) { return Term{Kind::Literal, std::move(surface)}; }

    auto operator<=>(const Term&) const = default;
};

// Serialized form: "<iri>" or the literal surface form verbatim.
std::string to_string(const Term& term);

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    auto operator<=>(const Triple&) const = default;
};

// One N-Triples line for the triple, including the terminating " .".
std::string to_ntriples(const Triple& triple);

// Injective mapping from terms to key bytes: a kind tag byte followed by
// the lexical form with NUL bytes escaped, so encoded terms never contain
// NUL and compound row keys can use NUL as a separator.
Bytes encode_term(const Term& term);

// Inverse of encode_term. Throws MalformedEncodingError on any byte string
// that encode_term cannot produce.
Term decode_term(const Bytes& encoded);

}  // namespace mapsin
