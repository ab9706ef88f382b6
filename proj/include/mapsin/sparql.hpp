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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mapsin/term.hpp"

namespace mapsin {

struct Variable {
    std::string name;  // without the ? or $ sigil

    auto operator<=>(const Variable&) const = default;
};

// A triple pattern position: either a constant term or a variable.
using PatternTerm = std::variant<Term, Variable>;

inline bool is_variable(const PatternTerm& pt) { return std::holds_alternative<Variable>(pt); }
inline bool is_term(const PatternTerm& pt) { return std::holds_alternative<Term>(pt); }
inline const Variable& as_variable(const PatternTerm& pt) { return std::get<Variable>(pt); }
inline const Term& as_term(const PatternTerm& pt) { return std::get<Term>(pt); }

std::string to_string(const PatternTerm& pt);

struct TriplePattern {
    PatternTerm subject;
    PatternTerm predicate;
    PatternTerm object;

    // Distinct variable names in subject, predicate, object order.
    std::vector<std::string> variables() const;
    bool uses_variable(const std::string& name) const;

    bool operator==(const TriplePattern&) const = default;
};

std::string to_string(const TriplePattern& pattern);

// A solution mapping: a partial function from variable names to terms.
struct SolutionMapping {
    std::map<std::string, Term> bindings;

    bool bound(const std::string& var) const { return bindings.count(var) != 0; }
    const Term* find(const std::string& var) const {
        auto it = bindings.find(var);
        return it == bindings.end() ? nullptr : &it->second;
    }

    bool operator==(const SolutionMapping&) const = default;
};

std::string to_string(const SolutionMapping& mapping);

// Results carry multiset semantics: duplicates are meaningful and order is
// an implementation detail.
using MappingList = std::vector<SolutionMapping>;

// Two mappings are compatible when they agree on every shared variable.
// Disjoint domains are trivially compatible.
bool compatible(const SolutionMapping& a, const SolutionMapping& b);

// Union of two compatible mappings; throws IncompatibleMappingsError if
// they disagree on a shared variable.
SolutionMapping merge(const SolutionMapping& a, const SolutionMapping& b);

// Replaces every pattern variable bound in the mapping by its term.
// Unbound variables stay variables.
TriplePattern substitute(const SolutionMapping& mapping, const TriplePattern& pattern);

// Matches a concrete triple against a pattern. Constants must be equal;
// variables bind, with repeated variables required to bind consistently.
std::optional<SolutionMapping> match(const TriplePattern& pattern, const Triple& triple);

// Multiset equality over mapping lists, ignoring order.
bool multiset_equal(const MappingList& a, const MappingList& b);

// Canonical sort key for a mapping (bindings are already name-ordered).
std::string canonical_key(const SolutionMapping& mapping);

// A SELECT query over one basic graph pattern.
struct BasicGraphPattern {
    std::vector<TriplePattern> patterns;
    bool select_all = false;
    std::vector<std::string> projection;  // empty when select_all

    // Projection to apply to results: the declared variables, or for
    // SELECT * every pattern variable in order of first appearance.
    std::vector<std::string> effective_projection() const;

    bool operator==(const BasicGraphPattern&) const = default;
};

// Parses the supported subset: optional PREFIX declarations, SELECT with a
// variable list or *, and a WHERE block of triple patterns. Terms are
// IRIs (bracketed, prefixed, or bare words), literals, or variables.
// FILTER (?v = <constant>) clauses are folded into the pattern by
// substituting the constant and dropping ?v from the projection.
// Recognized SPARQL keywords outside this subset raise
// UnsupportedConstructError; anything else malformed raises SyntaxError.
BasicGraphPattern parse_query(std::string_view text);

// Serializes a query so that parse_query(print_query(q)) == q.
std::string print_query(const BasicGraphPattern& query);

}  // namespace mapsin
