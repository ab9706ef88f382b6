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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mapsin/kvstore.hpp"
#include "mapsin/sparql.hpp"
#include "mapsin/term.hpp"

namespace mapsin {

// Triples live in two tables so that both subject-keyed and object-keyed
// access are single-row reads:
//   T_spo: row enc(s), column enc(p), value enc(o)
//   T_ops: row enc(o), column enc(p), value enc(s)
// Both use the single column family "p". Multiple objects of one (s, p)
// are separate cell versions of the same column.
inline constexpr char kTableSpo[] = "T_spo";
inline constexpr char kTableOps[] = "T_ops";
inline constexpr char kColumnFamily[] = "p";

struct RdfConfig {
    // Class-assignment triples (predicate equal to this term) get a
    // compound T_ops row key enc(class) 0x00 enc(subject), spreading the
    // members of large classes over many rows instead of one. nullopt
    // disables the scheme.
    std::optional<Term> class_predicate = Term::iri("rdf:type");
    std::uint64_t max_region_bytes = Store::kDefaultMaxRegionBytes;

    bool operator==(const RdfConfig&) const = default;
};

// How a triple pattern is answered: which table, point get or scan, and
// which server-side filter. For Get, row is the row key; for
// ClassRangeScan, row is the scanned key prefix.
struct AccessPlan {
    enum class Access { Get, Scan, ClassRangeScan };

    std::string table;
    Access access = Access::Scan;
    std::optional<Bytes> row;
    FilterSpec filter = FilterSpec::none();

    bool operator==(const AccessPlan&) const = default;
};

std::string to_string(AccessPlan::Access access);
std::string to_string(const AccessPlan& plan);

// Chooses the access path for a pattern from the bound/variable shape of
// its three positions. Subject-bound shapes read T_spo, object-bound (and
// subject-free) shapes read T_ops, everything else scans T_spo. Patterns
// of the form (?s, <class-predicate>, C) become a range scan over the
// compound rows of class C.
AccessPlan resolve_pattern(const TriplePattern& pattern, const RdfConfig& config);

struct ParseIssue {
    std::size_t line = 0;
    std::string message;

    bool operator==(const ParseIssue&) const = default;
};

struct LoadStats {
    std::uint64_t triples_read = 0;    // syntactically valid lines
    std::uint64_t triples_stored = 0;  // excluding duplicates
    std::uint64_t duplicates = 0;
    std::vector<ParseIssue> errors;
};

// Parses one N-Triples line: IRIs in angle brackets, literals in double
// quotes with optional ^^<datatype> or @lang, terminated by a dot.
// Returns nullopt for blank and comment lines; throws SyntaxError for
// anything malformed.
std::optional<Triple> parse_ntriples_line(std::string_view line);

// An RDF triple store on the two-table layout, answering triple patterns
// through the access paths of resolve_pattern.
class RdfStore {
  public:
    explicit RdfStore(RdfConfig config = RdfConfig());

    // Inserts a triple into both tables. Returns false (and stores
    // nothing) when the triple is already present: triples are a set even
    // though cells are versioned.
    bool store_triple(const Triple& triple);

    // Reads N-Triples line by line, collecting per-line errors instead of
    // failing the whole load.
    LoadStats load_ntriples(std::istream& in);

    // All mappings of the pattern against the stored graph, via one point
    // get or one (range) scan per resolve_pattern. Used by join stages.
    MappingList lookup(const TriplePattern& pattern) const;

    // Same result multiset as lookup(), but always scan-based and split
    // one partition per region for Scan-routed patterns (single partition
    // otherwise). Seeds parallel query execution without issuing gets.
    std::vector<MappingList> lookup_partitioned(const TriplePattern& pattern) const;

    // Fetches the one row shared by several patterns (their common bound
    // subject or object) with a single unfiltered get, matches every
    // pattern against the row client-side, and merges the per-pattern
    // results. Returns the empty list as soon as any pattern has no match
    // in the row. Preconditions: patterns all carry row_term in the same
    // position; object-side patterns must have bound, non-class
    // predicates (their triples would live outside this row otherwise).
    MappingList multi_column_lookup(const Term& row_term,
                                    const std::vector<TriplePattern>& patterns) const;

    std::vector<Triple> all_triples() const;  // unmetered, key order
    std::uint64_t triple_count() const;

    const RdfConfig& config() const { return config_; }
    Store& store() { return store_; }
    const Store& store() const { return store_; }

    void persist(const std::filesystem::path& dir) const;
    static RdfStore open(const std::filesystem::path& dir);

  private:
    explicit RdfStore(RdfConfig config, Store store);

    Triple cell_to_triple(const std::string& table, const Bytes& row, const Cell& cell) const;
    void append_matches(const TriplePattern& pattern, const std::string& table,
                        const std::vector<RowResult>& rows, MappingList& out) const;
    // Compound-row results for (?s ?p o) shapes, whose T_ops point get
    // cannot see class-assignment triples of o.
    void append_class_rows(const TriplePattern& pattern, const Bytes& object_row,
                           MappingList& out) const;

    RdfConfig config_;
    Store store_;
};

}  // namespace mapsin
