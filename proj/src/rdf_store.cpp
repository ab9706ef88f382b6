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

#include "mapsin/rdf_store.hpp"

#include <cctype>
#include <fstream>
#include <istream>

#include <json.hpp>

#include "mapsin/errors.hpp"

namespace mapsin {

namespace {

constexpr char kConfigFile[] = "rdf.json";

Bytes class_row_key(const Term& class_term, const Term& subject) {
    Bytes key = encode_term(class_term);
    key.push_back('\0');
    key += encode_term(subject);
    return key;
}

Bytes class_row_prefix(const Term& class_term) {
    Bytes prefix = encode_term(class_term);
    prefix.push_back('\0');
    return prefix;
}

}  // namespace

std::string to_string(AccessPlan::Access access) {
    switch (access) {
        case AccessPlan::Access::Get: return "get";
        case AccessPlan::Access::Scan: return "scan";
        case AccessPlan::Access::ClassRangeScan: return "class-range-scan";
    }
    return "?";
}

std::string to_string(const AccessPlan& plan) {
    return plan.table + " " + to_string(plan.access) + " filter=" + to_string(plan.filter.kind());
}

AccessPlan resolve_pattern(const TriplePattern& pattern, const RdfConfig& config) {
    bool s = is_term(pattern.subject);
    bool p = is_term(pattern.predicate);
    bool o = is_term(pattern.object);

    // Class members of C sit in compound rows under the prefix enc(C) 0x00,
    // not in row enc(C), so (?s, class-predicate, C) scans that prefix.
    if (!s && p && o && config.class_predicate &&
        as_term(pattern.predicate) == *config.class_predicate) {
        AccessPlan plan;
        plan.table = kTableOps;
        plan.access = AccessPlan::Access::ClassRangeScan;
        plan.row = class_row_prefix(as_term(pattern.object));
        plan.filter = FilterSpec::none();
        return plan;
    }

    AccessPlan plan;
    if (s) {
        // Subject bound: always a T_spo point get, narrowed by whatever
        // else is bound.
        plan.table = kTableSpo;
        plan.access = AccessPlan::Access::Get;
        plan.row = encode_term(as_term(pattern.subject));
        if (p && o)
            plan.filter = FilterSpec::column_and_value_equals(encode_term(as_term(pattern.predicate)),
                                                              encode_term(as_term(pattern.object)));
        else if (p)
            plan.filter = FilterSpec::column_equals(encode_term(as_term(pattern.predicate)));
        else if (o)
            plan.filter = FilterSpec::value_equals(encode_term(as_term(pattern.object)));
        else
            plan.filter = FilterSpec::none();
        return plan;
    }
    if (o) {
        // Object bound, subject free: T_ops point get.
        plan.table = kTableOps;
        plan.access = AccessPlan::Access::Get;
        plan.row = encode_term(as_term(pattern.object));
        plan.filter = p ? FilterSpec::column_equals(encode_term(as_term(pattern.predicate)))
                        : FilterSpec::none();
        return plan;
    }
    // Nothing usable as a row key: full T_spo scan.
    plan.table = kTableSpo;
    plan.access = AccessPlan::Access::Scan;
    plan.filter = p ? FilterSpec::column_equals(encode_term(as_term(pattern.predicate)))
                    : FilterSpec::none();
    return plan;
}

// ---------------------------------------------------------------------------
// N-Triples parsing

namespace {

class NtScanner {
  public:
    explicit NtScanner(std::string_view line) : line_(line) {}

    void skip_space() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }

    bool at_end() {
        skip_space();
        return pos_ >= line_.size();
    }

    bool peek_is(char c) {
        skip_space();
        return pos_ < line_.size() && line_[pos_] == c;
    }

    void expect_dot() {
        skip_space();
        if (pos_ >= line_.size() || line_[pos_] != '.') fail("expected '.' after the object");
        ++pos_;
    }

    Term parse_term(bool allow_literal) {
        skip_space();
        if (pos_ >= line_.size()) fail("unexpected end of line, expected a term");
        char c = line_[pos_];
        if (c == '<') {
            ++pos_;
            std::string iri;
            while (pos_ < line_.size() && line_[pos_] != '>') iri.push_back(line_[pos_++]);
            if (pos_ >= line_.size()) fail("unterminated IRI");
            ++pos_;
            return Term::iri(std::move(iri));
        }
        if (c == '"') {
            if (!allow_literal) fail("literal not allowed in this position");
            std::string surface;
            surface.push_back('"');
            ++pos_;
            while (pos_ < line_.size() && line_[pos_] != '"') {
                if (line_[pos_] == '\\') {
                    surface.push_back('\\');
                    ++pos_;
                    if (pos_ >= line_.size()) fail("unterminated literal");
                }
                surface.push_back(line_[pos_++]);
            }
            if (pos_ >= line_.size()) fail("unterminated literal");
            surface.push_back('"');
            ++pos_;
            if (pos_ < line_.size() && line_[pos_] == '@') {
                surface.push_back('@');
                ++pos_;
                std::size_t len = 0;
                while (pos_ < line_.size() &&
                       (std::isalnum(static_cast<unsigned char>(line_[pos_])) ||
                        line_[pos_] == '-')) {
                    surface.push_back(line_[pos_++]);
                    ++len;
                }
                if (len == 0) fail("expected language tag after '@'");
            } else if (pos_ + 1 < line_.size() && line_[pos_] == '^' && line_[pos_ + 1] == '^') {
                pos_ += 2;
                if (pos_ >= line_.size() || line_[pos_] != '<')
                    fail("expected '<' after '^^'");
                surface += "^^<";
                ++pos_;
                while (pos_ < line_.size() && line_[pos_] != '>')
                    surface.push_back(line_[pos_++]);
                if (pos_ >= line_.size()) fail("unterminated datatype IRI");
                surface.push_back('>');
                ++pos_;
            }
            return Term::literal(std::move(surface));
        }
        fail(std::string("expected '<' or '\"', found '") + c + "'");
    }

    [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, 1, pos_ + 1); }

  private:
    std::string_view line_;
    std::size_t pos_ = 0;
};

}  // namespace

std::optional<Triple> parse_ntriples_line(std::string_view line) {
    NtScanner scanner(line);
    if (scanner.at_end() || scanner.peek_is('#')) return std::nullopt;
    Triple triple;
    triple.subject = scanner.parse_term(false);
    triple.predicate = scanner.parse_term(false);
    triple.object = scanner.parse_term(true);
    scanner.expect_dot();
    if (!scanner.at_end()) scanner.fail("unexpected trailing text after '.'");
    return triple;
}

// ---------------------------------------------------------------------------
// RdfStore

RdfStore::RdfStore(RdfConfig config)
    : config_(std::move(config)), store_(config_.max_region_bytes) {
    store_.create_table(kTableSpo);
    store_.create_table(kTableOps);
}

RdfStore::RdfStore(RdfConfig config, Store store)
    : config_(std::move(config)), store_(std::move(store)) {
    if (!store_.has_table(kTableSpo)) store_.create_table(kTableSpo);
    if (!store_.has_table(kTableOps)) store_.create_table(kTableOps);
    config_.max_region_bytes = store_.max_region_bytes();
}

bool RdfStore::store_triple(const Triple& triple) {
    Bytes s = encode_term(triple.subject);
    Bytes p = encode_term(triple.predicate);
    Bytes o = encode_term(triple.object);
    if (store_.contains_cell(kTableSpo, s, kColumnFamily, p, o)) return false;
    store_.put(kTableSpo, s, kColumnFamily, p, o);
    Bytes ops_row = (config_.class_predicate && triple.predicate == *config_.class_predicate)
                        ? class_row_key(triple.object, triple.subject)
                        : o;
    store_.put(kTableOps, ops_row, kColumnFamily, p, s);
    return true;
}

LoadStats RdfStore::load_ntriples(std::istream& in) {
    LoadStats stats;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        try {
            std::optional<Triple> triple = parse_ntriples_line(line);
            if (!triple) continue;
            ++stats.triples_read;
            if (store_triple(*triple))
                ++stats.triples_stored;
            else
                ++stats.duplicates;
        } catch (const SyntaxError& e) {
            stats.errors.push_back(ParseIssue{line_no, e.what()});
        }
    }
    return stats;
}

Triple RdfStore::cell_to_triple(const std::string& table, const Bytes& row,
                                const Cell& cell) const {
    if (table == kTableSpo)
        return Triple{decode_term(row), decode_term(cell.column), decode_term(cell.value)};
    // T_ops: the value always holds the subject. Compound rows carry the
    // object before the NUL separator; plain rows are the object itself.
    auto sep = row.find('\0');
    Bytes object_part = sep == Bytes::npos ? row : row.substr(0, sep);
    return Triple{decode_term(cell.value), decode_term(cell.column), decode_term(object_part)};
}

void RdfStore::append_matches(const TriplePattern& pattern, const std::string& table,
                              const std::vector<RowResult>& rows, MappingList& out) const {
    for (const RowResult& row : rows) {
        for (const Cell& cell : row.cells) {
            Triple triple = cell_to_triple(table, row.row, cell);
            if (auto mapping = match(pattern, triple)) out.push_back(std::move(*mapping));
        }
    }
}

void RdfStore::append_class_rows(const TriplePattern& pattern, const Bytes& object_row,
                                 MappingList& out) const {
    if (!config_.class_predicate) return;
    Bytes prefix = object_row;
    prefix.push_back('\0');
    auto rows = store_.scan(kTableOps, prefix, prefix_upper_bound(prefix), FilterSpec::none());
    append_matches(pattern, kTableOps, rows, out);
}

MappingList RdfStore::lookup(const TriplePattern& pattern) const {
    AccessPlan plan = resolve_pattern(pattern, config_);
    MappingList out;
    switch (plan.access) {
        case AccessPlan::Access::Get: {
            RowResult row = store_.get(plan.table, *plan.row, plan.filter);
            append_matches(pattern, plan.table, {row}, out);
            // A T_ops point get with a variable predicate must also cover
            // the class-assignment triples of this object, which live in
            // compound rows next to it.
            if (plan.table == kTableOps && is_variable(pattern.predicate))
                append_class_rows(pattern, *plan.row, out);
            break;
        }
        case AccessPlan::Access::Scan: {
            auto rows = store_.scan(plan.table, Bytes(), std::nullopt, plan.filter);
            append_matches(pattern, plan.table, rows, out);
            break;
        }
        case AccessPlan::Access::ClassRangeScan: {
            auto rows = store_.scan(kTableOps, *plan.row, prefix_upper_bound(*plan.row),
                                    plan.filter);
            append_matches(pattern, kTableOps, rows, out);
            break;
        }
    }
    return out;
}

std::vector<MappingList> RdfStore::lookup_partitioned(const TriplePattern& pattern) const {
    AccessPlan plan = resolve_pattern(pattern, config_);
    std::vector<MappingList> partitions;
    if (plan.access == AccessPlan::Access::Scan) {
        auto region_rows = store_.partitioned_scan(plan.table, plan.filter);
        partitions.resize(region_rows.size());
        for (std::size_t i = 0; i < region_rows.size(); ++i)
            append_matches(pattern, plan.table, region_rows[i].rows, partitions[i]);
        return partitions;
    }
    // Point and prefix reads seed a single partition, served by a scan so
    // that query start-up never counts as get traffic.
    partitions.resize(1);
    if (plan.access == AccessPlan::Access::Get) {
        auto rows = store_.scan(plan.table, *plan.row, key_successor(*plan.row), plan.filter);
        append_matches(pattern, plan.table, rows, partitions[0]);
        if (plan.table == kTableOps && is_variable(pattern.predicate))
            append_class_rows(pattern, *plan.row, partitions[0]);
    } else {
        auto rows =
            store_.scan(kTableOps, *plan.row, prefix_upper_bound(*plan.row), plan.filter);
        append_matches(pattern, kTableOps, rows, partitions[0]);
    }
    return partitions;
}

MappingList RdfStore::multi_column_lookup(const Term& row_term,
                                          const std::vector<TriplePattern>& patterns) const {
    if (patterns.empty())
        throw PreconditionError("multi-column lookup needs at least one pattern");

    auto holds_term = [&](const PatternTerm& pt) {
        return is_term(pt) && as_term(pt) == row_term;
    };
    bool subject_side = true, object_side = true;
    for (const TriplePattern& pattern : patterns) {
        subject_side = subject_side && holds_term(pattern.subject);
        object_side = object_side && holds_term(pattern.object);
    }
    if (!subject_side && !object_side)
        throw PreconditionError("patterns do not share the row term in one position");

    std::string table = subject_side ? kTableSpo : kTableOps;
    if (!subject_side) {
        for (const TriplePattern& pattern : patterns) {
            if (!is_term(pattern.predicate))
                throw PreconditionError(
                    "object-side multi-column lookup requires bound predicates");
            if (config_.class_predicate && as_term(pattern.predicate) == *config_.class_predicate)
                throw PreconditionError(
                    "object-side multi-column lookup cannot serve class-assignment patterns");
        }
    }

    // One get for the whole shared row; every pattern is matched against
    // it client-side.
    RowResult row = store_.get(table, encode_term(row_term), FilterSpec::none());

    MappingList acc;
    bool first = true;
    for (const TriplePattern& pattern : patterns) {
        MappingList matches;
        append_matches(pattern, table, {row}, matches);
        if (matches.empty()) return {};  // row lacks this pattern entirely
        if (first) {
            acc = std::move(matches);
            first = false;
            continue;
        }
        MappingList next;
        next.reserve(acc.size() * matches.size());
        for (const SolutionMapping& a : acc)
            for (const SolutionMapping& b : matches)
                if (compatible(a, b)) next.push_back(merge(a, b));
        if (next.empty()) return {};
        acc = std::move(next);
    }
    return acc;
}

std::vector<Triple> RdfStore::all_triples() const {
    std::vector<Triple> triples;
    store_.for_each_cell(kTableSpo, [&](const Bytes& row, const Cell& cell) {
        triples.push_back(cell_to_triple(kTableSpo, row, cell));
    });
    return triples;
}

std::uint64_t RdfStore::triple_count() const { return store_.cell_count(kTableSpo); }

void RdfStore::persist(const std::filesystem::path& dir) const {
    store_.persist(dir);
    nlohmann::json j;
    if (config_.class_predicate) {
        j["class_predicate"] = {
            {"kind", config_.class_predicate->kind == Term::Kind::Iri ? "iri" : "literal"},
            {"lexical", config_.class_predicate->lexical}};
    } else {
        j["class_predicate"] = nullptr;
    }
    std::ofstream out(dir / kConfigFile, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("cannot write " + (dir / kConfigFile).string());
}

RdfStore RdfStore::open(const std::filesystem::path& dir) {
    Store store = Store::open(dir);
    RdfConfig config;
    std::filesystem::path config_path = dir / kConfigFile;
    if (std::filesystem::exists(config_path)) {
        std::ifstream in(config_path, std::ios::binary);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CorruptFileError(config_path.string() + ": " + e.what());
        }
        if (!j.contains("class_predicate"))
            throw CorruptFileError(config_path.string() + ": missing class_predicate");
        if (j["class_predicate"].is_null()) {
            config.class_predicate = std::nullopt;
        } else {
            Term term;
            term.kind = j["class_predicate"].at("kind").get<std::string>() == "literal"
                            ? Term::Kind::Literal
                            : Term::Kind::Iri;
            term.lexical = j["class_predicate"].at("lexical").get<std::string>();
            config.class_predicate = term;
        }
    } else if (store.has_table(kTableSpo)) {
        throw CorruptFileError("store data present but " + config_path.string() + " is missing");
    }
    return RdfStore(std::move(config), std::move(store));
}

}  // namespace mapsin
