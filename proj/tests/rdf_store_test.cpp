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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "mapsin/errors.hpp"
#include "mapsin/rdf_store.hpp"
#include "support.hpp"

using namespace mapsin;
using test::iri;
using test::lit;
using test::mapping;
using test::var;

namespace {

AccessPlan make_plan(std::string table, AccessPlan::Access access, std::optional<Bytes> row,
                     FilterSpec filter) {
    AccessPlan plan;
    plan.table = std::move(table);
    plan.access = access;
    plan.row = std::move(row);
    plan.filter = std::move(filter);
    return plan;
}

std::vector<std::string> sorted_ntriples(const std::vector<Triple>& triples) {
    std::vector<std::string> lines;
    lines.reserve(triples.size());
    for (const Triple& t : triples) lines.push_back(to_ntriples(t));
    std::sort(lines.begin(), lines.end());
    return lines;
}

MappingList flatten(const std::vector<MappingList>& partitions) {
    MappingList all;
    for (const MappingList& part : partitions)
        all.insert(all.end(), part.begin(), part.end());
    return all;
}

}  // namespace

TEST_CASE("pattern shapes route to the expected table, access, and filter") {
    RdfConfig config;  // class predicate rdf:type
    Term s = iri("s"), p = iri("p"), o = iri("o");
    Bytes es = encode_term(s), ep = encode_term(p), eo = encode_term(o);
    using A = AccessPlan::Access;

    CHECK(resolve_pattern({s, p, o}, config) ==
          make_plan(kTableSpo, A::Get, es, FilterSpec::column_and_value_equals(ep, eo)));
    CHECK(resolve_pattern({s, p, var("o")}, config) ==
          make_plan(kTableSpo, A::Get, es, FilterSpec::column_equals(ep)));
    CHECK(resolve_pattern({s, var("p"), o}, config) ==
          make_plan(kTableSpo, A::Get, es, FilterSpec::value_equals(eo)));
    CHECK(resolve_pattern({s, var("p"), var("o")}, config) ==
          make_plan(kTableSpo, A::Get, es, FilterSpec::none()));
    CHECK(resolve_pattern({var("s"), p, o}, config) ==
          make_plan(kTableOps, A::Get, eo, FilterSpec::column_equals(ep)));
    CHECK(resolve_pattern({var("s"), var("p"), o}, config) ==
          make_plan(kTableOps, A::Get, eo, FilterSpec::none()));
    CHECK(resolve_pattern({var("s"), p, var("o")}, config) ==
          make_plan(kTableSpo, A::Scan, std::nullopt, FilterSpec::column_equals(ep)));
    CHECK(resolve_pattern({var("s"), var("p"), var("o")}, config) ==
          make_plan(kTableSpo, A::Scan, std::nullopt, FilterSpec::none()));
}

TEST_CASE("class-assignment patterns become a compound-row range scan") {
    RdfConfig config;
    Term type = *config.class_predicate;
    Term person = iri("Person");
    Bytes prefix = encode_term(person);
    prefix.push_back('\0');

    AccessPlan plan = resolve_pattern({var("s"), type, person}, config);
    CHECK(plan == make_plan(kTableOps, AccessPlan::Access::ClassRangeScan, prefix,
                            FilterSpec::none()));

    SUBCASE("a disabled class predicate routes it like any bound object") {
        RdfConfig plain;
        plain.class_predicate = std::nullopt;
        CHECK(resolve_pattern({var("s"), type, person}, plain) ==
              make_plan(kTableOps, AccessPlan::Access::Get, encode_term(person),
                        FilterSpec::column_equals(encode_term(type))));
    }
    SUBCASE("only the configured predicate is special") {
        RdfConfig custom;
        custom.class_predicate = iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type");
        CHECK(resolve_pattern({var("s"), type, person}, custom).access ==
              AccessPlan::Access::Get);
        CHECK(resolve_pattern({var("s"), *custom.class_predicate, person}, custom).access ==
              AccessPlan::Access::ClassRangeScan);
    }
    SUBCASE("a bound subject overrides the class routing") {
        CHECK(resolve_pattern({iri("Alex"), type, person}, config).table == kTableSpo);
    }
}

TEST_CASE("storing a triple writes one cell per table") {
    RdfStore store;
    REQUIRE(store.store_triple({iri("s"), iri("p1"), iri("o")}));

    const Store& kv = store.store();
    CHECK(kv.contains_cell(kTableSpo, encode_term(iri("s")), kColumnFamily,
                           encode_term(iri("p1")), encode_term(iri("o"))));
    CHECK(kv.contains_cell(kTableOps, encode_term(iri("o")), kColumnFamily,
                           encode_term(iri("p1")), encode_term(iri("s"))));
    CHECK(store.triple_count() == 1);
    CHECK(kv.cell_count(kTableSpo) == 1);
    CHECK(kv.cell_count(kTableOps) == 1);
}

TEST_CASE("class-assignment triples land in a compound object row") {
    RdfStore store;
    Term type = iri("rdf:type");
    REQUIRE(store.store_triple({iri("Alex"), type, iri("Person")}));

    Bytes compound = encode_term(iri("Person"));
    compound.push_back('\0');
    compound += encode_term(iri("Alex"));
    CHECK(store.store().contains_cell(kTableOps, compound, kColumnFamily, encode_term(type),
                                      encode_term(iri("Alex"))));
    CHECK_FALSE(store.store().contains_cell(kTableOps, encode_term(iri("Person")),
                                            kColumnFamily, encode_term(type),
                                            encode_term(iri("Alex"))));
    // The subject-keyed copy is unaffected by the compound scheme.
    CHECK(store.store().contains_cell(kTableSpo, encode_term(iri("Alex")), kColumnFamily,
                                      encode_term(type), encode_term(iri("Person"))));

    SUBCASE("disabling the scheme stores a plain object row") {
        RdfConfig config;
        config.class_predicate = std::nullopt;
        RdfStore flat(config);
        flat.store_triple({iri("Alex"), type, iri("Person")});
        CHECK(flat.store().contains_cell(kTableOps, encode_term(iri("Person")), kColumnFamily,
                                         encode_term(type), encode_term(iri("Alex"))));
    }
}

TEST_CASE("triples are a set even though cells are versioned") {
    RdfStore store;
    Triple t{iri("s"), iri("p"), iri("o")};
    CHECK(store.store_triple(t));
    CHECK_FALSE(store.store_triple(t));
    CHECK(store.triple_count() == 1);
    CHECK(store.store().cell_count(kTableOps) == 1);

    // A different object of the same (s, p) is a second version of the
    // same T_spo column and still a distinct triple.
    CHECK(store.store_triple({iri("s"), iri("p"), iri("o2")}));
    CHECK(store.triple_count() == 2);
    MappingList both = store.lookup({iri("s"), iri("p"), var("x")});
    CHECK(test::canonical_rows(both) ==
          test::canonical_rows({mapping({{"x", iri("o")}}), mapping({{"x", iri("o2")}})}));
}

TEST_CASE("N-Triples lines parse into triples") {
    auto t = parse_ntriples_line("<Article1> <title> \"PigSPARQL\" .");
    REQUIRE(t.has_value());
    CHECK(*t == Triple{iri("Article1"), iri("title"), lit("\"PigSPARQL\"")});

    CHECK(*parse_ntriples_line("<a> <b> <c> .") == Triple{iri("a"), iri("b"), iri("c")});
    CHECK(parse_ntriples_line("  <a>\t<b> \"x\\\"y\" . ")->object == lit("\"x\\\"y\""));
    CHECK(parse_ntriples_line("<a> <b> \"1940\"^^<http://www.w3.org/2001/XMLSchema#gYear> .")
              ->object == lit("\"1940\"^^<http://www.w3.org/2001/XMLSchema#gYear>"));
    CHECK(parse_ntriples_line("<a> <b> \"hi\"@en-GB .")->object == lit("\"hi\"@en-GB"));

    CHECK_FALSE(parse_ntriples_line("").has_value());
    CHECK_FALSE(parse_ntriples_line("   \t ").has_value());
    CHECK_FALSE(parse_ntriples_line("# just a comment").has_value());
    CHECK_FALSE(parse_ntriples_line("  # indented comment").has_value());
}

TEST_CASE("malformed N-Triples lines raise positioned errors") {
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> <c>"), SyntaxError);       // no dot
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> <c> . junk"), SyntaxError);
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> ."), SyntaxError);         // short
    CHECK_THROWS_AS(parse_ntriples_line("<unterminated <b> <c> ."), SyntaxError);
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> \"unterminated ."), SyntaxError);
    CHECK_THROWS_AS(parse_ntriples_line("\"lit\" <b> <c> ."), SyntaxError);  // literal subject
    CHECK_THROWS_AS(parse_ntriples_line("<a> \"lit\" <c> ."), SyntaxError);
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> \"x\"^^gYear ."), SyntaxError);
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> \"x\"@ ."), SyntaxError);
    CHECK_THROWS_AS(parse_ntriples_line("a <b> <c> ."), SyntaxError);

    try {
        parse_ntriples_line("<a> <b> <c>");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.column == 12);  // one past the end of the line
    }
}

TEST_CASE("loading collects per-line issues instead of failing the stream") {
    RdfStore store;
    std::istringstream in(
        "<Article1> <title> \"PigSPARQL\" .\n"
        "\n"
        "# comment\n"
        "<Article1> <title> \"PigSPARQL\" .\n"
        "<bad line\n"
        "<Article2> <cite> <Article1> .\r\n");
    LoadStats stats = store.load_ntriples(in);
    CHECK(stats.triples_read == 3);
    CHECK(stats.triples_stored == 2);
    CHECK(stats.duplicates == 1);
    REQUIRE(stats.errors.size() == 1);
    CHECK(stats.errors[0].line == 5);
    CHECK(store.triple_count() == 2);
}

TEST_CASE("lookup answers each access shape over the sample graph") {
    RdfStore store;
    test::load_sample_graph(store);
    Term article1 = iri("Article1"), author = iri("author"), title = iri("title");

    SUBCASE("ground patterns return one empty mapping or nothing") {
        MappingList hit = store.lookup({article1, title, lit("\"PigSPARQL\"")});
        REQUIRE(hit.size() == 1);
        CHECK(hit[0] == SolutionMapping{});
        CHECK(store.lookup({article1, title, lit("\"RDFPath\"")}).empty());
    }
    SUBCASE("subject-bound lookups are one metered get") {
        MeterSnapshot before = store.store().meter();
        MappingList titles = store.lookup({article1, title, var("t")});
        MeterSnapshot delta = store.store().meter() - before;
        CHECK(test::canonical_rows(titles) ==
              test::canonical_rows({mapping({{"t", lit("\"PigSPARQL\"")}})}));
        CHECK(delta.gets == 1);
        CHECK(delta.rows_scanned == 0);
        CHECK(delta.cells_returned == 1);
    }
    SUBCASE("object-bound lookups read T_ops") {
        MeterSnapshot before = store.store().meter();
        MappingList by_alex = store.lookup({var("a"), author, iri("Alex")});
        MeterSnapshot delta = store.store().meter() - before;
        CHECK(test::canonical_rows(by_alex) ==
              test::canonical_rows({mapping({{"a", iri("Article1")}}),
                                    mapping({{"a", iri("Article2")}})}));
        CHECK(delta.gets == 1);
        CHECK(delta.rows_scanned == 0);
    }
    SUBCASE("subject-only lookups return the whole row") {
        CHECK(store.lookup({article1, var("p"), var("o")}).size() == 4);
        CHECK(store.lookup({article1, var("p"), iri("Alex")}) ==
              MappingList{mapping({{"p", author}})});
    }
    SUBCASE("unbound patterns scan without gets") {
        MeterSnapshot before = store.store().meter();
        CHECK(store.lookup({var("s"), var("p"), var("o")}).size() == 9);
        CHECK(store.lookup({var("s"), author, var("o")}).size() == 4);
        MeterSnapshot delta = store.store().meter() - before;
        CHECK(delta.gets == 0);
        CHECK(delta.rows_scanned == 4);  // two T_spo rows per scan
    }
    SUBCASE("a repeated variable must match the same term") {
        RdfStore loops;
        loops.store_triple({iri("a"), iri("likes"), iri("a")});
        loops.store_triple({iri("a"), iri("likes"), iri("b")});
        CHECK(loops.lookup({var("x"), iri("likes"), var("x")}) ==
              MappingList{mapping({{"x", iri("a")}})});
    }
}

TEST_CASE("lookups see class members through every object-keyed shape") {
    RdfStore store;
    Term type = iri("rdf:type"), person = iri("Person");
    store.store_triple({iri("Alex"), type, person});
    store.store_triple({iri("Bob"), type, person});
    store.store_triple({iri("Acme"), iri("seeks"), person});

    SUBCASE("the class pattern is a gets-free range scan") {
        MeterSnapshot before = store.store().meter();
        MappingList members = store.lookup({var("s"), type, person});
        MeterSnapshot delta = store.store().meter() - before;
        CHECK(test::canonical_rows(members) ==
              test::canonical_rows({mapping({{"s", iri("Alex")}}),
                                    mapping({{"s", iri("Bob")}})}));
        CHECK(delta.gets == 0);
        CHECK(delta.rows_scanned == 2);
    }
    SUBCASE("a variable predicate supplements the point get with the class rows") {
        MappingList all = store.lookup({var("s"), var("p"), person});
        CHECK(test::canonical_rows(all) ==
              test::canonical_rows({mapping({{"s", iri("Alex")}, {"p", type}}),
                                    mapping({{"s", iri("Bob")}, {"p", type}}),
                                    mapping({{"s", iri("Acme")}, {"p", iri("seeks")}})}));
    }
    SUBCASE("a bound non-class predicate needs no supplement") {
        MeterSnapshot before = store.store().meter();
        CHECK(store.lookup({var("s"), iri("seeks"), person}).size() == 1);
        MeterSnapshot delta = store.store().meter() - before;
        CHECK(delta.gets == 1);
        CHECK(delta.rows_scanned == 0);
    }
    SUBCASE("a full scan sees class triples once") {
        CHECK(store.lookup({var("s"), var("p"), var("o")}).size() == 3);
    }
}

TEST_CASE("partitioned lookup matches lookup and never issues gets") {
    RdfConfig config;
    config.max_region_bytes = 200;  // force several T_spo regions
    RdfStore store(config);
    test::load_sample_graph(store);
    store.store_triple({iri("Alex"), iri("rdf:type"), iri("Person")});
    store.store_triple({iri("Bob"), iri("rdf:type"), iri("Person")});

    TriplePattern shapes[] = {
        {var("s"), var("p"), var("o")},
        {var("s"), iri("author"), var("o")},
        {iri("Article1"), var("p"), var("o")},
        {iri("Article1"), iri("author"), var("o")},
        {var("a"), iri("author"), iri("Alex")},
        {var("s"), var("p"), iri("Person")},
        {var("s"), iri("rdf:type"), iri("Person")},
        {iri("nope"), var("p"), var("o")},
    };
    for (const TriplePattern& pattern : shapes) {
        CAPTURE(to_string(resolve_pattern(pattern, config)));
        MappingList direct = store.lookup(pattern);
        MeterSnapshot before = store.store().meter();
        std::vector<MappingList> parts = store.lookup_partitioned(pattern);
        MeterSnapshot delta = store.store().meter() - before;
        CHECK(delta.gets == 0);
        CHECK(multiset_equal(flatten(parts), direct));
    }

    // Scan-routed patterns get one partition per region of the table.
    std::size_t spo_regions = store.store().regions(kTableSpo).size();
    CHECK(spo_regions > 1);
    CHECK(store.lookup_partitioned({var("s"), var("p"), var("o")}).size() == spo_regions);
    CHECK(store.lookup_partitioned({iri("Article1"), var("p"), var("o")}).size() == 1);
}

TEST_CASE("multi-column lookup fetches a shared row once") {
    RdfStore store;
    test::load_sample_graph(store);
    Term article2 = iri("Article2");

    SUBCASE("two patterns, one get, merged per cell match") {
        std::vector<TriplePattern> patterns = {
            {article2, iri("author"), var("author")},
            {article2, iri("title"), var("title")},
        };
        MeterSnapshot before = store.store().meter();
        MappingList result = store.multi_column_lookup(article2, patterns);
        MeterSnapshot delta = store.store().meter() - before;
        CHECK(delta.gets == 1);
        CHECK(delta.rows_scanned == 0);
        CHECK(test::canonical_rows(result) ==
              test::canonical_rows({
                  mapping({{"author", iri("Alex")}, {"title", lit("\"RDFPath\"")}}),
                  mapping({{"author", iri("Martin")}, {"title", lit("\"RDFPath\"")}}),
              }));
    }
    SUBCASE("one unmatched pattern annihilates the whole result") {
        MeterSnapshot before = store.store().meter();
        MappingList result = store.multi_column_lookup(
            article2, {{article2, iri("author"), var("a")},
                       {article2, iri("missing"), var("v")}});
        CHECK(result.empty());
        CHECK((store.store().meter() - before).gets == 1);
    }
    SUBCASE("per-pattern matches can still merge to nothing") {
        CHECK(store.multi_column_lookup(article2, {{article2, iri("author"), var("x")},
                                                   {article2, iri("title"), var("x")}})
                  .empty());
    }
    SUBCASE("ground member patterns act as a row-level check") {
        MappingList result = store.multi_column_lookup(
            article2, {{article2, iri("cite"), iri("Article1")},
                       {article2, iri("year"), var("y")}});
        CHECK(result == MappingList{mapping({{"y", lit("\"2011\"")}})});
        CHECK(store.multi_column_lookup(article2, {{article2, iri("cite"), iri("Article2")}})
                  .empty());
    }
    SUBCASE("object-side lookups work on T_ops rows") {
        MappingList result = store.multi_column_lookup(
            iri("Article1"), {{var("citer"), iri("cite"), iri("Article1")}});
        CHECK(result == MappingList{mapping({{"citer", iri("Article2")}})});
    }
}

TEST_CASE("multi-column lookup preconditions") {
    RdfStore store;
    test::load_sample_graph(store);
    Term article2 = iri("Article2");

    CHECK_THROWS_AS(store.multi_column_lookup(article2, {}), PreconditionError);
    // The row term must sit on the same side of every pattern.
    CHECK_THROWS_AS(store.multi_column_lookup(
                        article2, {{article2, iri("author"), var("a")},
                                   {var("b"), iri("cite"), article2}}),
                    PreconditionError);
    CHECK_THROWS_AS(store.multi_column_lookup(
                        article2, {{iri("Article1"), iri("author"), var("a")}}),
                    PreconditionError);
    // Object-side rows cannot answer variable or class predicates: those
    // triples may live outside the fetched row.
    CHECK_THROWS_AS(store.multi_column_lookup(
                        iri("Article1"), {{var("s"), var("p"), iri("Article1")}}),
                    PreconditionError);
    CHECK_THROWS_AS(store.multi_column_lookup(
                        iri("Person"), {{var("s"), iri("rdf:type"), iri("Person")}}),
                    PreconditionError);
}

TEST_CASE("all triples come back in subject-key order") {
    RdfStore store;
    test::load_sample_graph(store);
    store.store_triple({iri("Alex"), iri("rdf:type"), iri("Person")});

    std::vector<Triple> expected = test::sample_graph();
    expected.push_back({iri("Alex"), iri("rdf:type"), iri("Person")});
    CHECK(sorted_ntriples(store.all_triples()) == sorted_ntriples(expected));
    CHECK(store.triple_count() == expected.size());
    // Unmetered maintenance path.
    MeterSnapshot before = store.store().meter();
    store.all_triples();
    CHECK(store.store().meter() - before == MeterSnapshot{});
}

TEST_CASE("compound rows keep large classes splittable") {
    RdfConfig compound;
    compound.max_region_bytes = 256;
    RdfStore store(compound);

    RdfConfig flat;
    flat.class_predicate = std::nullopt;
    flat.max_region_bytes = 256;
    RdfStore fat(flat);

    for (int i = 0; i < 50; ++i) {
        Triple t{iri("e" + std::to_string(i)), iri("rdf:type"), iri("Person")};
        store.store_triple(t);
        fat.store_triple(t);
    }
    // Fifty compound rows split into several regions; one fat row cannot.
    CHECK(store.store().regions(kTableOps).size() > 1);
    CHECK(fat.store().regions(kTableOps).size() == 1);

    MappingList members = store.lookup({var("s"), iri("rdf:type"), iri("Person")});
    MappingList fat_members = fat.lookup({var("s"), iri("rdf:type"), iri("Person")});
    CHECK(members.size() == 50);
    CHECK(multiset_equal(members, fat_members));
}

TEST_CASE("persist and open round-trip the graph and the config") {
    test::TempDir dir;
    RdfConfig config;
    config.max_region_bytes = 300;
    {
        RdfStore store(config);
        test::load_sample_graph(store);
        store.store_triple({iri("Alex"), iri("rdf:type"), iri("Person")});
        store.persist(dir.path());
    }
    RdfStore reopened = RdfStore::open(dir.path());
    CHECK(reopened.config().class_predicate == iri("rdf:type"));
    CHECK(reopened.config().max_region_bytes == 300);
    CHECK(reopened.triple_count() == 10);
    CHECK(test::canonical_rows(reopened.lookup({var("s"), iri("rdf:type"), iri("Person")})) ==
          test::canonical_rows({mapping({{"s", iri("Alex")}})}));
    CHECK(reopened.lookup({iri("Article1"), iri("title"), var("t")}).size() == 1);

    SUBCASE("a disabled class predicate survives the round trip") {
        test::TempDir dir2;
        RdfConfig off;
        off.class_predicate = std::nullopt;
        RdfStore store(off);
        store.store_triple({iri("a"), iri("rdf:type"), iri("C")});
        store.persist(dir2.path());
        RdfStore back = RdfStore::open(dir2.path());
        CHECK_FALSE(back.config().class_predicate.has_value());
        CHECK(back.lookup({var("s"), iri("rdf:type"), iri("C")}).size() == 1);
    }
    SUBCASE("a literal class predicate keeps its kind") {
        test::TempDir dir2;
        RdfConfig odd;
        odd.class_predicate = lit("\"isa\"");
        RdfStore store(odd);
        store.persist(dir2.path());
        CHECK(RdfStore::open(dir2.path()).config().class_predicate == lit("\"isa\""));
    }
}

TEST_CASE("opening rejects missing or corrupt config sidecars") {
    test::TempDir dir;
    {
        RdfStore store;
        test::load_sample_graph(store);
        store.persist(dir.path());
    }
    SUBCASE("store data without rdf.json") {
        std::filesystem::remove(dir.path() / "rdf.json");
        CHECK_THROWS_AS(RdfStore::open(dir.path()), CorruptFileError);
    }
    SUBCASE("unparseable json") {
        std::ofstream(dir.path() / "rdf.json", std::ios::trunc) << "not json";
        CHECK_THROWS_AS(RdfStore::open(dir.path()), CorruptFileError);
    }
    SUBCASE("missing class_predicate key") {
        std::ofstream(dir.path() / "rdf.json", std::ios::trunc) << "{\"other\": 1}";
        CHECK_THROWS_AS(RdfStore::open(dir.path()), CorruptFileError);
    }
}
