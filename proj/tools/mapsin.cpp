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

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mapsin/baseline.hpp"
#include "mapsin/datagen.hpp"
#include "mapsin/errors.hpp"
#include "mapsin/executor.hpp"
#include "mapsin/planner.hpp"
#include "mapsin/rdf_store.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 1 I/O or data failure, 2 usage or query error,
// 3 cross-engine verification failure.
constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitVerification = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mapsin::IoError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw mapsin::IoError("cannot read " + path);
    return buf.str();
}

mapsin::RdfConfig make_rdf_config(const std::string& class_predicate,
                                  std::uint64_t region_size) {
    mapsin::RdfConfig config;
    if (class_predicate.empty()) {
        config.class_predicate = std::nullopt;
    } else {
        std::string text = class_predicate;
        if (text.size() >= 2 && text.front() == '<' && text.back() == '>')
            text = text.substr(1, text.size() - 2);
        config.class_predicate = mapsin::Term::iri(text);
    }
    config.max_region_bytes = region_size;
    return config;
}

mapsin::PlanMode require_mode(const std::string& text) {
    auto mode = mapsin::parse_plan_mode(text);
    if (!mode) throw mapsin::PreconditionError("unknown mode: " + text);
    return *mode;
}

// ---------------------------------------------------------------------------
// Result printing

std::vector<std::string> result_rows(const mapsin::MappingList& mappings,
                                     const std::vector<std::string>& projection) {
    std::vector<std::string> rows;
    rows.reserve(mappings.size());
    for (const mapsin::SolutionMapping& mapping : mappings) {
        std::string row;
        for (std::size_t i = 0; i < projection.size(); ++i) {
            if (i > 0) row.push_back('\t');
            if (const mapsin::Term* term = mapping.find(projection[i]))
                row += mapsin::to_string(*term);
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

void print_tsv(std::ostream& out, const mapsin::MappingList& mappings,
               const std::vector<std::string>& projection) {
    std::string header;
    for (std::size_t i = 0; i < projection.size(); ++i) {
        if (i > 0) header.push_back('\t');
        header += "?" + projection[i];
    }
    out << header << "\n";
    for (const std::string& row : result_rows(mappings, projection)) out << row << "\n";
}

void add_meter_delta(json& stats, const mapsin::MeterSnapshot& delta) {
    stats["get_requests"] = delta.gets;
    stats["rows_scanned"] = delta.rows_scanned;
    stats["cells_fetched"] = delta.cells_returned;
    stats["bytes_fetched"] = delta.bytes_returned;
}

// ---------------------------------------------------------------------------
// Engine dispatch shared by query and bench

struct EngineRun {
    mapsin::MappingList mappings;
    json stats;
};

EngineRun run_engine(const mapsin::RdfStore& store, const mapsin::BasicGraphPattern& query,
                     const std::string& engine, mapsin::PlanMode mode,
                     const mapsin::ExecOptions& exec_options) {
    EngineRun run;
    run.stats["engine"] = engine;
    if (engine == "mapsin") {
        mapsin::ExecutionPlan plan = mapsin::plan(query, mode, store.config());
        mapsin::Executor executor(store, exec_options);
        mapsin::ExecResult result = executor.execute(plan);
        run.mappings = std::move(result.mappings);
        run.stats["mode"] = mapsin::to_string(plan.mode);
        run.stats["workers"] = exec_options.workers;
        run.stats["stages_run"] = result.stats.stages_run;
        run.stats["map_invocations"] = result.stats.map_invocations;
        run.stats["get_requests"] = result.stats.get_requests;
        run.stats["rows_scanned"] = result.stats.rows_scanned;
        run.stats["cells_fetched"] = result.stats.cells_fetched;
        run.stats["bytes_fetched"] = result.stats.bytes_fetched;
        run.stats["scan_routed_substitutions"] = result.stats.scan_routed_substitutions;
        run.stats["cartesian_stages"] = result.stats.cartesian_stages;
        run.stats["intermediate_mappings"] = result.stats.intermediate_mappings;
    } else if (engine == "reduce") {
        mapsin::MeterSnapshot before = store.store().meter();
        mapsin::BaselineResult result = mapsin::execute_reduce_side(store, query);
        run.mappings = std::move(result.mappings);
        run.stats["records_shuffled"] = result.stats.records_shuffled;
        run.stats["bytes_shuffled"] = result.stats.bytes_shuffled;
        run.stats["reduce_groups"] = result.stats.reduce_groups;
        add_meter_delta(run.stats, store.store().meter() - before);
    } else if (engine == "oracle") {
        run.mappings = mapsin::oracle_evaluate(query, store.all_triples());
    } else {
        throw mapsin::PreconditionError("unknown engine: " + engine);
    }
    run.stats["result_count"] = run.mappings.size();
    return run;
}

// ---------------------------------------------------------------------------
// Subcommands

struct GenerateArgs {
    std::string out_path;
    mapsin::GenConfig config;
};

int cmd_generate(const GenerateArgs& args) {
    std::ofstream out(args.out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw mapsin::IoError("cannot write " + args.out_path);
    std::uint64_t triples = mapsin::generate(args.config, out);
    out.flush();
    if (!out) throw mapsin::IoError("cannot write " + args.out_path);
    json report{{"triples", triples}, {"path", args.out_path}};
    std::cout << report.dump() << "\n";
    return kExitOk;
}

struct LoadArgs {
    std::string store_dir;
    std::vector<std::string> inputs;
    std::string class_predicate = "rdf:type";
    std::uint64_t region_size = mapsin::Store::kDefaultMaxRegionBytes;
};

int cmd_load(const LoadArgs& args) {
    mapsin::RdfStore store(make_rdf_config(args.class_predicate, args.region_size));
    mapsin::LoadStats total;
    for (const std::string& path : args.inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw mapsin::IoError("cannot read " + path);
        mapsin::LoadStats stats = store.load_ntriples(in);
        for (const mapsin::ParseIssue& issue : stats.errors)
            std::cerr << path << ":" << issue.line << ": " << issue.message << "\n";
        total.triples_read += stats.triples_read;
        total.triples_stored += stats.triples_stored;
        total.duplicates += stats.duplicates;
        total.errors.insert(total.errors.end(), stats.errors.begin(), stats.errors.end());
    }
    store.persist(args.store_dir);
    json report{
        {"triples_read", total.triples_read},
        {"triples_stored", total.triples_stored},
        {"duplicates", total.duplicates},
        {"parse_errors", total.errors.size()},
        {"t_spo_cells", store.store().cell_count(mapsin::kTableSpo)},
        {"t_spo_regions", store.store().regions(mapsin::kTableSpo).size()},
        {"t_ops_cells", store.store().cell_count(mapsin::kTableOps)},
        {"t_ops_regions", store.store().regions(mapsin::kTableOps).size()},
    };
    std::cout << report.dump() << "\n";
    return kExitOk;
}

struct QueryArgs {
    std::string store_dir;
    std::string query_path;
    std::string engine = "mapsin";
    std::string mode = "auto";
    unsigned workers = 1;
    std::size_t spill_threshold = std::size_t(1) << 22;
    bool explain = false;
    std::string stats_path;
};

int cmd_query(const QueryArgs& args) {
    mapsin::RdfStore store = mapsin::RdfStore::open(args.store_dir);
    mapsin::BasicGraphPattern query = mapsin::parse_query(read_file(args.query_path));
    mapsin::PlanMode mode = require_mode(args.mode);

    if (args.explain) {
        mapsin::ExecutionPlan plan = mapsin::plan(query, mode, store.config());
        std::cout << mapsin::explain(plan, store.config());
        return kExitOk;
    }

    mapsin::ExecOptions exec_options;
    exec_options.workers = args.workers;
    exec_options.spill_threshold = args.spill_threshold;
    EngineRun run = run_engine(store, query, args.engine, mode, exec_options);

    print_tsv(std::cout, run.mappings, query.effective_projection());
    std::cerr << run.stats.dump() << "\n";
    if (!args.stats_path.empty()) {
        std::ofstream out(args.stats_path, std::ios::binary | std::ios::trunc);
        out << run.stats.dump(2) << "\n";
        if (!out) throw mapsin::IoError("cannot write " + args.stats_path);
    }
    return kExitOk;
}

struct BenchArgs {
    std::string store_dir;
    std::string queries_dir;
    std::string engines = "mapsin,reduce";
    std::string mode = "auto";
    unsigned workers = 1;
    unsigned repeat = 1;
};

int cmd_bench(const BenchArgs& args) {
    mapsin::RdfStore store = mapsin::RdfStore::open(args.store_dir);
    mapsin::PlanMode mode = require_mode(args.mode);

    std::vector<std::string> engines;
    std::stringstream engine_list(args.engines);
    std::string engine;
    while (std::getline(engine_list, engine, ',')) {
        if (engine.empty()) continue;
        if (engine != "mapsin" && engine != "reduce" && engine != "oracle")
            throw mapsin::PreconditionError("unknown engine: " + engine);
        engines.push_back(engine);
    }
    if (engines.empty()) throw mapsin::PreconditionError("no engines selected");

    std::vector<std::filesystem::path> query_files;
    if (!std::filesystem::is_directory(args.queries_dir))
        throw mapsin::IoError("not a directory: " + args.queries_dir);
    for (const auto& entry : std::filesystem::directory_iterator(args.queries_dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension();
        if (ext == ".rq" || ext == ".sparql") query_files.push_back(entry.path());
    }
    std::sort(query_files.begin(), query_files.end());
    if (query_files.empty())
        throw mapsin::IoError("no .rq or .sparql files in " + args.queries_dir);

    mapsin::ExecOptions exec_options;
    exec_options.workers = args.workers;

    bool mismatch = false;
    for (unsigned round = 0; round < std::max(1u, args.repeat); ++round) {
        for (const std::filesystem::path& path : query_files) {
            mapsin::BasicGraphPattern query = mapsin::parse_query(read_file(path.string()));
            std::map<std::string, std::size_t> counts;
            for (const std::string& eng : engines) {
                EngineRun run = run_engine(store, query, eng, mode, exec_options);
                run.stats["query"] = path.filename().string();
                run.stats["round"] = round;
                std::cout << run.stats.dump() << "\n";
                counts[eng] = run.mappings.size();
            }
            for (const auto& [eng, count] : counts) {
                if (count != counts.begin()->second) {
                    std::cerr << "verification failed: " << path.filename().string() << ": "
                              << counts.begin()->first << " returned "
                              << counts.begin()->second << " rows, " << eng << " returned "
                              << count << "\n";
                    mismatch = true;
                }
            }
        }
    }
    return mismatch ? kExitVerification : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPARQL basic graph pattern engine over a sorted-map store"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate", "Generate a synthetic N-Triples file");
    generate->add_option("--out", gen.out_path, "Output file")->required();
    generate->add_option("--seed", gen.config.seed, "RNG seed");
    generate->add_option("--entities", gen.config.entities, "Number of entities");
    generate->add_option("--classes", gen.config.classes, "Number of classes");
    generate->add_option("--attrs-min", gen.config.attributes_min, "Min attributes per entity");
    generate->add_option("--attrs-max", gen.config.attributes_max, "Max attributes per entity");
    generate->add_option("--links-min", gen.config.links_min, "Min links per entity");
    generate->add_option("--links-max", gen.config.links_max, "Max links per entity");
    generate->add_option("--class-skew", gen.config.class_skew,
                         "Probability of class 0 membership");

    LoadArgs load;
    CLI::App* load_cmd = app.add_subcommand("load", "Load N-Triples into a store directory");
    load_cmd->add_option("--store", load.store_dir, "Store directory")->required();
    load_cmd->add_option("--input", load.inputs, "Input N-Triples file(s)")->required();
    load_cmd->add_option("--class-predicate", load.class_predicate,
                         "Class-assignment predicate IRI; empty disables compound row keys");
    load_cmd->add_option("--region-size", load.region_size, "Region split threshold in bytes")
        ->envname("MAPSIN_REGION_SIZE");

    QueryArgs query;
    CLI::App* query_cmd = app.add_subcommand("query", "Run a query against a store");
    query_cmd->add_option("--store", query.store_dir, "Store directory")->required();
    query_cmd->add_option("--query", query.query_path, "Query file")->required();
    query_cmd->add_option("--engine", query.engine, "Engine: mapsin, reduce, or oracle")
        ->check(CLI::IsMember({"mapsin", "reduce", "oracle"}));
    query_cmd->add_option("--mode", query.mode,
                          "Join mode: cascade, multiway, multiway-unopt, or auto")
        ->check(CLI::IsMember({"cascade", "multiway", "multiway-unopt", "auto"}));
    query_cmd->add_option("--workers", query.workers, "Worker threads")
        ->envname("MAPSIN_WORKERS");
    query_cmd->add_option("--spill-threshold", query.spill_threshold,
                          "Mappings per partition held in memory between stages");
    query_cmd->add_flag("--explain", query.explain, "Print the plan instead of executing");
    query_cmd->add_option("--stats", query.stats_path, "Also write the stats JSON to this file");

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Run a query directory on several engines");
    bench_cmd->add_option("--store", bench.store_dir, "Store directory")->required();
    bench_cmd->add_option("--queries", bench.queries_dir, "Directory of .rq/.sparql files")
        ->required();
    bench_cmd->add_option("--engines", bench.engines, "Comma-separated engine list");
    bench_cmd->add_option("--mode", bench.mode, "Join mode for the mapsin engine")
        ->check(CLI::IsMember({"cascade", "multiway", "multiway-unopt", "auto"}));
    bench_cmd->add_option("--workers", bench.workers, "Worker threads")
        ->envname("MAPSIN_WORKERS");
    bench_cmd->add_option("--repeat", bench.repeat, "Rounds to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen);
        if (load_cmd->parsed()) return cmd_load(load);
        if (query_cmd->parsed()) return cmd_query(query);
        if (bench_cmd->parsed()) return cmd_bench(bench);
        std::cerr << "no subcommand given\n";
        return kExitUsage;
    } catch (const mapsin::SyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const mapsin::UnsupportedConstructError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const mapsin::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const mapsin::InvertedRangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const mapsin::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
