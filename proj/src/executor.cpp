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

#include "mapsin/executor.hpp"

#include <unistd.h>

#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "mapsin/errors.hpp"

namespace mapsin {

namespace {

// Holds one partition's mappings between stages. Everything beyond the
// threshold is flushed to a private temporary file; iteration replays the
// file part first, so order is preserved.
class PartitionBuffer {
  public:
    PartitionBuffer(std::size_t threshold, const std::filesystem::path& dir)
        : threshold_(threshold == 0 ? 1 : threshold), dir_(dir) {}

    PartitionBuffer(PartitionBuffer&& other) noexcept
        : threshold_(other.threshold_),
          dir_(std::move(other.dir_)),
          path_(std::move(other.path_)),
          spilled_(other.spilled_),
          memory_(std::move(other.memory_)),
          count_(other.count_) {
        other.path_.clear();  // exactly one owner removes the spill file
        other.spilled_ = 0;
        other.count_ = 0;
    }
    PartitionBuffer& operator=(PartitionBuffer&&) = delete;

    ~PartitionBuffer() {
        if (!path_.empty()) {
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }

    void push(SolutionMapping mapping) {
        memory_.push_back(std::move(mapping));
        ++count_;
        if (memory_.size() >= threshold_) flush();
    }

    std::size_t size() const { return count_; }

    template <typename Fn>
    void for_each(Fn fn) const {
        if (!path_.empty()) {
            std::ifstream in(path_, std::ios::binary);
            if (!in) throw IoError("cannot read spill file " + path_.string());
            for (std::size_t i = 0; i < spilled_; ++i) fn(read_mapping(in));
        }
        for (const SolutionMapping& mapping : memory_) fn(mapping);
    }

  private:
    void flush() {
        if (path_.empty()) {
            static std::atomic<std::uint64_t> counter{0};
            path_ = dir_ / ("spill-" + std::to_string(::getpid()) + "-" +
                            std::to_string(counter.fetch_add(1)) + ".bin");
        }
        std::ofstream out(path_, std::ios::binary | std::ios::app);
        if (!out) throw IoError("cannot write spill file " + path_.string());
        for (const SolutionMapping& mapping : memory_) write_mapping(out, mapping);
        if (!out) throw IoError("cannot write spill file " + path_.string());
        spilled_ += memory_.size();
        memory_.clear();
    }

    static void write_mapping(std::ofstream& out, const SolutionMapping& mapping) {
        std::string buf;
        put_u32_le(buf, static_cast<std::uint32_t>(mapping.bindings.size()));
        for (const auto& [name, term] : mapping.bindings) {
            put_u32_le(buf, static_cast<std::uint32_t>(name.size()));
            buf += name;
            Bytes encoded = encode_term(term);
            put_u32_le(buf, static_cast<std::uint32_t>(encoded.size()));
            buf += encoded;
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }

    static SolutionMapping read_mapping(std::ifstream& in) {
        auto read_u32 = [&in]() {
            unsigned char raw[4];
            in.read(reinterpret_cast<char*>(raw), 4);
            if (!in) throw IoError("truncated spill file");
            return get_u32_le(raw);
        };
        auto read_bytes = [&in](std::uint32_t n) {
            std::string buf(n, '\0');
            in.read(buf.data(), n);
            if (!in) throw IoError("truncated spill file");
            return buf;
        };
        SolutionMapping mapping;
        std::uint32_t bindings = read_u32();
        for (std::uint32_t i = 0; i < bindings; ++i) {
            std::uint32_t name_len = read_u32();
            std::string name = read_bytes(name_len);
            std::uint32_t term_len = read_u32();
            mapping.bindings.emplace(std::move(name), decode_term(read_bytes(term_len)));
        }
        return mapping;
    }

    std::size_t threshold_;
    std::filesystem::path dir_;
    std::filesystem::path path_;
    std::size_t spilled_ = 0;
    std::vector<SolutionMapping> memory_;
    std::size_t count_ = 0;
};

// Runs fn(0..count-1) on up to `workers` threads. Results must depend
// only on the index, never on scheduling.
void run_indexed(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (workers <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    unsigned n = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    threads.reserve(n);
    for (unsigned i = 0; i < n; ++i) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

MappingList merge_into(const SolutionMapping& base, const MappingList& found) {
    MappingList out;
    out.reserve(found.size());
    for (const SolutionMapping& m : found) {
        if (compatible(base, m)) out.push_back(merge(base, m));
    }
    return out;
}

}  // namespace

Executor::Executor(const RdfStore& store, ExecOptions options)
    : store_(store), options_(std::move(options)) {
    if (options_.workers == 0) options_.workers = 1;
    if (options_.spill_directory.empty())
        options_.spill_directory = std::filesystem::temp_directory_path();
}

void Executor::note_substituted_route(const TriplePattern& substituted) const {
    AccessPlan plan = resolve_pattern(substituted, store_.config());
    if (plan.access != AccessPlan::Access::Get)
        scan_routed_.fetch_add(1, std::memory_order_relaxed);
}

MappingList Executor::map_mapsin(const SolutionMapping& mapping,
                                 const TriplePattern& pattern) const {
    // With a shared variable this narrows the lookup to the input's row;
    // without one it degenerates to the full pattern lookup and a cross
    // merge, which is the correct product semantics.
    TriplePattern substituted = substitute(mapping, pattern);
    note_substituted_route(substituted);
    return merge_into(mapping, store_.lookup(substituted));
}

MappingList Executor::map_multiway(const SolutionMapping& mapping,
                                   const std::vector<TriplePattern>& patterns) const {
    MappingList acc{mapping};
    for (const TriplePattern& pattern : patterns) {
        TriplePattern substituted = substitute(mapping, pattern);
        note_substituted_route(substituted);
        MappingList found = store_.lookup(substituted);
        if (found.empty()) return {};  // this row cannot complete the group
        MappingList next;
        next.reserve(acc.size());
        for (const SolutionMapping& a : acc) {
            for (const SolutionMapping& b : found) {
                if (compatible(a, b)) next.push_back(merge(a, b));
            }
        }
        acc = std::move(next);
    }
    return acc;
}

MappingList Executor::map_multiway_optimized(const SolutionMapping& mapping,
                                             const std::vector<TriplePattern>& patterns,
                                             const std::string& join_variable) const {
    const Term* row_term = mapping.find(join_variable);
    if (!row_term)
        throw PreconditionError("optimized multiway join requires ?" + join_variable +
                                " to be bound");
    std::vector<TriplePattern> substituted;
    substituted.reserve(patterns.size());
    for (const TriplePattern& pattern : patterns)
        substituted.push_back(substitute(mapping, pattern));
    return merge_into(mapping, store_.multi_column_lookup(*row_term, substituted));
}

std::vector<MappingList> Executor::stage_initial_scan(const TriplePattern& pattern) const {
    return store_.lookup_partitioned(pattern);
}

ExecResult Executor::execute(const ExecutionPlan& plan) const {
    ExecResult result;
    ExecStats& stats = result.stats;
    MeterSnapshot meter_base = store_.store().meter();
    std::uint64_t scan_routed_base = scan_routed_.load();

    auto make_buffers = [&](std::size_t n) {
        std::vector<PartitionBuffer> buffers;
        buffers.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            buffers.emplace_back(options_.spill_threshold, options_.spill_directory);
        return buffers;
    };

    // An empty pattern list yields the single empty mapping.
    std::vector<PartitionBuffer> partitions = make_buffers(1);
    if (plan.stages.empty()) {
        partitions[0].push(SolutionMapping{});
    } else {
        const Stage& initial = plan.stages.front();
        if (initial.kind != Stage::Kind::InitialScan || initial.patterns.size() != 1)
            throw PreconditionError("plan must start with an initial scan of one pattern");
        std::vector<MappingList> seeds = stage_initial_scan(initial.patterns[0]);
        partitions = make_buffers(seeds.size());
        std::uint64_t produced = 0;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            for (SolutionMapping& m : seeds[i]) partitions[i].push(std::move(m));
            produced += seeds[i].size();
        }
        ++stats.stages_run;
        stats.map_invocations += produced;  // the scan's identity map
        stats.intermediate_mappings.push_back(produced);
    }

    for (std::size_t s = plan.stages.empty() ? 0 : 1; s < plan.stages.size(); ++s) {
        const Stage& stage = plan.stages[s];
        if (stage.kind == Stage::Kind::InitialScan)
            throw PreconditionError("initial scan stage found mid-plan");
        if (stage.cartesian) ++stats.cartesian_stages;

        std::vector<PartitionBuffer> outputs = make_buffers(partitions.size());
        std::atomic<std::uint64_t> invocations{0};
        std::atomic<std::uint64_t> produced{0};
        run_indexed(partitions.size(), options_.workers, [&](std::size_t i) {
            std::uint64_t local_in = 0, local_out = 0;
            partitions[i].for_each([&](const SolutionMapping& mapping) {
                ++local_in;
                MappingList out;
                switch (stage.kind) {
                    case Stage::Kind::MapsinJoin:
                        out = map_mapsin(mapping, stage.patterns[0]);
                        break;
                    case Stage::Kind::MultiwayJoin:
                        out = stage.optimized
                                  ? map_multiway_optimized(mapping, stage.patterns,
                                                           *stage.join_variable)
                                  : map_multiway(mapping, stage.patterns);
                        break;
                    case Stage::Kind::InitialScan:
                        break;  // rejected above
                }
                local_out += out.size();
                for (SolutionMapping& m : out) outputs[i].push(std::move(m));
            });
            invocations.fetch_add(local_in, std::memory_order_relaxed);
            produced.fetch_add(local_out, std::memory_order_relaxed);
        });
        partitions = std::move(outputs);
        ++stats.stages_run;
        stats.map_invocations += invocations.load();
        stats.intermediate_mappings.push_back(produced.load());
    }

    // Concatenate partitions in order and project.
    const std::vector<std::string>& projection = plan.projection;
    for (const PartitionBuffer& partition : partitions) {
        partition.for_each([&](const SolutionMapping& mapping) {
            SolutionMapping projected;
            for (const std::string& var : projection) {
                if (const Term* term = mapping.find(var)) projected.bindings.emplace(var, *term);
            }
            result.mappings.push_back(std::move(projected));
        });
    }
    stats.result_count = result.mappings.size();

    MeterSnapshot delta = store_.store().meter() - meter_base;
    stats.get_requests = delta.gets;
    stats.rows_scanned = delta.rows_scanned;
    stats.cells_fetched = delta.cells_returned;
    stats.bytes_fetched = delta.bytes_returned;
    stats.scan_routed_substitutions = scan_routed_.load() - scan_routed_base;
    return result;
}

}  // namespace mapsin
