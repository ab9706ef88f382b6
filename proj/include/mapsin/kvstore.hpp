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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mapsin/bytes.hpp"

namespace mapsin {

// One stored version of a cell. Values are opaque byte strings.
struct Cell {
    std::string family;
    Bytes column;
    std::uint64_t timestamp = 0;
    Bytes value;

    bool operator==(const Cell&) const = default;
};

// All cells of one row that survived a filter, in (family, column,
// timestamp-descending) order.
struct RowResult {
    Bytes row;
    std::vector<Cell> cells;

    bool empty() const { return cells.empty(); }
};

// Server-side cell predicate applied before results leave the store, so
// the read meters only count what a client would actually receive.
class FilterSpec {
  public:
    enum class Kind { None, ColumnEquals, ValueEquals, ColumnAndValueEquals };

    static FilterSpec none() { return FilterSpec(Kind::None, {}, {}); }
    static FilterSpec column_equals(Bytes column) {
        return FilterSpec(Kind::ColumnEquals, std::move(column), {});
    }
    static FilterSpec value_equals(Bytes value) {
        return FilterSpec(Kind::ValueEquals, {}, std::move(value));
    }
    static FilterSpec column_and_value_equals(Bytes column, Bytes value) {
        return FilterSpec(Kind::ColumnAndValueEquals, std::move(column), std::move(value));
    }

    Kind kind() const { return kind_; }
    const Bytes& column() const { return column_; }
    const Bytes& value() const { return value_; }

    bool matches(const Bytes& column, const Bytes& value) const {
        switch (kind_) {
            case Kind::None: return true;
            case Kind::ColumnEquals: return column == column_;
            case Kind::ValueEquals: return value == value_;
            case Kind::ColumnAndValueEquals: return column == column_ && value == value_;
        }
        return false;
    }

    bool operator==(const FilterSpec&) const = default;

  private:
    FilterSpec(Kind kind, Bytes column, Bytes value)
        : kind_(kind), column_(std::move(column)), value_(std::move(value)) {}

    Kind kind_;
    Bytes column_;
    Bytes value_;
};

std::string to_string(FilterSpec::Kind kind);

// A contiguous row-key range of one table. start_row is inclusive; end_row
// is exclusive, with nullopt meaning unbounded. byte_size is the sum of the
// stored cell sizes of the rows currently inside the range.
struct Region {
    Bytes start_row;
    std::optional<Bytes> end_row;
    std::uint64_t byte_size = 0;
};

// Point-in-time copy of the read meters. Deltas describe the cost of a
// bracketed group of operations.
struct MeterSnapshot {
    std::uint64_t gets = 0;
    std::uint64_t rows_scanned = 0;
    std::uint64_t cells_returned = 0;
    std::uint64_t bytes_returned = 0;

    MeterSnapshot operator-(const MeterSnapshot& base) const {
        return {gets - base.gets, rows_scanned - base.rows_scanned,
                cells_returned - base.cells_returned, bytes_returned - base.bytes_returned};
    }
    bool operator==(const MeterSnapshot&) const = default;
};

// Rows of one region produced by a partitioned scan.
struct RegionRows {
    std::size_t region_index = 0;
    std::vector<RowResult> rows;
};

// In-process sorted-map store: named tables of rows ordered by byte-wise
// key comparison, each row holding versioned cells grouped into column
// families. Tables are transparently divided into regions that split when
// they outgrow a size threshold. Reads are metered; writes are not.
//
// Thread safety: concurrent reads are safe; writes require external
// serialization (the query engine only reads).
class Store {
  public:
    static constexpr std::uint64_t kDefaultMaxRegionBytes = 64 * 1024;

    explicit Store(std::uint64_t max_region_bytes = kDefaultMaxRegionBytes);

    Store(Store&&) noexcept;
    Store& operator=(Store&&) noexcept;
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;
    ~Store();

    // Table names must be non-empty and free of whitespace (they appear as
    // manifest tokens). Creating an existing table is an error.
    void create_table(const std::string& name);
    bool has_table(const std::string& name) const;
    std::vector<std::string> table_names() const;

    // Stores one cell version stamped with the next logical timestamp.
    // Row must be non-empty; family and column must not contain NUL bytes
    // (the persisted key format reserves NUL as separator). May split the
    // region the row lands in.
    void put(const std::string& table, const Bytes& row, const std::string& family,
             const Bytes& column, const Bytes& value);

    // Single-row read. Absent rows yield an empty RowResult. Counts one get
    // plus the cells and bytes that pass the filter.
    RowResult get(const std::string& table, const Bytes& row, const FilterSpec& filter) const;

    // Range read over [start_row, end_row), end nullopt = to the end of the
    // table. Every row examined counts toward rows_scanned whether or not
    // any of its cells pass the filter; rows with no surviving cells are
    // omitted from the result.
    std::vector<RowResult> scan(const std::string& table, const Bytes& start_row,
                                const std::optional<Bytes>& end_row,
                                const FilterSpec& filter) const;

    // Full-table scan, one result entry per region (empty regions included,
    // so entry i always corresponds to regions()[i]). Concatenating the
    // entries equals scan() over the whole table.
    std::vector<RegionRows> partitioned_scan(const std::string& table,
                                             const FilterSpec& filter) const;

    // Splits every oversized region at the median-by-byte-size row boundary
    // until all regions are within bounds or hold a single row. Idempotent.
    // Returns the resulting region list.
    std::vector<Region> split_check(const std::string& table);

    std::vector<Region> regions(const std::string& table) const;
    std::uint64_t max_region_bytes() const { return max_region_bytes_; }

    // Number of stored cell versions in the table.
    std::uint64_t cell_count(const std::string& table) const;

    // Unmetered iteration in key order, newest version first within a
    // column. Used for maintenance tasks, not query answering.
    void for_each_cell(const std::string& table,
                       const std::function<void(const Bytes& row, const Cell&)>& fn) const;

    // Unmetered point check: does some version of (row, family, column)
    // hold exactly this value?
    bool contains_cell(const std::string& table, const Bytes& row, const std::string& family,
                       const Bytes& column, const Bytes& value) const;

    MeterSnapshot meter() const;

    // Writes one data file per table plus a manifest into dir (created if
    // needed). Existing files of the same names are replaced.
    void persist(const std::filesystem::path& dir) const;

    // Rebuilds a store from persist() output. A directory without a
    // manifest yields an empty store with default settings.
    static Store open(const std::filesystem::path& dir);

  private:
    struct ColumnVersions {
        // Versions in insertion order; timestamps are strictly increasing,
        // so reverse iteration is newest-first.
        std::vector<std::pair<std::uint64_t, Bytes>> versions;
    };

    struct Row {
        // family -> column -> versions
        std::map<std::string, std::map<Bytes, ColumnVersions>> families;
        std::uint64_t byte_size = 0;
    };

    struct Table {
        std::map<Bytes, Row> rows;
        std::vector<Region> regions;  // ordered, contiguous, covering all keys
    };

    Table& table_ref(const std::string& name);
    const Table& table_ref(const std::string& name) const;
    std::size_t region_index_for(const Table& table, const Bytes& row) const;
    void split_region(Table& table, std::size_t index);
    void split_oversized(Table& table);
    bool region_in_bounds(const Table& table, std::size_t index) const;
    RowResult filter_row(const Bytes& row_key, const Row& row, const FilterSpec& filter) const;
    void meter_result(const RowResult& result) const;

    std::map<std::string, Table> tables_;
    std::uint64_t max_region_bytes_;
    std::uint64_t next_timestamp_ = 1;

    mutable std::atomic<std::uint64_t> gets_{0};
    mutable std::atomic<std::uint64_t> rows_scanned_{0};
    mutable std::atomic<std::uint64_t> cells_returned_{0};
    mutable std::atomic<std::uint64_t> bytes_returned_{0};
};

}  // namespace mapsin
