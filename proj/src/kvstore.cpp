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

#include "mapsin/kvstore.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "mapsin/errors.hpp"

namespace mapsin {

namespace {

constexpr char kManifestName[] = "MANIFEST";
constexpr char kFormatLine[] = "mapsin-store 1";

// Size a cell occupies for region accounting: all key parts, an 8-byte
// timestamp, and the value.
std::uint64_t cell_size(const Bytes& row, const std::string& family, const Bytes& column,
                        const Bytes& value) {
    return row.size() + family.size() + column.size() + 8 + value.size();
}

// Bytes a cell contributes to a read result (the row key travels once per
// row, not per cell, so it is excluded here).
std::uint64_t cell_wire_size(const Cell& cell) {
    return cell.family.size() + cell.column.size() + 8 + cell.value.size();
}

std::string sanitize_for_filename(const std::string& name) {
    std::string out;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    return out;
}

}  // namespace

std::string to_string(FilterSpec::Kind kind) {
    switch (kind) {
        case FilterSpec::Kind::None: return "none";
        case FilterSpec::Kind::ColumnEquals: return "column";
        case FilterSpec::Kind::ValueEquals: return "value";
        case FilterSpec::Kind::ColumnAndValueEquals: return "column+value";
    }
    return "?";
}

Store::Store(std::uint64_t max_region_bytes) : max_region_bytes_(max_region_bytes) {
    if (max_region_bytes_ == 0)
        throw PreconditionError("max region size must be positive");
}

Store::Store(Store&& other) noexcept
    : tables_(std::move(other.tables_)),
      max_region_bytes_(other.max_region_bytes_),
      next_timestamp_(other.next_timestamp_),
      gets_(other.gets_.load()),
      rows_scanned_(other.rows_scanned_.load()),
      cells_returned_(other.cells_returned_.load()),
      bytes_returned_(other.bytes_returned_.load()) {}

Store& Store::operator=(Store&& other) noexcept {
    tables_ = std::move(other.tables_);
    max_region_bytes_ = other.max_region_bytes_;
    next_timestamp_ = other.next_timestamp_;
    gets_ = other.gets_.load();
    rows_scanned_ = other.rows_scanned_.load();
    cells_returned_ = other.cells_returned_.load();
    bytes_returned_ = other.bytes_returned_.load();
    return *this;
}

Store::~Store() = default;

void Store::create_table(const std::string& name) {
    if (name.empty()) throw PreconditionError("table name must be non-empty");
    for (char c : name)
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
            throw PreconditionError("table name must not contain whitespace");
    if (tables_.count(name)) throw PreconditionError("table already exists: " + name);
    Table table;
    table.regions.push_back(Region{Bytes(), std::nullopt, 0});
    tables_.emplace(name, std::move(table));
}

bool Store::has_table(const std::string& name) const { return tables_.count(name) != 0; }

std::vector<std::string> Store::table_names() const {
    std::vector<std::string> names;
    names.reserve(tables_.size());
    for (const auto& [name, _] : tables_) names.push_back(name);
    return names;
}

Store::Table& Store::table_ref(const std::string& name) {
    auto it = tables_.find(name);
    if (it == tables_.end()) throw UnknownTableError(name);
    return it->second;
}

const Store::Table& Store::table_ref(const std::string& name) const {
    auto it = tables_.find(name);
    if (it == tables_.end()) throw UnknownTableError(name);
    return it->second;
}

std::size_t Store::region_index_for(const Table& table, const Bytes& row) const {
    // Regions are sorted by start_row and contiguous; pick the last one
    // whose start is <= row.
    std::size_t lo = 0, hi = table.regions.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (table.regions[mid].start_row <= row)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

void Store::put(const std::string& table_name, const Bytes& row, const std::string& family,
                const Bytes& column, const Bytes& value) {
    if (row.empty()) throw PreconditionError("row key must be non-empty");
    if (family.find('\0') != std::string::npos || column.find('\0') != Bytes::npos)
        throw PreconditionError("family and column must not contain NUL bytes");
    Table& table = table_ref(table_name);

    Row& r = table.rows[row];
    r.families[family][column].versions.emplace_back(next_timestamp_++, value);
    std::uint64_t size = cell_size(row, family, column, value);
    r.byte_size += size;
    table.regions[region_index_for(table, row)].byte_size += size;

    // Restore the size invariant immediately so scans always see
    // well-bounded regions.
    split_oversized(table);
}

void Store::split_oversized(Table& table) {
    while (true) {
        bool split_any = false;
        for (std::size_t i = 0; i < table.regions.size(); ++i) {
            if (!region_in_bounds(table, i)) {
                std::size_t before = table.regions.size();
                split_region(table, i);
                if (table.regions.size() > before) {
                    split_any = true;
                    break;
                }
            }
        }
        if (!split_any) break;
    }
}

bool Store::region_in_bounds(const Table& table, std::size_t index) const {
    const Region& region = table.regions[index];
    if (region.byte_size <= max_region_bytes_) return true;
    // A region holding a single row can never split further, no matter how
    // large the row grows.
    auto begin = table.rows.lower_bound(region.start_row);
    auto end = region.end_row ? table.rows.lower_bound(*region.end_row) : table.rows.end();
    std::size_t count = 0;
    for (auto it = begin; it != end && count < 2; ++it) ++count;
    return count < 2;
}

void Store::split_region(Table& table, std::size_t index) {
    Region& region = table.regions[index];
    auto begin = table.rows.lower_bound(region.start_row);
    auto end = region.end_row ? table.rows.lower_bound(*region.end_row) : table.rows.end();

    std::uint64_t total = 0;
    for (auto it = begin; it != end; ++it) total += it->second.byte_size;

    // Walk to the first row boundary at or past half the bytes, staying
    // short of the last row so both halves are non-empty; rows are never
    // divided.
    auto it = begin;
    ++it;
    if (it == end) return;  // single row, nothing to split
    std::uint64_t left = begin->second.byte_size;
    while (std::next(it) != end && left * 2 < total) {
        left += it->second.byte_size;
        ++it;
    }

    Bytes split_key = it->first;
    Region right{split_key, region.end_row, total - left};
    region.end_row = split_key;
    region.byte_size = left;
    table.regions.insert(table.regions.begin() + static_cast<std::ptrdiff_t>(index) + 1,
                         std::move(right));
}

RowResult Store::filter_row(const Bytes& row_key, const Row& row, const FilterSpec& filter) const {
    RowResult result;
    result.row = row_key;
    for (const auto& [family, columns] : row.families) {
        for (const auto& [column, versions] : columns) {
            for (auto vit = versions.versions.rbegin(); vit != versions.versions.rend(); ++vit) {
                if (filter.matches(column, vit->second))
                    result.cells.push_back(Cell{family, column, vit->first, vit->second});
            }
        }
    }
    return result;
}

void Store::meter_result(const RowResult& result) const {
    cells_returned_.fetch_add(result.cells.size(), std::memory_order_relaxed);
    std::uint64_t bytes = 0;
    for (const Cell& cell : result.cells) bytes += cell_wire_size(cell);
    bytes_returned_.fetch_add(bytes, std::memory_order_relaxed);
}

RowResult Store::get(const std::string& table_name, const Bytes& row,
                     const FilterSpec& filter) const {
    const Table& table = table_ref(table_name);
    gets_.fetch_add(1, std::memory_order_relaxed);
    RowResult result;
    result.row = row;
    auto it = table.rows.find(row);
    if (it != table.rows.end()) result = filter_row(row, it->second, filter);
    meter_result(result);
    return result;
}

std::vector<RowResult> Store::scan(const std::string& table_name, const Bytes& start_row,
                                   const std::optional<Bytes>& end_row,
                                   const FilterSpec& filter) const {
    if (end_row && *end_row < start_row) throw InvertedRangeError();
    const Table& table = table_ref(table_name);
    std::vector<RowResult> results;
    auto it = table.rows.lower_bound(start_row);
    auto end = end_row ? table.rows.lower_bound(*end_row) : table.rows.end();
    for (; it != end; ++it) {
        rows_scanned_.fetch_add(1, std::memory_order_relaxed);
        RowResult result = filter_row(it->first, it->second, filter);
        meter_result(result);
        if (!result.empty()) results.push_back(std::move(result));
    }
    return results;
}

std::vector<RegionRows> Store::partitioned_scan(const std::string& table_name,
                                                const FilterSpec& filter) const {
    const Table& table = table_ref(table_name);
    std::vector<RegionRows> partitions;
    partitions.reserve(table.regions.size());
    for (std::size_t i = 0; i < table.regions.size(); ++i) {
        const Region& region = table.regions[i];
        RegionRows part;
        part.region_index = i;
        auto it = table.rows.lower_bound(region.start_row);
        auto end =
            region.end_row ? table.rows.lower_bound(*region.end_row) : table.rows.end();
        for (; it != end; ++it) {
            rows_scanned_.fetch_add(1, std::memory_order_relaxed);
            RowResult result = filter_row(it->first, it->second, filter);
            meter_result(result);
            if (!result.empty()) part.rows.push_back(std::move(result));
        }
        partitions.push_back(std::move(part));
    }
    return partitions;
}

std::vector<Region> Store::split_check(const std::string& table_name) {
    Table& table = table_ref(table_name);
    split_oversized(table);
    return table.regions;
}

std::vector<Region> Store::regions(const std::string& table_name) const {
    return table_ref(table_name).regions;
}

std::uint64_t Store::cell_count(const std::string& table_name) const {
    const Table& table = table_ref(table_name);
    std::uint64_t count = 0;
    for (const auto& [row_key, row] : table.rows)
        for (const auto& [family, columns] : row.families)
            for (const auto& [column, versions] : columns) count += versions.versions.size();
    return count;
}

void Store::for_each_cell(const std::string& table_name,
                          const std::function<void(const Bytes&, const Cell&)>& fn) const {
    const Table& table = table_ref(table_name);
    for (const auto& [row_key, row] : table.rows) {
        for (const auto& [family, columns] : row.families) {
            for (const auto& [column, versions] : columns) {
                for (auto it = versions.versions.rbegin(); it != versions.versions.rend(); ++it)
                    fn(row_key, Cell{family, column, it->first, it->second});
            }
        }
    }
}

bool Store::contains_cell(const std::string& table_name, const Bytes& row,
                          const std::string& family, const Bytes& column,
                          const Bytes& value) const {
    const Table& table = table_ref(table_name);
    auto rit = table.rows.find(row);
    if (rit == table.rows.end()) return false;
    auto fit = rit->second.families.find(family);
    if (fit == rit->second.families.end()) return false;
    auto cit = fit->second.find(column);
    if (cit == fit->second.end()) return false;
    for (const auto& [ts, stored] : cit->second.versions)
        if (stored == value) return true;
    return false;
}

MeterSnapshot Store::meter() const {
    return MeterSnapshot{gets_.load(), rows_scanned_.load(), cells_returned_.load(),
                         bytes_returned_.load()};
}

void Store::persist(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    std::ostringstream manifest;
    manifest << kFormatLine << "\n";
    manifest << "max_region_bytes " << max_region_bytes_ << "\n";

    std::size_t index = 0;
    for (const auto& [name, table] : tables_) {
        std::ostringstream file_name;
        file_name << "table_" << index++ << "_" << sanitize_for_filename(name) << ".dat";
        manifest << "table " << name << " " << file_name.str() << "\n";
        for (const Region& region : table.regions) {
            // "-" stands in for the empty start key and the unbounded end.
            std::string start = region.start_row.empty() ? "-" : to_hex(region.start_row);
            manifest << "region " << name << " " << start << " "
                     << (region.end_row ? to_hex(*region.end_row) : std::string("-")) << "\n";
        }

        // Records ascend in composite-key order: rows and columns ascend
        // already, and the inverted timestamp makes newer versions sort
        // first within a column.
        std::string data;
        for (const auto& [row_key, row] : table.rows) {
            for (const auto& [family, columns] : row.families) {
                for (const auto& [column, versions] : columns) {
                    for (auto it = versions.versions.rbegin(); it != versions.versions.rend();
                         ++it) {
                        Bytes key = row_key;
                        key.push_back('\0');
                        key += family;
                        key.push_back('\0');
                        key += column;
                        key.push_back('\0');
                        put_u64_be(key, std::numeric_limits<std::uint64_t>::max() - it->first);
                        put_u32_le(data, static_cast<std::uint32_t>(key.size()));
                        data += key;
                        put_u32_le(data, static_cast<std::uint32_t>(it->second.size()));
                        data += it->second;
                    }
                }
            }
        }
        put_u64_le(data, crc64(data.data(), data.size()));

        std::ofstream out(dir / file_name.str(), std::ios::binary | std::ios::trunc);
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw IoError("cannot write " + (dir / file_name.str()).string());
    }

    std::ofstream out(dir / kManifestName, std::ios::binary | std::ios::trunc);
    std::string m = manifest.str();
    out.write(m.data(), static_cast<std::streamsize>(m.size()));
    if (!out) throw IoError("cannot write " + (dir / kManifestName).string());
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path.string());
    return buf.str();
}

}  // namespace

Store Store::open(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("not a directory: " + dir.string());
    if (!std::filesystem::exists(dir / kManifestName)) return Store();

    std::istringstream manifest(read_file(dir / kManifestName));
    std::string line;
    if (!std::getline(manifest, line) || line != kFormatLine)
        throw CorruptFileError("manifest has unknown format line");

    Store store;
    std::map<std::string, std::string> table_files;
    std::map<std::string, std::vector<Region>> region_lists;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string kind;
        fields >> kind;
        if (kind == "max_region_bytes") {
            std::uint64_t v = 0;
            if (!(fields >> v) || v == 0)
                throw CorruptFileError("bad max_region_bytes in manifest");
            store.max_region_bytes_ = v;
        } else if (kind == "table") {
            std::string name, file;
            if (!(fields >> name >> file)) throw CorruptFileError("bad table line in manifest");
            store.create_table(name);
            table_files[name] = file;
        } else if (kind == "region") {
            std::string name, start_hex, end_hex;
            if (!(fields >> name >> start_hex >> end_hex))
                throw CorruptFileError("bad region line in manifest");
            Region region;
            region.start_row = start_hex == "-" ? Bytes() : from_hex(start_hex);
            if (end_hex != "-") region.end_row = from_hex(end_hex);
            region_lists[name].push_back(std::move(region));
        } else {
            throw CorruptFileError("unknown manifest entry: " + kind);
        }
    }

    std::uint64_t max_ts = 0;
    for (const auto& [name, file] : table_files) {
        Table& table = store.tables_.at(name);
        std::string data = read_file(dir / file);
        if (data.size() < 8) throw CorruptFileError(file + " is too short");
        std::size_t content_size = data.size() - 8;
        const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
        std::uint64_t stored_crc = get_u64_le(bytes + content_size);
        if (crc64(data.data(), content_size) != stored_crc)
            throw CorruptFileError(file + " failed checksum verification");

        std::size_t pos = 0;
        while (pos < content_size) {
            if (content_size - pos < 4) throw CorruptFileError(file + " has a truncated record");
            std::uint32_t key_len = get_u32_le(bytes + pos);
            pos += 4;
            if (content_size - pos < key_len)
                throw CorruptFileError(file + " has a truncated key");
            Bytes key = data.substr(pos, key_len);
            pos += key_len;
            if (content_size - pos < 4) throw CorruptFileError(file + " has a truncated record");
            std::uint32_t val_len = get_u32_le(bytes + pos);
            pos += 4;
            if (content_size - pos < val_len)
                throw CorruptFileError(file + " has a truncated value");
            Bytes value = data.substr(pos, val_len);
            pos += val_len;

            // Key layout: row 0x00 family 0x00 column 0x00 inverted-ts.
            // Rows may contain NUL, families and columns may not, so the
            // key parses unambiguously from the right.
            if (key.size() < 1 + 1 + 1 + 1 + 8)
                throw CorruptFileError(file + " has an undersized key");
            std::uint64_t inverted =
                get_u64_be(reinterpret_cast<const unsigned char*>(key.data()) + key.size() - 8);
            key.resize(key.size() - 8);
            if (key.back() != '\0') throw CorruptFileError(file + " has a malformed key");
            key.pop_back();
            auto col_sep = key.rfind('\0');
            if (col_sep == Bytes::npos) throw CorruptFileError(file + " has a malformed key");
            Bytes column = key.substr(col_sep + 1);
            key.resize(col_sep);
            auto fam_sep = key.rfind('\0');
            if (fam_sep == Bytes::npos) throw CorruptFileError(file + " has a malformed key");
            std::string family = key.substr(fam_sep + 1);
            Bytes row_key = key.substr(0, fam_sep);
            if (row_key.empty()) throw CorruptFileError(file + " has an empty row key");

            std::uint64_t ts = std::numeric_limits<std::uint64_t>::max() - inverted;
            max_ts = std::max(max_ts, ts);
            Row& row = table.rows[row_key];
            row.families[family][column].versions.emplace_back(ts, value);
            row.byte_size += cell_size(row_key, family, column, value);
        }

        // Records arrive newest-first per column; restore insertion order.
        for (auto& [row_key, row] : table.rows)
            for (auto& [family, columns] : row.families)
                for (auto& [column, versions] : columns)
                    std::sort(versions.versions.begin(), versions.versions.end(),
                              [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    for (auto& [name, regions] : region_lists) {
        auto it = store.tables_.find(name);
        if (it == store.tables_.end())
            throw CorruptFileError("region for undeclared table " + name);
        if (regions.empty() || !regions.front().start_row.empty() || regions.back().end_row)
            throw CorruptFileError("region list for " + name + " does not cover the key space");
        for (std::size_t i = 0; i + 1 < regions.size(); ++i) {
            if (!regions[i].end_row || *regions[i].end_row != regions[i + 1].start_row)
                throw CorruptFileError("region list for " + name + " is not contiguous");
        }
        for (Region& region : regions) {
            region.byte_size = 0;
            auto row_it = it->second.rows.lower_bound(region.start_row);
            auto row_end = region.end_row ? it->second.rows.lower_bound(*region.end_row)
                                          : it->second.rows.end();
            for (; row_it != row_end; ++row_it) region.byte_size += row_it->second.byte_size;
        }
        it->second.regions = std::move(regions);
    }

    store.next_timestamp_ = max_ts + 1;
    return store;
}

}  // namespace mapsin
