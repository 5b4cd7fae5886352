#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pcc/corruption.hpp"

namespace pcc::corrupt {

struct ManifestEntry {
    std::string source_id;  // "<split>/<stem>"
    std::string split;      // train | val | test
    Kind kind = Kind::tr;
    std::string params;     // key=value list
    RngKey seed;
    std::string path;       // output path relative to out_root
};

/// One record per generated corrupted cloud; totals must equal objects x 8.
struct DatasetManifest {
    std::uint64_t master_seed = 0;
    std::vector<ManifestEntry> entries;

    std::size_t total() const { return entries.size(); }
    std::map<std::string, std::size_t> totals_by_split() const;
    std::map<std::string, std::size_t> totals_by_kind() const;

    void write(std::ostream& out) const;
    void write_file(const std::filesystem::path& path) const;
};

/// Corrupts every partial under input_root/{train,val,test}/partial with all
/// eight kinds, writing results under out_root/<split>/<kind>/, clean-partial
/// copies under out_root/<split>/clean/, and a manifest at out_root/manifest.txt.
/// Every item draws from its own (master_seed, object_id, kind) stream, so the
/// output is byte-identical for any thread count. threads == 0 picks the
/// PCCBENCH_THREADS env var, falling back to the hardware count.
DatasetManifest build_dataset(const std::filesystem::path& input_root,
                              const std::filesystem::path& out_root, std::uint64_t master_seed,
                              const Recipe& recipe = {}, unsigned threads = 0);

}  // namespace pcc::corrupt
