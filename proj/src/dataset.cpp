#include "pcc/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "pcc/cloud_io.hpp"

namespace pcc::corrupt {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSplits[] = {"train", "val", "test"};

struct Item {
    std::string split;
    std::string stem;
    std::string ext;       // ".ply" or ".xyz"
    fs::path partial;
    fs::path complete;
};

std::vector<Item> scan_input(const fs::path& input_root) {
    std::vector<Item> items;
    for (const char* split : kSplits) {
        const fs::path split_dir = input_root / split;
        const fs::path partial_dir = split_dir / "partial";
        const fs::path complete_dir = split_dir / "complete";
        if (!fs::is_directory(split_dir)) throw IoError("missing split directory", split_dir.string());
        if (!fs::is_directory(partial_dir))
            throw IoError("missing partial directory", partial_dir.string());
        if (!fs::is_directory(complete_dir))
            throw IoError("missing complete directory", complete_dir.string());

        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(partial_dir)) {
            if (entry.is_regular_file() && io::is_cloud_file(entry.path()))
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());

        std::set<std::string> seen;
        for (const fs::path& file : files) {
            Item item;
            item.split = split;
            item.stem = file.stem().string();
            item.ext = file.extension().string();
            item.partial = file;
            if (!seen.insert(item.stem).second)
                throw ManifestError("duplicate object id '" + item.split + "/" + item.stem + "'");

            // The matching complete may use either supported extension.
            for (const char* ext : {".ply", ".xyz"}) {
                const fs::path candidate = complete_dir / (item.stem + ext);
                if (fs::is_regular_file(candidate)) {
                    item.complete = candidate;
                    break;
                }
            }
            if (item.complete.empty())
                throw IoError("missing complete ground truth for partial",
                              (complete_dir / (item.stem + item.ext)).string());
            items.push_back(std::move(item));
        }
    }
    return items;
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PCCBENCH_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace

std::map<std::string, std::size_t> DatasetManifest::totals_by_split() const {
    std::map<std::string, std::size_t> totals;
    for (const ManifestEntry& e : entries) ++totals[e.split];
    return totals;
}

std::map<std::string, std::size_t> DatasetManifest::totals_by_kind() const {
    std::map<std::string, std::size_t> totals;
    for (const ManifestEntry& e : entries) ++totals[std::string(kind_tag(e.kind))];
    return totals;
}

void DatasetManifest::write(std::ostream& out) const {
    out << "# pccbench-manifest v1\n";
    out << "# master_seed=" << master_seed << '\n';
    out << "# source_id\tsplit\tkind\tparams\tseed\tpath\n";
    for (const ManifestEntry& e : entries) {
        out << e.source_id << '\t' << e.split << '\t' << kind_tag(e.kind) << '\t' << e.params
            << '\t' << e.seed.to_string() << '\t' << e.path << '\n';
    }
    out << "# totals split";
    for (const auto& [split, count] : totals_by_split()) out << ' ' << split << '=' << count;
    out << '\n';
    out << "# totals kind";
    for (const auto& [kind, count] : totals_by_kind()) out << ' ' << kind << '=' << count;
    out << '\n';
    out << "# total=" << total() << '\n';
}

void DatasetManifest::write_file(const fs::path& path) const {
    std::ostringstream os;
    write(os);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open manifest for writing", path.string());
    const std::string text = os.str();
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("manifest write failed", path.string());
}

DatasetManifest build_dataset(const fs::path& input_root, const fs::path& out_root,
                              std::uint64_t master_seed, const Recipe& recipe, unsigned threads) {
    const std::vector<Item> items = scan_input(input_root);

    for (const char* split : kSplits) {
        fs::create_directories(out_root / split / "clean");
        for (Kind kind : kAllKinds) fs::create_directories(out_root / split / kind_tag(kind));
    }

    // Eight manifest entries per item, written into fixed slots so the result
    // is independent of the worker schedule.
    std::vector<ManifestEntry> entries(items.size() * 8);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            const Item& item = items[i];
            try {
                const PointCloud partial = io::load_cloud(item.partial);
                if (partial.empty()) throw IoError("empty partial cloud", item.partial.string());
                const std::string object_id = item.split + "/" + item.stem;

                io::save_cloud(out_root / item.split / "clean" / (item.stem + item.ext), partial);

                for (std::size_t k = 0; k < 8; ++k) {
                    const Kind kind = kAllKinds[k];
                    const CorruptionResult result =
                        corrupt_cloud(partial, kind, master_seed, object_id, recipe);
                    const fs::path rel =
                        fs::path(item.split) / kind_tag(kind) / (item.stem + item.ext);
                    io::save_cloud(out_root / rel, result.cloud);

                    ManifestEntry& e = entries[i * 8 + k];
                    e.source_id = object_id;
                    e.split = item.split;
                    e.kind = kind;
                    e.params = result.spec.params_text();
                    e.seed = result.spec.seed;
                    e.path = rel.generic_string();
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const unsigned n_threads = std::min<unsigned>(resolve_threads(threads),
                                                  std::max<std::size_t>(items.size(), 1));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    DatasetManifest manifest;
    manifest.master_seed = master_seed;
    manifest.entries = std::move(entries);
    manifest.write_file(out_root / "manifest.txt");
    return manifest;
}

}  // namespace pcc::corrupt
