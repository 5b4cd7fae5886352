// pccbench: corruption benchmark CLI — generate corrupted clouds, build
// datasets, evaluate completion outputs, and run the NMM demo.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "pcc/cloud_io.hpp"
#include "pcc/corruption.hpp"
#include "pcc/dataset.hpp"
#include "pcc/metrics.hpp"
#include "pcc/nmm/train.hpp"
#include "pcc/report.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitPairing = 3;
constexpr int kExitNumerical = 4;

pcc::corrupt::Recipe load_recipe(const std::string& path) {
    if (path.empty()) return {};
    return pcc::corrupt::Recipe::parse_file(path);
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pcc::IoError("cannot open for writing", path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw pcc::IoError("write failed", path.string());
}

// ---------------------------------------------------------------------------
// corrupt

int cmd_corrupt(const std::string& input, const std::string& kind_arg, std::uint64_t seed,
                const std::string& out_dir, const std::string& recipe_path) {
    const pcc::corrupt::Recipe recipe = load_recipe(recipe_path);

    std::vector<pcc::corrupt::Kind> kinds;
    if (kind_arg == "all") {
        kinds.assign(std::begin(pcc::corrupt::kAllKinds), std::end(pcc::corrupt::kAllKinds));
    } else if (const auto k = pcc::corrupt::kind_from_tag(kind_arg)) {
        kinds.push_back(*k);
    } else {
        std::cerr << "pccbench corrupt: unknown kind '" << kind_arg << "'\n";
        return kExitUsage;
    }

    std::vector<fs::path> files;
    if (fs::is_directory(input)) {
        for (const auto& entry : fs::directory_iterator(input)) {
            if (entry.is_regular_file() && pcc::io::is_cloud_file(entry.path()))
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            std::cerr << "pccbench corrupt: no .ply/.xyz files in '" << input << "'\n";
            return kExitUsage;
        }
    } else if (fs::is_regular_file(input)) {
        files.push_back(input);
    } else {
        std::cerr << "pccbench corrupt: no such input '" << input << "'\n";
        return kExitUsage;
    }

    fs::create_directories(out_dir);
    for (const fs::path& file : files) {
        const pcc::PointCloud cloud = pcc::io::load_cloud(file);
        const std::string stem = file.stem().string();
        for (pcc::corrupt::Kind kind : kinds) {
            const auto result = pcc::corrupt::corrupt_cloud(cloud, kind, seed, stem, recipe);
            const std::string tag(pcc::corrupt::kind_tag(kind));
            const fs::path out_cloud =
                fs::path(out_dir) / (stem + "__" + tag + file.extension().string());
            pcc::io::save_cloud(out_cloud, result.cloud);

            std::ostringstream sidecar;
            sidecar << "kind=" << tag << '\n'
                    << "seed=" << result.spec.seed.to_string() << '\n';
            if (!result.spec.params_text().empty())
                sidecar << "params=" << result.spec.params_text() << '\n';
            for (const auto& sub : result.sub_specs) {
                sidecar << "sub." << pcc::corrupt::kind_tag(sub.kind) << '='
                        << sub.params_text() << ";seed=" << sub.seed.to_string() << '\n';
            }
            sidecar << "added=" << result.stats.added << ",removed=" << result.stats.removed
                    << ",displaced=" << result.stats.displaced << '\n';
            write_text_file(fs::path(out_dir) / (stem + "__" + tag + ".params"), sidecar.str());
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// dataset-build

int cmd_dataset_build(const std::string& input_root, const std::string& out_root,
                      std::uint64_t seed, const std::string& recipe_path, unsigned threads) {
    const pcc::corrupt::Recipe recipe = load_recipe(recipe_path);
    const auto manifest =
        pcc::corrupt::build_dataset(input_root, out_root, seed, recipe, threads);
    std::cout << "wrote " << manifest.total() << " corrupted clouds";
    for (const auto& [split, count] : manifest.totals_by_split())
        std::cout << "  " << split << "=" << count;
    std::cout << "\nmanifest: " << (fs::path(out_root) / "manifest.txt").string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

std::map<std::string, fs::path> scan_tree(const fs::path& root) {
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file() || !pcc::io::is_cloud_file(entry.path())) continue;
        fs::path rel = fs::relative(entry.path(), root);
        rel.replace_extension();
        out[rel.generic_string()] = entry.path();
    }
    return out;
}

std::string detect_category(const std::string& rel_stem) {
    const auto slash = rel_stem.find('/');
    if (slash == std::string::npos) return "clean";
    const std::string head = rel_stem.substr(0, slash);
    if (head == "clean" || pcc::corrupt::kind_from_tag(head)) return head;
    // Nested layouts like <split>/<kind>/<stem>.
    const auto slash2 = rel_stem.find('/', slash + 1);
    if (slash2 != std::string::npos) {
        const std::string mid = rel_stem.substr(slash + 1, slash2 - slash - 1);
        if (mid == "clean" || pcc::corrupt::kind_from_tag(mid)) return mid;
    }
    return "clean";
}

int cmd_eval(const std::string& pred_dir, const std::string& gt_dir, const std::string& input_dir,
             bool want_fidelity, double delta, const std::string& report_path,
             const std::string& run_name, const std::string& category_override) {
    if (want_fidelity && input_dir.empty()) {
        std::cerr << "pccbench eval: --fidelity requires --input\n";
        return kExitUsage;
    }
    if (!fs::is_directory(pred_dir) || !fs::is_directory(gt_dir)) {
        std::cerr << "pccbench eval: --pred and --gt must be directories\n";
        return kExitUsage;
    }

    const auto preds = scan_tree(pred_dir);
    const auto gts = scan_tree(gt_dir);
    std::vector<std::string> orphans;
    for (const auto& [stem, path] : preds) {
        if (gts.find(stem) == gts.end()) orphans.push_back("pred-only: " + stem);
    }
    for (const auto& [stem, path] : gts) {
        if (preds.find(stem) == preds.end()) orphans.push_back("gt-only: " + stem);
    }
    if (!orphans.empty()) {
        std::cerr << "pccbench eval: unpaired files:\n";
        for (const auto& o : orphans) std::cerr << "  " << o << '\n';
        return kExitPairing;
    }

    std::map<std::string, fs::path> inputs;
    const bool fidelity = !input_dir.empty();
    if (fidelity) {
        inputs = scan_tree(input_dir);
        for (const auto& [stem, path] : preds) {
            if (inputs.find(stem) == inputs.end()) orphans.push_back("missing input: " + stem);
        }
        if (!orphans.empty()) {
            std::cerr << "pccbench eval: unpaired files:\n";
            for (const auto& o : orphans) std::cerr << "  " << o << '\n';
            return kExitPairing;
        }
    }

    std::vector<pcc::metrics::PerCloud> items;
    for (const auto& [stem, pred_path] : preds) {
        const pcc::PointCloud pred = pcc::io::load_cloud(pred_path);
        const pcc::PointCloud gt = pcc::io::load_cloud(gts.at(stem));
        pcc::PointCloud input;
        if (fidelity) input = pcc::io::load_cloud(inputs.at(stem));
        pcc::metrics::PerCloud item;
        item.run = run_name;
        item.category = category_override.empty() ? detect_category(stem) : category_override;
        item.value = pcc::metrics::evaluate(pred, gt, delta, fidelity ? &input : nullptr);
        items.push_back(std::move(item));
    }

    const auto report = pcc::metrics::MetricReport::aggregate(items);
    std::ostringstream csv;
    report.write_csv(csv);
    write_text_file(report_path, csv.str());
    report.write_table(std::cout);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// nmm-demo

int cmd_nmm_demo(int b, int l, int d, int heads, double t, int steps, std::uint64_t seed,
                 double lr, const std::string& ablation_arg, const std::string& out_csv) {
    const auto ablation = pcc::nmm::ablation_from_name(ablation_arg);
    if (!ablation) {
        std::cerr << "pccbench nmm-demo: unknown ablation '" << ablation_arg << "'\n";
        return kExitUsage;
    }
    pcc::nmm::NmmConfig config;
    config.b = b;
    config.l = l;
    config.d = d;
    config.heads = heads;
    config.t = t;
    config.ablation = *ablation;
    try {
        config.validate();
    } catch (const pcc::InvalidArgument& e) {
        std::cerr << "pccbench nmm-demo: " << e.what() << '\n';
        return kExitUsage;
    }

    // Gradient verification runs at the pinned small shape; the full central-
    // difference sweep would be impractical at demo sizes.
    pcc::nmm::NmmConfig check_config = config;
    check_config.b = 2;
    check_config.l = 4;
    check_config.d = 16;
    check_config.heads = 8;
    pcc::nmm::NmmModel check_model(check_config, seed);
    pcc::RngStream check_rng(seed, "nmm-demo", "grad-check");
    pcc::nmm::Tensor3 f_i(check_config.b, check_config.l, check_config.d);
    pcc::nmm::Tensor3 f_cpgt(check_config.b, check_config.l, check_config.d);
    for (auto& v : f_i.v) v = check_rng.normal();
    for (auto& v : f_cpgt.v) v = check_rng.normal();
    const auto report = pcc::nmm::grad_check(check_model, f_i, f_cpgt);
    std::cout << "grad_check(B=2,L=4,D=16): worst relative error " << report.worst_rel_err
              << (report.passed() ? " [ok]\n" : " [FAIL]\n");
    for (const auto& entry : report.entries) {
        std::cout << "  " << entry.tensor << ": " << entry.max_rel_err << '\n';
    }
    if (!report.passed()) {
        std::cerr << "pccbench nmm-demo: gradient check failed\n";
        return kExitNumerical;
    }

    pcc::nmm::TrainResult result;
    try {
        result = pcc::nmm::train_toy(config, seed, steps, lr);
    } catch (const pcc::DivergedError& e) {
        std::cerr << "pccbench nmm-demo: " << e.what() << '\n';
        return kExitNumerical;
    }

    std::ostringstream csv;
    pcc::nmm::write_history_csv(csv, result);
    write_text_file(out_csv, csv.str());

    const auto& last = result.history.back();
    std::cout << "steps=" << result.history.size() << " l_total=" << last.losses.l_total
              << " sim(clean,gt)=" << last.sim_clean_gt
              << " sim(clean,noisy)=" << last.sim_clean_noisy << " gap=" << result.final_gap()
              << '\n';

    if (config.ablation == pcc::nmm::Ablation::noisy_only) {
        // Report the f_i = f_clean + f_noisy residual of the final model.
        pcc::nmm::NmmModel model(config, seed);
        pcc::RngStream rng(seed, "nmm-demo", "residual");
        pcc::nmm::Tensor3 probe(config.b, config.l, config.d);
        for (auto& v : probe.v) v = rng.normal();
        const auto ctx = model.forward(probe, false);
        double residual = 0.0;
        for (std::size_t i = 0; i < probe.v.size(); ++i) {
            residual = std::max(residual,
                                std::abs(probe.v[i] - (ctx.f_clean.v[i] + ctx.f_noisy.v[i])));
        }
        std::cout << "noisy-only residual |f_i - (f_clean + f_noisy)| = " << residual << '\n';
    }
    std::cout << "history: " << out_csv << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-cloud corruption benchmark toolkit"};
    app.require_subcommand(1);

    // corrupt
    auto* corrupt = app.add_subcommand("corrupt", "corrupt clouds with one or all kinds");
    std::string c_input, c_kind = "all", c_out, c_recipe;
    std::uint64_t c_seed = 0;
    corrupt->add_option("--input", c_input, "input cloud file or directory")->required();
    corrupt->add_option("--kind", c_kind, "eoi|biw|bif|oboo|djt|tr|is|rcc|all");
    corrupt->add_option("--seed", c_seed, "master seed (default 0)");
    corrupt->add_option("--out", c_out, "output directory")->required();
    corrupt->add_option("--recipe", c_recipe, "recipe file with knobs/pins");

    // dataset-build
    auto* build = app.add_subcommand("dataset-build", "corrupt a split dataset (x8 kinds)");
    std::string b_input, b_out, b_recipe;
    std::uint64_t b_seed = 0;
    unsigned b_threads = 0;
    build->add_option("--input", b_input, "root with train/val/test splits")->required();
    build->add_option("--out", b_out, "output root")->required();
    build->add_option("--seed", b_seed, "master seed (default 0)");
    build->add_option("--recipe", b_recipe, "recipe file");
    build->add_option("--threads", b_threads, "worker threads (default: PCCBENCH_THREADS or all)");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate completions against ground truth");
    std::string e_pred, e_gt, e_input, e_report = "report.csv", e_run = "run", e_category;
    double e_delta = 0.01;
    bool e_fidelity = false;
    eval->add_option("--pred", e_pred, "directory of predicted clouds")->required();
    eval->add_option("--gt", e_gt, "directory of ground-truth clouds")->required();
    eval->add_option("--input", e_input, "directory of input partials (enables fidelity)");
    eval->add_flag("--fidelity", e_fidelity, "require fidelity (needs --input)");
    eval->add_option("--delta", e_delta, "F-score threshold (default 0.01)");
    eval->add_option("--report", e_report, "CSV output path");
    eval->add_option("--run", e_run, "run name for report rows");
    eval->add_option("--category", e_category, "force a category instead of auto-detecting");

    // nmm-demo
    auto* demo = app.add_subcommand("nmm-demo", "gradient check + toy contrastive training");
    int n_b = 2, n_l = 8, n_d = 64, n_heads = 8, n_steps = 300;
    double n_t = 1.0, n_lr = 1e-2;
    std::uint64_t n_seed = 0;
    std::string n_ablation = "none", n_out = "nmm_history.csv";
    demo->add_option("--b", n_b, "batch size");
    demo->add_option("--l", n_l, "sequence length");
    demo->add_option("--d", n_d, "feature dimension");
    demo->add_option("--heads", n_heads, "attention heads");
    demo->add_option("--t", n_t, "negative-loss temperature");
    demo->add_option("--steps", n_steps, "training steps");
    demo->add_option("--seed", n_seed, "seed");
    demo->add_option("--lr", n_lr, "learning rate");
    demo->add_option("--ablation", n_ablation, "none|clean-only|noisy-only|no-attention|single-scale");
    demo->add_option("--out", n_out, "history CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (corrupt->parsed()) return cmd_corrupt(c_input, c_kind, c_seed, c_out, c_recipe);
        if (build->parsed()) return cmd_dataset_build(b_input, b_out, b_seed, b_recipe, b_threads);
        if (eval->parsed())
            return cmd_eval(e_pred, e_gt, e_input, e_fidelity, e_delta, e_report, e_run,
                            e_category);
        if (demo->parsed())
            return cmd_nmm_demo(n_b, n_l, n_d, n_heads, n_t, n_steps, n_seed, n_lr, n_ablation,
                                n_out);
    } catch (const pcc::DivergedError& e) {
        std::cerr << "pccbench: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const pcc::Error& e) {
        std::cerr << "pccbench: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "pccbench: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
