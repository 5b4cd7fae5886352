#include "pcc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>

namespace pcc::metrics {

const std::vector<std::string> kCategoryOrder = {"clean", "eoi", "biw",  "bif", "oboo",
                                                 "djt",   "tr",  "is", "rcc"};

namespace {

int category_rank(const std::string& cat) {
    for (std::size_t i = 0; i < kCategoryOrder.size(); ++i) {
        if (kCategoryOrder[i] == cat) return static_cast<int>(i);
    }
    return static_cast<int>(kCategoryOrder.size());
}

bool category_less(const std::string& a, const std::string& b) {
    const int ra = category_rank(a);
    const int rb = category_rank(b);
    if (ra != rb) return ra < rb;
    return a < b;
}

/// Mean that is invariant under permutation of the inputs: values are sorted
/// before summation, so every input ordering adds in the same sequence.
double stable_mean(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

std::string fmt_g(double v) {
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.9g", v);
    return tmp;
}

std::string fmt_f3(double v) {
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.3f", v);
    return tmp;
}

const char* display_header(const std::string& cat) {
    if (cat == "eoi") return "E_OI";
    if (cat == "biw") return "BI_W";
    if (cat == "bif") return "BI_F";
    if (cat == "oboo") return "O_BOO";
    if (cat == "djt") return "D_JT";
    if (cat == "tr") return "T_R";
    if (cat == "is") return "I_S";
    if (cat == "rcc") return "R_CC";
    return cat.c_str();
}

}  // namespace

MetricReport MetricReport::aggregate(const std::vector<PerCloud>& per_cloud) {
    if (per_cloud.empty()) throw InvalidArgument("aggregate: empty metric list");

    struct Cell {
        std::vector<double> cd_l1, cd_l2, fscore, fidelity, delta;
    };
    std::map<std::pair<std::string, std::string>, Cell> cells;
    for (const PerCloud& item : per_cloud) {
        Cell& c = cells[{item.run, item.category}];
        c.cd_l1.push_back(item.value.cd_l1);
        c.cd_l2.push_back(item.value.cd_l2);
        c.fscore.push_back(item.value.fscore);
        c.delta.push_back(item.value.delta);
        if (item.value.fidelity) c.fidelity.push_back(*item.value.fidelity);
    }

    MetricReport report;
    for (auto& [key, cell] : cells) {
        ReportRow row;
        row.run = key.first;
        row.category = key.second;
        row.count = cell.cd_l1.size();
        row.cd_l1 = stable_mean(cell.cd_l1) * 1000.0;
        row.cd_l2 = stable_mean(cell.cd_l2) * 1000.0;
        row.fscore = stable_mean(cell.fscore);
        if (!cell.fidelity.empty()) row.fidelity = stable_mean(cell.fidelity) * 1000.0;
        row.delta = *std::max_element(cell.delta.begin(), cell.delta.end());
        report.rows_.push_back(std::move(row));
    }
    std::sort(report.rows_.begin(), report.rows_.end(), [](const ReportRow& a, const ReportRow& b) {
        if (a.run != b.run) return a.run < b.run;
        return category_less(a.category, b.category);
    });
    return report;
}

void MetricReport::write_csv(std::ostream& out) const {
    out << "run,category,count,cd_l1,cd_l2,fscore,fidelity,delta\n";
    for (const ReportRow& r : rows_) {
        out << r.run << ',' << r.category << ',' << r.count << ',' << fmt_g(r.cd_l1) << ','
            << fmt_g(r.cd_l2) << ',' << fmt_g(r.fscore) << ','
            << (r.fidelity ? fmt_g(*r.fidelity) : std::string{}) << ',' << fmt_g(r.delta) << '\n';
    }
}

void MetricReport::write_table(std::ostream& out) const {
    std::vector<std::string> runs;
    std::vector<std::string> categories;
    for (const ReportRow& r : rows_) {
        if (std::find(runs.begin(), runs.end(), r.run) == runs.end()) runs.push_back(r.run);
        if (std::find(categories.begin(), categories.end(), r.category) == categories.end())
            categories.push_back(r.category);
    }
    std::sort(categories.begin(), categories.end(), category_less);

    auto cell = [&](const std::string& run, const std::string& cat) -> const ReportRow* {
        for (const ReportRow& r : rows_) {
            if (r.run == run && r.category == cat) return &r;
        }
        return nullptr;
    };

    const std::vector<std::pair<std::string, int>> metrics = {
        {"CD-L1 (x1000)", 0}, {"CD-L2 (x1000)", 1}, {"F-score", 2}, {"Fidelity (x1000)", 3}};

    std::size_t name_width = 8;
    for (const auto& run : runs) name_width = std::max(name_width, run.size());

    for (const auto& [title, which] : metrics) {
        if (which == 3) {
            bool any = false;
            for (const ReportRow& r : rows_)
                if (r.fidelity) any = true;
            if (!any) continue;
        }
        out << title << '\n';
        out << std::left << std::setw(static_cast<int>(name_width + 2)) << "run";
        for (const auto& cat : categories)
            out << std::right << std::setw(10) << display_header(cat);
        out << '\n';
        for (const auto& run : runs) {
            out << std::left << std::setw(static_cast<int>(name_width + 2)) << run;
            for (const auto& cat : categories) {
                const ReportRow* r = cell(run, cat);
                std::string text = "-";
                if (r != nullptr) {
                    switch (which) {
                        case 0: text = fmt_f3(r->cd_l1); break;
                        case 1: text = fmt_f3(r->cd_l2); break;
                        case 2: text = fmt_f3(r->fscore); break;
                        case 3: text = r->fidelity ? fmt_f3(*r->fidelity) : "-"; break;
                    }
                }
                out << std::right << std::setw(10) << text;
            }
            out << '\n';
        }
        out << '\n';
    }
}

}  // namespace pcc::metrics
