#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pcc/metrics.hpp"

namespace pcc::metrics {

/// Well-known category names in display order; reports list any
/// other category after these, alphabetically.
extern const std::vector<std::string> kCategoryOrder;

struct PerCloud {
    std::string run;
    std::string category;  // "clean" or a corruption tag
    MetricValue value;
};

struct ReportRow {
    std::string run;
    std::string category;
    std::size_t count = 0;
    // Means over clouds; CD and fidelity carry the x1000 report scale.
    double cd_l1 = 0.0;
    double cd_l2 = 0.0;
    double fscore = 0.0;
    std::optional<double> fidelity;
    double delta = 0.01;
};

/// Per-category arithmetic means; x1000 scaling on CD and fidelity happens
/// here. Permutation of the input list does not change the report. Throws
/// InvalidArgument on an empty list.
class MetricReport {
public:
    static MetricReport aggregate(const std::vector<PerCloud>& per_cloud);

    const std::vector<ReportRow>& rows() const { return rows_; }

    /// CSV schema: run,category,count,cd_l1,cd_l2,fscore,fidelity,delta
    void write_csv(std::ostream& out) const;
    /// Aligned table, one block per metric, columns in kCategoryOrder.
    void write_table(std::ostream& out) const;

private:
    std::vector<ReportRow> rows_;
};

}  // namespace pcc::metrics
