#pragma once

#include <iosfwd>

#include "pcc/nmm/grad_check.hpp"

namespace pcc::nmm {

struct TrainRecord {
    int step = 0;
    LossBreakdown losses;
    double sim_clean_gt = 0.0;
    double sim_clean_noisy = 0.0;
};

struct TrainResult {
    std::vector<TrainRecord> history;

    /// sim(f_clean, f_cpgt) - sim(f_clean, f_noisy) at the last step.
    double final_gap() const;
};

/// Trains the NMM plus a linear toy decoder with plain gradient descent on
/// synthetic low-rank data: f_cpgt lives in a fixed random subspace, f_i adds
/// structured noise from a second subspace, and the completion target is a
/// 3D projection of the clean features. Deterministic under (config, seed).
/// Throws DivergedError if any loss turns non-finite.
TrainResult train_toy(const NmmConfig& config, std::uint64_t seed, int steps, double lr = 1e-2);

/// CSV schema: step,l_pos,l_neg,l_nmm,l_completion,l_total,sim_clean_gt,sim_clean_noisy
void write_history_csv(std::ostream& out, const TrainResult& result);

}  // namespace pcc::nmm
