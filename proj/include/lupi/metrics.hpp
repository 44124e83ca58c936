#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lupi/tensor.hpp"

namespace lupi {

/// Similarity score of one verification trial.
struct ScoredPair {
    double score = 0.0;
    bool same_class = false;
    bool operator==(const ScoredPair&) const = default;
};

/// Which side of the threshold counts as "accept".
enum class AcceptDirection { HigherAccepts, LowerAccepts };

double accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> labels);

/// Mean per-class recall over classes 0..num_classes-1; every class must occur in `labels`.
double unweighted_accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                           std::size_t num_classes);

double cosine_score(const Tensor& a, const Tensor& b);

/// Equal error rate over candidate thresholds at every distinct score plus both infinities.
/// At each threshold FAR is the accepted fraction of different-class pairs and FRR the rejected
/// fraction of same-class pairs. Returns (FAR+FRR)/2 at the threshold minimising |FAR-FRR|;
/// ties go to the threshold that accepts more pairs (the lower one for HigherAccepts).
double compute_eer(std::span<const ScoredPair> pairs, AcceptDirection direction = AcceptDirection::HigherAccepts);

/// Relative change in percent, signed so that improvement is positive.
double relative_delta(double before, double after, bool higher_is_better);

/// Two-decimal rounding, ties to even.
double round_percent(double value);

}  // namespace lupi
