#include "lupi/metrics.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <limits>

#include "lupi/errors.hpp"

namespace lupi {

double accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> labels) {
    if (predictions.size() != labels.size())
        throw ContractError("accuracy: " + std::to_string(predictions.size()) + " predictions for " +
                            std::to_string(labels.size()) + " labels");
    if (labels.empty()) throw ContractError("accuracy of an empty set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double unweighted_accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                           std::size_t num_classes) {
    if (predictions.size() != labels.size()) throw ContractError("unweighted_accuracy: length mismatch");
    std::vector<std::size_t> total(num_classes, 0), hits(num_classes, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= num_classes) throw IndexError("label " + std::to_string(labels[i]) + " out of range");
        ++total[labels[i]];
        hits[labels[i]] += predictions[i] == labels[i];
    }
    double recall_sum = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (total[c] == 0) throw ContractError("class " + std::to_string(c) + " absent from labels");
        recall_sum += static_cast<double>(hits[c]) / static_cast<double>(total[c]);
    }
    return recall_sum / static_cast<double>(num_classes);
}

double cosine_score(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape())
        throw DimensionError("cosine_score: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ContractError("cosine_score of a zero vector");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double compute_eer(std::span<const ScoredPair> pairs, AcceptDirection direction) {
    std::vector<double> same, diff;
    for (const auto& p : pairs) {
        if (!std::isfinite(p.score)) throw ContractError("non-finite verification score");
        // Negating scores turns lower-accepts into higher-accepts.
        const double s = direction == AcceptDirection::HigherAccepts ? p.score : -p.score;
        (p.same_class ? same : diff).push_back(s);
    }
    if (same.empty() || diff.empty()) throw ContractError("EER needs both same-class and different-class pairs");
    std::sort(same.begin(), same.end());
    std::sort(diff.begin(), diff.end());

    std::vector<double> thresholds;
    thresholds.reserve(same.size() + diff.size() + 2);
    thresholds.push_back(-std::numeric_limits<double>::infinity());
    thresholds.insert(thresholds.end(), same.begin(), same.end());
    thresholds.insert(thresholds.end(), diff.begin(), diff.end());
    thresholds.push_back(std::numeric_limits<double>::infinity());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const double n_same = static_cast<double>(same.size());
    const double n_diff = static_cast<double>(diff.size());
    double best_gap = std::numeric_limits<double>::infinity();
    double eer = 1.0;
    // Ascending thresholds; strict improvement keeps the lowest (most accepting) on ties.
    for (double t : thresholds) {
        // accepted: score >= t
        const auto rejected_same = std::lower_bound(same.begin(), same.end(), t) - same.begin();
        const auto rejected_diff = std::lower_bound(diff.begin(), diff.end(), t) - diff.begin();
        const double frr = static_cast<double>(rejected_same) / n_same;
        const double far = (n_diff - static_cast<double>(rejected_diff)) / n_diff;
        const double gap = std::abs(far - frr);
        if (gap < best_gap) {
            best_gap = gap;
            eer = (far + frr) / 2.0;
        }
    }
    return eer;
}

double relative_delta(double before, double after, bool higher_is_better) {
    if (!(before > 0.0)) throw ContractError("relative_delta needs a positive baseline, got " + std::to_string(before));
    return higher_is_better ? 100.0 * (after - before) / before : 100.0 * (before - after) / before;
}

double round_percent(double value) {
    const int saved = std::fegetround();
    std::fesetround(FE_TONEAREST);
    const double r = std::nearbyint(value * 100.0) / 100.0;
    std::fesetround(saved);
    return r;
}

}  // namespace lupi
