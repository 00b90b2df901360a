#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "saber/scoring.hpp"

namespace saber {

struct MetricsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Threshold-sweep ROC area (trapezoid rule, tied scores grouped at one
// threshold). Throws MetricsError on single-class input.
double roc_auc(const std::vector<double>& scores, const std::vector<uint8_t>& positive);

// Step-integrated precision-recall area (no interpolation): sum of
// precision * delta-recall over descending score thresholds.
double pr_auc(const std::vector<double>& scores, const std::vector<uint8_t>& positive);

// Smallest FPR among thresholds reaching TPR >= min_tpr.
double fpr_at_tpr(const std::vector<double>& scores, const std::vector<uint8_t>& positive, double min_tpr = 0.95);

struct MetricReport {
    double auroc = 0.0;
    double aupr_abnormal = 0.0;
    double aupr_normal = 0.0;
    double fpr_at_95_tpr = 0.0;
    long n_abnormal = 0, n_normal = 0, n_ignored = 0, n_unscored = 0;
    std::vector<std::pair<std::string, double>> per_type_auroc;  // sorted by type
};

// Pools scored, non-ignored timesteps over all series. Per-type AUROC pools
// one type's abnormal timesteps against all normal timesteps; types without
// abnormal points are omitted.
MetricReport evaluate_scores(const std::vector<ScoreSeries>& series);

std::string format_report(const MetricReport& r);

}  // namespace saber
