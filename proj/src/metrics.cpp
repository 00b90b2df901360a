#include "saber/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

namespace saber {

namespace {

struct SweepPoint {
    double tp = 0, fp = 0;
};

// points after each distinct-score threshold group, scores descending
std::vector<SweepPoint> threshold_sweep(const std::vector<double>& scores, const std::vector<uint8_t>& positive,
                                        long* P_out, long* N_out) {
    if (scores.size() != positive.size()) throw MetricsError("scores/labels size mismatch");
    long P = 0, N = 0;
    for (uint8_t p : positive) (p ? P : N)++;
    if (P == 0 || N == 0) {
        throw MetricsError("metrics undefined on single-class input (positives=" + std::to_string(P) +
                           ", negatives=" + std::to_string(N) + ")");
    }
    *P_out = P;
    *N_out = N;

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    std::vector<SweepPoint> points;
    double tp = 0, fp = 0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (positive[order[j]]) tp += 1;
            else fp += 1;
            ++j;
        }
        points.push_back({tp, fp});
        i = j;
    }
    return points;
}

}  // namespace

double roc_auc(const std::vector<double>& scores, const std::vector<uint8_t>& positive) {
    long P = 0, N = 0;
    auto points = threshold_sweep(scores, positive, &P, &N);
    double area = 0.0, prev_tpr = 0.0, prev_fpr = 0.0;
    for (const auto& pt : points) {
        double tpr = pt.tp / double(P);
        double fpr = pt.fp / double(N);
        area += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    return area;
}

double pr_auc(const std::vector<double>& scores, const std::vector<uint8_t>& positive) {
    long P = 0, N = 0;
    auto points = threshold_sweep(scores, positive, &P, &N);
    double area = 0.0, prev_recall = 0.0;
    for (const auto& pt : points) {
        double recall = pt.tp / double(P);
        double precision = pt.tp / (pt.tp + pt.fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return area;
}

double fpr_at_tpr(const std::vector<double>& scores, const std::vector<uint8_t>& positive, double min_tpr) {
    long P = 0, N = 0;
    auto points = threshold_sweep(scores, positive, &P, &N);
    double best = 1.0;
    bool found = false;
    for (const auto& pt : points) {
        double tpr = pt.tp / double(P);
        double fpr = pt.fp / double(N);
        if (tpr >= min_tpr) {
            if (!found || fpr < best) best = fpr;
            found = true;
        }
    }
    return best;  // the all-positive threshold always reaches TPR = 1
}

MetricReport evaluate_scores(const std::vector<ScoreSeries>& series) {
    MetricReport r;
    std::vector<double> scores;
    std::vector<uint8_t> abnormal;
    std::vector<std::string> types;  // anomaly type of the point's scene
    for (const auto& s : series) {
        for (int t = 0; t < s.length; ++t) {
            if (!s.scored[t]) {
                ++r.n_unscored;
                continue;
            }
            if (s.labels[t] == Label::Ignored) {
                ++r.n_ignored;
                continue;
            }
            bool ab = s.labels[t] == Label::Abnormal;
            scores.push_back(s.as[t]);
            abnormal.push_back(ab ? 1 : 0);
            types.push_back(s.anomaly_type);
            (ab ? r.n_abnormal : r.n_normal)++;
        }
    }

    r.auroc = roc_auc(scores, abnormal);
    r.aupr_abnormal = pr_auc(scores, abnormal);
    {
        // normal as the positive class: rank by "normality" = negated score
        std::vector<double> neg(scores.size());
        std::vector<uint8_t> normal(scores.size());
        for (size_t i = 0; i < scores.size(); ++i) {
            neg[i] = -scores[i];
            normal[i] = abnormal[i] ? 0 : 1;
        }
        r.aupr_normal = pr_auc(neg, normal);
    }
    r.fpr_at_95_tpr = fpr_at_tpr(scores, abnormal, 0.95);

    std::map<std::string, int> type_abnormal_counts;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (abnormal[i] && !types[i].empty()) type_abnormal_counts[types[i]]++;
    }
    for (const auto& [type, count] : type_abnormal_counts) {
        (void)count;
        std::vector<double> sub_scores;
        std::vector<uint8_t> sub_pos;
        for (size_t i = 0; i < scores.size(); ++i) {
            if (abnormal[i]) {
                if (types[i] != type) continue;
                sub_scores.push_back(scores[i]);
                sub_pos.push_back(1);
            } else {
                sub_scores.push_back(scores[i]);
                sub_pos.push_back(0);
            }
        }
        r.per_type_auroc.emplace_back(type, roc_auc(sub_scores, sub_pos));
    }
    return r;
}

std::string format_report(const MetricReport& r) {
    char buf[128];
    std::string out;
    out += "== Anomaly detection metrics ==\n";
    std::snprintf(buf, sizeof(buf), "points: normal=%ld abnormal=%ld ignored=%ld unscored=%ld\n", r.n_normal,
                  r.n_abnormal, r.n_ignored, r.n_unscored);
    out += buf;
    std::snprintf(buf, sizeof(buf), "AUROC          %.6f\n", r.auroc);
    out += buf;
    std::snprintf(buf, sizeof(buf), "AUPR-Abnormal  %.6f\n", r.aupr_abnormal);
    out += buf;
    std::snprintf(buf, sizeof(buf), "AUPR-Normal    %.6f\n", r.aupr_normal);
    out += buf;
    std::snprintf(buf, sizeof(buf), "FPR@95%%TPR     %.6f\n", r.fpr_at_95_tpr);
    out += buf;
    out += "\n== AUROC by anomaly type ==\n";
    for (const auto& [type, auc] : r.per_type_auroc) {
        std::snprintf(buf, sizeof(buf), "%-22s %.6f\n", type.c_str(), auc);
        out += buf;
    }
    return out;
}

}  // namespace saber
