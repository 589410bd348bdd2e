#include "malbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "malbench/error.hpp"

namespace malbench {

ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predictions) {
    if (labels.size() != predictions.size())
        fail(ErrorKind::length_mismatch, "labels and predictions differ in length");
    if (labels.empty()) fail(ErrorKind::length_mismatch, "confusion on empty inputs");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int y = labels[i];
        int p = predictions[i];
        if ((y != 0 && y != 1) || (p != 0 && p != 1))
            fail(ErrorKind::non_binary_value, "confusion inputs must be in {0,1}");
        if (y == 1 && p == 1) ++cm.tp;
        else if (y == 0 && p == 1) ++cm.fp;
        else if (y == 1 && p == 0) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

ScalarMetrics scalar_metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) fail(ErrorKind::length_mismatch, "empty confusion matrix");
    ScalarMetrics m;
    const double tp = static_cast<double>(cm.tp);
    const double fp = static_cast<double>(cm.fp);
    const double fn = static_cast<double>(cm.fn);
    const double tn = static_cast<double>(cm.tn);
    m.accuracy = (tp + tn) / static_cast<double>(cm.total());

    if (cm.tp + cm.fp == 0) {
        m.precision = 0.0;
        m.degenerate.push_back("precision");
    } else {
        m.precision = tp / (tp + fp);
    }
    if (cm.tp + cm.fn == 0) {
        m.recall = 0.0;
        m.degenerate.push_back("recall");
    } else {
        m.recall = tp / (tp + fn);
    }
    if (m.precision + m.recall == 0.0) {
        m.f1 = 0.0;
        m.degenerate.push_back("f1");
    } else {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

RocCurve roc_auc(std::span<const int> labels, std::span<const double> scores) {
    if (labels.size() != scores.size())
        fail(ErrorKind::length_mismatch, "labels and scores differ in length");
    std::uint64_t positives = 0, negatives = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            fail(ErrorKind::non_binary_value, "roc labels must be in {0,1}");
        if (!std::isfinite(scores[i])) fail(ErrorKind::parse_error, "non-finite score");
        labels[i] == 1 ? ++positives : ++negatives;
    }
    if (positives == 0 || negatives == 0)
        fail(ErrorKind::single_class, "AUC undefined with a single class");

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});

    const double p_total = static_cast<double>(positives);
    const double n_total = static_cast<double>(negatives);
    std::uint64_t tp = 0, fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;

    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // consume the whole tied-score group as one threshold point
        while (i < order.size() && scores[order[i]] == threshold) {
            labels[order[i]] == 1 ? ++tp : ++fp;
            ++i;
        }
        const double fpr = static_cast<double>(fp) / n_total;
        const double tpr = static_cast<double>(tp) / p_total;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        curve.points.push_back({fpr, tpr, threshold});
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    curve.auc = auc;
    return curve;
}

MetricValue mcc(const ConfusionMatrix& cm) {
    if (cm.total() == 0) fail(ErrorKind::length_mismatch, "empty confusion matrix");
    const double tp = static_cast<double>(cm.tp);
    const double fp = static_cast<double>(cm.fp);
    const double fn = static_cast<double>(cm.fn);
    const double tn = static_cast<double>(cm.tn);
    const double f1 = tp + fp, f2 = tp + fn, f3 = tn + fp, f4 = tn + fn;
    if (f1 == 0.0 || f2 == 0.0 || f3 == 0.0 || f4 == 0.0) return {0.0, true};
    // factored square roots keep intermediates small
    const double denom = std::sqrt(f1) * std::sqrt(f2) * std::sqrt(f3) * std::sqrt(f4);
    return {(tp * tn - fp * fn) / denom, false};
}

MetricValue kappa(const ConfusionMatrix& cm) {
    if (cm.total() == 0) fail(ErrorKind::length_mismatch, "empty confusion matrix");
    const double n = static_cast<double>(cm.total());
    const double tp = static_cast<double>(cm.tp);
    const double fp = static_cast<double>(cm.fp);
    const double fn = static_cast<double>(cm.fn);
    const double tn = static_cast<double>(cm.tn);
    const double po = (tp + tn) / n;
    const double pe = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n);
    if (pe == 1.0) return {0.0, true};
    return {(po - pe) / (1.0 - pe), false};
}

nlohmann::json RocCurve::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : points) {
        // +inf is not representable in JSON; null marks the leading point
        nlohmann::json thr;
        if (std::isfinite(p.threshold)) thr = p.threshold;
        pts.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", thr}});
    }
    return {{"points", pts}, {"auc", auc}};
}

RocCurve RocCurve::from_json(const nlohmann::json& j) {
    RocCurve c;
    for (const auto& p : j.at("points")) {
        RocPoint pt;
        pt.fpr = p.at("fpr").get<double>();
        pt.tpr = p.at("tpr").get<double>();
        pt.threshold = p.at("threshold").is_null()
                           ? std::numeric_limits<double>::infinity()
                           : p.at("threshold").get<double>();
        c.points.push_back(pt);
    }
    c.auc = j.at("auc").get<double>();
    return c;
}

void RocCurve::write_csv(std::ostream& out) const {
    out << "fpr,tpr,threshold\n";
    for (const auto& p : points) {
        out << p.fpr << ',' << p.tpr << ',';
        if (std::isfinite(p.threshold))
            out << p.threshold;
        else
            out << "inf";
        out << '\n';
    }
}

nlohmann::json EvalReport::to_json() const {
    return {{"model_id", model_id},
            {"confusion", cm.to_json()},
            {"accuracy", accuracy},
            {"precision", precision},
            {"recall", recall},
            {"f1", f1},
            {"auc", auc},
            {"mcc", mcc},
            {"kappa", kappa},
            {"roc", roc.to_json()},
            {"train_time_seconds", train_time_seconds},
            {"degenerate_metrics", degenerate_metrics}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
    EvalReport r;
    r.model_id = j.at("model_id").get<std::string>();
    r.cm = ConfusionMatrix::from_json(j.at("confusion"));
    r.accuracy = j.at("accuracy").get<double>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.auc = j.at("auc").get<double>();
    r.mcc = j.at("mcc").get<double>();
    r.kappa = j.at("kappa").get<double>();
    r.roc = RocCurve::from_json(j.at("roc"));
    r.train_time_seconds = j.at("train_time_seconds").get<double>();
    r.degenerate_metrics = j.at("degenerate_metrics").get<std::vector<std::string>>();
    return r;
}

EvalReport evaluate(const std::string& model_id, std::span<const int> labels,
                    std::span<const double> scores, double threshold,
                    double train_time_seconds) {
    if (labels.size() != scores.size())
        fail(ErrorKind::length_mismatch, "labels and scores differ in length");
    std::vector<int> predictions(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        predictions[i] = scores[i] >= threshold ? 1 : 0;

    EvalReport report;
    report.model_id = model_id;
    report.cm = confusion(labels, predictions);
    ScalarMetrics sm = scalar_metrics(report.cm);
    report.accuracy = sm.accuracy;
    report.precision = sm.precision;
    report.recall = sm.recall;
    report.f1 = sm.f1;
    report.degenerate_metrics = sm.degenerate;

    report.roc = roc_auc(labels, scores);
    report.auc = report.roc.auc;

    MetricValue m = mcc(report.cm);
    report.mcc = m.value;
    if (m.degenerate) report.degenerate_metrics.push_back("mcc");
    MetricValue k = kappa(report.cm);
    report.kappa = k.value;
    if (k.degenerate) report.degenerate_metrics.push_back("kappa");

    report.train_time_seconds = train_time_seconds;
    return report;
}

}  // namespace malbench
