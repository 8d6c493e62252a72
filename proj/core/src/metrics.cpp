#include <algorithm>
#include <cmath>
#include <sstream>

#include "chomp/errors.hpp"
#include "chomp/eval.hpp"

namespace chomp {

FoldReport score_fold(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.size() != labels.size())
        throw ConfigError("prediction/label length mismatch");
    FoldReport r;
    r.n_test = static_cast<long>(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] > 2 || preds[i] < 0 || preds[i] > 2)
            throw ConfigError("labels must be in {0,1,2}");
        ++r.confusion[labels[i]][preds[i]];
    }
    double f1_sum = 0.0, prec_sum = 0.0, rec_sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        long tp = r.confusion[c][c];
        long fp = 0, fn = 0;
        for (int o = 0; o < 3; ++o) {
            if (o == c) continue;
            fp += r.confusion[o][c];
            fn += r.confusion[c][o];
        }
        const double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        const double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        prec_sum += prec;
        rec_sum += rec;
        f1_sum += f1;
    }
    r.macro_precision = prec_sum / 3.0;
    r.macro_recall = rec_sum / 3.0;
    r.macro_f1 = f1_sum / 3.0;
    return r;
}

double quantile_linear(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("quantile of empty set");
    std::sort(values.begin(), values.end());
    const double pos = q * (static_cast<double>(values.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * values[lo] + w * values[hi];
}

ProtocolReport aggregate(std::vector<FoldReport> reports) {
    if (reports.empty()) throw ConfigError("aggregate needs at least one fold");
    ProtocolReport p;
    std::vector<double> f1s;
    std::array<std::array<long, 3>, 3> pooled{};
    for (const auto& r : reports) {
        f1s.push_back(r.macro_f1);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) pooled[i][j] += r.confusion[i][j];
    }
    p.median_f1 = quantile_linear(f1s, 0.5);
    p.q1 = quantile_linear(f1s, 0.25);
    p.q3 = quantile_linear(f1s, 0.75);
    double prec_sum = 0.0, rec_sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        long tp = pooled[c][c], fp = 0, fn = 0;
        for (int o = 0; o < 3; ++o) {
            if (o == c) continue;
            fp += pooled[o][c];
            fn += pooled[c][o];
        }
        prec_sum += tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        rec_sum += tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    }
    p.pooled_precision = prec_sum / 3.0;
    p.pooled_recall = rec_sum / 3.0;
    p.folds = std::move(reports);
    return p;
}

std::string format_report(const ProtocolReport& report, const std::string& title) {
    std::ostringstream os;
    os << "# " << title << "\n";
    os << "median_f1: " << report.median_f1 << "\n";
    os << "q1: " << report.q1 << "\n";
    os << "q3: " << report.q3 << "\n";
    os << "pooled_precision: " << report.pooled_precision << "\n";
    os << "pooled_recall: " << report.pooled_recall << "\n";
    for (const auto& f : report.folds) {
        os << "fold: " << f.fold_key << " macro_f1 " << f.macro_f1 << " precision "
           << f.macro_precision << " recall " << f.macro_recall << " n_test "
           << f.n_test;
        if (!f.note.empty()) os << " note \"" << f.note << "\"";
        os << "\n";
        os << "  confusion:";
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) os << " " << f.confusion[i][j];
        os << "\n";
    }
    return os.str();
}

}  // namespace chomp
