#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chomp/recording.hpp"

namespace chomp {

struct FoldReport {
    std::string fold_key;  // held-out food or subject
    double macro_f1 = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    std::array<std::array<long, 3>, 3> confusion{};  // [label][prediction]
    long n_test = 0;
    std::string note;
};

struct ProtocolReport {
    std::vector<FoldReport> folds;
    double median_f1 = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double pooled_precision = 0.0;
    double pooled_recall = 0.0;
};

enum class Protocol { Lofo, Loso };

// What the splitters need to know about one sample.
struct SampleMeta {
    std::string subject_id;
    std::optional<std::string> food_label;
    Activity label = Activity::Other;
};

struct FoldSplit {
    std::string fold_key;
    std::vector<int> train;  // indices into the dataset
    std::vector<int> test;
};

// LOSO: one fold per subject, all of that subject's windows held out.
// LOFO: one fold per food label; Other-class windows are assigned 80/20
// train/test per fold by seeded subject-stratified assignment.
std::vector<FoldSplit> split_protocol(const std::vector<SampleMeta>& samples,
                                      Protocol protocol, std::uint64_t seed = 0);

// Per-class precision/recall/F1 with 0-denominator guards, macro averaged
// over the three classes.
FoldReport score_fold(const std::vector<int>& preds, const std::vector<int>& labels);

// Median and linear-interpolation quartiles of macro F1 across folds plus
// pooled precision/recall from the summed confusion matrix.
ProtocolReport aggregate(std::vector<FoldReport> reports);

double quantile_linear(std::vector<double> values, double q);

std::string format_report(const ProtocolReport& report, const std::string& title);

}  // namespace chomp
