#pragma once

#include <cstdint>
#include <vector>

namespace chomp {

struct RfConfig {
    int n_estimators = 100;
    bool bootstrap = true;
    double max_samples = 0.8;
    int max_depth = 10;
    int min_samples_split = 20;
    int min_samples_leaf = 10;
    // max_features = sqrt(n_features), rounded down, at least 1
    double ccp_alpha = 0.01;
    // class_weight balanced: w_c = n / (k * n_c) on the fit data
    std::uint64_t seed = 42;
};

struct TreeNode {
    int feature = -1;        // -1 for leaves
    double threshold = 0.0;
    int left = -1, right = -1;
    int leaf_class = 0;
    std::vector<double> weighted_counts;
    double weighted_n = 0.0;
    double impurity = 0.0;  // Gini
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int predict(const double* x) const;
};

struct RfModel {
    std::vector<DecisionTree> trees;
    int n_features = 0;
    int n_classes = 0;
};

// Feature matrix is row-major n_samples x n_features.
RfModel train_rf(const std::vector<double>& X, const std::vector<int>& y,
                 int n_features, const RfConfig& cfg = {});

// Majority vote over trees; ties broken by lowest class index. vote_fractions,
// when non-null, receives per-row per-class vote shares.
std::vector<int> predict_rf(const RfModel& m, const std::vector<double>& X,
                            std::vector<std::vector<double>>* vote_fractions = nullptr);

}  // namespace chomp
