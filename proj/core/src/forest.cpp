#include "chomp/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <set>

#include "chomp/errors.hpp"
#include "chomp/rng.hpp"

namespace chomp {

namespace {

double gini(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double g = 1.0;
    for (double c : counts) {
        const double p = c / total;
        g -= p * p;
    }
    return g;
}

int argmax_class(const std::vector<double>& counts) {
    int best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = static_cast<int>(c);
    return best;  // ties keep the lowest index
}

struct TreeBuilder {
    const std::vector<double>& X;
    const std::vector<int>& y;
    int n_features;
    int n_classes;
    const RfConfig& cfg;
    const std::vector<double>& class_weight;
    Rng rng;
    std::vector<TreeNode> nodes;

    // indices may repeat (bootstrap multiplicity)
    int build(std::vector<int> idx, int depth) {
        TreeNode node;
        node.weighted_counts.assign(n_classes, 0.0);
        for (int i : idx) node.weighted_counts[y[i]] += class_weight[y[i]];
        node.weighted_n = std::accumulate(node.weighted_counts.begin(),
                                          node.weighted_counts.end(), 0.0);
        node.impurity = gini(node.weighted_counts, node.weighted_n);
        node.leaf_class = argmax_class(node.weighted_counts);

        const bool can_split =
            depth < cfg.max_depth &&
            static_cast<int>(idx.size()) >= cfg.min_samples_split &&
            node.impurity > 1e-12;

        int best_feature = -1;
        double best_threshold = 0.0, best_score = -1e300;
        if (can_split) {
            const int m = std::max(1, static_cast<int>(std::sqrt(
                                          static_cast<double>(n_features))));
            std::vector<int> feats(n_features);
            std::iota(feats.begin(), feats.end(), 0);
            std::shuffle(feats.begin(), feats.end(), rng);
            feats.resize(m);
            std::sort(feats.begin(), feats.end());  // deterministic scan order

            std::vector<std::pair<double, int>> vals(idx.size());
            for (int f : feats) {
                for (std::size_t i = 0; i < idx.size(); ++i)
                    vals[i] = {X[static_cast<std::size_t>(idx[i]) * n_features + f],
                               y[idx[i]]};
                std::sort(vals.begin(), vals.end());

                std::vector<double> left_counts(n_classes, 0.0);
                std::vector<double> right_counts = node.weighted_counts;
                double left_w = 0.0, right_w = node.weighted_n;
                for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                    const double w = class_weight[vals[i].second];
                    left_counts[vals[i].second] += w;
                    right_counts[vals[i].second] -= w;
                    left_w += w;
                    right_w -= w;
                    if (vals[i].first == vals[i + 1].first) continue;
                    const auto n_left = static_cast<int>(i) + 1;
                    const auto n_right = static_cast<int>(vals.size()) - n_left;
                    if (n_left < cfg.min_samples_leaf || n_right < cfg.min_samples_leaf)
                        continue;
                    const double score =
                        -(left_w * gini(left_counts, left_w) +
                          right_w * gini(right_counts, right_w));
                    if (score > best_score) {
                        best_score = score;
                        best_feature = f;
                        best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                    }
                }
            }
        }

        const int self = static_cast<int>(nodes.size());
        nodes.push_back(node);
        if (best_feature >= 0) {
            std::vector<int> li, ri;
            for (int i : idx) {
                if (X[static_cast<std::size_t>(i) * n_features + best_feature] <=
                    best_threshold)
                    li.push_back(i);
                else
                    ri.push_back(i);
            }
            if (!li.empty() && !ri.empty()) {
                nodes[self].feature = best_feature;
                nodes[self].threshold = best_threshold;
                const int l = build(std::move(li), depth + 1);
                const int r = build(std::move(ri), depth + 1);
                nodes[self].left = l;
                nodes[self].right = r;
            }
        }
        return self;
    }
};

// minimal cost-complexity (weakest-link) pruning at a fixed alpha
void prune_tree(DecisionTree& tree, double alpha, double total_weight) {
    if (alpha <= 0.0) return;
    auto& nodes = tree.nodes;
    auto node_risk = [&](const TreeNode& n) {
        return n.impurity * n.weighted_n / total_weight;
    };
    while (true) {
        // subtree risk and leaf count per node
        std::vector<double> risk(nodes.size());
        std::vector<int> leaves(nodes.size());
        for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
            if (nodes[i].feature < 0) {
                risk[i] = node_risk(nodes[i]);
                leaves[i] = 1;
            } else {
                risk[i] = risk[nodes[i].left] + risk[nodes[i].right];
                leaves[i] = leaves[nodes[i].left] + leaves[nodes[i].right];
            }
        }
        int weakest = -1;
        double weakest_alpha = 1e300;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].feature < 0) continue;
            const double a = (node_risk(nodes[i]) - risk[i]) / (leaves[i] - 1);
            if (a < weakest_alpha) {
                weakest_alpha = a;
                weakest = static_cast<int>(i);
            }
        }
        if (weakest < 0 || weakest_alpha > alpha) break;
        nodes[weakest].feature = -1;
        nodes[weakest].left = nodes[weakest].right = -1;
    }
}

// content hash making tree construction invariant to row permutation
std::uint64_t sample_key(const double* x, int n_features, int label) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(label);
    for (int i = 0; i < n_features; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &x[i], sizeof(bits));
        h = splitmix64(h ^ bits);
    }
    return h;
}

}  // namespace

int DecisionTree::predict(const double* x) const {
    int i = 0;
    while (nodes[i].feature >= 0)
        i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].leaf_class;
}

RfModel train_rf(const std::vector<double>& X, const std::vector<int>& y,
                 int n_features, const RfConfig& cfg) {
    if (n_features <= 0 || y.empty() ||
        X.size() != y.size() * static_cast<std::size_t>(n_features))
        throw ConfigError("bad training matrix");
    const int n = static_cast<int>(y.size());
    const int n_classes = *std::max_element(y.begin(), y.end()) + 1;
    std::vector<int> class_n(n_classes, 0);
    for (int c : y) ++class_n[c];
    int present = 0;
    for (int c : class_n) present += c > 0;
    if (present < 2) throw ConfigError("training data has a single class");

    std::vector<double> class_weight(n_classes, 0.0);
    for (int c = 0; c < n_classes; ++c)
        if (class_n[c] > 0)
            class_weight[c] = static_cast<double>(n) / (present * class_n[c]);

    // stable sample ordering: bootstrap indices refer to content-sorted rows
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint64_t> keys(n);
    for (int i = 0; i < n; ++i)
        keys[i] = sample_key(&X[static_cast<std::size_t>(i) * n_features], n_features,
                             y[i]);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return keys[a] < keys[b]; });

    RfModel model;
    model.n_features = n_features;
    model.n_classes = n_classes;
    const auto n_boot =
        cfg.bootstrap ? std::max(1, static_cast<int>(cfg.max_samples * n)) : n;
    double total_weight = 0.0;
    for (int i = 0; i < n; ++i) total_weight += class_weight[y[i]];

    for (int t = 0; t < cfg.n_estimators; ++t) {
        Rng tree_rng(splitmix64(cfg.seed + static_cast<std::uint64_t>(t)));
        std::vector<int> idx(n_boot);
        if (cfg.bootstrap) {
            std::uniform_int_distribution<int> pick(0, n - 1);
            for (auto& i : idx) i = order[pick(tree_rng)];
        } else {
            idx.assign(order.begin(), order.end());
        }
        TreeBuilder builder{X, y, n_features, n_classes, cfg, class_weight,
                            std::move(tree_rng), {}};
        builder.build(std::move(idx), 0);
        DecisionTree tree{std::move(builder.nodes)};
        prune_tree(tree, cfg.ccp_alpha, tree.nodes[0].weighted_n);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

std::vector<int> predict_rf(const RfModel& m, const std::vector<double>& X,
                            std::vector<std::vector<double>>* vote_fractions) {
    if (X.size() % m.n_features != 0)
        throw ConfigError("feature width mismatch in predict_rf");
    const auto n = X.size() / m.n_features;
    std::vector<int> out(n);
    if (vote_fractions) vote_fractions->assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> votes(m.n_classes, 0);
        for (const auto& tree : m.trees)
            ++votes[tree.predict(&X[i * m.n_features])];
        int best = 0;
        for (int c = 1; c < m.n_classes; ++c)
            if (votes[c] > votes[best]) best = c;
        out[i] = best;
        if (vote_fractions) {
            auto& vf = (*vote_fractions)[i];
            vf.resize(m.n_classes);
            for (int c = 0; c < m.n_classes; ++c)
                vf[c] = static_cast<double>(votes[c]) / m.trees.size();
        }
    }
    return out;
}

}  // namespace chomp
