#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "chomp/errors.hpp"
#include "chomp/eval.hpp"
#include "chomp/rng.hpp"

namespace chomp {

std::vector<FoldSplit> split_protocol(const std::vector<SampleMeta>& samples,
                                      Protocol protocol, std::uint64_t seed) {
    std::vector<FoldSplit> folds;
    if (protocol == Protocol::Loso) {
        std::set<std::string> subjects;
        for (const auto& s : samples) subjects.insert(s.subject_id);
        if (subjects.size() < 2)
            throw ConfigError("LOSO needs at least 2 subjects");
        for (const auto& subj : subjects) {
            FoldSplit fold;
            fold.fold_key = subj;
            for (int i = 0; i < static_cast<int>(samples.size()); ++i)
                (samples[i].subject_id == subj ? fold.test : fold.train).push_back(i);
            folds.push_back(std::move(fold));
        }
        return folds;
    }

    // LOFO: one fold per food label; chewing windows of the held-out food go
    // to test, all other chewing windows to train. Other-class windows are
    // split 80/20 by seeded subject-stratified assignment per fold.
    std::set<std::string> foods;
    for (const auto& s : samples)
        if (s.food_label) foods.insert(*s.food_label);
    if (foods.size() < 2) throw ConfigError("LOFO needs at least 2 food labels");

    for (const auto& food : foods) {
        FoldSplit fold;
        fold.fold_key = food;

        // per-subject buckets of Other windows, deterministic split
        std::map<std::string, std::vector<int>> other_by_subject;
        for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
            const auto& s = samples[i];
            if (s.label == Activity::Other) {
                other_by_subject[s.subject_id].push_back(i);
            } else if (s.food_label && *s.food_label == food) {
                fold.test.push_back(i);
            } else {
                fold.train.push_back(i);
            }
        }
        for (auto& [subj, idx] : other_by_subject) {
            Rng rng = make_rng(seed, "lofo-other/" + food + "/" + subj);
            std::shuffle(idx.begin(), idx.end(), rng);
            const auto n_test = idx.size() / 5;  // 20% to test
            for (std::size_t k = 0; k < idx.size(); ++k)
                (k < n_test ? fold.test : fold.train).push_back(idx[k]);
        }
        std::sort(fold.train.begin(), fold.train.end());
        std::sort(fold.test.begin(), fold.test.end());
        folds.push_back(std::move(fold));
    }
    return folds;
}

}  // namespace chomp
