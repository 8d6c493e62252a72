#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chomp/cwt.hpp"
#include "chomp/eval.hpp"
#include "chomp/forest.hpp"
#include "chomp/nn/train.hpp"
#include "chomp/recording.hpp"
#include "chomp/windowing.hpp"

namespace chomp {

// Loads every session directory (any subdirectory with a manifest.txt),
// sorted by session id for a stable order.
std::vector<Recording> load_corpus(const std::filesystem::path& dir);

// Applies the per-unit Butterworth bandpass to every channel in place.
void preprocess_recording(Recording& rec);

inline int label_index(Activity a) { return static_cast<int>(a); }

// Windows for one unit across a corpus; sessions whose common span is too
// short are skipped.
std::vector<Window> make_windows(const std::vector<Recording>& recs, UnitKind unit,
                                 const WindowingConfig& cfg = {});

// Window -> log-power scalograms. Standardization is not applied here: the
// evaluation drivers standardize train and test portions independently.
std::vector<Scalogram> make_scalograms(const std::vector<Window>& windows,
                                       UnitKind unit);

// Flattens scalograms into the CNN sample layout; meta rows parallel x/y.
void to_batchset(const std::vector<Scalogram>& scals, nn::Batchset<float>& out,
                 std::vector<SampleMeta>& meta);

// On-disk window / scalogram sets: one rank-3 (N, rows, cols) or rank-4
// (N, channels, scales, frames) tensor per unit plus a sidecar text manifest
// with one "subject session activity food start_ms" line per sample.
void save_windows(const std::vector<Window>& windows, UnitKind unit,
                  const std::filesystem::path& dir);
std::vector<Window> load_windows(const std::filesystem::path& dir, UnitKind unit);
void save_scalograms(const std::vector<Scalogram>& scals, UnitKind unit,
                     const std::filesystem::path& dir);
std::vector<Scalogram> load_scalograms(const std::filesystem::path& dir,
                                       UnitKind unit);

// ---------------------------------------------------------------------------

// MFCC-feature random-forest baseline under a cross-validation protocol.
ProtocolReport run_baseline(const std::vector<Window>& windows, Protocol protocol,
                            const RfConfig& rf = {}, std::uint64_t seed = 0);

struct CnnEvalConfig {
    nn::BackboneConfig backbone;
    nn::TrainConfig train;
};

// Single-sensor CNN under a protocol: one model trained per fold.
ProtocolReport run_cnn_single(const std::vector<Scalogram>& scals,
                              const CnnEvalConfig& cfg, Protocol protocol,
                              std::uint64_t seed = 0);

// Gated fusion across sensor units; samples are matched across units by
// (session, start time) and must agree on labels.
ProtocolReport run_cnn_fusion(const std::vector<std::vector<Scalogram>>& per_unit,
                              const CnnEvalConfig& cfg, Protocol protocol,
                              std::uint64_t seed = 0);

}  // namespace chomp
