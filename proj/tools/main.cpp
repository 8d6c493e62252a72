#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chomp/checkpoint.hpp"
#include "chomp/cspsim.hpp"
#include "chomp/errors.hpp"
#include "chomp/features.hpp"
#include "chomp/pipeline.hpp"
#include "chomp/sync.hpp"
#include "chomp/synth.hpp"

namespace {

constexpr const char* kVersion = "chomp 0.1.0";

std::vector<chomp::UnitKind> parse_units(const std::string& csv) {
    std::vector<chomp::UnitKind> units;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) units.push_back(chomp::unit_from_name(tok));
    if (units.empty()) throw chomp::ConfigError("empty unit list");
    return units;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

// Every artifact directory records the command that produced it. The wall
// time line is the only non-deterministic content.
void write_run_manifest(const std::filesystem::path& dir,
                        const std::string& command, std::uint64_t seed,
                        double wall_seconds) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / "run_manifest.txt");
    f << "tool: " << kVersion << "\n"
      << "command: " << command << "\n"
      << "seed: " << seed << "\n"
      << "wall_time_s: " << wall_seconds << "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw chomp::ConfigError("cannot write " + path.string());
    f << text;
}

chomp::Protocol parse_protocol(const std::string& s) {
    if (s == "lofo") return chomp::Protocol::Lofo;
    if (s == "loso") return chomp::Protocol::Loso;
    throw chomp::ConfigError("protocol must be lofo or loso");
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CHOMP chewing-side detection pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --seed/--threads appear after the subcommand
    std::uint64_t seed = 0;
    int threads = 1;
    app.add_option("--seed", seed, "master seed; all module seeds derive from it");
    app.add_option("--threads", threads, "parallelism cap");

    // sync
    auto* sync = app.add_subcommand("sync", "align a recording via GCC-PHAT");
    std::string sync_rec, sync_align, sync_out;
    sync->add_option("--recording", sync_rec)->required();
    sync->add_option("--alignment", sync_align)->required();
    sync->add_option("--out", sync_out)->required();

    // preprocess
    auto* prep = app.add_subcommand("preprocess", "filter and window a corpus");
    std::string prep_in, prep_out, prep_units = "mic,bone,imu,pressure,ppg";
    prep->add_option("--in", prep_in)->required();
    prep->add_option("--out", prep_out)->required();
    prep->add_option("--units", prep_units);

    // scalogram
    auto* scal = app.add_subcommand("scalogram", "CWT scalograms from windows");
    std::string scal_in, scal_out, scal_unit;
    scal->add_option("--in", scal_in)->required();
    scal->add_option("--out", scal_out)->required();
    scal->add_option("--unit", scal_unit)->required();

    // baseline
    auto* base = app.add_subcommand("baseline", "MFCC + random-forest baseline");
    std::string base_unit, base_protocol, base_in, base_report;
    base->add_option("--unit", base_unit)->required();
    base->add_option("--protocol", base_protocol)->required();
    base->add_option("--in", base_in)->required();
    base->add_option("--report", base_report)->required();

    // train
    auto* train = app.add_subcommand("train", "train a CNN checkpoint");
    std::string train_unit, train_fuse, train_protocol = "loso";
    std::string train_data, train_out;
    int train_epochs = -1;
    train->add_option("--unit", train_unit);
    train->add_option("--fuse", train_fuse);
    train->add_option("--protocol", train_protocol);
    train->add_option("--data", train_data)->required();
    train->add_option("--out", train_out)->required();
    train->add_option("--max-epochs", train_epochs, "override schedule length");

    // eval
    auto* eval = app.add_subcommand("eval", "cross-validated evaluation report");
    std::string eval_protocol, eval_model, eval_data, eval_report, eval_unit;
    bool eval_baseline = false;
    int eval_epochs = -1;
    eval->add_option("--protocol", eval_protocol)->required();
    eval->add_option("--model", eval_model);
    eval->add_flag("--baseline", eval_baseline);
    eval->add_option("--unit", eval_unit);
    eval->add_option("--data", eval_data)->required();
    eval->add_option("--report", eval_report)->required();
    eval->add_option("--max-epochs", eval_epochs, "override schedule length");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo CSP diagnosis");
    std::string sim_mu = "0.60,0.65,0.70", sim_durations = "1,5,15", sim_out;
    double sim_error = 0.046;
    int sim_draws = 10000;
    sim->add_option("--mu", sim_mu);
    sim->add_option("--error", sim_error);
    sim->add_option("--durations", sim_durations);
    sim->add_option("--draws", sim_draws);
    sim->add_option("--out", sim_out);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    int synth_subjects = 4, synth_foods = 3;
    double synth_duration = 30.0, synth_asym = 6.0;
    std::string synth_out;
    synth->add_option("--subjects", synth_subjects);
    synth->add_option("--foods", synth_foods);
    synth->add_option("--duration", synth_duration);
    synth->add_option("--asymmetry", synth_asym);
    synth->add_option("--out", synth_out)->required();

    // report
    auto* report = app.add_subcommand("report", "collate report files");
    std::vector<std::string> report_in;
    std::string report_out;
    report->add_option("--in", report_in)->required();
    report->add_option("--out", report_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::string command;
    for (int i = 0; i < argc; ++i) command += std::string(i ? " " : "") + argv[i];

    try {
        Timer timer;
        if (*sync) {
            chomp::Recording rec = chomp::load_recording(sync_rec);
            const chomp::Recording stim = chomp::load_recording(sync_align);
            const auto* l = stim.find_channel(chomp::Earable::Left,
                                              chomp::UnitKind::Microphones, 0);
            const auto* r = stim.find_channel(chomp::Earable::Right,
                                              chomp::UnitKind::Microphones, 0);
            if (!l || !r)
                throw chomp::MissingChannel(
                    "alignment recording needs both microphone channels");
            const auto est =
                chomp::gcc_phat_offset(l->samples, r->samples, l->sample_rate,
                                       2.0, 2.0);
            chomp::save_recording(chomp::align_recording(std::move(rec), est),
                                  sync_out);
            std::ostringstream os;
            os << "offset_s: " << est.offset << "\n"
               << "lag_samples: " << est.lag_index << "\n"
               << "peak: " << est.peak_value << "\n";
            write_text(std::filesystem::path(sync_out) / "alignment.txt", os.str());
            write_run_manifest(sync_out, command, seed, timer.seconds());
        } else if (*prep) {
            auto recs = chomp::load_corpus(prep_in);
            for (auto& r : recs) chomp::preprocess_recording(r);
            for (auto unit : parse_units(prep_units)) {
                const auto windows = chomp::make_windows(recs, unit);
                if (!windows.empty()) chomp::save_windows(windows, unit, prep_out);
            }
            write_run_manifest(prep_out, command, seed, timer.seconds());
        } else if (*scal) {
            const auto unit = chomp::unit_from_name(scal_unit);
            const auto windows = chomp::load_windows(scal_in, unit);
            chomp::save_scalograms(chomp::make_scalograms(windows, unit), unit,
                                   scal_out);
            write_run_manifest(scal_out, command, seed, timer.seconds());
        } else if (*base) {
            const auto unit = chomp::unit_from_name(base_unit);
            const auto windows = chomp::load_windows(base_in, unit);
            const auto rep = chomp::run_baseline(
                windows, parse_protocol(base_protocol), {}, seed);
            write_text(base_report,
                       chomp::format_report(rep, "baseline rf " + base_unit));
        } else if (*train) {
            if (train_unit.empty() == train_fuse.empty())
                throw chomp::ConfigError("train needs exactly one of --unit/--fuse");
            chomp::nn::TrainConfig tc;
            tc.seed = chomp::derive_seed(seed, "cli-train");
            if (train_epochs > 0) {
                tc.max_epochs = train_epochs;
                tc.fusion_max_epochs = train_epochs;
            }
            chomp::Checkpoint ck;
            ck.meta["protocol"] = train_protocol;
            ck.meta["seed"] = std::to_string(seed);
            if (!train_unit.empty()) {
                const auto unit = chomp::unit_from_name(train_unit);
                auto scals = chomp::load_scalograms(train_data, unit);
                chomp::standardize(scals);
                chomp::nn::Batchset<float> data;
                std::vector<chomp::SampleMeta> meta;
                chomp::to_batchset(scals, data, meta);
                chomp::nn::BackboneConfig bc;
                bc.in_channels = data.c;
                chomp::nn::SingleSensorModel<float> model;
                model.init(bc, chomp::derive_seed(seed, "cli-init"));
                const auto res = chomp::nn::train_single(model, data, tc);
                ck = chomp::make_checkpoint(model);
                ck.meta["units"] = train_unit;
                ck.meta["epochs"] = std::to_string(res.epochs_run);
                ck.meta["best_val_loss"] = std::to_string(res.best_val_loss);
            } else {
                const auto units = parse_units(train_fuse);
                std::vector<std::vector<chomp::Scalogram>> per_unit;
                std::vector<chomp::nn::Batchset<float>> data(units.size());
                std::vector<chomp::nn::BackboneConfig> bcs(units.size());
                for (std::size_t u = 0; u < units.size(); ++u) {
                    auto scals = chomp::load_scalograms(train_data, units[u]);
                    chomp::standardize(scals);
                    std::vector<chomp::SampleMeta> meta;
                    chomp::to_batchset(scals, data[u], meta);
                    bcs[u].in_channels = data[u].c;
                }
                chomp::nn::FusionModel<float> model;
                model.init(bcs, chomp::derive_seed(seed, "cli-init"));
                const auto res = chomp::nn::train_fusion(model, data, tc);
                ck = chomp::make_checkpoint(model);
                ck.meta["units"] = train_fuse;
                ck.meta["epochs"] = std::to_string(res.epochs_run);
                ck.meta["best_val_loss"] = std::to_string(res.best_val_loss);
            }
            ck.meta["protocol"] = train_protocol;
            ck.meta["seed"] = std::to_string(seed);
            chomp::save_checkpoint(ck, train_out);
            write_run_manifest(train_out, command, seed, timer.seconds());
        } else if (*eval) {
            const auto protocol = parse_protocol(eval_protocol);
            std::string text;
            if (eval_baseline) {
                if (eval_unit.empty())
                    throw chomp::ConfigError("--baseline eval needs --unit");
                const auto unit = chomp::unit_from_name(eval_unit);
                const auto windows = chomp::load_windows(eval_data, unit);
                text = chomp::format_report(
                    chomp::run_baseline(windows, protocol, {}, seed),
                    "baseline rf " + eval_unit + " " + eval_protocol);
            } else if (!eval_model.empty()) {
                const auto ck = chomp::load_checkpoint(eval_model);
                const auto it = ck.meta.find("units");
                if (it == ck.meta.end())
                    throw chomp::FormatError("checkpoint lacks a units entry");
                const auto units = parse_units(it->second);
                chomp::CnnEvalConfig cfg;
                cfg.train.seed = chomp::derive_seed(seed, "cli-eval");
                if (eval_epochs > 0) {
                    cfg.train.max_epochs = eval_epochs;
                    cfg.train.fusion_max_epochs = eval_epochs;
                }
                if (units.size() == 1) {
                    const auto scals =
                        chomp::load_scalograms(eval_data, units[0]);
                    text = chomp::format_report(
                        chomp::run_cnn_single(scals, cfg, protocol, seed),
                        "cnn " + it->second + " " + eval_protocol);
                } else {
                    std::vector<std::vector<chomp::Scalogram>> per_unit;
                    for (auto u : units)
                        per_unit.push_back(chomp::load_scalograms(eval_data, u));
                    text = chomp::format_report(
                        chomp::run_cnn_fusion(per_unit, cfg, protocol, seed),
                        "fusion " + it->second + " " + eval_protocol);
                }
            } else {
                throw chomp::ConfigError("eval needs --model or --baseline");
            }
            write_text(eval_report, text);
        } else if (*sim) {
            chomp::SimConfig cfg;
            cfg.mus = parse_doubles(sim_mu);
            cfg.durations_min = parse_doubles(sim_durations);
            cfg.error_rate = sim_error;
            cfg.n_draws = sim_draws;
            cfg.rng_seed = chomp::derive_seed(seed, "cli-simulate");
            const auto rep = chomp::monte_carlo(cfg);
            const std::string text = chomp::format_sim_report(rep);
            if (sim_out.empty())
                std::cout << text;
            else
                write_text(sim_out, text);
        } else if (*synth) {
            chomp::CorpusParams cp;
            cp.n_subjects = synth_subjects;
            cp.foods_per_subject = synth_foods;
            cp.duration = synth_duration;
            cp.asymmetry_db = synth_asym;
            cp.seed = chomp::derive_seed(seed, "cli-synth");
            const int n = chomp::generate_corpus(cp, synth_out);
            write_run_manifest(synth_out, command, seed, timer.seconds());
            std::cout << "wrote " << n << " sessions\n";
        } else if (*report) {
            std::ostringstream os;
            for (const auto& path : report_in) {
                std::ifstream f(path);
                if (!f) throw chomp::ConfigError("cannot read " + path);
                os << "==== " << std::filesystem::path(path).filename().string()
                   << " ====\n"
                   << f.rdbuf() << "\n";
            }
            if (report_out.empty())
                std::cout << os.str();
            else
                write_text(report_out, os.str());
        }
    } catch (const chomp::Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
