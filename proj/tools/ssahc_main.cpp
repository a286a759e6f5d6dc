// ssahc: self-supervised AHC speaker diarization toolbox.
//
// Subcommands: diarize, score, sweep, fuse, heatmap, synth. Every subcommand
// is deterministic given identical flags, inputs and seed; batch work runs in
// a worker pool (--jobs) with per-recording output files written atomically
// and stdout assembled in input order, so job count never changes results.
//
// Exit codes: 0 success, 1 any recording failed, 2 usage/config error.

#include "ssahc/affinity.hpp"
#include "ssahc/io.hpp"
#include "ssahc/pipeline.hpp"
#include "ssahc/scoring.hpp"
#include "ssahc/synth.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace ssahc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRecordingFailed = 1;
constexpr int kExitUsage = 2;

// Shortest round-trip decimal form, for CSV cells.
std::string format_shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// Write-then-rename so a crash or a concurrent reader never sees a torn file.
void atomic_write_text(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw Error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string render_rttm(const std::vector<SpeakerTurn>& turns) {
    std::string out;
    for (const SpeakerTurn& t : turns) {
        out += "SPEAKER " + t.recording_id + " 1 " + format_fixed(t.onset_sec, 3) + " " +
               format_fixed(t.duration_sec, 3) + " <NA> <NA> " + t.speaker + " <NA> <NA>\n";
    }
    return out;
}

// Run fn(i) for i in [0, count) on up to `jobs` threads. Exceptions are the
// caller's job to capture inside fn; this only schedules.
void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (std::thread& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Shared option blocks
// ---------------------------------------------------------------------------

void add_hyperparam_flags(CLI::App* cmd, Hyperparams& hp, bool with_init_threshold) {
    cmd->add_option("--num-speakers", hp.target_speakers,
                    "Known speaker count N* (omit to stop by threshold)");
    if (with_init_threshold)
        cmd->add_option("--init-threshold", hp.init_threshold,
                        "Affinity threshold selecting the initial cluster count")
            ->capture_default_str();
    cmd->add_option("--stop-threshold", hp.stop_threshold,
                    "Merge stop threshold when N* is unknown")
        ->capture_default_str();
    cmd->add_option("--lambda", hp.lambda, "Merge regularization weight")->capture_default_str();
    cmd->add_option("--gamma", hp.gamma, "Negative-pair weight in the triplet loss")
        ->capture_default_str();
    cmd->add_option("--eta", hp.eta, "Stop training when loss/initial_loss <= eta")
        ->capture_default_str();
    cmd->add_option("--kc", hp.k_c, "Nearest-neighbor clusters in the merge penalty")
        ->capture_default_str();
    cmd->add_option("--lr", hp.learning_rate, "Adam learning rate")->capture_default_str();
    cmd->add_option("--max-epochs", hp.max_epochs, "Adam step cap per iteration (0 disables)")
        ->capture_default_str();
    cmd->add_option("--iterations", hp.num_iterations, "Train/merge rounds")
        ->capture_default_str();
    cmd->add_option("--pca-dim", hp.pca_dim, "Output dimension of the representation")
        ->capture_default_str();
    cmd->add_option("--seed", hp.seed, "Base RNG seed")->capture_default_str();
}

// ---------------------------------------------------------------------------
// diarize
// ---------------------------------------------------------------------------

struct DiarizeOpts {
    std::vector<std::string> inputs;
    std::string out_dir = ".";
    std::string whitening = "pooled";
    int jobs = 1;
    bool trace_merges = false;
    bool emit_history = false;
    Hyperparams hp;
};

WhiteningTransform load_whitening(const std::string& source,
                                  const std::vector<std::optional<Recording>>& recordings) {
    if (source != "pooled") {
        const Recording background = io::read_embeddings(source);
        return compute_whitening(background.embeddings);
    }
    Eigen::Index rows = 0, dim = -1;
    for (const auto& rec : recordings) {
        if (!rec) continue;
        rows += rec->embeddings.rows();
        if (dim < 0) dim = rec->embeddings.cols();
        if (dim != rec->embeddings.cols())
            throw DimensionError("recordings disagree on embedding dimension; cannot pool");
    }
    if (rows < 2)
        throw InsufficientDataError("pooled whitening needs at least 2 segments across inputs");
    Matrix pooled(rows, dim);
    Eigen::Index at = 0;
    for (const auto& rec : recordings) {
        if (!rec) continue;
        pooled.middleRows(at, rec->embeddings.rows()) = rec->embeddings;
        at += rec->embeddings.rows();
    }
    return compute_whitening(pooled);
}

std::string render_merge_trace(const std::vector<MergeStep>& steps) {
    std::string out = "phase\tcluster_a\tcluster_b\tscore\tclusters_after\n";
    for (const MergeStep& s : steps)
        out += std::to_string(s.iteration) + "\t" + std::to_string(s.cluster_a) + "\t" +
               std::to_string(s.cluster_b) + "\t" + io::format_full(s.score) + "\t" +
               std::to_string(s.clusters_after) + "\n";
    return out;
}

std::string render_loss_history(const std::vector<std::vector<double>>& history) {
    std::string out = "iteration\tepoch\tloss\n";
    for (std::size_t it = 0; it < history.size(); ++it)
        for (std::size_t e = 0; e < history[it].size(); ++e)
            out += std::to_string(it + 1) + "\t" + std::to_string(e + 1) + "\t" +
                   io::format_full(history[it][e]) + "\n";
    return out;
}

int run_diarize(const DiarizeOpts& opts) {
    try {
        opts.hp.validate();
    } catch (const std::exception& e) {
        std::cerr << "ssahc diarize: " << e.what() << "\n";
        return kExitUsage;
    }

    const std::size_t n = opts.inputs.size();
    std::vector<std::optional<Recording>> recordings(n);
    std::vector<std::string> failures(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            recordings[i] = io::read_embeddings(opts.inputs[i]);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    }

    WhiteningTransform whitening;
    try {
        whitening = load_whitening(opts.whitening, recordings);
    } catch (const std::exception& e) {
        std::cerr << "ssahc diarize: whitening: " << e.what() << "\n";
        return kExitUsage;
    }

    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);

    std::vector<std::string> summaries(n);
    run_parallel(n, opts.jobs, [&](std::size_t i) {
        if (!recordings[i]) return;
        const Recording& rec = *recordings[i];
        try {
            const DiarizationResult result = run_ssa(rec, whitening, opts.hp);
            const fs::path base = fs::path(opts.out_dir) / rec.id;
            atomic_write_text(base.string() + ".rttm", render_rttm(result.turns));
            atomic_write_text(base.string() + ".report.json", serialize_report(result));
            if (opts.trace_merges)
                atomic_write_text(base.string() + ".merges.tsv",
                                  render_merge_trace(result.merge_trace));
            if (opts.emit_history)
                atomic_write_text(base.string() + ".history.tsv",
                                  render_loss_history(result.loss_history));
            summaries[i] = rec.id + ": clusters=" + std::to_string(result.clusters.num_clusters) +
                           " turns=" + std::to_string(result.turns.size());
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    bool any_failed = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (!failures[i].empty()) {
            std::cerr << opts.inputs[i] << ": " << failures[i] << "\n";
            any_failed = true;
        } else {
            std::cout << summaries[i] << "\n";
        }
    }
    return any_failed ? kExitRecordingFailed : kExitOk;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreOpts {
    std::string ref_path;
    std::string hyp_path;
    double collar = 0.25;
    bool score_overlap = false;
};

// Turns grouped by recording id, ids in first-appearance order.
std::vector<std::pair<std::string, std::vector<SpeakerTurn>>> group_by_recording(
    const std::vector<SpeakerTurn>& turns) {
    std::vector<std::pair<std::string, std::vector<SpeakerTurn>>> groups;
    for (const SpeakerTurn& t : turns) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == t.recording_id; });
        if (it == groups.end()) {
            groups.emplace_back(t.recording_id, std::vector<SpeakerTurn>{t});
        } else {
            it->second.push_back(t);
        }
    }
    return groups;
}

std::string der_line(const std::string& label, const DerReport& report) {
    return label + " der=" + format_fixed(report.der_percent, 6) +
           " miss=" + format_fixed(report.missed_sec, 3) +
           " fa=" + format_fixed(report.false_alarm_sec, 3) +
           " conf=" + format_fixed(report.confusion_sec, 3) +
           " scored=" + format_fixed(report.scored_sec, 3);
}

int run_score(const ScoreOpts& opts) {
    std::vector<SpeakerTurn> ref_turns, hyp_turns;
    try {
        ref_turns = io::read_rttm(opts.ref_path);
        hyp_turns = io::read_rttm(opts.hyp_path);
        if (opts.collar < 0.0) throw ConfigError("collar must be nonnegative");
    } catch (const std::exception& e) {
        std::cerr << "ssahc score: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto ref_groups = group_by_recording(ref_turns);
    const auto hyp_groups = group_by_recording(hyp_turns);
    for (const auto& [id, turns] : hyp_groups) {
        (void)turns;
        const bool known = std::any_of(ref_groups.begin(), ref_groups.end(),
                                       [&](const auto& g) { return g.first == id; });
        if (!known)
            std::cerr << "warning: hypothesis recording '" << id << "' has no reference; ignored\n";
    }
    if (ref_groups.empty()) {
        std::cerr << "ssahc score: reference has no turns\n";
        return kExitUsage;
    }

    bool any_failed = false;
    std::vector<DerReport> reports;
    for (const auto& [id, ref] : ref_groups) {
        auto it = std::find_if(hyp_groups.begin(), hyp_groups.end(),
                               [&](const auto& g) { return g.first == id; });
        const std::vector<SpeakerTurn> empty;
        const std::vector<SpeakerTurn>& hyp = it == hyp_groups.end() ? empty : it->second;
        try {
            const DerReport report = compute_der(ref, hyp, opts.collar, !opts.score_overlap);
            reports.push_back(report);
            std::cout << der_line(id, report) << "\n";
        } catch (const std::exception& e) {
            std::cerr << id << ": " << e.what() << "\n";
            any_failed = true;
        }
    }
    if (!reports.empty()) std::cout << der_line("ALL", aggregate_der(reports)) << "\n";
    return any_failed ? kExitRecordingFailed : kExitOk;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOpts {
    std::vector<std::string> inputs;
    std::string ref_path;
    std::vector<double> thresholds;
    std::vector<double> gammas;
    std::string out_path;  // empty -> stdout
    std::string whitening = "pooled";
    double collar = 0.25;
    bool score_overlap = false;
    int jobs = 1;
    Hyperparams hp;
};

int run_sweep(const SweepOpts& opts) {
    std::vector<double> thresholds = opts.thresholds;
    std::vector<double> gammas = opts.gammas.empty() ? std::vector<double>{opts.hp.gamma}
                                                     : opts.gammas;
    std::sort(thresholds.begin(), thresholds.end());
    std::sort(gammas.begin(), gammas.end());

    try {
        opts.hp.validate();
        if (thresholds.empty()) throw ConfigError("at least one threshold is required");
    } catch (const std::exception& e) {
        std::cerr << "ssahc sweep: " << e.what() << "\n";
        return kExitUsage;
    }

    std::vector<Recording> recordings;
    std::vector<std::vector<SpeakerTurn>> references;
    WhiteningTransform whitening;
    try {
        std::vector<std::optional<Recording>> loaded;
        for (const std::string& path : opts.inputs) loaded.emplace_back(io::read_embeddings(path));
        const auto ref_groups = group_by_recording(io::read_rttm(opts.ref_path));
        for (const auto& rec : loaded) {
            const auto it = std::find_if(ref_groups.begin(), ref_groups.end(),
                                         [&](const auto& g) { return g.first == rec->id; });
            if (it == ref_groups.end())
                throw ConfigError("recording '" + rec->id + "' has no reference turns");
            recordings.push_back(*rec);
            references.push_back(it->second);
        }
        whitening = load_whitening(opts.whitening, loaded);
    } catch (const std::exception& e) {
        std::cerr << "ssahc sweep: " << e.what() << "\n";
        return kExitUsage;
    }

    struct GridPoint {
        double threshold = 0.0;
        double gamma = 0.0;
    };
    std::vector<GridPoint> grid;
    for (const double th : thresholds)
        for (const double gm : gammas) grid.push_back({th, gm});

    const std::size_t num_tasks = grid.size() * recordings.size();
    std::vector<std::optional<DerReport>> cell_reports(num_tasks);
    std::vector<std::string> cell_errors(num_tasks);
    run_parallel(num_tasks, opts.jobs, [&](std::size_t task) {
        const std::size_t g = task / recordings.size();
        const std::size_t r = task % recordings.size();
        Hyperparams hp = opts.hp;
        hp.init_threshold = grid[g].threshold;
        hp.gamma = grid[g].gamma;
        try {
            const DiarizationResult result = run_ssa(recordings[r], whitening, hp);
            cell_reports[task] =
                compute_der(references[r], result.turns, opts.collar, !opts.score_overlap);
        } catch (const std::exception& e) {
            cell_errors[task] = recordings[r].id + ": " + e.what();
        }
    });

    bool any_failed = false;
    std::string csv = "threshold,gamma,lambda,mean_der\n";
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<DerReport> reports;
        bool point_ok = true;
        for (std::size_t r = 0; r < recordings.size(); ++r) {
            const std::size_t task = g * recordings.size() + r;
            if (cell_reports[task]) {
                reports.push_back(*cell_reports[task]);
            } else {
                std::cerr << "threshold=" << format_shortest(grid[g].threshold)
                          << " gamma=" << format_shortest(grid[g].gamma) << " "
                          << cell_errors[task] << "\n";
                point_ok = false;
            }
        }
        if (!point_ok) {
            any_failed = true;
            continue;
        }
        const DerReport aggregate = aggregate_der(reports);
        csv += format_shortest(grid[g].threshold) + "," + format_shortest(grid[g].gamma) + "," +
               format_shortest(opts.hp.lambda) + "," + format_fixed(aggregate.der_percent, 6) +
               "\n";
    }

    try {
        if (opts.out_path.empty()) {
            std::cout << csv;
        } else {
            atomic_write_text(opts.out_path, csv);
        }
    } catch (const std::exception& e) {
        std::cerr << "ssahc sweep: " << e.what() << "\n";
        return kExitRecordingFailed;
    }
    return any_failed ? kExitRecordingFailed : kExitOk;
}

// ---------------------------------------------------------------------------
// fuse / heatmap / synth
// ---------------------------------------------------------------------------

struct FuseOpts {
    std::string input_a;
    std::string input_b;
    std::string out_path;
};

int run_fuse(const FuseOpts& opts) {
    try {
        const AffinityMatrix a(io::read_affinity_file(opts.input_a));
        const AffinityMatrix b(io::read_affinity_file(opts.input_b));
        const AffinityMatrix fused = fuse_affinities(a, b);
        io::write_affinity_file(fused.values(), opts.out_path);
    } catch (const std::exception& e) {
        std::cerr << "ssahc fuse: " << e.what() << "\n";
        return kExitRecordingFailed;
    }
    return kExitOk;
}

struct HeatmapOpts {
    std::string input;
    std::string out_path;
};

// An affinity file starts with a lone count; XVEC headers have three fields.
bool looks_like_affinity_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    std::istringstream fields(line);
    std::string token;
    int count = 0;
    while (fields >> token) ++count;
    if (count == 1) return true;
    if (count == 3) return false;
    throw ParseError(path.string() + ":1: expected an affinity header (N) or an XVEC header "
                                     "(<id> <segments> <dim>)");
}

int run_heatmap(const HeatmapOpts& opts) {
    try {
        Matrix affinity;
        if (looks_like_affinity_file(opts.input)) {
            affinity = io::read_affinity_file(opts.input);
        } else {
            const Recording rec = io::read_embeddings(opts.input);
            affinity = pairwise_affinity(rec.embeddings).values();
        }
        const int n = static_cast<int>(affinity.rows());
        std::string pgm = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const long level = std::lround(255.0 * (affinity(i, j) + 1.0) / 2.0);
                pgm += static_cast<char>(
                    static_cast<unsigned char>(std::clamp(level, 0L, 255L)));
            }
        atomic_write_text(opts.out_path, pgm);
    } catch (const std::exception& e) {
        std::cerr << "ssahc heatmap: " << e.what() << "\n";
        return kExitRecordingFailed;
    }
    return kExitOk;
}

struct SynthOpts {
    SynthSpec spec;
    int count = 1;
    std::string out_dir = ".";
};

int run_synth(const SynthOpts& opts) {
    if (opts.count < 1) {
        std::cerr << "ssahc synth: --count must be >= 1\n";
        return kExitUsage;
    }
    try {
        opts.spec.validate();
    } catch (const std::exception& e) {
        std::cerr << "ssahc synth: " << e.what() << "\n";
        return kExitUsage;
    }
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    try {
        for (int i = 0; i < opts.count; ++i) {
            SynthSpec spec = opts.spec;
            if (opts.count > 1) {
                char suffix[16];
                std::snprintf(suffix, sizeof(suffix), "_%03d", i);
                spec.recording_id += suffix;
            }
            spec.seed = derive_seed(opts.spec.seed, spec.recording_id);
            const auto [recording, reference] = generate_recording(spec);
            const fs::path base = fs::path(opts.out_dir) / spec.recording_id;
            io::write_embeddings(recording, base.string() + ".xvec");
            io::write_rttm(reference, base.string() + ".rttm");
            std::cout << spec.recording_id << ": segments=" << recording.num_segments()
                      << " turns=" << reference.size() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "ssahc synth: " << e.what() << "\n";
        return kExitRecordingFailed;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-supervised AHC speaker diarization toolbox"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Optional key=value config file (flags take precedence)");

    DiarizeOpts diarize;
    CLI::App* diarize_cmd =
        app.add_subcommand("diarize", "Cluster recordings and write RTTM + report per recording");
    diarize_cmd->add_option("inputs", diarize.inputs, "XVEC input files")
        ->required()
        ->check(CLI::ExistingFile);
    diarize_cmd->add_option("--out-dir", diarize.out_dir, "Output directory")
        ->capture_default_str();
    diarize_cmd->add_option("--whitening", diarize.whitening,
                            "Whitening source: XVEC path of background data, or 'pooled'")
        ->capture_default_str();
    diarize_cmd->add_option("--jobs", diarize.jobs, "Worker threads")->capture_default_str();
    diarize_cmd->add_flag("--trace-merges", diarize.trace_merges,
                          "Also write <id>.merges.tsv with every merge decision");
    diarize_cmd->add_flag("--emit-history", diarize.emit_history,
                          "Also write <id>.history.tsv with per-epoch losses");
    add_hyperparam_flags(diarize_cmd, diarize.hp, true);

    ScoreOpts score;
    CLI::App* score_cmd = app.add_subcommand("score", "Score hypothesis RTTM against a reference");
    score_cmd->add_option("--ref", score.ref_path, "Reference RTTM")
        ->required()
        ->check(CLI::ExistingFile);
    score_cmd->add_option("--hyp", score.hyp_path, "Hypothesis RTTM")
        ->required()
        ->check(CLI::ExistingFile);
    score_cmd->add_option("--collar", score.collar, "No-score collar around reference boundaries")
        ->capture_default_str();
    score_cmd->add_flag("--score-overlap", score.score_overlap,
                        "Score regions where reference speakers overlap");

    SweepOpts sweep;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Grid-run diarization over thresholds and gammas, emit CSV");
    sweep_cmd->add_option("inputs", sweep.inputs, "XVEC input files")
        ->required()
        ->check(CLI::ExistingFile);
    sweep_cmd->add_option("--ref", sweep.ref_path, "Reference RTTM")
        ->required()
        ->check(CLI::ExistingFile);
    sweep_cmd->add_option("--thresholds", sweep.thresholds, "Initial-clustering thresholds")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--gammas", sweep.gammas, "Triplet-loss gamma values (default: --gamma)")
        ->delimiter(',');
    sweep_cmd->add_option("--out", sweep.out_path, "CSV output path (default: stdout)");
    sweep_cmd->add_option("--whitening", sweep.whitening,
                          "Whitening source: XVEC path of background data, or 'pooled'")
        ->capture_default_str();
    sweep_cmd->add_option("--collar", sweep.collar, "Scoring collar")->capture_default_str();
    sweep_cmd->add_flag("--score-overlap", sweep.score_overlap,
                        "Score regions where reference speakers overlap");
    sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")->capture_default_str();
    add_hyperparam_flags(sweep_cmd, sweep.hp, false);

    FuseOpts fuse;
    CLI::App* fuse_cmd =
        app.add_subcommand("fuse", "Average two affinity matrix files elementwise");
    fuse_cmd->add_option("a", fuse.input_a, "First affinity file")
        ->required()
        ->check(CLI::ExistingFile);
    fuse_cmd->add_option("b", fuse.input_b, "Second affinity file")
        ->required()
        ->check(CLI::ExistingFile);
    fuse_cmd->add_option("--out", fuse.out_path, "Output affinity file")->required();

    HeatmapOpts heatmap;
    CLI::App* heatmap_cmd =
        app.add_subcommand("heatmap", "Render an affinity matrix (or XVEC cosines) as binary PGM");
    heatmap_cmd->add_option("input", heatmap.input, "Affinity file or XVEC file")
        ->required()
        ->check(CLI::ExistingFile);
    heatmap_cmd->add_option("--out", heatmap.out_path, "Output PGM path")->required();

    SynthOpts synth;
    CLI::App* synth_cmd =
        app.add_subcommand("synth", "Generate synthetic XVEC + reference RTTM pairs");
    synth_cmd->add_option("--num-speakers", synth.spec.num_speakers, "Speakers per recording")
        ->capture_default_str();
    synth_cmd->add_option("--duration", synth.spec.duration_sec, "Recording length in seconds")
        ->capture_default_str();
    synth_cmd->add_option("--window", synth.spec.window_sec, "Segment window in seconds")
        ->capture_default_str();
    synth_cmd->add_option("--shift", synth.spec.shift_sec, "Segment shift in seconds")
        ->capture_default_str();
    synth_cmd->add_option("--mean-turn", synth.spec.mean_turn_sec, "Mean turn length in seconds")
        ->capture_default_str();
    synth_cmd->add_option("--separation", synth.spec.separation,
                          "Speaker centroid separation scale")
        ->capture_default_str();
    synth_cmd->add_option("--noise", synth.spec.within_noise, "Within-speaker noise scale")
        ->capture_default_str();
    synth_cmd->add_option("--dim", synth.spec.dim, "Embedding dimension")->capture_default_str();
    synth_cmd->add_option("--seed", synth.spec.seed, "Base RNG seed")->capture_default_str();
    synth_cmd->add_option("--id", synth.spec.recording_id, "Recording id (or prefix with --count)")
        ->capture_default_str();
    synth_cmd->add_option("--count", synth.count, "Number of recordings")->capture_default_str();
    synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version requests exit 0; anything else is a usage error.
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*diarize_cmd) return run_diarize(diarize);
        if (*score_cmd) return run_score(score);
        if (*sweep_cmd) return run_sweep(sweep);
        if (*fuse_cmd) return run_fuse(fuse);
        if (*heatmap_cmd) return run_heatmap(heatmap);
        if (*synth_cmd) return run_synth(synth);
    } catch (const std::exception& e) {
        std::cerr << "ssahc: " << e.what() << "\n";
        return kExitRecordingFailed;
    }
    return kExitUsage;
}
