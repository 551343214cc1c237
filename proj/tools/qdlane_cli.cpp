// qdlane: shadow-robust lane detection and quantum-inspired direction
// decisions from the command line.
//
// Exit codes: 0 success, 2 bad input, 3 not enough geometric evidence.

#include "qdlane/config.hpp"
#include "qdlane/csv.hpp"
#include "qdlane/error.hpp"
#include "qdlane/experiments.hpp"
#include "qdlane/image_io.hpp"
#include "qdlane/ingest.hpp"
#include "qdlane/manifest.hpp"
#include "qdlane/pipeline.hpp"
#include "qdlane/serialize.hpp"
#include "qdlane/synthetic.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace qdlane;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInsufficient = 3;

std::mutex log_mutex;

void warn(const std::string& msg) {
    std::lock_guard lock(log_mutex);
    std::cerr << "warning: " << msg << '\n';
}

struct Common {
    std::string config = "default";
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "config file, manifest.json from a previous run, or 'default'");
    cmd->add_option("--seed", c.seed, "overrides the config seed");
    cmd->add_option("--out-dir", c.out_dir, "directory for outputs and the run manifest");
}

config::PipelineConfig resolve_config(const Common& c) {
    auto cfg = io::load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    cfg.validate();
    return cfg;
}

std::string prepare_out(const Common& c) {
    fs::create_directories(c.out_dir);
    return c.out_dir;
}

std::string out_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

// Writes through a temporary name so readers never see a partial file.
template <typename Fn>
void write_atomic(const std::string& path, Fn&& fill) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        fill(out);
        if (!out) throw std::runtime_error("write failed for '" + path + "'");
    }
    fs::rename(tmp, path);
}

template <typename WriteFn>
void write_image_atomic(const std::string& path, WriteFn&& write) {
    const auto ext = fs::path(path).extension().string();
    const std::string tmp = (fs::path(path).parent_path() / (fs::path(path).stem().string() + ".tmp" + ext)).string();
    write(tmp);
    fs::rename(tmp, path);
}

synth::Rect parse_patch(const std::string& s) {
    const auto parts = rec::split(s, ',');
    if (parts.size() != 4) throw std::invalid_argument("--patch expects x,y,w,h");
    return {rec::to_int<int>(parts[0], "patch x"), rec::to_int<int>(parts[1], "patch y"),
            rec::to_int<int>(parts[2], "patch w"), rec::to_int<int>(parts[3], "patch h")};
}

uu::TrainingResult train_on_patches(const img::GrayImage& gray, const std::vector<std::string>& patches,
                                    uu::Region label) {
    std::vector<double> values;
    for (const auto& p : patches) {
        const auto v = synth::patch_values(gray, parse_patch(p));
        values.insert(values.end(), v.begin(), v.end());
    }
    uu::TrainOptions opt;
    opt.label = label;
    return uu::train_centroid(values, opt);
}

struct CentroidSource {
    std::string file;
    std::vector<std::string> patches;
};

void add_centroid_options(CLI::App* cmd, CentroidSource& s) {
    cmd->add_option("--centroid", s.file, "centroid file (defaults to the config's centroid_file)");
    cmd->add_option("--patch", s.patches, "train the centroid on the fly from x,y,w,h shadow patches of the image");
}

uu::Centroid resolve_centroid(const CentroidSource& s, const config::PipelineConfig& cfg, const img::GrayImage* gray,
                              io::RunManifest& manifest) {
    if (!s.patches.empty()) {
        if (!gray) throw std::invalid_argument("--patch needs a single input image");
        return train_on_patches(*gray, s.patches, uu::Region::Shadow).centroid;
    }
    const std::string path = !s.file.empty() ? s.file : cfg.centroid_file;
    if (path.empty()) throw std::invalid_argument("no centroid: pass --centroid, --patch or set centroid_file");
    manifest.add_input(path);
    return io::load_centroid(path);
}

std::optional<decision::VqcModel> resolve_model(const std::string& flag, const config::PipelineConfig& cfg,
                                                io::RunManifest& manifest) {
    const std::string path = !flag.empty() ? flag : cfg.vqc_model;
    if (path.empty()) {
        if (cfg.head == exp::Head::Vqc) throw std::invalid_argument("the vqc head needs --model or vqc_model");
        return std::nullopt;
    }
    manifest.add_input(path);
    return io::load_model(path);
}

void dump_stages(const std::string& dir, const std::string& stem, const pipeline::Result& r) {
    fs::create_directories(dir);
    auto gray = [&](const std::string& name, const img::GrayImage& g) {
        const auto path = out_path(dir, stem + "_" + name + ".png");
        write_image_atomic(path, [&](const std::string& p) { io::write_gray(p, g); });
    };
    gray("shadow_mask", r.shadow.mask.image());
    gray("median", r.stages.smoothed);
    gray("replaced", r.stages.replaced);
    gray("blurred", r.stages.blurred);
    gray("edges", r.stages.edges.image());
    gray("roi_edges", r.stages.roi_edges.image());
}

// --- subcommands ------------------------------------------------------------

struct TrainCentroidArgs {
    Common common;
    std::string image;
    std::vector<std::string> patches;
    std::string label = "shadow";
};

int cmd_train_centroid(const TrainCentroidArgs& a) {
    const auto cfg = resolve_config(a.common);
    const auto dir = prepare_out(a.common);
    io::RunManifest manifest("train-centroid", cfg);
    manifest.add_input(a.image);
    const auto gray = io::read_gray(a.image);
    const auto result = train_on_patches(gray, a.patches, uu::parse_region(a.label));

    const auto centroid_path = out_path(dir, "centroid.txt");
    const auto trace_path = out_path(dir, "centroid_trace.csv");
    write_atomic(centroid_path, [&](std::ostream& os) { io::write_centroid(os, result.centroid); });
    write_atomic(trace_path, [&](std::ostream& os) { csv::write_centroid_trace(os, result.trace); });
    manifest.add_output(centroid_path);
    manifest.add_output(trace_path);
    manifest.write(dir);
    std::cout << "theta " << rec::format_double(result.centroid.theta) << " after " << result.centroid.iterations
              << " epochs\n";
    return 0;
}

struct DetectShadowArgs {
    Common common;
    std::string image;
    CentroidSource centroid;
};

int cmd_detect_shadow(const DetectShadowArgs& a) {
    const auto cfg = resolve_config(a.common);
    const auto dir = prepare_out(a.common);
    io::RunManifest manifest("detect-shadow", cfg);
    manifest.add_input(a.image);
    const auto rgb = io::read_rgb(a.image);
    const auto gray = img::to_gray(rgb);
    const auto centroid = resolve_centroid(a.centroid, cfg, &gray, manifest);
    const auto sm = cfg.shadow_input == config::ShadowInput::Chromaticity
                        ? shadow::detect_chromaticity(rgb, centroid, cfg.detect_params(), cfg.chroma_plane)
                        : shadow::detect(gray, centroid, cfg.detect_params());

    const auto mask_path = out_path(dir, "shadow_mask.png");
    const auto prov_path = out_path(dir, "shadow_mask.txt");
    write_image_atomic(mask_path, [&](const std::string& p) { io::write_gray(p, sm.mask.image()); });
    write_atomic(prov_path, [&](std::ostream& os) { io::write_provenance(os, sm.provenance); });
    manifest.add_output(mask_path);
    manifest.add_output(prov_path);
    manifest.write(dir);
    std::cout << sm.mask.count() << " shadow pixels\n";
    return 0;
}

struct DetectLanesArgs {
    Common common;
    std::string image;
    CentroidSource centroid;
    std::string model;
    bool dump = false;
};

int cmd_detect_lanes(const DetectLanesArgs& a) {
    const auto cfg = resolve_config(a.common);
    const auto dir = prepare_out(a.common);
    io::RunManifest manifest("detect-lanes", cfg);
    manifest.add_input(a.image);
    const auto rgb = io::read_rgb(a.image);
    const auto gray = img::to_gray(rgb);
    const pipeline::Models models{resolve_centroid(a.centroid, cfg, &gray, manifest), resolve_model(a.model, cfg, manifest)};
    const auto r = pipeline::run(rgb, cfg, models);

    const auto seg_path = out_path(dir, "segments.csv");
    const auto lanes_path = out_path(dir, "lanes.txt");
    write_atomic(seg_path, [&](std::ostream& os) { csv::write_segments(os, r.segments, r.segment_labels, cfg.cluster_method); });
    write_atomic(lanes_path, [&](std::ostream& os) {
        rec::write(os, {{"method", std::string(lanes::to_string(cfg.cluster_method))},
                        {"slope_first", rec::format_double(r.slopes.first)},
                        {"slope_second", rec::format_double(r.slopes.second)},
                        {"head", std::string(exp::to_string(cfg.head))},
                        {"direction", std::string(decision::to_string(r.direction))}});
    });
    manifest.add_output(seg_path);
    manifest.add_output(lanes_path);
    if (a.dump) dump_stages(out_path(dir, "stages"), fs::path(a.image).stem().string(), r);
    manifest.write(dir);
    std::cout << decision::to_string(r.direction) << '\n';
    return 0;
}

struct FrameInput {
    std::string label_path;   // as written in the log or on the command line
    std::string file;         // resolved location
    std::optional<decision::Direction> truth;
};

std::vector<FrameInput> gather_frames(const std::string& log, std::string images_dir,
                                      const std::vector<std::string>& images, const config::PipelineConfig& cfg,
                                      io::RunManifest& manifest) {
    std::vector<FrameInput> out;
    if (!log.empty()) {
        if (images_dir.empty()) images_dir = fs::path(log).parent_path().string();
        manifest.add_input(log);
        std::ifstream in(log);
        if (!in) throw std::invalid_argument("cannot open driving log '" + log + "'");
        auto parsed = io::parse_driving_log(in, log);
        for (const auto& w : parsed.warnings) warn(w);
        for (const auto& r : parsed.records) {
            const auto file = io::resolve_image(r.center, images_dir);
            if (file.empty()) {
                warn("missing image '" + r.center + "', skipped");
                continue;
            }
            out.push_back({r.center, file, io::steering_to_direction(r.steering, cfg.steering_threshold)});
        }
    }
    for (const auto& p : images) out.push_back({p, p, std::nullopt});
    if (out.empty()) throw std::invalid_argument("no input frames");
    for (const auto& f : out) manifest.add_input(f.file);
    return out;
}

struct FrameOutcome {
    std::optional<pipeline::Result> result;
    bool insufficient = false;
    std::string error;
};

// Runs the pipeline over all frames on `jobs` workers; results keep input order.
std::vector<FrameOutcome> run_frames(const std::vector<FrameInput>& frames, const config::PipelineConfig& cfg,
                                     const pipeline::Models& models, int jobs, const std::string& dump_dir) {
    std::vector<FrameOutcome> out(frames.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < frames.size(); i = next++) {
            try {
                auto r = pipeline::run(io::read_rgb(frames[i].file), cfg, models);
                if (!dump_dir.empty()) dump_stages(dump_dir, fs::path(frames[i].file).stem().string(), r);
                out[i].result = std::move(r);
            } catch (const stage_error& e) {
                out[i].insufficient = e.insufficient();
                out[i].error = e.what();
            } catch (const std::exception& e) {
                out[i].error = e.what();
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(frames.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

struct PredictArgs {
    Common common;
    std::string log, images_dir;
    std::vector<std::string> images;
    CentroidSource centroid;
    std::string model;
    int jobs = 1;
    bool dump = false;
};

int cmd_predict(const PredictArgs& a) {
    const auto cfg = resolve_config(a.common);
    const auto dir = prepare_out(a.common);
    io::RunManifest manifest("predict", cfg);
    const auto frames = gather_frames(a.log, a.images_dir, a.images, cfg, manifest);
    const pipeline::Models models{resolve_centroid(a.centroid, cfg, nullptr, manifest), resolve_model(a.model, cfg, manifest)};
    const auto outcomes = run_frames(frames, cfg, models, a.jobs, a.dump ? out_path(dir, "stages") : "");

    std::vector<csv::Prediction> rows;
    int failed_input = 0, failed_data = 0, labelled = 0, correct = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& o = outcomes[i];
        if (!o.result) {
            warn(frames[i].label_path + ": " + o.error);
            (o.insufficient ? failed_data : failed_input)++;
            continue;
        }
        rows.push_back({frames[i].label_path, o.result->direction});
        if (frames[i].truth) {
            ++labelled;
            correct += o.result->direction == *frames[i].truth;
        }
    }
    const auto pred_path = out_path(dir, "predictions.csv");
    write_atomic(pred_path, [&](std::ostream& os) { csv::write_predictions(os, rows); });
    manifest.add_output(pred_path);
    if (labelled > 0) {
        const auto summary_path = out_path(dir, "summary.txt");
        const auto ci = exp::wilson(static_cast<std::size_t>(correct), static_cast<std::size_t>(labelled));
        write_atomic(summary_path, [&](std::ostream& os) {
            rec::write(os, {{"frames", std::to_string(frames.size())},
                            {"labelled", std::to_string(labelled)},
                            {"correct", std::to_string(correct)},
                            {"accuracy", rec::format_double(static_cast<double>(correct) / labelled)},
                            {"ci_low", rec::format_double(ci.low)},
                            {"ci_high", rec::format_double(ci.high)},
                            {"failed_input", std::to_string(failed_input)},
                            {"failed_insufficient", std::to_string(failed_data)}});
        });
        manifest.add_output(summary_path);
        std::cout << correct << "/" << labelled << " correct\n";
    }
    manifest.write(dir);
    if (failed_input > 0) return kExitInput;
    if (failed_data > 0) return kExitInsufficient;
    return 0;
}

struct SweepArgs {
    Common common;
    std::string log, images_dir, slopes;
    CentroidSource centroid;
    std::string model;
    std::string channels = "all";
    std::vector<double> p_grid;
    std::string methods = "uu,vqc";
    int jobs = 1;
};

std::vector<qc::ChannelKind> parse_channels(const std::string& s) {
    if (s == "all") return {std::begin(qc::kAllChannels), std::end(qc::kAllChannels)};
    std::vector<qc::ChannelKind> out;
    for (auto part : rec::split(s, ',')) out.push_back(qc::parse_channel(part));
    return out;
}

// path,first,second,direction rows as written by sweep-noise.
decision::TrainingSet read_slopes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    decision::TrainingSet ds;
    std::string line;
    std::getline(in, line);   // header
    while (std::getline(in, line)) {
        if (rec::trim(line).empty()) continue;
        const auto f = csv::split_record(line);
        if (f.size() != 4) throw rec::parse_error(path + ": expected path,first,second,direction");
        ds.features.push_back({rec::to_double(f[1], "first"), rec::to_double(f[2], "second")});
        ds.labels.push_back(decision::parse_direction(rec::trim(f[3])));
    }
    return ds;
}

int cmd_sweep(const SweepArgs& a) {
    const auto cfg = resolve_config(a.common);
    const auto dir = prepare_out(a.common);
    io::RunManifest manifest("sweep-noise", cfg);

    exp::SweepDataset ds;
    ds.reference_theta = cfg.reference_theta;
    if (!a.slopes.empty()) {
        manifest.add_input(a.slopes);
        ds.data = read_slopes(a.slopes);
    } else {
        if (a.log.empty()) throw std::invalid_argument("sweep-noise needs --log or --slopes");
        const auto frames = gather_frames(a.log, a.images_dir, {}, cfg, manifest);
        auto clean = cfg;
        clean.noise_channel.reset();
        clean.head = exp::Head::Uu;   // only the slopes are needed here
        const pipeline::Models models{resolve_centroid(a.centroid, cfg, nullptr, manifest), std::nullopt};
        const auto outcomes = run_frames(frames, clean, models, a.jobs, "");
        std::vector<std::string> paths;
        for (std::size_t i = 0; i < frames.size(); ++i) {
            if (!outcomes[i].result) {
                warn(frames[i].label_path + ": " + outcomes[i].error + " (left out of the sweep)");
                continue;
            }
            ds.data.features.push_back(outcomes[i].result->slopes);
            ds.data.labels.push_back(*frames[i].truth);
            paths.push_back(frames[i].label_path);
        }
        if (ds.data.size() == 0) throw insufficient_data("frames", "no frame produced lane slopes");
        const auto slopes_path = out_path(dir, "slopes.csv");
        write_atomic(slopes_path, [&](std::ostream& os) {
            os << "path,first,second,direction\n";
            for (std::size_t i = 0; i < paths.size(); ++i) {
                os << csv::field(paths[i]) << ',' << csv::number(ds.data.features[i].first) << ','
                   << csv::number(ds.data.features[i].second) << ',' << decision::to_string(ds.data.labels[i]) << '\n';
            }
        });
        manifest.add_output(slopes_path);
    }

    exp::SweepOptions opt;
    opt.methods.clear();
    for (auto m : rec::split(a.methods, ',')) opt.methods.push_back(exp::parse_head(m));
    opt.channels = parse_channels(a.channels);
    opt.p_grid = a.p_grid.empty() ? exp::default_p_grid() : a.p_grid;
    opt.seed = cfg.seed;
    opt.shots = cfg.shots;
    opt.phase_damping = cfg.phase_damping;

    const bool need_model = std::find(opt.methods.begin(), opt.methods.end(), exp::Head::Vqc) != opt.methods.end();
    if (need_model) {
        if (auto m = resolve_model(a.model, cfg, manifest)) {
            ds.model = *m;
        } else {
            decision::VqcTrainOptions t;
            t.max_iter = cfg.vqc_maxiter;
            t.seed = cfg.seed;
            const auto trained = decision::vqc_train(ds.data, t);
            ds.model = trained.model;
            const auto model_path = out_path(dir, "model.txt");
            const auto trace_path = out_path(dir, "vqc_trace.csv");
            write_atomic(model_path, [&](std::ostream& os) { io::write_model(os, ds.model); });
            write_atomic(trace_path, [&](std::ostream& os) { csv::write_trace(os, trained.trace.evaluations); });
            manifest.add_output(model_path);
            manifest.add_output(trace_path);
        }
    }

    const auto rows = exp::sweep(ds, opt);
    const auto sweep_path = out_path(dir, "sweep.csv");
    write_atomic(sweep_path, [&](std::ostream& os) { csv::write_sweep(os, rows); });
    manifest.add_output(sweep_path);
    manifest.write(dir);
    std::cout << rows.size() << " rows\n";
    return 0;
}

struct BenchArgs {
    Common common;
    std::string image;
    CentroidSource centroid;
    int reps = 5;
};

int cmd_bench(const BenchArgs& a) {
    const auto cfg = resolve_config(a.common);
    const auto dir = prepare_out(a.common);
    io::RunManifest manifest("bench", cfg);
    std::vector<exp::BenchRow> rows;

    // Shadow detection on the square patch scene with its own centroid.
    const auto scene = synth::road_with_patch();
    const auto scene_centroid = uu::train_centroid(synth::patch_values(scene.image, scene.patch)).centroid;
    auto scene_params = cfg.detect_params();
    rows.push_back(exp::bench("shadow-detect", scene.image.width, scene.image.height, a.reps,
                              [&] { (void)shadow::detect(scene.image, scene_centroid, scene_params); }));

    img::RgbImage frame;
    uu::Centroid centroid;
    if (!a.image.empty()) {
        manifest.add_input(a.image);
        frame = io::read_rgb(a.image);
        const auto gray = img::to_gray(frame);
        centroid = resolve_centroid(a.centroid, cfg, &gray, manifest);
    } else {
        const auto f = synth::make_frame(cfg.seed, 0);
        frame = f.image;
        centroid = uu::train_centroid(synth::shadow_samples({f})).centroid;
    }
    const int w = frame.width, h = frame.height;
    const auto gray = img::to_gray(frame);
    const auto roi = cfg.roi_for(w, h);
    const auto mask = shadow::detect(gray, centroid, cfg.detect_params()).mask;
    const auto smoothed = img::median_filter(gray, cfg.median_iterations);
    const auto replaced = shadow::replace_shadow(smoothed, mask, roi).image;
    const auto blurred = img::gaussian_blur(replaced, cfg.gaussian_ksize, cfg.gaussian_ksize, cfg.gaussian_sigma);
    const auto edges = img::roi_mask(img::canny(blurred, cfg.canny_low, cfg.canny_high), roi);
    const auto segments = img::hough_segments(edges, cfg.hough, cfg.seed);

    rows.push_back(exp::bench("shadow-detect-frame", w, h, a.reps,
                              [&] { (void)shadow::detect(gray, centroid, cfg.detect_params()); }));
    rows.push_back(exp::bench("median", w, h, a.reps, [&] { (void)img::median_filter(gray, cfg.median_iterations); }));
    rows.push_back(exp::bench("replace", w, h, a.reps, [&] { (void)shadow::replace_shadow(smoothed, mask, roi); }));
    rows.push_back(exp::bench("gaussian", w, h, a.reps, [&] {
        (void)img::gaussian_blur(replaced, cfg.gaussian_ksize, cfg.gaussian_ksize, cfg.gaussian_sigma);
    }));
    rows.push_back(exp::bench("canny", w, h, a.reps, [&] { (void)img::canny(blurred, cfg.canny_low, cfg.canny_high); }));
    rows.push_back(exp::bench("hough", w, h, a.reps, [&] { (void)img::hough_segments(edges, cfg.hough, cfg.seed); }));
    if (segments.size() >= 2) {
        rows.push_back(exp::bench("cluster", w, h, a.reps, [&] { (void)lanes::kmeans_slopes(segments); }));
    }
    rows.push_back(exp::bench("decide-uu", w, h, a.reps, [&] {
        (void)decision::decide_uu(lanes::SlopePair{-1.0, 1.0}, cfg.reference_theta, cfg.shots, cfg.seed);
    }));
    rows.push_back(exp::bench("pipeline", w, h, a.reps, [&] {
        try {
            (void)pipeline::run(frame, cfg, {centroid, std::nullopt});
        } catch (const stage_error&) {
        }
    }));

    const auto path = out_path(dir, "bench.csv");
    write_atomic(path, [&](std::ostream& os) { csv::write_bench(os, rows); });
    manifest.add_output(path);
    manifest.write(dir);
    for (const auto& r : rows) std::cout << r.stage << ' ' << rec::format_double(r.wall_time_s) << " s\n";
    return 0;
}

struct GenArgs {
    Common common;
    int frames = 30;
};

double steering_for(decision::Direction d) {
    switch (d) {
        case decision::Direction::Left: return -0.25;
        case decision::Direction::Right: return 0.25;
        case decision::Direction::Straight: return 0.0;
    }
    return 0.0;
}

int cmd_gen(const GenArgs& a) {
    const auto cfg = resolve_config(a.common);
    if (a.frames < 1) throw std::invalid_argument("--frames must be >= 1");
    const auto dir = prepare_out(a.common);
    const auto images = out_path(dir, "images");
    fs::create_directories(images);
    io::RunManifest manifest("gen-synthetic", cfg);

    const auto corpus = synth::make_corpus(cfg.seed, a.frames);
    std::vector<csv::Prediction> labels;
    for (const auto& f : corpus) {
        const auto path = (fs::path(images) / f.name).string();
        io::write_rgb(path, f.image);
        manifest.add_output(path);
        labels.push_back({"images/" + f.name, f.label});
    }
    const auto labels_path = out_path(dir, "labels.csv");
    write_atomic(labels_path, [&](std::ostream& os) { csv::write_predictions(os, labels); });
    const auto log_path = out_path(dir, "driving_log.csv");
    write_atomic(log_path, [&](std::ostream& os) {
        os << "center,left,right,steering,throttle,brake,speed\n";
        for (const auto& l : labels) {
            os << l.path << ',' << l.path << ',' << l.path << ',' << csv::number(steering_for(l.direction))
               << ",0.5,0,20\n";
        }
    });

    const auto trained = uu::train_centroid(synth::shadow_samples(corpus));
    const auto centroid_path = out_path(dir, "centroid.txt");
    write_atomic(centroid_path, [&](std::ostream& os) { io::write_centroid(os, trained.centroid); });

    const auto scene = synth::road_with_patch();
    const auto scene_path = out_path(dir, "patch_scene.png");
    const auto truth_path = out_path(dir, "patch_truth.png");
    io::write_gray(scene_path, scene.image);
    io::write_gray(truth_path, scene.truth.image());

    for (const auto& p : {labels_path, log_path, centroid_path, scene_path, truth_path}) manifest.add_output(p);
    manifest.note("patch", std::to_string(scene.patch.x) + "," + std::to_string(scene.patch.y) + "," +
                               std::to_string(scene.patch.w) + "," + std::to_string(scene.patch.h));
    manifest.write(dir);
    std::cout << corpus.size() << " frames written to " << images << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shadow-robust lane detection with quantum-inspired direction decisions"};
    app.require_subcommand(1);

    TrainCentroidArgs tc;
    auto* c_tc = app.add_subcommand("train-centroid", "train a shadow centroid from image patches");
    add_common(c_tc, tc.common);
    c_tc->add_option("--image", tc.image, "input image")->required();
    c_tc->add_option("--patch", tc.patches, "x,y,w,h patch (repeatable)")->required();
    c_tc->add_option("--label", tc.label, "region the patches belong to")->check(CLI::IsMember({"shadow", "shadowless"}));

    DetectShadowArgs ds;
    auto* c_ds = app.add_subcommand("detect-shadow", "write the binary shadow mask of one image");
    add_common(c_ds, ds.common);
    c_ds->add_option("--image", ds.image, "input image")->required();
    add_centroid_options(c_ds, ds.centroid);

    DetectLanesArgs dl;
    auto* c_dl = app.add_subcommand("detect-lanes", "run the full pipeline on one image");
    add_common(c_dl, dl.common);
    c_dl->add_option("--image", dl.image, "input image")->required();
    add_centroid_options(c_dl, dl.centroid);
    c_dl->add_option("--model", dl.model, "VQC model file");
    c_dl->add_flag("--dump-stages", dl.dump, "write every intermediate image");

    PredictArgs pr;
    auto* c_pr = app.add_subcommand("predict", "predict a direction for each frame");
    add_common(c_pr, pr.common);
    c_pr->add_option("--log", pr.log, "driving log CSV");
    c_pr->add_option("--images-dir", pr.images_dir, "where logged image paths are resolved (default: log directory)");
    c_pr->add_option("images", pr.images, "image files");
    c_pr->add_option("--centroid", pr.centroid.file, "centroid file (defaults to the config's centroid_file)");
    c_pr->add_option("--model", pr.model, "VQC model file");
    c_pr->add_option("--jobs", pr.jobs, "worker threads")->check(CLI::PositiveNumber);
    c_pr->add_flag("--dump-stages", pr.dump, "write every intermediate image");

    SweepArgs sw;
    auto* c_sw = app.add_subcommand("sweep-noise", "decision accuracy under each noise channel");
    add_common(c_sw, sw.common);
    c_sw->add_option("--log", sw.log, "driving log CSV");
    c_sw->add_option("--images-dir", sw.images_dir, "where logged image paths are resolved");
    c_sw->add_option("--slopes", sw.slopes, "slopes.csv from an earlier sweep instead of images");
    c_sw->add_option("--centroid", sw.centroid.file, "centroid file");
    c_sw->add_option("--model", sw.model, "VQC model file (trained on the data when absent)");
    c_sw->add_option("--channels", sw.channels, "'all' or a comma list of channel names");
    c_sw->add_option("--p-grid", sw.p_grid, "noise probabilities")->delimiter(',');
    c_sw->add_option("--methods", sw.methods, "comma list of decision heads");
    c_sw->add_option("--jobs", sw.jobs, "worker threads")->check(CLI::PositiveNumber);

    BenchArgs be;
    auto* c_be = app.add_subcommand("bench", "time each pipeline stage");
    add_common(c_be, be.common);
    c_be->add_option("--image", be.image, "frame to time (default: a synthetic frame)");
    add_centroid_options(c_be, be.centroid);
    c_be->add_option("--reps", be.reps, "timed repetitions")->check(CLI::PositiveNumber);

    GenArgs ge;
    auto* c_ge = app.add_subcommand("gen-synthetic", "write the synthetic road corpus");
    add_common(c_ge, ge.common);
    c_ge->add_option("--frames", ge.frames, "number of frames");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*c_tc) return cmd_train_centroid(tc);
        if (*c_ds) return cmd_detect_shadow(ds);
        if (*c_dl) return cmd_detect_lanes(dl);
        if (*c_pr) return cmd_predict(pr);
        if (*c_sw) return cmd_sweep(sw);
        if (*c_be) return cmd_bench(be);
        if (*c_ge) return cmd_gen(ge);
    } catch (const stage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.insufficient() ? kExitInsufficient : kExitInput;
    } catch (const insufficient_data& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInsufficient;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
