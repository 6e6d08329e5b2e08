#pragma once

#include <scanpath/eval.hpp>
#include <scanpath/features.hpp>
#include <scanpath/gaze_data.hpp>
#include <scanpath/generator.hpp>
#include <scanpath/model_builder.hpp>
#include <scanpath/model_io.hpp>
#include <scanpath/render.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace scanpath::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

struct Globals {
  bool verbose = false;
  unsigned threads = 0;
};

inline CsvFormat csv_format(const std::string& delimiter) {
  if (delimiter.size() != 1) throw ConfigError("--delimiter must be a single character");
  CsvFormat f;
  f.delimiter = delimiter == "\\t" ? '\t' : delimiter[0];
  return f;
}

inline Dataset load_input(const std::string& path, const std::string& delimiter, bool normalize_input,
                          ClassKey key) {
  Dataset ds = load_recordings(path, csv_format(delimiter));
  ds.class_key = key;
  return normalize_input ? normalize(std::move(ds)) : ds;
}

inline void parse_grid(const std::string& grid, FeatureSpec& spec) {
  const auto x = grid.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(grid);
    spec.grid_w = std::stoi(grid.substr(0, x));
    spec.grid_h = std::stoi(grid.substr(x + 1));
  } catch (const std::exception&) {
    throw ConfigError("--grid expects WxH, got '" + grid + "'");
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace detail

/// Runs one command line. Exit codes: 0 success, 1 runtime error (message on
/// `err`), 2 usage error (usage text on `err`).
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Learn hierarchical scan path models from gaze recordings and generate new scan paths."};
  app.name("scanpath");
  app.require_subcommand(1);
  app.fallthrough();
  detail::Globals g;
  app.add_flag("-v,--verbose", g.verbose, "Progress messages on standard error");
  app.add_option("--threads", g.threads, "Worker threads (default: SCANPATH_THREADS or 1)");

  // train
  auto* train = app.add_subcommand("train", "Build a model from gaze recordings");
  std::string train_in, train_out, train_rule = "constant", train_delim = ",", train_key = "stimulus", train_class;
  BuildConfig bc;
  double merge_radius = -1.0;
  bool no_time = false, no_norm = false;
  train->add_option("--input", train_in, "Gaze CSV (x,y[,t][,rec][,stimulus][,participant])")->required();
  train->add_option("--out", train_out, "Model file to write")->required();
  train->add_option("--max-level", bc.max_level, "Hierarchy depth")->capture_default_str();
  train->add_option("--clusters", bc.num_clusters, "Clusters per level")->capture_default_str();
  train->add_flag("--dyn-cluster", bc.dyn_cluster, "Change the cluster count with depth");
  train->add_option("--rule", train_rule, "Update rule: constant|halving|linear_decay")->capture_default_str();
  train->add_option("--seed", bc.seed, "RNG seed")->capture_default_str();
  train->add_option("--merge-radius", merge_radius, "Cross-recording match radius (default: per-level estimate)");
  train->add_option("--pca-variance", bc.pca_variance, "Retained variance fraction")->capture_default_str();
  train->add_option("--time-weight", bc.time_weight, "Weight of t in clustering distance")->capture_default_str();
  train->add_option("--restarts", bc.kmeans_restarts, "k-means++ restarts per clustering")->capture_default_str();
  train->add_flag("--no-time", no_time, "Ignore timestamps even when present");
  train->add_flag("--no-normalize", no_norm, "Use coordinates as read");
  train->add_option("--delimiter", train_delim, "Field delimiter")->capture_default_str();
  train->add_option("--class-key", train_key, "Label column used by --class: stimulus|participant")->capture_default_str();
  train->add_option("--class", train_class, "Train only on recordings with this label");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate scan paths from a model");
  std::string gen_model, gen_out, gen_rule = "constant", gen_stim, gen_part, gen_prefix = "gen";
  GeneratorConfig gc;
  std::size_t gen_count = 1;
  bool no_clamp = false;
  gen->add_option("--model", gen_model, "Model file")->required();
  gen->add_option("--out", gen_out, "Output CSV")->required();
  gen->add_option("--count", gen_count, "Number of scan paths")->capture_default_str();
  gen->add_option("--max-clusters", gc.max_clusters, "Maximum clusters per branch")->capture_default_str();
  gen->add_option("--max-subclusters", gc.max_subclusters, "Maximum subclusters per cluster")->capture_default_str();
  gen->add_flag("--dyn-cluster", gc.dyn_cluster, "Change the maxima with depth");
  gen->add_option("--rule", gen_rule, "Update rule: constant|halving|linear_decay")->capture_default_str();
  gen->add_option("--seed", gc.seed, "RNG seed")->capture_default_str();
  gen->add_flag("--no-clamp", no_clamp, "Do not clamp points to the unit square");
  gen->add_flag("--support-weighted", gc.weight_by_support, "Pick nodes proportional to their support");
  gen->add_option("--stimulus", gen_stim, "Stimulus label written to every output row");
  gen->add_option("--participant", gen_part, "Participant label written to every output row");
  gen->add_option("--prefix", gen_prefix, "Recording id prefix")->capture_default_str();

  // featurize
  auto* feat = app.add_subcommand("featurize", "Compute heatmap or HOV feature vectors");
  std::string feat_in, feat_out, feat_kind = "heatmap", feat_grid = "16x16", feat_delim = ",";
  int feat_bins = 36;
  bool feat_unweighted = false;
  feat->add_option("--input", feat_in, "Gaze CSV")->required();
  feat->add_option("--out", feat_out, "Feature CSV")->required();
  feat->add_option("--kind", feat_kind, "heatmap|hov")->capture_default_str();
  feat->add_option("--grid", feat_grid, "Heatmap grid WxH")->capture_default_str();
  feat->add_option("--bins", feat_bins, "HOV bin count")->capture_default_str();
  feat->add_flag("--unweighted", feat_unweighted, "HOV counts segments instead of summing their lengths");
  feat->add_option("--delimiter", feat_delim, "Field delimiter")->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "Classification experiments");
  eval->require_subcommand(1);
  struct EvalArgs {
    std::string classes = "stimulus", feature = "heatmap", clf = "centroid", grid = "16x16", out, delim = ",";
    int bins = 36;
    int hidden = 100;
    std::uint64_t seed = 0;
    bool no_norm = false;
  } ea;
  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--classes", ea.classes, "Class key: stimulus|participant")->capture_default_str();
    sc->add_option("--feature", ea.feature, "heatmap|hov")->capture_default_str();
    sc->add_option("--clf", ea.clf, "centroid|mlp")->capture_default_str();
    sc->add_option("--grid", ea.grid, "Heatmap grid WxH")->capture_default_str();
    sc->add_option("--bins", ea.bins, "HOV bin count")->capture_default_str();
    sc->add_option("--hidden", ea.hidden, "MLP hidden units")->capture_default_str();
    sc->add_option("--seed", ea.seed, "RNG seed")->capture_default_str();
    sc->add_option("--out", ea.out, "Also write the report to this file");
    sc->add_flag("--no-normalize", ea.no_norm, "Use real coordinates as read");
    sc->add_option("--delimiter", ea.delim, "Field delimiter")->capture_default_str();
  };
  auto* cv = eval->add_subcommand("cv", "Stratified k-fold cross validation");
  std::string cv_in, cv_gen, cv_source;
  std::size_t cv_folds = 5;
  bool cv_augment = false;
  cv->add_option("--input", cv_in, "Real gaze CSV")->required();
  cv->add_option("--folds", cv_folds, "Fold count")->capture_default_str();
  cv->add_option("--gen", cv_gen, "Generated gaze CSV added to training folds");
  cv->add_option("--source", cv_source, "Training data: real|generated|both (default: both with --gen)");
  cv->add_flag("--augment", cv_augment, "Augment training folds");
  add_common(cv);
  auto* dec = eval->add_subcommand("deceive", "Deception rate of generated data against a real-data classifier");
  std::string dec_real, dec_gen;
  dec->add_option("--real", dec_real, "Real gaze CSV")->required();
  dec->add_option("--gen", dec_gen, "Generated gaze CSV, labelled with the intended class")->required();
  add_common(dec);
  dec->get_option("--classes")->default_str("participant");

  // render
  auto* render = app.add_subcommand("render", "Draw recordings as SVG");
  std::string render_in, render_out, render_delim = ",";
  int render_size = 800;
  render->add_option("--input", render_in, "Gaze CSV")->required();
  render->add_option("--out", render_out, "SVG file")->required();
  render->add_option("--size", render_size, "Canvas size in pixels")->capture_default_str();
  render->add_option("--delimiter", render_delim, "Field delimiter")->capture_default_str();

  bool deceive_key_given = false;
  try {
    app.parse(argc, argv);
    deceive_key_given = dec->count("--classes") > 0;
  } catch (const CLI::CallForHelp&) {
    const CLI::App* shown = &app;
    for (auto* sc : {train, gen, feat, eval, cv, dec, render})
      if (sc->parsed()) shown = sc;
    out << shown->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* shown = &app;
    for (auto* sc : {train, gen, feat, eval, cv, dec, render})
      if (sc->parsed()) shown = sc;
    err << "usage error: " << e.what() << "\n\n" << shown->help();
    return kExitUsage;
  }

  auto log = [&](const std::string& msg) {
    if (g.verbose) err << "[scanpath] " << msg << '\n';
  };

  try {
    if (train->parsed()) {
      bc.rule = parse_update_rule(train_rule);
      if (merge_radius >= 0.0) bc.merge_radius = merge_radius;
      bc.use_time = !no_time;
      bc.threads = g.threads;
      Dataset ds = detail::load_input(train_in, train_delim, !no_norm, parse_class_key(train_key));
      if (!train_class.empty()) {
        std::erase_if(ds.recordings, [&](const GazeRecording& r) { return class_label(r, ds.class_key) != train_class; });
        if (ds.empty()) throw ArgumentError("no recordings with " + train_key + " '" + train_class + "'");
      }
      log("training on " + std::to_string(ds.size()) + " recordings");
      const auto model = generate_model(ds, bc);
      save_model(model, train_out);
      log("wrote " + train_out + " (" + std::to_string(model.depth()) + " levels, " +
          std::to_string(model.node_count()) + " nodes)");
      return kExitOk;
    }
    if (gen->parsed()) {
      gc.rule = parse_update_rule(gen_rule);
      gc.clamp_to_unit = !no_clamp;
      gc.threads = g.threads;
      const auto model = load_model(gen_model);
      Dataset ds;
      ds.recordings = generate_batch(model, gc, gen_count, gen_prefix);
      for (auto& r : ds.recordings) {
        r.stimulus = gen_stim;
        r.participant = gen_part;
      }
      save_recordings(gen_out, ds);
      log("wrote " + std::to_string(gen_count) + " scan paths to " + gen_out);
      return kExitOk;
    }
    if (feat->parsed()) {
      FeatureSpec spec;
      spec.kind = parse_feature_kind(feat_kind);
      detail::parse_grid(feat_grid, spec);
      spec.bins = feat_bins;
      spec.hov_length_weighted = !feat_unweighted;
      const Dataset ds = load_recordings(feat_in, detail::csv_format(feat_delim));
      std::ofstream os(feat_out);
      if (!os) throw Error("cannot write '" + feat_out + "'");
      os << "rec,stimulus,participant";
      for (std::size_t i = 0; i < spec.length(); ++i) os << ",f" << i;
      os << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
      for (const auto& r : ds.recordings) {
        const auto f = featurize(r, spec);
        os << r.recording_id << ',' << r.stimulus << ',' << r.participant;
        for (double v : f.values) os << ',' << v;
        os << '\n';
      }
      return kExitOk;
    }
    if (eval->parsed()) {
      FeatureSpec spec;
      spec.kind = parse_feature_kind(ea.feature);
      detail::parse_grid(ea.grid, spec);
      spec.bins = ea.bins;
      const auto clf = parse_classifier_kind(ea.clf);
      std::ostringstream report;
      report << std::setprecision(6);
      if (cv->parsed()) {
        const auto key = parse_class_key(ea.classes);
        const Dataset real = detail::load_input(cv_in, ea.delim, !ea.no_norm, key);
        CvOptions opt;
        opt.feature = spec;
        opt.classifier = clf;
        opt.folds = cv_folds;
        opt.augment = cv_augment;
        opt.seed = ea.seed;
        opt.hidden = ea.hidden;
        opt.threads = g.threads;
        if (!cv_gen.empty()) opt.extra_training = load_recordings(cv_gen, detail::csv_format(ea.delim)).recordings;
        if (cv_source.empty()) cv_source = cv_gen.empty() ? "real" : "both";
        if (cv_source == "real") opt.source = TrainingSource::real;
        else if (cv_source == "generated") opt.source = TrainingSource::generated;
        else if (cv_source == "both") opt.source = TrainingSource::real_and_generated;
        else throw ConfigError("--source must be real|generated|both");
        if (opt.source != TrainingSource::real && cv_gen.empty())
          throw ConfigError("--source " + cv_source + " needs --gen");
        log("cross validation over " + std::to_string(real.size()) + " recordings");
        const auto rep = cross_validate(real, opt);
        report << "experiment cv\nsource " << to_string(opt.source) << "\nfeature " << to_string(spec.kind)
               << "\nclassifier " << to_string(clf) << '\n';
        print_report(report, rep);
      } else {
        const auto key = parse_class_key(deceive_key_given ? ea.classes : std::string("participant"));
        const Dataset real = detail::load_input(dec_real, ea.delim, !ea.no_norm, key);
        const auto generated = load_recordings(dec_gen, detail::csv_format(ea.delim));
        const auto rep =
            deception_rate(real, group_by_class(generated.recordings, key), spec, clf, ea.seed, ea.hidden);
        report << "experiment deceive\nfeature " << to_string(spec.kind) << "\nclassifier " << to_string(clf)
               << '\n';
        print_report(report, rep);
      }
      out << report.str();
      if (!ea.out.empty()) detail::write_text(ea.out, report.str());
      return kExitOk;
    }
    if (render->parsed()) {
      save_svg(render_out, load_recordings(render_in, detail::csv_format(render_delim)), render_size);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv;
  argv.push_back("scanpath");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace scanpath::cli
