#pragma once

#include <scanpath/augment.hpp>
#include <scanpath/classifier.hpp>
#include <scanpath/features.hpp>
#include <scanpath/gaze_data.hpp>
#include <scanpath/parallel.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

namespace scanpath {

/// Which data a fold's classifier is trained on.
enum class TrainingSource { real, generated, real_and_generated };

inline std::string_view to_string(TrainingSource s) {
  switch (s) {
    case TrainingSource::real: return "real";
    case TrainingSource::generated: return "generated";
    case TrainingSource::real_and_generated: return "real+generated";
  }
  return "real";
}

/// Produces synthetic training recordings from one training fold. Called once
/// per fold, so generators never see test data.
using FoldGenerator = std::function<std::vector<GazeRecording>(const Dataset& training_fold, std::size_t fold)>;

struct CvOptions {
  FeatureSpec feature;
  ClassifierKind classifier = ClassifierKind::nearest_centroid;
  std::size_t folds = 5;
  bool augment = false;
  AugmentOptions augment_options;
  std::uint64_t seed = 0;
  TrainingSource source = TrainingSource::real;
  std::vector<GazeRecording> extra_training;  // pre-generated, labelled via the dataset class key
  FoldGenerator fold_generator;
  int hidden = 100;
  unsigned threads = 0;
};

struct FoldReport {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::vector<std::size_t> augmented_sources;  // real recordings that seeded augmented copies
  std::size_t generated_count = 0;
  std::size_t training_size = 0;
};

struct EvalReport {
  std::vector<std::string> classes;
  std::vector<FoldReport> folds;
  double mean_accuracy = 0.0;
  double mean_balanced_accuracy = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted], summed over folds
  double chance_level = 0.0;
};

namespace detail {

inline double balanced_accuracy(const std::vector<std::vector<std::size_t>>& confusion) {
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < confusion.size(); ++c) {
    const auto total = std::accumulate(confusion[c].begin(), confusion[c].end(), std::size_t{0});
    if (total == 0) continue;
    sum += static_cast<double>(confusion[c][c]) / static_cast<double>(total);
    ++present;
  }
  return present ? sum / static_cast<double>(present) : 0.0;
}

inline std::vector<GazeRecording> augment_training(const std::vector<GazeRecording>& train,
                                                   const std::vector<std::string>& labels, const AugmentOptions& opt,
                                                   Rng& rng, std::vector<std::size_t>& sources) {
  std::vector<GazeRecording> out;
  for (std::size_t i = 0; i < train.size(); ++i) {
    std::vector<GazeRecording> pool;
    for (std::size_t j = 0; j < train.size(); ++j)
      if (j != i && labels[j] == labels[i]) pool.push_back(train[j]);
    bool used = false;
    for (auto kind : kAllAugmentations) {
      if (kind == AugmentKind::crop && train[i].points.size() < 4) continue;
      if (kind == AugmentKind::combine && pool.empty()) continue;
      out.push_back(augment(train[i], kind, rng, pool, opt));
      used = true;
    }
    if (used) sources.push_back(i);
  }
  return out;
}

}  // namespace detail

/// Stratified split: each class's recordings are shuffled and dealt
/// round-robin into `folds` folds.
inline std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& ds, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross_validate: folds must be >= 2");
  std::vector<std::vector<std::size_t>> out(folds);
  Rng rng = make_rng(seed, 0x5f01d);
  for (const auto& cls : ds.classes()) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (ds.label(i) == cls) idx.push_back(i);
    if (idx.size() < folds)
      throw ConfigError("cross_validate: class '" + cls + "' has " + std::to_string(idx.size()) +
                        " recordings, fewer than " + std::to_string(folds) + " folds");
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t j = 0; j < idx.size(); ++j) out[j % folds].push_back(idx[j]);
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

/// k-fold cross validation on real recordings. Generated and augmented data
/// only ever enter training folds.
inline EvalReport cross_validate(const Dataset& ds, const CvOptions& opt) {
  if (ds.empty()) throw ArgumentError("cross_validate: empty dataset");
  const auto splits = stratified_folds(ds, opt.folds, opt.seed);
  EvalReport report;
  report.classes = ds.classes();
  const std::size_t nc = report.classes.size();
  report.chance_level = 1.0 / static_cast<double>(nc);
  for (const auto& g : opt.extra_training)
    if (std::find(report.classes.begin(), report.classes.end(), class_label(g, ds.class_key)) == report.classes.end())
      throw ConfigError("cross_validate: generated recording '" + g.recording_id + "' has unknown class '" +
                        class_label(g, ds.class_key) + "'");

  const bool use_real = opt.source != TrainingSource::generated;
  const bool use_generated = opt.source != TrainingSource::real;
  report.folds.resize(opt.folds);
  std::vector<std::vector<std::vector<std::size_t>>> confusions(opt.folds,
                                                                std::vector<std::vector<std::size_t>>(nc, std::vector<std::size_t>(nc, 0)));

  parallel_for(opt.folds, resolve_threads(opt.threads), [&](std::size_t f) {
    FoldReport& fr = report.folds[f];
    fr.test_indices = splits[f];
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (!std::binary_search(splits[f].begin(), splits[f].end(), i)) fr.train_indices.push_back(i);

    Dataset train_fold;
    train_fold.class_key = ds.class_key;
    std::vector<std::string> train_labels;
    for (auto i : fr.train_indices) {
      train_fold.recordings.push_back(ds.recordings[i]);
      train_labels.push_back(ds.label(i));
    }
    if (opt.augment) {
      Rng rng = make_rng(opt.seed, 1000 + f);
      std::vector<std::size_t> local_sources;
      auto extra = detail::augment_training(train_fold.recordings, train_labels, opt.augment_options, rng, local_sources);
      for (auto s : local_sources) fr.augmented_sources.push_back(fr.train_indices[s]);
      for (auto& r : extra) train_fold.recordings.push_back(std::move(r));
    }

    std::vector<FeatureVector> x;
    std::vector<std::string> y;
    auto add = [&](const GazeRecording& r) {
      if (opt.feature.kind == FeatureKind::hov && r.points.size() < 2) return;
      x.push_back(featurize(r, opt.feature));
      y.push_back(class_label(r, ds.class_key));
    };
    if (use_real)
      for (const auto& r : train_fold.recordings) add(r);
    if (use_generated) {
      std::size_t before = x.size();
      for (const auto& r : opt.extra_training) add(r);
      if (opt.fold_generator)
        for (const auto& r : opt.fold_generator(train_fold, f)) {
          if (std::find(report.classes.begin(), report.classes.end(), class_label(r, ds.class_key)) ==
              report.classes.end())
            throw ConfigError("cross_validate: generated class '" + class_label(r, ds.class_key) + "' is unknown");
          add(r);
        }
      fr.generated_count = x.size() - before;
    }
    fr.training_size = x.size();
    if (x.empty()) throw ConfigError("cross_validate: fold " + std::to_string(f) + " has no training data");

    const Classifier clf =
        train_classifier(opt.classifier, x, y, opt.feature, stream_seed(opt.seed, f), report.classes, opt.hidden);
    auto& conf = confusions[f];
    std::size_t hit = 0;
    for (auto i : fr.test_indices) {
      const auto truth = static_cast<std::size_t>(
          std::find(report.classes.begin(), report.classes.end(), ds.label(i)) - report.classes.begin());
      const auto pred = clf.predict_index(featurize(ds.recordings[i], opt.feature));
      ++conf[truth][pred];
      if (pred == truth) ++hit;
    }
    fr.accuracy = static_cast<double>(hit) / static_cast<double>(fr.test_indices.size());
    fr.balanced_accuracy = detail::balanced_accuracy(conf);
  });

  report.confusion.assign(nc, std::vector<std::size_t>(nc, 0));
  for (const auto& conf : confusions)
    for (std::size_t a = 0; a < nc; ++a)
      for (std::size_t b = 0; b < nc; ++b) report.confusion[a][b] += conf[a][b];
  for (const auto& fr : report.folds) {
    report.mean_accuracy += fr.accuracy;
    report.mean_balanced_accuracy += fr.balanced_accuracy;
  }
  report.mean_accuracy /= static_cast<double>(opt.folds);
  report.mean_balanced_accuracy /= static_cast<double>(opt.folds);
  return report;
}

struct DeceptionReport {
  std::vector<std::string> classes;
  std::vector<double> rate;  // per class, aligned with `classes`
  std::vector<std::size_t> attempts;
  std::vector<std::size_t> successes;
  double overall = 0.0;
  double chance_level = 0.0;
};

/// Deception bookkeeping for any predictor: an attempt succeeds when the
/// predicted label equals the class the recording was generated for.
template <typename Predict>
DeceptionReport deception_from_predictor(const std::map<std::string, std::vector<GazeRecording>>& generated,
                                         const std::vector<std::string>& classes, Predict&& predict) {
  DeceptionReport rep;
  rep.classes = classes;
  rep.rate.assign(classes.size(), 0.0);
  rep.attempts.assign(classes.size(), 0);
  rep.successes.assign(classes.size(), 0);
  rep.chance_level = classes.empty() ? 0.0 : 1.0 / static_cast<double>(classes.size());
  std::size_t total = 0, won = 0;
  for (const auto& [cls, recs] : generated) {
    const auto it = std::find(classes.begin(), classes.end(), cls);
    if (it == classes.end()) throw ConfigError("deception_rate: generated class '" + cls + "' is not in the real data");
    const auto c = static_cast<std::size_t>(it - classes.begin());
    for (const auto& r : recs) {
      ++rep.attempts[c];
      if (predict(r) == cls) ++rep.successes[c];
    }
    total += rep.attempts[c];
    won += rep.successes[c];
  }
  for (std::size_t c = 0; c < classes.size(); ++c)
    if (rep.attempts[c]) rep.rate[c] = static_cast<double>(rep.successes[c]) / static_cast<double>(rep.attempts[c]);
  rep.overall = total ? static_cast<double>(won) / static_cast<double>(total) : 0.0;
  return rep;
}

/// Trains on all real recordings, then asks how often generated recordings
/// are assigned the class their generator was trained on.
inline DeceptionReport deception_rate(const Dataset& real,
                                      const std::map<std::string, std::vector<GazeRecording>>& generated_per_class,
                                      const FeatureSpec& feature, ClassifierKind kind, std::uint64_t seed,
                                      int hidden = 100) {
  if (real.empty()) throw ArgumentError("deception_rate: empty real dataset");
  const auto classes = real.classes();
  for (const auto& [cls, recs] : generated_per_class)
    if (std::find(classes.begin(), classes.end(), cls) == classes.end())
      throw ConfigError("deception_rate: generated class '" + cls + "' is not in the real data");
  std::vector<FeatureVector> x;
  std::vector<std::string> y;
  for (std::size_t i = 0; i < real.size(); ++i) {
    x.push_back(featurize(real.recordings[i], feature));
    y.push_back(real.label(i));
  }
  const Classifier clf = train_classifier(kind, x, y, feature, seed, classes, hidden);
  // A recording the feature cannot describe (single point under HOV) counts as a failed attempt.
  return deception_from_predictor(generated_per_class, classes, [&](const GazeRecording& r) {
    if (feature.kind == FeatureKind::hov && r.points.size() < 2) return std::string();
    return clf.predict(r);
  });
}

/// Groups recordings by their label under `key`.
inline std::map<std::string, std::vector<GazeRecording>> group_by_class(const std::vector<GazeRecording>& recs,
                                                                       ClassKey key) {
  std::map<std::string, std::vector<GazeRecording>> out;
  for (const auto& r : recs) out[class_label(r, key)].push_back(r);
  return out;
}

inline void print_report(std::ostream& os, const EvalReport& r) {
  os << "classes " << r.classes.size() << "\nchance " << r.chance_level << '\n';
  for (std::size_t f = 0; f < r.folds.size(); ++f)
    os << "fold " << f << " accuracy " << r.folds[f].accuracy << " balanced " << r.folds[f].balanced_accuracy
       << " train " << r.folds[f].training_size << " test " << r.folds[f].test_indices.size() << '\n';
  os << "mean_accuracy " << r.mean_accuracy << "\nmean_balanced_accuracy " << r.mean_balanced_accuracy << '\n';
  os << "confusion";
  for (const auto& c : r.classes) os << ' ' << c;
  os << '\n';
  for (std::size_t a = 0; a < r.classes.size(); ++a) {
    os << r.classes[a];
    for (auto v : r.confusion[a]) os << ' ' << v;
    os << '\n';
  }
}

inline void print_report(std::ostream& os, const DeceptionReport& r) {
  os << "chance " << r.chance_level << '\n';
  for (std::size_t c = 0; c < r.classes.size(); ++c)
    if (r.attempts[c]) os << "class " << r.classes[c] << " deception " << r.rate[c] << " (" << r.successes[c] << "/" << r.attempts[c] << ")\n";
  os << "overall_deception " << r.overall << '\n';
}

}  // namespace scanpath
