#pragma once

// Codebook training with a modified LBG loop.
//
// Classification assigns each training block to the centroid with the lowest
// RD cost when that centroid is used as the block's ILR signal. The update
// rebuilds each centroid one scan position at a time: the value at position p
// is the mean prediction error over the class, where every member's
// prediction uses in-block references already corrected by the new values of
// the earlier positions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ilrip/codebook.hpp"
#include "ilrip/codec2d.hpp"
#include "ilrip/pgm.hpp"
#include "ilrip/predict.hpp"

namespace ilrip {

struct TrainingSample {
  SampleBlock original{kBlock2D, kBlock2D};
  ReferenceContext refs = ReferenceContext::uniform(kBlock2D, kBlock2D, kMidGray);
};

struct TrainingSet {
  std::vector<TrainingSample> samples;
  std::vector<std::string> sources;  // one entry per harvested image
};

// All 4x4 tiles of `img`, with references taken from the original picture.
inline void harvest_samples(const PixelGrid& img, TrainingSet& set, const std::string& name = {}) {
  for (int by = 0; by + kBlock2D <= img.height(); by += kBlock2D)
    for (int bx = 0; bx + kBlock2D <= img.width(); bx += kBlock2D) {
      const BlockGeom g{kBlock2D, kBlock2D, bx, by};
      set.samples.push_back({extract_block(img, g), ReferenceContext::from_grid(img, g)});
    }
  set.sources.push_back(name);
}

// Manifest: one PGM path per line, relative paths resolved against the
// manifest's directory. Blank lines and lines starting with '#' are skipped.
inline TrainingSet load_training_set(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest.string());
  TrainingSet set;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::filesystem::path p(line);
    if (p.is_relative()) p = manifest.parent_path() / p;
    harvest_samples(read_pgm(p), set, p.string());
  }
  if (set.samples.empty()) throw Error("training manifest yields no samples");
  return set;
}

// Training distance: RD cost with index bits and residual, without the
// algorithm flag, measured from fresh contexts.
inline double training_distance(const TrainingSample& s, const IlrSignal& centroid, std::size_t codebook_n,
                                const RdParams& p) {
  RateState rs;
  rs.codebook_n = codebook_n;
  rs.with_flag = false;
  return evaluate_centroid(s.original, s.refs, centroid, 0, p, rs).cost;
}

struct Classification {
  std::vector<int> assignment;     // per sample
  std::vector<double> cost;        // per sample, under its assigned centroid
  double total_cost = 0.0;
};

inline Classification classify(const TrainingSet& set, const Codebook& cb, const RdParams& p) {
  if (cb.empty()) throw Error("classify: empty codebook");
  Classification out;
  out.assignment.resize(set.samples.size());
  out.cost.resize(set.samples.size());
  for (std::size_t s = 0; s < set.samples.size(); ++s) {
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (std::size_t i = 0; i < cb.size(); ++i) {
      const double d = training_distance(set.samples[s], cb.centroids[i], cb.size(), p);
      if (d < best) {
        best = d;
        best_i = static_cast<int>(i);
      }
    }
    out.assignment[s] = best_i;
    out.cost[s] = best;
  }
  for (double c : out.cost) out.total_cost += c;
  return out;
}

// Pixel-sequential centroid update. `centroid` supplies the geometry and is
// overwritten position by position in scan order.
inline IlrSignal update_centroid(std::span<const TrainingSample* const> members, IlrSignal centroid,
                                 const ScanOrder& scan, AccessLog* log = nullptr) {
  if (members.empty()) throw Error("update_centroid: empty class");
  if (scan.h() != centroid.h || scan.w() != centroid.w) throw GeometryError("update_centroid: scan geometry mismatch");
  for (const auto* m : members)
    if (!m->refs.matches(centroid.h, centroid.w) || !m->original.same_shape(SampleBlock(centroid.h, centroid.w)))
      throw GeometryError("update_centroid: sample geometry mismatch");
  const auto rank = detail::scan_rank(scan);
  std::vector<SampleBlock> corrected(members.size(), SampleBlock(centroid.h, centroid.w));
  std::vector<int> pred(members.size());
  const auto count = static_cast<double>(members.size());
  int k = 0;
  for (const auto& p : scan.positions()) {
    std::int64_t err_sum = 0;  // exact integer numerator of the mean
    for (std::size_t l = 0; l < members.size(); ++l) {
      pred[l] = detail::predict_at(members[l]->refs, corrected[l], rank, p, k, l == 0 ? log : nullptr);
      err_sum += members[l]->original.at(p.row, p.col) - pred[l];
    }
    const double y = static_cast<double>(err_sum) / count;
    centroid.at(p.row, p.col) = y;
    for (std::size_t l = 0; l < members.size(); ++l) corrected[l].at(p.row, p.col) = correct(pred[l], y);
    ++k;
  }
  return centroid;
}

struct TrainOptions {
  std::uint64_t seed = 1;
  int max_iters = 50;
  double epsilon = 1e-4;
};

struct IterationLog {
  int iteration = 0;
  double total_cost = 0.0;
  std::vector<std::size_t> occupancy;
};

struct TrainResult {
  Codebook codebook;
  std::vector<IterationLog> log;
  int best_iteration = 0;  // log entry (1-based) whose codebook is returned
  bool converged = false;
  bool cycled = false;  // stopped because an assignment repeated
};

namespace detail {

// First n entries of a seeded partial Fisher-Yates shuffle; the picks for a
// smaller n are a prefix of those for a larger n under the same seed.
inline std::vector<std::size_t> seeded_picks(std::size_t total, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(total);
  for (std::size_t i = 0; i < total; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (total - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

// MinRes seeds taken in shuffle order, skipping samples whose MinRes repeats
// an earlier seed. Identical centroids would tie on every sample and leave
// all but one class empty. Falls back to repeats only when the set has fewer
// than n distinct MinRes values. Seeds for a smaller n stay a prefix.
inline std::vector<IlrSignal> distinct_minres_seeds(const TrainingSet& set, std::size_t n, std::uint64_t seed,
                                                    const ScanOrder& scan) {
  const auto order = seeded_picks(set.samples.size(), set.samples.size(), seed);
  std::vector<IlrSignal> seeds;
  std::vector<IlrSignal> repeats;
  for (auto i : order) {
    if (seeds.size() == n) break;
    auto m = compute_minres(set.samples[i].original, set.samples[i].refs, scan);
    if (std::find(seeds.begin(), seeds.end(), m) == seeds.end())
      seeds.push_back(std::move(m));
    else if (repeats.size() < n)
      repeats.push_back(std::move(m));
  }
  for (std::size_t k = 0; seeds.size() < n; ++k) seeds.push_back(repeats[k]);
  return seeds;
}

// Moves the worst sample of the most expensive multi-member class into each
// empty class.
inline void reseed_empty_classes(Classification& cls, std::size_t n) {
  std::vector<std::size_t> occupancy(n, 0);
  std::vector<double> class_cost(n, 0.0);
  for (std::size_t s = 0; s < cls.assignment.size(); ++s) {
    ++occupancy[static_cast<std::size_t>(cls.assignment[s])];
    class_cost[static_cast<std::size_t>(cls.assignment[s])] += cls.cost[s];
  }
  for (std::size_t e = 0; e < n; ++e) {
    if (occupancy[e] != 0) continue;
    std::size_t donor = n;
    for (std::size_t i = 0; i < n; ++i)
      if (occupancy[i] >= 2 && (donor == n || class_cost[i] > class_cost[donor])) donor = i;
    if (donor == n) throw Error("cannot reseed: no class with two or more samples");
    std::size_t worst = cls.assignment.size();
    for (std::size_t s = 0; s < cls.assignment.size(); ++s)
      if (cls.assignment[s] == static_cast<int>(donor) && (worst == cls.assignment.size() || cls.cost[s] > cls.cost[worst]))
        worst = s;
    cls.assignment[worst] = static_cast<int>(e);
    --occupancy[donor];
    class_cost[donor] -= cls.cost[worst];
    occupancy[e] = 1;
    class_cost[e] = cls.cost[worst];
  }
}

}  // namespace detail

inline std::vector<std::size_t> occupancy(const Classification& cls, std::size_t n) {
  std::vector<std::size_t> occ(n, 0);
  for (int a : cls.assignment) ++occ[static_cast<std::size_t>(a)];
  return occ;
}

// Trains an n-entry codebook. Centroids start as the minimum residuals of
// seeded picks with distinct MinRes values. Stops when the relative change of
// the total classification cost drops below epsilon, or after max_iters
// classifications. The pixel-sequential update does not guarantee a cost
// decrease, so the codebook returned is the classified one with the lowest
// total cost (earliest on ties). Each update depends only on the assignment
// it starts from, so a repeated assignment means the loop has entered a cycle
// and training stops there.
inline TrainResult train(const TrainingSet& set, std::size_t n, const RdParams& p, const TrainOptions& opts = {}) {
  if (set.samples.empty()) throw Error("train: empty training set");
  if (n < 1) throw Error("train: codebook size must be at least 1");
  if (n > set.samples.size()) throw Error("train: codebook size exceeds sample count");
  if (opts.max_iters < 1) throw Error("train: max_iters must be at least 1");
  const auto& scan = raster_4x4();

  TrainResult out;
  out.codebook.qp = p.qp;
  out.codebook.h = kBlock2D;
  out.codebook.w = kBlock2D;
  out.codebook.centroids = detail::distinct_minres_seeds(set, n, opts.seed, scan);

  auto best = out.codebook.centroids;
  double best_cost = std::numeric_limits<double>::infinity();
  std::set<std::vector<int>> seen;
  double previous = 0.0;
  for (int t = 1; t <= opts.max_iters; ++t) {
    auto cls = classify(set, out.codebook, p);
    out.log.push_back({t, cls.total_cost, occupancy(cls, n)});
    if (cls.total_cost < best_cost) {
      best_cost = cls.total_cost;
      best = out.codebook.centroids;
      out.best_iteration = t;
    }
    if (t > 1 && std::abs(previous - cls.total_cost) <= opts.epsilon * std::max(std::abs(previous), 1e-300)) {
      out.converged = true;
      break;
    }
    previous = cls.total_cost;
    if (t == opts.max_iters) break;

    detail::reseed_empty_classes(cls, n);
    if (!seen.insert(cls.assignment).second) {
      out.cycled = true;
      break;
    }
    std::vector<std::vector<const TrainingSample*>> members(n);
    for (std::size_t s = 0; s < set.samples.size(); ++s)
      members[static_cast<std::size_t>(cls.assignment[s])].push_back(&set.samples[s]);
    for (std::size_t i = 0; i < n; ++i)
      out.codebook.centroids[i] = update_centroid(members[i], std::move(out.codebook.centroids[i]), scan);
  }
  out.codebook.centroids = std::move(best);
  return out;
}

}  // namespace ilrip
