#include "posecal/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "posecal/errors.hpp"
#include "posecal/kernels.hpp"
#include "posecal/rng.hpp"

namespace posecal {

FocalSample focal_sample_from_window(std::span<const Detection> frames,
                                     double known_depth, double mu,
                                     const std::string& person_id,
                                     int window_start,
                                     std::vector<std::string>* warnings) {
  if (frames.empty()) {
    throw InvalidInputError("empty calibration window");
  }
  if (!(known_depth > 0.0) || !(mu > 0.0)) {
    throw InvalidInputError("known depth and mu must be positive");
  }
  std::vector<double> s_values, alpha_values;
  s_values.reserve(frames.size());
  alpha_values.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Detection& det = frames[i];
    const double width = det.bbox.x_max - det.bbox.x_min;
    const double height = det.bbox.y_max - det.bbox.y_min;
    if (!(det.wp.s > 0.0) || !(width > 0.0) || !(height > 0.0) ||
        !std::isfinite(det.wp.s)) {
      if (warnings) {
        warnings->push_back("window frame " +
                            std::to_string(window_start + static_cast<int>(i)) +
                            " skipped: unusable detection");
      }
      continue;
    }
    s_values.push_back(det.wp.s);
    alpha_values.push_back(std::max(width, height));
  }
  if (s_values.empty()) {
    throw InvalidInputError("no usable frames in calibration window");
  }

  std::vector<double> focals(s_values.size());
  kernels::active().batch_focal_from_depth(known_depth, mu, s_values.data(),
                                           alpha_values.data(), focals.data(),
                                           focals.size());
  std::sort(focals.begin(), focals.end());
  const std::size_t n = focals.size();
  const double median = (n % 2 == 1)
                            ? focals[n / 2]
                            : (focals[n / 2 - 1] + focals[n / 2]) / 2.0;

  FocalSample sample;
  sample.person_id = person_id;
  sample.known_depth = known_depth;
  sample.measured_f = median;
  sample.window_start = window_start;
  sample.window_end = window_start + static_cast<int>(frames.size()) - 1;
  return sample;
}

double weight_from_depth(double z) {
  if (!(z > 0.0)) {
    throw InvalidInputError("depth must be positive");
  }
  const double sigma = z * z;
  return 1.0 / (sigma * sigma);
}

double weighted_loss(std::span<const HeightFocalPoint> points,
                     const LinearModel& model) {
  if (points.empty()) {
    throw InvalidInputError("weighted loss of an empty point set");
  }
  double num = 0.0, den = 0.0;
  for (const auto& pt : points) {
    if (!(pt.weight > 0.0)) {
      throw InvalidInputError("weighted loss requires positive weights");
    }
    const double r = pt.f - model.predict(pt.height);
    num += pt.weight * r * r;
    den += pt.weight;
  }
  return num / den;
}

double weighted_r2(std::span<const HeightFocalPoint> points,
                   const LinearModel& model) {
  if (points.size() < 2) {
    throw InvalidInputError("R^2 needs at least 2 points");
  }
  double sum_w = 0.0, sum_wf = 0.0;
  for (const auto& pt : points) {
    if (pt.weight < 0.0) {
      throw InvalidInputError("negative regression weight");
    }
    sum_w += pt.weight;
    sum_wf += pt.weight * pt.f;
  }
  if (!(sum_w > 0.0)) {
    throw InvalidInputError("all weights are zero");
  }
  const double mean_f = sum_wf / sum_w;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& pt : points) {
    const double r = pt.f - model.predict(pt.height);
    ss_res += pt.weight * r * r;
    const double d = pt.f - mean_f;
    ss_tot += pt.weight * d * d;
  }
  if (ss_tot == 0.0) {
    throw InvalidInputError("zero weighted variance; R^2 undefined");
  }
  return 1.0 - ss_res / ss_tot;
}

LinearModel weighted_least_squares(std::span<const HeightFocalPoint> points) {
  if (points.size() < 2) {
    throw UnderdeterminedError("line fit needs at least 2 points");
  }
  double sw = 0.0, sh = 0.0, sf = 0.0, shh = 0.0, shf = 0.0;
  for (const auto& pt : points) {
    if (!(pt.weight > 0.0)) {
      throw InvalidInputError("least squares requires positive weights");
    }
    sw += pt.weight;
    sh += pt.weight * pt.height;
    sf += pt.weight * pt.f;
    shh += pt.weight * pt.height * pt.height;
    shf += pt.weight * pt.height * pt.f;
  }
  const double denom = sw * shh - sh * sh;
  if (denom == 0.0) {
    throw UnderdeterminedError("line fit needs 2 distinct heights");
  }
  LinearModel model;
  model.slope = (sw * shf - sh * sf) / denom;
  model.intercept = (shh * sf - sh * shf) / denom;
  return model;
}

namespace {

struct Candidate {
  std::size_t count = 0;
  double loss = 0.0;
  std::vector<std::size_t> inliers;

  /// True when this candidate beats `other` under the ranking
  /// (count desc, loss asc, lexicographic inlier set asc).
  bool better_than(const Candidate& other) const {
    if (count != other.count) return count > other.count;
    if (loss != other.loss) return loss < other.loss;
    return std::lexicographical_compare(inliers.begin(), inliers.end(),
                                        other.inliers.begin(),
                                        other.inliers.end());
  }
};

void validate_points(std::span<const HeightFocalPoint> points) {
  for (const auto& pt : points) {
    if (!(pt.height > 0.0) || !(pt.f > 0.0) || !(pt.weight > 0.0)) {
      throw InvalidInputError(
          "height/focal points must have positive height, f and weight");
    }
  }
}

}  // namespace

LinearModel ransac_fit(std::span<const HeightFocalPoint> points,
                       const RansacConfig& cfg) {
  const std::size_t n = points.size();
  if (n < 2) {
    throw UnderdeterminedError("RANSAC needs at least 2 points");
  }
  validate_points(points);
  if (!(cfg.inlier_threshold > 0.0) || cfg.max_iterations < 1) {
    throw InvalidInputError("invalid RANSAC configuration");
  }
  {
    std::set<double> heights;
    for (const auto& pt : points) heights.insert(pt.height);
    if (heights.size() < 2) {
      throw UnderdeterminedError("RANSAC needs 2 distinct heights");
    }
  }

  const std::size_t pair_count = n * (n - 1) / 2;
  bool exhaustive;
  switch (cfg.sampling) {
    case Sampling::Exhaustive:
      exhaustive = true;
      break;
    case Sampling::Random:
      exhaustive = static_cast<std::size_t>(cfg.max_iterations) >= pair_count;
      break;
    case Sampling::Auto:
    default:
      exhaustive =
          n <= 12 ||
          static_cast<std::size_t>(cfg.max_iterations) >= pair_count;
      break;
  }

  const std::size_t min_consensus = std::max<std::size_t>(cfg.min_points, 2);
  std::optional<Candidate> best;

  auto evaluate_pair = [&](std::size_t i, std::size_t j) {
    const HeightFocalPoint& a = points[i];
    const HeightFocalPoint& b = points[j];
    if (a.height == b.height) return;
    LinearModel line;
    line.slope = (b.f - a.f) / (b.height - a.height);
    line.intercept = a.f - line.slope * a.height;

    Candidate cand;
    double loss_num = 0.0, loss_den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = points[k].f - line.predict(points[k].height);
      if (std::abs(r) <= cfg.inlier_threshold) {
        cand.inliers.push_back(k);
        loss_num += points[k].weight * r * r;
        loss_den += points[k].weight;
      }
    }
    cand.count = cand.inliers.size();
    if (cand.count < min_consensus) return;
    cand.loss = loss_num / loss_den;
    if (!best || cand.better_than(*best)) {
      best = std::move(cand);
    }
  };

  if (exhaustive) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        evaluate_pair(i, j);
      }
    }
  } else {
    Rng rng(cfg.seed);
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
      const std::size_t i = rng.below(n);
      std::size_t j = rng.below(n - 1);
      if (j >= i) ++j;
      evaluate_pair(std::min(i, j), std::max(i, j));
    }
  }

  if (!best) {
    throw NoModelError("no consensus set of size >= " +
                       std::to_string(min_consensus));
  }

  std::vector<HeightFocalPoint> consensus;
  consensus.reserve(best->count);
  for (std::size_t idx : best->inliers) consensus.push_back(points[idx]);

  LinearModel model = weighted_least_squares(consensus);
  model.inliers = best->inliers;
  try {
    model.r2 = weighted_r2(consensus, model);
  } catch (const InvalidInputError&) {
    // Zero weighted variance: the refit line reproduces every consensus
    // point exactly, so report a perfect fit.
    model.r2 = 1.0;
  }
  return model;
}

double predict_focal(const LinearModel& model, double height) {
  if (!std::isfinite(height)) {
    throw InvalidInputError("height must be finite");
  }
  return model.predict(height);
}

}  // namespace posecal
