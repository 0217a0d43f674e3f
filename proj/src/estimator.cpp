#include "groundpose/estimator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace groundpose {

namespace {

using Jet7 = Jet<7>;

// Solver works on x = params / scale with lengths in units of the height.
std::array<double, 7> parameter_scale(double height) { return {1.0, 1.0, 1.0, 1.0, height, height, 1.0}; }

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  double m = *mid;
  if (values.size() % 2 == 0) m = 0.5 * (m + *std::max_element(values.begin(), mid));
  return m;
}

}  // namespace

std::size_t DisplacementField::active_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const FieldEntry& e) { return e.valid && e.inlier; }));
}

std::optional<Residual<double>> residual_image(const FieldEntry& entry, const ParamVector& params, double height,
                                               const CameraIntrinsics& K) {
  const auto m = image_chain(entry.anchor, params.to_array(), height, K);
  if (!m) return std::nullopt;
  return Residual<double>{m->u - entry.anchor.u - entry.d.dx, m->v - entry.anchor.v - entry.d.dy};
}

std::optional<Residual<double>> residual_ipm(const FieldEntry& entry, const ParamVector& params, double height,
                                             const IpmPair& planes, const CameraIntrinsics& K) {
  const auto m = ipm_chain(entry.anchor, params.to_array(), height, planes, K);
  if (!m) return std::nullopt;
  return Residual<double>{m->u - entry.anchor.u - entry.d.dx, m->v - entry.anchor.v - entry.d.dy};
}

std::optional<ImagePoint> predicted_displacement(const DisplacementField& field, const ImagePoint& anchor,
                                                 const ParamVector& params, double height,
                                                 const CameraIntrinsics& K) {
  const auto p = params.to_array();
  const auto moved =
      field.plane == Plane::Image ? image_chain(anchor, p, height, K) : ipm_chain(anchor, p, height, *field.ipm, K);
  if (!moved) return std::nullopt;
  return ImagePoint{moved->u - anchor.u, moved->v - anchor.v};
}

std::optional<LinearizedResidual> linearize(const DisplacementField& field, const FieldEntry& entry,
                                            const ParamVector& params, double height, const CameraIntrinsics& K) {
  const auto a = params.to_array();
  std::array<Jet7, 7> p;
  for (int i = 0; i < 7; ++i) p[static_cast<std::size_t>(i)] = Jet7::variable(a[static_cast<std::size_t>(i)], i);
  const auto r = field_residual(field, entry, p, height, K);
  if (!r) return std::nullopt;
  LinearizedResidual out;
  for (int row = 0; row < 2; ++row) {
    out.r[static_cast<std::size_t>(row)] = (*r)[static_cast<std::size_t>(row)].a;
    out.J[static_cast<std::size_t>(row)] = (*r)[static_cast<std::size_t>(row)].v;
  }
  return out;
}

std::vector<std::size_t> active_indices(const DisplacementField& field) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < field.entries.size(); ++i)
    if (field.entries[i].valid && field.entries[i].inlier) idx.push_back(i);
  return idx;
}

std::optional<double> field_cost(const DisplacementField& field, const ParamVector& params, double height,
                                 const CameraIntrinsics& K, std::span<const std::size_t> indices) {
  std::vector<std::size_t> all;
  if (indices.empty()) {
    all = active_indices(field);
    indices = all;
  }
  const auto p = params.to_array();
  double cost = 0.0;
  for (std::size_t i : indices) {
    const auto r = field_residual(field, field.entries[i], p, height, K);
    if (!r) return std::nullopt;
    cost += (*r)[0] * (*r)[0] + (*r)[1] * (*r)[1];
  }
  return cost;
}

LmResult solve_lm(const DisplacementField& field, const ParamVector& init, double height, const CameraIntrinsics& K,
                  const LmOptions& options, std::span<const std::size_t> indices) {
  std::vector<std::size_t> selected;
  if (indices.empty()) selected = active_indices(field);
  else selected.assign(indices.begin(), indices.end());

  // Entries that do not reach the ground at the starting point cannot be used.
  {
    const auto p = init.to_array();
    std::erase_if(selected, [&](std::size_t i) { return !field_residual(field, field.entries[i], p, height, K); });
  }
  if (selected.size() < 4) throw InsufficientInliers(selected.size(), 4);

  const auto scale = parameter_scale(height);
  using Vec7 = Eigen::Matrix<double, 7, 1>;
  using Mat7 = Eigen::Matrix<double, 7, 7>;

  auto to_params = [&](const Vec7& x) {
    std::array<double, 7> a;
    for (int i = 0; i < 7; ++i) a[static_cast<std::size_t>(i)] = x[i] * scale[static_cast<std::size_t>(i)];
    return ParamVector::from_array(a);
  };

  // Normal equations in scaled variables.
  auto build = [&](const ParamVector& params, Mat7& A, Vec7& g) -> std::optional<double> {
    A.setZero();
    g.setZero();
    double cost = 0.0;
    for (std::size_t i : selected) {
      const auto lin = linearize(field, field.entries[i], params, height, K);
      if (!lin) return std::nullopt;
      for (int row = 0; row < 2; ++row) {
        Vec7 j;
        for (int c = 0; c < 7; ++c)
          j[c] = lin->J[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)] *
                 scale[static_cast<std::size_t>(c)];
        const double r = lin->r[static_cast<std::size_t>(row)];
        A.noalias() += j * j.transpose();
        g.noalias() += j * r;
        cost += r * r;
      }
    }
    return cost;
  };

  Vec7 x;
  {
    const auto a = init.to_array();
    for (int i = 0; i < 7; ++i) x[i] = a[static_cast<std::size_t>(i)] / scale[static_cast<std::size_t>(i)];
  }
  LmResult result;
  result.params = init;

  Mat7 A;
  Vec7 g;
  auto cost = build(init, A, g);
  if (!cost) throw InsufficientInliers(0, 4);  // unreachable: filtered above
  result.cost = result.initial_cost = *cost;

  double lambda = options.initial_damping;
  bool converged = false;
  int iter = 0;
  while (iter < options.max_iterations) {
    ++iter;
    if (result.cost <= std::numeric_limits<double>::min()) {
      converged = true;
      break;
    }
    const double diag_floor = 1e-12 * std::max(A.diagonal().maxCoeff(), 1e-300);
    Mat7 damped = A;
    for (int i = 0; i < 7; ++i) damped(i, i) += lambda * std::max(A(i, i), diag_floor);
    const Vec7 step = damped.ldlt().solve(-g);
    if (!step.allFinite() || step.norm() < options.min_step_norm) {
      converged = true;
      break;
    }
    const Vec7 x_new = x + step;
    const ParamVector candidate = to_params(x_new);
    const auto new_cost = field_cost(field, candidate, height, K, selected);
    if (new_cost && *new_cost < result.cost) {
      const double relative = (result.cost - *new_cost) / result.cost;
      x = x_new;
      result.params = candidate;
      result.cost = *new_cost;
      result.accepted_costs.push_back(*new_cost);
      lambda = std::max(lambda / options.damping_down, 1e-15);
      if (relative < options.min_relative_decrease) {
        converged = true;
        break;
      }
      build(result.params, A, g);
    } else {
      lambda *= options.damping_up;
      if (lambda > 1e16) {
        converged = true;
        break;
      }
    }
  }
  result.iterations = iter;
  result.status = converged ? LmStatus::Converged : LmStatus::NonConvergence;
  return result;
}

void reject_by_magnitude(DisplacementField& field, double factor, double floor_px, double min_confidence) {
  std::vector<double> magnitudes;
  for (const auto& e : field.entries)
    if (e.valid && e.inlier) magnitudes.push_back(std::hypot(e.d.dx, e.d.dy));
  const double limit = std::max(factor * median(magnitudes), floor_px);
  for (auto& e : field.entries) {
    if (!e.valid || !e.inlier) continue;
    if (std::hypot(e.d.dx, e.d.dy) > limit || e.d.confidence < min_confidence) e.inlier = false;
  }
}

void reject_by_prediction(DisplacementField& field, double factor, double floor_px) {
  std::vector<double> deviations;
  for (const auto& e : field.entries)
    if (e.valid && e.inlier && e.predicted)
      deviations.push_back(std::hypot(e.d.dx - e.predicted->u, e.d.dy - e.predicted->v));
  const double limit = std::max(factor * median(deviations), floor_px);
  for (auto& e : field.entries) {
    if (!e.valid || !e.inlier) continue;
    if (!e.predicted || std::hypot(e.d.dx - e.predicted->u, e.d.dy - e.predicted->v) > limit) e.inlier = false;
  }
}

StageResult robust_estimate(DisplacementField field, const ParamVector& init, double height,
                            const CameraIntrinsics& K, const RobustOptions& options) {
  if (options.subsets < 1) throw std::invalid_argument("subsets must be >= 1");
  if (!(options.ratio > 0.0 && options.ratio <= 1.0)) throw std::invalid_argument("ratio must be in (0, 1]");

  reject_by_magnitude(field, options.magnitude_factor, options.magnitude_floor_px, options.min_confidence);
  // Inliers must be usable at the starting point.
  {
    const auto p = init.to_array();
    for (auto& e : field.entries)
      if (e.valid && e.inlier && !field_residual(field, e, p, height, K)) e.inlier = false;
  }
  const std::vector<std::size_t> inliers = active_indices(field);
  const auto subset_size =
      static_cast<std::size_t>(std::ceil(options.ratio * static_cast<double>(inliers.size()) - 1e-9));
  if (subset_size < 4) throw InsufficientInliers(inliers.size(), static_cast<std::size_t>(std::ceil(4.0 / options.ratio)));

  // Subsets are drawn up front so the solves can run in any order.
  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<std::size_t>> subsets(static_cast<std::size_t>(options.subsets));
  for (auto& subset : subsets) {
    std::vector<std::size_t> pool = inliers;
    for (std::size_t i = 0; i < subset_size; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(subset_size);
    std::sort(pool.begin(), pool.end());
    subset = std::move(pool);
  }

  struct Candidate {
    LmResult lm;
    double total = std::numeric_limits<double>::infinity();
  };
  std::vector<Candidate> candidates(subsets.size());
  auto solve_one = [&](std::size_t s) {
    Candidate c;
    c.lm = solve_lm(field, init, height, K, options.lm, subsets[s]);
    const auto total = field_cost(field, c.lm.params, height, K, inliers);
    if (total) c.total = *total;
    candidates[s] = std::move(c);
  };
  const auto count = static_cast<std::ptrdiff_t>(subsets.size());
  if (options.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < count; ++s) solve_one(static_cast<std::size_t>(s));
  } else {
    for (std::ptrdiff_t s = 0; s < count; ++s) solve_one(static_cast<std::size_t>(s));
  }

  std::size_t best = 0;
  for (std::size_t s = 1; s < candidates.size(); ++s)
    if (candidates[s].total < candidates[best].total) best = s;

  StageResult out;
  out.params = candidates[best].lm.params;
  out.cost = candidates[best].total;
  out.inliers = inliers.size();
  out.rms = std::isfinite(out.cost) ? std::sqrt(out.cost / (2.0 * static_cast<double>(inliers.size())))
                                    : std::numeric_limits<double>::infinity();
  out.iterations = candidates[best].lm.iterations;
  out.converged = candidates[best].lm.status == LmStatus::Converged;
  out.degraded = !std::isfinite(out.cost);
  out.candidate_costs.reserve(candidates.size());
  for (const auto& c : candidates) out.candidate_costs.push_back(c.total);
  out.field = std::move(field);
  return out;
}

}  // namespace groundpose
