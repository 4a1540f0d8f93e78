#include "gatenav/cmvae/eval.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "gatenav/cmvae/train.hpp"
#include "gatenav/common/error.hpp"

namespace gatenav::cmvae {

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

struct ErrorAccum {
  std::array<std::vector<double>, 4> abs_err;

  void add(const scene::RelativeGatePose& truth, const scene::RelativeGatePose& pred) {
    abs_err[0].push_back(std::abs(pred.r - truth.r));
    abs_err[1].push_back(std::abs(wrap_angle(pred.theta - truth.theta)) * kRadToDeg);
    abs_err[2].push_back(std::abs(wrap_angle(pred.phi - truth.phi)) * kRadToDeg);
    abs_err[3].push_back(std::abs(wrap_angle(pred.psi - truth.psi)) * kRadToDeg);
  }

  PoseErrorReport report() const {
    PoseErrorReport rep;
    rep.n = static_cast<int64_t>(abs_err[0].size());
    for (int c = 0; c < 4; ++c) {
      const auto& xs = abs_err[static_cast<size_t>(c)];
      const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      var = xs.size() > 1 ? var / static_cast<double>(xs.size() - 1) : 0.0;
      rep.mae[static_cast<size_t>(c)] = mean;
      rep.sem[static_cast<size_t>(c)] = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return rep;
  }
};

std::vector<int64_t> all_indices(int64_t n) {
  std::vector<int64_t> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

std::vector<int64_t> validation_indices(int64_t n, double val_frac, uint64_t seed) {
  return dataset_split(n, val_frac, seed).val;
}

PoseErrorReport evaluate_pose_error(const PosePredictor& predictor, const scene::Dataset& dataset,
                                    const std::vector<int64_t>& indices) {
  if (dataset.size() == 0) throw DataError("evaluate_pose_error: empty dataset");
  const std::vector<int64_t> idx = indices.empty() ? all_indices(dataset.size()) : indices;
  if (idx.empty()) throw DataError("evaluate_pose_error: empty index set");
  ErrorAccum acc;
  for (int64_t i : idx) {
    const scene::LabeledSample s = dataset.sample(i);
    acc.add(s.pose, predictor(s));
  }
  return acc.report();
}

PoseErrorReport evaluate_pose_error(const CmvaeModel& model, const scene::Dataset& dataset,
                                    const std::vector<int64_t>& indices) {
  if (dataset.size() == 0) throw DataError("evaluate_pose_error: empty dataset");
  if (!model.has_pose_decoder() && model.config().variant != ModelVariant::kRegressor)
    throw ConfigError("evaluate_pose_error: variant has no pose pathway");
  const std::vector<int64_t> idx = indices.empty() ? all_indices(dataset.size()) : indices;
  if (idx.empty()) throw DataError("evaluate_pose_error: empty index set");

  nn::NoGradGuard ng;
  const auto& cfg = model.config();
  const int64_t stride = 3LL * cfg.image_size * cfg.image_size;
  constexpr size_t kBatch = 128;
  ErrorAccum acc;
  for (size_t at = 0; at < idx.size(); at += kBatch) {
    const size_t count = std::min(kBatch, idx.size() - at);
    Tensor images({static_cast<int>(count), 3, cfg.image_size, cfg.image_size});
    for (size_t i = 0; i < count; ++i)
      dataset.write_image(idx[at + i], images.data() + static_cast<int64_t>(i) * stride);
    nn::Var in = nn::Var::constant(std::move(images), "eval_images");
    Tensor pred_norm = cfg.variant == ModelVariant::kRegressor
                           ? model.regress_batch(in).value()
                           : model.decode_pose_batch(model.encode_batch(in).mu).value();
    for (size_t i = 0; i < count; ++i) {
      const scene::RelativeGatePose pred = cfg.norm.denormalize(
          {pred_norm.at(static_cast<int64_t>(i) * 4 + 0), pred_norm.at(static_cast<int64_t>(i) * 4 + 1),
           pred_norm.at(static_cast<int64_t>(i) * 4 + 2), pred_norm.at(static_cast<int64_t>(i) * 4 + 3)});
      acc.add(dataset.view(idx[at + i]).pose, pred);
    }
  }
  return acc.report();
}

void write_pose_error_csv(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, PoseErrorReport>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  os << "model,radius_mae_m,radius_sem_m,azimuth_mae_deg,azimuth_sem_deg,polar_mae_deg,polar_sem_deg,"
        "yaw_mae_deg,yaw_sem_deg,n\n";
  char line[320];
  for (const auto& [name, rep] : rows) {
    std::snprintf(line, sizeof(line), "%s,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%lld\n", name.c_str(), rep.mae[0],
                  rep.sem[0], rep.mae[1], rep.sem[1], rep.mae[2], rep.sem[2], rep.mae[3], rep.sem[3],
                  static_cast<long long>(rep.n));
    os << line;
  }
  if (!os) throw DataError("write failed: " + path.string());
}

}  // namespace gatenav::cmvae
