/*
 * Copyright 2026 The rffgam Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rffgam/serialize.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rffgam::serialize {
namespace {

using nlohmann::json;

json encode(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector decode_vector(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

json encode(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix decode_matrix(const json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Index>(data.size()) != rows * cols) {
    throw InvalidArgument("matrix payload does not match its shape");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

json encode(const Standardizer& s) {
  return {{"mean", encode(s.mean)}, {"scale", encode(s.scale)}};
}

Standardizer decode_standardizer(const json& j) {
  Standardizer s;
  s.mean = decode_vector(j.at("mean"));
  s.scale = decode_vector(j.at("scale"));
  if (s.mean.size() != s.scale.size()) {
    throw InvalidArgument("standardizer mean and scale lengths differ");
  }
  return s;
}

json encode_config(const mixture::PipelineConfig& c) {
  return {
      {"K", c.num_features},
      {"sigma", c.sigma},
      {"lambda", c.lambda},
      {"lambda_scale", to_string(c.lambda_scale)},
      {"walk", to_string(c.walk)},
      {"delta", c.delta},
      {"resample_iters", c.resample_iters},
      {"validation_fraction", c.validation_fraction},
      {"refit_full", c.refit_full},
      {"d", c.latent_dim},
      {"L", c.num_clusters},
      {"em_tol", c.em_tol},
      {"em_max_iter", c.em_max_iter},
      {"n_knots", c.n_knots},
      {"degree", c.degree},
      {"smooth_lambda", c.smooth_lambda},
      {"gam_tol", c.gam_tol},
      {"gam_max_sweeps", c.gam_max_sweeps},
      {"min_cluster_size", c.min_cluster_size},
      {"ablation", to_string(c.ablation)},
      {"ridge_lambda", c.ridge_lambda},
      {"feature_subset", c.feature_subset},
      {"augment", c.augment},
      {"augment_locals", c.augment_locals},
      {"augment_n", c.augmentation.n_per_point},
      {"augment_epsilon", c.augmentation.epsilon},
      {"augment_quantile", c.augmentation.chi2_quantile},
      {"seed", c.seed},
  };
}

mixture::PipelineConfig decode_config(const json& j) {
  mixture::PipelineConfig c;
  c.num_features = j.at("K").get<Index>();
  c.sigma = j.at("sigma").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.lambda_scale = parse_lambda_scale(j.at("lambda_scale").get<std::string>());
  c.walk = parse_walk(j.at("walk").get<std::string>());
  c.delta = j.at("delta").get<double>();
  c.resample_iters = j.at("resample_iters").get<int>();
  c.validation_fraction = j.at("validation_fraction").get<double>();
  c.refit_full = j.at("refit_full").get<bool>();
  c.latent_dim = j.at("d").get<Index>();
  c.num_clusters = j.at("L").get<Index>();
  c.em_tol = j.at("em_tol").get<double>();
  c.em_max_iter = j.at("em_max_iter").get<int>();
  c.n_knots = j.at("n_knots").get<int>();
  c.degree = j.at("degree").get<int>();
  c.smooth_lambda = j.at("smooth_lambda").get<double>();
  c.gam_tol = j.at("gam_tol").get<double>();
  c.gam_max_sweeps = j.at("gam_max_sweeps").get<int>();
  c.min_cluster_size = j.at("min_cluster_size").get<Index>();
  c.ablation = parse_ablation(j.at("ablation").get<std::string>());
  c.ridge_lambda = j.at("ridge_lambda").get<double>();
  c.feature_subset = j.at("feature_subset").get<std::vector<Index>>();
  c.augment = j.at("augment").get<bool>();
  c.augment_locals = j.at("augment_locals").get<bool>();
  c.augmentation.n_per_point = j.at("augment_n").get<int>();
  c.augmentation.epsilon = j.at("augment_epsilon").get<double>();
  c.augmentation.chi2_quantile = j.at("augment_quantile").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json encode_rff(const rff::RffModel& m) {
  std::vector<std::array<double, 2>> beta;
  beta.reserve(static_cast<std::size_t>(m.beta.size()));
  for (Index k = 0; k < m.beta.size(); ++k) {
    beta.push_back({m.beta(k).real(), m.beta(k).imag()});
  }
  return {{"sigma", m.sigma},
          {"lambda", m.lambda},
          {"y_mean", m.y_mean},
          {"standardizer", encode(m.standardizer)},
          {"omega", encode(m.omega.omega())},
          {"beta", beta}};
}

rff::RffModel decode_rff(const json& j) {
  rff::RffModel m;
  m.sigma = j.at("sigma").get<double>();
  m.lambda = j.at("lambda").get<double>();
  m.y_mean = j.at("y_mean").get<double>();
  m.standardizer = decode_standardizer(j.at("standardizer"));
  m.omega = rff::FrequencyMatrix(decode_matrix(j.at("omega")));
  const auto beta = j.at("beta").get<std::vector<std::array<double, 2>>>();
  if (static_cast<Index>(beta.size()) != m.omega.count()) {
    throw InvalidArgument("coefficient count does not match frequency count");
  }
  m.beta.resize(static_cast<Index>(beta.size()));
  for (std::size_t k = 0; k < beta.size(); ++k) {
    m.beta(static_cast<Index>(k)) = {beta[k][0], beta[k][1]};
  }
  if (m.standardizer.dim() != m.omega.dim()) {
    throw InvalidArgument("standardizer and frequency dimensions differ");
  }
  return m;
}

std::string kind_name(gam::TermKind kind) {
  switch (kind) {
    case gam::TermKind::kSpline:
      return "spline";
    case gam::TermKind::kLinear:
      return "linear";
    case gam::TermKind::kConstant:
      return "constant";
  }
  return "spline";
}

gam::TermKind parse_kind(const std::string& name) {
  if (name == "spline") return gam::TermKind::kSpline;
  if (name == "linear") return gam::TermKind::kLinear;
  if (name == "constant") return gam::TermKind::kConstant;
  throw InvalidArgument("unknown GAM term kind '" + name + "'");
}

json encode_gam(const gam::GamModel& m) {
  json terms = json::array();
  for (std::size_t j = 0; j < m.bases.size(); ++j) {
    const gam::SplineBasis& b = m.bases[j];
    terms.push_back({{"feature", b.feature_index},
                     {"kind", kind_name(b.kind)},
                     {"knots", encode(b.interior_knots)},
                     {"lower", b.lower},
                     {"upper", b.upper},
                     {"degree", b.degree},
                     {"center", b.center},
                     {"theta", encode(m.theta[j])}});
  }
  return {{"alpha", m.alpha},
          {"smooth_lambda", m.smooth_lambda},
          {"converged", m.converged},
          {"sweeps", m.sweeps},
          {"terms", terms}};
}

gam::GamModel decode_gam(const json& j) {
  gam::GamModel m;
  m.alpha = j.at("alpha").get<double>();
  m.smooth_lambda = j.at("smooth_lambda").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.sweeps = j.at("sweeps").get<int>();
  for (const json& t : j.at("terms")) {
    gam::SplineBasis b;
    b.feature_index = t.at("feature").get<Index>();
    b.kind = parse_kind(t.at("kind").get<std::string>());
    b.interior_knots = decode_vector(t.at("knots"));
    b.lower = t.at("lower").get<double>();
    b.upper = t.at("upper").get<double>();
    b.degree = t.at("degree").get<int>();
    b.center = t.at("center").get<double>();
    Vector theta = decode_vector(t.at("theta"));
    if (theta.size() != b.n_basis()) {
      throw InvalidArgument("GAM coefficient length does not match its basis");
    }
    m.bases.push_back(std::move(b));
    m.theta.push_back(std::move(theta));
  }
  return m;
}

json encode_gmm(const gmm::GmmModel& m) {
  json means = json::array();
  json covs = json::array();
  for (Index l = 0; l < m.num_components(); ++l) {
    means.push_back(encode(m.means[static_cast<std::size_t>(l)]));
    covs.push_back(encode(m.covariances[static_cast<std::size_t>(l)]));
  }
  return {{"weights", encode(m.weights)}, {"means", means}, {"covariances", covs}};
}

gmm::GmmModel decode_gmm(const json& j) {
  gmm::GmmModel m;
  m.weights = decode_vector(j.at("weights"));
  for (const json& v : j.at("means")) m.means.push_back(decode_vector(v));
  for (const json& c : j.at("covariances")) m.covariances.push_back(decode_matrix(c));
  if (static_cast<Index>(m.means.size()) != m.weights.size() ||
      m.covariances.size() != m.means.size()) {
    throw InvalidArgument("mixture parameter counts disagree");
  }
  return m;
}

}  // namespace

std::string to_string(mixture::AblationMode mode) {
  switch (mode) {
    case mixture::AblationMode::kNone:
      return "none";
    case mixture::AblationMode::kRawCluster:
      return "raw_cluster";
    case mixture::AblationMode::kPcaInputCluster:
      return "pca_input_cluster";
    case mixture::AblationMode::kLocalLinear:
      return "local_linear";
  }
  return "none";
}

std::string to_string(rff::LambdaScale scale) {
  switch (scale) {
    case rff::LambdaScale::kAbsolute:
      return "absolute";
    case rff::LambdaScale::kPerFeature:
      return "per_feature";
    case rff::LambdaScale::kPerSample:
      return "per_sample";
  }
  return "per_feature";
}

std::string to_string(rff::WalkShape shape) {
  return shape == rff::WalkShape::kIsotropic ? "isotropic" : "frequency_covariance";
}

mixture::AblationMode parse_ablation(const std::string& name) {
  if (name == "none") return mixture::AblationMode::kNone;
  if (name == "raw_cluster") return mixture::AblationMode::kRawCluster;
  if (name == "pca_input_cluster") return mixture::AblationMode::kPcaInputCluster;
  if (name == "local_linear") return mixture::AblationMode::kLocalLinear;
  throw InvalidArgument("unknown ablation mode '" + name + "'");
}

rff::LambdaScale parse_lambda_scale(const std::string& name) {
  if (name == "absolute") return rff::LambdaScale::kAbsolute;
  if (name == "per_feature") return rff::LambdaScale::kPerFeature;
  if (name == "per_sample") return rff::LambdaScale::kPerSample;
  throw InvalidArgument("unknown lambda scale '" + name + "'");
}

rff::WalkShape parse_walk(const std::string& name) {
  if (name == "isotropic") return rff::WalkShape::kIsotropic;
  if (name == "frequency_covariance") return rff::WalkShape::kFrequencyCovariance;
  throw InvalidArgument("unknown random walk shape '" + name + "'");
}

std::string config_to_json(const mixture::PipelineConfig& config) {
  return encode_config(config).dump(2);
}

std::string model_to_json(const mixture::MixtureModel& model) {
  json locals = json::array();
  for (const mixture::LocalModel& local : model.locals) {
    if (local.kind == mixture::LocalKind::kGam) {
      locals.push_back({{"kind", "gam"}, {"gam", encode_gam(local.gam)}});
    } else {
      locals.push_back({{"kind", "linear"},
                        {"standardizer", encode(local.ridge.standardizer)},
                        {"coef", encode(local.ridge.coef)},
                        {"intercept", local.ridge.intercept},
                        {"lambda", local.ridge.lambda}});
    }
  }
  json doc = {
      {"format", "rffgam-mixture"},
      {"schema_version", kSchemaVersion},
      {"config", encode_config(model.config)},
      {"num_inputs", model.num_inputs},
      {"feature_names", model.feature_names},
      {"target_name", model.target_name},
      {"projector",
       {{"s_mean", encode(model.projector.s_mean)},
        {"v_d", encode(model.projector.v_d)},
        {"singular_values", encode(model.projector.singular_values)}}},
      {"cluster_standardizer", encode(model.cluster_standardizer)},
      {"gmm", encode_gmm(model.gmm)},
      {"kept_components", model.kept_components},
      {"cluster_sizes", model.cluster_sizes},
      {"locals", locals},
  };
  doc["rff"] = model.rff ? encode_rff(*model.rff) : json(nullptr);
  return doc.dump(1) + "\n";
}

mixture::MixtureModel model_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != "rffgam-mixture") {
      throw InvalidArgument("not an rffgam model document");
    }
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw InvalidArgument("unsupported model schema version " +
                            std::to_string(version));
    }
    mixture::MixtureModel m;
    m.config = decode_config(doc.at("config"));
    m.num_inputs = doc.at("num_inputs").get<Index>();
    m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    m.target_name = doc.at("target_name").get<std::string>();
    if (!doc.at("rff").is_null()) m.rff = decode_rff(doc.at("rff"));
    const json& pj = doc.at("projector");
    m.projector.s_mean = decode_vector(pj.at("s_mean"));
    m.projector.v_d = decode_matrix(pj.at("v_d"));
    m.projector.singular_values = decode_vector(pj.at("singular_values"));
    m.cluster_standardizer = decode_standardizer(doc.at("cluster_standardizer"));
    m.gmm = decode_gmm(doc.at("gmm"));
    m.kept_components = doc.at("kept_components").get<std::vector<Index>>();
    m.cluster_sizes = doc.at("cluster_sizes").get<std::vector<Index>>();
    for (const json& lj : doc.at("locals")) {
      mixture::LocalModel local;
      if (lj.at("kind").get<std::string>() == "gam") {
        local.kind = mixture::LocalKind::kGam;
        local.gam = decode_gam(lj.at("gam"));
      } else {
        local.kind = mixture::LocalKind::kLinear;
        local.ridge.standardizer = decode_standardizer(lj.at("standardizer"));
        local.ridge.coef = decode_vector(lj.at("coef"));
        local.ridge.intercept = lj.at("intercept").get<double>();
        local.ridge.lambda = lj.at("lambda").get<double>();
      }
      m.locals.push_back(std::move(local));
    }
    if (static_cast<Index>(m.locals.size()) != m.gmm.num_components()) {
      throw InvalidArgument("local model count differs from component count");
    }
    if (m.uses_rff() && !m.rff) {
      throw InvalidArgument("model document lacks its RFF stage");
    }
    return m;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const mixture::MixtureModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << model_to_json(model);
  if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

mixture::MixtureModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace rffgam::serialize
