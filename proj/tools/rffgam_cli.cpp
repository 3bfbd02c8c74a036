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

// Command-line front end. Exit codes: 0 success, 2 usage or configuration
// error, 3 numerical failure, 1 anything unexpected.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rffgam/augment.hpp"
#include "rffgam/config.hpp"
#include "rffgam/eval.hpp"
#include "rffgam/io.hpp"
#include "rffgam/latent.hpp"
#include "rffgam/mixture.hpp"
#include "rffgam/serialize.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rffgam;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::string model;
  std::string in;
  std::string out;
  std::int64_t seed = -1;
};

struct Run {
  config::RunConfig cfg;
  io::Dataset data;
  eval::DataSplit split;
};

void log(const std::string& msg) { std::cerr << "rffgam: " << msg << '\n'; }

Run load_run(const Options& opt) {
  if (opt.config.empty()) throw ConfigurationError("--config is required");
  Run run;
  run.cfg = config::load(opt.config);
  if (opt.seed >= 0) run.cfg.pipeline.seed = static_cast<std::uint64_t>(opt.seed);
  if (!opt.out.empty()) run.cfg.out_dir = opt.out;
  run.data = io::read_dataset(run.cfg.data_path, run.cfg.target,
                              run.cfg.delimiter, run.cfg.features);
  log(run.data.path + ": rows_read=" + std::to_string(run.data.rows_read) +
      " rows_kept=" + std::to_string(run.data.rows_kept) +
      " rows_dropped=" + std::to_string(run.data.rows_dropped));
  config::bind_feature_subset(run.cfg, run.data.feature_names);
  run.split = eval::train_test_split(run.data.x, run.data.y,
                                     run.cfg.train_fraction, run.cfg.pipeline.seed);
  fs::create_directories(run.cfg.out_dir);
  return run;
}

std::string out_path(const Run& run, const std::string& name) {
  return (fs::path(run.cfg.out_dir) / name).string();
}

mixture::MixtureModel train(const Run& run, double& seconds) {
  const auto start = std::chrono::steady_clock::now();
  mixture::MixtureModel model =
      mixture::train_pipeline(run.split.x_train, run.split.y_train, run.cfg.pipeline);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  model.feature_names = run.data.feature_names;
  model.target_name = run.data.target_name;
  return model;
}

mixture::MixtureModel model_for(const Options& opt, const Run& run) {
  if (!opt.model.empty() && fs::exists(opt.model)) return serialize::load_model(opt.model);
  double seconds = 0.0;
  return train(run, seconds);
}

// Columns of `table` matching the model's schema, in model order.
Matrix schema_columns(const io::CsvTable& table, const mixture::MixtureModel& model) {
  if (model.feature_names.empty()) {
    if (static_cast<Index>(table.header.size()) != model.num_inputs) {
      throw ConfigurationError("input has " + std::to_string(table.header.size()) +
                               " columns, model expects " +
                               std::to_string(model.num_inputs));
    }
    return table.values;
  }
  return select_cols(table.values, io::column_indices(table.header, model.feature_names));
}

void write_report(const std::string& path, const std::vector<eval::EvalReport>& reports) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot write '" + path + "'");
  out << "label,protocol,n_train,n_test,train_rmse,test_rmse,ci_low,ci_high\n";
  for (const eval::EvalReport& r : reports) {
    out << r.label << ',' << r.protocol << ',' << r.n_train << ',' << r.n_test << ','
        << io::format_double(r.train_rmse) << ',' << io::format_double(r.test_rmse) << ','
        << io::format_double(r.ci_low) << ',' << io::format_double(r.ci_high) << '\n';
  }
}

void write_timing(const std::string& path, const std::vector<eval::EvalReport>& reports) {
  std::ofstream out(path);
  out << "label,runtime_seconds\n";
  for (const eval::EvalReport& r : reports) {
    out << r.label << ',' << io::format_double(r.runtime_seconds) << '\n';
  }
}

std::vector<eval::EvalReport> single_split_reports(const Run& run,
                                                   const mixture::MixtureModel& model,
                                                   double seconds) {
  const std::uint64_t boot_seed = mix_seed(run.cfg.pipeline.seed, 900);
  std::vector<eval::EvalReport> reports;
  reports.push_back(eval::evaluate(
      "mixture", [&](const Matrix& x) { return mixture::predict_mixture(model, x); },
      run.split, seconds, run.cfg.bootstrap_resamples, boot_seed));
  if (model.rff) {
    const std::vector<Index> cols = model.clustering_columns();
    reports.push_back(eval::evaluate(
        "rff",
        [&](const Matrix& x) { return rff::predict_rff(*model.rff, select_cols(x, cols)); },
        run.split, seconds, run.cfg.bootstrap_resamples, boot_seed));
  }
  return reports;
}

int cmd_train(const Options& opt) {
  const Run run = load_run(opt);
  double seconds = 0.0;
  const mixture::MixtureModel model = train(run, seconds);
  const std::string model_path = opt.model.empty() ? out_path(run, "model.json") : opt.model;
  serialize::save_model(model, model_path);
  const auto reports = single_split_reports(run, model, seconds);
  write_report(out_path(run, "report.csv"), reports);
  write_timing(out_path(run, "timing.csv"), reports);
  for (const auto& r : reports) {
    log(r.label + " test RMSE " + io::format_double(r.test_rmse) + " +- " +
        io::format_double(r.ci_high - r.test_rmse));
  }
  log("model written to " + model_path);
  return 0;
}

int cmd_predict(const Options& opt) {
  if (opt.model.empty() || opt.in.empty() || opt.out.empty()) {
    throw ConfigurationError("predict needs --model, --in and --out");
  }
  const mixture::MixtureModel model = serialize::load_model(opt.model);
  const io::CsvTable table = io::read_csv(opt.in);
  if (table.rows_dropped > 0) {
    throw ConfigurationError(opt.in + ": " + std::to_string(table.rows_dropped) +
                             " rows do not match the numeric schema");
  }
  const Matrix x = schema_columns(table, model);
  const Vector pred = x.rows() > 0 ? mixture::predict_mixture(model, x) : Vector();
  io::write_csv(opt.out, {"prediction"}, pred);
  return 0;
}

int cmd_eval(const Options& opt) {
  const Run run = load_run(opt);
  double seconds = 0.0;
  const mixture::MixtureModel model = train(run, seconds);
  auto reports = single_split_reports(run, model, seconds);

  const auto start = std::chrono::steady_clock::now();
  const eval::MonteCarloResult mc =
      eval::monte_carlo_cv(run.data.x, run.data.y, run.cfg.pipeline, run.cfg.mc_repeats,
                           run.cfg.train_fraction, mix_seed(run.cfg.pipeline.seed, 901));
  eval::EvalReport mc_report;
  mc_report.label = "mixture";
  mc_report.protocol = "monte carlo cv x" + std::to_string(mc.rmses.size()) +
                       " (failures " + std::to_string(mc.failures) + ")";
  mc_report.test_rmse = mc.mean;
  mc_report.ci_low = mc.ci_low;
  mc_report.ci_high = mc.ci_high;
  mc_report.n_train = run.split.x_train.rows();
  mc_report.n_test = run.split.x_test.rows();
  mc_report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  reports.push_back(mc_report);
  for (const std::string& m : mc.failure_messages) log("failed " + m);

  if (!run.cfg.category_column.empty()) {
    const io::CsvTable table = io::read_csv(run.cfg.data_path, run.cfg.delimiter);
    const Index col = io::column_indices(table.header, {run.cfg.category_column}).front();
    std::vector<long long> cats;
    for (Index i = 0; i < table.values.rows(); ++i) {
      cats.push_back(static_cast<long long>(std::llround(table.values(i, col))));
    }
    const Matrix gamma = mixture::mixture_responsibilities(model, run.data.x);
    const eval::ResponsibilityProfile prof = eval::responsibility_profile(gamma, cats);
    std::vector<std::string> header = {"category"};
    for (Index l = 0; l < prof.mean.cols(); ++l) header.push_back("cluster_" + std::to_string(l));
    Matrix values(prof.mean.rows(), prof.mean.cols() + 1);
    for (Index r = 0; r < prof.mean.rows(); ++r) {
      values(r, 0) = static_cast<double>(prof.categories[static_cast<std::size_t>(r)]);
      values.row(r).tail(prof.mean.cols()) = prof.mean.row(r);
    }
    io::write_csv(out_path(run, "responsibility_profile.csv"), header, values);
    for (long long c : prof.omitted) log("category " + std::to_string(c) + " has no rows");
  }
  write_report(out_path(run, "report.csv"), reports);
  write_timing(out_path(run, "timing.csv"), reports);
  log("Monte Carlo mean RMSE " + io::format_double(mc.mean) + " +- " +
      io::format_double(mc.half_width));
  return 0;
}

int cmd_grid(const Options& opt) {
  const Run run = load_run(opt);
  std::vector<Index> ls = run.cfg.grid_l;
  std::vector<Index> ds = run.cfg.grid_d;
  if (ls.empty()) ls = {run.cfg.pipeline.num_clusters};
  if (ds.empty()) ds = {run.cfg.pipeline.latent_dim};
  const eval::GridResult grid = eval::grid_search(run.split, run.cfg.pipeline, ls, ds);
  std::ofstream out(out_path(run, "grid_rmse.csv"));
  out << "L,d,rmse\n";
  for (const eval::GridCell& c : grid.cells) {
    out << c.num_clusters << ',' << c.latent_dim << ',' << (c.ok ? io::format_double(c.rmse) : "")
        << '\n';
    if (!c.ok) log("cell L=" + std::to_string(c.num_clusters) + " d=" +
                   std::to_string(c.latent_dim) + " failed: " + c.error);
  }
  if (const eval::GridCell* best = grid.best()) {
    log("best cell L=" + std::to_string(best->num_clusters) +
        " d=" + std::to_string(best->latent_dim) + " rmse " + io::format_double(best->rmse));
  }
  return 0;
}

int cmd_pd(const Options& opt) {
  const Run run = load_run(opt);
  const mixture::MixtureModel model = model_for(opt, run);
  const eval::Predictor predict = [&](const Matrix& x) {
    return mixture::predict_mixture(model, x);
  };
  for (Index j = 0; j < run.split.x_train.cols(); ++j) {
    const eval::PdCurve curve = eval::partial_dependence(
        predict, run.split.x_train, j, run.cfg.pd_grid_size, run.cfg.pd_clip);
    Matrix values(curve.grid.size(), 2);
    values.col(0) = curve.grid;
    values.col(1) = curve.pd;
    io::write_csv(out_path(run, "pd_feature_" + std::to_string(j) + ".csv"), {"x", "pd"},
                  values);
  }
  return 0;
}

int cmd_augment(const Options& opt) {
  const Run run = load_run(opt);
  mixture::PipelineConfig cfg = run.cfg.pipeline;
  cfg.augment = true;
  const mixture::Stage1Result stage1 =
      mixture::fit_stage1(run.split.x_train, run.split.y_train, cfg, cfg.latent_dim);
  std::vector<std::string> header = run.data.feature_names;
  header.push_back(run.data.target_name);
  header.push_back("is_synthetic");
  Matrix values(stage1.x.rows(), stage1.x.cols() + 2);
  values.leftCols(stage1.x.cols()) = stage1.x;
  values.col(stage1.x.cols()) = stage1.y;
  for (Index i = 0; i < stage1.x.rows(); ++i) {
    values(i, stage1.x.cols() + 1) = stage1.is_synthetic[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  }
  io::write_csv(out_path(run, "augmented.csv"), header, values);
  log("augmented " + std::to_string(run.split.x_train.rows()) + " rows with " +
      std::to_string(stage1.x.rows() - run.split.x_train.rows()) + " synthetic rows");
  return 0;
}

int cmd_freq_analysis(const Options& opt) {
  if (opt.model.empty()) throw ConfigurationError("freq-analysis needs --model");
  const mixture::MixtureModel model = serialize::load_model(opt.model);
  if (!model.rff) throw ConfigurationError("model has no RFF stage");
  const latent::FrequencyAnalysis fa = latent::weighted_frequency_pca(model.rff->omega);
  const std::string dir = opt.out.empty() ? "." : opt.out;
  fs::create_directories(dir);
  const Index p = fa.principal_directions.rows();
  std::vector<std::string> header = {"component", "eigenvalue"};
  std::vector<std::string> names = model.feature_names;
  const std::vector<Index> cols = model.clustering_columns();
  for (Index j = 0; j < p; ++j) {
    const auto col = static_cast<std::size_t>(cols[static_cast<std::size_t>(j)]);
    header.push_back(col < names.size() ? names[col] : "x" + std::to_string(col));
  }
  Matrix values(p, p + 2);
  for (Index k = 0; k < p; ++k) {
    values(k, 0) = static_cast<double>(k + 1);
    values(k, 1) = fa.weighted_eigenvalues(k);
    values.row(k).tail(p) = fa.principal_directions.col(k).transpose();
  }
  io::write_csv((fs::path(dir) / "freq_analysis.csv").string(), header, values);
  log("kde bandwidth " + io::format_double(fa.kde_bandwidth) + ", |v1| = " +
      io::format_double(fa.principal_directions.col(0).norm()));
  return 0;
}

int cmd_spatial_report(const Options& opt) {
  const Run run = load_run(opt);
  const mixture::MixtureModel model = model_for(opt, run);
  const std::vector<mixture::ClusterGroup> groups =
      mixture::spatial_cluster_report(model, run.split.x_train);
  const std::vector<Index> cols = model.clustering_columns();
  std::vector<std::string> header = {"cluster", "row"};
  for (Index c : cols) header.push_back(run.data.feature_names[static_cast<std::size_t>(c)]);
  Matrix values(run.split.x_train.rows(), 2 + static_cast<Index>(cols.size()));
  Index r = 0;
  for (const mixture::ClusterGroup& g : groups) {
    for (Index row : g.rows) {
      values(r, 0) = static_cast<double>(g.cluster);
      values(r, 1) = static_cast<double>(run.split.train_rows[static_cast<std::size_t>(row)]);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        values(r, 2 + static_cast<Index>(k)) = run.split.x_train(row, cols[k]);
      }
      ++r;
    }
    log("cluster " + std::to_string(g.cluster) + ": " + std::to_string(g.rows.size()) + " rows");
  }
  io::write_csv(out_path(run, "clusters_spatial.csv"), header, values);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RFF-informed mixture of GAMs"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Run configuration file");
    sub->add_option("--model", opt.model, "Model file");
    sub->add_option("--in", opt.in, "Input CSV");
    sub->add_option("--out", opt.out, "Output directory (output file for predict)");
    sub->add_option("--seed", opt.seed, "Seed overriding the configuration")
        ->check(CLI::NonNegativeNumber);
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"train", "Train the pipeline and write model.json and report.csv", cmd_train},
      {"predict", "Predict rows of --in into the --out CSV", cmd_predict},
      {"eval", "Single-split and Monte Carlo evaluation", cmd_eval},
      {"grid", "(L, d) grid search into grid_rmse.csv", cmd_grid},
      {"pd", "Partial dependence curves pd_feature_<j>.csv", cmd_pd},
      {"augment", "Write the perturbation-augmented training set", cmd_augment},
      {"freq-analysis", "KDE-weighted PCA of the model's frequencies", cmd_freq_analysis},
      {"spatial-report", "Cluster membership of training rows", cmd_spatial_report},
  };
  int (*selected)(const Options&) = nullptr;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    sub->callback([&selected, &c] { selected = c.run; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  try {
    return selected(opt);
  } catch (const ConfigurationError& e) {
    log(std::string("configuration error: ") + e.what());
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    log(std::string("invalid input: ") + e.what());
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    log(std::string("numerical failure: ") + e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return 1;
  }
}
