#include "dhyper/cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dhyper/fit.hpp"
#include "dhyper/io.hpp"
#include "dhyper/pmf.hpp"
#include "dhyper/rng.hpp"
#include "dhyper/sampler.hpp"
#include "dhyper/stats.hpp"
#include "dhyper/urn.hpp"

namespace dhyper {
namespace {

using json = nlohmann::ordered_json;

UrnSpec make_urn(const std::vector<std::int64_t>& m, std::int64_t n,
                 const std::vector<double>& omega) {
  if (omega.size() != m.size()) {
    throw std::invalid_argument("--omega must have one entry per class");
  }
  std::vector<double> log_w;
  log_w.reserve(omega.size());
  for (double w : omega) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("--omega entries must be positive finite");
    }
    log_w.push_back(std::log(w));
  }
  UrnSpec urn{m, n, log_w};
  urn.validate();
  return urn;
}

void write_meta(const std::filesystem::path& out, const json& config) {
  write_text_atomic(meta_path(out), config.dump(2) + "\n");
}

void write_table(const std::filesystem::path& out, const std::string& format,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  if (format == "csv") {
    write_text_atomic(out, to_csv(header, rows));
    return;
  }
  json arr = json::array();
  for (const auto& row : rows) {
    json obj;
    for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
    arr.push_back(std::move(obj));
  }
  write_text_atomic(out, arr.dump(2) + "\n");
}

// ---- sample ---------------------------------------------------------------

struct SampleOpts {
  std::vector<std::int64_t> m;
  std::int64_t n = 0;
  std::vector<double> omega;
  std::string mode = "exact";
  std::int64_t count = 1;
  std::uint64_t seed = 0;
  double tau = 1.0;
  std::string out;
  std::string format = "csv";
};

int cmd_sample(const SampleOpts& o) {
  const UrnSpec urn = make_urn(o.m, o.n, o.omega);
  if (o.count < 0) throw std::invalid_argument("--count must be >= 0");
  if (!(o.tau > 0.0)) throw std::invalid_argument("--tau must be > 0");
  const bool relaxed = o.mode == "differentiable";
  const std::size_t c = urn.num_classes();

  std::vector<std::string> header{"draw_index"};
  for (std::size_t i = 0; i < c; ++i) header.push_back("x_" + std::to_string(i + 1));
  if (relaxed) {
    for (std::size_t i = 0; i < c; ++i) header.push_back("soft_" + std::to_string(i + 1));
  }

  const UrnSampler sampler(urn);
  Pcg32 rng(o.seed, 0);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<std::size_t>(o.count));
  for (std::int64_t d = 0; d < o.count; ++d) {
    std::vector<std::string> row{std::to_string(d)};
    if (relaxed) {
      const RelaxedDraw draw = sampler.differentiable(o.tau, rng);
      for (std::int64_t x : draw.hard_counts) row.push_back(std::to_string(x));
      for (double s : draw.soft_counts) row.push_back(format_double(s));
    } else {
      for (std::int64_t x : sampler.exact(rng)) row.push_back(std::to_string(x));
    }
    rows.push_back(std::move(row));
  }
  write_table(o.out, o.format, header, rows);
  write_meta(o.out, json{{"subcommand", "sample"},
                         {"m", o.m},
                         {"n", o.n},
                         {"omega", o.omega},
                         {"mode", o.mode},
                         {"count", o.count},
                         {"seed", o.seed},
                         {"tau", o.tau},
                         {"out", o.out},
                         {"format", o.format}});
  return 0;
}

// ---- pmf ------------------------------------------------------------------

struct PmfOpts {
  std::vector<std::int64_t> m;
  std::int64_t n = 0;
  std::vector<double> omega;
  std::string out;
  std::string format = "csv";
};

int cmd_pmf(const PmfOpts& o) {
  const UrnSpec urn = make_urn(o.m, o.n, o.omega);
  const JointPmfTable table = joint_pmf_table(urn);
  const std::size_t c = urn.num_classes();

  std::vector<std::string> header;
  for (std::size_t i = 0; i < c; ++i) header.push_back("x_" + std::to_string(i + 1));
  header.push_back("log_p_joint");
  header.push_back("log_p_chain");

  std::vector<std::vector<std::string>> rows;
  rows.reserve(table.support.size());
  for (std::size_t k = 0; k < table.support.size(); ++k) {
    std::vector<std::string> row;
    for (std::int64_t x : table.support[k]) row.push_back(std::to_string(x));
    row.push_back(format_double(table.log_joint[k]));
    row.push_back(format_double(table.log_chain[k]));
    rows.push_back(std::move(row));
  }
  write_table(o.out, o.format, header, rows);
  write_meta(o.out, json{{"subcommand", "pmf"},
                         {"m", o.m},
                         {"n", o.n},
                         {"omega", o.omega},
                         {"out", o.out},
                         {"format", o.format}});
  return 0;
}

// ---- kstest ---------------------------------------------------------------

struct KsOpts {
  std::vector<std::int64_t> m;
  std::int64_t n = 0;
  std::vector<double> omega;
  std::string sweep = "omega2";
  std::vector<double> grid;
  std::int64_t samples = 20000;
  double tau = 1.0;
  std::uint64_t seed = 0;
  double threshold = 0.05;
  bool assert_pass = false;
  std::string out;
  std::string hist_out;
};

int cmd_kstest(const KsOpts& o) {
  SweepConfig cfg;
  cfg.base = make_urn(o.m, o.n, o.omega);
  if (o.sweep == "omega2") {
    cfg.param = SweepConfig::Param::kOmega2;
  } else if (o.sweep == "n") {
    cfg.param = SweepConfig::Param::kDraws;
  } else if (o.sweep == "m2") {
    cfg.param = SweepConfig::Param::kM2;
  } else {
    throw std::invalid_argument("--sweep must be omega2, n, or m2");
  }
  cfg.grid = o.grid;
  cfg.samples_per_arm = o.samples;
  cfg.tau = o.tau;
  cfg.seed = o.seed;

  const SweepResult result = ks_sensitivity_sweep(cfg);
  const std::string param_name = to_string(cfg.param);

  std::vector<std::vector<std::string>> rows;
  for (const SweepRow& r : result.rows) {
    rows.push_back({param_name, format_double(r.sweep_value),
                    std::to_string(r.class_index + 1),
                    format_double(r.statistic), format_double(r.p_raw),
                    format_double(r.p_adjusted), std::to_string(r.n_samples),
                    std::to_string(r.seed)});
  }
  write_table(o.out, "csv",
              {"sweep_param", "sweep_value", "class", "D", "p_raw",
               "p_adjusted", "n_samples", "seed"},
              rows);

  const std::string hist_path =
      o.hist_out.empty() ? o.out + ".hist.csv" : o.hist_out;
  std::vector<std::vector<std::string>> hist_rows;
  for (const SweepHistogramRow& h : result.histograms) {
    hist_rows.push_back({param_name, format_double(h.sweep_value),
                         std::to_string(h.class_index + 1),
                         std::to_string(h.count_value),
                         std::to_string(h.freq_differentiable),
                         std::to_string(h.freq_exact)});
  }
  write_table(hist_path, "csv",
              {"sweep_param", "sweep_value", "class", "count_value",
               "freq_differentiable", "freq_exact"},
              hist_rows);

  const json meta{{"subcommand", "kstest"},
                  {"m", o.m},
                  {"n", o.n},
                  {"omega", o.omega},
                  {"sweep", o.sweep},
                  {"grid", o.grid},
                  {"samples", o.samples},
                  {"tau", o.tau},
                  {"seed", o.seed},
                  {"threshold", o.threshold},
                  {"assert", o.assert_pass},
                  {"out", o.out},
                  {"hist_out", hist_path}};
  write_meta(o.out, meta);
  write_meta(hist_path, meta);

  if (o.assert_pass) {
    for (const SweepRow& r : result.rows) {
      if (!(r.p_adjusted > o.threshold)) {
        std::cerr << "kstest: corrected p = " << format_double(r.p_adjusted)
                  << " <= " << format_double(o.threshold) << " at "
                  << param_name << " = " << format_double(r.sweep_value)
                  << ", class " << (r.class_index + 1) << "\n";
        return 1;
      }
    }
  }
  return 0;
}

// ---- fit ------------------------------------------------------------------

struct FitOpts {
  std::vector<std::int64_t> m;
  std::int64_t n = 0;
  std::vector<double> omega_gt;
  std::string data;
  std::int64_t train = 800;
  std::int64_t val = 200;
  FitConfig cfg;
  std::vector<double> init_omega;
  std::string out;
};

std::vector<DrawVector> load_dataset_csv(const std::string& path,
                                         std::size_t num_classes) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("--data: cannot open " + path);
  std::vector<DrawVector> rows;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (first) {  // header line
      first = false;
      continue;
    }
    DrawVector x;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) x.push_back(std::stoll(cell));
    if (x.size() != num_classes) {
      throw std::invalid_argument("--data: row width differs from class count");
    }
    rows.push_back(std::move(x));
  }
  return rows;
}

int cmd_fit(const FitOpts& o) {
  const std::size_t c = o.m.size();
  if (o.train < 1 || o.val < 0) {
    throw std::invalid_argument("--train must be >= 1 and --val >= 0");
  }
  FitConfig cfg = o.cfg;
  if (!o.init_omega.empty()) {
    cfg.init_log_weights.clear();
    for (double w : o.init_omega) {
      if (!(w > 0.0)) throw std::invalid_argument("--init-omega must be > 0");
      cfg.init_log_weights.push_back(std::log(w));
    }
  }
  cfg.validate(c);

  std::vector<DrawVector> dataset;
  if (!o.data.empty()) {
    dataset = load_dataset_csv(o.data, c);
  } else if (!o.omega_gt.empty()) {
    const UrnSpec gt = make_urn(o.m, o.n, o.omega_gt);
    Pcg32 data_rng(cfg.seed, 100);
    dataset = generate_dataset(gt, o.train + o.val, data_rng);
  } else {
    throw std::invalid_argument("fit needs either --omega-gt or --data");
  }
  if (std::ssize(dataset) < o.train + o.val) {
    throw std::invalid_argument("dataset smaller than --train + --val");
  }
  const std::vector<DrawVector> train(dataset.begin(),
                                      dataset.begin() + o.train);
  const std::vector<DrawVector> val(dataset.begin() + o.train,
                                    dataset.begin() + o.train + o.val);

  const FitTrace trace = fit_omega(train, val, o.m, o.n, cfg);

  std::vector<std::string> header{"step", "epoch", "train_loss", "tau"};
  for (std::size_t i = 0; i < c; ++i) {
    header.push_back("log_w_" + std::to_string(i + 1));
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < trace.step.size(); ++k) {
    std::vector<std::string> row{
        std::to_string(trace.step[k]), std::to_string(trace.epoch[k]),
        format_double(trace.train_loss[k]), format_double(trace.tau[k])};
    for (double lw : trace.log_weights[k]) row.push_back(format_double(lw));
    rows.push_back(std::move(row));
  }
  write_table(o.out, "csv", header, rows);

  UrnSpec fitted{o.m, o.n, trace.final_log_weights()};
  Pcg32 count_rng(cfg.seed, 200);
  const std::vector<double> fitted_means =
      expected_counts(fitted, 2000, count_rng);

  const json config{{"subcommand", "fit"},
                    {"m", o.m},
                    {"n", o.n},
                    {"omega_gt", o.omega_gt},
                    {"data", o.data},
                    {"train", o.train},
                    {"val", o.val},
                    {"epochs", cfg.epochs},
                    {"batch", cfg.batch_size},
                    {"lr", cfg.learning_rate},
                    {"tau_init", cfg.tau_init},
                    {"tau_final", cfg.tau_final},
                    {"anneal_steps", cfg.anneal_steps},
                    {"max_update_norm", cfg.max_update_norm},
                    {"init_log_weights", cfg.init_log_weights},
                    {"seed", cfg.seed},
                    {"out", o.out}};
  json summary{{"config", config},
               {"final_log_weights", trace.final_log_weights()},
               {"val_loss", trace.val_loss},
               {"final_val_loss", trace.val_loss.back()},
               {"expected_counts", fitted_means},
               {"steps", trace.step.back()}};
  write_text_atomic(o.out + ".summary.json", summary.dump(2) + "\n");
  write_meta(o.out, config);
  return 0;
}

// ---- oracle-check ----------------------------------------------------------

struct OracleOpts {
  double tol = 1e-10;
  std::uint64_t seed = 0;
};

int cmd_oracle_check(const OracleOpts& o) {
  if (!(o.tol > 0.0)) throw std::invalid_argument("--tol must be > 0");
  bool all_pass = true;
  auto report = [&](const std::string& name, bool pass,
                    const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << "  " << name << "  " << detail
              << "\n";
    all_pass = all_pass && pass;
  };

  std::vector<UrnSpec> urns{
      {{3, 5, 4}, 5, {0.0, 0.0, 0.0}},
      {{3, 5, 4}, 5, {0.0, std::log(2.0), std::log(4.0)}},
      {{6, 6}, 4, {0.0, std::log(3.0)}},
      {{2, 3, 4, 5}, 7, {std::log(0.5), 0.0, std::log(1.5), std::log(2.5)}},
  };
  Pcg32 rng(o.seed, 0);
  for (int k = 0; k < 8; ++k) {
    const std::size_t c = 2 + rng.next_below(3);
    std::vector<std::int64_t> m(c);
    std::vector<double> lw(c);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < c; ++i) {
      m[i] = 1 + static_cast<std::int64_t>(rng.next_below(8));
      lw[i] = std::log(0.2 + 4.8 * rng.next_double());
      total += m[i];
    }
    const std::int64_t n = 1 + static_cast<std::int64_t>(
                                   rng.next_below(static_cast<std::uint64_t>(total)));
    urns.push_back({m, n, lw});
  }

  for (std::size_t u = 0; u < urns.size(); ++u) {
    const JointPmfTable table = joint_pmf_table(urns[u]);
    const double sum_joint = std::exp(log_sum_exp(table.log_joint));
    const double sum_chain = std::exp(log_sum_exp(table.log_chain));
    report("normalization joint urn " + std::to_string(u),
           std::abs(sum_joint - 1.0) <= o.tol,
           "sum = " + format_double(sum_joint));
    report("normalization chain urn " + std::to_string(u),
           std::abs(sum_chain - 1.0) <= o.tol,
           "sum = " + format_double(sum_chain));

    bool uniform = true;
    for (double lw : urns[u].log_weights) {
      uniform = uniform && std::abs(lw - urns[u].log_weights[0]) == 0.0;
    }
    double max_gap = 0.0;
    double tv = 0.0;
    for (std::size_t k = 0; k < table.support.size(); ++k) {
      max_gap = std::max(max_gap,
                         std::abs(table.log_joint[k] - table.log_chain[k]));
      tv += 0.5 * std::abs(std::exp(table.log_joint[k]) -
                           std::exp(table.log_chain[k]));
    }
    if (uniform || urns[u].num_classes() == 2) {
      report("chain equals joint urn " + std::to_string(u), max_gap <= o.tol,
             "max |log gap| = " + format_double(max_gap));
    } else {
      std::cout << "INFO  merge-bias TV gap urn " << u << "  tv = "
                << format_double(tv) << "\n";
    }
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Differentiable multivariate Fisher noncentral hypergeometric toolkit"};
  app.require_subcommand(1);

  SampleOpts so;
  CLI::App* sample = app.add_subcommand("sample", "Draw urn samples");
  sample->add_option("--m", so.m, "Class counts")->delimiter(',')->required();
  sample->add_option("--n", so.n, "Number of draws")->required();
  sample->add_option("--omega", so.omega, "Class weights")->delimiter(',')->required();
  sample->add_option("--mode", so.mode, "exact | differentiable")
      ->check(CLI::IsMember({"exact", "differentiable"}));
  sample->add_option("--count", so.count, "Number of draws to emit");
  sample->add_option("--seed", so.seed, "RNG seed");
  sample->add_option("--tau", so.tau, "Relaxation temperature");
  sample->add_option("--out", so.out, "Output path")->required();
  sample->add_option("--format", so.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  PmfOpts po;
  CLI::App* pmf = app.add_subcommand("pmf", "Tabulate joint and chain log-PMFs");
  pmf->add_option("--m", po.m, "Class counts")->delimiter(',')->required();
  pmf->add_option("--n", po.n, "Number of draws")->required();
  pmf->add_option("--omega", po.omega, "Class weights")->delimiter(',')->required();
  pmf->add_option("--out", po.out, "Output path")->required();
  pmf->add_option("--format", po.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  KsOpts ko;
  CLI::App* kstest = app.add_subcommand("kstest", "KS sensitivity sweep");
  kstest->add_option("--m", ko.m, "Class counts")->delimiter(',')->required();
  kstest->add_option("--n", ko.n, "Number of draws")->required();
  kstest->add_option("--omega", ko.omega, "Class weights")->delimiter(',')->required();
  kstest->add_option("--sweep", ko.sweep, "omega2 | n | m2")
      ->check(CLI::IsMember({"omega2", "n", "m2"}));
  kstest->add_option("--grid", ko.grid, "Sweep grid values")->delimiter(',')->required();
  kstest->add_option("--samples", ko.samples, "Samples per arm");
  kstest->add_option("--tau", ko.tau, "Relaxation temperature");
  kstest->add_option("--seed", ko.seed, "RNG seed");
  kstest->add_option("--threshold", ko.threshold, "Significance threshold");
  kstest->add_flag("--assert", ko.assert_pass,
                   "Exit 1 unless every corrected p exceeds the threshold");
  kstest->add_option("--out", ko.out, "Result table path")->required();
  kstest->add_option("--hist-out", ko.hist_out,
                     "Histogram path (default <out>.hist.csv)");

  FitOpts fo;
  CLI::App* fit = app.add_subcommand("fit", "Recover log weights by SGD");
  fit->add_option("--m", fo.m, "Class counts")->delimiter(',')->required();
  fit->add_option("--n", fo.n, "Number of draws")->required();
  fit->add_option("--omega-gt", fo.omega_gt, "Ground-truth weights for dataset generation")
      ->delimiter(',');
  fit->add_option("--data", fo.data, "Dataset CSV (header + one count row per draw)");
  fit->add_option("--train", fo.train, "Training rows");
  fit->add_option("--val", fo.val, "Validation rows");
  fit->add_option("--epochs", fo.cfg.epochs, "Epochs");
  fit->add_option("--batch", fo.cfg.batch_size, "Minibatch size");
  fit->add_option("--lr", fo.cfg.learning_rate, "Learning rate");
  fit->add_option("--tau-init", fo.cfg.tau_init, "Initial temperature");
  fit->add_option("--tau-final", fo.cfg.tau_final, "Final temperature");
  fit->add_option("--anneal-steps", fo.cfg.anneal_steps, "Anneal steps");
  fit->add_option("--init-omega", fo.init_omega, "Initial weights (default all 1)")
      ->delimiter(',');
  fit->add_option("--seed", fo.cfg.seed, "RNG seed");
  fit->add_option("--out", fo.out, "Trace CSV path")->required();

  OracleOpts oo;
  CLI::App* oracle = app.add_subcommand("oracle-check", "Brute-force PMF cross-checks");
  oracle->add_option("--tol", oo.tol, "Absolute tolerance");
  oracle->add_option("--seed", oo.seed, "RNG seed for random urns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) return cmd_sample(so);
    if (pmf->parsed()) return cmd_pmf(po);
    if (kstest->parsed()) return cmd_kstest(ko);
    if (fit->parsed()) return cmd_fit(fo);
    if (oracle->parsed()) return cmd_oracle_check(oo);
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace dhyper
