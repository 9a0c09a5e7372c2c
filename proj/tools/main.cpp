#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "divsamp/error.hpp"
#include "divsamp/eval.hpp"
#include "divsamp/feature_io.hpp"
#include "reference_io.hpp"

namespace {

using namespace divsamp;
using namespace divsamp::cli;

FeatureFormat parse_format(const std::string& name) {
  if (name == "auto") return FeatureFormat::kAuto;
  if (name == "binary") return FeatureFormat::kBinary;
  if (name == "csv") return FeatureFormat::kCsv;
  throw Error(ErrorCode::kInvalidConfig, "unknown format '" + name + "'");
}

// Writes to `path`, or standard output for "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  fn(out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, path + ": " + e.what());
  }
}

struct SamplerFlags {
  std::string algo = "online-diverse";
  std::size_t k = 10;
  double beta = 0.5;
  std::size_t proj_dim = 3;
  double noise = 0.05;
  std::uint64_t seed = 0;
  double scale = 10.0;
  std::string cost = "algorithm";
  std::string swap_basis = "per-frame";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--k", k, "Number of exemplars")->capture_default_str();
    cmd.add_option("--beta", beta, "Distance vs diversity trade-off in [0, 1]")->capture_default_str();
    cmd.add_option("--proj-dim", proj_dim, "Projection dimension for the hull volume (2 or 3)")
        ->capture_default_str();
    cmd.add_option("--noise", noise, "Probability of replacing the winner on a rejected frame")
        ->capture_default_str();
    cmd.add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd.add_option("--norm-scale", scale, "Normalizing factor C = scale * frame index")->capture_default_str();
    cmd.add_option("--cost", cost, "Winner cost: algorithm | equation")->capture_default_str();
    cmd.add_option("--swap-basis", swap_basis, "Projection for swap scoring: per-frame | per-swap")
        ->capture_default_str();
  }

  SamplerConfig config() const {
    SamplerConfig c;
    c.k = k;
    c.beta = beta;
    c.projection_dim = proj_dim;
    c.noise_rate = noise;
    c.seed = seed;
    c.norm_factor_scale = scale;
    if (cost == "algorithm") {
      c.cost_form = CostForm::kAlgorithm;
    } else if (cost == "equation") {
      c.cost_form = CostForm::kEquation;
    } else {
      throw Error(ErrorCode::kInvalidConfig, "unknown cost form '" + cost + "'");
    }
    if (swap_basis == "per-frame") {
      c.swap_basis = SwapBasis::kPerFrame;
    } else if (swap_basis == "per-swap") {
      c.swap_basis = SwapBasis::kPerSwap;
    } else {
      throw Error(ErrorCode::kInvalidConfig, "unknown swap basis '" + swap_basis + "'");
    }
    return c;
  }
};

struct InputFlags {
  std::string format = "auto";
  bool csv_header = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--format", format, "Feature input format: auto | binary | csv")->capture_default_str();
    cmd.add_flag("--csv-header", csv_header, "Skip the first CSV line");
  }
  ReaderOptions options() const { return {parse_format(format), csv_header}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming diverse exemplar selection over feature-vector streams"};
  app.require_subcommand(1);

  // summarize
  auto* summarize_cmd = app.add_subcommand("summarize", "Select k exemplars from a feature stream");
  SamplerFlags summ_flags;
  InputFlags summ_input;
  std::string summ_in = "-", summ_out = "-", diversity = "hull";
  std::size_t max_iters = 100;
  std::optional<double> summ_gamma;
  summarize_cmd->add_option("--algo", summ_flags.algo,
                            "online-diverse | online-kmedoids | precis | kmedoids | random | uniform")
      ->capture_default_str();
  summ_flags.add_to(*summarize_cmd);
  summ_input.add_to(*summarize_cmd);
  summarize_cmd->add_option("--max-iters", max_iters, "Swap iterations for batch searches")->capture_default_str();
  summarize_cmd->add_option("--diversity", diversity, "Precis diversity: hull | variance")->capture_default_str();
  summarize_cmd->add_option("--gamma", summ_gamma, "Also report exemplars deduplicated at this distance");
  summarize_cmd->add_option("-i,--input", summ_in, "Feature file (FSTRM1 or CSV), - for stdin")->capture_default_str();
  summarize_cmd->add_option("-o,--output", summ_out, "Summary JSON path, - for stdout")->capture_default_str();

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a summary against user reference summaries");
  std::string eval_summary, eval_features, eval_out = "-", eval_csv;
  std::vector<std::string> eval_refs;
  double eval_gamma = 70.0;
  InputFlags eval_input;
  evaluate_cmd->add_option("--summary", eval_summary, "Summary JSON from summarize")->required();
  evaluate_cmd->add_option("--reference", eval_refs, "Reference summary JSON (repeatable)")->required();
  evaluate_cmd->add_option("--features", eval_features, "Feature file the summary indexes into")->required();
  evaluate_cmd->add_option("--gamma", eval_gamma, "Dedup and match distance threshold")->capture_default_str();
  evaluate_cmd->add_option("-o,--output", eval_out, "Report JSON path, - for stdout")->capture_default_str();
  evaluate_cmd->add_option("--csv", eval_csv, "Also write the per-user CSV here (- for stdout)");
  eval_input.add_to(*evaluate_cmd);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Time online and batch samplers on synthetic streams");
  BenchOptions bench_opts;
  std::vector<std::string> bench_algos{"online-diverse"};
  std::string bench_out = "-";
  bench_cmd->add_option("--n", bench_opts.ns, "Stream lengths")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--algo", bench_algos, "Algorithms")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--k", bench_opts.k)->capture_default_str();
  bench_cmd->add_option("--dim", bench_opts.dim, "Feature dimension")->capture_default_str();
  bench_cmd->add_option("--proj-dim", bench_opts.projection_dim)->capture_default_str();
  bench_cmd->add_option("--beta", bench_opts.beta)->capture_default_str();
  bench_cmd->add_option("--noise", bench_opts.noise_rate)->capture_default_str();
  bench_cmd->add_option("--seed", bench_opts.seed)->capture_default_str();
  bench_cmd->add_option("--repeats", bench_opts.repeats, "Runs per point; the median is reported")
      ->capture_default_str();
  bench_cmd->add_option("-o,--output", bench_out, "CSV path, - for stdout")->capture_default_str();

  // sweep-beta
  auto* sweep_cmd = app.add_subcommand("sweep-beta", "Mean match score as a function of beta");
  SweepOptions sweep_opts;
  SamplerFlags sweep_flags;
  InputFlags sweep_input;
  std::vector<std::string> sweep_refs;
  std::optional<std::string> sweep_features;
  std::string sweep_out = "-";
  sweep_cmd->add_option("--betas", sweep_opts.betas, "Beta values")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--trials", sweep_opts.trials, "Seeds per beta")->capture_default_str();
  sweep_flags.add_to(*sweep_cmd);
  sweep_input.add_to(*sweep_cmd);
  sweep_cmd->add_option("--features", sweep_features, "Feature file (omit for the synthetic benchmark)");
  sweep_cmd->add_option("--reference", sweep_refs, "Reference summary JSON (repeatable, with --features)");
  sweep_cmd->add_option("--gamma", sweep_opts.gamma, "Match threshold with --features")->capture_default_str();
  sweep_cmd->add_option("--synthetic-dim", sweep_opts.synthetic.dim)->capture_default_str();
  sweep_cmd->add_option("--synthetic-clusters", sweep_opts.synthetic.clusters)->capture_default_str();
  sweep_cmd->add_option("--synthetic-frames", sweep_opts.synthetic.frames_per_cluster, "Frames per cluster")
      ->capture_default_str();
  sweep_cmd->add_option("--synthetic-tail", sweep_opts.synthetic.tail_len, "Frozen tail length")
      ->capture_default_str();
  sweep_cmd->add_option("-o,--output", sweep_out, "CSV path, - for stdout")->capture_default_str();

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Write the synthetic frozen-tail benchmark to files");
  SkewBenchmarkConfig gen_cfg;
  std::string gen_out, gen_refs, gen_labels, gen_format = "binary";
  bool gen_unknown_count = false;
  gen_cmd->add_option("-o,--output", gen_out, "Feature file to write")->required();
  gen_cmd->add_option("--references", gen_refs, "Reference summaries JSON to write");
  gen_cmd->add_option("--labels", gen_labels, "Ground-truth cluster labels JSON to write");
  gen_cmd->add_option("--format", gen_format, "binary | csv")->capture_default_str();
  gen_cmd->add_flag("--count-unknown", gen_unknown_count, "Write count = 0 in the binary header");
  gen_cmd->add_option("--clusters", gen_cfg.clusters)->capture_default_str();
  gen_cmd->add_option("--frames-per-cluster", gen_cfg.frames_per_cluster)->capture_default_str();
  gen_cmd->add_option("--tail", gen_cfg.tail_len)->capture_default_str();
  gen_cmd->add_option("--dim", gen_cfg.dim)->capture_default_str();
  gen_cmd->add_option("--stddev", gen_cfg.stddev)->capture_default_str();
  gen_cmd->add_option("--separation", gen_cfg.separation)->capture_default_str();
  gen_cmd->add_option("--users", gen_cfg.users)->capture_default_str();
  gen_cmd->add_option("--seed", gen_cfg.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "divsamp: usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*summarize_cmd) {
      SummarizeOptions opts;
      opts.algo = parse_algorithm(summ_flags.algo);
      opts.sampler = summ_flags.config();
      opts.max_iters = max_iters;
      if (diversity == "hull") {
        opts.diversity = DiversityMeasure::kHullVolume;
      } else if (diversity == "variance") {
        opts.diversity = DiversityMeasure::kVariance;
      } else {
        throw Error(ErrorCode::kInvalidConfig, "unknown diversity measure '" + diversity + "'");
      }
      opts.gamma = summ_gamma;
      auto reader = FeatureReader::open(summ_in, summ_input.options());
      const SummaryRun run = summarize(opts, from_reader(reader));
      with_output(summ_out, [&](std::ostream& out) { out << summary_to_json(opts, run).dump() << '\n'; });
    } else if (*evaluate_cmd) {
      std::vector<ReferenceSummary> refs;
      for (const auto& path : eval_refs) {
        for (auto& r : load_references(path)) refs.push_back(std::move(r));
      }
      const auto indices = summary_indices(read_json(eval_summary));
      auto reader = FeatureReader::open(eval_features, eval_input.options());
      const Evaluation eval = evaluate(indices, from_reader(reader), std::move(refs), eval_gamma);
      with_output(eval_out, [&](std::ostream& out) { out << evaluation_to_json(eval).dump() << '\n'; });
      if (!eval_csv.empty()) {
        with_output(eval_csv, [&](std::ostream& out) { write_evaluation_csv(out, eval); });
      }
    } else if (*bench_cmd) {
      bench_opts.algos.clear();
      for (const auto& name : bench_algos) bench_opts.algos.push_back(parse_algorithm(name));
      const auto rows = run_bench(bench_opts);
      with_output(bench_out, [&](std::ostream& out) { write_bench_csv(out, rows); });
    } else if (*sweep_cmd) {
      sweep_opts.sampler = sweep_flags.config();
      sweep_opts.sampler.validate();
      sweep_opts.synthetic.seed = sweep_flags.seed;
      if (sweep_features) {
        sweep_opts.features_path = sweep_features;
        sweep_opts.reader = sweep_input.options();
        for (const auto& path : sweep_refs) {
          for (auto& r : load_references(path)) sweep_opts.references.push_back(std::move(r));
        }
      }
      const auto rows = run_sweep(sweep_opts);
      with_output(sweep_out, [&](std::ostream& out) { write_sweep_csv(out, rows); });
    } else if (*gen_cmd) {
      const SkewBenchmark bench = make_skew_benchmark(gen_cfg);
      if (gen_format == "binary") {
        with_output(gen_out, [&](std::ostream& out) { write_binary(out, bench.frames, !gen_unknown_count); });
      } else if (gen_format == "csv") {
        with_output(gen_out, [&](std::ostream& out) { write_csv(out, bench.frames); });
      } else {
        throw Error(ErrorCode::kInvalidConfig, "unknown format '" + gen_format + "'");
      }
      if (!gen_refs.empty()) save_references(gen_refs, bench.references);
      if (!gen_labels.empty()) {
        with_output(gen_labels, [&](std::ostream& out) {
          out << nlohmann::json{{"labels", bench.labels}, {"frozen_begin", bench.frozen_begin},
                                {"gamma", bench.gamma}}
                     .dump()
              << '\n';
        });
      }
    }
  } catch (const Error& e) {
    std::cerr << "divsamp: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "divsamp: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
