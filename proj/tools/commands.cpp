#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

#include "divsamp/error.hpp"
#include "divsamp/sampler.hpp"

namespace divsamp::cli {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<FeatureVector> drain(FrameSource& source) {
  std::vector<FeatureVector> frames;
  while (auto f = source.next()) frames.push_back(std::move(*f));
  return frames;
}

const char* cost_name(CostForm form) { return form == CostForm::kAlgorithm ? "algorithm" : "equation"; }
const char* basis_name(SwapBasis b) { return b == SwapBasis::kPerFrame ? "per-frame" : "per-swap"; }
const char* diversity_name(DiversityMeasure m) {
  return m == DiversityMeasure::kHullVolume ? "hull" : "variance";
}

SummaryRun run_online(const SummarizeOptions& options, FrameSource& source) {
  SamplerState state(options.sampler);
  while (auto frame = source.next()) {
    if (options.algo == Algorithm::kOnlineDiverse) {
      state.observe(*frame);
    } else {
      state.observe_kmedoids(*frame);
    }
  }
  SummaryResult result = state.finalize();
  SummaryRun run;
  run.frames_seen = result.frames_seen;
  run.peak_stored_vectors = result.peak_stored_vectors;
  run.diversity_trace = std::move(result.diversity_trace);
  std::vector<std::size_t> order(result.exemplar_indices.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return result.exemplar_indices[a] < result.exemplar_indices[b]; });
  for (auto i : order) {
    run.exemplar_indices.push_back(result.exemplar_indices[i]);
    run.exemplar_vectors.push_back(std::move(result.exemplar_vectors[i]));
  }
  return run;
}

SummaryRun run_batch(const SummarizeOptions& options, FrameSource& source) {
  SummaryRun run;
  std::vector<std::size_t> chosen;
  std::vector<FeatureVector> frames;
  if (options.algo == Algorithm::kRandom || options.algo == Algorithm::kUniform) {
    if (!source.declared_count) {
      throw Error(ErrorCode::kInvalidConfig, std::string(to_string(options.algo)) +
                                                 " sampling needs the frame count up front "
                                                 "(binary input with count > 0)");
    }
    const auto n = static_cast<std::size_t>(*source.declared_count);
    chosen = options.algo == Algorithm::kRandom ? random_sample(n, options.sampler.k, options.sampler.seed)
                                                : uniform_sample(n, options.sampler.k);
    std::sort(chosen.begin(), chosen.end());
    // One pass to validate the payload and pick up the chosen vectors.
    std::size_t next = 0;
    std::optional<std::size_t> dim;
    while (auto f = source.next()) {
      if (!dim) dim = f->values.size();
      validate_stream_item(*f, *dim);
      ++run.frames_seen;
      if (next < chosen.size() && f->index == chosen[next]) {
        run.exemplar_vectors.push_back(std::move(f->values));
        ++next;
      }
    }
    run.peak_stored_vectors = chosen.size() + 1;
  } else {
    frames = drain(source);
    if (!frames.empty()) {
      for (const auto& f : frames) validate_stream_item(f, frames.front().values.size());
    }
    run.frames_seen = frames.size();
    run.peak_stored_vectors = frames.size();
    std::vector<Vector> points;
    points.reserve(frames.size());
    for (auto& f : frames) points.push_back(std::move(f.values));
    BatchConfig cfg;
    cfg.k = options.sampler.k;
    cfg.max_iters = options.max_iters;
    cfg.beta = options.sampler.beta;
    cfg.projection_dim = options.sampler.projection_dim;
    cfg.seed = options.sampler.seed;
    cfg.norm_factor_scale = options.sampler.norm_factor_scale;
    cfg.diversity = options.diversity;
    const BatchResult result =
        options.algo == Algorithm::kPrecis ? batch_precis(points, cfg) : batch_kmedoids(points, cfg);
    chosen = result.indices;
    std::sort(chosen.begin(), chosen.end());
    for (auto i : chosen) run.exemplar_vectors.push_back(points[i]);
    run.objective_trace = result.objective_trace;
  }
  run.exemplar_indices.assign(chosen.begin(), chosen.end());
  return run;
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "online-diverse") return Algorithm::kOnlineDiverse;
  if (name == "online-kmedoids") return Algorithm::kOnlineKMedoids;
  if (name == "precis") return Algorithm::kPrecis;
  if (name == "kmedoids") return Algorithm::kKMedoids;
  if (name == "random") return Algorithm::kRandom;
  if (name == "uniform") return Algorithm::kUniform;
  throw Error(ErrorCode::kInvalidConfig, "unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kOnlineDiverse: return "online-diverse";
    case Algorithm::kOnlineKMedoids: return "online-kmedoids";
    case Algorithm::kPrecis: return "precis";
    case Algorithm::kKMedoids: return "kmedoids";
    case Algorithm::kRandom: return "random";
    case Algorithm::kUniform: return "uniform";
  }
  return "?";
}

bool is_online(Algorithm algo) {
  return algo == Algorithm::kOnlineDiverse || algo == Algorithm::kOnlineKMedoids;
}

FrameSource from_reader(FeatureReader& reader) {
  return {[&reader] { return reader.next(); }, reader.declared_count()};
}

FrameSource from_frames(const std::vector<FeatureVector>& frames) {
  return {[&frames, i = std::size_t{0}]() mutable -> std::optional<FeatureVector> {
            if (i == frames.size()) return std::nullopt;
            return frames[i++];
          },
          frames.size()};
}

SummaryRun summarize(const SummarizeOptions& options, FrameSource source) {
  options.sampler.validate();
  if (options.gamma && !(*options.gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "gamma must be positive");
  }
  const auto start = Clock::now();
  SummaryRun run = is_online(options.algo) ? run_online(options, source) : run_batch(options, source);
  if (options.gamma) {
    std::vector<StreamIndex> kept;
    for (auto pos : dedup(run.exemplar_vectors, *options.gamma)) kept.push_back(run.exemplar_indices[pos]);
    run.deduplicated_indices = std::move(kept);
  }
  run.wall_time_ms = elapsed_ms(start);
  return run;
}

nlohmann::json summary_to_json(const SummarizeOptions& options, const SummaryRun& run) {
  const auto& s = options.sampler;
  nlohmann::json config = {
      {"k", s.k},
      {"beta", s.beta},
      {"proj_dim", s.projection_dim},
      {"noise", s.noise_rate},
      {"seed", s.seed},
      {"norm_factor_scale", s.norm_factor_scale},
  };
  if (options.algo == Algorithm::kOnlineDiverse) {
    config["cost"] = cost_name(s.cost_form);
    config["swap_basis"] = basis_name(s.swap_basis);
  }
  if (options.algo == Algorithm::kPrecis || options.algo == Algorithm::kKMedoids) {
    config["max_iters"] = options.max_iters;
  }
  if (options.algo == Algorithm::kPrecis) config["diversity"] = diversity_name(options.diversity);
  if (options.gamma) config["gamma"] = *options.gamma;

  nlohmann::json trace = nlohmann::json::array();
  for (const auto& p : run.diversity_trace) trace.push_back({p.frame, p.zeta});

  nlohmann::json doc = {
      {"algo", to_string(options.algo)},
      {"config", config},
      {"exemplar_indices", run.exemplar_indices},
      {"diversity_trace", trace},
      {"frames_seen", run.frames_seen},
      {"wall_time_ms", run.wall_time_ms},
      {"peak_stored_vectors", run.peak_stored_vectors},
  };
  if (options.algo == Algorithm::kPrecis || options.algo == Algorithm::kKMedoids) {
    doc["objective_trace"] = run.objective_trace;
  }
  if (run.deduplicated_indices) doc["deduplicated_indices"] = *run.deduplicated_indices;
  return doc;
}

std::vector<StreamIndex> summary_indices(const nlohmann::json& summary) {
  try {
    return summary.at("exemplar_indices").get<std::vector<StreamIndex>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed summary: ") + e.what());
  }
}

Evaluation evaluate(std::vector<StreamIndex> indices, FrameSource features,
                    std::vector<ReferenceSummary> references, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidConfig, "gamma must be positive");
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());

  std::vector<Vector> generated;
  generated.reserve(indices.size());
  std::size_t next = 0;
  while (next < indices.size()) {
    auto f = features.next();
    if (!f) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "summary index " + std::to_string(indices[next]) + " is past the end of the features");
    }
    if (f->index == indices[next]) {
      generated.push_back(std::move(f->values));
      ++next;
    }
  }

  Evaluation eval;
  eval.generated_indices = std::move(indices);
  eval.gamma = gamma;
  eval.report = evaluate_summary(generated, references, gamma);
  std::vector<std::size_t> lengths;
  for (const auto& r : references) lengths.push_back(r.frame_indices.size());
  eval.suggested_k = lengths.empty() ? 0 : choose_k(lengths);
  eval.references = std::move(references);
  return eval;
}

nlohmann::json evaluation_to_json(const Evaluation& eval) {
  nlohmann::json users = nlohmann::json::array();
  for (std::size_t u = 0; u < eval.references.size(); ++u) {
    const auto& m = eval.report.per_user[u];
    users.push_back({{"user_id", eval.references[u].user_id},
                     {"score", m.score},
                     {"matches", m.matched_pairs.size()},
                     {"reference_length", eval.references[u].frame_indices.size()}});
  }
  std::vector<StreamIndex> retained;
  for (auto pos : eval.report.retained) retained.push_back(eval.generated_indices[pos]);
  return {{"gamma", eval.gamma},
          {"generated_indices", eval.generated_indices},
          {"retained_indices", retained},
          {"users", users},
          {"mean_score", eval.report.mean_score},
          {"suggested_k", eval.suggested_k}};
}

void write_evaluation_csv(std::ostream& out, const Evaluation& eval) {
  out << "user,score,matches,reference_length\n";
  out << std::setprecision(6) << std::fixed;
  std::size_t total_matches = 0, total_len = 0;
  for (std::size_t u = 0; u < eval.references.size(); ++u) {
    const auto& m = eval.report.per_user[u];
    const auto len = eval.references[u].frame_indices.size();
    total_matches += m.matched_pairs.size();
    total_len += len;
    out << eval.references[u].user_id << ',' << m.score << ',' << m.matched_pairs.size() << ',' << len << '\n';
  }
  out << "mean," << eval.report.mean_score << ',' << total_matches << ',' << total_len << '\n';
  out.unsetf(std::ios::floatfield);
}

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  if (options.repeats == 0) throw Error(ErrorCode::kInvalidConfig, "repeats must be at least 1");
  if (options.dim < options.projection_dim) {
    throw Error(ErrorCode::kInvalidConfig, "dim must be at least the projection dimension");
  }
  constexpr std::size_t kClusters = 10;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  std::vector<Vector> centers(kClusters, Vector(options.dim));
  for (auto& c : centers) {
    for (auto& x : c) x = 10.0 * normal(rng);
  }

  std::vector<BenchRow> rows;
  for (const Algorithm algo : options.algos) {
    for (const std::uint64_t n : options.ns) {
      std::vector<ClusterSpec> specs;
      for (std::size_t c = 0; c < kClusters; ++c) {
        const std::uint64_t share = n / kClusters + (c < n % kClusters ? 1 : 0);
        specs.push_back({centers[c], 1.0, static_cast<std::size_t>(share)});
      }
      SummarizeOptions summ;
      summ.algo = algo;
      summ.sampler.k = options.k;
      summ.sampler.beta = options.beta;
      summ.sampler.projection_dim = options.projection_dim;
      summ.sampler.noise_rate = options.noise_rate;
      summ.sampler.seed = options.seed;
      summ.sampler.record_history = false;

      std::vector<double> times;
      BenchRow row;
      row.algo = algo;
      row.n = n;
      for (std::size_t r = 0; r < options.repeats; ++r) {
        MixtureStream stream(specs, options.seed + 1);
        FrameSource source{[&stream]() -> std::optional<FeatureVector> {
                             if (stream.done()) return std::nullopt;
                             return stream.next().first;
                           },
                           n};
        const SummaryRun run = summarize(summ, std::move(source));
        times.push_back(run.wall_time_ms);
        row.peak_stored_vectors = run.peak_stored_vectors;
      }
      std::sort(times.begin(), times.end());
      row.wall_ms = times[times.size() / 2];
      row.frames_per_sec = row.wall_ms > 0.0 ? static_cast<double>(n) / (row.wall_ms / 1000.0) : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "algo,n,wall_ms,frames_per_sec,peak_stored_vectors\n";
  for (const auto& r : rows) {
    out << to_string(r.algo) << ',' << r.n << ',' << std::fixed << std::setprecision(3) << r.wall_ms << ','
        << std::setprecision(1) << r.frames_per_sec << ',' << r.peak_stored_vectors << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

std::vector<SweepRow> run_sweep(const SweepOptions& options) {
  if (options.trials == 0) throw Error(ErrorCode::kInvalidConfig, "trials must be at least 1");
  for (double b : options.betas) {
    if (!(b >= 0.0 && b <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "beta values must lie in [0, 1]");
  }
  std::vector<SkewBenchmark> benches;
  if (!options.features_path) {
    for (std::size_t t = 0; t < options.trials; ++t) {
      SkewBenchmarkConfig cfg = options.synthetic;
      cfg.seed = options.synthetic.seed + t;
      benches.push_back(make_skew_benchmark(cfg));
    }
  } else if (options.references.empty()) {
    throw Error(ErrorCode::kEmptyReferenceSet, "file-mode sweep needs reference summaries");
  }

  std::vector<SweepRow> rows;
  for (double beta : options.betas) {
    SweepRow row;
    row.beta = beta;
    double total = 0.0;
    for (std::size_t t = 0; t < options.trials; ++t) {
      SummarizeOptions summ;
      summ.sampler = options.sampler;
      summ.sampler.beta = beta;
      summ.sampler.seed = options.sampler.seed + t;
      summ.sampler.record_history = false;
      double score = 0.0;
      if (options.features_path) {
        auto reader = FeatureReader::open(*options.features_path, options.reader);
        const SummaryRun run = summarize(summ, from_reader(reader));
        auto again = FeatureReader::open(*options.features_path, options.reader);
        score = evaluate(run.exemplar_indices, from_reader(again), options.references, options.gamma)
                    .report.mean_score;
      } else {
        const auto& bench = benches[t];
        const SummaryRun run = summarize(summ, from_frames(bench.frames));
        score = evaluate(run.exemplar_indices, from_frames(bench.frames), bench.references, bench.gamma)
                    .report.mean_score;
      }
      total += score;
      ++row.runs;
    }
    row.mean_score = total / static_cast<double>(row.runs);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "beta,mean_score,runs\n";
  for (const auto& r : rows) {
    out << std::setprecision(17) << r.beta << ',' << r.mean_score << ',' << r.runs << '\n';
  }
}

int exit_code_for(const Error& error) { return is_io_error(error.code()) ? 3 : 2; }

}  // namespace divsamp::cli
