// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "divsamp/batch.hpp"
#include "divsamp/eval.hpp"
#include "divsamp/feature_io.hpp"
#include "divsamp/geometry.hpp"
#include "divsamp/sampler.hpp"
#include "oracles.hpp"

namespace {

using namespace divsamp;
using oracle::Points;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// 1. Hull volume against the Monte Carlo membership oracle.
Verdict hull_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> count(4, 12);
  double worst2 = 0.0, worst3 = 0.0;
  std::size_t fail2 = 0, fail3 = 0;
  for (int set = 0; set < 100; ++set) {
    for (std::size_t d : {2u, 3u}) {
      const Points pts = oracle::random_points(rng, count(rng), d);
      const double exact = hull_volume(pts);
      const double mc = oracle::monte_carlo_hull_volume(pts, 1'000'000, 1000 + set);
      const double rel = std::abs(exact - mc) / mc;
      if (d == 2) {
        worst2 = std::max(worst2, rel);
        fail2 += rel > 0.02;
      } else {
        worst3 = std::max(worst3, rel);
        fail3 += rel > 0.05;
      }
    }
  }
  const Points square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Points tet{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const double sq_err = std::abs(hull_volume(square) - 1.0);
  const double tet_err = std::abs(hull_volume(tet) - 1.0 / 6.0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = fail2 == 0 && fail3 == 0 && sq_err <= 1e-12 && tet_err <= 1e-12 && secs < 60.0;
  return {pass, fmt("max rel err 2D %.4f (fails %zu), 3D %.4f (fails %zu); square err %.1e, "
                    "tetrahedron err %.1e; %.1f s",
                    worst2, fail2, worst3, fail3, sq_err, tet_err, secs)};
}

// 2. beta = 1 winner equals the nearest exemplar.
Verdict beta_one_reduction() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> kdist(4, 15), ddist(3, 20);
  std::uniform_int_distribution<std::uint64_t> frame(4, 1'000'000);
  SamplerConfig config;
  config.beta = 1.0;
  std::size_t agree = 0;
  const std::size_t pairs = 1000;
  for (std::size_t t = 0; t < pairs; ++t) {
    const std::size_t k = kdist(rng), dim = ddist(rng);
    ExemplarSet set;
    set.exemplars = oracle::random_points(rng, k, dim, -5.0, 5.0);
    for (std::size_t i = 0; i < k; ++i) set.source_indices.push_back(i);
    set.zeta = divscore(set.exemplars, config.projection_dim);
    const Vector x = oracle::random_points(rng, 1, dim, -6.0, 6.0).front();
    agree += select_diverse_winner(set, x, frame(rng), config).slot == nearest_exemplar(set, x);
  }
  return {agree == pairs, fmt("%zu / %zu winners agree", agree, pairs)};
}

LabeledStream random_stream(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<ClusterSpec> clusters(6);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    clusters[c].center.resize(16);
    for (auto& x : clusters[c].center) x = 8.0 * g(rng);
    clusters[c].stddev = 1.0 + c % 3;
    clusters[c].count = n / clusters.size();
  }
  return synth_mixture(clusters, seed % 2 ? StreamOrder::kShuffled : StreamOrder::kSequential, seed);
}

// 3. zeta strictly increases over accepted (diversity) updates.
Verdict zeta_monotonicity() {
  std::size_t violations = 0, checked = 0, noise_events = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto stream = random_stream(seed, 2000);
    for (double noise : {0.0, 0.05}) {
      SamplerConfig config;
      config.k = 10;
      config.noise_rate = noise;
      config.seed = seed;
      SamplerState state(config);
      for (const auto& f : stream.frames) state.observe(f);
      const auto result = state.finalize();
      double prev = -1.0;
      for (const auto& p : result.diversity_trace) {
        if (noise == 0.0 && p.reason == UpdateReason::kNoise) ++violations;
        if (p.reason == UpdateReason::kNoise) continue;
        ++checked;
        violations += !(p.zeta > prev);
        prev = p.zeta;
      }
      for (const auto& e : result.update_log) noise_events += e.outcome.reason == UpdateReason::kNoise;
    }
  }
  return {violations == 0, fmt("%zu violations over %zu trace points (%zu noise replacements seen)",
                               violations, checked, noise_events)};
}

std::vector<StreamIndex> run_online(const std::vector<FeatureVector>& frames, const SamplerConfig& config,
                                    bool kmedoids) {
  SamplerState state(config);
  for (const auto& f : frames) kmedoids ? state.observe_kmedoids(f) : state.observe(f);
  return state.finalize().exemplar_indices;
}

// 4. Frozen-tail skew: coverage of the diverse sampler versus online K-medoids.
Verdict frozen_tail_skew() {
  double diverse_sum = 0.0;
  std::size_t worst_frozen = 0, kmed_lower = 0;
  const std::size_t seeds = 20;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    SkewBenchmarkConfig bench;
    bench.seed = seed;
    const auto b = make_skew_benchmark(bench);
    SamplerConfig config;
    config.k = 10;
    config.beta = 0.5;
    config.projection_dim = 3;
    config.seed = seed;
    const auto diverse = run_online(b.frames, config, false);
    const auto kmed = run_online(b.frames, config, true);
    const double cov_d = cluster_coverage(diverse, b.labels);
    const double cov_k = cluster_coverage(kmed, b.labels);
    diverse_sum += cov_d;
    kmed_lower += cov_k < cov_d;
    const auto frozen = static_cast<std::size_t>(
        std::count_if(diverse.begin(), diverse.end(), [&](StreamIndex i) { return i >= b.frozen_begin; }));
    worst_frozen = std::max(worst_frozen, frozen);
  }
  const double mean = diverse_sum / seeds;
  const bool pass = mean >= 0.9 && worst_frozen <= 2 && kmed_lower * 10 >= seeds * 8;
  return {pass, fmt("mean coverage %.3f, max frozen exemplars %zu, K-medoids lower on %zu / %zu seeds", mean,
                    worst_frozen, kmed_lower, seeds)};
}

// 5. Score drop at beta = 1 on the skew benchmark.
Verdict beta_sweep() {
  cli::SweepOptions options;
  options.betas = {0.2, 0.4, 0.6, 0.8, 1.0};
  options.trials = 20;
  const auto rows = cli::run_sweep(options);
  double best = 0.0;
  std::string scores;
  for (const auto& r : rows) {
    if (r.beta < 1.0) best = std::max(best, r.mean_score);
    scores += fmt("%.1f:%.3f ", r.beta, r.mean_score);
  }
  const double at_one = rows.back().mean_score;
  const double drop = best > 0.0 ? (best - at_one) / best : 0.0;
  return {drop >= 0.10, fmt("scores %srelative drop at beta 1 = %.3f", scores.c_str(), drop)};
}

// 6. Linear time and constant memory.
Verdict complexity_scaling() {
  cli::BenchOptions options;
  options.ns = {10000, 20000, 40000};
  options.k = 20;
  options.projection_dim = 3;
  options.repeats = 5;
  const auto rows = cli::run_bench(options);
  const double r1 = rows[1].wall_ms / rows[0].wall_ms;
  const double r2 = rows[2].wall_ms / rows[1].wall_ms;
  const bool same_peak = rows[0].peak_stored_vectors == rows[1].peak_stored_vectors &&
                         rows[1].peak_stored_vectors == rows[2].peak_stored_vectors;
  const bool pass = r1 >= 1.7 && r1 <= 2.5 && r2 >= 1.7 && r2 <= 2.5 && same_peak &&
                    rows[0].peak_stored_vectors <= options.k + 2;
  return {pass, fmt("wall ms %.0f / %.0f / %.0f, ratios %.2f %.2f, peak stored %zu %zu %zu", rows[0].wall_ms,
                    rows[1].wall_ms, rows[2].wall_ms, r1, r2, rows[0].peak_stored_vectors,
                    rows[1].peak_stored_vectors, rows[2].peak_stored_vectors)};
}

double exhaustive(const Points& pts, std::size_t k, const std::function<double(const std::vector<std::size_t>&)>& f) {
  double best = std::numeric_limits<double>::infinity();
  oracle::for_each_subset(pts.size(), k, [&](const std::vector<std::size_t>& sel) { best = std::min(best, f(sel)); });
  return best;
}

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1]) return false;
  }
  return !trace.empty();
}

// 7. Batch swap searches against exhaustive enumeration.
Verdict batch_oracle() {
  std::size_t near_km = 0, near_pr = 0, monotone = 0;
  const std::size_t instances = 20;
  for (std::uint64_t seed = 0; seed < instances; ++seed) {
    std::mt19937_64 rng(seed + 700);
    const Points pts = oracle::random_points(rng, 15, 4, -3.0, 3.0);
    BatchConfig config;
    config.k = 3;
    config.projection_dim = 2;
    config.beta = 0.5;
    config.seed = seed;

    const auto km = batch_kmedoids(pts, config);
    const double km_opt = exhaustive(pts, 3, [&](const auto& sel) { return oracle::assignment_cost(pts, sel); });
    near_km += kmedoids_objective(pts, km.indices) <= km_opt + 0.05 * std::abs(km_opt);

    const auto pr = batch_precis(pts, config);
    const double weight = config.norm_factor_scale * 15.0 * (1.0 - config.beta);
    const double pr_opt = exhaustive(pts, 3, [&](const auto& sel) {
      Points chosen;
      for (auto i : sel) chosen.push_back(pts[i]);
      return config.beta * oracle::assignment_cost(pts, sel) - weight * divscore(chosen, 2);
    });
    near_pr += precis_objective(pts, pr.indices, config) <= pr_opt + 0.05 * std::abs(pr_opt);
    monotone += non_increasing(km.objective_trace) && non_increasing(pr.objective_trace);
  }
  const bool pass = near_km * 10 >= instances * 9 && near_pr * 10 >= instances * 9 && monotone == instances;
  return {pass, fmt("within 5%%: K-medoids %zu / %zu, Precis %zu / %zu; monotone %zu / %zu", near_km, instances,
                    near_pr, instances, monotone, instances)};
}

ReferenceSummary as_reference(const Points& pts) {
  ReferenceSummary r;
  r.user_id = "oracle";
  for (std::size_t i = 0; i < pts.size(); ++i) r.frame_indices.push_back(i);
  r.frame_features = pts;
  return r;
}

// 8. Evaluation protocol conformance.
Verdict evaluation_protocol() {
  std::vector<std::string> problems;
  if (choose_k(std::vector<std::size_t>{3, 2, 3}) != 6) problems.push_back("choose_k");
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const Points pts = oracle::random_points(rng, 10 + t % 30, 1 + t % 5);
    const double gamma = 0.1 + 0.01 * t;
    const auto keep = dedup(pts, gamma);
    Points kept;
    for (auto i : keep) kept.push_back(pts[i]);
    if (dedup(kept, gamma).size() != kept.size()) problems.push_back("dedup idempotence");
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = i + 1; j < kept.size(); ++j) {
        if (!(oracle::dist(kept[i], kept[j]) > gamma)) problems.push_back("dedup separation");
      }
    }
    if (match_score(pts, as_reference(pts), gamma).score != 1.0) problems.push_back("self match");
  }
  for (int t = 0; t < 1000; ++t) {
    const Points g = oracle::random_points(rng, 1 + t % 10, 3);
    const Points r = oracle::random_points(rng, 1 + (t / 10) % 8, 3);
    const double s = match_score(g, as_reference(r), 0.05 + 0.001 * t).score;
    if (!(s >= 0.0 && s <= 1.0)) problems.push_back("score bounds");
  }
  std::string detail = problems.empty() ? "choose_k, dedup, self-match and bounds all hold" : "failed:";
  for (const auto& p : problems) detail += " " + p;
  return {problems.empty(), detail};
}

// 9. Identical summarize invocations give identical results.
Verdict determinism() {
  SkewBenchmarkConfig bench;
  bench.seed = 9;
  const auto b = make_skew_benchmark(bench);
  const auto path = std::filesystem::temp_directory_path() / "divsamp_acceptance_frames.bin";
  {
    std::ofstream out(path, std::ios::binary);
    write_binary(out, b.frames);
  }
  std::size_t identical = 0, total = 0;
  for (auto algo : {cli::Algorithm::kOnlineDiverse, cli::Algorithm::kOnlineKMedoids, cli::Algorithm::kPrecis,
                    cli::Algorithm::kKMedoids, cli::Algorithm::kRandom, cli::Algorithm::kUniform}) {
    cli::SummarizeOptions options;
    options.algo = algo;
    options.sampler.seed = 1234;
    options.max_iters = 5;
    std::string docs[2];
    for (auto& doc : docs) {
      auto reader = FeatureReader::open(path.string());
      auto json = cli::summary_to_json(options, cli::summarize(options, cli::from_reader(reader)));
      json.erase("wall_time_ms");
      doc = json.dump();
    }
    ++total;
    identical += docs[0] == docs[1];
  }
  std::filesystem::remove(path);
  return {identical == total, fmt("%zu / %zu algorithms byte-identical across runs", identical, total)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {"hull volume oracle", hull_oracle},
      {"beta = 1 reduction", beta_one_reduction},
      {"zeta monotonicity", zeta_monotonicity},
      {"frozen-tail skew", frozen_tail_skew},
      {"beta sweep drop", beta_sweep},
      {"complexity scaling", complexity_scaling},
      {"batch oracle", batch_oracle},
      {"evaluation protocol", evaluation_protocol},
      {"determinism", determinism},
  };
  int failures = 0;
  int n = 0;
  for (const auto& c : criteria) {
    ++n;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %d %s: %s (%s)\n", n, c.name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", n - failures, n);
  return failures == 0 ? 0 : 1;
}
