// Copyright 2026 The trajdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// trajdp: generate, sanitize and evaluate trajectory databases.
//
// Exit codes: 0 ok, 1 I/O or malformed input, 2 invalid parameters,
// 3 location outside the supplied universe.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trajdp/trajdp.hpp"

namespace {

using namespace trajdp;

constexpr const char* kSeedEnv = "TRAJDP_SEED";

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
    case ErrorKind::kParse:
      return 1;
    case ErrorKind::kInvalidArgument:
      return 2;
    case ErrorKind::kUniverseViolation:
      return 3;
  }
  return 1;
}

// --seed, else $TRAJDP_SEED, else fresh entropy (reported in the manifest).
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw_invalid(std::string(kSeedEnv) + " is not an unsigned integer");
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// Text sink that is either a file or stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(ErrorKind::kIo, "cannot open for writing: " + path);
    }
    path_ = path;
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw Error(ErrorKind::kIo, "write failed: " + path_);
  }

 private:
  std::ofstream file_;
  std::string path_;
};

// Loads raw and sanitized files into one id space: strictly against a
// universe file when given, otherwise by interning raw first.
struct EvalInputs {
  TrajectoryDb raw;
  TrajectoryDb sanitized;
  LocationUniverse universe;
  std::size_t query_universe = 0;  // ids drawn by the workload
};

EvalInputs load_pair(const std::string& raw_path,
                     const std::string& sanitized_path,
                     const std::string& universe_path) {
  EvalInputs in;
  const auto policy =
      universe_path.empty() ? UnknownTokens::kIntern : UnknownTokens::kReject;
  if (!universe_path.empty()) in.universe = load_universe(universe_path);
  const auto read = [&](const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::kIo, "cannot open trajectory file: " + path);
    return read_db(f, in.universe, policy, path);
  };
  in.raw = read(raw_path);
  in.query_universe = in.universe.size();
  in.sanitized = read(sanitized_path);
  return in;
}

struct GenArgs {
  SynthConfig config;
  std::string output;
  std::string universe_out;
  std::string routes_out;
};

void run_gen(const GenArgs& a) {
  const auto corpus = generate(a.config);
  write_db(corpus.db, corpus.universe, a.output);
  if (!a.universe_out.empty()) write_universe(corpus.universe, a.universe_out);
  if (!a.routes_out.empty()) {
    TrajectoryDb routes{corpus.routes};
    write_db(routes, corpus.universe, a.routes_out);
  }
}

struct SanitizeArgs {
  std::string input;
  std::string output;
  std::string universe;
  std::string variant = "full";
  std::string dump_tree;
  double epsilon = 1.0;
  int height = 12;
  double theta_mult = kDefaultThetaMultiplier;
  std::optional<std::uint64_t> seed;
  bool expand_empty = false;
  bool timestamped = false;
  unsigned threads = 1;
};

void run_sanitize(const SanitizeArgs& a) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const Variant variant = parse_variant(a.variant);
  // Validate parameters before touching the data.
  const auto params = PrivacyParams::create(a.epsilon, a.height, a.theta_mult);
  if (a.threads < 1) throw_invalid("threads must be >= 1");
  const std::uint64_t seed = resolve_seed(a.seed);

  std::optional<std::string> universe_path;
  if (!a.universe.empty()) universe_path = a.universe;
  auto loaded = load_db(a.input, universe_path, &std::cerr);
  if (a.timestamped) validate_timestamped(loaded.db, loaded.universe);

  SanitizeOptions opts;
  opts.epsilon = a.epsilon;
  opts.height = a.height;
  opts.theta_multiplier = a.theta_mult;
  opts.seed = seed;
  opts.expand_empty = a.expand_empty;
  opts.threads = a.threads;
  auto run = sanitize_tree(loaded.db, loaded.universe, opts);

  Output out(a.output);
  const auto records_out = write_release(run.tree, variant, out.stream());
  out.close();
  if (!a.dump_tree.empty()) {
    Output dump(a.dump_tree);
    dump_tree(run.tree, dump.stream());
    dump.close();
  }

  std::size_t empty_born = 0;
  for (const auto& n : run.tree.nodes()) empty_born += n.empty_born;
  const double seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  auto& m = a.output == "-" ? std::cerr : std::cout;
  m << std::setprecision(10);
  m << "input: " << a.input << '\n'
    << "output: " << a.output << '\n'
    << "records_in: " << loaded.db.size() << '\n'
    << "records_out: " << records_out << '\n'
    << "universe_size: " << loaded.universe.size() << '\n'
    << "universe_source: " << (loaded.universe_from_data ? "data" : "file")
    << '\n'
    << "variant: " << to_string(variant) << '\n'
    << "epsilon: " << params.epsilon << '\n'
    << "height: " << params.height << '\n'
    << "per_level_epsilon: " << params.per_level << '\n'
    << "threshold: " << params.threshold << '\n'
    << "pass_probability: " << params.pass_prob << '\n'
    << "seed: " << seed << '\n'
    << "expand_empty: " << (a.expand_empty ? "true" : "false") << '\n'
    << "threads: " << a.threads << '\n'
    << "tree_nodes: " << run.tree.size() << '\n'
    << "tree_depth: " << run.tree.depth() << '\n'
    << "empty_born_nodes: " << empty_born << '\n'
    << "path_constraint_violations: " << run.path_violations << '\n';
  for (const auto& c : run.tree.ledger().charges()) {
    m << "budget_level_" << c.level << ": " << c.epsilon
      << " frontier=" << c.frontier << '\n';
  }
  m << "budget_spent: " << run.tree.ledger().spent() << '\n'
    << "build_seconds: " << run.build_seconds << '\n'
    << "inference_seconds: " << run.inference_seconds << '\n'
    << "runtime_seconds: " << seconds << '\n';
}

struct EvalCountArgs {
  std::string raw, sanitized, universe, output;
  int height = 12;
  std::size_t per_subset = 10000;
  double sanity_fraction = 0.001;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string epsilon_label = "NA";
  std::string variant_label = "NA";
};

void run_eval_count(const EvalCountArgs& a) {
  if (!(a.sanity_fraction > 0.0)) throw_invalid("sanity fraction must be > 0");
  if (a.threads < 1) throw_invalid("threads must be >= 1");
  const std::uint64_t seed = resolve_seed(a.seed);
  const auto in = load_pair(a.raw, a.sanitized, a.universe);
  const auto workload =
      generate_workload(in.query_universe, a.height, a.per_subset, seed);
  const double sanity =
      std::max(a.sanity_fraction * static_cast<double>(in.raw.size()),
               std::numeric_limits<double>::min());
  const CountQueryIndex raw_index(in.raw);
  const CountQueryIndex sanitized_index(in.sanitized);
  const auto errors =
      evaluate_workload(raw_index, sanitized_index, workload, sanity, a.threads);

  Output out(a.output);
  auto& os = out.stream();
  os << "subset,max_query_length,queries,epsilon,height,variant,"
        "avg_relative_error\n";
  os << std::setprecision(10);
  for (std::size_t i = 0; i < errors.size(); ++i) {
    os << (i + 1) << ',' << errors[i].max_length << ',' << errors[i].queries
       << ',' << a.epsilon_label << ',' << a.height << ',' << a.variant_label
       << ',' << errors[i].average_relative_error << '\n';
  }
  out.close();
}

struct EvalFspArgs {
  std::string raw, sanitized, universe, output;
  std::vector<std::size_t> topk{50, 100, 150, 200, 250};
  std::optional<std::size_t> max_len;
  std::string epsilon_label = "NA";
  std::string height_label = "NA";
  std::string variant_label = "NA";
};

void run_eval_fsp(const EvalFspArgs& a) {
  if (a.topk.empty()) throw_invalid("need at least one --topk value");
  std::size_t kmax = 0;
  for (auto k : a.topk) {
    if (k < 1) throw_invalid("k must be at least 1");
    kmax = std::max(kmax, k);
  }
  const auto in = load_pair(a.raw, a.sanitized, a.universe);
  const auto truth = mine_top_k(in.raw, kmax, a.max_len);
  const auto found = mine_top_k(in.sanitized, kmax, a.max_len);

  Output out(a.output);
  auto& os = out.stream();
  os << "k,epsilon,height,variant,true_positives,false_positives,false_drops,"
        "short\n";
  for (auto k : a.topk) {
    const auto take = [k](const TopKResult& r) {
      return std::span<const SeqPattern>(r.patterns.data(),
                                         std::min(k, r.patterns.size()));
    };
    const auto m = fsp_metrics(take(truth), take(found));
    const bool is_short =
        truth.patterns.size() < k || found.patterns.size() < k;
    os << k << ',' << a.epsilon_label << ',' << a.height_label << ','
       << a.variant_label << ',' << m.true_positives << ','
       << m.false_positives << ',' << m.false_drops << ','
       << (is_short ? "true" : "false") << '\n';
  }
  out.close();
}

void run_stats(const std::string& input, const std::string& universe,
               const std::string& output) {
  std::optional<std::string> universe_path;
  if (!universe.empty()) universe_path = universe;
  const auto loaded = load_db(input, universe_path, nullptr);
  const auto s = release_stats(loaded.db);
  Output out(output);
  auto& os = out.stream();
  os << "length,count\n";
  for (const auto& [len, count] : s.length_histogram) {
    os << len << ',' << count << '\n';
  }
  out.close();
  std::cerr << "records: " << s.records
            << "\ndistinct_locations: " << s.distinct_locations << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private trajectory sanitization"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic corpus");
  // Config keys live in a [gen] section; the subcommand passes --config up.
  app.set_config("--config", "", "INI/TOML file with a [gen] section");
  gen_cmd->fallthrough();
  gen_cmd->add_option("--output,-o", gen.output, "Trajectory file")->required();
  gen_cmd->add_option("--universe-out", gen.universe_out, "Universe file");
  gen_cmd->add_option("--routes-out", gen.routes_out, "Planted routes file");
  gen_cmd->add_option("--locations", gen.config.locations)->capture_default_str();
  gen_cmd->add_option("--records", gen.config.records)->capture_default_str();
  gen_cmd->add_option("--avg-len", gen.config.avg_len)->capture_default_str();
  gen_cmd->add_option("--max-len", gen.config.max_len)->capture_default_str();
  gen_cmd->add_option("--routes", gen.config.planted_routes)
      ->capture_default_str();
  gen_cmd->add_option("--route-length", gen.config.route_length)
      ->capture_default_str();
  gen_cmd->add_option("--route-fraction", gen.config.route_fraction)
      ->capture_default_str();
  gen_cmd->add_option("--zipf", gen.config.zipf_skew)->capture_default_str();
  gen_cmd->add_option("--seed", gen.config.seed)->capture_default_str();

  SanitizeArgs san;
  auto* san_cmd = app.add_subcommand("sanitize", "Publish a sanitized database");
  san_cmd->add_option("--input,-i", san.input, "Raw trajectory file")->required();
  san_cmd->add_option("--output,-o", san.output, "Sanitized file ('-' = stdout)")
      ->required();
  san_cmd->add_option("--epsilon", san.epsilon, "Total privacy budget")
      ->capture_default_str();
  san_cmd->add_option("--height", san.height, "Prefix tree height h")
      ->capture_default_str();
  san_cmd->add_option("--seed", san.seed,
                      "Random seed (default $TRAJDP_SEED, else random)");
  san_cmd->add_option("--universe", san.universe, "Public location universe");
  san_cmd->add_option("--variant", san.variant, "basic | full")
      ->capture_default_str();
  san_cmd->add_option("--theta-mult", san.theta_mult,
                      "Threshold in noise standard deviations")
      ->capture_default_str();
  san_cmd->add_flag("--expand-empty", san.expand_empty,
                    "Also grow children under empty-born nodes");
  san_cmd->add_option("--dump-tree", san.dump_tree, "Write a tree outline");
  san_cmd->add_flag("--timestamped", san.timestamped,
                    "Require loc@t tokens with non-decreasing t");
  san_cmd->add_option("--threads", san.threads)->capture_default_str();

  EvalCountArgs ec;
  auto* ec_cmd =
      app.add_subcommand("eval-count", "Average relative error of count queries");
  ec_cmd->add_option("--raw", ec.raw)->required();
  ec_cmd->add_option("--sanitized", ec.sanitized)->required();
  ec_cmd->add_option("--universe", ec.universe);
  ec_cmd->add_option("--height", ec.height)->capture_default_str();
  ec_cmd->add_option("--queries-per-subset", ec.per_subset)
      ->capture_default_str();
  ec_cmd->add_option("--sanity-fraction", ec.sanity_fraction)
      ->capture_default_str();
  ec_cmd->add_option("--seed", ec.seed);
  ec_cmd->add_option("--threads", ec.threads)->capture_default_str();
  ec_cmd->add_option("--epsilon", ec.epsilon_label, "Label for the CSV");
  ec_cmd->add_option("--variant", ec.variant_label, "Label for the CSV");
  ec_cmd->add_option("--output,-o", ec.output, "CSV file (default stdout)");

  EvalFspArgs ef;
  auto* ef_cmd = app.add_subcommand("eval-fsp", "Top-k sequential pattern overlap");
  ef_cmd->add_option("--raw", ef.raw)->required();
  ef_cmd->add_option("--sanitized", ef.sanitized)->required();
  ef_cmd->add_option("--universe", ef.universe);
  ef_cmd->add_option("--topk", ef.topk)->capture_default_str();
  ef_cmd->add_option("--max-len", ef.max_len, "Longest pattern to mine");
  ef_cmd->add_option("--epsilon", ef.epsilon_label, "Label for the CSV");
  ef_cmd->add_option("--height", ef.height_label, "Label for the CSV");
  ef_cmd->add_option("--variant", ef.variant_label, "Label for the CSV");
  ef_cmd->add_option("--output,-o", ef.output, "CSV file (default stdout)");

  std::string stats_input, stats_universe, stats_output;
  auto* st_cmd = app.add_subcommand("stats", "Trajectory length histogram");
  st_cmd->add_option("--input,-i", stats_input)->required();
  st_cmd->add_option("--universe", stats_universe);
  st_cmd->add_option("--output,-o", stats_output, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) run_gen(gen);
    if (*san_cmd) run_sanitize(san);
    if (*ec_cmd) run_eval_count(ec);
    if (*ef_cmd) run_eval_fsp(ef);
    if (*st_cmd) run_stats(stats_input, stats_universe, stats_output);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
