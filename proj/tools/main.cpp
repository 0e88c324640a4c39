#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "influence/cascade.hpp"
#include "influence/experiment.hpp"
#include "influence/generators.hpp"
#include "influence/lp.hpp"
#include "influence/oracles.hpp"
#include "influence/planted.hpp"
#include "influence/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;          // invalid flags / invalid spec
constexpr int kExitNoConvergence = 3;  // solver gave up
constexpr int kExitAmbiguous = 4;      // certification / rounding ambiguity

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

struct GenArgs {
  std::string kind;
  int k = 2;
  std::string n_list = "4,4";
  std::string r_list;
  int g0 = 0;
  std::string theta_list, beta_list, zcap_list;
  double q = 0.0, s = 0.0;
  int ui = 0, uf = 0;
  double p1 = 0.3, p2 = 0.9, sigma = 0.0;
  std::uint64_t seed = 0;
  std::string out = "instance";
};

int cmd_gen(const GenArgs& a) {
  std::map<std::string, std::string> meta{{"kind", a.kind},
                                          {"seed", std::to_string(a.seed)}};
  influence::PlantedInstance inst{influence::BipartiteGraph(0, 0, {})};
  if (a.kind == "noiseless") {
    auto n = parse_int_list(a.n_list);
    auto r = a.r_list.empty() ? std::vector<int>(a.k, 0) : parse_int_list(a.r_list);
    inst = influence::gen_noiseless(a.k, n, r, a.seed);
    meta["n"] = a.n_list;
    meta["r"] = a.r_list;
  } else if (a.kind == "noisy") {
    auto n = parse_int_list(a.n_list);
    auto r = a.r_list.empty() ? std::vector<int>(a.k, 0) : parse_int_list(a.r_list);
    auto theta = parse_double_list(a.theta_list);
    auto beta = parse_double_list(a.beta_list);
    auto zcap = a.zcap_list.empty() ? std::vector<int>(a.k, 0) : parse_int_list(a.zcap_list);
    inst = influence::gen_deterministic_noisy(a.k, n, r, a.g0, theta, beta, zcap, a.seed);
    meta["n"] = a.n_list;
    meta["r"] = a.r_list;
    meta["g0"] = std::to_string(a.g0);
    meta["theta"] = a.theta_list;
    meta["beta"] = a.beta_list;
    meta["zcap"] = a.zcap_list;
  } else if (a.kind == "random-planted") {
    influence::RandomPlantedSpec spec;
    spec.k = a.k;
    spec.group_sizes = parse_int_list(a.n_list);
    spec.subordinate_counts =
        a.r_list.empty() ? std::vector<int>(a.k, 0) : parse_int_list(a.r_list);
    spec.g0_size = a.g0;
    spec.q = a.q;
    spec.s = a.s;
    spec.seed = a.seed;
    inst = influence::gen_random_planted(spec);
    meta["n"] = a.n_list;
    meta["r"] = a.r_list;
    meta["g0"] = std::to_string(a.g0);
    meta["q"] = std::to_string(a.q);
    meta["s"] = std::to_string(a.s);
  } else if (a.kind == "forest-fire") {
    influence::ForestFireSpec spec;
    spec.k = a.k;
    spec.sender_cap = a.ui > 0 ? a.ui : 10 * a.k;
    spec.receiver_cap = a.uf > 0 ? a.uf : 10 * spec.sender_cap;
    spec.p1 = a.p1;
    spec.p2 = a.p2;
    spec.sigma_pct = a.sigma;
    spec.seed = a.seed;
    auto res = influence::gen_forest_fire(spec);
    meta["p1"] = std::to_string(a.p1);
    meta["p2"] = std::to_string(a.p2);
    meta["sigma"] = std::to_string(a.sigma);
    meta["e_orig"] = std::to_string(res.arcs_before_noise);
    meta["e_noise"] = std::to_string(res.noise_arcs);
    inst = std::move(res.instance);
  } else {
    throw CLI::ValidationError("unknown generator kind: " + a.kind);
  }
  influence::save_instance(inst, a.out, meta);
  std::cout << "wrote " << a.out << " (senders " << inst.graph.num_senders()
            << ", receivers " << inst.graph.num_receivers() << ", arcs "
            << inst.graph.num_arcs() << ")\n";
  return kExitOk;
}

int cmd_solve(const std::string& inst_dir, const std::string& model, double p,
              double xi, const std::string& out_path, int k_override,
              int max_iterations) {
  const auto inst = influence::load_instance(inst_dir);
  const auto meta = influence::load_instance_meta(inst_dir);
  const int k = k_override > 0 ? k_override : inst.k;

  influence::ExperimentRecord rec;
  rec.model = model;
  rec.k = k;
  if (meta.count("p1")) rec.p1 = std::stod(meta.at("p1"));
  if (meta.count("p2")) rec.p2 = std::stod(meta.at("p2"));
  if (meta.count("sigma")) rec.sigma_pct = std::stod(meta.at("sigma"));
  if (meta.count("seed")) rec.seed = std::stoull(meta.at("seed"));
  if (meta.count("e_orig")) rec.e_orig = std::stoll(meta.at("e_orig"));
  if (meta.count("e_noise")) rec.e_noise = std::stoll(meta.at("e_noise"));

  int exit_code = kExitOk;
  if (model == "lp") {
    const auto problem = influence::build_lp(inst.graph, k);
    influence::LpConfig cfg;
    cfg.max_iterations = max_iterations;
    const auto sol = influence::solve_lp(problem, cfg);
    if (!out_path.empty()) write_file(out_path, influence::dump_lp_solution(sol));
    if (sol.status != influence::LpStatus::Optimal) {
      std::cerr << "solver stopped before optimality\n";
      return kExitNoConvergence;
    }
    rec.err = inst.recovery_error(sol.x);
  } else if (model == "cascade") {
    const influence::CascadeProblem problem(inst.graph, k, p);
    influence::CascadeConfig cfg;
    if (max_iterations > 0) cfg.max_iterations = max_iterations;
    const auto sol = influence::solve_cascade(problem, cfg);
    std::vector<double> rounded;
    try {
      rounded = influence::round_threshold(sol.x, xi, k);
      const auto topk = influence::round_topk(sol.x, k);
      rec.err = inst.recovery_error(topk);
    } catch (const influence::AmbiguousRoundingError& e) {
      std::cerr << e.what() << "\n";
      return kExitAmbiguous;
    }
    if (!out_path.empty())
      write_file(out_path, influence::dump_cascade_solution(sol, rounded, "", p));
    if (!sol.converged) {
      std::cerr << "projected gradient did not converge\n";
      return kExitNoConvergence;
    }
  } else {
    throw CLI::ValidationError("model must be lp or cascade");
  }
  rec.recovered = rec.err < influence::kRecoveryThreshold;
  std::cout << influence::experiment_csv_header()
            << influence::experiment_csv_row(rec, false);
  return exit_code;
}

int cmd_certify(const std::string& inst_dir, const std::string& solution_path,
                const std::string& model_flag, double tol) {
  const auto inst = influence::load_instance(inst_dir);
  const auto text = read_file(solution_path);
  const auto json = nlohmann::json::parse(text);
  const std::string model = json.value("model", "lp");
  if (!model_flag.empty() && model_flag != model) {
    std::cerr << "model mismatch: solution is '" << model << "', flag says '"
              << model_flag << "'\n";
    return kExitUsage;
  }

  if (model == "lp") {
    const auto sol = influence::parse_lp_solution(text);
    double sum_x = 0.0;
    for (double v : sol.x) sum_x += v;
    const int k = std::max(1, static_cast<int>(std::lround(sum_x)));
    const auto problem = influence::build_lp(inst.graph, k);
    const auto rep = influence::kkt_check(problem, sol, tol);
    bool integral = true;
    for (double v : sol.x)
      if (std::abs(v) > 1e-8 && std::abs(v - 1.0) > 1e-8) integral = false;
    std::cout << "kkt_max_violation " << rep.max_violation << "\n";
    std::cout << "kkt_pass " << (rep.pass ? 1 : 0) << "\n";
    if (rep.pass && integral) {
      std::cout << "verdict integer-optimal by LP\n";
    } else if (rep.pass) {
      std::cout << "verdict LP-optimal (fractional)\n";
    } else {
      std::cout << "verdict not certified\n";
    }
    return kExitOk;
  }
  if (model == "cascade") {
    const auto sol = influence::parse_cascade_solution(text);
    const double p = json.value("p", 0.9);
    double sum_x = 0.0;
    for (double v : sol.x) sum_x += v;
    const int k = std::max(1, static_cast<int>(std::lround(sum_x)));
    const influence::CascadeProblem problem(inst.graph, k, p);
    try {
      const auto cert = influence::certify_by_cut(problem, sol.x);
      const bool ok = cert.verdict == influence::CutVerdict::CertifiedOptimal;
      std::cout << "cut_lower_bound " << cert.cut_lower_bound << "\n";
      std::cout << "rounded_objective " << cert.rounded_objective << "\n";
      std::cout << "verdict " << (ok ? "CertifiedOptimal" : "NotCertified") << " ("
                << cert.reason << ")\n";
      return kExitOk;
    } catch (const influence::AmbiguousRoundingError& e) {
      std::cerr << e.what() << "\n";
      return kExitAmbiguous;
    }
  }
  std::cerr << "unknown model in solution file: " << model << "\n";
  return kExitUsage;
}

int cmd_oracle(const std::string& inst_dir, const std::string& method, int k_override,
               double p, std::int64_t trials, std::uint64_t seed,
               const std::string& set_list, std::int64_t cap) {
  const auto inst = influence::load_instance(inst_dir);
  const int k = k_override > 0 ? k_override : inst.k;
  nlohmann::json j;
  j["method"] = method;
  if (method == "brute-det") {
    const auto res = influence::brute_force_deterministic(inst.graph, k, cap);
    j["best_set"] = res.best_set;
    j["best_value"] = res.best_value;
    j["num_evaluated"] = res.num_evaluated;
    j["num_ties"] = res.ties.size();
  } else if (method == "brute-cascade") {
    const influence::CascadeProblem problem(inst.graph, k, p);
    const auto res = influence::brute_force_cascade(problem, cap);
    j["best_set"] = res.best_set;
    j["best_value"] = res.best_value;
    j["num_evaluated"] = res.num_evaluated;
    j["num_ties"] = res.ties.size();
  } else if (method == "greedy-det") {
    j["set"] = influence::greedy_deterministic(inst.graph, k);
  } else if (method == "greedy-cascade") {
    const influence::CascadeProblem problem(inst.graph, k, p);
    j["set"] = influence::greedy_cascade(problem);
  } else if (method == "mc") {
    const influence::CascadeProblem problem(inst.graph, k, p);
    const auto set = set_list.empty() ? inst.influencers : parse_int_list(set_list);
    const auto est = influence::monte_carlo_spread(problem, set, trials, seed);
    j["set"] = set;
    j["mean"] = est.mean;
    j["std_error"] = est.std_error;
    j["trials"] = est.trials;
  } else {
    throw CLI::ValidationError("unknown oracle method: " + method);
  }
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_bench(const std::string& table, const influence::BenchOptions& opts,
              const std::string& out_path, bool force) {
  if (table == "table2" && !force) {
    for (int k : opts.k_values)
      if (k > 60) {
        std::cerr << "bench table2 refuses k > 60 without --force (the cascade "
                     "solve is costly at that scale)\n";
        return kExitUsage;
      }
  }
  const auto out = influence::run_bench(table == "table1" ? "lp" : "cascade", opts);
  if (out_path.empty())
    std::cout << out.csv;
  else
    write_file(out_path, out.csv);

  std::printf("%4s %5s %6s | %10s %10s %10s %6s\n", "k", "p1", "sigma", "E_orig",
              "E_noise", "err", "N_rec");
  for (const auto& c : out.cells)
    std::printf("%4d %5g %6g | %10.1f %10.1f %10.2e %3d/%-2d\n", c.k, c.p1,
                c.sigma, c.mean_e_orig, c.mean_e_noise, c.mean_err, c.n_rec,
                c.trials);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influence-maximization solver suite: planted generators, LP and "
               "cascade relaxations, certificates, oracles and benchmarks"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* sc_gen = app.add_subcommand("gen", "generate an instance bundle");
  sc_gen->add_option("kind", gen.kind,
                     "noiseless | noisy | random-planted | forest-fire")
      ->required();
  sc_gen->add_option("--k", gen.k, "number of groups / influencers");
  sc_gen->add_option("--n", gen.n_list, "receiver group sizes, comma separated");
  sc_gen->add_option("--r", gen.r_list, "subordinate counts per group");
  sc_gen->add_option("--g0", gen.g0, "size of the noise receiver block G_0");
  sc_gen->add_option("--theta", gen.theta_list, "theta targets per group");
  sc_gen->add_option("--beta", gen.beta_list, "beta targets per group");
  sc_gen->add_option("--zcap", gen.zcap_list, "per-group cap on subordinate G_0 arcs");
  sc_gen->add_option("--q", gen.q, "cross-group noise intensity");
  sc_gen->add_option("--s", gen.s, "subordinate density");
  sc_gen->add_option("--ui", gen.ui, "sender cap (default 10k)");
  sc_gen->add_option("--uf", gen.uf, "receiver cap (default 10*ui)");
  sc_gen->add_option("--p1", gen.p1, "forest-fire receiver probability");
  sc_gen->add_option("--p2", gen.p2, "forest-fire burn continuation probability");
  sc_gen->add_option("--sigma", gen.sigma, "noise percentage of the complement");
  sc_gen->add_option("--seed", gen.seed, "seed");
  sc_gen->add_option("--out", gen.out, "output directory")->required();

  std::string solve_inst, solve_model = "lp", solve_out;
  double solve_p = 0.9, solve_xi = 0.0;
  int solve_k = 0, solve_max_iters = 0;
  auto* sc_solve = app.add_subcommand("solve", "solve an instance, emit a record row");
  sc_solve->add_option("--inst", solve_inst, "instance directory")->required();
  sc_solve->add_option("--model", solve_model, "lp | cascade");
  sc_solve->add_option("--p", solve_p, "cascade arc probability");
  sc_solve->add_option("--xi", solve_xi, "threshold-rounding parameter");
  sc_solve->add_option("--k", solve_k, "budget override (default: planted k)");
  sc_solve->add_option("--max-iterations", solve_max_iters,
                       "solver iteration cap (0 = automatic)");
  sc_solve->add_option("--out", solve_out, "solution dump path");

  std::string cert_inst, cert_solution, cert_model;
  double cert_tol = 1e-7;
  auto* sc_cert = app.add_subcommand("certify", "check a solution's certificate");
  sc_cert->add_option("--inst", cert_inst, "instance directory")->required();
  sc_cert->add_option("--solution", cert_solution, "solution dump path")->required();
  sc_cert->add_option("--model", cert_model, "expected model (mismatch is an error)");
  sc_cert->add_option("--tol", cert_tol, "KKT tolerance");

  std::string oracle_inst, oracle_method, oracle_set;
  int oracle_k = 0;
  double oracle_p = 0.9;
  std::int64_t oracle_trials = 100000, oracle_cap = influence::kDefaultEnumerationCap;
  std::uint64_t oracle_seed = 0;
  auto* sc_oracle = app.add_subcommand("oracle", "baseline / ground-truth computations");
  sc_oracle->add_option("--inst", oracle_inst, "instance directory")->required();
  sc_oracle->add_option("--method", oracle_method,
                        "brute-det | brute-cascade | greedy-det | greedy-cascade | mc")
      ->required();
  sc_oracle->add_option("--k", oracle_k, "budget override");
  sc_oracle->add_option("--p", oracle_p, "cascade arc probability");
  sc_oracle->add_option("--trials", oracle_trials, "monte carlo trials");
  sc_oracle->add_option("--seed", oracle_seed, "monte carlo seed");
  sc_oracle->add_option("--set", oracle_set, "sender set for mc, comma separated");
  sc_oracle->add_option("--cap", oracle_cap, "enumeration cap");

  std::string bench_table, bench_k = "20", bench_p1 = "0.3", bench_sigma = "0.5";
  std::string bench_out;
  influence::BenchOptions bopts;
  bool bench_force = false;
  auto* sc_bench = app.add_subcommand("bench", "forest-fire recovery campaign");
  sc_bench->add_option("table", bench_table, "table1 (lp) | table2 (cascade)")
      ->required();
  sc_bench->add_option("--k", bench_k, "k values, comma separated");
  sc_bench->add_option("--p1", bench_p1, "p1 values");
  sc_bench->add_option("--sigma", bench_sigma, "sigma values");
  sc_bench->add_option("--p2", bopts.p2, "burn continuation probability");
  sc_bench->add_option("--p", bopts.cascade_p, "cascade arc probability");
  sc_bench->add_option("--trials", bopts.trials, "trials per cell");
  sc_bench->add_option("--seed", bopts.master_seed, "master seed");
  sc_bench->add_option("--out", bench_out, "CSV output path (default stdout)");
  sc_bench->add_flag("--timings", bopts.timings, "record wall times in the CSV");
  sc_bench->add_flag("--force", bench_force, "allow costly parameter ranges");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sc_gen->parsed()) return cmd_gen(gen);
    if (sc_solve->parsed())
      return cmd_solve(solve_inst, solve_model, solve_p, solve_xi, solve_out,
                       solve_k, solve_max_iters);
    if (sc_cert->parsed())
      return cmd_certify(cert_inst, cert_solution, cert_model, cert_tol);
    if (sc_oracle->parsed())
      return cmd_oracle(oracle_inst, oracle_method, oracle_k, oracle_p,
                        oracle_trials, oracle_seed, oracle_set, oracle_cap);
    if (sc_bench->parsed()) {
      bopts.k_values = parse_int_list(bench_k);
      bopts.p1_values = parse_double_list(bench_p1);
      bopts.sigma_values = parse_double_list(bench_sigma);
      if (bench_table != "table1" && bench_table != "table2")
        throw CLI::ValidationError("table must be table1 or table2");
      return cmd_bench(bench_table, bopts, bench_out, bench_force);
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid specification: " << e.what() << "\n";
    return kExitUsage;
  } catch (const influence::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
