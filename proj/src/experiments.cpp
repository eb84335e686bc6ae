#include "wavelab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wavelab/besov.hpp"
#include "wavelab/parallel.hpp"
#include "wavelab/kato.hpp"
#include "wavelab/resolvent.hpp"
#include "wavelab/scattering.hpp"
#include "wavelab/semigroup.hpp"
#include "wavelab/wave.hpp"

namespace wavelab::experiments {

namespace {

using io::TomlTable;
using nlohmann::json;
using potential::PotentialSpec;

struct Context {
  TomlTable config;
  std::string out_dir;
  std::string config_hash;
  std::size_t jobs = 1;
  std::vector<std::pair<std::string, std::string>> artifacts;  // (name, content)

  double num(const std::string& key, double fb) const { return io::get_number(config, key, fb); }
  std::string str(const std::string& key, const std::string& fb) const {
    return io::get_string(config, key, fb);
  }
  std::vector<double> arr(const std::string& key, const std::vector<double>& fb) const {
    return io::get_array(config, key, fb);
  }

  void emit(const std::string& name, const std::string& content) {
    artifacts.emplace_back(name, content);
  }
};

PotentialSpec potential_from(const Context& ctx) {
  const std::string kind = ctx.str("potential.kind", "ball-well");
  if (kind == "ball-well")
    return PotentialSpec::ball_well(ctx.num("potential.radius", 1.0),
                                    ctx.num("potential.depth", -0.4));
  if (kind == "gaussian")
    return PotentialSpec::gaussian(ctx.num("potential.width", 1.0),
                                   ctx.num("potential.amplitude", -0.4));
  if (kind == "inverse-decay")
    return PotentialSpec::inverse_decay(ctx.num("potential.c", 1.0),
                                        ctx.num("potential.eps", 0.5));
  if (kind == "zero") return PotentialSpec::zero();
  if (kind == "json")  // inline catalog entry, e.g. sums of profiles
    return potential::load_spec_json(ctx.str("potential.json", "{}"));
  throw std::invalid_argument("unknown potential.kind: " + kind);
}

RadialGrid grid_from(const Context& ctx, double scale = 1.0) {
  const double r_max = ctx.num("grid.r_max", 16.0);
  const auto nodes = static_cast<std::size_t>(ctx.num("grid.nodes", 320) * scale);
  return make_radial_grid(r_max, nodes);
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

void run_kato_norm(Context& ctx) {
  const auto v = potential_from(ctx);
  const auto grid = grid_from(ctx);
  const auto radii = ctx.arr("kato.modulus_radii", {0.01, 0.05, 0.1, 0.5, 1.0, 2.0});
  const auto rep = potential::kato_report(v.absolute_part(), grid, radii,
                                          ctx.num("kato.class_tol", 0.05));
  const auto lorentz = potential::lorentz_321_norm(v, grid);
  json j;
  j["config_hash"] = ctx.config_hash;
  j["potential"] = v.describe();
  j["kato_norm"] = rep.kato_norm;
  j["class_verdict"] = rep.class_verdict;
  j["converged"] = rep.converged;
  j["refinement_delta"] = rep.refinement_delta;
  j["tail_bound"] = rep.tail_bound;
  for (const auto& [r, eta] : rep.modulus_samples)
    j["modulus"].push_back({{"r", r}, {"eta", eta}});
  j["lorentz_321"] = lorentz.value;
  j["lorentz_tail_flagged"] = lorentz.tail_flagged;
  ctx.emit("kato.json", json_text(j));
}

void run_hypotheses(Context& ctx) {
  const auto v = potential_from(ctx);
  const auto grid = grid_from(ctx);
  const auto rep =
      potential::check_hypotheses(v, ctx.num("potential.split_radius", 2.0), grid);
  json j;
  j["config_hash"] = ctx.config_hash;
  j["potential"] = v.describe();
  j["split_radius"] = rep.split_radius;
  j["kato_norms"] = {{"v", rep.v_kato},
                     {"v1", rep.v1_kato},
                     {"v2", rep.v2_kato},
                     {"v_minus", rep.vminus_kato}};
  j["selfadjoint"] = {{"ok", rep.selfadjoint_ok}, {"margin", rep.selfadjoint_margin}};
  j["compact_part_ok"] = rep.compact_part_ok;
  j["smallness"] = {{"value", rep.smallness_value}, {"ok", rep.smallness_ok}};
  j["negative_part"] = {{"ok", rep.negative_part_ok}, {"margin", rep.negative_part_margin}};
  j["decay_shape"] = {{"a", rep.decay_shape_a}, {"b", rep.decay_shape_b}};
  j["heat"] = {{"semigroup_ok", rep.heat_semigroup_ok}, {"kernel_ok", rep.heat_kernel_ok}};
  ctx.emit("hypotheses.json", json_text(j));
}

void run_resonance_scan(Context& ctx) {
  const auto v = potential_from(ctx);
  const auto grid = grid_from(ctx);
  std::vector<double> lambdas = ctx.arr("scan.lambdas", {});
  if (lambdas.empty()) {
    const double lmax = ctx.num("scan.lambda_max", 8.0);
    const auto count = static_cast<std::size_t>(ctx.num("scan.lambda_count", 17));
    for (std::size_t k = 0; k < count; ++k)
      lambdas.push_back(lmax * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  const auto scan = scattering::resonance_scan(grid, v, lambdas);

  io::CsvWriter csv({"lambda", "sigma_min", "condition", "neumann_norm", "config_hash"});
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
    csv.add_row_mixed({io::CsvWriter::format(scan.lambdas[i]),
                       io::CsvWriter::format(scan.sigma_min[i]),
                       io::CsvWriter::format(scan.condition[i]),
                       io::CsvWriter::format(scan.neumann_norm[i]), ctx.config_hash});
  ctx.emit("resonance_scan.csv", csv.str());

  json j;
  j["config_hash"] = ctx.config_hash;
  j["tau"] = scan.tau;
  j["truncated"] = scan.truncated;
  j["lambda_cap"] = scan.lambda_cap;
  j["dips"] = json::array();
  for (const auto& dip : scan.dips)
    j["dips"].push_back({{"lambda", dip.lambda}, {"sigma", dip.sigma}});
  ctx.emit("resonance_dips.json", json_text(j));
}

void run_spectral_measure(Context& ctx) {
  const auto v = potential_from(ctx);
  const auto grid = grid_from(ctx);
  const double eps = ctx.num("scan.eps", 0.05);
  auto lambdas = ctx.arr("scan.lambdas", {1.0, 2.0, 4.0, 8.0, 16.0});
  const double cap = resolvent::lambda_resolution_cap(grid.dr);
  std::erase_if(lambdas, [&](double l) { return l > cap; });

  io::CsvWriter csv({"lambda", "eps", "free_norm", "perturbed_norm", "fitted_c",
                     "config_hash"});
  std::vector<double> cs(lambdas.size());
  std::vector<std::array<double, 3>> rows(lambdas.size());
  parallel_for(lambdas.size(), ctx.jobs, [&](std::size_t i) {
    const double l = lambdas[i];
    const auto free_op = resolvent::spectral_measure_free(grid, l, eps);
    const auto pert = scattering::spectral_measure_perturbed(grid, v, l, eps);
    const double fn = free_op.opnorm_l1_to_linf();
    const double pn = pert.opnorm_l1_to_linf();
    cs[i] = pn / std::sqrt(lambda_eps(l, eps));
    rows[i] = {l, fn, pn};
  });
  double cbar = 0.0;
  for (double c : cs) cbar += c;
  cbar /= static_cast<double>(cs.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    csv.add_row_mixed({io::CsvWriter::format(rows[i][0]), io::CsvWriter::format(eps),
                       io::CsvWriter::format(rows[i][1]), io::CsvWriter::format(rows[i][2]),
                       io::CsvWriter::format(cs[i]), ctx.config_hash});
  ctx.emit("spectral_measure.csv", csv.str());

  if (ctx.num("dump.operators", 0.0) > 0.5) {
    const auto pert = scattering::spectral_measure_perturbed(grid, v, lambdas.front(), eps);
    const std::string base = ctx.out_dir + "/spectral_measure_op";
    pert.save(base);
    ctx.artifacts.emplace_back("spectral_measure_op.bin", std::string());
    ctx.artifacts.emplace_back("spectral_measure_op.json", std::string());
  }

  json j;
  j["config_hash"] = ctx.config_hash;
  j["fitted_c_mean"] = cbar;
  j["fitted_c_per_lambda"] = cs;
  ctx.emit("spectral_measure_summary.json", json_text(j));
}

void run_heat_check(Context& ctx) {
  const auto v = potential_from(ctx);
  const auto grid = grid_from(ctx);
  const auto h = semigroup::DiscreteHamiltonian::radial(grid, v);
  const auto times = ctx.arr("scan.times", {0.1, 0.5, 1.0});

  io::CsvWriter csv({"t", "measured_l1linf", "bound", "max_kernel_violation", "config_hash"});
  for (double t : times) {
    const auto lp = semigroup::lplq_check(h, v, t, 1, 0);
    const auto kb = semigroup::kernel_bound_check(h, v, t);
    csv.add_row_mixed({io::CsvWriter::format(t), io::CsvWriter::format(lp.measured),
                       io::CsvWriter::format(lp.bound),
                       io::CsvWriter::format(kb.skipped ? std::nan("") : kb.max_violation),
                       ctx.config_hash});
  }
  ctx.emit("heat_check.csv", csv.str());
}

void run_fk_mc(Context& ctx) {
  const auto v = potential_from(ctx);
  const auto grid = grid_from(ctx);
  semigroup::PathEnsemble ens;
  ens.count = static_cast<std::size_t>(ctx.num("mc.paths", 100000));
  ens.seed = static_cast<std::uint64_t>(ctx.num("mc.seed", 1234));
  const double t = ctx.num("mc.t", 1.0);
  const auto probes = ctx.arr("mc.probes", {0.0, 0.5, 1.0});

  json j;
  j["config_hash"] = ctx.config_hash;
  j["seed"] = ens.seed;
  j["paths"] = ens.count;
  j["t"] = t;
  j["probes"] = json::array();
  const auto h = semigroup::DiscreteHamiltonian::radial(grid, v);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.size());
  const Eigen::VectorXd heat = semigroup::heat_apply(h, t, ones);
  for (double a : probes) {
    const auto mc = semigroup::feynman_kac_mc(v, {a, 0.0, 0.0}, t, ens);
    // nearest grid node for the semigroup cross-check
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (std::abs(grid.r[i] - a) < std::abs(grid.r[best] - a)) best = i;
    j["probes"].push_back({{"x", a},
                           {"estimate", mc.estimate},
                           {"stderr", mc.stderr_},
                           {"grid_semigroup", heat(static_cast<Eigen::Index>(best))}});
  }
  const auto vminus = v.negated_negative_part();
  const auto kh = semigroup::qt_and_khasminskii(vminus, t, probes, grid, ens);
  j["khasminskii"] = {{"alpha", kh.alpha},
                      {"alpha_bound", kh.alpha_bound},
                      {"exp_bound", kh.exp_bound},
                      {"applicable", kh.applicable},
                      {"identity_ok", kh.identity_ok},
                      {"bound_ok", kh.bound_ok}};
  ctx.emit("fk_mc.json", json_text(j));
}

void run_besov_equiv(Context& ctx) {
  const auto v = potential_from(ctx);
  const auto grid = grid_from(ctx);
  const auto thetas = ctx.arr("scan.thetas", {1.0 / 16.0, 0.25, 1.0, 4.0, 16.0});
  const double s = ctx.num("besov.s", 1.0);
  const double q = ctx.num("besov.q", 1.0);

  std::vector<Eigen::VectorXd> data;
  std::vector<double> widths = ctx.arr("besov.widths", {0.5, 1.0, 2.0, 0.75, 1.5, 1.25});
  for (double w : widths) {
    Eigen::VectorXd f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      f(i) = std::exp(-grid.r[i] * grid.r[i] / (w * w));
    data.push_back(std::move(f));
  }

  const auto scan = besov::equivalence_ratio(grid, v, data, s, q, thetas);

  const auto part = besov::partition_for_grid(grid.dr, grid.r_max);
  const auto h_free = semigroup::DiscreteHamiltonian::radial(grid, PotentialSpec::zero());
  const auto h_pert = semigroup::DiscreteHamiltonian::radial(grid, v);
  io::CsvWriter csv({"function", "j", "coeff_free", "coeff_perturbed", "config_hash"});
  for (std::size_t m = 0; m < data.size(); ++m) {
    const auto pf = besov::besov_norm(h_free, data[m], s, q, part);
    const auto pp = besov::besov_norm(h_pert, data[m], s, q, part);
    for (std::size_t b = 0; b < pf.coefficients.size(); ++b)
      csv.add_row_mixed({io::CsvWriter::format(static_cast<double>(m)),
                         io::CsvWriter::format(pf.coefficients[b].first),
                         io::CsvWriter::format(pf.coefficients[b].second),
                         io::CsvWriter::format(pp.coefficients[b].second), ctx.config_hash});
  }
  ctx.emit("besov_equiv.csv", csv.str());

  json j;
  j["config_hash"] = ctx.config_hash;
  j["s"] = s;
  j["q"] = q;
  j["hypothesis_ok"] = scan.hypothesis_ok;
  j["c_low"] = scan.c_low;
  j["c_high"] = scan.c_high;
  j["thetas"] = thetas;
  if (scan.hypothesis_ok) {
    j["ratios"] = json::array();
    for (std::size_t k = 0; k < scan.thetas.size(); ++k) {
      double lo = scan.ratios[k].front(), hi = lo;
      for (double r : scan.ratios[k]) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      j["ratios"].push_back({{"theta", scan.thetas[k]},
                             {"c_low", lo},
                             {"c_high", hi},
                             {"values", scan.ratios[k]}});
    }
  }
  ctx.emit("besov_summary.json", json_text(j));
}

void run_dispersive(Context& ctx) {
  const auto v = potential_from(ctx);
  const auto grid = grid_from(ctx);
  std::vector<double> times = ctx.arr("scan.times", {});
  if (times.empty()) {
    const double t0 = 1.0, t1 = ctx.num("scan.t_max", 8.0);
    const int nt = static_cast<int>(ctx.num("scan.t_count", 7));
    for (int k = 0; k < nt; ++k)
      times.push_back(t0 * std::pow(t1 / t0, static_cast<double>(k) / (nt - 1)));
  }
  std::vector<Eigen::VectorXd> data;
  for (double w : ctx.arr("dispersive.widths", {0.3, 0.4, 0.5})) {
    Eigen::VectorXd f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      f(i) = std::exp(-grid.r[i] * grid.r[i] / (w * w));
    data.push_back(std::move(f));
  }
  const auto rep = wave::dispersive_ratio(grid, v, data, times);

  io::CsvWriter csv({"datum", "t", "sup_norm", "ratio", "method", "config_hash"});
  for (std::size_t m = 0; m < data.size(); ++m)
    for (std::size_t k = 0; k < times.size(); ++k)
      csv.add_row_mixed({io::CsvWriter::format(static_cast<double>(m)),
                         io::CsvWriter::format(times[k]),
                         io::CsvWriter::format(rep.sup_norms[m][k]),
                         io::CsvWriter::format(rep.ratios[m][k]), "spectral-eigen",
                         ctx.config_hash});
  ctx.emit("dispersive_run.csv", csv.str());

  const auto hyp =
      potential::check_hypotheses(v, ctx.num("potential.split_radius", 2.0), grid);
  std::ostringstream hyp_text;
  hyp_text << hyp.v_kato << '|' << hyp.vminus_kato << '|' << hyp.smallness_value << '|'
           << hyp.selfadjoint_ok << hyp.smallness_ok << hyp.negative_part_ok;

  json j;
  j["config_hash"] = ctx.config_hash;
  j["c_star"] = rep.c_star;
  j["bound_state_present"] = rep.bound_state_present;
  j["resonance_dip"] = rep.resonance_dip;
  j["besov_perturbed"] = rep.besov_perturbed;
  j["besov_free"] = rep.besov_free;
  j["hypothesis_hash"] = io::hash_hex(hyp_text.str());
  ctx.emit("dispersive_summary.json", json_text(j));
}

}  // namespace

bool known_subcommand(const std::string& name) {
  static const std::vector<std::string> names{
      "kato-norm",  "hypotheses", "resonance-scan", "spectral-measure",
      "heat-check", "fk-mc",      "besov-equiv",    "dispersive-run",
      "all"};
  for (const auto& n : names)
    if (n == name) return true;
  return false;
}

RunResult run(const std::string& subcommand, io::TomlTable config, const std::string& out_dir,
              std::size_t jobs) {
  RunResult result;
  if (!known_subcommand(subcommand)) {
    result.exit_code = 2;
    result.message = "unknown subcommand: " + subcommand;
    return result;
  }

  const auto start = std::chrono::steady_clock::now();
  Context ctx;
  ctx.config = std::move(config);
  ctx.out_dir = out_dir;
  ctx.config_hash = io::hash_hex(io::canonical_config(ctx.config));
  ctx.jobs = jobs;
  result.config_hash = ctx.config_hash;

  std::filesystem::create_directories(out_dir);
  try {
    if (subcommand == "kato-norm" || subcommand == "all") run_kato_norm(ctx);
    if (subcommand == "hypotheses" || subcommand == "all") run_hypotheses(ctx);
    if (subcommand == "resonance-scan" || subcommand == "all") run_resonance_scan(ctx);
    if (subcommand == "spectral-measure" || subcommand == "all") run_spectral_measure(ctx);
    if (subcommand == "heat-check" || subcommand == "all") run_heat_check(ctx);
    if (subcommand == "fk-mc" || subcommand == "all") run_fk_mc(ctx);
    if (subcommand == "besov-equiv" || subcommand == "all") run_besov_equiv(ctx);
    if (subcommand == "dispersive-run" || subcommand == "all") run_dispersive(ctx);
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.message = e.what();
    return result;
  }

  std::string all_bytes;
  for (const auto& [name, content] : ctx.artifacts) {
    if (!content.empty()) {
      std::ofstream f(out_dir + "/" + name, std::ios::binary);
      f << content;
    }
    all_bytes += content;
    result.artifacts.push_back(name);
  }
  result.content_hash = io::hash_hex(all_bytes);

  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
  nlohmann::json manifest;
  manifest["config_hash"] = ctx.config_hash;
  manifest["content_hash"] = result.content_hash;
  manifest["tool_version"] = kToolVersion;
  manifest["subcommand"] = subcommand;
  manifest["jobs"] = jobs;
  manifest["wall_time_s"] = elapsed.count();
  manifest["artifacts"] = nlohmann::json::array();
  for (const auto& [name, content] : ctx.artifacts)
    manifest["artifacts"].push_back({{"file", name}, {"hash", io::hash_hex(content)}});
  std::ofstream mf(out_dir + "/manifest.json");
  mf << manifest.dump(2) << "\n";

  return result;
}

}  // namespace wavelab::experiments
