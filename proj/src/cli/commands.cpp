#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "eamac/cli.hpp"
#include "eamac/errors.hpp"
#include "eamac/fock_oracle.hpp"
#include "eamac/gaussian_core.hpp"
#include "eamac/parallel.hpp"

#ifndef EAMAC_VERSION
#define EAMAC_VERSION "0.0.0"
#endif

namespace eamac::cli {

namespace {

// Shortest text that round-trips to the same double.
std::string num(double v) { return fmt::format("{}", v); }

// Collects output lines and renders them in the requested format.
class Emitter {
 public:
  explicit Emitter(const RunConfig& cfg) : cfg_(cfg) {}

  // Information quantities are converted to bits on output when requested.
  double info(double nats) const { return cfg_.bits ? nats / std::numbers::ln2 : nats; }

  void field(const std::string& key, const std::string& value) { fields_.emplace_back(key, value); }
  void field(const std::string& key, double value) { field(key, num(value)); }
  void info_field(const std::string& key, double nats) { field(key, info(nats)); }

  void table(std::vector<std::string> header) { header_ = std::move(header); }
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  void polygon(std::vector<std::pair<double, double>> pts) { polygon_ = std::move(pts); }

  std::string render() const {
    switch (cfg_.format) {
      case Format::csv:
        return render_csv();
      case Format::svg:
        return render_svg();
      case Format::record:
      default:
        return render_record();
    }
  }

 private:
  void preamble(std::ostream& os, const char* prefix) const {
    os << prefix << "eamac " << version() << "\n";
    for (const auto& [k, v] : resolved_config(cfg_)) os << prefix << "config." << k << " = " << v << "\n";
  }

  std::string render_record() const {
    std::ostringstream os;
    os << "# eamac " << version() << "\n[config]\n";
    for (const auto& [k, v] : resolved_config(cfg_)) os << k << " = " << v << "\n";
    os << "\n[result]\n";
    for (const auto& [k, v] : fields_) os << k << " = " << v << "\n";
    if (!header_.empty()) {
      os << "\n[table]\ncolumns = " << join(header_, ", ") << "\n";
      for (const auto& r : rows_) os << "row = " << join(r, ", ") << "\n";
    }
    return os.str();
  }

  std::string render_csv() const {
    std::ostringstream os;
    preamble(os, "# ");
    for (const auto& [k, v] : fields_) os << "# " << k << " = " << v << "\n";
    if (!header_.empty()) {
      os << join(header_, ",") << "\n";
      for (const auto& r : rows_) os << join(r, ",") << "\n";
    }
    return os.str();
  }

  std::string render_svg() const {
    if (polygon_.empty()) throw ConfigError("svg output is only available for region and covert-rect");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : polygon_) {
      mx = std::max(mx, x);
      my = std::max(my, y);
    }
    const double w = 400.0, h = 400.0, pad = 40.0;
    auto sx = [&](double x) { return pad + (mx > 0.0 ? x / mx : 0.0) * (w - 2 * pad); };
    auto sy = [&](double y) { return h - pad - (my > 0.0 ? y / my : 0.0) * (h - 2 * pad); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n";
    os << "<!--\n";
    preamble(os, "");
    for (const auto& [k, v] : fields_) os << k << " = " << v << "\n";
    os << "-->\n";
    os << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", pad, h - pad, w - pad);
    os << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", pad, h - pad, pad);
    os << "<polygon points=\"";
    for (std::size_t i = 0; i < polygon_.size(); ++i) {
      os << (i ? " " : "") << fmt::format("{:.3f},{:.3f}", sx(polygon_[i].first), sy(polygon_[i].second));
    }
    os << "\" fill=\"#9ecae1\" stroke=\"#08519c\"/>\n";
    os << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">R_X (max {})</text>\n", w / 2 - 40, h - 10,
                      num(mx));
    os << fmt::format("<text x=\"4\" y=\"{}\" font-size=\"12\">R_Y (max {})</text>\n", pad - 10, num(my));
    os << "</svg>\n";
    return os.str();
  }

  static std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
  }

  const RunConfig& cfg_;
  std::vector<std::pair<std::string, std::string>> fields_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<double, double>> polygon_;
};

void emit_region(Emitter& out, const region::RateRegion& r, int boundary_points) {
  for (const auto& c : r.constraints) {
    out.info_field(c.label, c.value);
    out.field(c.label + ".active", c.active ? "true" : "false");
  }
  if (r.sum_branch != "none") {
    out.field("sum_branch", r.sum_branch);
    out.info_field("sum_branch.X-first", r.sum_branch_x_first);
    out.info_field("sum_branch.Y-first", r.sum_branch_y_first);
    out.field("in_validity_region", r.in_validity_region ? "true" : "false");
    out.field("max_tail", r.max_tail);
  }
  out.field("vertex_count", static_cast<double>(r.vertices.size()));
  out.table({"kind", "index", "r_x", "r_y"});
  std::vector<std::pair<double, double>> poly;
  for (std::size_t i = 0; i < r.vertices.size(); ++i) {
    const double x = out.info(r.vertices[i].first);
    const double y = out.info(r.vertices[i].second);
    poly.emplace_back(x, y);
    out.row({"vertex", std::to_string(i), num(x), num(y)});
  }
  if (boundary_points > 0) {
    const double a = r.bound("X-bound");
    const double b = r.bound("Y-bound");
    const double c = r.bound("sum-bound");
    for (int i = 0; i < boundary_points; ++i) {
      const double x = boundary_points == 1 ? 0.0 : a * i / (boundary_points - 1);
      const double y = std::max(0.0, std::min(b, c - x));
      out.row({"boundary", std::to_string(i), num(out.info(x)), num(out.info(y))});
    }
  }
  out.polygon(std::move(poly));
}

std::string cmd_region(const RunConfig& cfg) {
  Emitter out(cfg);
  mac::ModulationConfig m{cfg.n_s, cfg.numerics.psk_order};
  emit_region(out, region::achievable_region(cfg.mac_params(), m, cfg.numerics), cfg.boundary_points);
  return out.render();
}

std::string cmd_covert_rect(const RunConfig& cfg) {
  Emitter out(cfg);
  emit_region(out, region::covert_rectangle(cfg.mac_params(), cfg.plan.s), 0);
  return out.render();
}

std::string cmd_budget(const RunConfig& cfg) {
  Emitter out(cfg);
  const auto p = cfg.mac_params();
  const auto& in = cfg.plan;
  const double b = covert::covert_budget(in.n, in.delta, p);
  out.field("prefactor", covert::budget_prefactor(p));
  out.field("q_inv", covert::q_inv((1.0 - in.delta) / 2.0));
  out.field("budget", b);
  out.field("usage", covert::budget_usage(p, in.alpha, in.beta, in.s));
  out.field("feasible", covert::budget_feasible(in.n, in.delta, p, in.alpha, in.beta, in.s) ? "true" : "false");
  // Frontier alpha tau + beta (1 - tau) = B / s.
  out.field("frontier.alpha_max", p.tau() > 0.0 ? b / (in.s * p.tau()) : INFINITY);
  out.field("frontier.beta_max", p.tau() < 1.0 ? b / (in.s * (1.0 - p.tau())) : INFINITY);
  out.field("willie_tv_leading", covert::willie_tv_leading(in.n, in.alpha, in.beta, in.s, p));
  return out.render();
}

void emit_plan(Emitter& out, const covert::CovertPlan& plan) {
  const auto& l1 = plan.layer1;
  const auto& l2 = plan.layer2;
  out.field("budget", plan.budget);
  out.field("usage", plan.usage);
  out.field("feasible", "true");
  out.info_field("log_M_X1", l1.log_mx1);
  out.info_field("log_M_Y1", l1.log_my1);
  out.info_field("log_M_X1M_Y1", l1.log_mx1my1);
  out.info_field("log_M_X1S_X", l1.log_mx1sx);
  out.info_field("log_M_Y1S_Y", l1.log_my1sy);
  out.info_field("log_M_X1S_XM_Y1S_Y", l1.log_keys_total);
  out.info_field("log_M_X2", l2.log_mx2);
  out.info_field("log_M_Y2", l2.log_my2);
  out.info_field("log_M_X2M_Y2", l2.log_mx2my2);
  out.field("l_x", std::to_string(l2.l_x));
  out.field("l_y", std::to_string(l2.l_y));
  out.info_field("entangled_x", l2.entangled_nats_x);
  out.info_field("entangled_y", l2.entangled_nats_y);
  out.field("order.layer1", l1.order_sum);
  out.field("order.layer2", l2.order_sum);
  out.field("chernoff_truncation", plan.chernoff);
  out.field("willie_tv_leading", plan.willie_tv);
}

std::string cmd_plan(const RunConfig& cfg) {
  Emitter out(cfg);
  emit_plan(out, covert::make_plan(cfg.plan));
  return out.render();
}

void set_param(RunConfig& c, const std::string& name, double v) {
  if (name == "tau") c.tau = v;
  else if (name == "kappa") c.kappa = v;
  else if (name == "n_b") c.n_b = v;
  else if (name == "n_s") c.n_s = v;
  else if (name == "s") c.plan.s = v;
  else if (name == "n") c.plan.n = v;
  else if (name == "alpha") c.plan.alpha = v;
  else if (name == "beta") c.plan.beta = v;
  else if (name == "delta") c.plan.delta = v;
  else if (name == "mu_bar") c.plan.mu_bar = v;
  else if (name == "epsilon") c.plan.epsilon = v;
  else throw ConfigError("unknown sweep parameter " + name);
}

std::vector<std::string> sweep_columns(const std::string& target) {
  if (target == "region") return {"x_bound", "y_bound", "sum_bound", "sum_active", "sum_branch", "valid"};
  if (target == "covert-rect") return {"x_bound", "y_bound"};
  if (target == "budget") return {"budget", "usage", "feasible", "willie_tv_leading"};
  return {"feasible", "log_M_X1", "log_M_Y1", "log_M_X1M_Y1", "log_M_X1S_X", "log_M_Y1S_Y",
          "log_M_X1S_XM_Y1S_Y", "log_M_X2", "log_M_Y2", "log_M_X2M_Y2", "l_x", "l_y"};
}

std::vector<std::string> sweep_point(RunConfig c, const Emitter& out) {
  c.plan.params = c.mac_params();
  const auto p = c.plan.params;
  if (c.sweep_target == "region") {
    const auto r = region::achievable_region(p, {c.n_s, c.numerics.psk_order}, c.numerics);
    return {num(out.info(r.bound("X-bound"))), num(out.info(r.bound("Y-bound"))),
            num(out.info(r.bound("sum-bound"))), r.constraints[2].active ? "1" : "0", r.sum_branch,
            r.in_validity_region ? "1" : "0"};
  }
  if (c.sweep_target == "covert-rect") {
    const auto r = region::covert_rectangle(p, c.plan.s);
    return {num(out.info(r.bound("X-bound"))), num(out.info(r.bound("Y-bound")))};
  }
  const auto& in = c.plan;
  if (c.sweep_target == "budget") {
    return {num(covert::covert_budget(in.n, in.delta, p)), num(covert::budget_usage(p, in.alpha, in.beta, in.s)),
            covert::budget_feasible(in.n, in.delta, p, in.alpha, in.beta, in.s) ? "1" : "0",
            num(covert::willie_tv_leading(in.n, in.alpha, in.beta, in.s, p))};
  }
  try {
    const auto plan = covert::make_plan(in);
    const auto& a = plan.layer1;
    const auto& b = plan.layer2;
    return {"1", num(out.info(a.log_mx1)), num(out.info(a.log_my1)), num(out.info(a.log_mx1my1)),
            num(out.info(a.log_mx1sx)), num(out.info(a.log_my1sy)), num(out.info(a.log_keys_total)),
            num(out.info(b.log_mx2)), num(out.info(b.log_my2)), num(out.info(b.log_mx2my2)),
            std::to_string(b.l_x), std::to_string(b.l_y)};
  } catch (const InfeasibleError&) {
    std::vector<std::string> cells(sweep_columns("plan").size(), "nan");
    cells[0] = "0";
    return cells;
  }
}

std::string cmd_sweep(const RunConfig& cfg) {
  Emitter out(cfg);
  const auto& ax = cfg.axes;
  const int nx = ax[0].points;
  const int ny = ax.size() > 1 ? ax[1].points : 1;
  const std::size_t total = static_cast<std::size_t>(nx) * ny;
  std::vector<std::vector<std::string>> cells(total);
  parallel_for(total, cfg.workers, [&](std::size_t idx) {
    RunConfig c = cfg;
    const int i = static_cast<int>(idx / ny);
    const int j = static_cast<int>(idx % ny);
    set_param(c, ax[0].param, ax[0].at(i));
    if (ax.size() > 1) set_param(c, ax[1].param, ax[1].at(j));
    std::vector<std::string> row{num(ax[0].at(i))};
    if (ax.size() > 1) row.push_back(num(ax[1].at(j)));
    try {
      for (auto& v : sweep_point(c, out)) row.push_back(std::move(v));
    } catch (const DomainError& e) {
      throw ConfigError(fmt::format("sweep point {}: {}", idx, e.what()));
    }
    cells[idx] = std::move(row);
  });
  std::vector<std::string> header{ax[0].param};
  if (ax.size() > 1) header.push_back(ax[1].param);
  for (auto& c : sweep_columns(cfg.sweep_target)) header.push_back(c);
  out.field("points", static_cast<double>(total));
  out.table(std::move(header));
  for (auto& r : cells) out.row(std::move(r));
  return out.render();
}

struct Check {
  std::string name;
  double measured;
  double tolerance;
  bool pass;
};

std::string cmd_validate(const RunConfig& cfg) {
  if (!cfg.seed) throw ConfigError("validate needs a seed (--seed or 'seed' in the config)");
  Emitter out(cfg);
  std::vector<Check> checks;
  const auto p = cfg.mac_params();

  {
    double worst = 0.0;
    for (double ns : {0.1, 0.5}) {
      const double exact = gaussian::entropy_from_cov(gaussian::CovarianceMatrix::thermal(ns));
      const auto th = fock::thermal_fock(ns, 40);
      const std::vector<int> keep{0};
      const auto reduced = fock::partial_trace(fock::to_density(fock::tmsv_fock(ns, 40)), keep);
      worst = std::max({worst, std::abs(exact - fock::entropy_fock(th)), std::abs(exact - fock::entropy_fock(reduced))});
    }
    checks.push_back({"gaussian_fock_entropy", worst, 1e-6, worst <= 1e-6});
  }
  {
    std::mt19937_64 rng(*cfg.seed);
    std::uniform_real_distribution<double> u01(0.01, 0.99), unb(0.1, 10.0), uns(0.0, 5.0);
    double cov_err = 0.0, nt_err = 0.0, table_gap = 0.0;
    for (int i = 0; i < 100; ++i) {
      const mac::MacParams q(u01(rng), u01(rng), unb(rng));
      const mac::ModulationConfig m{uns(rng), 64};
      for (auto s : {mac::Sender::X, mac::Sender::Y}) {
        const int other = s == mac::Sender::X ? 2 : 1;
        const std::vector<int> meas{other};
        const gaussian::GaussianState st(mac::bob_joint_cov(q, m, 0.3, 1.1));
        const auto cond = gaussian::schur_condition_heterodyne(st, meas, Eigen::VectorXd::Zero(2));
        const auto want = mac::conditioned_cov(q, m, s, s == mac::Sender::X ? 0.3 : 1.1);
        cov_err = std::max(cov_err, (cond.cov().matrix() - want.matrix()).cwiseAbs().maxCoeff());
        const auto eff = mac::effective_params(q, m, s, true);
        nt_err = std::max(nt_err, std::abs(eff.n_t_eff - q.n_t()));
        table_gap = std::max(table_gap, std::abs(mac::tabulated_conditioned_n_t(q, m, s) - q.n_t()));
      }
    }
    checks.push_back({"schur_conditioned_cov", cov_err, 1e-12, cov_err <= 1e-12});
    checks.push_back({"conditioned_n_t_eff_equals_n_t", nt_err, 1e-12, nt_err <= 1e-12});
    out.field("note.tabulated_conditioned_n_t_max_gap", table_gap);
  }
  {
    const double a = 1e-3, s = 1e-2;
    const auto lead = covert::relent_leading(p, a, a, s, covert::Receiver::Bob, covert::Marginal::joint);
    const auto exact = covert::relent_exact(p, a, a, s, covert::Receiver::Bob, covert::Marginal::joint);
    const double rel = std::abs(exact.d - lead.d) / exact.d;
    checks.push_back({"relent_leading_vs_exact", rel, 0.1, rel <= 0.1});
  }
  {
    const double n = static_cast<double>(cfg.tv_n);
    const double usage = covert::covert_budget(n, cfg.tv_target, p);
    const double s = 0.05;
    const double alpha = usage / s;
    const double lead = covert::willie_tv_leading(n, alpha, alpha, s, p);
    const auto mc = covert::willie_tv_mc(cfg.tv_n, alpha, alpha, s, p, cfg.tv_samples, cfg.seed, cfg.workers);
    const double dev = std::abs(mc.tv - lead);
    checks.push_back({"willie_tv_mc_vs_leading", dev, 0.05, dev <= 0.05});
    out.field("note.willie_tv_mc", mc.tv);
    out.field("note.willie_tv_mc_std_error", mc.std_error);
    out.field("note.willie_tv_leading", lead);
  }

  bool all = true;
  out.table({"check", "measured", "tolerance", "pass"});
  for (const auto& c : checks) {
    all = all && c.pass;
    out.row({c.name, num(c.measured), num(c.tolerance), c.pass ? "pass" : "fail"});
  }
  out.field("all_pass", all ? "true" : "false");
  return out.render();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string version() { return EAMAC_VERSION; }

std::string run(const RunConfig& cfg) {
  if (cfg.command == "region") return cmd_region(cfg);
  if (cfg.command == "covert-rect") return cmd_covert_rect(cfg);
  if (cfg.command == "budget") return cmd_budget(cfg);
  if (cfg.command == "plan") return cmd_plan(cfg);
  if (cfg.command == "sweep") return cmd_sweep(cfg);
  if (cfg.command == "validate") return cmd_validate(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Rate regions and covert throughput for the entanglement-assisted bosonic MAC"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::string out;
    std::string format = "record";
    std::optional<std::uint64_t> seed;
    bool bits = false;
    unsigned workers = 0;
  } flags;

  const std::vector<std::pair<const char*, const char*>> subs{
      {"region", "Achievable rate region for one signal power"},
      {"covert-rect", "Small-signal limit rectangle"},
      {"budget", "Covert power budget and feasibility"},
      {"plan", "Two-layer covert plan: nine rates and entanglement use"},
      {"sweep", "Grid sweep of region, covert-rect, budget or plan"},
      {"validate", "Oracle cross-check suite"}};
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "key = value config file");
    sub->add_option("--out", flags.out, "Output path (default stdout)");
    sub->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"csv", "record", "svg"}));
    sub->add_option("--seed", flags.seed, "Seed for stochastic commands");
    sub->add_flag("--bits", flags.bits, "Report information quantities in bits");
    sub->add_option("--workers", flags.workers, "Worker threads")->check(CLI::Range(1u, 256u));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto keys = flags.config.empty() ? std::map<std::string, std::string>{}
                                           : parse_key_values(read_file(flags.config));
    RunConfig cfg = make_config(command, keys);
    if (flags.seed) cfg.seed = flags.seed;
    if (flags.workers > 0) cfg.workers = flags.workers;
    cfg.bits = flags.bits;
    cfg.format = flags.format == "csv" ? Format::csv : flags.format == "svg" ? Format::svg : Format::record;
    const std::string text = run(cfg);
    if (flags.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream os(flags.out, std::ios::binary);
      if (!os) throw ConfigError("cannot write output file '" + flags.out + "'");
      os << text;
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible (" << e.constraint() << "): " << e.what() << "\n";
    return kInfeasible;
  } catch (const TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << " (try cutoff >= " << e.required_cutoff() << ")\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
}

}  // namespace eamac::cli
