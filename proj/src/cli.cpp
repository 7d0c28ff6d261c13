#include "qfrac/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfrac/campaign.hpp"
#include "qfrac/ekoperator.hpp"
#include "qfrac/errors.hpp"

namespace qfrac {

namespace {

struct GlobalOptions {
  double tol = TruncationPolicy{}.rel_tol;
  std::int64_t max_terms = TruncationPolicy{}.max_terms;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string output;
  std::string format = "json-lines";
  bool no_timestamp = false;

  CLI::Option* tol_opt = nullptr;
  CLI::Option* max_terms_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* output_opt = nullptr;
  CLI::Option* format_opt = nullptr;

  TruncationPolicy policy() const {
    TruncationPolicy p;
    p.rel_tol = tol;
    p.max_terms = max_terms;
    p.validate();
    return p;
  }
};

struct OperatorOptions {
  double q = 0.5;
  double eta = 0.0;
  double mu = 1.0;
  double beta = 1.0;
  double t = 1.0;
  std::string f = "(power 1)";
};

void add_operator_options(CLI::App* cmd, OperatorOptions& o) {
  cmd->add_option("--q", o.q, "Deformation parameter in (0,1)");
  cmd->add_option("--eta", o.eta, "Operator eta (> -1)");
  cmd->add_option("--mu", o.mu, "Operator order mu (> 0)");
  cmd->add_option("--beta", o.beta, "Operator beta (> 0)");
  cmd->add_option("--t", o.t, "Evaluation point (> 0)");
  cmd->add_option("--f", o.f, "Function s-expression");
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / std::max(scale, std::numeric_limits<double>::min());
}

// Writes to --output when given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw InvalidParameter("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int cmd_eval(const GlobalOptions& g, const OperatorOptions& o, const std::string& form,
             std::ostream& out) {
  const DeformationParam q(o.q);
  const OperatorParams p(o.eta, o.mu, o.beta);
  const FunctionSpec f = FunctionSpec::parse(o.f);
  const TruncationPolicy policy = g.policy();
  auto print = [&](const std::string& prefix, const SeriesResult& r) {
    out << prefix << "value " << format_number(r.value) << '\n'
        << prefix << "terms_used " << r.terms_used << '\n'
        << prefix << "tail_estimate " << format_number(r.tail_estimate) << '\n';
  };
  if (form == "series") {
    print("", ek_series(f, o.t, p, q, policy));
  } else if (form == "integral") {
    print("", ek_integral(f, o.t, p, q, policy));
  } else {
    const SeriesResult s = ek_series(f, o.t, p, q, policy);
    const SeriesResult i = ek_integral(f, o.t, p, q, policy);
    print("series_", s);
    print("integral_", i);
    out << "relative_difference " << format_number(relative_gap(s.value, i.value)) << '\n';
  }
  return 0;
}

struct VerifyOptions {
  std::string config_path;
  std::string theorems;
  std::int64_t cases = 0;
  std::string expect;
  std::string family;
  std::string t, q1, q2, eta, mu, beta, zeta, nu, delta;
  CLI::Option* cases_opt = nullptr;
};

int cmd_verify(const GlobalOptions& g, const VerifyOptions& v, std::ostream& out,
               std::ostream& err) {
  CampaignConfig config;
  if (!v.config_path.empty()) {
    std::ifstream in(v.config_path, std::ios::binary);
    if (!in) throw InvalidParameter("cannot read config file '" + v.config_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    config = parse_campaign_config(text.str());
  }
  if (!v.theorems.empty()) {
    config.theorems.clear();
    std::stringstream ids(v.theorems);
    for (std::string id; std::getline(ids, id, ',');) config.theorems.push_back(parse_theorem_id(id));
  }
  if (v.cases_opt->count()) config.cases = v.cases;
  if (!v.expect.empty()) {
    if (v.expect == "direct") config.expect = Expectation::direct;
    else if (v.expect == "reversed") config.expect = Expectation::reversed;
    else throw ParseError("--expect must be 'direct' or 'reversed'");
  }
  if (!v.family.empty()) config.family = parse_family_kind(v.family);
  const std::pair<const std::string*, std::vector<double>*> axes[] = {
      {&v.t, &config.t_values},     {&v.q1, &config.q1_grid},  {&v.q2, &config.q2_grid},
      {&v.eta, &config.eta_grid},   {&v.mu, &config.mu_grid},  {&v.beta, &config.beta_grid},
      {&v.zeta, &config.zeta_grid}, {&v.nu, &config.nu_grid},  {&v.delta, &config.delta_grid}};
  for (auto [text, grid] : axes) {
    if (!text->empty()) *grid = parse_number_list(*text);
  }
  if (g.tol_opt->count()) config.policy.rel_tol = g.tol;
  if (g.max_terms_opt->count()) config.policy.max_terms = g.max_terms;
  if (g.seed_opt->count()) config.seed = g.seed;
  if (g.jobs_opt->count()) config.jobs = g.jobs;
  if (g.output_opt->count()) config.output = g.output;
  if (g.format_opt->count()) config.format = parse_report_format(g.format);
  if (g.no_timestamp) config.timestamp = false;
  config.validate();

  Sink sink(config.output, out);
  const CampaignSummary s = run_campaign(config, sink.stream());
  sink.stream().flush();
  err << "holds=" << s.holds << " violated=" << s.violated
      << " inconclusive=" << s.inconclusive << " min_margin=" << format_number(s.min_margin);
  const bool lipschitz = std::any_of(config.theorems.begin(), config.theorems.end(), [](TheoremId id) {
    return id == TheoremId::T5 || id == TheoremId::T6;
  });
  if (lipschitz) err << " negative_brackets=" << s.negative_brackets;
  err << '\n';
  return s.violated == 0 ? 0 : 1;
}

struct SweepOptions {
  std::string axis = "q";
  double from = 0.1;
  double to = 0.9;
  int steps = 9;
};

int cmd_sweep(const GlobalOptions& g, const OperatorOptions& o, const SweepOptions& s,
              std::ostream& out) {
  if (s.steps < 1) throw InvalidParameter("sweep needs --steps >= 1");
  if (!(s.from <= s.to) || !std::isfinite(s.from) || !std::isfinite(s.to)) {
    throw InvalidParameter("empty sweep range");
  }
  if (s.steps > 1 && s.from == s.to) throw InvalidParameter("empty sweep range");
  const FunctionSpec f = FunctionSpec::parse(o.f);
  const TruncationPolicy policy = g.policy();

  std::vector<std::pair<double, OperatorOptions>> points;
  for (int i = 0; i < s.steps; ++i) {
    const double x = s.steps == 1 ? s.from : s.from + (s.to - s.from) * i / (s.steps - 1);
    OperatorOptions p = o;
    if (s.axis == "q") p.q = x;
    else if (s.axis == "eta") p.eta = x;
    else if (s.axis == "mu") p.mu = x;
    else if (s.axis == "beta") p.beta = x;
    else throw InvalidParameter("sweep axis must be q, eta, mu or beta");
    // Validate every point before emitting any output.
    DeformationParam{p.q};
    OperatorParams(p.eta, p.mu, p.beta);
    points.emplace_back(x, p);
  }

  Sink sink(g.output, out);
  std::ostream& os = sink.stream();
  os << "axis_value,terms_used,tail_estimate,series_value,integral_value,relative_gap\n";
  for (const auto& [x, p] : points) {
    const DeformationParam q(p.q);
    const OperatorParams params(p.eta, p.mu, p.beta);
    const SeriesResult sr = ek_series(f, p.t, params, q, policy);
    const SeriesResult ir = ek_integral(f, p.t, params, q, policy);
    os << format_number(x) << ',' << sr.terms_used << ',' << format_number(sr.tail_estimate)
       << ',' << format_number(sr.value) << ',' << format_number(ir.value) << ','
       << format_number(relative_gap(sr.value, ir.value)) << '\n';
  }
  return 0;
}

int cmd_reduce_check(const GlobalOptions& g, double gap_tol, double beta, double t,
                     std::ostream& out) {
  if (beta != 1.0) throw InvalidParameter("reduce-check fixes beta=1");
  if (!(gap_tol >= 0.0)) throw InvalidParameter("--tol must be nonnegative");
  if (!(t > 0.0)) throw InvalidParameter("t must be positive");
  TruncationPolicy policy;
  if (g.max_terms_opt->count()) policy.max_terms = g.max_terms;
  policy.validate();

  const double qs[] = {0.3, 0.6, 0.9};
  const double etas[] = {-0.5, 0.0, 1.0};
  const double mus[] = {0.5, 1.0, 2.0};
  double worst = 0.0;
  int cases = 0;
  for (double qv : qs) {
    for (double eta : etas) {
      for (double mu : mus) {
        for (const FunctionSpec& f : standard_test_functions()) {
          const DeformationParam q(qv);
          const double s = ek_series(f, t, OperatorParams(eta, mu, 1.0), q, policy).value;
          const double k = kober(f, t, eta, mu, q, policy).value;
          worst = std::max(worst, relative_gap(s, k));
          ++cases;
        }
      }
    }
  }
  out << "cases " << cases << '\n' << "max_relative_gap " << format_number(worst) << '\n';
  return worst <= gap_tol ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"q-fractional Erdelyi-Kober operators and Chebyshev-type inequality checks",
               "qfrac"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  g.tol_opt = app.add_option("--tol", g.tol, "Relative truncation tolerance");
  g.max_terms_opt = app.add_option("--max-terms", g.max_terms, "Series term budget");
  g.seed_opt = app.add_option("--seed", g.seed, "Campaign seed");
  g.jobs_opt = app.add_option("--jobs", g.jobs, "Worker threads for verify");
  g.output_opt = app.add_option("--output", g.output, "Write records to this file");
  g.format_opt = app.add_option("--format", g.format, "json-lines or csv");
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit the generated_at header line");

  OperatorOptions eval_opts;
  std::string form = "series";
  CLI::App* eval = app.add_subcommand("eval", "Evaluate the operator at one point");
  add_operator_options(eval, eval_opts);
  eval->add_option("--form", form, "series, integral or both")
      ->check(CLI::IsMember({"series", "integral", "both"}));

  VerifyOptions vopts;
  CLI::App* verify = app.add_subcommand("verify", "Run a seeded inequality campaign");
  verify->add_option("--config", vopts.config_path, "Campaign config file");
  verify->add_option("--theorems", vopts.theorems, "Comma separated ids, e.g. T1,T3");
  vopts.cases_opt = verify->add_option("--cases", vopts.cases, "Cases per theorem");
  verify->add_option("--expect", vopts.expect, "direct or reversed");
  verify->add_option("--family", vopts.family, "Override the function family");
  verify->add_option("--t", vopts.t, "t values");
  verify->add_option("--q1", vopts.q1, "q1 grid");
  verify->add_option("--q2", vopts.q2, "q2 grid");
  verify->add_option("--eta", vopts.eta, "eta grid");
  verify->add_option("--mu", vopts.mu, "mu grid");
  verify->add_option("--beta", vopts.beta, "beta grid");
  verify->add_option("--zeta", vopts.zeta, "zeta grid");
  verify->add_option("--nu", vopts.nu, "nu grid");
  verify->add_option("--delta", vopts.delta, "delta grid");

  OperatorOptions sweep_opts;
  SweepOptions sopts;
  CLI::App* sweep = app.add_subcommand("sweep", "Truncation study along one parameter axis");
  add_operator_options(sweep, sweep_opts);
  sweep->add_option("--axis", sopts.axis, "q, eta, mu or beta");
  sweep->add_option("--from", sopts.from, "First axis value");
  sweep->add_option("--to", sopts.to, "Last axis value");
  sweep->add_option("--steps", sopts.steps, "Number of points");

  double gap_tol = 1e-12;
  double reduce_beta = 1.0;
  double reduce_t = 1.0;
  CLI::App* reduce = app.add_subcommand("reduce-check", "Compare beta=1 against the Kober operator");
  reduce->add_option("--tol", gap_tol, "Largest admissible relative gap");
  reduce->add_option("--beta", reduce_beta, "Must be 1");
  reduce->add_option("--t", reduce_t, "Evaluation point");

  try {
    app.parse(argc, argv);
    if (*eval) return cmd_eval(g, eval_opts, form, out);
    if (*verify) return cmd_verify(g, vopts, out, err);
    if (*sweep) return cmd_sweep(g, sweep_opts, sopts, out);
    // A top-level --tol is the truncation tolerance; the subcommand's own
    // --tol is the gap threshold.
    if (*reduce) return cmd_reduce_check(g, gap_tol, reduce_beta, reduce_t, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace qfrac
