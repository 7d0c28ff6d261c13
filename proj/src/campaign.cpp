#include "qfrac/campaign.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace qfrac {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename Int>
Int parse_integer(std::string_view text, const std::string& key) {
  Int v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError("invalid integer for '" + key + "': '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ParseError("invalid boolean for '" + key + "': '" + std::string(text) + "'");
}

std::vector<double>* grid_axis(CampaignConfig& c, std::string_view axis) {
  if (axis == "t") return &c.t_values;
  if (axis == "q1") return &c.q1_grid;
  if (axis == "q2") return &c.q2_grid;
  if (axis == "eta") return &c.eta_grid;
  if (axis == "mu") return &c.mu_grid;
  if (axis == "beta") return &c.beta_grid;
  if (axis == "zeta") return &c.zeta_grid;
  if (axis == "nu") return &c.nu_grid;
  if (axis == "delta") return &c.delta_grid;
  return nullptr;
}

template <typename T>
const T& pick(std::mt19937_64& eng, const std::vector<T>& grid) {
  return grid[static_cast<std::size_t>(eng() % grid.size())];
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

FamilyKind default_family(TheoremId id, Expectation expect) {
  switch (id) {
    case TheoremId::T1:
    case TheoremId::T2:
      return expect == Expectation::reversed ? FamilyKind::asynchronous_pair_plus_nonneg
                                             : FamilyKind::synchronous_triple;
    case TheoremId::T3:
    case TheoremId::T4: return FamilyKind::bounded_triple;
    case TheoremId::T5:
    case TheoremId::T6: return FamilyKind::lipschitz_triple;
  }
  return FamilyKind::synchronous_triple;
}

nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  for (std::string_view item : split(text, ',')) {
    if (item.empty()) throw ParseError("empty entry in number list '" + std::string(text) + "'");
    double v = 0.0;
    const char* first = item.data();
    const char* last = item.data() + item.size();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      throw ParseError("invalid number '" + std::string(item) + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::string_view to_string(ReportFormat f) {
  return f == ReportFormat::csv ? "csv" : "json-lines";
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json-lines" || text == "jsonl") return ReportFormat::json_lines;
  if (text == "csv") return ReportFormat::csv;
  throw ParseError("unknown format '" + std::string(text) + "' (expected json-lines or csv)");
}

void CampaignConfig::validate() const {
  if (theorems.empty()) throw InvalidParameter("campaign needs at least one theorem");
  if (cases <= 0) throw InvalidParameter("case count must be positive");
  if (jobs <= 0) throw InvalidParameter("jobs must be positive");
  policy.validate();
  const std::pair<const char*, const std::vector<double>*> axes[] = {
      {"t", &t_values},   {"q1", &q1_grid}, {"q2", &q2_grid},   {"eta", &eta_grid},
      {"mu", &mu_grid},   {"beta", &beta_grid}, {"zeta", &zeta_grid}, {"nu", &nu_grid},
      {"delta", &delta_grid}};
  for (auto [name, grid] : axes) {
    if (grid->empty()) throw InvalidParameter(std::string("grid ") + name + " is empty");
  }
  for (double t : t_values) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("t values must be positive");
  }
  for (double q : q1_grid) DeformationParam{q};
  for (double q : q2_grid) DeformationParam{q};
  for (double eta : eta_grid) OperatorParams(eta, 1.0, 1.0);
  for (double zeta : zeta_grid) OperatorParams(zeta, 1.0, 1.0);
  for (double mu : mu_grid) OperatorParams(0.0, mu, 1.0);
  for (double nu : nu_grid) OperatorParams(0.0, nu, 1.0);
  for (double beta : beta_grid) OperatorParams(0.0, 1.0, beta);
  for (double delta : delta_grid) OperatorParams(0.0, 1.0, delta);
  if (expect == Expectation::reversed) {
    for (TheoremId id : theorems) {
      if (id != TheoremId::T1 && id != TheoremId::T2) {
        throw InvalidParameter("--expect reversed applies to T1/T2 only");
      }
    }
  }
  if (family) {
    for (TheoremId id : theorems) {
      if (default_family(id, expect) != *family &&
          !((id == TheoremId::T1 || id == TheoremId::T2) &&
            (*family == FamilyKind::synchronous_triple ||
             *family == FamilyKind::asynchronous_pair_plus_nonneg))) {
        throw InvalidParameter("family " + std::string(to_string(*family)) +
                               " does not supply the certificates " +
                               std::string(to_string(id)) + " needs");
      }
    }
  }
}

CampaignConfig parse_campaign_config(std::string_view text, CampaignConfig base) {
  CampaignConfig c = std::move(base);
  std::map<std::string, bool> seen_axis;
  int line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key.rfind("grid.", 0) == 0) {
      const std::string axis = key.substr(5);
      std::vector<double>* grid = grid_axis(c, axis);
      if (!grid) throw ParseError("config line " + std::to_string(line_no) + ": unknown grid axis '" + axis + "'");
      if (!seen_axis[axis]) grid->clear();
      seen_axis[axis] = true;
      for (double v : parse_number_list(value)) grid->push_back(v);
    } else if (key == "theorems") {
      c.theorems.clear();
      for (std::string_view id : split(value, ',')) c.theorems.push_back(parse_theorem_id(id));
    } else if (key == "cases") {
      c.cases = parse_integer<std::int64_t>(value, key);
    } else if (key == "seed") {
      c.seed = parse_integer<std::uint64_t>(value, key);
    } else if (key == "tol") {
      c.policy.rel_tol = parse_number_list(value).at(0);
    } else if (key == "max_terms") {
      c.policy.max_terms = parse_integer<std::int64_t>(value, key);
    } else if (key == "expect") {
      if (value == "direct") c.expect = Expectation::direct;
      else if (value == "reversed") c.expect = Expectation::reversed;
      else throw ParseError("expect must be 'direct' or 'reversed'");
    } else if (key == "family") {
      c.family = parse_family_kind(value);
    } else if (key == "output") {
      c.output = std::string(value);
    } else if (key == "format") {
      c.format = parse_report_format(value);
    } else if (key == "jobs") {
      c.jobs = parse_integer<int>(value, key);
    } else if (key == "no_timestamp") {
      c.timestamp = !parse_bool(value, key);
    } else {
      throw ParseError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

TheoremCase derive_case(const CampaignConfig& config, TheoremId theorem, std::int64_t index) {
  const std::uint64_t case_seed = mix_seed(config.seed, static_cast<std::uint64_t>(index));
  std::mt19937_64 eng(mix_seed(case_seed, 1));
  const double t = pick(eng, config.t_values);
  const DeformationParam q1(pick(eng, config.q1_grid));
  const DeformationParam q2(pick(eng, config.q2_grid));
  const double eta = pick(eng, config.eta_grid);
  const double mu = pick(eng, config.mu_grid);
  const double beta = pick(eng, config.beta_grid);
  const double zeta = pick(eng, config.zeta_grid);
  const double nu = pick(eng, config.nu_grid);
  const double delta = pick(eng, config.delta_grid);

  const FamilyKind kind = config.family.value_or(default_family(theorem, config.expect));
  Family fam = generate_family(kind, mix_seed(case_seed, 2), t);
  TheoremCase c{theorem,
                t,
                q1,
                q2,
                OperatorParams(eta, mu, beta),
                OperatorParams(zeta, nu, delta),
                generate_weight(mix_seed(case_seed, 3), t),
                std::nullopt,
                fam.f,
                fam.g,
                fam.h,
                std::nullopt,
                std::nullopt,
                config.expect,
                config.policy};
  if (uses_second_weight(theorem)) c.v = generate_weight(mix_seed(case_seed, 4), t);
  if (theorem == TheoremId::T3 || theorem == TheoremId::T4) c.bounds = fam.bounds;
  if (theorem == TheoremId::T5 || theorem == TheoremId::T6) c.lipschitz = fam.lipschitz;
  return c;
}

std::string csv_header() {
  return "case_index,theorem,t,q1,q2,eta,mu,beta,zeta,nu,delta,lhs,rhs,margin,worst_tail,"
         "verdict,f_spec,g_spec,h_spec,u_spec,v_spec";
}

std::string format_record(const InequalityReport& r, std::int64_t case_index,
                          ReportFormat format) {
  const TheoremCase& c = r.input;
  const std::string v_spec = c.v ? c.v->to_string() : std::string();
  if (format == ReportFormat::csv) {
    std::ostringstream os;
    os << case_index << ',' << to_string(c.theorem) << ',' << format_number(c.t) << ','
       << format_number(c.q1) << ',' << format_number(c.q2) << ',' << format_number(c.p1.eta())
       << ',' << format_number(c.p1.mu()) << ',' << format_number(c.p1.beta()) << ','
       << format_number(c.p2.eta()) << ',' << format_number(c.p2.mu()) << ','
       << format_number(c.p2.beta()) << ',' << format_number(r.lhs) << ','
       << format_number(r.rhs) << ',' << format_number(r.margin) << ','
       << format_number(r.worst_tail) << ',' << to_string(r.verdict) << ',' << c.f.to_string()
       << ',' << c.g.to_string() << ',' << c.h.to_string() << ',' << c.u.to_string() << ','
       << v_spec;
    return os.str();
  }
  nlohmann::ordered_json j;
  j["case_index"] = case_index;
  j["theorem"] = std::string(to_string(c.theorem));
  j["t"] = c.t;
  j["q1"] = c.q1.value();
  j["q2"] = c.q2.value();
  j["eta"] = c.p1.eta();
  j["mu"] = c.p1.mu();
  j["beta"] = c.p1.beta();
  j["zeta"] = c.p2.eta();
  j["nu"] = c.p2.mu();
  j["delta"] = c.p2.beta();
  j["lhs"] = json_number(r.lhs);
  j["rhs"] = json_number(r.rhs);
  j["margin"] = json_number(r.margin);
  j["worst_tail"] = json_number(r.worst_tail);
  j["verdict"] = std::string(to_string(r.verdict));
  j["f_spec"] = c.f.to_string();
  j["g_spec"] = c.g.to_string();
  j["h_spec"] = c.h.to_string();
  j["u_spec"] = c.u.to_string();
  j["v_spec"] = v_spec;
  return j.dump();
}

CampaignSummary run_campaign(const CampaignConfig& config, std::ostream& out,
                             std::vector<InequalityReport>* reports) {
  config.validate();
  struct Job {
    TheoremId theorem;
    std::int64_t index;
  };
  std::vector<Job> jobs;
  for (TheoremId id : config.theorems) {
    for (std::int64_t i = 0; i < config.cases; ++i) jobs.push_back({id, i});
  }

  std::vector<std::optional<InequalityReport>> results(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        results[k].emplace(evaluate(derive_case(config, jobs[k].theorem, jobs[k].index)));
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(config.jobs, static_cast<int>(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& e : failures) {
    if (e) std::rethrow_exception(e);
  }

  if (config.timestamp) {
    if (config.format == ReportFormat::csv) {
      out << "# generated_at=" << utc_timestamp() << '\n';
    } else {
      out << nlohmann::ordered_json{{"generated_at", utc_timestamp()}}.dump() << '\n';
    }
  }
  if (config.format == ReportFormat::csv) out << csv_header() << '\n';

  CampaignSummary summary;
  bool first = true;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const InequalityReport& r = *results[k];
    out << format_record(r, jobs[k].index, config.format) << '\n';
    switch (r.verdict) {
      case Verdict::holds: ++summary.holds; break;
      case Verdict::violated: ++summary.violated; break;
      case Verdict::inconclusive: ++summary.inconclusive; break;
    }
    if (std::isfinite(r.margin)) {
      summary.min_margin = first ? r.margin : std::min(summary.min_margin, r.margin);
      first = false;
    }
    if (r.bracket && !r.bracket_nonnegative) ++summary.negative_brackets;
    if (reports) reports->push_back(r);
  }
  return summary;
}

std::vector<FunctionSpec> standard_test_functions() {
  return {FunctionSpec::constant(1.0), FunctionSpec::power(1.0), FunctionSpec::power(2.0),
          FunctionSpec::piecewise_linear({{0.0, 0.25}, {0.5, 0.5}, {1.5, 2.0}, {3.0, 2.5}})};
}

}  // namespace qfrac
