#pragma once

// Seeded inequality campaigns: configuration, case derivation, parallel
// evaluation and report serialization.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfrac/functions.hpp"
#include "qfrac/inequalities.hpp"

namespace qfrac {

enum class ReportFormat { json_lines, csv };

std::string_view to_string(ReportFormat f);
ReportFormat parse_report_format(std::string_view text);

struct CampaignConfig {
  std::vector<TheoremId> theorems{TheoremId::T1};
  std::int64_t cases = 1000;
  std::uint64_t seed = 1;
  std::vector<double> t_values{0.5, 1.0, 2.0};
  std::vector<double> q1_grid{0.3, 0.6, 0.9};
  std::vector<double> q2_grid{0.3, 0.6, 0.9};
  std::vector<double> eta_grid{-0.5, 0.0, 1.0};
  std::vector<double> mu_grid{0.5, 1.0, 2.0};
  std::vector<double> beta_grid{0.5, 1.0, 2.0};
  std::vector<double> zeta_grid{-0.5, 0.0, 1.0};
  std::vector<double> nu_grid{0.5, 1.0, 2.0};
  std::vector<double> delta_grid{0.5, 1.0, 2.0};
  TruncationPolicy policy{};
  Expectation expect = Expectation::direct;
  /// Overrides the family implied by the theorem (T1/T2 only).
  std::optional<FamilyKind> family;
  std::string output;  // empty: the caller's stream
  ReportFormat format = ReportFormat::json_lines;
  int jobs = 1;
  bool timestamp = true;

  /// Throws InvalidParameter when a grid value or setting is out of range.
  void validate() const;
};

/// Reads the flat `key = value` format. `grid.<axis>` keys may repeat; the
/// first occurrence replaces the default axis and later ones append. Values
/// may also be comma separated. Throws ParseError / InvalidParameter.
CampaignConfig parse_campaign_config(std::string_view text, CampaignConfig base = {});

/// Case `index` of `theorem`; depends only on (config grids, seed, index).
TheoremCase derive_case(const CampaignConfig& config, TheoremId theorem,
                        std::int64_t index);

struct CampaignSummary {
  std::int64_t holds = 0;
  std::int64_t violated = 0;
  std::int64_t inconclusive = 0;
  double min_margin = 0.0;
  /// T5/T6 cases whose moment bracket came out negative.
  std::int64_t negative_brackets = 0;
  std::int64_t total() const { return holds + violated + inconclusive; }
};

/// One record per report; field order is the fixed column order.
std::string csv_header();
std::string format_record(const InequalityReport& r, std::int64_t case_index,
                          ReportFormat format);

/// Evaluates every case (in parallel when config.jobs > 1) and streams the
/// records to `out` in case-index order.
CampaignSummary run_campaign(const CampaignConfig& config, std::ostream& out,
                             std::vector<InequalityReport>* reports = nullptr);

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// Parses "a,b,c" into doubles. Throws ParseError.
std::vector<double> parse_number_list(std::string_view text);

/// The four shapes used by the representation and reduction checks:
/// 1, t, t^2 and a monotone piecewise-linear function.
std::vector<FunctionSpec> standard_test_functions();

}  // namespace qfrac
