#pragma once

#include "mnsurv/survival.hpp"

#include <span>
#include <string>

namespace mnsurv {

/// One report as a JSON object:
///   {"instance": {"n", "d", "p", "k"},
///    "routes": {"exact", "dirichlet", "gaussian", "mc": {"estimate", "stderr",
///               "replications", "seed"}},
///    "diagnostics": {"delta_n", "gamma_tilde", "max_rel_diff"},
///    "params": {"nodes", "tolerance"}}
/// Routes that were not run are null; an inapplicable route is
/// {"inapplicable": reason}. Reals are printed with 17 significant digits.
std::string emit_report_json(const RouteReport& report);

/// JSON array of reports, one per line.
std::string emit_reports_json(std::span<const RouteReport> reports);

/// CSV with a single header row. Columns:
///   n,d,p_1..p_D,k_1..k_D,exact,dirichlet,gaussian,mc_est,mc_se,delta_n,gamma_tilde,max_rel_diff
/// where D is the largest dimension among the reports (shorter rows leave the
/// extra p/k cells empty). Routes not run are empty; inapplicable routes are NA.
std::string emit_reports_csv(std::span<const RouteReport> reports);

/// Inverse of emit_report_json. Throws ValidationError on malformed input.
RouteReport parse_report_json(const std::string& text);

/// Real formatted as %.17g.
std::string format_real(double value);

}  // namespace mnsurv
