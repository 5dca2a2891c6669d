#include "mnsurv/report_io.hpp"

#include "mnsurv/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mnsurv {
namespace {

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string json_real(double v) { return std::isfinite(v) ? format_real(v) : "null"; }

std::string json_optional(const std::optional<double>& v) {
  return v ? json_real(*v) : "null";
}

std::string json_route(const RouteValue& route) {
  if (const double* v = std::get_if<double>(&route)) return json_real(*v);
  if (const auto* na = std::get_if<Inapplicable>(&route)) {
    return "{\"inapplicable\": " + json_string(na->reason) + "}";
  }
  return "null";
}

std::string csv_route(const RouteValue& route) {
  if (const double* v = std::get_if<double>(&route)) return format_real(*v);
  if (std::holds_alternative<Inapplicable>(route)) return "NA";
  return "";
}

RouteValue parse_route(const nlohmann::json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number()) return j.get<double>();
  if (j.is_object() && j.contains("inapplicable")) {
    return Inapplicable{j.at("inapplicable").get<std::string>()};
  }
  throw ValidationError("unrecognized route value");
}

std::optional<double> parse_optional(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string emit_report_json(const RouteReport& r) {
  std::ostringstream out;
  out << "{\"instance\": {\"n\": " << r.n << ", \"d\": " << r.p.size() << ", \"p\": [";
  for (Eigen::Index i = 0; i < r.p.size(); ++i) out << (i ? ", " : "") << format_real(r.p[i]);
  out << "], \"k\": [";
  for (std::size_t i = 0; i < r.k.size(); ++i) out << (i ? ", " : "") << r.k[i];
  out << "]}, \"routes\": {\"exact\": " << json_route(r.exact)
      << ", \"dirichlet\": " << json_route(r.dirichlet)
      << ", \"gaussian\": " << json_route(r.gaussian) << ", \"mc\": ";
  if (r.mc) {
    out << "{\"estimate\": " << json_real(r.mc->estimate)
        << ", \"stderr\": " << json_real(r.mc->standardError)
        << ", \"replications\": " << r.mc->replications << ", \"seed\": " << r.mc->seed << "}";
  } else {
    out << "null";
  }
  out << "}, \"diagnostics\": {\"delta_n\": " << json_optional(r.deltaN)
      << ", \"gamma_tilde\": " << json_optional(r.gammaTilde)
      << ", \"max_rel_diff\": " << json_real(r.maxRelDiff) << "}, \"params\": {\"nodes\": "
      << r.nodes << ", \"tolerance\": " << json_real(r.tolerance) << "}}";
  return out.str();
}

std::string emit_reports_json(std::span<const RouteReport> reports) {
  std::string out = "[";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out += (i ? ",\n " : "\n ") + emit_report_json(reports[i]);
  }
  return out + "\n]\n";
}

std::string emit_reports_csv(std::span<const RouteReport> reports) {
  Eigen::Index width = 0;
  for (const auto& r : reports) width = std::max(width, r.p.size());
  std::ostringstream out;
  out << "n,d";
  for (Eigen::Index i = 1; i <= width; ++i) out << ",p_" << i;
  for (Eigen::Index i = 1; i <= width; ++i) out << ",k_" << i;
  out << ",exact,dirichlet,gaussian,mc_est,mc_se,delta_n,gamma_tilde,max_rel_diff\n";
  for (const auto& r : reports) {
    out << r.n << ',' << r.p.size();
    for (Eigen::Index i = 0; i < width; ++i) {
      out << ',';
      if (i < r.p.size()) out << format_real(r.p[i]);
    }
    for (Eigen::Index i = 0; i < width; ++i) {
      out << ',';
      if (i < static_cast<Eigen::Index>(r.k.size())) out << r.k[static_cast<std::size_t>(i)];
    }
    out << ',' << csv_route(r.exact) << ',' << csv_route(r.dirichlet) << ','
        << csv_route(r.gaussian) << ',';
    if (r.mc) out << format_real(r.mc->estimate) << ',' << format_real(r.mc->standardError);
    else out << ',';
    out << ',' << (r.deltaN ? format_real(*r.deltaN) : "") << ','
        << (r.gammaTilde ? format_real(*r.gammaTilde) : "") << ','
        << format_real(r.maxRelDiff) << '\n';
  }
  return out.str();
}

RouteReport parse_report_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RouteReport r;
    const auto& inst = j.at("instance");
    r.n = inst.at("n").get<Count>();
    const auto p = inst.at("p").get<std::vector<double>>();
    r.p = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
    r.k = inst.at("k").get<std::vector<Count>>();
    const auto& routes = j.at("routes");
    r.exact = parse_route(routes.at("exact"));
    r.dirichlet = parse_route(routes.at("dirichlet"));
    r.gaussian = parse_route(routes.at("gaussian"));
    if (!routes.at("mc").is_null()) {
      const auto& mc = routes.at("mc");
      r.mc = MonteCarloEstimate{mc.at("estimate").get<double>(), mc.at("stderr").get<double>(),
                                mc.at("replications").get<Count>(),
                                mc.at("seed").get<std::uint64_t>()};
    }
    const auto& diag = j.at("diagnostics");
    r.deltaN = parse_optional(diag.at("delta_n"));
    r.gammaTilde = parse_optional(diag.at("gamma_tilde"));
    r.maxRelDiff = diag.at("max_rel_diff").get<double>();
    r.nodes = j.at("params").at("nodes").get<int>();
    r.tolerance = j.at("params").at("tolerance").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

}  // namespace mnsurv
