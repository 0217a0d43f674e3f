#include "groundpose/app/results.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace groundpose::app {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

std::string sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ConfigError("malformed number '" + s + "' in results table");
  return v;
}

}  // namespace

double round_sig9(double value) { return std::strtod(sig9(value).c_str(), nullptr); }

ResultRow make_row(int frame, const std::string& stage, const ParamVector& p, double rms, std::size_t inliers,
                   const std::string& quality) {
  ResultRow r;
  r.frame = frame;
  r.stage = stage;
  r.theta_p_deg = round_sig9(p.pitch_prev * kDeg);
  r.phi_p_deg = round_sig9(p.roll_prev * kDeg);
  r.theta_c_deg = round_sig9(p.pitch_cur * kDeg);
  r.phi_c_deg = round_sig9(p.roll_cur * kDeg);
  r.tx_mm = round_sig9(p.tx);
  r.tz_mm = round_sig9(p.tz);
  r.psi_deg = round_sig9(p.yaw * kDeg);
  r.dist_mm = round_sig9(travel_distance(p.motion()));
  r.rms = round_sig9(rms);
  r.inliers = inliers;
  r.quality = quality;
  return r;
}

std::string format_row(const ResultRow& r) {
  std::ostringstream out;
  out << r.frame << ',' << r.stage << ',' << sig9(r.theta_p_deg) << ',' << sig9(r.phi_p_deg) << ','
      << sig9(r.theta_c_deg) << ',' << sig9(r.phi_c_deg) << ',' << sig9(r.tx_mm) << ',' << sig9(r.tz_mm) << ','
      << sig9(r.psi_deg) << ',' << sig9(r.dist_mm) << ',' << sig9(r.rms) << ',' << r.inliers << ',' << r.quality;
  return out.str();
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const auto& r : rows) out += format_row(r) + "\n";
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) throw ConfigError("results table has an unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 13) throw ConfigError("results row has " + std::to_string(f.size()) + " fields: " + line);
    ResultRow r;
    r.frame = static_cast<int>(parse_double(f[0]));
    r.stage = f[1];
    double* numbers[] = {&r.theta_p_deg, &r.phi_p_deg, &r.theta_c_deg, &r.phi_c_deg, &r.tx_mm,
                         &r.tz_mm,       &r.psi_deg,   &r.dist_mm,     &r.rms};
    for (std::size_t i = 0; i < 9; ++i) *numbers[i] = parse_double(f[i + 2]);
    r.inliers = static_cast<std::size_t>(parse_double(f[11]));
    r.quality = f[12];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace groundpose::app
