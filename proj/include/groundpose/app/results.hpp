#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "groundpose/estimator.hpp"

namespace groundpose::app {

inline constexpr const char* kResultsHeader =
    "frame,stage,theta_p_deg,phi_p_deg,theta_c_deg,phi_c_deg,tx_mm,tz_mm,psi_deg,dist_mm,rms,inliers,quality";

/// One CSV line. Floating-point fields are held rounded to the 9 significant
/// digits they are printed with, so parsing the CSV reproduces them exactly.
struct ResultRow {
  int frame = 0;
  std::string stage;
  double theta_p_deg = 0.0;
  double phi_p_deg = 0.0;
  double theta_c_deg = 0.0;
  double phi_c_deg = 0.0;
  double tx_mm = 0.0;
  double tz_mm = 0.0;
  double psi_deg = 0.0;
  double dist_mm = 0.0;
  double rms = 0.0;
  std::size_t inliers = 0;
  std::string quality;  ///< ok | degraded | failed

  bool operator==(const ResultRow&) const = default;
};

double round_sig9(double value);

ResultRow make_row(int frame, const std::string& stage, const ParamVector& params, double rms, std::size_t inliers,
                   const std::string& quality);

std::string format_row(const ResultRow& row);
std::string format_csv(const std::vector<ResultRow>& rows);
/// Throws ConfigError on a malformed table.
std::vector<ResultRow> parse_csv(const std::string& text);

}  // namespace groundpose::app
