#pragma once

// Bjontegaard delta rate: log10(rate) is fitted as a cubic in PSNR for each
// curve, both fits are integrated over the shared PSNR interval, and the
// mean log-rate difference is reported as a percentage.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "ilrip/core.hpp"

namespace ilrip {

struct RdPoint {
  double rate_bpp = 0.0;
  double psnr_db = 0.0;
};

struct RdCurve {
  std::vector<RdPoint> points;

  void validate() const {
    if (points.size() < 4) throw Error("RD curve needs at least 4 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(points[i].rate_bpp > 0.0)) throw Error("RD curve rates must be positive");
      if (!std::isfinite(points[i].psnr_db)) throw Error("RD curve PSNR must be finite");
      if (i > 0 && !(points[i].rate_bpp > points[i - 1].rate_bpp)) throw Error("RD curve rates must increase");
    }
  }
};

// CSV lines "rate_bpp,psnr_db"; an optional non-numeric header line is skipped.
inline RdCurve parse_rd_csv(std::istream& in) {
  RdCurve c;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    RdPoint p;
    if (!(ls >> p.rate_bpp >> p.psnr_db)) {
      if (first) {
        first = false;
        continue;
      }
      throw FormatError("malformed RD csv line: " + line);
    }
    first = false;
    c.points.push_back(p);
  }
  std::sort(c.points.begin(), c.points.end(), [](const RdPoint& a, const RdPoint& b) { return a.rate_bpp < b.rate_bpp; });
  return c;
}

namespace detail {

// Least-squares cubic, coefficients in ascending powers.
inline std::array<double, 4> fit_cubic(const std::vector<double>& x, const std::vector<double>& y) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), 4);
  Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = 1.0;
    a(r, 1) = x[i];
    a(r, 2) = x[i] * x[i];
    a(r, 3) = x[i] * x[i] * x[i];
    b(r) = y[i];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  return {c(0), c(1), c(2), c(3)};
}

inline double integrate_cubic(const std::array<double, 4>& c, double lo, double hi) {
  auto prim = [&](double x) { return c[0] * x + c[1] * x * x / 2 + c[2] * x * x * x / 3 + c[3] * x * x * x * x / 4; };
  return prim(hi) - prim(lo);
}

}  // namespace detail

// Negative values mean `test` needs less rate than `anchor` at equal PSNR.
inline double bd_rate(const RdCurve& anchor, const RdCurve& test) {
  anchor.validate();
  test.validate();
  auto split = [](const RdCurve& c, std::vector<double>& q, std::vector<double>& lr) {
    for (const auto& p : c.points) {
      q.push_back(p.psnr_db);
      lr.push_back(std::log10(p.rate_bpp));
    }
  };
  std::vector<double> qa, ra, qt, rt;
  split(anchor, qa, ra);
  split(test, qt, rt);
  const double lo = std::max(*std::min_element(qa.begin(), qa.end()), *std::min_element(qt.begin(), qt.end()));
  const double hi = std::min(*std::max_element(qa.begin(), qa.end()), *std::max_element(qt.begin(), qt.end()));
  if (!(hi > lo)) throw Error("bd_rate: PSNR ranges do not overlap");
  const auto fa = detail::fit_cubic(qa, ra);
  const auto ft = detail::fit_cubic(qt, rt);
  const double avg = (detail::integrate_cubic(ft, lo, hi) - detail::integrate_cubic(fa, lo, hi)) / (hi - lo);
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

}  // namespace ilrip
