#include "slipform/limit_profile.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string>

#include "slipform/error.hpp"
#include "slipform/format.hpp"

namespace slipform {

LimitProfile::LimitProfile(std::vector<double> breakpoints, std::vector<Vec2> derivatives,
                           Vec2 anchor)
    : breakpoints_(std::move(breakpoints)), derivatives_(std::move(derivatives)), anchor_(anchor) {
  if (derivatives_.empty() || breakpoints_.size() != derivatives_.size() + 1) {
    throw Error(Errc::InvalidRange, "profile needs N >= 1 segments and N + 1 breakpoints");
  }
  if (breakpoints_.front() != 0.0) throw Error(Errc::InvalidRange, "profile must start at t = 0");
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) {
      throw Error(Errc::InvalidRange, "breakpoints must be strictly increasing");
    }
  }
  for (const Vec2 &d : derivatives_) {
    if (!std::isfinite(d.x) || !std::isfinite(d.y)) {
      throw Error(Errc::InvalidRange, "profile derivatives must be finite");
    }
  }
}

LimitProfile LimitProfile::straight(double L, Vec2 xi, Vec2 anchor) {
  return LimitProfile({0.0, L}, {xi}, anchor);
}

std::vector<Vec2> LimitProfile::vertex_values() const {
  std::vector<Vec2> out{anchor_};
  for (std::size_t n = 0; n < derivatives_.size(); ++n) {
    out.push_back(out.back() + segment_length(n) * derivatives_[n]);
  }
  return out;
}

Vec2 LimitProfile::value(double t) const {
  t = std::clamp(t, 0.0, length());
  Vec2 u = anchor_;
  for (std::size_t n = 0; n < derivatives_.size(); ++n) {
    if (t <= breakpoints_[n + 1]) return u + (t - breakpoints_[n]) * derivatives_[n];
    u += segment_length(n) * derivatives_[n];
  }
  return u;
}

LimitProfile LimitProfile::read_csv(std::istream &in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> t{0.0};
  std::vector<Vec2> xi;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      const auto first = line.find_first_not_of(" \t");
      if (std::isalpha(static_cast<unsigned char>(line[first]))) continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double te = 0.0, a = 0.0, b = 0.0;
    std::string extra;
    if (!(row >> te >> a >> b) || (row >> extra)) {
      throw Error(Errc::ParseError, "profile line " + std::to_string(line_no) +
                                        ": expected three numbers t_end,xi1,xi2");
    }
    t.push_back(te);
    xi.push_back({a, b});
  }
  if (xi.empty()) throw Error(Errc::ParseError, "profile has no segments");
  try {
    return LimitProfile(std::move(t), std::move(xi));
  } catch (const Error &e) {
    throw Error(Errc::ParseError, std::string("profile: ") + e.what());
  }
}

void LimitProfile::write_csv(std::ostream &out) const {
  out << "t_end,xi1,xi2\n";
  for (std::size_t n = 0; n < derivatives_.size(); ++n) {
    out << format_real(breakpoints_[n + 1]) << ',' << format_real(derivatives_[n].x) << ','
        << format_real(derivatives_[n].y) << '\n';
  }
}

double sup_distance(const LimitProfile &a, const LimitProfile &b) {
  if (std::fabs(a.length() - b.length()) > 1e-12 * std::max(1.0, a.length())) {
    throw Error(Errc::InvalidRange, "profiles have different lengths");
  }
  // Both are piecewise affine, so the maximum sits at a breakpoint of either.
  std::vector<double> ts = a.breakpoints();
  ts.insert(ts.end(), b.breakpoints().begin(), b.breakpoints().end());
  double d = 0.0;
  for (double t : ts) d = std::max(d, norm(a.value(t) - b.value(t)));
  return d;
}

}  // namespace slipform
