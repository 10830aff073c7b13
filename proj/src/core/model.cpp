#include "vvfrac/model.hpp"

#include "vvfrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vvfrac {

DomainSpec::DomainSpec(Polygon p, std::vector<EdgeKind> kinds)
    : polygon(std::move(p)), edge_kinds(std::move(kinds)) {}

void DomainSpec::validate() const {
  std::size_t n = polygon.num_edges();
  if (edge_kinds.size() != n) {
    std::ostringstream os;
    os << "domain has " << n << " edges but " << edge_kinds.size() << " edge tags";
    throw ConfigError(os.str());
  }
  if (!polygon.is_simple()) throw ConfigError("domain polygon is not simple");
  for (std::size_t e = 0; e < n; ++e) {
    if (edge_kinds[e] != EdgeKind::Traction) continue;
    std::size_t prev = (e + n - 1) % n, next = (e + 1) % n;
    if (edge_kinds[prev] == EdgeKind::Dirichlet || edge_kinds[next] == EdgeKind::Dirichlet) {
      std::ostringstream os;
      os << "(H2) violated: traction edge " << e
         << " touches the closure of the Dirichlet boundary";
      throw ConfigError(os.str());
    }
  }
}

bool DomainSpec::has_dirichlet() const {
  return std::find(edge_kinds.begin(), edge_kinds.end(), EdgeKind::Dirichlet) !=
         edge_kinds.end();
}

std::vector<std::string> MaterialModel::validate(const Polygon& poly,
                                                 int samples_per_axis) const {
  std::vector<std::string> errors;
  if (!(kappa1 > 0.0)) errors.push_back("(H4) violated: kappa1 must be positive");
  if (kappa1 > kappa2) {
    std::ostringstream os;
    os << "(H4) violated: kappa1 = " << kappa1 << " exceeds kappa2 = " << kappa2;
    errors.push_back(os.str());
  }
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& v : poly.vertices()) {
    xmin = std::min(xmin, v.x());
    xmax = std::max(xmax, v.x());
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }
  bool mu_bad = false, lm_bad = false, k_bad = false;
  for (int i = 0; i < samples_per_axis; ++i) {
    for (int j = 0; j < samples_per_axis; ++j) {
      double sx = (i + 0.5) / samples_per_axis, sy = (j + 0.5) / samples_per_axis;
      Vec2 p(xmin + sx * (xmax - xmin), ymin + sy * (ymax - ymin));
      if (!poly.contains(p)) continue;
      double m = mu(p), l = lambda(p), k = kappa(p);
      std::ostringstream os;
      os << "(" << p.x() << ", " << p.y() << ")";
      if (!(m > 0.0) && !mu_bad) {
        mu_bad = true;
        errors.push_back("(H3) violated: mu <= 0 at " + os.str());
      }
      if (!(l + m > 0.0) && !lm_bad) {
        lm_bad = true;
        errors.push_back("(H3) violated: lambda + mu <= 0 at " + os.str());
      }
      if ((k < kappa1 - 1e-12 * std::abs(kappa1) || k > kappa2 + 1e-12 * std::abs(kappa2)) &&
          !k_bad) {
        k_bad = true;
        errors.push_back("(H4) violated: kappa outside [kappa1, kappa2] at " + os.str());
      }
    }
  }
  return errors;
}

TimeSeries TimeSeries::constant(double value, double T) { return {{0.0, T}, {value, value}}; }

TimeSeries TimeSeries::ramp(double v0, double v1, double T) { return {{0.0, T}, {v0, v1}}; }

double TimeSeries::at(double time) const {
  if (t.size() == 1) return v[0];
  if (time <= t.front()) return v.front();
  if (time >= t.back()) return v.back();
  auto it = std::upper_bound(t.begin(), t.end(), time);
  std::size_t i = static_cast<std::size_t>(it - t.begin());
  double s = (time - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - s) * v[i - 1] + s * v[i];
}

double TimeSeries::rate(double time, bool right) const {
  if (t.size() < 2) return 0.0;
  std::size_t i;
  if (right) {
    auto it = std::upper_bound(t.begin(), t.end(), time);
    i = static_cast<std::size_t>(it - t.begin());
  } else {
    auto it = std::lower_bound(t.begin(), t.end(), time);
    i = static_cast<std::size_t>(it - t.begin());
  }
  i = std::clamp<std::size_t>(i, 1, t.size() - 1);
  return (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
}

bool VectorField::is_zero() const {
  return x.is_constant() && y.is_constant() && x(0, 0) == 0.0 && y(0, 0) == 0.0;
}

std::vector<std::string> LoadTrajectory::validate() const {
  std::vector<std::string> errors;
  auto check = [&](const TimeSeries& s, const char* name) {
    if (s.t.empty() || s.t.size() != s.v.size()) {
      errors.push_back(std::string(name) + ": sample times and values differ in length");
      return;
    }
    for (std::size_t i = 1; i < s.t.size(); ++i)
      if (!(s.t[i] > s.t[i - 1]))
        errors.push_back(std::string(name) + ": sample times not strictly increasing");
    std::ostringstream os;
    if (s.t.front() > 0.0) {
      os << name << ": samples start at " << s.t.front() << ", gap [0, " << s.t.front() << "]";
      errors.push_back(os.str());
    }
    if (s.t.back() < T) {
      std::ostringstream os2;
      os2 << name << ": samples end at " << s.t.back() << ", gap [" << s.t.back() << ", " << T
          << "]";
      errors.push_back(os2.str());
    }
  };
  if (!(T > 0.0)) errors.push_back("time horizon T must be positive");
  check(w_amp, "w");
  check(f_amp, "f");
  check(g_amp, "g");
  return errors;
}

}  // namespace vvfrac
