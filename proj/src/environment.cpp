// SPDX-License-Identifier: Apache-2.0
#include "cbve/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbve/error.hpp"

namespace cbve {
namespace {

const Coefficients& zero_coefficients() {
  static const Coefficients zero;
  return zero;
}

[[noreturn]] void structural(const std::string& what) {
  throw InvalidArgument("environment", "EnvironmentSpec", what);
}

std::string atom_location(std::size_t i, double t) {
  std::ostringstream os;
  os << "atom[" << i << "]@t=" << t;
  return os.str();
}

}  // namespace

double Coefficients::size() const {
  return std::abs(b1) + c + kernel.truncated_second_moment();
}

//---------------------------------------------------------------------------//
EnvironmentSpec::EnvironmentSpec(double horizon, std::vector<Piece> pieces,
                                 std::vector<Atom> atoms)
    : horizon_(horizon), pieces_(std::move(pieces)), atoms_(std::move(atoms)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    structural("horizon must be positive and finite");
  }
  double prev_end = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.start >= prev_end) || !(p.start < p.end) || !(p.end <= horizon_)) {
      structural("pieces must be ordered, disjoint and inside [0, T]");
    }
    if (!(p.density >= 0.0) || !std::isfinite(p.density)) {
      structural("piece density must be finite and nonnegative");
    }
    if (!std::isfinite(p.coef.b1) || !std::isfinite(p.coef.c)) {
      structural("piece coefficients must be finite");
    }
    prev_end = p.end;
  }
  double prev_time = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.time > prev_time) || !(a.time <= horizon_)) {
      structural("atoms must be strictly ordered inside (0, T]");
    }
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
      structural("atom mass must be positive and finite");
    }
    if (!std::isfinite(a.coef.b1) || !std::isfinite(a.coef.c)) {
      structural("atom coefficients must be finite");
    }
    prev_time = a.time;
  }

  // Split pieces at atom times; an atom sorts before flow starting at it.
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    double start = p.start;
    for (const auto& a : atoms_) {
      if (a.time > start && a.time < p.end) {
        timeline_.push_back({start, a.time, p.density * (a.time - start), false, i});
        start = a.time;
      }
    }
    timeline_.push_back({start, p.end, p.density * (p.end - start), false, i});
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    timeline_.push_back({atoms_[i].time, atoms_[i].time, atoms_[i].mass, true, i});
  }
  std::stable_sort(timeline_.begin(), timeline_.end(),
                   [](const Event& x, const Event& y) {
                     if (x.start != y.start) return x.start < y.start;
                     return x.atom && !y.atom;
                   });
}

double EnvironmentSpec::gamma(double t) const {
  double sum = 0.0;
  for (const auto& e : timeline_) {
    if (e.atom) {
      if (e.start <= t) sum += e.mass;
    } else if (t > e.start) {
      sum += pieces_[e.index].density * (std::min(t, e.end) - e.start);
    }
  }
  return sum;
}

double EnvironmentSpec::gamma_left(double t) const {
  const Atom* a = atom_at(t);
  return gamma(t) - (a ? a->mass : 0.0);
}

double EnvironmentSpec::gamma_inverse(double y, double tol) const {
  double target = y - tol;
  if (target <= 0.0) return 0.0;
  double cum = 0.0;
  for (const auto& e : timeline_) {
    if (e.mass <= 0.0) continue;
    if (e.atom) {
      if (cum + e.mass >= target) return e.start;
    } else if (cum + e.mass >= target) {
      double s = e.start + (y - cum) / pieces_[e.index].density;
      return std::clamp(s, e.start, e.end);
    }
    cum += e.mass;
  }
  return kInf;
}

const Atom* EnvironmentSpec::atom_at(double t) const {
  auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), t,
      [](const Atom& a, double x) { return a.time < x; });
  if (it != atoms_.end() && it->time == t) return &*it;
  return nullptr;
}

const Coefficients& EnvironmentSpec::coefficients(double s) const {
  if (const Atom* a = atom_at(s)) return a->coef;
  for (const auto& p : pieces_) {
    if ((s >= p.start && s < p.end) || (s == p.end && p.end == horizon_)) {
      return p.coef;
    }
  }
  return zero_coefficients();
}

std::vector<Segment> EnvironmentSpec::segments(double a, double b,
                                               Interval kind) const {
  if (a > b) {
    throw InvalidArgument("environment", "segments",
                          "lower bound exceeds upper bound");
  }
  std::vector<Segment> out;
  bool include_a = kind == Interval::Closed;
  bool include_b = kind != Interval::Open;
  if (a == b && !include_a) return out;
  for (const auto& e : timeline_) {
    if (e.atom) {
      bool inside = (e.start > a && e.start < b) ||
                    (include_a && e.start == a) || (include_b && e.start == b);
      if (inside) out.push_back(segment(e, e.start, e.start));
      continue;
    }
    double lo = std::max(a, e.start);
    double hi = std::min(b, e.end);
    if (lo < hi && e.mass > 0.0) out.push_back(segment(e, lo, hi));
  }
  return out;
}

Segment EnvironmentSpec::segment(const Event& e, double lo, double hi) const {
  if (e.atom) return {lo, hi, e.mass, &atoms_[e.index].coef, true};
  const auto& p = pieces_[e.index];
  return {lo, hi, p.density * (hi - lo), &p.coef, false};
}

double EnvironmentSpec::measure(double a, double b, Interval kind) const {
  double sum = 0.0;
  for (const auto& s : segments(a, b, kind)) sum += s.mass;
  return sum;
}

//---------------------------------------------------------------------------//
EnvironmentSpec canonicalize(const RawTriplet& raw) {
  auto reject = [](const std::string& what) {
    throw InvalidArgument("environment", "canonicalize", what);
  };
  std::vector<Piece> pieces;
  for (const auto& r : raw.pieces) {
    if (r.c_density < 0.0) reject("c~ density must be nonnegative");
    if (r.m_density < 0.0) reject("m~ density must be nonnegative");
    double m1 = r.m_density * r.kernel.truncated_second_moment();
    double g = std::abs(r.b1_density) + r.c_density + m1;
    Piece p{r.start, r.end, g, {}};
    if (g > 0.0) {
      p.coef.b1 = r.b1_density / g;
      p.coef.c = r.c_density / g;
      p.coef.kernel = r.kernel.scaled(r.m_density / g);
    } else if (r.m_density > 0.0 && !r.kernel.empty()) {
      reject("m~ has mass where gamma has none");
    }
    pieces.push_back(std::move(p));
  }
  std::vector<Atom> atoms;
  for (const auto& r : raw.atoms) {
    if (r.m_mass < 0.0) reject("m~ atom mass must be nonnegative");
    double m1 = r.m_mass * r.kernel.truncated_second_moment();
    double g = std::abs(r.b1_mass) + m1;
    if (g == 0.0) {
      if (r.m_mass > 0.0 && !r.kernel.empty()) {
        reject("m~ has mass where gamma has none");
      }
      continue;
    }
    Atom a{r.time, g, {}};
    a.coef.b1 = r.b1_mass / g;
    a.coef.kernel = r.kernel.scaled(r.m_mass / g);
    atoms.push_back(std::move(a));
  }
  return EnvironmentSpec(raw.horizon, std::move(pieces), std::move(atoms));
}

RawTriplet reconstruct(const EnvironmentSpec& env) {
  RawTriplet raw;
  raw.horizon = env.horizon();
  for (const auto& p : env.pieces()) {
    raw.pieces.push_back({p.start, p.end, p.coef.b1 * p.density,
                          p.coef.c * p.density, p.density, p.coef.kernel});
  }
  for (const auto& a : env.atoms()) {
    raw.atoms.push_back(
        {a.time, a.coef.b1 * a.mass, a.mass, a.coef.kernel});
  }
  return raw;
}

//---------------------------------------------------------------------------//
double atom_delta(const Atom& atom) {
  return (atom.coef.b1 + atom.coef.kernel.moment(1.0, 0.0, 1.0)) * atom.mass;
}

ValidationReport validate_admissible(const EnvironmentSpec& env, double eta_t) {
  constexpr double tol = 1e-12;
  ValidationReport report;
  for (std::size_t i = 0; i < env.pieces().size(); ++i) {
    const auto& p = env.pieces()[i];
    if (p.coef.c < 0.0) {
      std::ostringstream os;
      os << "c = " << p.coef.c << " < 0";
      report.violations.push_back({"1'", "piece[" + std::to_string(i) + "]", os.str()});
    }
  }
  for (std::size_t i = 0; i < env.atoms().size(); ++i) {
    const auto& a = env.atoms()[i];
    auto where = atom_location(i, a.time);
    if (a.coef.c != 0.0) {
      std::ostringstream os;
      os << "c * dgamma = " << a.coef.c * a.mass << " != 0";
      report.violations.push_back({"1'", where, os.str()});
    }
    double delta = atom_delta(a);
    if (delta > 1.0 + tol) {
      std::ostringstream os;
      os << "delta = " << delta << " > 1";
      report.violations.push_back({"2'", where, os.str()});
    }
    if (std::abs(a.coef.b1 * a.mass - 1.0) <= tol) {
      double big = a.coef.kernel.mass(1.0, kInf) * a.mass;
      double near = a.coef.kernel.mass(1.0, eta_t) * a.mass;
      if (!(big > 0.0)) {
        report.violations.push_back(
            {"3'", where, "b1 * dgamma = 1 but m((1,inf)) * dgamma = 0"});
      } else if (!(near > 0.0)) {
        std::ostringstream os;
        os << "b1 * dgamma = 1 but m((1," << eta_t << "]) * dgamma = 0";
        report.violations.push_back({"3'", where, os.str()});
      }
    }
  }
  return report;
}

double compute_c0(const EnvironmentSpec& env) {
  double c0 = 0.0;
  for (const auto& p : env.pieces()) c0 = std::max(c0, p.coef.size());
  for (const auto& a : env.atoms()) c0 = std::max(c0, a.coef.size());
  return c0;
}

//---------------------------------------------------------------------------//
DiscreteTimeScale::DiscreteTimeScale(const EnvironmentSpec& env, double beta)
    : beta_(beta) {
  inverse_.push_back(0.0);
  if (beta <= 0.0) return;
  double top = env.gamma(env.horizon());
  for (std::int64_t i = 1;; ++i) {
    double s = env.gamma_inverse(static_cast<double>(i) / beta, kSnapTolerance);
    if (!(s <= env.horizon()) || static_cast<double>(i) / beta > top + kSnapTolerance) {
      break;
    }
    inverse_.push_back(s);
  }
}

std::int64_t DiscreteTimeScale::operator()(double t) const {
  auto it = std::upper_bound(inverse_.begin(), inverse_.end(), t);
  return static_cast<std::int64_t>(it - inverse_.begin()) - 1;
}

std::int64_t DiscreteTimeScale::left_limit(double t) const {
  if (t <= 0.0) return 0;
  auto it = std::lower_bound(inverse_.begin(), inverse_.end(), t);
  return static_cast<std::int64_t>(it - inverse_.begin()) - 1;
}

double DiscreteTimeScale::inverse(std::int64_t i) const {
  if (i <= 0) return 0.0;
  if (i > total()) return kInf;
  return inverse_[static_cast<std::size_t>(i)];
}

bool DiscreteTimeScale::attained(std::int64_t j) const {
  if (j < 0 || j > total()) return false;
  if (j == total()) return true;
  return inverse(j) < inverse(j + 1);
}

bool DiscreteTimeScale::in_s(std::int64_t i) const {
  return i >= 1 && i <= total() && attained(i - 1);
}

std::vector<double> DiscreteTimeScale::jump_times(double r, double t) const {
  std::vector<double> out;
  for (std::int64_t i = (*this)(r) + 1; i <= (*this)(t); ++i) {
    double s = inverse(i);
    if (out.empty() || out.back() != s) out.push_back(s);
  }
  return out;
}

std::vector<double> DiscreteTimeScale::big_jump_times(double r, double t) const {
  std::vector<double> out;
  for (double s : jump_times(r, t)) {
    if ((*this)(s) - left_limit(s) > 1) out.push_back(s);
  }
  return out;
}

DiscreteTimeScale discretize_time(const EnvironmentSpec& env, int k, double c0) {
  if (k < 1) throw InvalidArgument("environment", "discretize_time", "k must be >= 1");
  return DiscreteTimeScale(env, 4.0 * c0 * (k + 1.0));
}

}  // namespace cbve
