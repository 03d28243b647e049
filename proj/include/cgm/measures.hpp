#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/numeric.hpp"

namespace cgm {

struct Atom {
  double loc;
  double mass;
};

// Mass spread uniformly over [left, right].
struct UniformPiece {
  double left;
  double right;
  double mass;
};

// Finite nonnegative measure on the real line: finitely many atoms plus
// finitely many uniform pieces. Every Cauchy-type integral against it has a
// closed form, so nothing here does quadrature.
class Measure1D {
 public:
  Measure1D() = default;

  Measure1D(std::vector<Atom> atoms, std::vector<UniformPiece> pieces = {})
      : pieces_(std::move(pieces)) {
    for (const auto& a : atoms) {
      if (!std::isfinite(a.loc) || !std::isfinite(a.mass) || a.mass < 0.0) {
        throw DomainError("Measure1D: atom must have finite location and mass >= 0");
      }
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& x, const Atom& y) { return x.loc < y.loc; });
    for (const auto& a : atoms) {
      if (a.mass == 0.0) continue;
      if (!atoms_.empty() && atoms_.back().loc == a.loc) {
        atoms_.back().mass += a.mass;
      } else {
        atoms_.push_back(a);
      }
    }
    std::erase_if(pieces_, [](const UniformPiece& p) { return p.mass == 0.0; });
    for (const auto& p : pieces_) {
      if (!std::isfinite(p.left) || !std::isfinite(p.right) || !(p.left < p.right) ||
          !std::isfinite(p.mass) || p.mass < 0.0) {
        throw DomainError("Measure1D: piece needs finite left < right and mass >= 0");
      }
    }
    CompensatedSum total;
    for (const auto& a : atoms_) total += a.mass;
    for (const auto& p : pieces_) total += p.mass;
    total_ = total.value();
  }

  static Measure1D dirac(double loc, double mass = 1.0) { return Measure1D({{loc, mass}}); }

  static Measure1D uniform(double left, double right, double mass = 1.0) {
    return Measure1D({}, {{left, right, mass}});
  }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<UniformPiece>& pieces() const noexcept { return pieces_; }
  double total_mass() const noexcept { return total_; }
  bool is_zero() const noexcept { return atoms_.empty() && pieces_.empty(); }
  bool is_subprobability(double tol = 1e-12) const noexcept { return total_ <= 1.0 + tol; }

  // +inf for the zero measure.
  double inf_supp() const noexcept {
    double lo = kInf;
    if (!atoms_.empty()) lo = atoms_.front().loc;
    for (const auto& p : pieces_) lo = std::min(lo, p.left);
    return lo;
  }

  double mass_at(double loc) const noexcept {
    for (const auto& a : atoms_) {
      if (a.loc == loc) return a.mass;
    }
    return 0.0;
  }

  // S_k(c) = ∫ mu(dt) / (t + c)^k for k >= 1. The shift c must satisfy
  // t + c >= 0 on the support. At t + c = 0 on the support the integral
  // diverges and +inf is returned (an atom there, or a piece starting there,
  // both give a non-integrable singularity).
  double shifted_moment(int k, double c) const {
    if (k < 1) throw DomainError("shifted_moment: order must be >= 1");
    if (is_zero()) return 0.0;
    if (c == kInf) return 0.0;
    const double edge = inf_supp() + c;
    if (std::isnan(edge) || edge < 0.0) {
      std::ostringstream os;
      os << "Cauchy transform evaluated inside the support (shift " << c
         << ", inf supp " << inf_supp() << ")";
      throw DomainError(os.str());
    }
    if (edge == 0.0) return kInf;
    CompensatedSum s;
    for (const auto& a : atoms_) {
      const double x = a.loc + c;
      s += k == 1 ? a.mass / x : k == 2 ? a.mass / (x * x) : a.mass / std::pow(x, k);
    }
    for (const auto& p : pieces_) {
      const double l = p.left + c;
      const double r = p.right + c;
      const double dens = p.mass / (p.right - p.left);
      if (k == 1) {
        s += dens * std::log1p((p.right - p.left) / l);
      } else {
        s += dens * (std::pow(l, 1 - k) - std::pow(r, 1 - k)) / (k - 1);
      }
    }
    return s.value();
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<UniformPiece> pieces_;
  double total_ = 0.0;
};

// A(z) = ∫ alpha(da) / (a + z).
inline double cauchy_A(const Measure1D& alpha, double z) { return alpha.shifted_moment(1, z); }

// B(z) = ∫ beta(db) / (b - z).
inline double cauchy_B(const Measure1D& beta, double z) { return beta.shifted_moment(1, -z); }

enum class TransformSide { A, B };

// n-th z-derivative of A or B:
//   ∂^n A(z) = (-1)^n n! ∫ alpha(da) / (a + z)^{n+1}
//   ∂^n B(z) =        n! ∫ beta(db)  / (b - z)^{n+1}
// A divergent boundary value keeps the sign of the formula.
inline double cauchy_deriv(const Measure1D& mu, double z, int order, TransformSide side) {
  if (order < 1) throw DomainError("cauchy_deriv: order must be >= 1");
  double factorial = 1.0;
  for (int k = 2; k <= order; ++k) factorial *= k;
  if (side == TransformSide::A) {
    const double s = mu.shifted_moment(order + 1, z);
    return (order % 2 == 0 ? 1.0 : -1.0) * factorial * s;
  }
  return factorial * mu.shifted_moment(order + 1, -z);
}

// Limit data (alpha, beta, frak_a, frak_b) of the parameter families.
struct TransformPair {
  Measure1D alpha;
  Measure1D beta;
  double mfa = kInf;
  double mfb = kInf;

  TransformPair() = default;
  TransformPair(Measure1D a, Measure1D b, double frak_a, double frak_b)
      : alpha(std::move(a)), beta(std::move(b)), mfa(frak_a), mfb(frak_b) {
    validate();
  }

  void validate() const {
    if (std::isnan(mfa) || std::isnan(mfb) || mfa == -kInf || mfb == -kInf) {
      throw InvalidParameters("TransformPair: frak_a, frak_b must be real or +inf");
    }
    if (!(mfa + mfb > 0.0)) {
      throw InvalidParameters("TransformPair: frak_a + frak_b must be > 0");
    }
    if (mfa > alpha.inf_supp()) {
      throw InvalidParameters("TransformPair: frak_a exceeds inf supp alpha");
    }
    if (mfb > beta.inf_supp()) {
      throw InvalidParameters("TransformPair: frak_b exceeds inf supp beta");
    }
  }

  double A(double z) const { return cauchy_A(alpha, z); }
  double B(double z) const { return cauchy_B(beta, z); }
  double dA(double z) const { return cauchy_deriv(alpha, z, 1, TransformSide::A); }
  double dB(double z) const { return cauchy_deriv(beta, z, 1, TransformSide::B); }
};

}  // namespace cgm
