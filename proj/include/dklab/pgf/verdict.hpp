#pragma once

// Atomicity check by generating functions: if g(s) = E s^X has a
// Taylor expansion at 0+ of every order, then X is N_0-valued with P{X = k} = p_k.
// Applied to X = alpha mu_t(A) <= alpha this requires p_k >= 0 and all mass on
// {0, ..., floor(alpha)}; every failure is reported with the order at which it
// shows up. A Taylor failure is only ever certified up to the extracted order.

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>

#include "dklab/pgf/extract.hpp"

namespace dklab {

enum class Verdict { consistent_integer, violates_nonnegativity, violates_taylor, violates_total_mass };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent_integer: return "consistent-integer";
    case Verdict::violates_nonnegativity: return "violates-nonnegativity";
    case Verdict::violates_taylor: return "violates-taylor";
    case Verdict::violates_total_mass: return "violates-total-mass";
  }
  return "?";
}

struct AtomicityVerdict {
  Verdict verdict = Verdict::consistent_integer;
  std::optional<std::size_t> order;  // where the violation was detected
  double evidence = 0.0;             // offending coefficient, growth factor or mass defect
  std::string detail;
  PgfExpansion expansion;
};

inline constexpr double kTotalMassTol = 1e-8;

/// Verdict for an already extracted expansion of X = alpha mu_t(A).
/// `negativity_tol` is per coefficient on top of the expansion's own uncertainty.
inline AtomicityVerdict atomicity_verdict(const PgfExpansion& e, double alpha,
                                          double negativity_tol = kSeriesNegativityTol,
                                          double mass_tol = kTotalMassTol) {
  AtomicityVerdict v;
  v.expansion = e;
  std::ostringstream msg;
  for (std::size_t k = 0; k < e.coefficients.size(); ++k) {
    const double unc = k < e.uncertainty.size() ? e.uncertainty[k] : 0.0;
    if (e.coefficients[k] < -(negativity_tol + unc)) {
      v.verdict = Verdict::violates_nonnegativity;
      v.order = k;
      v.evidence = e.coefficients[k];
      msg << "p_" << k << " = " << e.coefficients[k] << " < 0: X cannot be a nonnegative random variable";
      v.detail = msg.str();
      return v;
    }
  }
  if (e.divergence) {
    v.verdict = Verdict::violates_taylor;
    v.order = e.divergence->order;
    v.evidence = e.divergence->growth;
    msg << "remainder is not o(s^" << e.divergence->order << ") (growth x" << e.divergence->growth
        << " over the detection window); checked up to order " << e.requested_order;
    v.detail = msg.str();
    return v;
  }
  const auto top = static_cast<std::size_t>(std::floor(alpha));
  if (e.coefficients.size() <= top) {
    v.verdict = Verdict::violates_total_mass;
    v.evidence = std::nan("");
    msg << "expansion has " << e.coefficients.size() << " coefficients; need order >= floor(alpha) = " << top;
    v.detail = msg.str();
    return v;
  }
  const double mass = e.mass_up_to(top);
  if (std::abs(mass - 1.0) > mass_tol) {
    v.verdict = Verdict::violates_total_mass;
    v.order = top;
    v.evidence = mass - 1.0;
    msg << "sum_{k <= " << top << "} p_k = " << mass << " != 1: alpha mu_t(A) <= alpha forces X <= floor(alpha)";
    v.detail = msg.str();
    return v;
  }
  msg << "p_k >= 0 and sum_{k <= " << top << "} p_k = 1 up to order " << e.requested_order;
  v.detail = msg.str();
  return v;
}

/// Series-path verdict for alpha and an atomic mu_0.
inline AtomicityVerdict atomicity_verdict(double alpha, const WeightedAtoms& mu0, const OccupationFunction& occ,
                                          std::size_t order) {
  return atomicity_verdict(extract_coefficients_series(alpha, mu0, occ, order), alpha);
}

}  // namespace dklab
