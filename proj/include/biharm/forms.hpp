#pragma once

#include <array>

#include "biharm/grid.hpp"
#include "biharm/params.hpp"
#include "biharm/testfn.hpp"

namespace biharm::forms {

/// a_lambda(u, v) with the four addends of the expanded integrand reported
/// separately: diffusion a^2 Dv Du, gradient coupling, zero-order coupling
/// (Delta a^2) v Du, and potential+shift (V^2 + lambda) u v. The sweep
/// family is real-valued; complex arguments reduce by linearity.
struct FormValue {
  double value = 0.0;
  std::array<double, 4> addends{};
};

/// The five addends of the D norm (sum-of-norms convention, to keep the
/// constants comparable with the weighted-space definition).
struct DNorm {
  double weighted_lap = 0.0;   // ||(1+|x|^a) Lap u||_2
  double weighted_grad = 0.0;  // || |x|^{a-1} |grad u| ||_2
  double weighted_u = 0.0;     // || |x|^{a-2} u ||_2
  double potential = 0.0;      // ||V u||_2
  double l2 = 0.0;             // ||u||_2
  double total() const { return weighted_lap + weighted_grad + weighted_u + potential + l2; }
};

/// D2 norm addends: ||V^2 u||, || |x|^{2a-h} D^{4-h} u || for h=0..4, and
/// the H^4 norm (itself a sum over tensor orders 0..4).
struct D2Norm {
  double v2u = 0.0;
  std::array<double, 5> weighted{};  // index h = 0..4
  double h4 = 0.0;
  double total() const {
    double s = v2u + h4;
    for (double w : weighted) s += w;
    return s;
  }
};

/// || |x|^gamma |D^h u| ||_2 for tensor order h = 0..4.
double weighted_tensor_norm(const grid::Quadrature& q, const testfn::TestFunction& u,
                            double gamma, int h);

/// Bundles the operator data and the quadrature for the form-level checks.
class FormContext {
 public:
  FormContext(params::OperatorParams p, grid::Quadrature q);

  const params::OperatorParams& params() const { return p_; }
  const grid::Quadrature& quad() const { return q_; }

  FormValue eval_form(const testfn::TestFunction& u, const testfn::TestFunction& v) const;

  /// |a_lambda(u,v) - int (Au + lambda u) v| / (||u||_D ||v||_D)
  double form_identity_residual(const testfn::TestFunction& u,
                                const testfn::TestFunction& v) const;

  /// Re a_lambda(u,u) minus the accretivity lower bound (raw, not
  /// normalized). Requires lambda >= lambda0 unless enforcement is off;
  /// the error message points the caller at lambda0_search.
  double accretivity_gap(const testfn::TestFunction& u, bool enforce_threshold = true) const;

  /// |a_lambda(u,v)| / (||u||_D ||v||_D)
  double continuity_ratio(const testfn::TestFunction& u, const testfn::TestFunction& v) const;

  /// tail_guard=false skips the truncation-tail sanity check; used when the
  /// quantity being measured is itself a vanishing difference.
  DNorm d_norm(const testfn::TestFunction& u, bool tail_guard = true) const;
  D2Norm d2_norm(const testfn::TestFunction& u, bool tail_guard = true) const;

  /// ||u||_a = sqrt(Re a_lambda(u,u) + ||u||_2^2) at the context lambda.
  double a_norm(const testfn::TestFunction& u) const;

  /// int (A u + lambda u) v dx by quadrature of the closed forms.
  double pairing_Au_v(const testfn::TestFunction& u, const testfn::TestFunction& v) const;

 private:
  void guard_tail(const testfn::TestFunction& u, double sigma, double value_scale) const;

  params::OperatorParams p_;
  grid::Quadrature q_;
};

}  // namespace biharm::forms
