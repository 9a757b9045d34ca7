#include "biharm/forms.hpp"

#include <cmath>
#include <stdexcept>

#include "biharm/sector_op.hpp"

namespace biharm::forms {

using testfn::Jet;
using testfn::TestFunction;

double weighted_tensor_norm(const grid::Quadrature& q, const TestFunction& u, double gamma,
                            int h) {
  if (h < 0 || h > 4) throw std::invalid_argument("weighted_tensor_norm: h in 0..4");
  const double v = q.integrate(
      [&](double r) {
        const Jet j = u.eval(r);
        if (h == 0) return j.f0 * j.f0;
        const auto t = testfn::cartesian_tensor_norms(j, r, q.N);
        const double d[4] = {t.d1, t.d2, t.d3, t.d4};
        return d[h - 1] * d[h - 1];
      },
      2.0 * gamma);
  return std::sqrt(std::max(v, 0.0));
}

FormContext::FormContext(params::OperatorParams p, grid::Quadrature q)
    : p_(std::move(p)), q_(std::move(q)) {
  p_.validate();
  if (q_.N != p_.N) throw std::invalid_argument("FormContext: dimension mismatch");
}

void FormContext::guard_tail(const TestFunction& u, double sigma, double value_scale) const {
  const auto env0 = grid::envelope_product(u.envelope_zero(0), u.envelope_zero(0));
  const auto envi = grid::envelope_product(u.envelope_inf(0), u.envelope_inf(0));
  const double t = grid::tail_estimate(env0, envi, sigma, p_.N, q_.grid);
  if (!(t <= 1e-8 * value_scale + 1e-30)) {
    throw std::runtime_error("form evaluation: truncation tail above tolerance for " + u.label());
  }
}

FormValue FormContext::eval_form(const TestFunction& u, const TestFunction& v) const {
  const double al = p_.alpha;
  const double N = static_cast<double>(p_.N);
  const op::SectorIndex s0{0, p_.N};

  FormValue out;
  // diffusion: a^2 Du Dv
  out.addends[0] = q_.integrate(
      [&](double r) {
        return p_.a2(r) * op::apply_sector_laplacian(u.eval(r), r, s0) *
               op::apply_sector_laplacian(v.eval(r), r, s0);
      },
      0.0);
  // gradient coupling: 4 a (1+r^a) r^{a-2} (x . grad v) Du -> 4a(1+r^a) r^{a-1} v' Du
  out.addends[1] =
      al == 0.0
          ? 0.0
          : q_.integrate(
                [&](double r) {
                  return 4.0 * al * (1.0 + std::pow(r, al)) * std::pow(r, al - 1.0) *
                         v.eval(r).f1 * op::apply_sector_laplacian(u.eval(r), r, s0);
                },
                0.0);
  // zero-order coupling: 2a[(2a-2+N) r^{2a-2} + (a-2+N) r^{a-2}] v Du
  out.addends[2] =
      al == 0.0
          ? 0.0
          : q_.integrate(
                [&](double r) {
                  const double w = 2.0 * al *
                                   ((2.0 * al - 2.0 + N) * std::pow(r, 2.0 * al - 2.0) +
                                    (al - 2.0 + N) * std::pow(r, al - 2.0));
                  return w * v(r) * op::apply_sector_laplacian(u.eval(r), r, s0);
                },
                0.0);
  // potential + shift: (V^2 + lambda) u v
  out.addends[3] = q_.integrate(
      [&](double r) { return (p_.V2(r) + p_.lambda) * u(r) * v(r); }, 0.0);

  out.value = out.addends[0] + out.addends[1] + out.addends[2] + out.addends[3];

  guard_tail(u, 2.0 * p_.beta, std::abs(out.addends[3]) + std::abs(out.value) + 1.0);
  return out;
}

double FormContext::pairing_Au_v(const TestFunction& u, const TestFunction& v) const {
  const op::SectorIndex s0{0, p_.N};
  return q_.integrate(
      [&](double r) { return (op::apply_A(u, r, s0, p_) + p_.lambda * u(r)) * v(r); }, 0.0);
}

double FormContext::form_identity_residual(const TestFunction& u, const TestFunction& v) const {
  const double lhs = eval_form(u, v).value;
  const double rhs = pairing_Au_v(u, v);
  const double nu = d_norm(u).total();
  const double nv = d_norm(v).total();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::abs(lhs - rhs) / (nu * nv);
}

double FormContext::accretivity_gap(const TestFunction& u, bool enforce_threshold) const {
  if (enforce_threshold) {
    if (!p_.lambda0) {
      throw std::invalid_argument(
          "accretivity_gap: lambda0 unset; run analysis::lambda0_search and cache the result");
    }
    if (p_.lambda < *p_.lambda0) {
      throw std::invalid_argument(
          "accretivity_gap: lambda below lambda0; raise lambda or rerun lambda0_search");
    }
  }
  const double re_form = eval_form(u, u).value;
  const DNorm d = d_norm(u);
  const double bound = 0.25 * d.weighted_lap * d.weighted_lap + d.weighted_grad * d.weighted_grad +
                       d.weighted_u * d.weighted_u + 0.5 * d.potential * d.potential + d.l2 * d.l2;
  return re_form - bound;
}

double FormContext::continuity_ratio(const TestFunction& u, const TestFunction& v) const {
  const double nu = d_norm(u).total();
  const double nv = d_norm(v).total();
  if (nu == 0.0 || nv == 0.0) {
    throw std::invalid_argument("continuity_ratio: zero D-norm operand");
  }
  return std::abs(eval_form(u, v).value) / (nu * nv);
}

DNorm FormContext::d_norm(const TestFunction& u, bool tail_guard) const {
  const op::SectorIndex s0{0, p_.N};
  DNorm d;
  d.weighted_lap = std::sqrt(q_.integrate(
      [&](double r) {
        const double lap = op::apply_sector_laplacian(u.eval(r), r, s0);
        const double a = 1.0 + std::pow(r, p_.alpha);
        return a * a * lap * lap;
      },
      0.0));
  d.weighted_grad = weighted_tensor_norm(q_, u, p_.alpha - 1.0, 1);
  d.weighted_u = weighted_tensor_norm(q_, u, p_.alpha - 2.0, 0);
  d.potential = weighted_tensor_norm(q_, u, p_.beta, 0);
  d.l2 = weighted_tensor_norm(q_, u, 0.0, 0);
  if (tail_guard) guard_tail(u, 2.0 * p_.beta, d.potential * d.potential + 1e-30);
  return d;
}

D2Norm FormContext::d2_norm(const TestFunction& u, bool tail_guard) const {
  D2Norm d;
  d.v2u = weighted_tensor_norm(q_, u, 2.0 * p_.beta, 0);
  for (int h = 0; h <= 4; ++h) {
    d.weighted[static_cast<std::size_t>(h)] =
        weighted_tensor_norm(q_, u, 2.0 * p_.alpha - h, 4 - h);
  }
  for (int j = 0; j <= 4; ++j) d.h4 += weighted_tensor_norm(q_, u, 0.0, j);
  if (tail_guard) guard_tail(u, 4.0 * p_.beta, d.v2u * d.v2u + 1e-30);
  return d;
}

double FormContext::a_norm(const TestFunction& u) const {
  const double re_form = eval_form(u, u).value;
  const double l2 = weighted_tensor_norm(q_, u, 0.0, 0);
  const double sq = re_form + l2 * l2;
  if (sq < 0.0) {
    throw std::runtime_error("a_norm: negative form value; lambda below the accretive range");
  }
  return std::sqrt(sq);
}

}  // namespace biharm::forms
