#pragma once

#include <memory>

#include "mae/fem.hpp"
#include "mae/tensor.hpp"

namespace mae {

/// Discrete Hessian by double regularization. For each component (i, j) two
/// screened elliptic problems are solved, with a mesh-dependent diffusion
/// c |T| on every triangle T:
///   1. pi_ij in V_0h:  c sum_T |T| (grad pi, grad phi)_T + (pi, phi)_h
///                        = -1/2 int (d_i u d_j phi + d_j u d_i phi)
///   2. D2_ij in V_h:   c sum_T |T| (grad D, grad phi)_T + (D, phi)_h = (pi, phi)_h
/// Both operators are independent of u and are factored once.
class HessianRecovery {
 public:
  explicit HessianRecovery(const FemSpace& space, double c = 1.0);
  ~HessianRecovery();
  HessianRecovery(HessianRecovery&&) noexcept;
  HessianRecovery& operator=(HessianRecovery&&) = delete;

  /// u must vanish on the boundary (u in V_0h).
  SymTensorField operator()(const NodalField& u) const;

  const FemSpace& space() const { return space_; }
  double c() const { return c_; }

 private:
  struct Factors;
  const FemSpace& space_;
  double c_;
  std::unique_ptr<Factors> factors_;
};

/// Pointwise P+[ e^{-gamma tau} p_old + (1 - e^{-gamma tau}) hess ].
SymTensorField relax_p(const SymTensorField& p_old, const SymTensorField& hess, double gamma,
                       double tau);

}  // namespace mae
