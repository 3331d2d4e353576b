#pragma once

#include <functional>
#include <string>

#include "core/quadrature.hpp"

namespace ellgrow {

/// Scalar field with closed-form derivatives. The divergence-form solver
/// consumes grad and lap analytically, so numerical differentiation never
/// enters the error budget.
struct UField {
  std::string name;
  std::function<double(Complex)> value;
  std::function<Complex(Complex)> grad;
  std::function<double(Complex)> lap;

  std::vector<double> sample(const AreaRule& rule) const;
  std::vector<double> sample_lap(const AreaRule& rule) const;
};

UField u_const(double c);
UField u_one_plus_re();   // 1 + Re z
UField u_abs2();          // |z|^2
UField u_gaussian(double sigma, Complex center);

/// Registry lookup for CLI configs: "const:0.5", "re", "abs2",
/// "gaussian:0.6:0.2,0.1". InputError on unknown names or bad parameters.
UField ufield_from_name(const std::string& text);

}  // namespace ellgrow
