#include "pinnfp/autodiff/gradient.hpp"

namespace pinnfp::autodiff {

ValueAndGradient value_and_gradient(const ScalarLoss& loss, std::span<const double> params) {
  Tape tape;
  const std::vector<Var> leaves = tape.variables(params);
  const Var out = loss(leaves);
  ValueAndGradient result;
  result.value = out.value();
  result.gradient.assign(params.size(), 0.0);
  tape.backward(out);
  for (std::size_t i = 0; i < leaves.size(); ++i) result.gradient[i] = tape.adjoint(leaves[i]);
  return result;
}

}  // namespace pinnfp::autodiff
