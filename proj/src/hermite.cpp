#include "hsde/hermite.hpp"

namespace hsde {

double hermite_eval(const MultiIndex& n, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != n.dim) throw std::invalid_argument("hermite_eval: point dimension mismatch");
  double v = 1.0;
  for (int i = 0; i < n.dim; ++i) v *= hermite_eval_1d<double>(n[i], x[i]);
  return v;
}

}  // namespace hsde
