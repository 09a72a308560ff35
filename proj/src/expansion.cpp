#include "hsde/expansion.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "hsde/hermite.hpp"

namespace hsde {

namespace {

void format_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

ExpansionVector zero_expansion(int dim, int cutoff, double regularity) {
  return ExpansionVector(dim, cutoff, regularity);
}

ExpansionVector basis_expansion(const MultiIndex& n, int cutoff, double regularity) {
  ExpansionVector y(n.dim, cutoff, regularity);
  y.set_coeff(n, 1.0);
  return y;
}

ExpansionVector delta0_expansion(int dim, int cutoff, double regularity) {
  ExpansionVector y(dim, cutoff, regularity);
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < y.basis->size(); ++i)
    y.coeffs[i] = hermite_eval(y.basis->at(i), origin);
  return y;
}

ExpansionVector pad_to_cutoff(const ExpansionVector& y, int cutoff) {
  if (cutoff < y.cutoff) throw std::invalid_argument("pad_to_cutoff: cannot shrink a cutoff");
  if (cutoff == y.cutoff) return y;
  ExpansionVector out(y.dim, cutoff, y.regularity);
  for (int i = 0; i < y.basis->size(); ++i) {
    out.coeffs[out.basis->index_of(y.basis->at(i))] = y.coeffs[i];
  }
  return out;
}

double reconstruct(const ExpansionVector& y, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != y.dim) throw std::invalid_argument("reconstruct: point dimension mismatch");
  // Per-axis tables, then one pass over the basis enumeration.
  Eigen::MatrixXd axis(y.cutoff + 1, y.dim);
  for (int a = 0; a < y.dim; ++a) {
    Eigen::VectorXd pt(1);
    pt[0] = x[a];
    axis.col(a) = hermite_table<double>(y.cutoff, pt).row(0);
  }
  double s = 0.0;
  for (int i = 0; i < y.basis->size(); ++i) {
    const MultiIndex& n = y.basis->at(i);
    double prod = y.coeffs[i];
    for (int a = 0; a < y.dim; ++a) prod *= axis(n[a], a);
    s += prod;
  }
  return s;
}

ExpansionVector project(const std::function<double(const Eigen::VectorXd&)>& f, int dim,
                        int cutoff, const QuadratureRule& rule, double regularity) {
  rule.require_nodes_for(cutoff);
  ExpansionVector out(dim, cutoff, regularity);
  const Eigen::MatrixXd table = hermite_table<double>(cutoff, rule.nodes);
  const int nq = rule.size();

  if (dim == 1) {
    Eigen::VectorXd fw(nq);
    Eigen::VectorXd pt(1);
    for (int k = 0; k < nq; ++k) {
      pt[0] = rule.nodes[k];
      fw[k] = f(pt) * rule.weights[k];
    }
    for (int i = 0; i < out.basis->size(); ++i)
      out.coeffs[i] = table.col(out.basis->at(i)[0]).dot(fw);
    return out;
  }

  // Tensor-grid loop for d in {2,3}.
  std::array<int, kMaxDim> idx{0, 0, 0};
  Eigen::VectorXd pt(dim);
  const long total = static_cast<long>(std::pow(static_cast<double>(nq), dim));
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    double wt = 1.0;
    for (int a = 0; a < dim; ++a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % nq);
      rem /= nq;
      pt[a] = rule.nodes[idx[static_cast<std::size_t>(a)]];
      wt *= rule.weights[idx[static_cast<std::size_t>(a)]];
    }
    const double fv = f(pt);
    if (fv == 0.0) continue;
    for (int i = 0; i < out.basis->size(); ++i) {
      const MultiIndex& n = out.basis->at(i);
      double prod = wt * fv;
      for (int a = 0; a < dim; ++a) prod *= table(idx[static_cast<std::size_t>(a)], n[a]);
      out.coeffs[i] += prod;
    }
  }
  return out;
}

namespace {

// Shared basis alignment for the bilinear forms: pads the smaller operand.
std::pair<ExpansionVector, ExpansionVector> aligned(const ExpansionVector& f,
                                                    const ExpansionVector& g) {
  if (f.dim != g.dim) throw std::invalid_argument("expansion pair: dimension mismatch");
  const int n = std::max(f.cutoff, g.cutoff);
  return {pad_to_cutoff(f, n), pad_to_cutoff(g, n)};
}

}  // namespace

double inner_p(const ExpansionVector& f, const ExpansionVector& g, double p) {
  auto [a, b] = aligned(f, g);
  double s = 0.0;
  std::vector<double> order_weight(static_cast<std::size_t>(a.cutoff) + 1);
  for (int o = 0; o <= a.cutoff; ++o)
    order_weight[static_cast<std::size_t>(o)] = std::pow(2.0 * o + a.dim, 2.0 * p);
  for (int i = 0; i < a.basis->size(); ++i)
    s += order_weight[static_cast<std::size_t>(a.basis->order_of(i))] * a.coeffs[i] * b.coeffs[i];
  return s;
}

double norm_p(const ExpansionVector& f, double p) { return std::sqrt(inner_p(f, f, p)); }

double dual_pair(const ExpansionVector& f, const ExpansionVector& y) {
  auto [a, b] = aligned(f, y);
  return a.coeffs.dot(b.coeffs);
}

std::string to_text(const ExpansionVector& y) {
  std::string out;
  out += std::to_string(y.dim);
  out += ' ';
  out += std::to_string(y.cutoff);
  out += ' ';
  format_double(out, y.regularity);
  out += '\n';
  for (int i = 0; i < y.basis->size(); ++i) {
    const MultiIndex& n = y.basis->at(i);
    for (int a = 0; a < y.dim; ++a) {
      out += std::to_string(n[a]);
      out += ' ';
    }
    format_double(out, y.coeffs[i]);
    out += '\n';
  }
  return out;
}

void write_text(std::ostream& os, const ExpansionVector& y) { os << to_text(y); }

ExpansionVector read_text(std::istream& is) {
  int dim = 0, cutoff = -1;
  double reg = 0.0;
  if (!(is >> dim >> cutoff >> reg))
    throw std::runtime_error("ExpansionVector: malformed header line");
  ExpansionVector y(dim, cutoff, reg);
  for (int i = 0; i < y.basis->size(); ++i) {
    MultiIndex n;
    n.dim = dim;
    for (int a = 0; a < dim; ++a)
      if (!(is >> n.entries[static_cast<std::size_t>(a)]))
        throw std::runtime_error("ExpansionVector: truncated coefficient list");
    n.validate();
    double v;
    if (!(is >> v)) throw std::runtime_error("ExpansionVector: truncated coefficient list");
    const int pos = y.basis->index_of(n);
    if (pos < 0) throw std::runtime_error("ExpansionVector: multi-index beyond cutoff");
    y.coeffs[pos] = v;
  }
  return y;
}

ExpansionVector from_text(const std::string& text) {
  std::istringstream is(text);
  return read_text(is);
}

}  // namespace hsde
