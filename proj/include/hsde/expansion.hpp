#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>

#include "hsde/multi_index.hpp"
#include "hsde/quadrature.hpp"

namespace hsde {

/// Truncated Hermite expansion representing an element of S_p (or S_{-p}).
/// Coefficients are stored densely, aligned to MultiIndexSet::get(dim, cutoff);
/// the regularity order p is metadata recording which space the element is
/// treated as living in.
struct ExpansionVector {
  int dim = 1;
  int cutoff = 0;
  double regularity = 0.0;
  Eigen::VectorXd coeffs;
  std::shared_ptr<const MultiIndexSet> basis;

  ExpansionVector() = default;
  ExpansionVector(int dim_, int cutoff_, double regularity_)
      : dim(dim_),
        cutoff(cutoff_),
        regularity(regularity_),
        basis(MultiIndexSet::get(dim_, cutoff_)) {
    coeffs = Eigen::VectorXd::Zero(basis->size());
  }

  double coeff(const MultiIndex& n) const {
    const int i = basis->index_of(n);
    return i < 0 ? 0.0 : coeffs[i];
  }
  void set_coeff(const MultiIndex& n, double v) {
    const int i = basis->index_of(n);
    if (i < 0) throw std::invalid_argument("ExpansionVector: multi-index beyond cutoff");
    coeffs[i] = v;
  }

  bool same_shape(const ExpansionVector& o) const { return dim == o.dim && cutoff == o.cutoff; }
};

ExpansionVector zero_expansion(int dim, int cutoff, double regularity);

/// Unit coefficient on basis element h_n.
ExpansionVector basis_expansion(const MultiIndex& n, int cutoff, double regularity);

/// Truncated delta at the origin: coeffs[n] = h_n(0).
ExpansionVector delta0_expansion(int dim, int cutoff, double regularity);

/// Copy extended (or restricted is rejected) to a larger cutoff with zeros.
ExpansionVector pad_to_cutoff(const ExpansionVector& y, int cutoff);

/// Pointwise reconstruction sum_n coeffs[n] h_n(x).
double reconstruct(const ExpansionVector& y, const Eigen::Ref<const Eigen::VectorXd>& x);

/// L^2 projection coefficients <f, h_n> for |n| <= cutoff by tensor-product
/// quadrature. The caller is responsible for f decaying fast enough that the
/// tail beyond [-L, L]^d is below tolerance.
ExpansionVector project(const std::function<double(const Eigen::VectorXd&)>& f, int dim,
                        int cutoff, const QuadratureRule& rule, double regularity = 0.0);

/// <f,g>_p = sum_n (2|n|+d)^{2p} f_n g_n over the common (zero-padded) basis.
double inner_p(const ExpansionVector& f, const ExpansionVector& g, double p);

double norm_p(const ExpansionVector& f, double p);

/// Duality pairing of f in S_p with y in S_{-p}: plain coefficient dot
/// product; satisfies |dual_pair(f,y)| <= norm_p(f) norm_{-p}(y).
double dual_pair(const ExpansionVector& f, const ExpansionVector& y);

/// Exact-decimal text serialization: header line `dim cutoff regularity`,
/// then one `n_1 [n_2 n_3] coefficient` line per retained multi-index.
/// Doubles are printed with 17 significant digits and round-trip exactly.
std::string to_text(const ExpansionVector& y);
ExpansionVector from_text(const std::string& text);
void write_text(std::ostream& os, const ExpansionVector& y);
ExpansionVector read_text(std::istream& is);

}  // namespace hsde
