#pragma once

// Truncated two-mode Fock space. Basis state |n1, n2> sits at row
// n1 * (cutoff2 + 1) + n2.

#include "mmwent/gaussian.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mmwent {

using cdouble = std::complex<double>;

/// Cutoffs for Fock-space numerics.
///
/// total_photon_cutoff bounds n1 + n2 of the prepared state and the per-mode
/// dimension of the evolved state. thermal_index_cutoff bounds the sum over
/// injected thermal photons; when unset it is ceil(20 (nbar + 1)).
struct TruncationPolicy {
    int total_photon_cutoff = 12;
    std::optional<int> thermal_index_cutoff;
    double convergence_tol = 1e-3;
    /// Doubling stops once total_photon_cutoff would exceed this.
    int max_total_photon_cutoff = 48;
    /// Allowed Kraus completeness defect on the kept input subspace.
    double completeness_tol = 1e-6;

    void validate() const;
    int thermal_cutoff_for(double nbar) const;
};

class FockDensityOp {
public:
    using Matrix = Eigen::MatrixXcd;

    FockDensityOp(int cutoff1, int cutoff2, Matrix coeffs, double trace_deficit = 0.0);

    int cutoff1() const { return cutoff1_; }
    int cutoff2() const { return cutoff2_; }
    int dim1() const { return cutoff1_ + 1; }
    int dim2() const { return cutoff2_ + 1; }
    Eigen::Index index(int n1, int n2) const { return static_cast<Eigen::Index>(n1) * dim2() + n2; }

    /// <m1, m2| rho |n1, n2>
    cdouble operator()(int m1, int m2, int n1, int n2) const { return coeffs_(index(m1, m2), index(n1, n2)); }
    const Matrix& matrix() const { return coeffs_; }

    double trace() const;
    double trace_deficit() const { return trace_deficit_; }
    double purity() const;
    double hermiticity_error() const;
    double min_eigenvalue() const;

    /// Zero-padded (or cropped, with the lost diagonal weight moved into the deficit) copy.
    FockDensityOp with_cutoffs(int cutoff1, int cutoff2) const;

    /// Sparse text dump, one "row col re im" line per nonzero entry.
    void write_triplets(std::ostream& os) const;

private:
    int cutoff1_;
    int cutoff2_;
    Matrix coeffs_;
    double trace_deficit_;
};

/// Schmidt coefficients of the photon-subtracted squeezed state, n = 0..n_max.
std::vector<double> pss_coefficients(const Squeezing& s, double kappa, int n_max);

/// Heralding probability of the two-photon subtraction.
double pss_creation_probability(const Squeezing& s, double kappa);

/// Rank-one PSS projector keeping |n, n> with 2n <= total_photon_cutoff.
/// Throws TruncationTooSmall when more than 1% of the weight is dropped and
/// std::invalid_argument for lambda * kappa = 0.
FockDensityOp pss_density(const Squeezing& s, double kappa, const TruncationPolicy& policy);

/// Truncated TMSV, same layout as pss_density.
FockDensityOp tmsv_density(const Squeezing& s, const TruncationPolicy& policy);

/// (|n,0> + |0,n>)/sqrt(2), cutoffs (n, n).
FockDensityOp noon_density(int n);

/// Hermitian matrix of rho with the mode-2 bra and ket swapped.
FockDensityOp::Matrix partial_transpose(const FockDensityOp& rho);

/// Eigenvalues of a Hermitian matrix, diagonalising each connected block of
/// its sparsity pattern separately.
std::vector<double> block_hermitian_eigenvalues(const Eigen::MatrixXcd& h);

/// |sum of PT eigenvalues below -1e-10|.
double negativity(const FockDensityOp& rho);

/// log2(1 + 2 N) at the state's own truncation.
double log_negativity_fock(const FockDensityOp& rho);

} // namespace mmwent
