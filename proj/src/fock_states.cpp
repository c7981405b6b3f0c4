#include "mmwent/fock.hpp"

#include "mmwent/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mmwent {

void TruncationPolicy::validate() const
{
    if (total_photon_cutoff < 1)
        throw std::invalid_argument("total_photon_cutoff must be >= 1");
    if (thermal_index_cutoff && *thermal_index_cutoff < 1)
        throw std::invalid_argument("thermal_index_cutoff must be >= 1");
    if (!(convergence_tol > 0.0))
        throw std::invalid_argument("convergence_tol must be > 0");
    if (max_total_photon_cutoff < total_photon_cutoff)
        throw std::invalid_argument("max_total_photon_cutoff must be >= total_photon_cutoff");
    if (!(completeness_tol > 0.0))
        throw std::invalid_argument("completeness_tol must be > 0");
}

int TruncationPolicy::thermal_cutoff_for(double nbar) const
{
    if (thermal_index_cutoff)
        return *thermal_index_cutoff;
    return static_cast<int>(std::ceil(20.0 * (nbar + 1.0)));
}

FockDensityOp::FockDensityOp(int cutoff1, int cutoff2, Matrix coeffs, double trace_deficit)
    : cutoff1_(cutoff1), cutoff2_(cutoff2), coeffs_(std::move(coeffs)), trace_deficit_(trace_deficit)
{
    if (cutoff1 < 0 || cutoff2 < 0)
        throw std::invalid_argument("Fock cutoffs must be >= 0");
    const Eigen::Index dim = static_cast<Eigen::Index>(dim1()) * dim2();
    if (coeffs_.rows() != dim || coeffs_.cols() != dim)
        throw std::invalid_argument("density matrix size does not match cutoffs");
    if (trace_deficit_ < 0.0)
        trace_deficit_ = 0.0;
}

double FockDensityOp::trace() const { return coeffs_.trace().real(); }

double FockDensityOp::purity() const
{
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return coeffs_.squaredNorm();
}

double FockDensityOp::hermiticity_error() const
{
    return (coeffs_ - coeffs_.adjoint()).cwiseAbs().maxCoeff();
}

double FockDensityOp::min_eigenvalue() const
{
    const auto ev = block_hermitian_eigenvalues(coeffs_);
    double lo = 0.0;
    for (double e : ev)
        lo = std::min(lo, e);
    return ev.empty() ? 0.0 : lo;
}

FockDensityOp FockDensityOp::with_cutoffs(int c1, int c2) const
{
    const Eigen::Index dim = static_cast<Eigen::Index>(c1 + 1) * (c2 + 1);
    Matrix out = Matrix::Zero(dim, dim);
    double lost = 0.0;
    for (int m1 = 0; m1 <= cutoff1_; ++m1)
        for (int m2 = 0; m2 <= cutoff2_; ++m2) {
            const bool keep_row = m1 <= c1 && m2 <= c2;
            if (!keep_row) {
                lost += coeffs_(index(m1, m2), index(m1, m2)).real();
                continue;
            }
            const Eigen::Index r = static_cast<Eigen::Index>(m1) * (c2 + 1) + m2;
            for (int n1 = 0; n1 <= std::min(cutoff1_, c1); ++n1)
                for (int n2 = 0; n2 <= std::min(cutoff2_, c2); ++n2)
                    out(r, static_cast<Eigen::Index>(n1) * (c2 + 1) + n2) = coeffs_(index(m1, m2), index(n1, n2));
        }
    return FockDensityOp(c1, c2, std::move(out), trace_deficit_ + lost);
}

void FockDensityOp::write_triplets(std::ostream& os) const
{
    os << "% cutoff1 " << cutoff1_ << " cutoff2 " << cutoff2_ << " trace_deficit " << trace_deficit_ << '\n';
    for (Eigen::Index i = 0; i < coeffs_.rows(); ++i)
        for (Eigen::Index j = 0; j < coeffs_.cols(); ++j) {
            const cdouble z = coeffs_(i, j);
            if (z != cdouble(0.0))
                os << i << ' ' << j << ' ' << z.real() << ' ' << z.imag() << '\n';
        }
}

std::vector<double> pss_coefficients(const Squeezing& s, double kappa, int n_max)
{
    if (n_max < 1)
        throw std::invalid_argument("n_max must be >= 1");
    if (!(kappa >= 0.0 && kappa <= 1.0))
        throw std::invalid_argument("kappa must lie in [0, 1]");
    const double x = s.lambda() * kappa;
    const double x2 = x * x;
    const double norm = std::sqrt((1.0 - x2) * (1.0 - x2) * (1.0 - x2) / (1.0 + x2));
    std::vector<double> q(static_cast<std::size_t>(n_max) + 1);
    double power = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        q[n] = norm * power * (n + 1);
        power *= x;
    }
    return q;
}

double pss_creation_probability(const Squeezing& s, double kappa)
{
    if (!(kappa >= 0.0 && kappa <= 1.0))
        throw std::invalid_argument("kappa must lie in [0, 1]");
    const double l2 = s.lambda() * s.lambda();
    const double x2 = l2 * kappa * kappa;
    const double denom = (1.0 - x2) * (1.0 - x2) * (1.0 - x2);
    return l2 * (1.0 - l2) * (1.0 + x2) * (1.0 - kappa) * (1.0 - kappa) / denom;
}

namespace {

FockDensityOp schmidt_diagonal_state(const std::vector<double>& q, int total_cutoff)
{
    const int n_keep = total_cutoff / 2;
    const int dim2 = total_cutoff + 1;
    const Eigen::Index dim = static_cast<Eigen::Index>(dim2) * dim2;
    FockDensityOp::Matrix rho = FockDensityOp::Matrix::Zero(dim, dim);
    double kept = 0.0;
    for (int m = 0; m <= n_keep; ++m) {
        kept += q[m] * q[m];
        for (int n = 0; n <= n_keep; ++n)
            rho(static_cast<Eigen::Index>(m) * dim2 + m, static_cast<Eigen::Index>(n) * dim2 + n) = q[m] * q[n];
    }
    const double deficit = std::max(0.0, 1.0 - kept);
    if (deficit > 0.01)
        throw TruncationTooSmall("total_photon_cutoff " + std::to_string(total_cutoff) + " drops " +
                                 std::to_string(deficit) + " of the state's weight");
    return FockDensityOp(total_cutoff, total_cutoff, std::move(rho), deficit);
}

} // namespace

FockDensityOp pss_density(const Squeezing& s, double kappa, const TruncationPolicy& policy)
{
    policy.validate();
    if (s.lambda() * kappa == 0.0)
        throw std::invalid_argument("photon subtraction needs lambda * kappa > 0");
    const int n_keep = policy.total_photon_cutoff / 2;
    return schmidt_diagonal_state(pss_coefficients(s, kappa, std::max(1, n_keep)), policy.total_photon_cutoff);
}

FockDensityOp tmsv_density(const Squeezing& s, const TruncationPolicy& policy)
{
    policy.validate();
    const double lambda = s.lambda();
    const int n_keep = std::max(1, policy.total_photon_cutoff / 2);
    std::vector<double> q(static_cast<std::size_t>(n_keep) + 1);
    const double norm = std::sqrt(1.0 - lambda * lambda);
    double power = 1.0;
    for (int n = 0; n <= n_keep; ++n) {
        q[n] = norm * power;
        power *= lambda;
    }
    return schmidt_diagonal_state(q, policy.total_photon_cutoff);
}

FockDensityOp noon_density(int n)
{
    if (n < 1)
        throw std::invalid_argument("NOON photon number must be >= 1");
    const int d = n + 1;
    const Eigen::Index dim = static_cast<Eigen::Index>(d) * d;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi(static_cast<Eigen::Index>(n) * d + 0) = 1.0 / std::sqrt(2.0);
    psi(0 * d + n) = 1.0 / std::sqrt(2.0);
    return FockDensityOp(n, n, psi * psi.adjoint());
}

} // namespace mmwent
