#include "mmwent/gaussian.hpp"

#include "mmwent/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace mmwent {

namespace {

const Eigen::Matrix2d kZ = (Eigen::Matrix2d() << 1.0, 0.0, 0.0, -1.0).finished();
const Eigen::Matrix2d kI = Eigen::Matrix2d::Identity();

// Symplectic spectrum {nu_-, nu_+} as singular values of M^1/2 Omega M^1/2.
// Unlike the determinant formula this keeps full relative precision for
// strongly squeezed and for pure states. Empty when m is not positive definite.
std::optional<std::array<double, 2>> williamson_spectrum(const Eigen::Matrix4d& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
    if (es.info() != Eigen::Success || !(es.eigenvalues()(0) > 0.0))
        return std::nullopt;
    const Eigen::Matrix4d root = es.operatorSqrt();
    Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
    omega(0, 1) = omega(2, 3) = 1.0;
    omega(1, 0) = omega(3, 2) = -1.0;
    const Eigen::Vector4d sv = Eigen::JacobiSVD<Eigen::Matrix4d>(root * omega * root).singularValues();
    // descending, each value twice
    return std::array<double, 2>{0.5 * (sv(2) + sv(3)), 0.5 * (sv(0) + sv(1))};
}

} // namespace

Squeezing Squeezing::from_r(double r)
{
    if (!(r >= 0.0) || !std::isfinite(r))
        throw std::invalid_argument("squeezing r must be finite and >= 0");
    return Squeezing(r);
}

Squeezing Squeezing::from_db(double db)
{
    if (!(db >= 0.0))
        throw std::invalid_argument("squeezing dB must be >= 0");
    return from_r(0.5 * db * std::log(10.0) / 10.0);
}

Squeezing Squeezing::from_variance(double v)
{
    if (!(v >= 1.0))
        throw std::invalid_argument("quadrature variance must be >= 1");
    return from_r(0.5 * std::acosh(v));
}

double Squeezing::variance() const { return std::cosh(2.0 * r_); }
double Squeezing::db() const { return 10.0 * (2.0 * r_) / std::log(10.0); }
double Squeezing::lambda() const { return std::tanh(r_); }

ThermalChannel::ThermalChannel(double tau, double nbar) : tau_(tau), nbar_(nbar)
{
    if (!(tau >= 0.0 && tau <= 1.0))
        throw std::invalid_argument("channel transmissivity must lie in [0, 1], got " + std::to_string(tau));
    if (!(nbar >= 0.0) || !std::isfinite(nbar))
        throw std::invalid_argument("thermal photon number must be finite and >= 0");
}

ThermalChannel ThermalChannel::from_omega(double tau, double omega)
{
    if (!(omega >= 1.0))
        throw std::invalid_argument("thermal variance must be >= 1");
    return ThermalChannel(tau, 0.5 * (omega - 1.0));
}

TwoModeCM::TwoModeCM(const Matrix& m) : m_(m)
{
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("covariance matrix is not symmetric");
    m_ = 0.5 * (m + m.transpose());
}

TwoModeCM TwoModeCM::from_blocks(const Block& a, const Block& b, const Block& c)
{
    Matrix m;
    m << a, c, c.transpose(), b;
    return TwoModeCM(m);
}

std::array<double, 2> TwoModeCM::symplectic_eigenvalues() const
{
    if (const auto nu = williamson_spectrum(m_))
        return *nu;
    throw NonPhysicalCM("covariance matrix is not positive definite");
}

bool TwoModeCM::is_physical(double tol) const
{
    for (int i = 0; i < 4; ++i)
        if (m_(i, i) < 1.0 - tol)
            return false;
    const auto nu = williamson_spectrum(m_);
    return nu && (*nu)[0] >= 1.0 - tol;
}

TwoModeCM tmsv_cm(const Squeezing& s)
{
    const double v = s.variance();
    // sinh(2r) equals sqrt(v^2 - 1) without the cancellation near v = 1.
    const double c = std::sinh(2.0 * s.r());
    return TwoModeCM::from_blocks(v * kI, v * kI, c * kZ);
}

TwoModeCM thermal_tms_cm(const Squeezing& s, double nbar_alpha, double nbar_beta)
{
    if (!(nbar_alpha >= 0.0) || !(nbar_beta >= 0.0))
        throw std::invalid_argument("thermal input photon numbers must be >= 0");
    const double r = s.r();
    const double ch2 = std::cosh(r) * std::cosh(r);
    const double sh2 = std::sinh(r) * std::sinh(r);
    const double a = 2.0 * nbar_alpha * ch2 + 2.0 * nbar_beta * sh2 + std::cosh(2.0 * r);
    const double b = 2.0 * nbar_alpha * sh2 + 2.0 * nbar_beta * ch2 + std::cosh(2.0 * r);
    const double c = (nbar_alpha + nbar_beta + 1.0) * std::sinh(2.0 * r);
    return TwoModeCM::from_blocks(a * kI, b * kI, c * kZ);
}

TwoModeCM evolve_single_channel(const TwoModeCM& m, const ThermalChannel& ch)
{
    const double tau = ch.tau();
    const TwoModeCM::Block b = tau * m.b() + (1.0 - tau) * ch.omega() * kI;
    const TwoModeCM::Block c = std::sqrt(tau) * m.c();
    return TwoModeCM::from_blocks(m.a(), b, c);
}

TwoModeCM direct_relay_cm(const Squeezing& s, const ThermalChannel& ch_a, const ThermalChannel& ch_b)
{
    return evolve_single_channel(evolve_single_channel(tmsv_cm(s), ch_a), ch_b);
}

TwoModeCM swap_relay_cm(const Squeezing& s, const ThermalChannel& ch_a, const ThermalChannel& ch_b)
{
    const double v = s.variance();
    const double ta = ch_a.tau();
    const double tb = ch_b.tau();
    const double theta = (ta + tb) * v + (1.0 - ta) * ch_a.omega() + (1.0 - tb) * ch_b.omega();
    if (!(theta > 0.0))
        throw std::logic_error("swap relay normalisation must be positive");
    const double k = v * v - 1.0;
    const double a = v - k * ta / theta;
    const double b = v - k * tb / theta;
    // The measurement leaves -sqrt(ta tb) Z inside a subtracted term; the net
    // cross block is stored with the TMSV sign pattern.
    const double c = k * std::sqrt(ta * tb) / theta;
    return TwoModeCM::from_blocks(a * kI, b * kI, c * kZ);
}

double smallest_pt_symplectic_eigenvalue(const TwoModeCM& m)
{
    const double delta = m.a().determinant() + m.b().determinant() - 2.0 * m.c().determinant();
    const double det = m.matrix().determinant();
    if (delta * delta - 4.0 * det < -1e-9 * std::max(1.0, delta * delta))
        throw NonPhysicalCM("partially transposed CM has complex symplectic eigenvalues");
    // Partial transpose flips the sign of p2.
    Eigen::Matrix4d pt = m.matrix();
    pt.row(3) *= -1.0;
    pt.col(3) *= -1.0;
    const auto nu = williamson_spectrum(pt);
    if (!nu)
        throw NonPhysicalCM("covariance matrix is not positive definite");
    return (*nu)[0];
}

double log_negativity_cm(const TwoModeCM& m)
{
    const double nu = smallest_pt_symplectic_eigenvalue(m);
    return nu < 1.0 ? -std::log2(nu) : 0.0;
}

std::string_view to_string(EbScheme scheme)
{
    switch (scheme) {
    case EbScheme::single: return "single";
    case EbScheme::direct_relay_symmetric: return "direct_relay";
    case EbScheme::swap_relay_symmetric: return "swap_relay";
    }
    return "?";
}

EbScheme eb_scheme_from_string(std::string_view name)
{
    if (name == "single")
        return EbScheme::single;
    if (name == "direct_relay" || name == "direct")
        return EbScheme::direct_relay_symmetric;
    if (name == "swap_relay" || name == "swap")
        return EbScheme::swap_relay_symmetric;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

double eb_transmissivity(EbScheme scheme, double omega)
{
    if (!(omega >= 1.0))
        throw std::invalid_argument("thermal variance must be >= 1");
    switch (scheme) {
    case EbScheme::single: return (omega - 1.0) / (omega + 1.0);
    case EbScheme::direct_relay_symmetric: return std::sqrt(omega * omega - 1.0) / (omega + 1.0);
    case EbScheme::swap_relay_symmetric: return omega / (omega + 1.0);
    }
    return 0.0;
}

} // namespace mmwent
