#pragma once

// Two-mode Gaussian states in the covariance-matrix picture (hbar = 2,
// vacuum variance 1). Mode 1 stays with the sender, mode 2 is the one
// that crosses the channel.

#include <Eigen/Dense>

#include <array>
#include <string_view>

namespace mmwent {

class Squeezing {
public:
    Squeezing() = default;

    static Squeezing from_r(double r);
    /// dB = 10 log10(e^{2r}); 10 dB gives v = 5.05.
    static Squeezing from_db(double db);
    /// Inverse of v = cosh(2r), v >= 1.
    static Squeezing from_variance(double v);

    double r() const { return r_; }
    double variance() const;
    double db() const;
    /// tanh(r), the Schmidt ratio of the Fock expansion.
    double lambda() const;

private:
    explicit Squeezing(double r) : r_(r) {}
    double r_ = 0.0;
};

/// Fixed-attenuation channel mixing in a thermal state of mean photon number nbar.
class ThermalChannel {
public:
    ThermalChannel(double tau, double nbar);
    static ThermalChannel from_omega(double tau, double omega);

    double tau() const { return tau_; }
    double nbar() const { return nbar_; }
    double omega() const { return 2.0 * nbar_ + 1.0; }

private:
    double tau_;
    double nbar_;
};

class TwoModeCM {
public:
    using Matrix = Eigen::Matrix4d;
    using Block = Eigen::Matrix2d;

    /// Throws std::invalid_argument unless m is symmetric to 1e-12 (relative).
    explicit TwoModeCM(const Matrix& m);
    static TwoModeCM from_blocks(const Block& a, const Block& b, const Block& c);

    const Matrix& matrix() const { return m_; }
    Block a() const { return m_.topLeftCorner<2, 2>(); }
    Block b() const { return m_.bottomRightCorner<2, 2>(); }
    Block c() const { return m_.topRightCorner<2, 2>(); }
    double operator()(int i, int j) const { return m_(i, j); }

    /// Ordinary symplectic spectrum {nu_-, nu_+}.
    std::array<double, 2> symplectic_eigenvalues() const;
    bool is_physical(double tol = 1e-9) const;

private:
    Matrix m_;
};

TwoModeCM tmsv_cm(const Squeezing& s);

/// Squeezer fed with thermal inputs of mean photon numbers nbar_alpha, nbar_beta.
TwoModeCM thermal_tms_cm(const Squeezing& s, double nbar_alpha, double nbar_beta);

/// Mode 2 through the channel: B -> tau B + (1 - tau) omega I, C -> sqrt(tau) C.
TwoModeCM evolve_single_channel(const TwoModeCM& m, const ThermalChannel& ch);

/// TMSV whose second mode is bounced through a relay (two hops, no measurement).
TwoModeCM direct_relay_cm(const Squeezing& s, const ThermalChannel& ch_a, const ThermalChannel& ch_b);

/// Averaged end-to-end state after a Bell measurement at the relay on the two
/// transmitted halves of two TMSV pairs with equal squeezing.
TwoModeCM swap_relay_cm(const Squeezing& s, const ThermalChannel& ch_a, const ThermalChannel& ch_b);

/// Smallest symplectic eigenvalue of the partially transposed CM.
/// Throws NonPhysicalCM when it is not real.
double smallest_pt_symplectic_eigenvalue(const TwoModeCM& m);

double log_negativity_cm(const TwoModeCM& m);

enum class EbScheme { single, direct_relay_symmetric, swap_relay_symmetric };

std::string_view to_string(EbScheme scheme);
EbScheme eb_scheme_from_string(std::string_view name);

/// Per-link transmissivity at and below which the output is separable.
double eb_transmissivity(EbScheme scheme, double omega);

/// Squeezing that gives E_LN = 1 for a pure TMSV (v = 1.25).
inline Squeezing one_ebit_squeezing() { return Squeezing::from_variance(1.25); }

} // namespace mmwent
