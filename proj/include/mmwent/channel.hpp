#pragma once

// Thermal-loss channel acting on mode 2 of a truncated two-mode state.
//
// Three routes produce the same map:
//   * evolve_mode2_reference: the elementary-operator quadruple sum, serial,
//     kept as the test oracle;
//   * evolve_mode2_kraus: literal G rho G^dagger over a materialised KrausSet;
//   * evolve_mode2: Kraus amplitudes folded into one transfer matrix per photon
//     shift, applied block by block (OpenMP when enabled).

#include "mmwent/fock.hpp"
#include "mmwent/gaussian.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace mmwent {

enum class Execution { serial, parallel };

/// Amplitude <out| G_{loss,thermal} |in> with out = in + thermal - loss,
/// including the sqrt of the thermal weight. Evaluated term by term in log
/// space; factorial tables grow on demand.
class KrausAmplitudes {
public:
    explicit KrausAmplitudes(const ThermalChannel& ch, int max_index = 64);

    const ThermalChannel& channel() const { return channel_; }

    /// Requires max(out, loss, in, thermal) <= table size; call reserve() first.
    double operator()(int loss, int thermal, int out) const;
    void reserve(int max_index);

    /// Probability of a thermal index above thermal_cutoff: (nbar/(nbar+1))^(cutoff+1).
    double thermal_tail(int thermal_cutoff) const;

private:
    double log_factorial(int n) const { return log_factorial_[static_cast<std::size_t>(n)]; }

    ThermalChannel channel_;
    double log_tau_;
    double log_loss_;
    double log_ratio_;    // log(nbar / (nbar + 1))
    double log_norm_;     // -log(nbar + 1)
    std::vector<double> log_factorial_;
};

/// G_{loss,thermal} = sum_k amplitude[k] |k + thermal - loss><k| for inputs k <= input_cutoff.
struct KrausOperator {
    int loss = 0;
    int thermal = 0;
    std::vector<double> amplitude;

    int shift() const { return thermal - loss; }
};

class KrausSet {
public:
    KrausSet(ThermalChannel ch, int input_cutoff, int thermal_cutoff, std::vector<KrausOperator> ops);

    const ThermalChannel& channel() const { return channel_; }
    int input_cutoff() const { return input_cutoff_; }
    int thermal_cutoff() const { return thermal_cutoff_; }
    int ell_cutoff() const { return input_cutoff_ + thermal_cutoff_; }
    const std::vector<KrausOperator>& operators() const { return ops_; }

    /// Dense (output_cutoff + 1) x (input_cutoff + 1) matrix of one operator.
    Eigen::MatrixXd dense(const KrausOperator& op, int output_cutoff) const;

    /// max over inputs k <= max_input of |1 - (sum G^dagger G)_kk|; the
    /// off-diagonal entries vanish identically because every operator shifts
    /// photon number by a fixed amount.
    double completeness_defect(int max_input) const;

private:
    ThermalChannel channel_;
    int input_cutoff_;
    int thermal_cutoff_;
    std::vector<KrausOperator> ops_;
};

/// All G_{l,n} with n <= thermal cutoff, acting on inputs <= mode_cutoff, with
/// untruncated outputs. Throws CutoffInsufficient when the completeness defect
/// on inputs <= mode_cutoff / 2 exceeds policy.completeness_tol.
KrausSet build_kraus_set(const ThermalChannel& ch, int mode_cutoff, const TruncationPolicy& policy);

/// Per-shift transfer matrices: for d = out - in,
/// transfer(d)(x, y) = sum_n G[x+d <- x] G[y+d <- y] over the kept thermal indices.
class ChannelKernel {
public:
    ChannelKernel(const ThermalChannel& ch, int mode_cutoff, int thermal_cutoff,
                  Execution exec = Execution::parallel);

    int mode_cutoff() const { return cutoff_; }
    int thermal_cutoff() const { return thermal_cutoff_; }
    int min_shift() const { return -cutoff_; }
    int max_shift() const { return cutoff_; }
    const Eigen::MatrixXd& transfer(int shift) const { return transfer_[static_cast<std::size_t>(shift + cutoff_)]; }

    /// Apply to mode 2 of rho; rho.cutoff2() must equal mode_cutoff().
    FockDensityOp apply(const FockDensityOp& rho, Execution exec = Execution::parallel) const;

private:
    int cutoff_;
    int thermal_cutoff_;
    std::vector<Eigen::MatrixXd> transfer_;
};

/// Production path. Output keeps rho's cutoffs; weight pushed above cutoff2
/// or lost to the thermal cutoff goes into trace_deficit.
FockDensityOp evolve_mode2(const FockDensityOp& rho, const ThermalChannel& ch, const TruncationPolicy& policy,
                           Execution exec = Execution::parallel);

/// Literal Kraus conjugation; kraus.input_cutoff() must be >= rho.cutoff2().
FockDensityOp evolve_mode2_kraus(const FockDensityOp& rho, const KrausSet& kraus);

/// Image of the elementary operator |in_ket><in_bra| truncated to mode_cutoff,
/// from the direct (n, l, j, j') sum.
Eigen::MatrixXd elementary_image_reference(const ThermalChannel& ch, int in_ket, int in_bra, int mode_cutoff,
                                           int thermal_cutoff);

/// Serial oracle built from elementary_image_reference.
FockDensityOp evolve_mode2_reference(const FockDensityOp& rho, const ThermalChannel& ch,
                                     const TruncationPolicy& policy);

struct FockEvaluation {
    double e_ln = 0.0;
    bool converged = false;
    int total_photon_cutoff = 0;
    int thermal_cutoff = 0;
    double trace_deficit = 0.0;
    double last_change = 0.0;
    /// E_LN at each refinement, in order.
    std::vector<double> history;
    /// history moved in one direction only.
    bool monotone = true;
};

using StateFactory = std::function<FockDensityOp(const TruncationPolicy&)>;

/// Evolve and measure at total_photon_cutoff N, then 2N, 4N, ... until two
/// successive values differ by at most convergence_tol.
FockEvaluation evaluate_after_channel(const StateFactory& make_state, const ThermalChannel& ch,
                                      const TruncationPolicy& policy, Execution exec = Execution::parallel);

/// NOON state through the channel using only the thermal cutoff. The partial
/// transpose splits into 2x2 blocks pairing |0, x> with |n, x + n>, so no
/// photon cutoff on the output is needed. Converged when doubling the thermal
/// cutoff moves E_LN by at most convergence_tol.
FockEvaluation noon_after_channel(int n, const ThermalChannel& ch, const TruncationPolicy& policy);

/// Throws NonConverged for an unconverged evaluation.
void require_converged(const FockEvaluation& eval);

} // namespace mmwent
