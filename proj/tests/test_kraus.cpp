#include "mmwent/channel.hpp"
#include "mmwent/errors.hpp"
#include "mmwent/gaussian.hpp"
#include "mmwent/link.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace mmwent;

namespace {

const double kNbar300 = link::mean_photon_number(300e9, 300.0);

TruncationPolicy policy(int cutoff, std::optional<int> thermal = std::nullopt)
{
    TruncationPolicy p;
    p.total_photon_cutoff = cutoff;
    p.thermal_index_cutoff = thermal;
    return p;
}

FockDensityOp random_state(std::mt19937_64& rng, int cutoff)
{
    std::normal_distribution<double> g;
    const int dim = (cutoff + 1) * (cutoff + 1);
    Eigen::MatrixXcd a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            a(i, j) = cdouble(g(rng), g(rng));
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace().real();
    return FockDensityOp(cutoff, cutoff, rho);
}

double max_diff(const FockDensityOp& a, const FockDensityOp& b)
{
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

/// Unitaries of a beam splitter with transmissivity tau on each total-photon
/// sector, basis |j, total - j> (input, environment). Sectors are invariant,
/// so diagonalising each one gives the exact dilation.
std::vector<Eigen::MatrixXcd> beam_splitter_sectors(double tau, int max_total)
{
    const double theta = std::acos(std::sqrt(tau));
    std::vector<Eigen::MatrixXcd> out;
    for (int total = 0; total <= max_total; ++total) {
        // generator a^dag b - a b^dag
        Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(total + 1, total + 1);
        for (int j = 0; j < total; ++j) {
            const double v = std::sqrt((j + 1.0) * (total - j));
            gen(j + 1, j) = v;
            gen(j, j + 1) = -v;
        }
        const Eigen::MatrixXcd herm = cdouble(0.0, 1.0) * gen.cast<cdouble>();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
        Eigen::VectorXcd phases(total + 1);
        for (int j = 0; j <= total; ++j)
            phases(j) = std::exp(cdouble(0.0, -theta * es.eigenvalues()(j)));
        out.emplace_back(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
    }
    return out;
}

/// Image of |x><y| with a thermal environment, tracing the environment out.
Eigen::MatrixXcd beam_splitter_image(const std::vector<Eigen::MatrixXcd>& sectors, double nbar, int x, int y,
                                     int out_cutoff, int env_cutoff)
{
    Eigen::MatrixXcd image = Eigen::MatrixXcd::Zero(out_cutoff + 1, out_cutoff + 1);
    for (int k = 0; k <= env_cutoff; ++k) {
        const double pk = std::pow(nbar, k) / std::pow(nbar + 1.0, k + 1);
        if (pk == 0.0)
            continue;
        const Eigen::MatrixXcd& ux = sectors[static_cast<std::size_t>(x + k)];
        const Eigen::MatrixXcd& uy = sectors[static_cast<std::size_t>(y + k)];
        // column x of ux is U|x, k>
        for (int e = 0; e <= std::min(x, y) + k; ++e) {
            const int o = x + k - e;
            const int p = y + k - e;
            if (o > out_cutoff || p > out_cutoff)
                continue;
            image(o, p) += pk * ux(o, x) * std::conj(uy(p, y));
        }
    }
    return image;
}

} // namespace

TEST_CASE("pure-loss amplitudes")
{
    for (double tau : {0.0, 0.3, 0.77, 1.0}) {
        KrausAmplitudes amp(ThermalChannel(tau, 0.0), 20);
        for (int in = 0; in <= 10; ++in)
            for (int loss = 0; loss <= in; ++loss) {
                const double expect = std::sqrt(std::tgamma(in + 1.0) / (std::tgamma(loss + 1.0) * std::tgamma(in - loss + 1.0))) *
                                      std::pow(tau, 0.5 * (in - loss)) * std::pow(1.0 - tau, 0.5 * loss);
                CHECK(amp(loss, 0, in - loss) == doctest::Approx(expect).epsilon(1e-12));
                if (in - loss + 1 <= 20)
                    CHECK(amp(loss, 1, in - loss + 1) == 0.0);
            }
    }
}

TEST_CASE("vacuum noise keeps only loss operators; lossless vacuum channel is the identity")
{
    const KrausSet pure = build_kraus_set(ThermalChannel(0.6, 0.0), 6, policy(6, 4));
    for (const auto& op : pure.operators())
        if (op.thermal > 0)
            for (double a : op.amplitude)
                CHECK(a == 0.0);

    const KrausSet id = build_kraus_set(ThermalChannel(1.0, 0.0), 6, policy(6, 4));
    for (const auto& op : id.operators()) {
        const Eigen::MatrixXd g = id.dense(op, 6);
        if (op.loss == 0 && op.thermal == 0)
            CHECK((g - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-15);
        else
            CHECK(g.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("elementary images against a beam-splitter dilation")
{
    const int k = 5;
    const int t = 80;
    for (double tau : {0.0, 0.35, 0.9, 1.0}) {
        const auto sectors = beam_splitter_sectors(tau, k + t);
        for (double nbar : {0.0, 0.4, 2.0}) {
            const ThermalChannel ch(tau, nbar);
            for (int x = 0; x <= k; ++x)
                for (int y = 0; y <= k; ++y) {
                    const Eigen::MatrixXcd oracle = beam_splitter_image(sectors, nbar, x, y, k, t);
                    const Eigen::MatrixXd ref = elementary_image_reference(ch, x, y, k, t);
                    CHECK((oracle - ref.cast<cdouble>()).cwiseAbs().maxCoeff() < 1e-10);
                }
        }
    }
}

TEST_CASE("dual path on random states")
{
    std::mt19937_64 rng(424242);
    const int cutoff = 6;
    for (const ThermalChannel& ch : {ThermalChannel(0.99, kNbar300), ThermalChannel(0.5, 1.3), ThermalChannel(0.9, 0.0)}) {
        const TruncationPolicy p = policy(cutoff);
        const KrausSet kraus = build_kraus_set(ch, cutoff, p);
        for (int trial = 0; trial < 20; ++trial) {
            const FockDensityOp rho = random_state(rng, cutoff);
            const FockDensityOp ref = evolve_mode2_reference(rho, ch, p);
            const FockDensityOp viak = evolve_mode2_kraus(rho, kraus);
            const FockDensityOp ser = evolve_mode2(rho, ch, p, Execution::serial);
            const FockDensityOp par = evolve_mode2(rho, ch, p, Execution::parallel);
            CHECK(max_diff(ref, viak) < 1e-9);
            CHECK(max_diff(ref, ser) < 1e-9);
            CHECK(max_diff(ser, par) < 1e-15);
            CHECK(viak.trace_deficit() == doctest::Approx(ref.trace_deficit()).epsilon(1e-9));
        }
    }
}

TEST_CASE("completeness on the interior subspace")
{
    for (double nbar : {0.0, 0.5, 3.0, kNbar300}) {
        const ThermalChannel ch(0.97, nbar);
        const int cutoff = 8;
        const KrausSet set = build_kraus_set(ch, cutoff, policy(cutoff));
        if (nbar > 0.0)
            CHECK(set.thermal_cutoff() >= 20.0 * (nbar + 1.0));
        CHECK(set.completeness_defect(cutoff / 2) < 1e-6);
    }
    CHECK_THROWS_AS(build_kraus_set(ThermalChannel(0.97, kNbar300), 8, policy(8, 10)), CutoffInsufficient);
    CHECK_THROWS_AS(evolve_mode2(noon_density(2), ThermalChannel(0.97, kNbar300), policy(8, 10)), CutoffInsufficient);
}

TEST_CASE("trace accounting, hermiticity and positivity")
{
    std::mt19937_64 rng(99);
    for (const ThermalChannel& ch : {ThermalChannel(0.95, kNbar300), ThermalChannel(0.2, 4.0), ThermalChannel(0.7, 0.0)})
        for (int trial = 0; trial < 5; ++trial) {
            const FockDensityOp rho = random_state(rng, 5).with_cutoffs(5, 9);
            const FockDensityOp out = evolve_mode2(rho, ch, policy(9));
            CHECK(out.trace() + out.trace_deficit() == doctest::Approx(rho.trace() + rho.trace_deficit()).epsilon(1e-9));
            CHECK(out.hermiticity_error() < 1e-12);
            CHECK(out.min_eigenvalue() > -1e-9);
        }
}

TEST_CASE("lossless channel is exact")
{
    std::mt19937_64 rng(5);
    const FockDensityOp rho = random_state(rng, 4);
    const FockDensityOp out = evolve_mode2(rho, ThermalChannel(1.0, kNbar300), policy(4));
    CHECK(max_diff(out, rho) < 1e-14);
    CHECK(out.trace_deficit() == 0.0);
}

TEST_CASE("vacuum input relaxes to a thermal marginal")
{
    for (double tau : {0.0, 0.4, 0.93})
        for (double nbar : {0.3, 2.5}) {
            const int k = 40;
            FockDensityOp::Matrix m = FockDensityOp::Matrix::Zero(k + 1, k + 1);
            m(0, 0) = 1.0;
            const FockDensityOp out = evolve_mode2(FockDensityOp(0, k, m), ThermalChannel(tau, nbar), policy(k));
            const double mean = (1.0 - tau) * nbar;
            for (int x = 0; x <= k; ++x) {
                const double expect = std::pow(mean, x) / std::pow(mean + 1.0, x + 1);
                CHECK(out(0, x, 0, x).real() == doctest::Approx(expect).epsilon(1e-10));
                if (x > 0)
                    CHECK(std::abs(out(0, x, 0, x - 1)) == 0.0);
            }
        }
}

TEST_CASE("truncated tmsv against the covariance-matrix pipeline")
{
    const Squeezing s = one_ebit_squeezing();
    for (double tau : {0.99, 0.995}) {
        const ThermalChannel ch(tau, kNbar300);
        const double gauss = log_negativity_cm(evolve_single_channel(tmsv_cm(s), ch));
        const FockEvaluation ev =
            evaluate_after_channel([&](const TruncationPolicy& p) { return tmsv_density(s, p); }, ch, TruncationPolicy{});
        CHECK(ev.converged);
        CHECK(std::fabs(ev.e_ln - gauss) < 1e-3);
        if (!ev.monotone)
            WARN_MESSAGE(false, "non-monotone truncation history at tau " << tau);
    }
}

TEST_CASE("noon fast path agrees with the general evolution")
{
    for (int n : {1, 2, 3})
        for (double tau : {0.6, 0.9, 0.99}) {
            const ThermalChannel ch(tau, 0.4);
            TruncationPolicy p = policy(24);
            p.max_total_photon_cutoff = 48;
            const FockEvaluation general = evaluate_after_channel(
                [n](const TruncationPolicy& pol) { return noon_density(n).with_cutoffs(n, pol.total_photon_cutoff); }, ch, p,
                Execution::serial);
            const FockEvaluation fast = noon_after_channel(n, ch, p);
            CHECK(general.converged);
            CHECK(fast.converged);
            CHECK(std::fabs(general.e_ln - fast.e_ln) < 1e-6);
        }
    CHECK(noon_after_channel(5, ThermalChannel(1.0, kNbar300), TruncationPolicy{}).e_ln == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(noon_after_channel(2, ThermalChannel(0.0, kNbar300), TruncationPolicy{}).e_ln == 0.0);
}

TEST_CASE("non-convergence is reported")
{
    TruncationPolicy p = policy(4);
    p.max_total_photon_cutoff = 8;
    p.convergence_tol = 1e-12;
    const Squeezing s = one_ebit_squeezing();
    const FockEvaluation ev =
        evaluate_after_channel([&](const TruncationPolicy& pol) { return tmsv_density(s, pol); }, ThermalChannel(0.999, 0.1), p);
    CHECK_FALSE(ev.converged);
    CHECK(ev.history.size() == 2);
    CHECK_THROWS_AS(require_converged(ev), NonConverged);
}
