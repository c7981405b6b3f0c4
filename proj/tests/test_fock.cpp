#include "mmwent/errors.hpp"
#include "mmwent/fock.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

using namespace mmwent;

namespace {

TruncationPolicy with_cutoff(int n)
{
    TruncationPolicy p;
    p.total_photon_cutoff = n;
    return p;
}

/// Product of two diagonal single-mode states.
FockDensityOp product_diagonal(const std::vector<double>& p1, const std::vector<double>& p2)
{
    const int c1 = static_cast<int>(p1.size()) - 1;
    const int c2 = static_cast<int>(p2.size()) - 1;
    const Eigen::Index dim = static_cast<Eigen::Index>(p1.size() * p2.size());
    FockDensityOp::Matrix m = FockDensityOp::Matrix::Zero(dim, dim);
    for (int a = 0; a <= c1; ++a)
        for (int b = 0; b <= c2; ++b)
            m(a * (c2 + 1) + b, a * (c2 + 1) + b) = p1[a] * p2[b];
    return FockDensityOp(c1, c2, m);
}

std::vector<double> thermal_weights(double nbar, int cutoff)
{
    std::vector<double> p;
    for (int k = 0; k <= cutoff; ++k)
        p.push_back(std::pow(nbar, k) / std::pow(nbar + 1.0, k + 1));
    return p;
}

} // namespace

TEST_CASE("truncation policy validation")
{
    TruncationPolicy p;
    CHECK_NOTHROW(p.validate());
    p.total_photon_cutoff = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.convergence_tol = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.thermal_index_cutoff = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    CHECK(p.thermal_cutoff_for(0.0) == 20);
    CHECK(p.thermal_cutoff_for(20.34) == 427);
    p.thermal_index_cutoff = 33;
    CHECK(p.thermal_cutoff_for(20.34) == 33);
}

TEST_CASE("pss coefficients")
{
    const auto q0 = pss_coefficients(Squeezing::from_r(0.0), 0.7, 5);
    CHECK(q0[0] == 1.0);
    for (std::size_t n = 1; n < q0.size(); ++n)
        CHECK(q0[n] == 0.0);
    const auto qk = pss_coefficients(Squeezing::from_r(0.4), 0.0, 3);
    CHECK(qk[0] == 1.0);
    CHECK(qk[1] == 0.0);

    for (double r : {0.1, 0.3466, 0.8})
        for (double kappa : {0.25, 0.5, 1.0}) {
            const Squeezing s = Squeezing::from_r(r);
            const double x = s.lambda() * kappa;
            const auto q = pss_coefficients(s, kappa, 400);
            double sum = 0.0;
            for (std::size_t n = 0; n < q.size(); ++n) {
                const double expect = std::sqrt(std::pow(1.0 - x * x, 3) / (1.0 + x * x)) * std::pow(x, n) * (n + 1.0);
                CHECK(q[n] == doctest::Approx(expect).epsilon(1e-12));
                sum += q[n] * q[n];
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    const auto short_sum = pss_coefficients(Squeezing::from_r(0.8), 1.0, 3);
    double partial = 0.0;
    for (double v : short_sum)
        partial += v * v;
    CHECK(partial < 1.0);

    CHECK_THROWS_AS(pss_coefficients(Squeezing::from_r(0.3), 0.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(pss_coefficients(Squeezing::from_r(0.3), 1.5, 4), std::invalid_argument);
}

TEST_CASE("pss creation probability")
{
    CHECK(pss_creation_probability(Squeezing::from_r(0.5), 1.0) == 0.0);
    CHECK(pss_creation_probability(Squeezing::from_r(0.0), 0.3) == 0.0);
    const Squeezing s = Squeezing::from_r(0.3466);
    const double p = pss_creation_probability(s, 0.5);
    CHECK(p > 0.0);
    CHECK(p < 1.0);

    // Beam splitters of intensity transmissivity kappa on both arms of a TMSV;
    // herald on exactly one reflected photon per arm.
    std::mt19937_64 rng(20240611);
    const double l2 = s.lambda() * s.lambda();
    std::geometric_distribution<int> pairs(1.0 - l2);
    const int trials = 2000000;
    int heralds = 0;
    for (int t = 0; t < trials; ++t) {
        const int n = pairs(rng);
        if (n == 0)
            continue;
        std::binomial_distribution<int> reflect(n, 0.5);
        if (reflect(rng) == 1 && reflect(rng) == 1)
            ++heralds;
    }
    const double estimate = static_cast<double>(heralds) / trials;
    const double sigma = std::sqrt(p * (1.0 - p) / trials);
    CHECK(std::fabs(estimate - p) < 5.0 * sigma);
}

TEST_CASE("pss density")
{
    const Squeezing s = one_ebit_squeezing();
    const FockDensityOp rho = pss_density(s, 1.0, with_cutoff(24));
    CHECK(rho.trace() + rho.trace_deficit() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho.purity() == doctest::Approx(std::pow(1.0 - rho.trace_deficit(), 2)).epsilon(1e-9));
    CHECK(rho.hermiticity_error() < 1e-12);
    const auto q = pss_coefficients(s, 1.0, 12);
    for (int m = 0; m <= 12; ++m)
        for (int n = 0; n <= 12; ++n)
            CHECK(std::abs(rho(m, m, n, n) - cdouble(q[m] * q[n])) < 1e-14);
    CHECK(std::abs(rho(1, 0, 1, 0)) == 0.0);
    CHECK(log_negativity_fock(rho) > 1.0);

    CHECK_THROWS_AS(pss_density(Squeezing::from_r(0.0), 1.0, with_cutoff(8)), std::invalid_argument);
    CHECK_THROWS_AS(pss_density(s, 0.0, with_cutoff(8)), std::invalid_argument);
    CHECK_THROWS_AS(pss_density(Squeezing::from_db(10.0), 1.0, with_cutoff(4)), TruncationTooSmall);
}

TEST_CASE("noon states")
{
    for (int n : {1, 2, 3, 5, 8}) {
        const FockDensityOp rho = noon_density(n);
        CHECK(rho.cutoff1() == n);
        CHECK(rho.cutoff2() == n);
        CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::fabs(log_negativity_fock(rho) - 1.0) < 1e-9);
    }
    const FockDensityOp bell = noon_density(1);
    const FockDensityOp::Matrix& m = bell.matrix();
    FockDensityOp::Matrix expect = FockDensityOp::Matrix::Zero(4, 4);
    expect(1, 1) = expect(1, 2) = expect(2, 1) = expect(2, 2) = 0.5;
    CHECK((m - expect).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(noon_density(0), std::invalid_argument);
}

TEST_CASE("partial transpose")
{
    const auto pt = partial_transpose(noon_density(1));
    const auto ev = block_hermitian_eigenvalues(pt);
    int negative = 0;
    for (double e : ev)
        if (e < -1e-12) {
            ++negative;
            CHECK(e == doctest::Approx(-0.5));
        }
    CHECK(negative == 1);

    const FockDensityOp prod = product_diagonal(thermal_weights(0.7, 6), thermal_weights(2.0, 9));
    const auto pp = partial_transpose(prod);
    CHECK((pp - prod.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(log_negativity_fock(prod) == 0.0);
    CHECK(negativity(prod) == 0.0);

    const FockDensityOp rho = pss_density(Squeezing::from_r(0.5), 0.8, with_cutoff(10));
    const FockDensityOp once(rho.cutoff1(), rho.cutoff2(), partial_transpose(rho));
    const auto twice = partial_transpose(once);
    CHECK((twice - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(once.trace() == doctest::Approx(rho.trace()));
    CHECK(once.hermiticity_error() < 1e-15);
}

TEST_CASE("block eigenvalues agree with a dense solve")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(12, 12);
    for (int blk = 0; blk < 3; ++blk)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j <= i; ++j) {
                // interleave blocks so components are not contiguous
                const int a = 3 * i + blk;
                const int b = 3 * j + blk;
                const cdouble v = i == j ? cdouble(g(rng), 0.0) : cdouble(g(rng), g(rng));
                h(a, b) = v;
                h(b, a) = std::conj(v);
            }
    auto blocks = block_hermitian_eigenvalues(h);
    std::sort(blocks.begin(), blocks.end());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    for (int i = 0; i < 12; ++i)
        CHECK(blocks[static_cast<std::size_t>(i)] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-12));
}

TEST_CASE("truncated tmsv")
{
    const Squeezing s = one_ebit_squeezing();
    const FockDensityOp rho = tmsv_density(s, with_cutoff(40));
    CHECK(rho.trace_deficit() < 1e-9);
    CHECK(std::fabs(log_negativity_fock(rho) - 1.0) < 1e-3);
    CHECK(rho.min_eigenvalue() > -1e-12);
}

TEST_CASE("cutoff changes keep trace accounting")
{
    const FockDensityOp rho = pss_density(Squeezing::from_r(0.5), 1.0, with_cutoff(12));
    const FockDensityOp grown = rho.with_cutoffs(15, 15);
    CHECK(grown.trace() == doctest::Approx(rho.trace()).epsilon(1e-15));
    CHECK(grown.trace_deficit() == rho.trace_deficit());
    CHECK(std::abs(grown(3, 3, 2, 2) - rho(3, 3, 2, 2)) == 0.0);
    const FockDensityOp cut = rho.with_cutoffs(3, 3);
    CHECK(cut.trace() + cut.trace_deficit() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cut.trace_deficit() > rho.trace_deficit());
}

TEST_CASE("triplet dump")
{
    std::ostringstream os;
    noon_density(1).write_triplets(os);
    std::istringstream in(os.str());
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("%", 0) == 0);
    int lines = 0;
    long row = 0;
    long col = 0;
    double re = 0.0;
    double im = 0.0;
    while (in >> row >> col >> re >> im) {
        ++lines;
        CHECK(re == doctest::Approx(0.5));
        CHECK(im == 0.0);
    }
    CHECK(lines == 4);
}
