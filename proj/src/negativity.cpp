#include "mmwent/fock.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace mmwent {

namespace {

// Eigenvalues in (-kNegativeFloor, 0) are truncation noise.
constexpr double kNegativeFloor = 1e-10;

int find_root(std::vector<int>& parent, int i)
{
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

} // namespace

FockDensityOp::Matrix partial_transpose(const FockDensityOp& rho)
{
    const Eigen::Index dim = rho.matrix().rows();
    FockDensityOp::Matrix pt(dim, dim);
    for (int m1 = 0; m1 <= rho.cutoff1(); ++m1)
        for (int m2 = 0; m2 <= rho.cutoff2(); ++m2)
            for (int n1 = 0; n1 <= rho.cutoff1(); ++n1)
                for (int n2 = 0; n2 <= rho.cutoff2(); ++n2)
                    pt(rho.index(m1, m2), rho.index(n1, n2)) = rho(m1, n2, n1, m2);
    return pt;
}

std::vector<double> block_hermitian_eigenvalues(const Eigen::MatrixXcd& h)
{
    const int dim = static_cast<int>(h.rows());
    std::vector<int> parent(dim);
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            if (h(i, j) != cdouble(0.0) || h(j, i) != cdouble(0.0)) {
                const int a = find_root(parent, i);
                const int b = find_root(parent, j);
                if (a != b)
                    parent[std::max(a, b)] = std::min(a, b);
            }

    std::vector<std::vector<int>> blocks(dim);
    for (int i = 0; i < dim; ++i)
        blocks[find_root(parent, i)].push_back(i);

    std::vector<double> eigenvalues;
    eigenvalues.reserve(dim);
    for (const auto& members : blocks) {
        const auto size = static_cast<Eigen::Index>(members.size());
        if (size == 0)
            continue;
        if (size == 1) {
            eigenvalues.push_back(h(members[0], members[0]).real());
            continue;
        }
        Eigen::MatrixXcd sub(size, size);
        for (Eigen::Index a = 0; a < size; ++a)
            for (Eigen::Index b = 0; b < size; ++b)
                sub(a, b) = h(members[a], members[b]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sub, Eigen::EigenvaluesOnly);
        for (Eigen::Index a = 0; a < size; ++a)
            eigenvalues.push_back(solver.eigenvalues()(a));
    }
    return eigenvalues;
}

double negativity(const FockDensityOp& rho)
{
    double n = 0.0;
    for (double e : block_hermitian_eigenvalues(partial_transpose(rho)))
        if (e < -kNegativeFloor)
            n -= e;
    return n;
}

double log_negativity_fock(const FockDensityOp& rho)
{
    const double n = negativity(rho);
    return n > 0.0 ? std::log2(1.0 + 2.0 * n) : 0.0;
}

} // namespace mmwent
