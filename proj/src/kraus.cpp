#include "mmwent/channel.hpp"

#include "mmwent/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mmwent {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// exponent * log(base) with 0^0 = 1 and 0^k = 0.
double log_power(double log_base, int exponent)
{
    if (exponent == 0)
        return 0.0;
    return static_cast<double>(exponent) * log_base;
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

} // namespace

// ---------------------------------------------------------------------------
// Amplitudes

KrausAmplitudes::KrausAmplitudes(const ThermalChannel& ch, int max_index)
    : channel_(ch),
      log_tau_(safe_log(ch.tau())),
      log_loss_(safe_log(1.0 - ch.tau())),
      log_ratio_(ch.nbar() > 0.0 ? std::log(ch.nbar()) - std::log1p(ch.nbar()) : kNegInf),
      log_norm_(-std::log1p(ch.nbar()))
{
    reserve(max_index);
}

void KrausAmplitudes::reserve(int max_index)
{
    const auto want = static_cast<std::size_t>(std::max(max_index, 1)) + 1;
    if (log_factorial_.size() >= want)
        return;
    std::size_t i = log_factorial_.size();
    log_factorial_.resize(want);
    for (; i < want; ++i)
        log_factorial_[i] = std::lgamma(static_cast<double>(i) + 1.0);
}

double KrausAmplitudes::thermal_tail(int thermal_cutoff) const
{
    if (channel_.nbar() == 0.0)
        return 0.0;
    return std::exp(static_cast<double>(thermal_cutoff + 1) * log_ratio_);
}

double KrausAmplitudes::operator()(int loss, int thermal, int out) const
{
    const int in = out - thermal + loss;
    if (in < 0 || out < 0 || loss < 0 || thermal < 0)
        return 0.0;
    if (thermal > 0 && channel_.nbar() == 0.0)
        return 0.0;

    const double log_weight = 0.5 * (log_power(log_ratio_, thermal) + log_norm_);
    const double log_prefactor =
        0.5 * (log_factorial(out) + log_factorial(loss) + log_factorial(in) + log_factorial(thermal)) + log_weight;

    const int j_min = std::max(0, thermal - out);
    const int j_max = std::min(thermal, loss);
    long double sum = 0.0L;
    for (int j = j_min; j <= j_max; ++j) {
        const int loss_power = loss + thermal - 2 * j;
        const int keep_power = out - thermal + 2 * j;
        if ((loss_power > 0 && log_loss_ == kNegInf) || (keep_power > 0 && log_tau_ == kNegInf))
            continue;
        const double log_term = log_prefactor - log_factorial(out - thermal + j) - log_factorial(loss - j) -
                                log_factorial(thermal - j) - log_factorial(j) +
                                0.5 * log_power(log_loss_, loss_power) + 0.5 * log_power(log_tau_, keep_power);
        const long double term = std::exp(static_cast<long double>(log_term));
        sum += ((thermal - j) % 2 == 0) ? term : -term;
    }
    return static_cast<double>(sum);
}

// ---------------------------------------------------------------------------
// KrausSet

KrausSet::KrausSet(ThermalChannel ch, int input_cutoff, int thermal_cutoff, std::vector<KrausOperator> ops)
    : channel_(ch), input_cutoff_(input_cutoff), thermal_cutoff_(thermal_cutoff), ops_(std::move(ops))
{
}

Eigen::MatrixXd KrausSet::dense(const KrausOperator& op, int output_cutoff) const
{
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(output_cutoff + 1, input_cutoff_ + 1);
    for (int k = 0; k <= input_cutoff_; ++k) {
        const int out = k + op.shift();
        if (out >= 0 && out <= output_cutoff)
            g(out, k) = op.amplitude[static_cast<std::size_t>(k)];
    }
    return g;
}

double KrausSet::completeness_defect(int max_input) const
{
    const int top = std::min(max_input, input_cutoff_);
    std::vector<long double> diag(static_cast<std::size_t>(top) + 1, 0.0L);
    for (const auto& op : ops_)
        for (int k = 0; k <= top; ++k) {
            const long double a = op.amplitude[static_cast<std::size_t>(k)];
            diag[static_cast<std::size_t>(k)] += a * a;
        }
    double worst = 0.0;
    for (long double d : diag)
        worst = std::max(worst, static_cast<double>(std::fabs(1.0L - d)));
    return worst;
}

KrausSet build_kraus_set(const ThermalChannel& ch, int mode_cutoff, const TruncationPolicy& policy)
{
    if (mode_cutoff < 1)
        throw std::invalid_argument("mode_cutoff must be >= 1");
    policy.validate();
    const int thermal_cutoff = ch.nbar() == 0.0 ? 0 : policy.thermal_cutoff_for(ch.nbar());

    KrausAmplitudes amp(ch, mode_cutoff + 2 * thermal_cutoff + 2);
    std::vector<KrausOperator> ops;
    for (int n = 0; n <= thermal_cutoff; ++n)
        for (int loss = 0; loss <= n + mode_cutoff; ++loss) {
            KrausOperator op;
            op.loss = loss;
            op.thermal = n;
            op.amplitude.assign(static_cast<std::size_t>(mode_cutoff) + 1, 0.0);
            bool any = false;
            for (int k = 0; k <= mode_cutoff; ++k) {
                const int out = k + n - loss;
                if (out < 0)
                    continue;
                const double a = amp(loss, n, out);
                op.amplitude[static_cast<std::size_t>(k)] = a;
                any = any || a != 0.0;
            }
            if (any)
                ops.push_back(std::move(op));
        }

    KrausSet set(ch, mode_cutoff, thermal_cutoff, std::move(ops));
    const double defect = set.completeness_defect(mode_cutoff / 2);
    if (defect > policy.completeness_tol)
        throw CutoffInsufficient("Kraus completeness defect " + std::to_string(defect) +
                                 " exceeds tolerance; raise thermal_index_cutoff above " +
                                 std::to_string(thermal_cutoff));
    return set;
}

// ---------------------------------------------------------------------------
// Transfer kernel

ChannelKernel::ChannelKernel(const ThermalChannel& ch, int mode_cutoff, int thermal_cutoff, Execution exec)
    : cutoff_(mode_cutoff), thermal_cutoff_(ch.nbar() == 0.0 ? 0 : thermal_cutoff)
{
    if (mode_cutoff < 0 || thermal_cutoff < 0)
        throw std::invalid_argument("cutoffs must be >= 0");
    const int k = cutoff_;
    const int shifts = 2 * k + 1;
    transfer_.assign(static_cast<std::size_t>(shifts), Eigen::MatrixXd::Zero(k + 1, k + 1));
    const KrausAmplitudes amp(ch, k + 2 * thermal_cutoff_ + 2);
    const int top = thermal_cutoff_;
    const bool par = exec == Execution::parallel;

#pragma omp parallel for schedule(dynamic) if (par)
    for (int idx = 0; idx < shifts; ++idx) {
        const int d = idx - k;
        Eigen::MatrixXd& t = transfer_[static_cast<std::size_t>(idx)];
        const int x_lo = std::max(0, -d);
        const int x_hi = std::min(k, k - d);
        Eigen::VectorXd g(k + 1);
        for (int n = std::max(0, d); n <= top; ++n) {
            const int loss = n - d;
            g.setZero();
            for (int x = x_lo; x <= x_hi; ++x)
                g(x) = amp(loss, n, x + d);
            t.noalias() += g * g.transpose();
        }
    }
}

FockDensityOp ChannelKernel::apply(const FockDensityOp& rho, Execution exec) const
{
    if (rho.cutoff2() != cutoff_)
        throw std::invalid_argument("kernel cutoff does not match the state's mode-2 cutoff");
    const int d1 = rho.dim1();
    const int d2 = rho.dim2();
    const int k = cutoff_;
    const auto& in = rho.matrix();
    FockDensityOp::Matrix out = FockDensityOp::Matrix::Zero(in.rows(), in.cols());
    const bool par = exec == Execution::parallel;
    const int blocks = d1 * d1;

#pragma omp parallel for schedule(dynamic) if (par)
    for (int blk = 0; blk < blocks; ++blk) {
        const int a = blk / d1;
        const int b = blk % d1;
        const Eigen::Index row0 = static_cast<Eigen::Index>(a) * d2;
        const Eigen::Index col0 = static_cast<Eigen::Index>(b) * d2;
        for (int x = 0; x <= k; ++x)
            for (int y = 0; y <= k; ++y) {
                const cdouble v = in(row0 + x, col0 + y);
                if (v == cdouble(0.0))
                    continue;
                const int d_lo = -std::min(x, y);
                const int d_hi = k - std::max(x, y);
                for (int d = d_lo; d <= d_hi; ++d)
                    out(row0 + x + d, col0 + y + d) += transfer(d)(x, y) * v;
            }
    }
    FockDensityOp result(rho.cutoff1(), rho.cutoff2(), std::move(out));
    const double lost = std::max(0.0, rho.trace() - result.trace());
    return FockDensityOp(rho.cutoff1(), rho.cutoff2(), result.matrix(), rho.trace_deficit() + lost);
}

FockDensityOp evolve_mode2(const FockDensityOp& rho, const ThermalChannel& ch, const TruncationPolicy& policy,
                           Execution exec)
{
    policy.validate();
    if (ch.tau() == 1.0)
        return rho; // the environment never couples in
    const int thermal_cutoff = policy.thermal_cutoff_for(ch.nbar());
    const double tail = KrausAmplitudes(ch, 1).thermal_tail(thermal_cutoff);
    if (tail > policy.completeness_tol)
        throw CutoffInsufficient("thermal tail " + std::to_string(tail) + " beyond cutoff " +
                                 std::to_string(thermal_cutoff) + " exceeds completeness tolerance");
    return ChannelKernel(ch, rho.cutoff2(), thermal_cutoff, exec).apply(rho, exec);
}

FockDensityOp evolve_mode2_kraus(const FockDensityOp& rho, const KrausSet& kraus)
{
    const int k = rho.cutoff2();
    if (kraus.input_cutoff() < k)
        throw std::invalid_argument("Kraus set input cutoff is below the state's mode-2 cutoff");
    const int d1 = rho.dim1();
    const int d2 = rho.dim2();
    const auto& in = rho.matrix();
    FockDensityOp::Matrix out = FockDensityOp::Matrix::Zero(in.rows(), in.cols());

    for (const auto& op : kraus.operators()) {
        const int s = op.shift();
        if (s > k || s < -k)
            continue;
        // mode-2 block: out_ab = G rho_ab G^T
        const Eigen::MatrixXd g = kraus.dense(op, k).leftCols(d2);
        for (int a = 0; a < d1; ++a)
            for (int b = 0; b < d1; ++b) {
                const auto block = in.block(static_cast<Eigen::Index>(a) * d2, static_cast<Eigen::Index>(b) * d2, d2, d2);
                out.block(static_cast<Eigen::Index>(a) * d2, static_cast<Eigen::Index>(b) * d2, d2, d2) +=
                    g.cast<cdouble>() * block * g.transpose().cast<cdouble>();
            }
    }
    FockDensityOp result(rho.cutoff1(), rho.cutoff2(), std::move(out));
    const double lost = std::max(0.0, rho.trace() - result.trace());
    return FockDensityOp(rho.cutoff1(), rho.cutoff2(), result.matrix(), rho.trace_deficit() + lost);
}

// ---------------------------------------------------------------------------
// Direct elementary-operator sum (oracle)

Eigen::MatrixXd elementary_image_reference(const ThermalChannel& ch, int in_ket, int in_bra, int mode_cutoff,
                                           int thermal_cutoff)
{
    const double tau = ch.tau();
    const double nbar = ch.nbar();
    const int table = in_ket + in_bra + mode_cutoff + 2 * thermal_cutoff + 4;
    std::vector<double> lf(static_cast<std::size_t>(table) + 1);
    for (int i = 0; i <= table; ++i)
        lf[static_cast<std::size_t>(i)] = std::lgamma(i + 1.0);
    auto fact = [&](int i) { return lf[static_cast<std::size_t>(i)]; };

    const double log_loss = safe_log(1.0 - tau);
    const double log_sqrt_tau = 0.5 * safe_log(tau);

    Eigen::MatrixXd image = Eigen::MatrixXd::Zero(mode_cutoff + 1, mode_cutoff + 1);
    const int mp = in_ket;
    const int np = in_bra;
    for (int n = 0; n <= thermal_cutoff; ++n) {
        double log_w;
        if (nbar == 0.0) {
            if (n > 0)
                break;
            log_w = 0.0;
        } else {
            log_w = n * std::log(nbar) - (n + 1) * std::log(nbar + 1.0);
        }
        const int l_max = std::min(mp + n, np + n);
        for (int l = 0; l <= l_max; ++l) {
            const int out_ket = mp + n - l;
            const int out_bra = np + n - l;
            if (out_ket > mode_cutoff || out_bra > mode_cutoff)
                continue;
            const int j_min = std::max(0, l - mp);
            const int jp_min = std::max(0, l - np);
            const int j_max = std::min(n, l);
            long double acc = 0.0L;
            for (int j = j_min; j <= j_max; ++j)
                for (int jp = jp_min; jp <= j_max; ++jp) {
                    const int loss_pow = l + n - j - jp;
                    const int keep_pow = mp + np - 2 * l + 2 * j + 2 * jp;
                    double log_term = log_w;
                    log_term += 0.5 * (fact(out_ket) + fact(l) + fact(mp) + fact(n));
                    log_term -= fact(mp - l + j) + fact(l - j) + fact(n - j) + fact(j);
                    log_term += 0.5 * (fact(out_bra) + fact(l) + fact(np) + fact(n));
                    log_term -= fact(np - l + jp) + fact(l - jp) + fact(n - jp) + fact(jp);
                    if (loss_pow > 0) {
                        if (log_loss == kNegInf)
                            continue;
                        log_term += loss_pow * log_loss;
                    }
                    if (keep_pow > 0) {
                        if (log_sqrt_tau == kNegInf)
                            continue;
                        log_term += keep_pow * log_sqrt_tau;
                    }
                    const long double term = std::exp(static_cast<long double>(log_term));
                    acc += ((2 * n - j - jp) % 2 == 0) ? term : -term;
                }
            image(out_ket, out_bra) += static_cast<double>(acc);
        }
    }
    return image;
}

FockDensityOp evolve_mode2_reference(const FockDensityOp& rho, const ThermalChannel& ch,
                                     const TruncationPolicy& policy)
{
    policy.validate();
    const int k = rho.cutoff2();
    const int d1 = rho.dim1();
    const int d2 = rho.dim2();
    const int thermal_cutoff = policy.thermal_cutoff_for(ch.nbar());

    std::vector<Eigen::MatrixXd> images(static_cast<std::size_t>(d2) * d2);
    for (int x = 0; x <= k; ++x)
        for (int y = 0; y <= k; ++y)
            images[static_cast<std::size_t>(x) * d2 + y] = elementary_image_reference(ch, x, y, k, thermal_cutoff);

    const auto& in = rho.matrix();
    FockDensityOp::Matrix out = FockDensityOp::Matrix::Zero(in.rows(), in.cols());
    for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d1; ++b)
            for (int x = 0; x <= k; ++x)
                for (int y = 0; y <= k; ++y) {
                    const cdouble v = in(rho.index(a, x), rho.index(b, y));
                    if (v == cdouble(0.0))
                        continue;
                    const auto& img = images[static_cast<std::size_t>(x) * d2 + y];
                    out.block(static_cast<Eigen::Index>(a) * d2, static_cast<Eigen::Index>(b) * d2, d2, d2) +=
                        v * img.cast<cdouble>();
                }
    FockDensityOp result(rho.cutoff1(), rho.cutoff2(), std::move(out));
    const double lost = std::max(0.0, rho.trace() - result.trace());
    return FockDensityOp(rho.cutoff1(), rho.cutoff2(), result.matrix(), rho.trace_deficit() + lost);
}

// ---------------------------------------------------------------------------
// Converged measurements

namespace {

void note_history(FockEvaluation& ev, double value)
{
    const auto& h = ev.history;
    if (h.size() >= 2) {
        const double prev_step = h[h.size() - 1] - h[h.size() - 2];
        const double step = value - h.back();
        if (prev_step * step < 0.0)
            ev.monotone = false;
    }
    ev.history.push_back(value);
}

} // namespace

FockEvaluation evaluate_after_channel(const StateFactory& make_state, const ThermalChannel& ch,
                                      const TruncationPolicy& policy, Execution exec)
{
    policy.validate();
    FockEvaluation ev;
    TruncationPolicy p = policy;

    auto measure = [&](const TruncationPolicy& pol) {
        const FockDensityOp out = evolve_mode2(make_state(pol), ch, pol, exec);
        ev.trace_deficit = out.trace_deficit();
        return log_negativity_fock(out);
    };

    double current = measure(p);
    note_history(ev, current);
    ev.total_photon_cutoff = p.total_photon_cutoff;
    ev.thermal_cutoff = p.thermal_cutoff_for(ch.nbar());
    while (2 * p.total_photon_cutoff <= policy.max_total_photon_cutoff) {
        p.total_photon_cutoff *= 2;
        const double next = measure(p);
        note_history(ev, next);
        ev.last_change = std::fabs(next - current);
        ev.total_photon_cutoff = p.total_photon_cutoff;
        current = next;
        if (ev.last_change <= policy.convergence_tol) {
            ev.converged = true;
            break;
        }
    }
    ev.e_ln = current;
    return ev;
}

namespace {

struct NoonResult {
    double e_ln;
    double trace_deficit;
};

NoonResult noon_at_thermal_cutoff(int n, const ThermalChannel& ch, int thermal_cutoff)
{
    const int top = ch.nbar() == 0.0 ? 0 : thermal_cutoff;
    const int span = n + top;
    KrausAmplitudes amp(ch, 2 * span + 2);

    // Images of |0><0|, |n><n| (diagonal) and |0><n| (entries x, x + n).
    std::vector<double> vac(static_cast<std::size_t>(span) + 1, 0.0);
    std::vector<double> full(static_cast<std::size_t>(span) + 1, 0.0);
    std::vector<double> coh(static_cast<std::size_t>(span) + 1, 0.0);
    for (int th = 0; th <= top; ++th) {
        for (int x = 0; x <= th; ++x) {
            const int loss = th - x;
            const double g0 = amp(loss, th, x);
            const double gn = amp(loss, th, x + n);
            vac[static_cast<std::size_t>(x)] += g0 * g0;
            coh[static_cast<std::size_t>(x)] += g0 * gn;
        }
        for (int x = 0; x <= n + th; ++x) {
            const double g = amp(n + th - x, th, x);
            full[static_cast<std::size_t>(x)] += g * g;
        }
    }

    double trace = 0.0;
    for (int x = 0; x <= span; ++x)
        trace += 0.5 * (vac[static_cast<std::size_t>(x)] + full[static_cast<std::size_t>(x)]);

    double neg = 0.0;
    for (int x = 0; x + n <= span; ++x) {
        const double p = full[static_cast<std::size_t>(x)];
        const double q = vac[static_cast<std::size_t>(x + n)];
        const double c = coh[static_cast<std::size_t>(x)];
        const double lower = 0.5 * (0.5 * (p + q) - std::sqrt(0.25 * (p - q) * (p - q) + c * c));
        if (lower < -1e-10)
            neg -= lower;
    }
    return {neg > 0.0 ? std::log2(1.0 + 2.0 * neg) : 0.0, std::max(0.0, 1.0 - trace)};
}

} // namespace

FockEvaluation noon_after_channel(int n, const ThermalChannel& ch, const TruncationPolicy& policy)
{
    if (n < 1)
        throw std::invalid_argument("NOON photon number must be >= 1");
    policy.validate();
    FockEvaluation ev;
    const int base = policy.thermal_cutoff_for(ch.nbar());
    const NoonResult coarse = noon_at_thermal_cutoff(n, ch, base);
    const NoonResult fine = noon_at_thermal_cutoff(n, ch, 2 * base);
    note_history(ev, coarse.e_ln);
    note_history(ev, fine.e_ln);
    ev.e_ln = fine.e_ln;
    ev.trace_deficit = fine.trace_deficit;
    ev.last_change = std::fabs(fine.e_ln - coarse.e_ln);
    ev.converged = ev.last_change <= policy.convergence_tol;
    ev.thermal_cutoff = 2 * base;
    ev.total_photon_cutoff = n + 2 * base;
    return ev;
}

void require_converged(const FockEvaluation& ev)
{
    if (!ev.converged)
        throw NonConverged("log-negativity moved by " + std::to_string(ev.last_change) +
                           " at the last cutoff doubling (cutoff " + std::to_string(ev.total_photon_cutoff) + ")");
}

} // namespace mmwent
