#include "core/eigenflow.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace prf {

namespace {

constexpr double kRk4Ceiling = 1e15;

double ode_rhs(double mu, double phi_param) { return 4.0 * mu * (mu - phi_param); }

} // namespace

void EigenFlowState::validate() const {
    if (n < 1) raise(ErrorCode::InvalidArgument, "codimension must be >= 1");
    if (mus.size() != static_cast<size_t>(n))
        raise(ErrorCode::InvalidArgument, "need one eigenvalue per dimension of D");
    bool all_positive = true;
    for (double mu : mus) {
        if (!std::isfinite(mu) || mu < 0.0)
            raise(ErrorCode::InvalidArgument, "eigenvalues must be finite and >= 0");
        if (mu == 0.0) all_positive = false; // frozen mode, allowed for odd n
    }
    if (all_positive && n % 2 != 0)
        raise(ErrorCode::InvalidArgument,
              "strictly positive spectrum forces an even codimension");
}

std::optional<double> eigen_blow_up_time(double mu0, double phi_param) {
    if (!(mu0 > 0.0)) raise(ErrorCode::InvalidArgument, "mu0 must be positive");
    if (phi_param == 0.0) return 1.0 / (4.0 * mu0);
    if (mu0 > phi_param) // covers Phi < 0 (mu0 > 0 > Phi) and Phi > 0 with mu0 > Phi
        return std::log(mu0 / (mu0 - phi_param)) / (4.0 * phi_param);
    return std::nullopt;
}

double eigen_closed_form(double mu0, double phi_param, double t) {
    if (!(mu0 > 0.0)) raise(ErrorCode::InvalidArgument, "mu0 must be positive");
    if (const auto t_star = eigen_blow_up_time(mu0, phi_param); t_star && t >= *t_star)
        raise(ErrorCode::BlowUp, "finite-time blow-up before requested time", *t_star);
    if (phi_param == 0.0) return mu0 / (1.0 - 4.0 * mu0 * t);
    const double denom = mu0 + (phi_param - mu0) * std::exp(4.0 * phi_param * t);
    if (denom == 0.0) { // exp underflow corner for mu0 == Phi handled above; be safe
        raise(ErrorCode::BlowUp, "denominator vanished", t);
    }
    return phi_param * mu0 / denom;
}

Rk4Trajectory eigen_rk4(double mu0, double phi_param, double dt, long steps) {
    if (!(dt > 0.0)) raise(ErrorCode::InvalidArgument, "dt must be positive");
    if (steps < 0) raise(ErrorCode::InvalidArgument, "steps must be >= 0");
    Rk4Trajectory out;
    out.values.reserve(static_cast<size_t>(steps) + 1);
    out.values.push_back(mu0);
    double mu = mu0;
    for (long k = 0; k < steps; ++k) {
        const double k1 = ode_rhs(mu, phi_param);
        const double k2 = ode_rhs(mu + 0.5 * dt * k1, phi_param);
        const double k3 = ode_rhs(mu + 0.5 * dt * k2, phi_param);
        const double k4 = ode_rhs(mu + dt * k3, phi_param);
        mu += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(mu) || mu > kRk4Ceiling) {
            out.halted_step = k + 1;
            break;
        }
        out.values.push_back(mu);
    }
    return out;
}

double tsharp_eigen_flow(double theta0, double phi_param, double t) {
    if (!(theta0 > 0.0)) raise(ErrorCode::InvalidArgument, "theta0 must be positive");
    return std::sqrt(eigen_closed_form(theta0 * theta0, phi_param, t));
}

RicNFlowResult ric_n_flow(const EigenFlowState& state, double t, int samples) {
    state.validate();
    if (samples < 2) raise(ErrorCode::InvalidArgument, "need at least two sample times");
    RicNFlowResult out;

    const auto mu_at = [&state](double s, size_t i) {
        const double mu0 = state.mus[i];
        if (mu0 == 0.0) return 0.0; // frozen zero mode: 4*0*(0-Phi) = 0
        return eigen_closed_form(mu0, state.phi_param, s);
    };

    for (size_t i = 0; i < state.mus.size(); ++i) out.value += mu_at(t, i);

    double min_margin = std::numeric_limits<double>::infinity();
    const double t0 = std::min(0.0, t), t1 = std::max(0.0, t);
    for (int k = 0; k < samples; ++k) {
        const double s = t0 + (t1 - t0) * k / (samples - 1);
        double ric = 0.0, ric_dot = 0.0;
        for (size_t i = 0; i < state.mus.size(); ++i) {
            const double mu = mu_at(s, i);
            ric += mu;
            ric_dot += 4.0 * mu * (mu - state.phi_param);
        }
        const double rhs = (4.0 / state.n) * ric * ric - 4.0 * state.phi_param * ric;
        min_margin = std::min(min_margin, ric_dot - rhs);
    }
    out.inequality_margin = min_margin;
    return out;
}

} // namespace prf
