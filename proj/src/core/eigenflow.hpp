#pragma once

#include <optional>
#include <vector>

namespace prf {

// Eigenvalues of the Jacobi operator R_N for a geodesic Riemannian foliation,
// evolving under the normalized flow. Each eigenvalue obeys the decoupled ODE
// dmu/dt = 4 mu (mu - Phi).
struct EigenFlowState {
    std::vector<double> mus; // one eigenvalue per dimension of D, size n
    double phi_param = 0.0;
    int n = 0;

    void validate() const;
};

// Finite forward blow-up time of the eigenvalue ODE, when one exists:
//   Phi > 0, mu0 > Phi : t* = ln(mu0/(mu0-Phi)) / (4 Phi)
//   Phi = 0            : t* = 1/(4 mu0)
//   Phi < 0            : same log formula (always finite for mu0 > 0)
std::optional<double> eigen_blow_up_time(double mu0, double phi_param);

// mu(t) by separation of variables; throws BlowUp{t*} for t past the blow-up
// time. Valid for all t in the global-existence region 0 < mu0 <= Phi.
double eigen_closed_form(double mu0, double phi_param, double t);

struct Rk4Trajectory {
    std::vector<double> values; // mu at t = 0, dt, 2dt, ...
    long halted_step = -1;      // step at which mu exceeded 1e15 (blow-up suspected)
    bool blow_up_suspected() const { return halted_step >= 0; }
};

// Classical RK4 on the same ODE; the independent oracle for the closed form.
Rk4Trajectory eigen_rk4(double mu0, double phi_param, double dt, long steps);

// Eigenvalue theta of the integrability operator pair (+/- i theta), evolving by
// dtheta/dt = 2 theta (theta^2 - Phi); equals sqrt of the mu-flow with mu = theta^2.
double tsharp_eigen_flow(double theta0, double phi_param, double t);

struct RicNFlowResult {
    double value = 0.0;             // Ric_N(t) = sum of eigenvalues at time t
    double inequality_margin = 0.0; // min over samples of dRic/dt - [(4/n)Ric^2 - 4 Phi Ric]
};

// Trace flow with a sampled check of dRic/dt >= (4/n) Ric^2 - 4 Phi Ric.
RicNFlowResult ric_n_flow(const EigenFlowState& state, double t, int samples = 1000);

} // namespace prf
