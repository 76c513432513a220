#pragma once

#include <vector>

namespace prf {

enum class BoundaryFamily { Constant, ExponentialApproach, Tabulated };

// One endpoint of the Dirichlet data mu_j(t). Constant and ExponentialApproach
// satisfy lim mu = mu_tilde and lim mu' = 0 analytically; ExponentialApproach
// has integrable |delta| + |delta'|. Tabulated data takes its limit value from
// the final table entry and is only trusted inside the tabulated horizon.
struct BoundaryEndpoint {
    BoundaryFamily family = BoundaryFamily::Constant;
    double mu_tilde = 0.0;
    double delta0 = 0.0; // exponential: mu(t) = mu_tilde + delta0 * exp(-rate t)
    double rate = 1.0;   // exponential decay rate, > 0
    std::vector<double> times;  // tabulated, uniform spacing
    std::vector<double> values; // tabulated

    double mu(double t) const;
    double dmu(double t) const;
};

struct BoundaryData {
    BoundaryEndpoint endpoint[2];

    static BoundaryData constant(double mu0, double mu1);
    static BoundaryData exponential(double mu_tilde0, double delta0, double rate0,
                                    double mu_tilde1, double delta1, double rate1);
    static BoundaryData tabulated(std::vector<double> times, std::vector<double> values0,
                                  std::vector<double> values1);

    double mu(int j, double t) const { return endpoint[j].mu(t); }
    double dmu(int j, double t) const { return endpoint[j].dmu(t); }
    double mu_tilde(int j) const { return endpoint[j].mu_tilde; }
    double delta(int j, double t) const { return mu(j, t) - mu_tilde(j); }

    bool has_tabulated() const;
    // |delta_j| and |delta_j'| are nonincreasing for constant/exponential
    // families, so interval sups of nu are closed-form.
    bool monotone_decay() const { return !has_tabulated(); }

    // Checks mu_j >= 0 over [0, t_end] (analytically where possible, at sample
    // times otherwise) and that tabulated data covers the horizon.
    void validate_horizon(double t_end) const;
};

} // namespace prf
