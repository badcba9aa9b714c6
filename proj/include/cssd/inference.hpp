#pragma once

#include <string_view>

#include "cssd/borrowing.hpp"
#include "cssd/stats_core.hpp"

namespace cssd {

/// Normal prior N(mean, variance) for the treatment effect.
struct NormalPrior {
    double mean = 0.0;
    double variance = 1.0;

    static NormalPrior from(const CollectivePrior& prior) { return {prior.mean, prior.variance}; }
    double precision() const { return 1.0 / variance; }
};

struct PosteriorSummary {
    double mean = 0.0;
    double variance = 1.0;

    double sd() const;
    double precision() const { return 1.0 / variance; }
};

enum class Verdict { Efficacious, Futile, Inconclusive };

std::string_view to_string(Verdict verdict);

struct DecisionOutcome {
    Verdict verdict = Verdict::Inconclusive;
    double p_efficacy = 0.0;
    double p_futility = 0.0;
};

/// Conjugate normal update with an estimate of known precision.
/// A data precision of 0 returns the prior unchanged.
PosteriorSummary posterior_update_precision(const NormalPrior& prior, double estimate, double data_precision);

/// Two-arm normal update: data precision n R (1 - R) / sigma0^2.
/// n = 0 is the identity update.
PosteriorSummary posterior_update(const NormalPrior& prior, double ybar_delta, long n, double allocation,
                                  double sigma0_sq);
PosteriorSummary posterior_update(const CollectivePrior& prior, double ybar_delta, long n, double allocation,
                                  double sigma0_sq);

// Data precision of the effect estimate for each endpoint model.
double data_precision_normal(long n, double allocation, double sigma0_sq);
double data_precision_binary_two_arm(long n_per_arm, double rho_t, double rho_c);
double data_precision_tte(long events, double allocation);
double data_precision_single_arm(long n, double p);

/// P(mu > 0) = Phi(d / sigma).
Probability prob_efficacy(const PosteriorSummary& post);
/// P(mu <= delta) = Phi((delta - d) / sigma).
Probability prob_futility(const PosteriorSummary& post, double delta);

/// Efficacious iff d/sigma >= z_eta; otherwise Futile iff
/// (delta - d)/sigma >= z_zeta; otherwise Inconclusive. Comparisons are
/// inclusive and made on the z scale.
DecisionOutcome decide(const PosteriorSummary& post, double delta, Probability eta, Probability zeta);

/// decide() with the threshold quantiles computed once.
class DecisionRule {
public:
    DecisionRule(double delta, Probability eta, Probability zeta);
    DecisionOutcome operator()(const PosteriorSummary& post) const;

private:
    double delta_;
    double z_eta_;
    double z_zeta_;
};

}  // namespace cssd
