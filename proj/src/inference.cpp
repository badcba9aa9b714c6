#include "cssd/inference.hpp"

#include <cmath>
#include <stdexcept>

namespace cssd {

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Efficacious: return "efficacious";
        case Verdict::Futile: return "futile";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

double PosteriorSummary::sd() const { return std::sqrt(variance); }

PosteriorSummary posterior_update_precision(const NormalPrior& prior, double estimate, double data_precision) {
    if (!(prior.variance > 0.0)) throw std::invalid_argument("prior variance must be positive");
    if (!(data_precision >= 0.0)) throw std::invalid_argument("data precision must be non-negative");
    if (data_precision == 0.0) return {prior.mean, prior.variance};
    const double prior_precision = prior.precision();
    const double precision = prior_precision + data_precision;
    return {(prior.mean * prior_precision + estimate * data_precision) / precision, 1.0 / precision};
}

double data_precision_normal(long n, double allocation, double sigma0_sq) {
    if (n < 0) throw std::invalid_argument("sample size must be non-negative");
    if (!(allocation > 0.0 && allocation < 1.0)) throw std::invalid_argument("allocation must lie in (0,1)");
    if (!(sigma0_sq > 0.0)) throw std::invalid_argument("sigma0_sq must be positive");
    return static_cast<double>(n) * allocation * (1.0 - allocation) / sigma0_sq;
}

double data_precision_binary_two_arm(long n_per_arm, double rho_t, double rho_c) {
    if (n_per_arm < 0) throw std::invalid_argument("sample size must be non-negative");
    return static_cast<double>(n_per_arm) / (1.0 / (rho_t * (1.0 - rho_t)) + 1.0 / (rho_c * (1.0 - rho_c)));
}

double data_precision_tte(long events, double allocation) {
    if (events < 0) throw std::invalid_argument("event count must be non-negative");
    // D_E D_C / (D_E + D_C) with D_E = R D.
    return static_cast<double>(events) * allocation * (1.0 - allocation);
}

double data_precision_single_arm(long n, double p) {
    if (n < 0) throw std::invalid_argument("sample size must be non-negative");
    return static_cast<double>(n) * p * (1.0 - p);
}

PosteriorSummary posterior_update(const NormalPrior& prior, double ybar_delta, long n, double allocation,
                                  double sigma0_sq) {
    return posterior_update_precision(prior, ybar_delta, data_precision_normal(n, allocation, sigma0_sq));
}

PosteriorSummary posterior_update(const CollectivePrior& prior, double ybar_delta, long n, double allocation,
                                  double sigma0_sq) {
    return posterior_update(NormalPrior::from(prior), ybar_delta, n, allocation, sigma0_sq);
}

namespace {

double safe_cdf(double x) {
    if (std::isnan(x)) throw std::invalid_argument("posterior statistic is NaN");
    if (x == INFINITY) return 1.0;
    if (x == -INFINITY) return 0.0;
    return std_normal_cdf(x);
}

}  // namespace

Probability prob_efficacy(const PosteriorSummary& post) { return Probability(safe_cdf(post.mean / post.sd())); }

Probability prob_futility(const PosteriorSummary& post, double delta) {
    return Probability(safe_cdf((delta - post.mean) / post.sd()));
}

DecisionRule::DecisionRule(double delta, Probability eta, Probability zeta)
    : delta_(delta), z_eta_(std_normal_quantile(eta)), z_zeta_(std_normal_quantile(zeta)) {}

DecisionOutcome DecisionRule::operator()(const PosteriorSummary& post) const {
    const double sd = post.sd();
    const double z_eff = post.mean / sd;
    const double z_fut = (delta_ - post.mean) / sd;

    DecisionOutcome out;
    out.p_efficacy = safe_cdf(z_eff);
    out.p_futility = safe_cdf(z_fut);
    if (z_eff >= z_eta_) {
        out.verdict = Verdict::Efficacious;
    } else if (z_fut >= z_zeta_) {
        out.verdict = Verdict::Futile;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

DecisionOutcome decide(const PosteriorSummary& post, double delta, Probability eta, Probability zeta) {
    return DecisionRule(delta, eta, zeta)(post);
}

}  // namespace cssd
