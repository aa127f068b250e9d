#include "hebbsim/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hebbsim {

EstimatorState::EstimatorState(int n_channels, double norm_exponent, EstimatorConfig config)
    : n_(n_channels), l_(norm_exponent), cfg_(config),
      promo_(static_cast<std::size_t>(n_channels)),
      demo_(static_cast<std::size_t>(n_channels)) {
    if (n_channels <= 0) throw std::invalid_argument("estimator: need at least one channel");
    if (cfg_.mode == WindowMode::Sliding && cfg_.window_length == 0) {
        throw std::invalid_argument("estimator: sliding window length must be > 0");
    }
    if (cfg_.mode == WindowMode::Exponential &&
        !(cfg_.decay_factor > 0.0 && cfg_.decay_factor < 1.0)) {
        throw std::invalid_argument("estimator: exponential decay factor must be in (0,1)");
    }
}

void EstimatorState::add(const Entry& e, double sign) {
    Bin& b = bin(e.direction, e.channel);
    b.count += sign;
    b.eps += sign * e.eps;
    b.eps2 += sign * e.eps * e.eps;
    b.moment += sign * e.moment;
    b.moment_eps += sign * e.moment * e.eps;
    b.moment_eps2 += sign * e.moment * e.eps * e.eps;
    tot_[e.direction == Direction::Promotion ? 0 : 1] += sign;
}

void EstimatorState::record(const UpdateEvent& event, const WeightVector& weights_before) {
    if (event.channel < 0 || event.channel >= n_) {
        throw std::out_of_range("estimator: channel out of range");
    }
    if (cfg_.mode == WindowMode::Exponential) {
        for (auto* bins : {&promo_, &demo_}) {
            for (Bin& b : *bins) {
                b.count *= cfg_.decay_factor;
                b.eps *= cfg_.decay_factor;
                b.eps2 *= cfg_.decay_factor;
                b.moment *= cfg_.decay_factor;
                b.moment_eps *= cfg_.decay_factor;
                b.moment_eps2 *= cfg_.decay_factor;
            }
        }
        tot_[0] *= cfg_.decay_factor;
        tot_[1] *= cfg_.decay_factor;
    }
    // The moment uses the estimator's own exponent so a caller cannot feed
    // statistics computed under a different norm.
    const double m =
        l_ == 1.0 ? 1.0 : std::pow(weights_before[event.channel], l_ - 1.0);
    const Entry e{event.channel, event.direction, event.applied_epsilon, m};
    add(e, +1.0);
    if (cfg_.mode == WindowMode::Sliding) {
        window_.push_back(e);
        if (window_.size() > cfg_.window_length) {
            add(window_.front(), -1.0);
            window_.pop_front();
        }
    }
}

double EstimatorState::p_hat(int i) const {
    if (tot_[0] <= 0.0) throw std::domain_error("estimator: no promotion events recorded");
    return bin(Direction::Promotion, i).count / tot_[0];
}

double EstimatorState::q_hat(int i) const {
    if (tot_[1] <= 0.0) throw std::domain_error("estimator: no demotion events recorded");
    return bin(Direction::Demotion, i).count / tot_[1];
}

std::vector<double> EstimatorState::p_hat() const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = p_hat(i);
    return out;
}

std::vector<double> EstimatorState::q_hat() const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = q_hat(i);
    return out;
}

double EstimatorState::k_p() const {
    const double t = total_events();
    if (t <= 0.0) throw std::domain_error("estimator: no update events recorded");
    return tot_[0] / t;
}

double EstimatorState::k_d() const { return 1.0 - k_p(); }

namespace {
double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
}  // namespace

double EstimatorState::mean_moment(Direction d) const {
    double num = 0.0;
    const double den = tot_[d == Direction::Promotion ? 0 : 1];
    for (int i = 0; i < n_; ++i) num += bin(d, i).moment;
    return safe_div(num, den);
}

double EstimatorState::mean_moment_eps(Direction d) const {
    double num = 0.0;
    const double den = tot_[d == Direction::Promotion ? 0 : 1];
    for (int i = 0; i < n_; ++i) num += bin(d, i).moment_eps;
    return safe_div(num, den);
}

double EstimatorState::mean_moment_eps2(Direction d) const {
    double num = 0.0;
    const double den = tot_[d == Direction::Promotion ? 0 : 1];
    for (int i = 0; i < n_; ++i) num += bin(d, i).moment_eps2;
    return safe_div(num, den);
}

double EstimatorState::mean_eps(Direction d) const {
    double num = 0.0;
    const double den = tot_[d == Direction::Promotion ? 0 : 1];
    for (int i = 0; i < n_; ++i) num += bin(d, i).eps;
    return safe_div(num, den);
}

double EstimatorState::mean_eps(Direction d, int i) const {
    const Bin& b = bin(d, i);
    return safe_div(b.eps, b.count);
}

double EstimatorState::mean_eps2(Direction d, int i) const {
    const Bin& b = bin(d, i);
    return safe_div(b.eps2, b.count);
}

// ---------------------------------------------------------------------------
// Steady-state constraints
// ---------------------------------------------------------------------------

namespace {

std::vector<double> actual_normalized(const WeightVector& w, double* sum_out) {
    const double s = w.sum();
    if (!(s > 0.0)) throw std::domain_error("constraint: weight sum is zero");
    std::vector<double> out(static_cast<std::size_t>(w.size()));
    for (int i = 0; i < w.size(); ++i) out[static_cast<std::size_t>(i)] = w[i] / s;
    if (sum_out != nullptr) *sum_out = s;
    return out;
}

double weight_moment(const WeightVector& w, int i, double l) {
    return l == 1.0 ? 1.0 : std::pow(w[i], l - 1.0);
}

}  // namespace

ConstraintReport hebbian_constraint(const EstimatorState& state,
                                    const WeightVector& weights, double eps, double l) {
    if (state.total_promotions() <= 0.0) {
        throw std::domain_error("hebbian_constraint: zero promotions");
    }
    if (state.total_demotions() > 0.0) {
        throw std::invalid_argument("hebbian_constraint: run contains demotion events");
    }
    const int n = weights.size();
    const double wm = state.mean_moment(Direction::Promotion);
    ConstraintReport rep;
    rep.weight_sum_predicted = (1.0 - wm * eps) / wm;
    rep.normalized_weights = actual_normalized(weights, &rep.weight_sum_actual);
    rep.L.resize(static_cast<std::size_t>(n));
    rep.predicted_p.resize(static_cast<std::size_t>(n));
    rep.estimated_p = state.p_hat();
    rep.zero_order_L = rep.estimated_p;
    const double den = 1.0 - wm * eps;
    for (int i = 0; i < n; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const double mi = weight_moment(weights, i, l);
        rep.predicted_p[u] = wm * weights[i] / (1.0 - mi * eps);
        rep.L[u] = rep.estimated_p[u] * (1.0 - mi * eps) / den;
        rep.delta += std::abs(rep.L[u] - rep.normalized_weights[u]);
    }
    return rep;
}

ConstraintReport stdp_constraint(const EstimatorState& state,
                                 const WeightVector& weights, double eps, double l) {
    if (state.total_events() <= 0.0) {
        throw std::domain_error("stdp_constraint: no update events recorded");
    }
    const int n = weights.size();
    const double kp = state.k_p();
    const double kd = state.k_d();
    const double wp = state.mean_moment(Direction::Promotion);
    const double wd = state.mean_moment(Direction::Demotion);
    const double den = kp * (1.0 - wp * eps) - kd * (1.0 + wd * eps);
    if (std::abs(den) < 1e-12) {
        throw DegenerateConstraintError(
            "stdp_constraint: promotion/demotion statistics balance (k_p ~ k_d); "
            "the steady-state relation is uninformative");
    }
    ConstraintReport rep;
    rep.normalized_weights = actual_normalized(weights, &rep.weight_sum_actual);
    const double mass_den = kp * wp - kd * wd;
    rep.weight_sum_predicted = mass_den == 0.0 ? 0.0 : den / mass_den;
    rep.L.resize(static_cast<std::size_t>(n));
    rep.predicted_p.resize(static_cast<std::size_t>(n));
    rep.zero_order_L.resize(static_cast<std::size_t>(n));
    rep.estimated_p.resize(static_cast<std::size_t>(n));
    const double zden = kp - kd;
    for (int i = 0; i < n; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const double pi = state.total_promotions() > 0.0 ? state.p_hat(i) : 0.0;
        const double qi = state.total_demotions() > 0.0 ? state.q_hat(i) : 0.0;
        const double mi = weight_moment(weights, i, l);
        rep.estimated_p[u] = pi;
        rep.L[u] = (kp * pi * (1.0 - mi * eps) - kd * qi * (1.0 + mi * eps)) / den;
        rep.zero_order_L[u] = zden == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                          : (kp * pi - kd * qi) / zden;
        // Eq. solved for p_i given everything else measured.
        rep.predicted_p[u] =
            kp > 0.0
                ? (rep.normalized_weights[u] * den + kd * qi * (1.0 + mi * eps)) /
                      (kp * (1.0 - mi * eps))
                : std::numeric_limits<double>::quiet_NaN();
        rep.delta += std::abs(rep.L[u] - rep.normalized_weights[u]);
    }
    return rep;
}

ConstraintReport kernel_stdp_constraint(const EstimatorState& state,
                                        const WeightVector& weights, double l) {
    if (state.total_events() <= 0.0) {
        throw std::domain_error("kernel_stdp_constraint: no update events recorded");
    }
    const int n = weights.size();
    const double kp = state.k_p();
    const double kd = state.k_d();
    const double ep_glob = state.mean_eps(Direction::Promotion);
    const double ed_glob = state.mean_eps(Direction::Demotion);
    const double me2p = state.mean_moment_eps2(Direction::Promotion);
    const double me2d = state.mean_moment_eps2(Direction::Demotion);
    const double mep = state.mean_moment_eps(Direction::Promotion);
    const double med = state.mean_moment_eps(Direction::Demotion);
    const double den = kp * (ep_glob - me2p) - kd * (ed_glob + me2d);
    if (std::abs(den) < 1e-15) {
        throw DegenerateConstraintError(
            "kernel_stdp_constraint: averaged learning-rate denominator vanishes");
    }
    ConstraintReport rep;
    rep.normalized_weights = actual_normalized(weights, &rep.weight_sum_actual);
    const double mass_den = kp * mep - kd * med;
    rep.weight_sum_predicted = mass_den == 0.0 ? 0.0 : den / mass_den;
    rep.L.resize(static_cast<std::size_t>(n));
    rep.predicted_p.resize(static_cast<std::size_t>(n));
    rep.zero_order_L.resize(static_cast<std::size_t>(n));
    rep.estimated_p.resize(static_cast<std::size_t>(n));
    const double zden = kp - kd;
    for (int i = 0; i < n; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const double pi = state.total_promotions() > 0.0 ? state.p_hat(i) : 0.0;
        const double qi = state.total_demotions() > 0.0 ? state.q_hat(i) : 0.0;
        const double mi = weight_moment(weights, i, l);
        const double ep_i = state.mean_eps(Direction::Promotion, i);
        const double ep2_i = state.mean_eps2(Direction::Promotion, i);
        const double ed_i = state.mean_eps(Direction::Demotion, i);
        const double ed2_i = state.mean_eps2(Direction::Demotion, i);
        rep.estimated_p[u] = pi;
        const double pro_term = ep_i - ep2_i * mi;   // <eps>_p,i - <eps^2>_p,i w^(l-1)
        const double dem_term = ed_i + ed2_i * mi;   // demotion factor has opposite sign
        rep.L[u] = (kp * pi * pro_term - kd * qi * dem_term) / den;
        rep.zero_order_L[u] = zden == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                          : (kp * pi - kd * qi) / zden;
        if (state.count(Direction::Promotion, i) > 0.0) {
            if (pro_term == 0.0) {
                throw DegenerateConstraintError(
                    "kernel_stdp_constraint: per-channel <eps> denominator vanishes on "
                    "channel " + std::to_string(i));
            }
            // Solved against the actual normalised weight, matching the
            // constant-step form exactly when the kernel is constant.
            rep.predicted_p[u] =
                (rep.normalized_weights[u] * den + kd * qi * dem_term) /
                (kp * pro_term);
        } else if (qi > 0.0) {
            throw DegenerateConstraintError(
                "kernel_stdp_constraint: channel " + std::to_string(i) +
                " has demotions but no promotions; per-channel average undefined");
        } else {
            rep.predicted_p[u] = 0.0;  // silent channel
        }
        rep.delta += std::abs(pi - rep.predicted_p[u]);
    }
    return rep;
}

ConstraintReport decay_constraint(const EstimatorState& state,
                                  const WeightVector& weights, double eps,
                                  double decay_delta) {
    if (state.total_promotions() <= 0.0) {
        throw std::domain_error("decay_constraint: zero promotions");
    }
    const int n = weights.size();
    ConstraintReport rep;
    rep.weight_sum_predicted = eps / decay_delta;
    rep.weight_sum_actual = weights.sum();
    rep.estimated_p = state.p_hat();
    rep.L = rep.estimated_p;
    rep.zero_order_L = rep.estimated_p;
    rep.normalized_weights.resize(static_cast<std::size_t>(n));
    rep.predicted_p.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        rep.normalized_weights[u] = weights[i] / rep.weight_sum_predicted;
        rep.predicted_p[u] = rep.normalized_weights[u];
        rep.delta += std::abs(rep.L[u] - rep.normalized_weights[u]);
    }
    return rep;
}

double adaptive_epsilon(double delta, double cap) {
    if (delta < 0.0) throw std::invalid_argument("adaptive_epsilon: delta must be >= 0");
    if (delta == 0.0) return 0.0;
    return std::min(cap, std::exp(-1.0 / (4.0 * delta)));
}

}  // namespace hebbsim
