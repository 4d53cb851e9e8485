#ifndef LOGSHOT_NOISE_HPP
#define LOGSHOT_NOISE_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "logshot/rng.hpp"

namespace logshot {

enum class NoiseLaw { Gaussian, Rademacher };

// Mark (shot amplitude) model: a zero-mean random amplitude R(u) attached to
// an arrival at time u, specified by its time-dependent second moment
// K2(u) = E[R(u)^2] and a distributional law.
//
// Variance profiles:
//   IndependentConstant: K2(u) = k2                       (time-independent)
//   PowerLaw:            K2(u) = K + u^{-gamma},  gamma in [0,1)
//                        (integrable blow-up at u = 0; fine for covariance
//                        work on finite windows, but the variance is
//                        unbounded near zero, so the scaling-limit harness
//                        rejects it)
//   BoundedPowerLaw:     K2(u) = K + (1+u)^{-gamma}, gamma > 0
//                        (bounded everywhere with limit K; the variant the
//                        scaling-limit harness uses)
//   LogDecay:            K2(u) = K - gamma log u,  gamma > 0, valid only
//                        while positive; the admissible horizon is supplied
//                        at construction and K - gamma log(horizon) > 0 is
//                        enforced then.
//
// Laws: Gaussian marks have fourth moment K4 = 3 K2^2; Rademacher marks are
// +-sqrt(K2(u)) with K4 = K2^2.  Both give kurtosis ratio K4/K2^2 bounded
// (3 and 1), which is the moment condition the scaling limit needs.
class NoiseModel {
 public:
  enum class Variant { IndependentConstant, PowerLaw, BoundedPowerLaw, LogDecay };

  static NoiseModel independent(double k2, NoiseLaw law = NoiseLaw::Gaussian) {
    if (!(k2 > 0.0)) throw std::domain_error("NoiseModel: k2 must be positive");
    NoiseModel m(Variant::IndependentConstant, law);
    m.K_ = k2;
    return m;
  }

  static NoiseModel power_law(double K, double gamma, NoiseLaw law = NoiseLaw::Gaussian) {
    if (!(K > 0.0)) throw std::domain_error("NoiseModel: K must be positive");
    if (!(gamma >= 0.0) || !(gamma < 1.0)) {
      throw std::domain_error("NoiseModel: power-law gamma must lie in [0, 1)");
    }
    NoiseModel m(Variant::PowerLaw, law);
    m.K_ = K;
    m.gamma_ = gamma;
    return m;
  }

  static NoiseModel bounded_power_law(double K, double gamma, NoiseLaw law = NoiseLaw::Gaussian) {
    if (!(K > 0.0)) throw std::domain_error("NoiseModel: K must be positive");
    if (!(gamma > 0.0)) throw std::domain_error("NoiseModel: bounded power-law gamma must be positive");
    NoiseModel m(Variant::BoundedPowerLaw, law);
    m.K_ = K;
    m.gamma_ = gamma;
    return m;
  }

  static NoiseModel log_decay(double K, double gamma, double horizon,
                              NoiseLaw law = NoiseLaw::Gaussian) {
    if (!(K > 0.0)) throw std::domain_error("NoiseModel: K must be positive");
    if (!(gamma > 0.0)) throw std::domain_error("NoiseModel: log-decay gamma must be positive");
    if (!(horizon > 0.0)) throw std::domain_error("NoiseModel: horizon must be positive");
    if (!(K - gamma * std::log(horizon) > 0.0)) {
      throw std::domain_error(
          "NoiseModel: log-decay variance is not positive up to the requested horizon");
    }
    NoiseModel m(Variant::LogDecay, law);
    m.K_ = K;
    m.gamma_ = gamma;
    m.horizon_ = horizon;
    return m;
  }

  // Second moment K2(u) of a mark attached at time u > 0.
  double k2(double u) const {
    if (!(u > 0.0)) throw std::domain_error("NoiseModel::k2: u must be positive");
    switch (variant_) {
      case Variant::IndependentConstant:
        return K_;
      case Variant::PowerLaw:
        return gamma_ == 0.0 ? K_ + 1.0 : K_ + std::pow(u, -gamma_);
      case Variant::BoundedPowerLaw:
        return K_ + std::pow(1.0 + u, -gamma_);
      case Variant::LogDecay: {
        if (u > horizon_) {
          throw std::domain_error("NoiseModel::k2: u exceeds the admissible log-decay horizon");
        }
        return K_ - gamma_ * std::log(u);
      }
    }
    throw std::logic_error("NoiseModel::k2: unreachable");
  }

  // Fourth moment K4(u) = E[R(u)^4].
  double k4(double u) const {
    const double v = k2(u);
    return law_ == NoiseLaw::Gaussian ? 3.0 * v * v : v * v;
  }

  // Kurtosis ratio K4(u)/K2(u)^2: 3 for Gaussian, 1 for Rademacher marks.
  double kurtosis_ratio() const { return law_ == NoiseLaw::Gaussian ? 3.0 : 1.0; }

  // Draw one mark for an arrival at time u.
  double sample(double u, SplitRng& rng) const {
    const double sd = std::sqrt(k2(u));
    if (law_ == NoiseLaw::Gaussian) return sd * rng.normal();
    return rng.uniform() < 0.5 ? sd : -sd;
  }

  // lim_{u->inf} K2(u), when it exists and is positive: the constant K the
  // scaling limit normalizes by.  LogDecay has no such limit.
  std::optional<double> limit_variance() const {
    switch (variant_) {
      case Variant::IndependentConstant:
        return K_;
      case Variant::PowerLaw:
        return gamma_ == 0.0 ? std::optional<double>(K_ + 1.0) : std::optional<double>(K_);
      case Variant::BoundedPowerLaw:
        return K_;
      case Variant::LogDecay:
        return std::nullopt;
    }
    return std::nullopt;
  }

  // Whether K2 is bounded on (0, inf) -- the hypothesis the scaling-limit
  // harness checks (PowerLaw with gamma > 0 blows up at the origin).
  bool bounded_variance() const {
    switch (variant_) {
      case Variant::IndependentConstant:
      case Variant::BoundedPowerLaw:
        return true;
      case Variant::PowerLaw:
        return gamma_ == 0.0;
      case Variant::LogDecay:
        return false;
    }
    return false;
  }

  // Largest time at which marks may be attached (infinite except for
  // the log-decay profile).
  double admissible_horizon() const {
    return variant_ == Variant::LogDecay ? horizon_ : std::numeric_limits<double>::infinity();
  }

  Variant variant() const { return variant_; }
  NoiseLaw law() const { return law_; }
  double param_K() const { return K_; }
  double param_gamma() const { return gamma_; }

  std::string id() const {
    std::ostringstream os;
    os << (law_ == NoiseLaw::Gaussian ? "gaussian-" : "rademacher-");
    switch (variant_) {
      case Variant::IndependentConstant:
        os << "const(k2=" << K_ << ")";
        break;
      case Variant::PowerLaw:
        os << "powerlaw(K=" << K_ << ",gamma=" << gamma_ << ")";
        break;
      case Variant::BoundedPowerLaw:
        os << "bounded-powerlaw(K=" << K_ << ",gamma=" << gamma_ << ")";
        break;
      case Variant::LogDecay:
        os << "logdecay(K=" << K_ << ",gamma=" << gamma_ << ",horizon=" << horizon_ << ")";
        break;
    }
    return os.str();
  }

 private:
  NoiseModel(Variant v, NoiseLaw law) : variant_(v), law_(law) {}

  Variant variant_;
  NoiseLaw law_;
  double K_ = 0.0;
  double gamma_ = 0.0;
  double horizon_ = std::numeric_limits<double>::infinity();
};

}  // namespace logshot

#endif  // LOGSHOT_NOISE_HPP
