#include "sievelab/stick_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "sievelab/errors.hpp"
#include "sievelab/numeric.hpp"
#include "sievelab/quadrature.hpp"
#include "sievelab/special_functions.hpp"

namespace sievelab {

namespace {

// Largest double strictly below 1; draws of W are clamped into
// [1e-300, kMaxW] so logs stay finite and spacings stay positive.
constexpr double kMaxW = 0x1.fffffffffffffp-1;
constexpr double kMinW = 1e-300;

constexpr double kMomentTol = 1e-10;       // contract tolerance for moments
constexpr double kMomentTarget = 1e-13;    // what the quadrature aims for
constexpr long long kMomentBudget = 10'000;

double clamp_w(double w) { return std::clamp(w, kMinW, kMaxW); }

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

std::string format_param(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Trim to the shortest form that still reads back exactly.
  for (int prec = 1; prec <= 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

// Inverse-CDF grid for W0 (density P{W<x}/(mu x) on (0,1]).
struct W0Grid {
  std::vector<double> x;
  std::vector<double> cdf;

  double sample(RandomStream& rng) const {
    const double u = rng.next_unit();
    if (u <= cdf.front()) return x.front();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) return kMaxW;
    const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    if (i == 0) return x.front();
    const double f0 = cdf[i - 1];
    const double f1 = cdf[i];
    if (!(f1 > f0)) return x[i];
    const double t = (u - f0) / (f1 - f0);
    return clamp_w(x[i - 1] + t * (x[i] - x[i - 1]));
  }
};

std::unique_ptr<const W0Grid> build_w0_grid(
    const std::function<double(double)>& cdf_w, double mu) {
  const auto density = [&](double t) { return cdf_w(t) / (mu * t); };
  const auto cell_mass = [&](double lo, double hi) {
    return integrate_or_throw(density, lo, hi, 1e-12, 2'000, "w0 grid cell");
  };

  // Push the lower grid edge down until the mass below it is negligible.
  double x_floor = 0.25;
  while (x_floor > 1e-280) {
    if (cell_mass(x_floor / 8.0, x_floor) <= 1e-11) break;
    x_floor /= 8.0;
  }

  // Initial nodes: log-spaced up to 1/2, then linear to 1.
  std::vector<double> nodes;
  for (double v = x_floor; v < 0.5; v *= 1.18920711500272107) nodes.push_back(v);
  for (int i = 0; i <= 64; ++i) nodes.push_back(0.5 + 0.5 * i / 64.0);

  // Refine until the piecewise-linear CDF interpolates within 1e-8.
  std::vector<std::pair<double, double>> cells;  // (hi, mass)
  std::function<void(double, double, int)> refine = [&](double lo, double hi,
                                                        int depth) {
    const double mid = 0.5 * (lo + hi);
    const double left = cell_mass(lo, mid);
    const double right = cell_mass(mid, hi);
    const double whole = left + right;
    const bool linear_enough = std::abs(left - 0.5 * whole) <= 4e-9;
    if (depth >= 40 || (linear_enough && whole <= 0.02) ||
        (hi - lo) <= hi * 1e-13) {
      cells.emplace_back(mid, left);
      cells.emplace_back(hi, right);
      if (cells.size() > 400'000)
        throw NumericalError("w0 grid: refinement produced too many cells",
                             static_cast<double>(cells.size()));
      return;
    }
    refine(lo, mid, depth + 1);
    refine(mid, hi, depth + 1);
  };
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) refine(nodes[i], nodes[i + 1], 0);

  auto grid = std::make_unique<W0Grid>();
  grid->x.reserve(cells.size() + 1);
  grid->cdf.reserve(cells.size() + 1);
  grid->x.push_back(x_floor);
  grid->cdf.push_back(0.0);
  NeumaierSum total;
  for (const auto& [hi, mass] : cells) {
    total.add(mass);
    grid->x.push_back(hi);
    grid->cdf.push_back(total.value());
  }

  // The density integrates to exactly 1 by the renewal identity
  // E[-log W] = int_0^1 P{W<x}/x dx; anything else flags a broken cdf or mu.
  const double reached = total.value();
  if (std::abs(reached - 1.0) > 1e-6) {
    throw NumericalError("w0 grid: cdf does not reach 1", std::abs(reached - 1.0));
  }
  for (double& f : grid->cdf) f /= reached;
  return grid;
}

}  // namespace

struct StickLaw::Impl {
  Kind kind = Kind::Uniform;
  double theta = 0.0;
  BetaParams ab{1.0, 1.0};
  std::vector<double> weights;
  std::vector<BetaParams> components;
  double tail_index = 0.0;

  double mu_value = 0.0;
  double nu_value = 0.0;

  mutable MomentCache moments;
  mutable MomentCache binom;
  mutable std::once_flag w0_once;
  mutable std::unique_ptr<const W0Grid> w0;

  explicit Impl(std::size_t cache_capacity)
      : moments(cache_capacity), binom(cache_capacity) {}

  // Log-scale Pareto draw for the heavy family: Z with P{Z > z} = z^-a.
  double heavy_z(double unit) const { return std::pow(unit, -1.0 / tail_index); }

  // Transformed heavy-family expectation E[g(Z)] = int_0^1 g(t^{-1/a}) dt;
  // the substitution absorbs the Pareto density so the integrand is bounded.
  double heavy_expectation(const std::function<double(double)>& g,
                           const char* context) const {
    const double inv_a = 1.0 / tail_index;
    const auto integrand = [&](double t) { return g(std::pow(t, -inv_a)); };
    const QuadratureResult r =
        integrate_adaptive(integrand, 0.0, 1.0, kMomentTarget, kMomentBudget);
    if (r.error_estimate > kMomentTol) {
      throw NumericalError(std::string(context) + ": quadrature exceeded tolerance",
                           r.error_estimate);
    }
    return r.value;
  }

  BetaParams beta_params() const {
    switch (kind) {
      case Kind::Uniform: return {1.0, 1.0};
      case Kind::BetaThetaOne: return {theta, 1.0};
      default: return ab;
    }
  }

  static double beta_joint_moment(const BetaParams& p, int a, int b) {
    return std::exp(sf::log_beta(p.alpha + a, p.beta + b) -
                    sf::log_beta(p.alpha, p.beta));
  }

  double compute_joint_moment(int a, int b) const {
    switch (kind) {
      case Kind::Uniform:
      case Kind::BetaThetaOne:
      case Kind::Beta:
        return beta_joint_moment(beta_params(), a, b);
      case Kind::BetaMixture: {
        NeumaierSum s;
        for (std::size_t i = 0; i < weights.size(); ++i)
          s.add(weights[i] * beta_joint_moment(components[i], a, b));
        return s.value();
      }
      case Kind::HeavyMeander:
        return heavy_expectation(
            [&](double z) {
              // W = 1 - e^-z, 1 - W = e^-z.
              const double log_w = std::log1p(-std::exp(-z));
              return std::exp(a * log_w - b * z);
            },
            "joint_moment");
    }
    return 0.0;
  }

  double compute_binomial_moment(int n, int m) const {
    const double lc = sf::log_binomial(n, m);
    switch (kind) {
      case Kind::Uniform:
      case Kind::BetaThetaOne:
      case Kind::Beta: {
        const BetaParams p = beta_params();
        return clamp01(std::exp(lc + sf::log_beta(p.alpha + n - m, p.beta + m) -
                                sf::log_beta(p.alpha, p.beta)));
      }
      case Kind::BetaMixture: {
        NeumaierSum s;
        for (std::size_t i = 0; i < weights.size(); ++i) {
          const BetaParams& p = components[i];
          s.add(weights[i] *
                std::exp(lc + sf::log_beta(p.alpha + n - m, p.beta + m) -
                         sf::log_beta(p.alpha, p.beta)));
        }
        return clamp01(s.value());
      }
      case Kind::HeavyMeander:
        // Fold the binomial weight into the integrand so the absolute
        // quadrature tolerance applies to the probability itself.
        return clamp01(heavy_expectation(
            [&](double z) {
              const double log_w = std::log1p(-std::exp(-z));
              return std::exp(lc + (n - m) * log_w - static_cast<double>(m) * z);
            },
            "binomial_moment"));
    }
    return 0.0;
  }

  double cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    switch (kind) {
      case Kind::Uniform: return x;
      case Kind::BetaThetaOne: return std::pow(x, theta);
      case Kind::Beta: return sf::reg_inc_beta(ab.alpha, ab.beta, x);
      case Kind::BetaMixture: {
        NeumaierSum s;
        for (std::size_t i = 0; i < weights.size(); ++i)
          s.add(weights[i] * sf::reg_inc_beta(components[i].alpha,
                                              components[i].beta, x));
        return clamp01(s.value());
      }
      case Kind::HeavyMeander: {
        const double z = -std::log1p(-x);  // W < x iff Z < z
        if (z <= 1.0) return 0.0;
        return 1.0 - std::pow(z, -tail_index);
      }
    }
    return 0.0;
  }

  double sample(RandomStream& rng) const {
    switch (kind) {
      case Kind::Uniform: return clamp_w(rng.next_unit());
      case Kind::BetaThetaOne:
        return clamp_w(std::pow(rng.next_unit(), 1.0 / theta));
      case Kind::Beta: return clamp_w(rng.next_beta(ab.alpha, ab.beta));
      case Kind::BetaMixture: {
        const double pick = rng.next_unit();
        double acc = 0.0;
        std::size_t idx = weights.size() - 1;
        for (std::size_t i = 0; i < weights.size(); ++i) {
          acc += weights[i];
          if (pick <= acc) {
            idx = i;
            break;
          }
        }
        return clamp_w(rng.next_beta(components[idx].alpha, components[idx].beta));
      }
      case Kind::HeavyMeander:
        return clamp_w(-std::expm1(-heavy_z(rng.next_unit())));
    }
    return 0.5;
  }

  const W0Grid& w0_grid() const {
    std::call_once(w0_once, [this] {
      w0 = build_w0_grid([this](double t) { return cdf(t); }, mu_value);
    });
    return *w0;
  }
};

StickLaw StickLaw::uniform(std::size_t cache_capacity) {
  auto impl = std::make_shared<Impl>(cache_capacity);
  impl->kind = Kind::Uniform;
  impl->mu_value = sf::digamma(2.0) - sf::digamma(1.0);
  impl->nu_value = impl->mu_value;
  return StickLaw(std::move(impl));
}

StickLaw StickLaw::beta_theta_one(double theta, std::size_t cache_capacity) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("beta-theta: theta must be positive and finite");
  auto impl = std::make_shared<Impl>(cache_capacity);
  impl->kind = Kind::BetaThetaOne;
  impl->theta = theta;
  impl->mu_value = 1.0 / theta;
  impl->nu_value = sf::digamma(theta + 1.0) - sf::digamma(1.0);
  return StickLaw(std::move(impl));
}

StickLaw StickLaw::beta(double alpha, double beta, std::size_t cache_capacity) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw std::invalid_argument("beta: parameters must be positive and finite");
  auto impl = std::make_shared<Impl>(cache_capacity);
  impl->kind = Kind::Beta;
  impl->ab = {alpha, beta};
  impl->mu_value = sf::digamma(alpha + beta) - sf::digamma(alpha);
  impl->nu_value = sf::digamma(alpha + beta) - sf::digamma(beta);
  return StickLaw(std::move(impl));
}

StickLaw StickLaw::beta_mixture(std::vector<double> weights,
                                std::vector<BetaParams> components,
                                std::size_t cache_capacity) {
  if (weights.empty() || weights.size() != components.size())
    throw std::invalid_argument("mixture: need matching, nonempty weights/components");
  NeumaierSum wsum;
  for (const double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("mixture: weights must be positive");
    wsum.add(w);
  }
  if (std::abs(wsum.value() - 1.0) > 1e-12)
    throw std::invalid_argument("mixture: weights must sum to 1 within 1e-12");
  for (const auto& c : components) {
    if (!(c.alpha > 0.0) || !(c.beta > 0.0))
      throw std::invalid_argument("mixture: component parameters must be positive");
  }
  auto impl = std::make_shared<Impl>(cache_capacity);
  impl->kind = Kind::BetaMixture;
  impl->weights = std::move(weights);
  impl->components = std::move(components);
  NeumaierSum mu_sum, nu_sum;
  for (std::size_t i = 0; i < impl->weights.size(); ++i) {
    const auto& c = impl->components[i];
    mu_sum.add(impl->weights[i] * (sf::digamma(c.alpha + c.beta) - sf::digamma(c.alpha)));
    nu_sum.add(impl->weights[i] * (sf::digamma(c.alpha + c.beta) - sf::digamma(c.beta)));
  }
  impl->mu_value = mu_sum.value();
  impl->nu_value = nu_sum.value();
  return StickLaw(std::move(impl));
}

StickLaw StickLaw::heavy_meander(double tail_index, std::size_t cache_capacity) {
  if (!(tail_index > 0.0) || !(tail_index <= 1.0))
    throw std::invalid_argument("heavy: tail index must lie in (0, 1]");
  auto impl = std::make_shared<Impl>(cache_capacity);
  impl->kind = Kind::HeavyMeander;
  impl->tail_index = tail_index;
  // mu by quadrature; nu = E[Z] diverges for tail index <= 1, decided
  // analytically rather than by failed quadrature.
  impl->mu_value = impl->heavy_expectation(
      [](double z) { return -std::log1p(-std::exp(-z)); }, "mu");
  impl->nu_value = kInfinity;
  return StickLaw(std::move(impl));
}

StickLaw::Kind StickLaw::kind() const { return impl_->kind; }

double StickLaw::sample_w(RandomStream& rng) const { return impl_->sample(rng); }

double StickLaw::joint_moment(int a, int b) const {
  if (a < 0 || b < 0) throw std::invalid_argument("joint_moment: a,b must be >= 0");
  if (a == 0 && b == 0) return 1.0;
  if (const auto hit = impl_->moments.find(a, b)) return *hit;
  const double value = impl_->compute_joint_moment(a, b);
  impl_->moments.insert(a, b, value);
  return value;
}

double StickLaw::binomial_moment(int n, int m) const {
  if (n == 0 && m == 0) return 1.0;
  if (n < 1 || m < 0 || m > n)
    throw std::invalid_argument("binomial_moment: need 0 <= m <= n, n >= 1");
  if (const auto hit = impl_->binom.find(n, m)) return *hit;
  const double value = impl_->compute_binomial_moment(n, m);
  impl_->binom.insert(n, m, value);
  return value;
}

double StickLaw::mu() const { return impl_->mu_value; }

double StickLaw::nu() const { return impl_->nu_value; }

bool StickLaw::nu_is_finite() const { return std::isfinite(impl_->nu_value); }

double StickLaw::cdf_w(double x) const { return impl_->cdf(x); }

double StickLaw::sample_w0(RandomStream& rng) const {
  return impl_->w0_grid().sample(rng);
}

double StickLaw::sample_abs_log_w_above(RandomStream& rng, double r,
                                        int rejection_budget) const {
  if (!(r >= 0.0)) throw std::invalid_argument("conditioned spacing: r must be >= 0");
  // Memoryless shortcut for exponential |log W|.
  if (impl_->kind == Kind::Uniform) return r + rng.next_exponential();
  if (impl_->kind == Kind::BetaThetaOne)
    return r + rng.next_exponential() / impl_->theta;

  for (int i = 0; i < rejection_budget; ++i) {
    const double l = -std::log(impl_->sample(rng));
    if (l > r) return l;
  }

  // Numeric inversion of the conditional cdf on W < e^-r; matches rejection
  // in distribution and has bounded cost for any r.
  const double x_r = std::exp(-r);
  const double tail = impl_->cdf(x_r);
  if (!(tail > 0.0)) {
    throw NumericalError("conditioned spacing: conditioning event has zero mass",
                         tail);
  }
  const double target = rng.next_unit() * tail;
  double lo = 0.0;
  double hi = x_r;
  for (int i = 0; i < 200 && (hi - lo) > lo * 4e-16 + 1e-300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (impl_->cdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double l = -std::log(0.5 * (lo + hi));
  // Keep the draw strictly above r so renewal epochs never coincide.
  return std::max(l, std::nextafter(r, kInfinity));
}

namespace {

double parse_double(std::string_view text, const char* what) {
  std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty())
    throw std::invalid_argument(std::string("stick law: malformed ") + what + ": '" +
                                buf + "'");
  return v;
}

std::pair<double, double> parse_pair(std::string_view text, const char* what) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos)
    throw std::invalid_argument(std::string("stick law: expected 'a,b' in ") + what);
  return {parse_double(text.substr(0, comma), what),
          parse_double(text.substr(comma + 1), what)};
}

}  // namespace

StickLaw StickLaw::parse(std::string_view text, std::size_t cache_capacity) {
  if (text == "uniform") return uniform(cache_capacity);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("stick law: unrecognized spec '" + std::string(text) + "'");
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);
  if (head == "beta-theta")
    return beta_theta_one(parse_double(rest, "beta-theta"), cache_capacity);
  if (head == "beta") {
    const auto [a, b] = parse_pair(rest, "beta");
    return beta(a, b, cache_capacity);
  }
  if (head == "heavy") return heavy_meander(parse_double(rest, "heavy"), cache_capacity);
  if (head == "mixture") {
    std::vector<double> weights;
    std::vector<BetaParams> components;
    std::string_view remaining = rest;
    while (!remaining.empty()) {
      const auto plus = remaining.find('+');
      const std::string_view term = remaining.substr(0, plus);
      remaining = plus == std::string_view::npos ? std::string_view{}
                                                 : remaining.substr(plus + 1);
      const auto star = term.find('*');
      if (star == std::string_view::npos)
        throw std::invalid_argument("stick law: mixture term needs 'w*beta:a,b'");
      weights.push_back(parse_double(term.substr(0, star), "mixture weight"));
      const std::string_view comp = term.substr(star + 1);
      if (comp.rfind("beta:", 0) != 0)
        throw std::invalid_argument("stick law: mixture components must be beta:a,b");
      const auto [a, b] = parse_pair(comp.substr(5), "mixture component");
      components.push_back({a, b});
    }
    return beta_mixture(std::move(weights), std::move(components), cache_capacity);
  }
  throw std::invalid_argument("stick law: unrecognized spec '" + std::string(text) + "'");
}

std::string StickLaw::to_string() const {
  switch (impl_->kind) {
    case Kind::Uniform: return "uniform";
    case Kind::BetaThetaOne: return "beta-theta:" + format_param(impl_->theta);
    case Kind::Beta:
      return "beta:" + format_param(impl_->ab.alpha) + "," +
             format_param(impl_->ab.beta);
    case Kind::BetaMixture: {
      std::string out = "mixture:";
      for (std::size_t i = 0; i < impl_->weights.size(); ++i) {
        if (i) out += "+";
        out += format_param(impl_->weights[i]) + "*beta:" +
               format_param(impl_->components[i].alpha) + "," +
               format_param(impl_->components[i].beta);
      }
      return out;
    }
    case Kind::HeavyMeander: return "heavy:" + format_param(impl_->tail_index);
  }
  return "uniform";
}

}  // namespace sievelab
