#ifndef DIRICHLET_LAB_NORMS_HPP
#define DIRICHLET_LAB_NORMS_HPP

#include "dirichlet_lab/core.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dlab {

enum class NormKind { Sup, Euclidean, Lp, Cylindrical, Pullback };
enum class RadiusStatus { Exact, LowerBound };

struct CriticalRadius {
  double value;
  RadiusStatus status;
};

inline const char* to_string(RadiusStatus s) { return s == RadiusStatus::Exact ? "exact" : "lower_bound"; }

/// A norm on R^d together with constants c_lo, c_hi such that
/// c_lo |x|_2 <= nu(x) <= c_hi |x|_2. The constants bound the Euclidean
/// search radius when first minima are computed by enumeration.
///
/// Kinds: Sup, Euclidean, Lp (1 < p < inf), Cylindrical (x -> max{eta(x'),
/// |x_d|} with eta a norm on the first d-1 coordinates) and Pullback
/// (x -> inner(g x) for an invertible g).
///
/// A critical radius may be attached (for example an estimate-mode lower
/// bound); critical_radius() returns an attached value before consulting the
/// registry.
class NormDescriptor {
 public:
  static NormDescriptor sup(int d) { return NormDescriptor(NormKind::Sup, d, 1.0 / std::sqrt(double(d)), 1.0); }

  static NormDescriptor euclidean(int d) { return NormDescriptor(NormKind::Euclidean, d, 1.0, 1.0); }

  static NormDescriptor lp(int d, double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw InputError("l^p norm needs 1 < p < infinity");
    const double k = std::pow(double(d), 1.0 / p - 0.5);
    NormDescriptor nu(NormKind::Lp, d, std::min(1.0, k), std::max(1.0, k));
    nu.p_ = p;
    return nu;
  }

  static NormDescriptor cylindrical(const NormDescriptor& eta) {
    const int d = eta.dimension() + 1;
    // max{eta(x'), |z|} >= min(c_lo(eta), 1) max{|x'|, |z|} >= min(c_lo(eta), 1) |x| / sqrt 2
    const double lo = std::min(eta.c_lo(), 1.0) / std::sqrt(2.0);
    const double hi = std::max(eta.c_hi(), 1.0);
    NormDescriptor nu(NormKind::Cylindrical, d, lo, hi);
    nu.inner_ = std::make_shared<const NormDescriptor>(eta);
    return nu;
  }

  static NormDescriptor pullback(const NormDescriptor& inner, Matrix g) {
    if (g.rows() != inner.dimension() || g.cols() != inner.dimension())
      throw InputError("pullback matrix dimension mismatch");
    detail::require_finite(g, "pullback matrix");
    Eigen::JacobiSVD<Matrix> svd(g);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    if (!(smin > 0.0)) throw NumericalRankError("pullback matrix is singular");
    NormDescriptor nu(NormKind::Pullback, inner.dimension(), inner.c_lo() * smin, inner.c_hi() * sv[0]);
    nu.inner_ = std::make_shared<const NormDescriptor>(inner);
    nu.transform_ = std::move(g);
    return nu;
  }

  NormDescriptor with_critical_radius(CriticalRadius radius) const {
    if (!(radius.value > 0.0)) throw InputError("critical radius must be positive");
    NormDescriptor copy = *this;
    copy.attached_radius_ = radius;
    return copy;
  }

  NormKind kind() const { return kind_; }
  int dimension() const { return d_; }
  double p() const { return p_; }
  double c_lo() const { return c_lo_; }
  double c_hi() const { return c_hi_; }
  /// eta for Cylindrical, the inner norm for Pullback.
  const NormDescriptor& inner() const {
    if (!inner_) throw InputError("norm has no inner norm");
    return *inner_;
  }
  const Matrix& transform() const { return transform_; }
  std::optional<CriticalRadius> attached_critical_radius() const { return attached_radius_; }

  double operator()(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != d_) throw InputError("norm evaluation: dimension mismatch");
    switch (kind_) {
      case NormKind::Sup:
        return x.cwiseAbs().maxCoeff();
      case NormKind::Euclidean:
        return x.norm();
      case NormKind::Lp: {
        const double scale = x.cwiseAbs().maxCoeff();
        if (scale == 0.0) return 0.0;
        double acc = 0.0;
        for (int i = 0; i < d_; ++i) acc += std::pow(std::abs(x[i]) / scale, p_);
        return scale * std::pow(acc, 1.0 / p_);
      }
      case NormKind::Cylindrical:
        return std::max((*inner_)(x.head(d_ - 1)), std::abs(x[d_ - 1]));
      case NormKind::Pullback: {
        const Vector y = transform_ * x;
        return (*inner_)(y);
      }
    }
    return 0.0;
  }

  /// Short textual name, also accepted by parse_norm.
  std::string name() const {
    switch (kind_) {
      case NormKind::Sup: return "sup";
      case NormKind::Euclidean: return "euclid";
      case NormKind::Lp: {
        std::ostringstream os;
        os << "lp:" << p_;
        return os.str();
      }
      case NormKind::Cylindrical: return "cyl:" + inner_->name();
      case NormKind::Pullback: return "pullback:" + inner_->name();
    }
    return "?";
  }

 private:
  NormDescriptor(NormKind kind, int d, double lo, double hi) : kind_(kind), d_(d), c_lo_(lo), c_hi_(hi) {
    if (d < 1) throw InputError("norm dimension must be positive");
  }

  NormKind kind_;
  int d_;
  double c_lo_;
  double c_hi_;
  double p_ = 0.0;
  std::shared_ptr<const NormDescriptor> inner_;
  Matrix transform_;
  std::optional<CriticalRadius> attached_radius_;
};

inline double norm_value(const NormDescriptor& nu, const Eigen::Ref<const Vector>& x) { return nu(x); }

/// Parses "sup", "euclid", "lp:<p>", "cyl" / "cyl:<eta>" for dimension d.
/// Cylindrical norms take eta on the first d-1 coordinates; the default eta
/// is Euclidean.
inline NormDescriptor parse_norm(const std::string& text, int d) {
  if (text == "sup" || text == "inf" || text == "linf") return NormDescriptor::sup(d);
  if (text == "euclid" || text == "euclidean" || text == "l2") return NormDescriptor::euclidean(d);
  if (text.rfind("lp:", 0) == 0) {
    double p = 0.0;
    try {
      p = std::stod(text.substr(3));
    } catch (const std::exception&) {
      throw InputError("bad l^p exponent in '" + text + "'");
    }
    return NormDescriptor::lp(d, p);
  }
  if (text == "cyl") return NormDescriptor::cylindrical(NormDescriptor::euclidean(d - 1));
  if (text.rfind("cyl:", 0) == 0) return NormDescriptor::cylindrical(parse_norm(text.substr(4), d - 1));
  throw InputError("unknown norm '" + text + "'");
}

/// Weights omega = (alpha, beta): positive, each side summing to 1.
class WeightVector {
 public:
  WeightVector(std::vector<double> alpha, std::vector<double> beta)
      : alpha_(std::move(alpha)), beta_(std::move(beta)) {
    validate(alpha_, "alpha");
    validate(beta_, "beta");
  }

  static WeightVector unweighted(int m, int n) {
    return WeightVector(std::vector<double>(m, 1.0 / m), std::vector<double>(n, 1.0 / n));
  }

  /// First m entries are alpha, the remaining ones beta.
  static WeightVector from_flat(const std::vector<double>& flat, int m) {
    if (m < 1 || static_cast<int>(flat.size()) <= m) throw InputError("weights: need m alpha and at least one beta");
    return WeightVector({flat.begin(), flat.begin() + m}, {flat.begin() + m, flat.end()});
  }

  int m() const { return static_cast<int>(alpha_.size()); }
  int n() const { return static_cast<int>(beta_.size()); }
  int d() const { return m() + n(); }
  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& beta() const { return beta_; }
  double gamma() const { return *std::max_element(beta_.begin(), beta_.end()); }

  /// Smallest entry among all alpha_i and beta_j.
  double min_weight() const {
    return std::min(*std::min_element(alpha_.begin(), alpha_.end()), *std::min_element(beta_.begin(), beta_.end()));
  }

 private:
  static void validate(const std::vector<double>& w, const char* side) {
    if (w.empty()) throw InputError(std::string("weights: ") + side + " is empty");
    for (double x : w)
      if (!(x > 0.0) || !std::isfinite(x)) throw InputError(std::string("weights: ") + side + " must be positive");
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12) throw InputError(std::string("weights: ") + side + " must sum to 1");
  }

  std::vector<double> alpha_;
  std::vector<double> beta_;
};

/// |x|_w = max_i |x_i|^{1/w_i}. Homogeneous under weighted dilations but not
/// subadditive, so it is only ever used to score vectors, never to enumerate.
inline double quasi_norm(const Eigen::Ref<const Vector>& x, const std::vector<double>& weights) {
  if (static_cast<std::size_t>(x.size()) != weights.size()) throw InputError("quasi-norm: dimension mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) throw InputError("quasi-norm: weights must be positive");
    out = std::max(out, std::pow(std::abs(x[static_cast<Eigen::Index>(i)]), 1.0 / weights[i]));
  }
  return out;
}

inline void to_json(nlohmann::json& j, const WeightVector& w) { j = {{"alpha", w.alpha()}, {"beta", w.beta()}}; }

inline WeightVector weights_from_json(const nlohmann::json& j) {
  return WeightVector(j.at("alpha").get<std::vector<double>>(), j.at("beta").get<std::vector<double>>());
}

// JSON: {"kind": "sup"|"euclidean"|"lp"|"cylindrical"|"pullback", "d": int,
//        "p": optional, "eta": optional nested, "matrix": optional rows,
//        "critical_radius": optional {"value", "status"}}.
inline void to_json(nlohmann::json& j, const NormDescriptor& nu) {
  static const char* names[] = {"sup", "euclidean", "lp", "cylindrical", "pullback"};
  j = nlohmann::json{{"kind", names[static_cast<int>(nu.kind())]}, {"d", nu.dimension()}};
  if (nu.kind() == NormKind::Lp) j["p"] = nu.p();
  if (nu.kind() == NormKind::Cylindrical) to_json(j["eta"], nu.inner());
  if (nu.kind() == NormKind::Pullback) {
    to_json(j["inner"], nu.inner());
    auto rows = nlohmann::json::array();
    for (int r = 0; r < nu.transform().rows(); ++r) {
      std::vector<double> row(nu.transform().cols());
      for (int c = 0; c < nu.transform().cols(); ++c) row[c] = nu.transform()(r, c);
      rows.push_back(row);
    }
    j["matrix"] = rows;
  }
  if (auto cr = nu.attached_critical_radius())
    j["critical_radius"] = {{"value", cr->value}, {"status", to_string(cr->status)}};
}

inline NormDescriptor norm_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  auto with_radius = [&](NormDescriptor nu) {
    if (j.contains("critical_radius")) {
      const auto& cr = j["critical_radius"];
      const auto status = cr.at("status").get<std::string>() == "exact" ? RadiusStatus::Exact : RadiusStatus::LowerBound;
      nu = nu.with_critical_radius({cr.at("value").get<double>(), status});
    }
    return nu;
  };
  if (kind == "cylindrical") return with_radius(NormDescriptor::cylindrical(norm_from_json(j.at("eta"))));
  if (kind == "pullback") {
    const auto inner = norm_from_json(j.at("inner"));
    const auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
    Matrix g(static_cast<Eigen::Index>(rows.size()), inner.dimension());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(rows[r].size()) != inner.dimension()) throw InputError("pullback matrix row length");
      for (int c = 0; c < inner.dimension(); ++c) g(static_cast<Eigen::Index>(r), c) = rows[r][c];
    }
    return with_radius(NormDescriptor::pullback(inner, std::move(g)));
  }
  const int d = j.at("d").get<int>();
  if (kind == "sup") return with_radius(NormDescriptor::sup(d));
  if (kind == "euclidean") return with_radius(NormDescriptor::euclidean(d));
  if (kind == "lp") return with_radius(NormDescriptor::lp(d, j.at("p").get<double>()));
  throw InputError("unknown norm kind '" + kind + "'");
}

}  // namespace dlab

#endif  // DIRICHLET_LAB_NORMS_HPP
