#include "pulsedtls/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pulsedtls {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void require_area_and_width(double total_area, double width) {
  if (!std::isfinite(total_area) || total_area < 0.0)
    throw std::invalid_argument("pulse area must be finite and >= 0");
  if (!std::isfinite(width) || width <= 0.0) throw std::invalid_argument("pulse width must be finite and > 0");
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view to_string(PulseKind kind) {
  switch (kind) {
    case PulseKind::Square:
      return "square";
    case PulseKind::Gaussian:
      return "gaussian";
    case PulseKind::Tabulated:
      return "tabulated";
  }
  return "unknown";
}

PulseShape PulseShape::square(double total_area, double width) {
  require_area_and_width(total_area, width);
  PulseShape p;
  p.kind_ = PulseKind::Square;
  p.total_area_ = total_area;
  p.width_ = width;
  p.window_end_ = width;
  return p;
}

PulseShape PulseShape::gaussian(double total_area, double width) {
  require_area_and_width(total_area, width);
  PulseShape p;
  p.kind_ = PulseKind::Gaussian;
  p.total_area_ = total_area;
  p.width_ = width;
  p.sigma_ = width / kGaussianWidthRatio;
  p.center_ = kGaussianHalfExtent * p.sigma_;
  p.window_end_ = 2.0 * p.center_;
  p.gauss_tail_ = normal_cdf(-kGaussianHalfExtent);
  p.gauss_norm_ = 1.0 - 2.0 * p.gauss_tail_;
  return p;
}

PulseShape PulseShape::tabulated(std::vector<PulseSample> samples) {
  if (samples.size() < 2) throw std::invalid_argument("tabulated pulse needs at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.omega) || s.omega < 0.0)
      throw std::invalid_argument("tabulated pulse samples must be finite with omega >= 0");
    if (i == 0 && s.t < 0.0) throw std::invalid_argument("tabulated pulse must start at t >= 0");
    if (i > 0 && !(s.t > samples[i - 1].t))
      throw std::invalid_argument("tabulated pulse times must be strictly increasing");
  }
  PulseShape p;
  p.kind_ = PulseKind::Tabulated;
  p.prefix_area_.resize(samples.size(), 0.0);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double h = samples[i].t - samples[i - 1].t;
    p.prefix_area_[i] = p.prefix_area_[i - 1] + 0.5 * h * (samples[i].omega + samples[i - 1].omega);
  }
  p.total_area_ = p.prefix_area_.back();
  p.width_ = samples.back().t;
  p.window_end_ = samples.back().t;
  p.samples_ = std::move(samples);
  return p;
}

double PulseShape::envelope(double t) const {
  if (!(t >= 0.0) || t > window_end_) return 0.0;
  switch (kind_) {
    case PulseKind::Square:
      return total_area_ / width_;
    case PulseKind::Gaussian: {
      const double x = (t - center_) / sigma_;
      return total_area_ * std::exp(-0.5 * x * x) / (sigma_ * std::sqrt(2.0 * std::numbers::pi) * gauss_norm_);
    }
    case PulseKind::Tabulated: {
      if (t < samples_.front().t) return 0.0;
      auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                 [](double v, const PulseSample& s) { return v < s.t; });
      if (it == samples_.end()) return samples_.back().omega;
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (t - lo.t) / (hi.t - lo.t);
      return lo.omega + w * (hi.omega - lo.omega);
    }
  }
  return 0.0;
}

double PulseShape::cumulative_area(double t) const {
  if (!(t > 0.0)) return 0.0;
  if (t >= window_end_) return total_area_;
  switch (kind_) {
    case PulseKind::Square:
      return total_area_ * (t / width_);
    case PulseKind::Gaussian: {
      const double a = total_area_ * (normal_cdf((t - center_) / sigma_) - gauss_tail_) / gauss_norm_;
      return std::clamp(a, 0.0, total_area_);
    }
    case PulseKind::Tabulated: {
      if (t <= samples_.front().t) return 0.0;
      auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                 [](double v, const PulseSample& s) { return v < s.t; });
      const std::size_t i = static_cast<std::size_t>(it - samples_.begin()) - 1;
      const auto& lo = samples_[i];
      const auto& hi = samples_[i + 1];
      const double h = hi.t - lo.t;
      const double d = t - lo.t;
      return prefix_area_[i] + lo.omega * d + 0.5 * (hi.omega - lo.omega) * d * d / h;
    }
  }
  return 0.0;
}

void PulseShape::cumulative_area(std::span<const double> t, std::span<double> out) const {
  if (kind_ == PulseKind::Square) {
    const double rate = total_area_ / width_;
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = std::clamp(t[i], 0.0, width_) * rate;
    return;
  }
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = cumulative_area(t[i]);
}

double PulseShape::inverse_area(double a) const {
  if (!(a >= 0.0) || a > total_area_) throw std::invalid_argument("inverse_area: area outside [0, total_area]");
  if (a == 0.0) return 0.0;
  double lo = 0.0;
  double hi = window_end_;
  const double tol = 1e-10 * width_;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (cumulative_area(mid) >= a)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::vector<double> PulseShape::breakpoints() const {
  std::vector<double> out;
  if (kind_ == PulseKind::Tabulated) {
    for (const auto& s : samples_)
      if (s.t > 0.0 && s.t < window_end_) out.push_back(s.t);
  }
  return out;
}

PulseShape PulseShape::with_area(double total_area) const {
  switch (kind_) {
    case PulseKind::Square:
      return square(total_area, width_);
    case PulseKind::Gaussian:
      return gaussian(total_area, width_);
    case PulseKind::Tabulated: {
      if (!(total_area >= 0.0) || !std::isfinite(total_area))
        throw std::invalid_argument("pulse area must be finite and >= 0");
      if (total_area_ <= 0.0) throw std::invalid_argument("cannot rescale a zero-area tabulated pulse");
      auto s = samples_;
      const double k = total_area / total_area_;
      for (auto& x : s) x.omega *= k;
      return tabulated(std::move(s));
    }
  }
  return *this;
}

PulseShape PulseShape::with_width(double width) const {
  switch (kind_) {
    case PulseKind::Square:
      return square(total_area_, width);
    case PulseKind::Gaussian:
      return gaussian(total_area_, width);
    case PulseKind::Tabulated: {
      if (!(width > 0.0) || !std::isfinite(width)) throw std::invalid_argument("pulse width must be finite and > 0");
      auto s = samples_;
      const double k = width / width_;
      for (auto& x : s) {
        x.t *= k;
        x.omega /= k;
      }
      return tabulated(std::move(s));
    }
  }
  return *this;
}

PulseShape load_tabulated_csv(const std::filesystem::path& path, TimeUnit unit, double gamma_per_second) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pulse table: " + path.string());
  if (unit == TimeUnit::Seconds && !(gamma_per_second > 0.0))
    throw std::invalid_argument("seconds time unit requires a positive decay rate");
  std::string line;
  if (!std::getline(in, line) || trim(line) != "t,omega")
    throw std::runtime_error("pulse table must start with the header 't,omega'");
  std::vector<PulseSample> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("pulse table line " + std::to_string(lineno) + ": expected two columns");
    const std::string a = line.substr(0, comma);
    const std::string b = line.substr(comma + 1);
    char* end_a = nullptr;
    char* end_b = nullptr;
    double t = std::strtod(a.c_str(), &end_a);
    double omega = std::strtod(b.c_str(), &end_b);
    if (end_a == a.c_str() || end_b == b.c_str() || *end_a != '\0' || !trim(end_b).empty())
      throw std::runtime_error("pulse table line " + std::to_string(lineno) + ": not a number");
    if (unit == TimeUnit::Seconds) {
      t *= gamma_per_second;
      omega /= gamma_per_second;
    }
    samples.push_back({t, omega});
  }
  return PulseShape::tabulated(std::move(samples));
}

}  // namespace pulsedtls
