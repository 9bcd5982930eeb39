#include "autoconv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace autoconv {

std::vector<double> Axis::nodes() const {
  std::vector<double> out(size);
  for (std::size_t i = 0; i < size; ++i) out[i] = node(i);
  return out;
}

SampledGrid::SampledGrid(double q_min, double q_max, std::size_t n_points, double q_cw)
    : q_min_(q_min), q_max_(q_max), n_(n_points), q_cw_(q_cw) {
  if (n_points < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (!(q_max > q_min)) throw std::invalid_argument("grid needs q_max > q_min");
  if (!std::isfinite(q_min) || !std::isfinite(q_max) || !std::isfinite(q_cw))
    throw std::invalid_argument("grid bounds must be finite");
  dq_ = (q_max - q_min) / static_cast<double>(n_points - 1);
}

SampledGrid make_grid(double q_min, double q_max, std::size_t n_points, double q_cw) {
  return SampledGrid(q_min, q_max, n_points, q_cw);
}

ComplexSignal::ComplexSignal(Axis a, std::vector<cplx> v) : axis(a), values(std::move(v)) {
  if (axis.size != values.size())
    throw std::invalid_argument("signal length " + std::to_string(values.size()) +
                                " does not match axis size " + std::to_string(axis.size));
}

std::vector<double> unwrap_phase(std::span<const double> wrapped) {
  std::vector<double> out(wrapped.begin(), wrapped.end());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double offset = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double jump = wrapped[i] - wrapped[i - 1];
    if (jump > std::numbers::pi) {
      offset -= two_pi * std::ceil((jump - std::numbers::pi) / two_pi);
    } else if (jump < -std::numbers::pi) {
      offset += two_pi * std::ceil((-jump - std::numbers::pi) / two_pi);
    }
    out[i] = wrapped[i] + offset;
  }
  return out;
}

PolarSignal to_polar(std::span<const cplx> x) {
  PolarSignal p;
  p.amplitude.resize(x.size());
  std::vector<double> principal(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p.amplitude[i] = std::abs(x[i]);
    principal[i] = p.amplitude[i] == 0.0 ? 0.0 : std::arg(x[i]);
  }
  p.phase = unwrap_phase(principal);
  // Anchor the 2*pi branch at the strongest sample: it keeps its principal value.
  if (!x.empty()) {
    const auto peak = static_cast<std::size_t>(
        std::max_element(p.amplitude.begin(), p.amplitude.end()) - p.amplitude.begin());
    const double shift = principal[peak] - p.phase[peak];
    if (shift != 0.0)
      for (double& v : p.phase) v += shift;
  }
  return p;
}

PolarSignal to_polar(const ComplexSignal& x) { return to_polar(x.view()); }

std::vector<cplx> recompose(const PolarSignal& p) {
  if (p.amplitude.size() != p.phase.size())
    throw std::invalid_argument("amplitude and phase lengths differ");
  std::vector<cplx> out(p.amplitude.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::polar(1.0, p.phase[i]) * p.amplitude[i];
  return out;
}

std::vector<double> resample_linear(std::span<const double> values, const Axis& source,
                                    const Axis& target) {
  if (values.size() != source.size || source.size < 2)
    throw std::invalid_argument("resample_linear: source needs >= 2 samples matching its axis");
  if (target.size == 0) return {};
  const double lo = source.start;
  const double hi = source.last();
  // Relative slack absorbs round-off in node arithmetic at the shared endpoints.
  const double slack = 1e-12 * std::max(std::abs(lo), std::abs(hi)) + 1e-12 * source.step;
  if (target.start < lo - slack || target.last() > hi + slack)
    throw std::invalid_argument("resample_linear: target nodes outside source range");

  std::vector<double> out(target.size);
  const std::size_t last_cell = source.size - 2;
  for (std::size_t i = 0; i < target.size; ++i) {
    const double t = (target.node(i) - lo) / source.step;
    std::size_t cell = t <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(t));
    if (cell > last_cell) cell = last_cell;
    double w = t - static_cast<double>(cell);
    w = std::clamp(w, 0.0, 1.0);
    out[i] = (1.0 - w) * values[cell] + w * values[cell + 1];
  }
  return out;
}

ComplexSignal resample_linear(const ComplexSignal& x, const Axis& target) {
  std::vector<double> re(x.size()), im(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    re[i] = x.values[i].real();
    im[i] = x.values[i].imag();
  }
  const auto re_t = resample_linear(re, x.axis, target);
  const auto im_t = resample_linear(im, x.axis, target);
  std::vector<cplx> out(target.size);
  for (std::size_t i = 0; i < target.size; ++i) out[i] = {re_t[i], im_t[i]};
  return ComplexSignal(target, std::move(out));
}

double l2_norm(std::span<const cplx> x, double step) {
  double sum = 0.0;
  for (const auto& z : x) sum += std::norm(z);
  return std::sqrt(sum * step);
}

double l2_norm(std::span<const double> x, double step) {
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return std::sqrt(sum * step);
}

double l2_norm(const ComplexSignal& x) { return l2_norm(x.view(), x.axis.step); }

std::vector<double> abs_values(std::span<const cplx> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::abs(x[i]);
  return out;
}

}  // namespace autoconv
