#include "lomac/presets.hpp"

#include "lomac/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace lomac {

namespace {

constexpr double kPi = std::numbers::pi;

struct NamedPreset {
  Preset preset;
  std::string_view name;
  int dims;
};

constexpr std::array<NamedPreset, 6> kPresets{{
    {Preset::forced, "forced", 1},
    {Preset::weak_landau_1d, "weak_landau_1d", 1},
    {Preset::strong_landau_1d, "strong_landau_1d", 1},
    {Preset::bump_on_tail, "bump_on_tail", 1},
    {Preset::weak_landau_2d2v, "weak_landau_2d2v", 2},
    {Preset::two_stream_2d2v, "two_stream_2d2v", 2},
}};

const NamedPreset& lookup(Preset p) {
  for (const auto& entry : kPresets)
    if (entry.preset == p) return entry;
  throw ConfigError("unknown preset");
}

template <class F>
Vector sample(const Vector& nodes, F fn) {
  return nodes.unaryExpr(fn);
}

// 1 + alpha * cos(k x) split into two separable terms.
LowRankMatrix perturbed_1d(const PresetParams& params, const SpatialGrid& x, const Vector& profile) {
  const Vector nodes = x.nodes();
  const Vector ones = Vector::Ones(nodes.size());
  const Vector wave = sample(nodes, [&](double s) { return std::cos(params.k * s); });
  const LowRankMatrix terms[] = {LowRankMatrix::outer(ones, profile),
                                 LowRankMatrix::outer(wave, profile, params.alpha)};
  return add(std::span<const LowRankMatrix>(terms));
}

Vector perturbed_2d(const PresetParams& params, const SpatialGrid& x1, const SpatialGrid& x2) {
  Vector out(static_cast<Eigen::Index>(x1.n * x2.n));
  for (std::size_t i2 = 0; i2 < x2.n; ++i2)
    for (std::size_t i1 = 0; i1 < x1.n; ++i1)
      out[static_cast<Eigen::Index>(i1 + x1.n * i2)] =
          1.0 + params.alpha * (std::cos(params.k * x1.node(i1)) + std::cos(params.k * x2.node(i2)));
  return out;
}

double forced_gaussian(double v) { return std::exp(-(4.0 * v - 1.0) * (4.0 * v - 1.0) / 4.0); }

}  // namespace

Preset parse_preset(std::string_view name) {
  for (const auto& entry : kPresets)
    if (entry.name == name) return entry.preset;
  std::string known;
  for (const auto& entry : kPresets) known += (known.empty() ? "" : ", ") + std::string(entry.name);
  throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

std::string preset_name(Preset p) { return std::string(lookup(p).name); }

int preset_dims(Preset p) { return lookup(p).dims; }

Interval preset_domain(Preset p, const PresetParams& params) {
  if (p == Preset::forced) return {-kPi, kPi};
  if (!(params.k > 0.0)) throw ConfigError("preset wave number k must be > 0");
  return {0.0, 2.0 * kPi / params.k};
}

LowRankMatrix initial_1d(Preset p, const PresetParams& params, const SpatialGrid& x,
                         const VelocityGrid& v) {
  switch (p) {
    case Preset::forced:
      return forced::exact(x, v, 0.0);
    case Preset::weak_landau_1d:
    case Preset::strong_landau_1d: {
      const double norm = 1.0 / std::sqrt(2.0 * kPi);
      return perturbed_1d(params, x,
                          sample(v.nodes, [&](double s) { return norm * std::exp(-s * s / 2.0); }));
    }
    case Preset::bump_on_tail: {
      const double np = 9.0 / (10.0 * std::sqrt(2.0 * kPi));
      const double nb = 2.0 / (10.0 * std::sqrt(2.0 * kPi));
      const double u = 4.5;
      const double vt = 0.5;
      return perturbed_1d(params, x, sample(v.nodes, [&](double s) {
                            return np * std::exp(-s * s / 2.0) +
                                   nb * std::exp(-(s - u) * (s - u) / (2.0 * vt));
                          }));
    }
    default:
      throw ConfigError("preset '" + preset_name(p) + "' is not a 1D1V problem");
  }
}

HTTensor initial_2d(Preset p, const PresetParams& params, const SpatialGrid& x1,
                    const SpatialGrid& x2, const VelocityGrid& v1, const VelocityGrid& v2) {
  const Vector space = perturbed_2d(params, x1, x2);
  switch (p) {
    case Preset::weak_landau_2d2v: {
      const auto maxwell = [](double s) { return std::exp(-s * s / 2.0); };
      return HTTensor::product(space, sample(v1.nodes, maxwell), sample(v2.nodes, maxwell),
                               1.0 / (2.0 * kPi));
    }
    case Preset::two_stream_2d2v: {
      const double v0 = params.v0;
      const auto streams = [v0](double s) {
        return std::exp(-(s - v0) * (s - v0) / 2.0) + std::exp(-(s + v0) * (s + v0) / 2.0);
      };
      return HTTensor::product(space, sample(v1.nodes, streams), sample(v2.nodes, streams),
                               1.0 / (4.0 * 2.0 * kPi));
    }
    default:
      throw ConfigError("preset '" + preset_name(p) + "' is not a 2D2V problem");
  }
}

namespace forced {

LowRankMatrix kinetic_source(const SpatialGrid& x, const VelocityGrid& v, double t) {
  const double sp = std::sqrt(kPi);
  const Vector nodes = x.nodes();
  const Vector s2 = sample(nodes, [&](double s) { return std::sin(2.0 * s - 2.0 * kPi * t); });
  const Vector s4 = sample(nodes, [&](double s) { return std::sin(4.0 * s - 4.0 * kPi * t); });
  const Vector a = sample(v.nodes, [&](double s) {
    return ((4.0 * sp + 2.0) * s - (2.0 * kPi + sp)) * forced_gaussian(s);
  });
  const Vector b = sample(v.nodes, [&](double s) { return sp * (0.25 - s) * forced_gaussian(s); });
  return add(LowRankMatrix::outer(s2, a), LowRankMatrix::outer(s4, b));
}

MacroState macro_source(const SpatialGrid& x, double t, const ElectricField& field) {
  const double sp = std::sqrt(kPi);
  const Vector nodes = x.nodes();
  if (field.e1.size() != nodes.size()) throw DimensionError("forced source: field size mismatch");
  MacroState s = MacroState::zero(1, nodes.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    const double th = 2.0 * nodes[i] - 2.0 * kPi * t;
    const double e = field.e1[i];
    s.rho[i] = sp / 4.0 * (1.0 - 4.0 * kPi) * std::sin(th);
    s.j1[i] = sp / 16.0 * (3.0 + 4.0 * sp - 4.0 * kPi) * std::sin(th) -
              kPi / 16.0 * std::sin(2.0 * th);
    s.e[i] = sp / 128.0 * (7.0 + 8.0 * sp - 12.0 * kPi) * std::sin(th) -
             kPi / 64.0 * std::sin(2.0 * th) +
             sp / 8.0 * (2.0 - (1.0 - 4.0 * kPi) * std::cos(th)) * e;
  }
  return s;
}

LowRankMatrix exact(const SpatialGrid& x, const VelocityGrid& v, double t) {
  const Vector space =
      sample(x.nodes(), [&](double s) { return 2.0 - std::cos(2.0 * s - 2.0 * kPi * t); });
  return LowRankMatrix::outer(space, sample(v.nodes, forced_gaussian));
}

ErrorNorms error(const LowRankMatrix& f, const SpatialGrid& x, const VelocityGrid& v, double t) {
  const Matrix diff = f.dense() - exact(x, v, t).dense();
  return {diff.cwiseAbs().maxCoeff(), std::sqrt(x.h * v.h * diff.squaredNorm())};
}

}  // namespace forced

}  // namespace lomac
