#pragma once

#include "lomac/field.hpp"
#include "lomac/grid.hpp"
#include "lomac/ht.hpp"
#include "lomac/lowrank.hpp"
#include "lomac/macro.hpp"

#include <string>
#include <string_view>

namespace lomac {

enum class Preset {
  forced,
  weak_landau_1d,
  strong_landau_1d,
  bump_on_tail,
  weak_landau_2d2v,
  two_stream_2d2v,
};

Preset parse_preset(std::string_view name);
std::string preset_name(Preset p);
int preset_dims(Preset p);

// Physical parameters of the initial data.
struct PresetParams {
  double alpha = 0.0;
  double k = 0.5;
  double v0 = 0.0;
};

// Periodic spatial interval of a preset.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval preset_domain(Preset p, const PresetParams& params);

LowRankMatrix initial_1d(Preset p, const PresetParams& params, const SpatialGrid& x,
                         const VelocityGrid& v);
HTTensor initial_2d(Preset p, const PresetParams& params, const SpatialGrid& x1,
                    const SpatialGrid& x2, const VelocityGrid& v1, const VelocityGrid& v2);

// Manufactured forcing problem on [-pi, pi) x [-L, L].
namespace forced {

// Kinetic source psi(x, v, t), rank 2.
LowRankMatrix kinetic_source(const SpatialGrid& x, const VelocityGrid& v, double t);

// Sources of the (rho, J, e) system that are not already rho * E. The
// energy source depends on the computed field.
MacroState macro_source(const SpatialGrid& x, double t, const ElectricField& field);

// Exact distribution (2 - cos(2x - 2 pi t)) exp(-(4v - 1)^2 / 4), rank 1.
LowRankMatrix exact(const SpatialGrid& x, const VelocityGrid& v, double t);

struct ErrorNorms {
  double linf = 0.0;
  // sqrt(h_x h_v sum e^2)
  double l2 = 0.0;
};

ErrorNorms error(const LowRankMatrix& f, const SpatialGrid& x, const VelocityGrid& v, double t);

}  // namespace forced

}  // namespace lomac
