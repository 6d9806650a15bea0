// Copyright 2026 The macast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Field-response channel synthesis over a discrete grid of candidate
// antenna positions, plus the random scenario generator used by the
// Monte Carlo harness.

#ifndef MACAST_CHANNEL_HPP_
#define MACAST_CHANNEL_HPP_

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace macast {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

// Planar coordinate in meters.
struct Coordinate {
  double x = 0.0;
  double y = 0.0;
};

// Projection of a propagation direction onto the transmit plane.
using Direction = std::array<double, 2>;

// Candidate antenna positions. Every coordinate sits on a lattice with
// step `spacing_wavelengths * wavelength` along both axes.
class PositionGrid {
 public:
  PositionGrid(std::vector<Coordinate> positions, double spacing_wavelengths,
               double wavelength);

  // side x side grid centered at the origin, enumerated row-major
  // (y outer, x inner).
  static PositionGrid Square(int side, double wavelength,
                             double spacing_wavelengths = 0.5);

  int size() const { return static_cast<int>(positions_.size()); }
  const Coordinate& operator[](int index) const { return positions_.at(index); }
  const std::vector<Coordinate>& positions() const { return positions_; }
  double spacing_wavelengths() const { return spacing_wavelengths_; }
  double spacing_meters() const { return spacing_wavelengths_ * wavelength_; }
  double wavelength() const { return wavelength_; }

 private:
  std::vector<Coordinate> positions_;
  double spacing_wavelengths_;
  double wavelength_;
};

// Ordered set of N distinct grid indices, one per antenna.
class PlacementSet {
 public:
  PlacementSet(std::vector<int> indices, int grid_size);

  int size() const { return static_cast<int>(indices_.size()); }
  int grid_size() const { return grid_size_; }
  int operator[](int n) const { return indices_.at(n); }
  const std::vector<int>& indices() const { return indices_; }
  bool Contains(int grid_index) const;

  // Moves antenna n to grid_index; throws InvalidPlacement if another
  // antenna already occupies it.
  void Move(int n, int grid_index);

  friend bool operator==(const PlacementSet&, const PlacementSet&) = default;

 private:
  std::vector<int> indices_;
  int grid_size_;
};

struct PathComponent {
  Complex gain;
  double theta = 0.0;  // elevation, radians
  double phi = 0.0;    // azimuth, radians

  // [sin(theta) cos(phi), cos(theta)]
  Direction direction() const;
};

class UserChannelModel {
 public:
  UserChannelModel(std::vector<PathComponent> paths, double noise_power);

  const std::vector<PathComponent>& paths() const { return paths_; }
  double noise_power() const { return noise_power_; }
  int path_count() const { return static_cast<int>(paths_.size()); }

 private:
  std::vector<PathComponent> paths_;
  double noise_power_;
};

// One channel realization: every user's multipath description plus the
// carrier wavelength it was generated for.
struct Scenario {
  double wavelength = 0.0;
  std::vector<UserChannelModel> users;

  std::vector<double> noise_powers() const;
};

// Deterministic random source keyed by (seed, stream). Uniform and normal
// variates are derived from raw mt19937_64 output so that realizations do
// not depend on the standard library's distribution implementations.
class ScenarioRng {
 public:
  ScenarioRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1).
  double Uniform();
  double Normal();
  // Circularly symmetric complex Gaussian with the given variance.
  Complex ComplexNormal(double variance);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

double DbmToWatts(double dbm);
double WattsToDbm(double watts);
double WavelengthForCarrier(double carrier_ghz);
// Free-space path loss in dB (positive number).
double PathLossDb(double carrier_ghz, double distance_km);

struct ScenarioParams {
  int users = 5;
  int paths = 4;
  double cell_radius_m = 150.0;
  double carrier_ghz = 5.0;
  double noise_power_w = 3.1622776601683795e-13;  // -95 dBm
};

inline constexpr double kMinUserDistanceM = 1.0;

// Uniform point in a hexagon of circumradius `radius`, centered at the origin.
Coordinate SampleHexagon(ScenarioRng& rng, double radius);

// Users uniform in the hexagonal cell, gains CN(0, mu_k / L), angles
// uniform on [0, pi).
Scenario SampleScenario(ScenarioRng& rng, const ScenarioParams& params);

// Two single-path users at a common distance (equal path loss kappa) with
// independent random phases and directions.
Scenario SampleLosTwoUserScenario(ScenarioRng& rng, double cell_radius_m,
                                  double carrier_ghz, double noise_power_w);

Complex ChannelGain(const UserChannelModel& model, Coordinate position,
                    double wavelength);

// h_k(T): one entry per antenna, in placement order.
Eigen::VectorXcd ChannelVector(const UserChannelModel& model,
                               const PlacementSet& placement,
                               const PositionGrid& grid);

Eigen::VectorXcd SteeringVector(const Direction& direction,
                                const PlacementSet& placement,
                                const PositionGrid& grid);

// N x K matrix whose column k is h_k(T).
Eigen::MatrixXcd ChannelMatrix(std::span<const UserChannelModel> users,
                               const PlacementSet& placement,
                               const PositionGrid& grid);

// Same as ChannelMatrix but at arbitrary (possibly off-grid) coordinates.
Eigen::MatrixXcd ChannelMatrixAt(std::span<const UserChannelModel> users,
                                 std::span<const Coordinate> coordinates,
                                 double wavelength);

// M x K table of h_k(p_m) for every grid point; reused by every position
// search so the per-path phases are computed once per scenario.
Eigen::MatrixXcd GainTable(std::span<const UserChannelModel> users,
                           const PositionGrid& grid);

std::string ScenarioToJson(const Scenario& scenario);
Scenario ScenarioFromJson(const std::string& text);

}  // namespace macast

#endif  // MACAST_CHANNEL_HPP_
