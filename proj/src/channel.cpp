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

#include "macast/channel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "json.hpp"
#include "macast/errors.hpp"

namespace macast {

namespace {

constexpr double kLatticeTolerance = 1e-9;

bool OnLattice(double offset, double step) {
  const double ratio = offset / step;
  return std::abs(ratio - std::round(ratio)) <= kLatticeTolerance * std::max(1.0, std::abs(ratio));
}

}  // namespace

PositionGrid::PositionGrid(std::vector<Coordinate> positions, double spacing_wavelengths,
                           double wavelength)
    : positions_(std::move(positions)),
      spacing_wavelengths_(spacing_wavelengths),
      wavelength_(wavelength) {
  if (positions_.empty()) throw std::invalid_argument("PositionGrid: no positions");
  if (!(wavelength_ > 0.0)) throw std::invalid_argument("PositionGrid: wavelength must be positive");
  if (!(spacing_wavelengths_ > 0.0)) throw std::invalid_argument("PositionGrid: spacing must be positive");

  const double step = spacing_meters();
  const Coordinate& origin = positions_.front();
  std::set<std::pair<long long, long long>> seen;
  for (const Coordinate& p : positions_) {
    if (!OnLattice(p.x - origin.x, step) || !OnLattice(p.y - origin.y, step))
      throw std::invalid_argument("PositionGrid: position off the lattice");
    const auto key = std::make_pair(std::llround((p.x - origin.x) / step),
                                    std::llround((p.y - origin.y) / step));
    if (!seen.insert(key).second) throw std::invalid_argument("PositionGrid: duplicate position");
  }
}

PositionGrid PositionGrid::Square(int side, double wavelength, double spacing_wavelengths) {
  if (side < 1) throw std::invalid_argument("PositionGrid::Square: side must be >= 1");
  const double step = spacing_wavelengths * wavelength;
  const double center = 0.5 * (side - 1);
  std::vector<Coordinate> positions;
  positions.reserve(static_cast<std::size_t>(side) * side);
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      positions.push_back({(col - center) * step, (row - center) * step});
    }
  }
  return PositionGrid(std::move(positions), spacing_wavelengths, wavelength);
}

PlacementSet::PlacementSet(std::vector<int> indices, int grid_size)
    : indices_(std::move(indices)), grid_size_(grid_size) {
  if (indices_.empty()) throw InvalidPlacement("placement must hold at least one antenna");
  if (static_cast<int>(indices_.size()) > grid_size_)
    throw InvalidPlacement("placement has more antennas than grid points");
  std::vector<int> sorted = indices_;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0 || sorted.back() >= grid_size_)
    throw InvalidPlacement("placement index out of range");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidPlacement("placement indices must be distinct");
}

bool PlacementSet::Contains(int grid_index) const {
  return std::find(indices_.begin(), indices_.end(), grid_index) != indices_.end();
}

void PlacementSet::Move(int n, int grid_index) {
  if (n < 0 || n >= size()) throw InvalidPlacement("antenna index out of range");
  if (grid_index < 0 || grid_index >= grid_size_) throw InvalidPlacement("grid index out of range");
  if (indices_[n] == grid_index) return;
  if (Contains(grid_index)) throw InvalidPlacement("grid position already occupied");
  indices_[n] = grid_index;
}

Direction PathComponent::direction() const {
  return {std::sin(theta) * std::cos(phi), std::cos(theta)};
}

UserChannelModel::UserChannelModel(std::vector<PathComponent> paths, double noise_power)
    : paths_(std::move(paths)), noise_power_(noise_power) {
  if (paths_.empty()) throw std::invalid_argument("UserChannelModel: at least one path required");
  if (!(noise_power_ > 0.0)) throw std::invalid_argument("UserChannelModel: noise power must be positive");
}

std::vector<double> Scenario::noise_powers() const {
  std::vector<double> out;
  out.reserve(users.size());
  for (const auto& u : users) out.push_back(u.noise_power());
  return out;
}

ScenarioRng::ScenarioRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6d61u};
  engine_.seed(seq);
}

double ScenarioRng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double ScenarioRng::Normal() {
  // Box-Muller; 1 - U keeps the log argument in (0, 1].
  const double u1 = 1.0 - Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Complex ScenarioRng::ComplexNormal(double variance) {
  const double scale = std::sqrt(0.5 * variance);
  const double re = Normal();
  const double im = Normal();
  return {scale * re, scale * im};
}

double DbmToWatts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double WattsToDbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double WavelengthForCarrier(double carrier_ghz) {
  if (!(carrier_ghz > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
  return kSpeedOfLight / (carrier_ghz * 1e9);
}

double PathLossDb(double carrier_ghz, double distance_km) {
  return 92.5 + 20.0 * std::log10(carrier_ghz) + 20.0 * std::log10(distance_km);
}

Coordinate SampleHexagon(ScenarioRng& rng, double radius) {
  // Flat-topped hexagon: vertices at (+-R, 0) and (+-R/2, +-sqrt(3)R/2).
  const double half_height = 0.5 * std::sqrt(3.0) * radius;
  for (;;) {
    const double x = (2.0 * rng.Uniform() - 1.0) * radius;
    const double y = (2.0 * rng.Uniform() - 1.0) * half_height;
    if (std::sqrt(3.0) * std::abs(x) + std::abs(y) <= std::sqrt(3.0) * radius) return {x, y};
  }
}

namespace {

double UserPathGain(ScenarioRng& rng, double cell_radius_m, double carrier_ghz) {
  const Coordinate ue = SampleHexagon(rng, cell_radius_m);
  const double distance_m = std::max(std::hypot(ue.x, ue.y), kMinUserDistanceM);
  return std::pow(10.0, -PathLossDb(carrier_ghz, distance_m / 1000.0) / 10.0);
}

}  // namespace

Scenario SampleScenario(ScenarioRng& rng, const ScenarioParams& params) {
  if (params.users < 1) throw std::invalid_argument("SampleScenario: need at least one user");
  if (params.paths < 1) throw std::invalid_argument("SampleScenario: need at least one path");
  if (!(params.cell_radius_m > 0.0)) throw std::invalid_argument("SampleScenario: radius must be positive");

  Scenario scenario;
  scenario.wavelength = WavelengthForCarrier(params.carrier_ghz);
  scenario.users.reserve(params.users);
  for (int k = 0; k < params.users; ++k) {
    const double mu = UserPathGain(rng, params.cell_radius_m, params.carrier_ghz);
    std::vector<PathComponent> paths;
    paths.reserve(params.paths);
    for (int l = 0; l < params.paths; ++l) {
      PathComponent path;
      path.gain = rng.ComplexNormal(mu / params.paths);
      path.theta = kPi * rng.Uniform();
      path.phi = kPi * rng.Uniform();
      paths.push_back(path);
    }
    scenario.users.emplace_back(std::move(paths), params.noise_power_w);
  }
  return scenario;
}

Scenario SampleLosTwoUserScenario(ScenarioRng& rng, double cell_radius_m, double carrier_ghz,
                                  double noise_power_w) {
  Scenario scenario;
  scenario.wavelength = WavelengthForCarrier(carrier_ghz);
  const double kappa = UserPathGain(rng, cell_radius_m, carrier_ghz);
  for (int k = 0; k < 2; ++k) {
    PathComponent path;
    path.gain = std::polar(std::sqrt(kappa), 2.0 * kPi * rng.Uniform());
    path.theta = kPi * rng.Uniform();
    path.phi = kPi * rng.Uniform();
    scenario.users.emplace_back(std::vector<PathComponent>{path}, noise_power_w);
  }
  return scenario;
}

Complex ChannelGain(const UserChannelModel& model, Coordinate position, double wavelength) {
  const double wavenumber = 2.0 * kPi / wavelength;
  Complex sum{0.0, 0.0};
  for (const PathComponent& path : model.paths()) {
    const Direction rho = path.direction();
    const double phase = wavenumber * (position.x * rho[0] + position.y * rho[1]);
    sum += path.gain * std::polar(1.0, phase);
  }
  return sum;
}

Eigen::VectorXcd ChannelVector(const UserChannelModel& model, const PlacementSet& placement,
                               const PositionGrid& grid) {
  if (placement.grid_size() != grid.size()) throw InvalidPlacement("placement built for another grid");
  Eigen::VectorXcd h(placement.size());
  for (int n = 0; n < placement.size(); ++n) {
    h(n) = ChannelGain(model, grid[placement[n]], grid.wavelength());
  }
  return h;
}

Eigen::VectorXcd SteeringVector(const Direction& direction, const PlacementSet& placement,
                                const PositionGrid& grid) {
  if (placement.grid_size() != grid.size()) throw InvalidPlacement("placement built for another grid");
  const double wavenumber = 2.0 * kPi / grid.wavelength();
  Eigen::VectorXcd a(placement.size());
  for (int n = 0; n < placement.size(); ++n) {
    const Coordinate& t = grid[placement[n]];
    a(n) = std::polar(1.0, wavenumber * (t.x * direction[0] + t.y * direction[1]));
  }
  return a;
}

Eigen::MatrixXcd ChannelMatrix(std::span<const UserChannelModel> users, const PlacementSet& placement,
                               const PositionGrid& grid) {
  Eigen::MatrixXcd h(placement.size(), static_cast<Eigen::Index>(users.size()));
  for (std::size_t k = 0; k < users.size(); ++k) {
    h.col(static_cast<Eigen::Index>(k)) = ChannelVector(users[k], placement, grid);
  }
  return h;
}

Eigen::MatrixXcd ChannelMatrixAt(std::span<const UserChannelModel> users,
                                 std::span<const Coordinate> coordinates, double wavelength) {
  Eigen::MatrixXcd h(static_cast<Eigen::Index>(coordinates.size()),
                     static_cast<Eigen::Index>(users.size()));
  for (std::size_t k = 0; k < users.size(); ++k) {
    for (std::size_t n = 0; n < coordinates.size(); ++n) {
      h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) =
          ChannelGain(users[k], coordinates[n], wavelength);
    }
  }
  return h;
}

Eigen::MatrixXcd GainTable(std::span<const UserChannelModel> users, const PositionGrid& grid) {
  return ChannelMatrixAt(users, grid.positions(), grid.wavelength());
}

std::string ScenarioToJson(const Scenario& scenario) {
  nlohmann::json doc;
  doc["wavelength"] = scenario.wavelength;
  doc["users"] = nlohmann::json::array();
  for (const UserChannelModel& user : scenario.users) {
    nlohmann::json entry;
    entry["noise_power"] = user.noise_power();
    entry["paths"] = nlohmann::json::array();
    for (const PathComponent& p : user.paths()) {
      entry["paths"].push_back({{"gain_re", p.gain.real()},
                                {"gain_im", p.gain.imag()},
                                {"theta", p.theta},
                                {"phi", p.phi}});
    }
    doc["users"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

Scenario ScenarioFromJson(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  Scenario scenario;
  scenario.wavelength = doc.at("wavelength").get<double>();
  if (!(scenario.wavelength > 0.0)) throw std::invalid_argument("scenario wavelength must be positive");
  for (const auto& entry : doc.at("users")) {
    std::vector<PathComponent> paths;
    for (const auto& p : entry.at("paths")) {
      PathComponent path;
      path.gain = {p.at("gain_re").get<double>(), p.at("gain_im").get<double>()};
      path.theta = p.at("theta").get<double>();
      path.phi = p.at("phi").get<double>();
      paths.push_back(path);
    }
    scenario.users.emplace_back(std::move(paths), entry.at("noise_power").get<double>());
  }
  if (scenario.users.empty()) throw std::invalid_argument("scenario has no users");
  return scenario;
}

}  // namespace macast
