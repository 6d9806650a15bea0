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

#ifndef MACAST_SVG_PLOT_HPP_
#define MACAST_SVG_PLOT_HPP_

#include <string>
#include <utility>
#include <vector>

namespace macast {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

std::string RenderLineChart(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace macast

#endif  // MACAST_SVG_PLOT_HPP_
