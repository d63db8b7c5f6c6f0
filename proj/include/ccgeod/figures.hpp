#pragma once

#include <string>
#include <vector>

#include "ccgeod/integrate.hpp"

namespace ccgeod {

struct FigureOptions {
  std::vector<double> epsilon_list{0.0, 0.5, 1.0};
  std::string out_dir = ".";
  IntegratorConfig cfg;
};

// Figure 1: fans of five geodesics shot from (x, y) = (0, 1) with initial
// angles {0, +-pi/8, +-pi/4} off the downward vertical, one file per (eps,
// angle), sampled on a geometric y-grid from 1 to 1e-4.
// Figure 2: five geodesics per eps shot from the boundary point 0 with
// prescribed quadratic coefficients u in {0, +-0.5, +-1}.
// Figure 3: the eps = 1 curves of figure 2 on y in [1e-4, 1e-1] together
// with the asymptotes x = -(1/2) y^2 log y + u y^2 on the same grid.
// Returns the written file paths.
std::vector<std::string> figure_data(int figure_id, const FigureOptions& options);

// (y, x) samples of a shot trajectory on a decreasing y-grid, linear
// interpolation between recorded samples.  Used by the figure writers and
// the figure-facing tests.
std::vector<std::pair<double, double>> resample_curve(const Trajectory& arclength_part,
                                                      const Trajectory& tau_part,
                                                      const std::vector<double>& y_grid);

std::vector<double> geometric_grid(double y_hi, double y_lo, int points_per_decade = 60);

}  // namespace ccgeod
