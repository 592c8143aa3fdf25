// Minimal library use: one ideal link point and the receive pattern summary.
#include <iostream>

#include "deepspace/deepspace.hpp"

int main() {
  using namespace deepspace;
  ScenarioConfig c;  // defaults: 10 GHz, 500 W, kappa = 0, no bodies
  c.plasma.alpha = 8;
  c.steering = SteeringPolicy::unbounded_ideal;

  const LinkModel model(c, false);
  std::cout << "cells: " << model.antenna().geometry().total_cells() << "\n";
  std::cout << "peak gain: " << db10(model.antenna().peak_gain()) << " dBi\n";

  const PointResult p = run_point(c, model, 0);
  std::cout << "mean SE: " << p.mean_se << " +- " << p.ci99_half << " (bit/s)/Hz over " << p.samples
            << " samples\n";

  c.steering = SteeringPolicy::none;
  c.kappa1 = c.kappa2 = 1e-8;
  const PointResult q = run_point(c, model, 0);
  std::cout << "no steering, kappa=1e-8: " << q.mean_se << " (bit/s)/Hz\n";
}
