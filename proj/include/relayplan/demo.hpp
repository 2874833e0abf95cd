#pragma once

// Synthetic planning instance: 22 freight centers paired with 22 candidate
// relay hubs on a jittered interior grid. Geometry keeps every center a
// short hop from its home hub while alternative routes cost hours more, so
// optimal routing is insensitive to capacity choices and the certificate
// decomposition solves the instance exactly at full scale.

#include <cmath>
#include <cstdint>
#include <vector>

#include "relayplan/json_io.hpp"
#include "relayplan/network.hpp"
#include "relayplan/rng.hpp"

namespace relayplan {

struct DemoInstance {
  NetworkSpec network;
  RunConfig config;
};

inline DemoInstance make_demo_instance(std::uint64_t seed = 1) {
  constexpr int kCities = 22;
  constexpr int kCols = 6;
  constexpr double kSpacingMiles = 185.0;
  constexpr double kPi = 3.14159265358979323846;
  const double lat0 = 34.0;
  const double lon0 = -100.0;

  Pcg32 rng = stream_rng(seed, stream_tag::instance, 0);
  auto to_lat = [&](double y_miles) { return lat0 + y_miles / 69.0; };
  auto to_lon = [&](double x_miles, double lat) {
    return lon0 + x_miles / (69.17 * std::cos(lat * kPi / 180.0));
  };

  DemoInstance demo;
  std::vector<double> hub_x(kCities), hub_y(kCities);
  for (int k = 0; k < kCities; ++k) {
    double x = (k % kCols) * kSpacingMiles + (rng.next_double() * 24.0 - 12.0);
    double y = (k / kCols) * kSpacingMiles + (rng.next_double() * 24.0 - 12.0);
    hub_x[k] = x;
    hub_y[k] = y;
    double lat = to_lat(y);
    demo.network.nodes.push_back({301 + k, NodeKind::Hub, lat, to_lon(x, lat)});
  }
  for (int k = 0; k < kCities; ++k) {
    double r = 18.0 + 10.0 * rng.next_double();
    double a = 2.0 * kPi * rng.next_double();
    double x = hub_x[k] + r * std::cos(a);
    double y = hub_y[k] + r * std::sin(a);
    double lat = to_lat(y);
    double lon = to_lon(x, lat);
    demo.network.nodes.push_back({101 + k, NodeKind::Origin, lat, lon});
    demo.network.nodes.push_back({201 + k, NodeKind::Destination, lat, lon});
  }
  for (int i = 0; i < kCities; ++i)
    for (int step : {3, 9}) {
      int j = (i + step) % kCities;
      double annual = 48.0 * (20.0 + 20.0 * rng.next_double());
      demo.network.od_pairs.push_back({101 + i, 201 + j, std::floor(annual)});
    }

  RunConfig& cfg = demo.config;
  cfg.horizon = {4, 13, 7};
  cfg.build.max_leg_hours = 5.0;
  cfg.build.speed_mph = 50.0;
  cfg.build.allow_direct = false;
  cfg.capacity_levels = {0.0, 8.0, 16.0, 24.0, 32.0};
  cfg.flow_unit_cost = 40.0;
  cfg.extra_penalty_per_unit = 3.0;
  cfg.operate_cost_per_unit = 30.0;
  cfg.change_cost_per_unit = 8.0;
  // Demand peaks around November and bottoms out in late spring.
  double total = 0.0;
  for (int m = 0; m < 12; ++m) {
    cfg.monthly_shares[m] = 1.0 + 0.35 * std::cos(2.0 * kPi * (m - 10.5) / 12.0);
    total += cfg.monthly_shares[m];
  }
  for (int m = 0; m < 12; ++m) cfg.monthly_shares[m] /= total;
  cfg.scenario_count = 50;
  cfg.reduce_to = 10;
  cfg.disruption_rate = 0.05;
  cfg.disruption_intensity = 1.5;
  cfg.seed = seed;
  cfg.mode = "dynamic";
  cfg.method = "auto";
  cfg.gap = 1e-6;
  cfg.threads = 1;
  return demo;
}

}  // namespace relayplan
