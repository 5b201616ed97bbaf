#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "attnalloc/allocator.hpp"
#include "attnalloc/errors.hpp"
#include "attnalloc/qoe.hpp"
#include "attnalloc/random.hpp"

using namespace attnalloc;

TEST_CASE("connection coefficient examples") {
  CHECK(connection_coefficient(1.0, {1.0, 0.0}) == 1.0);
  CHECK(connection_coefficient(2.0, {10.0, 0.5}) == 10.0);
  CHECK(connection_coefficient(0.7, {3.0, 0.0}) == 0.7 * 3.0);
}

TEST_CASE("qoe examples") {
  const LinkParams unit{1.0, 0.0};
  const std::vector<double> w1{1.0};
  const std::vector<double> c1{std::numbers::e};
  CHECK(qoe(w1, c1, unit) == 1.0);

  const std::vector<double> w2{2.0, 3.0};
  const double e2 = std::exp(2.0);
  const std::vector<double> c2{e2, e2};
  CHECK(qoe(w2, c2, unit) == doctest::Approx(10.0).epsilon(1e-15));

  const std::vector<double> c3{20.0, 25.0};
  CHECK(qoe(w2, c3, {1.0, 0.5}) == 0.5 * qoe(w2, c3, unit));
}

TEST_CASE("qoe domain errors") {
  const LinkParams unit{1.0, 0.0};
  const std::vector<double> w{1.0, 2.0};
  CHECK_THROWS_AS(qoe(w, std::vector<double>{15.0, 1.0}, unit), DomainError);
  CHECK_THROWS_AS(qoe(w, std::vector<double>{15.0, 0.5}, unit), DomainError);
  CHECK_THROWS_AS(qoe(w, std::vector<double>{15.0}, unit), DomainError);
  CHECK_THROWS_AS(qoe(std::vector<double>{}, std::vector<double>{}, unit), DomainError);
  CHECK_THROWS_AS(qoe(std::vector<double>{0.0, 1.0}, std::vector<double>{15.0, 15.0}, unit), DomainError);
  CHECK_THROWS_AS(qoe(w, std::vector<double>{15.0, 15.0}, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(qoe(w, std::vector<double>{15.0, 15.0}, {1.0, 1.0}), DomainError);
}

TEST_CASE("qoe properties") {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 20));
    std::vector<double> w, c;
    for (int i = 0; i < n; ++i) {
      w.push_back(rng.uniform(0.01, 5.0));
      c.push_back(rng.uniform(1.01, 60.0));
    }
    const LinkParams link{rng.uniform(0.5, 100.0), rng.uniform(0.0, 0.9)};
    const double base = qoe(w, c, link);

    // strictly increasing in each capacity
    const auto i = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
    auto more = c;
    more[i] += 1.0;
    CHECK(qoe(w, more, link) > base);

    // linear in the link factor; a power-of-two scale keeps it exact
    CHECK(qoe(w, c, {link.downlink_rate * 4.0, link.uplink_ber}) == 4.0 * base);
    CHECK(qoe(w, c, {link.downlink_rate * 3.0, link.uplink_ber}) == doctest::Approx(3.0 * base).epsilon(1e-12));

    // permuting (w, c) pairs together
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<double> pw, pc;
    for (int p : perm) {
      pw.push_back(w[static_cast<std::size_t>(p)]);
      pc.push_back(c[static_cast<std::size_t>(p)]);
    }
    CHECK(qoe(pw, pc, link) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("equal weights are best served by equal capacities") {
  Rng rng(3);
  const LinkParams link{2.0, 0.1};
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 12));
    const double budget = n * rng.uniform(16.0, 40.0);
    const std::vector<double> w(static_cast<std::size_t>(n), 1.7);
    const auto best = allocate_weighted({w, budget, 15.0});
    for (double c : best.capacities) CHECK(c == doctest::Approx(budget / n).epsilon(1e-14));
    const double optimum = qoe(w, best.capacities, link);

    // any feasible perturbation does no better
    auto other = best.capacities;
    const double delta = rng.uniform(0.0, budget / n - 15.0);
    other[0] += delta;
    other[1] -= delta;
    CHECK(qoe(w, other, link) <= optimum + 1e-12);
  }
}

TEST_CASE("channel model examples") {
  ChannelConfig cfg;
  cfg.bandwidth = 1.0;
  cfg.tx_power = 3.0;
  cfg.distance = 1.0;
  cfg.tx_antennas = 1;
  cfg.rx_antennas = 1;
  cfg.interference_power = 1.0;
  cfg.noise_psd = 1e-300;
  CHECK(channel_sinr(cfg) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(link_from_channel(cfg).downlink_rate == doctest::Approx(2.0).epsilon(1e-15));

  ChannelConfig loss;
  CHECK(loss.tx_power * std::pow(loss.distance, -loss.path_loss_exponent) == doctest::Approx(0.01).epsilon(1e-15));

  // the default is the figure's parameter set
  const ChannelConfig fig;
  CHECK(fig.tx_antennas == 6);
  CHECK(fig.rx_antennas == 7);
  CHECK(fig.interference_power == doctest::Approx(dbw_to_watts(1.0)).epsilon(1e-15));
  const auto link = link_from_channel(fig);
  CHECK(std::isfinite(link.downlink_rate));
  CHECK(link.downlink_rate > 0.0);
  CHECK(link.uplink_ber > 0.0);
  CHECK(link.uplink_ber < 1.0);
  // six antennas at 0.01 W received over ~1.2589 W interference
  CHECK(channel_sinr(fig) == doctest::Approx(0.06 / (dbw_to_watts(1.0) + 3.981071705534973e-21 * 1e6)).epsilon(1e-14));

  ChannelConfig up = fig;
  up.uplink_sinr = 100.0;
  CHECK(link_from_channel(up).uplink_ber < link.uplink_ber);
  CHECK(link_from_channel(up).downlink_rate == link.downlink_rate);
}

TEST_CASE("dBW conversion and Q function") {
  CHECK(dbw_to_watts(0.0) == 1.0);
  CHECK(dbw_to_watts(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(dbw_to_watts(1.0) == doctest::Approx(1.2589254117941673).epsilon(1e-15));
  CHECK(dbw_to_watts(-174.0 - 30.0) == doctest::Approx(3.981071705534973e-21).epsilon(1e-12));
  CHECK(gaussian_q(0.0) == 0.5);
  CHECK(gaussian_q(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
}

TEST_CASE("channel validation") {
  ChannelConfig cfg;
  cfg.path_loss_exponent = 0.5;
  CHECK_THROWS_AS(channel_sinr(cfg), DomainError);
  cfg = ChannelConfig{};
  cfg.rx_antennas = 0;
  CHECK_THROWS_AS(link_from_channel(cfg), DomainError);
}
