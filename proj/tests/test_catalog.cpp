#include <string>

#include "doctest.h"
#include "streamflow/catalog.hpp"

using namespace streamflow;

namespace {
const std::string kDefaultCatalog =
    std::string(STREAMFLOW_REPO_DIR) + "/catalog/multicloud-default.json";
}

TEST_CASE("default catalog matches the modelled clouds") {
  const CloudCatalog cat = load_catalog(kDefaultCatalog);
  REQUIRE(cat.clouds.size() == 3);
  int offers = 0;
  for (const auto& c : cat.clouds) offers += static_cast<int>(c.offers.size());
  CHECK(offers == 40);

  const int amazon = cat.cloud_index("amazon");
  const auto& m4l = cat.clouds[static_cast<std::size_t>(amazon)].offers[0];
  CHECK(m4l.name == "m4.large");
  CHECK(m4l.mips == 7000.0);
  CHECK(m4l.price_cents_s == doctest::Approx(0.0054));

  const int google = cat.cloud_index("google");
  const auto& n1 = cat.clouds[static_cast<std::size_t>(google)].offers[0];
  CHECK(n1.name == "n1-standard-1");
  CHECK(n1.mips == 2750.0);
  CHECK(n1.price_cents_s == doctest::Approx(0.0014));

  // The one filled-in price cell is marked as such.
  bool found = false;
  for (const auto& o : cat.clouds[static_cast<std::size_t>(amazon)].offers)
    if (o.name == "m4.4xlarge") {
      found = true;
      CHECK(o.price_interpolated);
      CHECK(o.price_cents_s == doctest::Approx(0.0427));
    }
  CHECK(found);

  // Boot times resolved from the recorded range and seed.
  for (const auto& c : cat.clouds)
    for (const auto& o : c.offers) {
      CHECK(o.boot_time_s >= 30);
      CHECK(o.boot_time_s <= 100);
    }
}

TEST_CASE("a cloud without offers is rejected") {
  const char* text = R"({
    "format_version": 1,
    "clouds": [{"id": "solo", "offers": []}],
    "network": {"seed": 1}
  })";
  CHECK_THROWS_WITH_AS(parse_catalog(text), doctest::Contains(">=1 offer"), config_error);
}

TEST_CASE("schema violations name the offending field") {
  const char* text = R"({
    "format_version": 1,
    "clouds": [{"id": "solo", "offers": [{"name": "tiny", "mips": 0, "price_cents_s": 0.1}]}],
    "network": {"seed": 1}
  })";
  CHECK_THROWS_WITH_AS(parse_catalog(text), doctest::Contains("mips"), config_error);
}

TEST_CASE("sample_network draws inside the declared ranges") {
  const NetworkRanges ranges;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    Matrix lat, bw, cost;
    sample_network(ranges, seed, 3, &lat, &bw, &cost);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) {
          CHECK(lat.at(i, j) == 0.0);
          CHECK(cost.at(i, j) == 0.0);
          CHECK(bw.at(i, j) >= 615.0);
          CHECK(bw.at(i, j) <= 926.0);
        } else {
          CHECK(bw.at(i, j) >= 122.0);
          CHECK(bw.at(i, j) <= 218.0);
          CHECK(lat.at(i, j) >= 0.021);
          CHECK(lat.at(i, j) <= 0.031);
          CHECK(cost.at(i, j) >= 0.013);
          CHECK(cost.at(i, j) <= 0.019);
        }
      }
    }
  }
}

TEST_CASE("sample_network is deterministic per seed") {
  const NetworkRanges ranges;
  Matrix lat1, bw1, cost1, lat2, bw2, cost2;
  sample_network(ranges, 42, 3, &lat1, &bw1, &cost1);
  sample_network(ranges, 42, 3, &lat2, &bw2, &cost2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(lat1.at(i, j) == lat2.at(i, j));
      CHECK(bw1.at(i, j) == bw2.at(i, j));
      CHECK(cost1.at(i, j) == cost2.at(i, j));
    }
}

TEST_CASE("sample_network rejects inverted ranges") {
  NetworkRanges ranges;
  ranges.egress_bandwidth = {218.0, 122.0};
  Matrix lat, bw, cost;
  CHECK_THROWS_AS(sample_network(ranges, 1, 3, &lat, &bw, &cost), config_error);
}

TEST_CASE("catalog save/load round-trips to identical values") {
  const CloudCatalog cat = load_catalog(kDefaultCatalog);
  const std::string text = catalog_to_json(cat);
  const CloudCatalog back = parse_catalog(text);
  REQUIRE(back.clouds.size() == cat.clouds.size());
  for (std::size_t c = 0; c < cat.clouds.size(); ++c) {
    CHECK(back.clouds[c].id == cat.clouds[c].id);
    REQUIRE(back.clouds[c].offers.size() == cat.clouds[c].offers.size());
    for (std::size_t o = 0; o < cat.clouds[c].offers.size(); ++o) {
      CHECK(back.clouds[c].offers[o].name == cat.clouds[c].offers[o].name);
      CHECK(back.clouds[c].offers[o].mips == cat.clouds[c].offers[o].mips);
      CHECK(back.clouds[c].offers[o].price_cents_s == cat.clouds[c].offers[o].price_cents_s);
      CHECK(back.clouds[c].offers[o].boot_time_s == cat.clouds[c].offers[o].boot_time_s);
    }
  }
  const int n = cat.latency.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CHECK(back.latency.at(i, j) == cat.latency.at(i, j));
      CHECK(back.bandwidth.at(i, j) == cat.bandwidth.at(i, j));
      CHECK(back.transfer_cost.at(i, j) == cat.transfer_cost.at(i, j));
    }
  // Serializing the reloaded catalog is byte-stable.
  CHECK(catalog_to_json(back) == text);
}
