#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streamflow/errors.hpp"

namespace streamflow {

struct VmOffer {
  std::string name;
  double mips = 0.0;           // total compute rate
  double price_cents_s = 0.0;  // provisioning cost per second
  std::int64_t boot_time_s = 0;
  bool price_interpolated = false;  // price cell was filled in, not sourced
};

struct Cloud {
  std::string id;
  std::vector<VmOffer> offers;
};

// Dense square matrix keyed by cloud index.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n, double fill = 0.0)
      : n_(n), v_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}
  int size() const { return n_; }
  double& at(int i, int j) { return v_[static_cast<std::size_t>(i) * n_ + j]; }
  double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * n_ + j]; }

 private:
  int n_ = 0;
  std::vector<double> v_;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct NetworkRanges {
  Range ingress_bandwidth{615.0, 926.0};      // MB/s, intra-cloud
  Range ingress_latency{0.00064, 0.00086};    // seconds
  Range egress_bandwidth{122.0, 218.0};       // MB/s, inter-cloud
  Range egress_latency{0.021, 0.031};         // seconds
  Range egress_transfer_cost{0.013, 0.019};   // cents/MB; ingress traffic is free
};

struct CloudCatalog {
  std::vector<Cloud> clouds;
  Matrix latency;        // seconds
  Matrix bandwidth;      // MB/s
  Matrix transfer_cost;  // cents/MB

  // Provenance, kept so a saved catalog reloads to identical values.
  NetworkRanges ranges;
  std::optional<std::uint64_t> network_seed;
  Range boot_time_range{30.0, 100.0};
  std::optional<std::uint64_t> boot_seed;

  int cloud_index(const std::string& id) const;  // throws error on unknown id
  const VmOffer& offer(int cloud, int offer) const {
    return clouds[static_cast<std::size_t>(cloud)].offers[static_cast<std::size_t>(offer)];
  }
  std::vector<std::string> cloud_ids() const;
};

// Deterministic per seed. Intra-cloud entries (diagonal) draw from the ingress
// ranges with zero transfer cost; inter-cloud entries draw from the egress
// ranges. Throws config_error when a range has lo > hi.
void sample_network(const NetworkRanges& ranges, std::uint64_t seed, int cloud_count,
                    Matrix* latency, Matrix* bandwidth, Matrix* transfer_cost);

// Catalog file format (JSON, format_version 1). Matrices may be inline or
// described by ranges plus a seed; boot times may be explicit per offer or
// sampled from boot_time_range with boot_seed. Invariants are checked and
// violations raise config_error naming the offending field.
CloudCatalog load_catalog(const std::string& path);
CloudCatalog parse_catalog(const std::string& json_text);
std::string catalog_to_json(const CloudCatalog& cat);
void save_catalog(const CloudCatalog& cat, const std::string& path);

}  // namespace streamflow
