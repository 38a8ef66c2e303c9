#include "streamflow/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "streamflow/rng.hpp"

namespace streamflow {

namespace {

using nlohmann::json;

void check_range(const Range& r, const char* name) {
  if (r.lo > r.hi)
    throw config_error(std::string("range ") + name + " has min > max");
}

Matrix matrix_from_json(const json& j, int n, const char* name) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw config_error(std::string("matrix ") + name + " must be " + std::to_string(n) + "x" +
                       std::to_string(n));
  Matrix m(n);
  for (int i = 0; i < n; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw config_error(std::string("matrix ") + name + " must be square");
    for (int k = 0; k < n; ++k) m.at(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.size(); ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Range range_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw config_error("range must be [min, max]");
  return Range{j[0].get<double>(), j[1].get<double>()};
}

void validate_catalog(const CloudCatalog& cat) {
  if (cat.clouds.empty()) throw config_error("catalog has no clouds");
  for (const auto& c : cat.clouds) {
    if (c.offers.empty()) throw config_error("cloud must have >=1 offer: " + c.id);
    for (const auto& o : c.offers) {
      if (!(o.mips > 0.0)) throw config_error("offer mips must be > 0: " + c.id + "/" + o.name);
      if (!(o.price_cents_s > 0.0))
        throw config_error("offer price must be > 0: " + c.id + "/" + o.name);
      if (o.boot_time_s < 0)
        throw config_error("offer boot_time must be >= 0: " + c.id + "/" + o.name);
    }
  }
  const int n = static_cast<int>(cat.clouds.size());
  if (cat.latency.size() != n || cat.bandwidth.size() != n || cat.transfer_cost.size() != n)
    throw config_error("network matrices must match the cloud count");
  for (int i = 0; i < n; ++i) {
    if (cat.latency.at(i, i) != 0.0) throw config_error("latency diagonal must be 0");
    if (cat.transfer_cost.at(i, i) != 0.0) throw config_error("transfer_cost diagonal must be 0");
    for (int j = 0; j < n; ++j)
      if (!(cat.bandwidth.at(i, j) > 0.0)) throw config_error("bandwidth entries must be > 0");
  }
}

}  // namespace

int CloudCatalog::cloud_index(const std::string& id) const {
  for (std::size_t i = 0; i < clouds.size(); ++i)
    if (clouds[i].id == id) return static_cast<int>(i);
  throw error("unknown cloud id: " + id);
}

std::vector<std::string> CloudCatalog::cloud_ids() const {
  std::vector<std::string> ids;
  ids.reserve(clouds.size());
  for (const auto& c : clouds) ids.push_back(c.id);
  return ids;
}

void sample_network(const NetworkRanges& ranges, std::uint64_t seed, int cloud_count,
                    Matrix* latency, Matrix* bandwidth, Matrix* transfer_cost) {
  check_range(ranges.ingress_bandwidth, "ingress_bandwidth");
  check_range(ranges.ingress_latency, "ingress_latency");
  check_range(ranges.egress_bandwidth, "egress_bandwidth");
  check_range(ranges.egress_latency, "egress_latency");
  check_range(ranges.egress_transfer_cost, "egress_transfer_cost");

  Rng rng(mix_seed(seed, 0x6e657477ull));  // "netw"
  *latency = Matrix(cloud_count);
  *bandwidth = Matrix(cloud_count);
  *transfer_cost = Matrix(cloud_count);
  for (int i = 0; i < cloud_count; ++i) {
    for (int j = 0; j < cloud_count; ++j) {
      if (i == j) {
        // Traffic staying inside a cloud: ingress figures, free transfer.
        latency->at(i, j) = 0.0;
        bandwidth->at(i, j) = rng.uniform_real(ranges.ingress_bandwidth.lo, ranges.ingress_bandwidth.hi);
        transfer_cost->at(i, j) = 0.0;
      } else {
        latency->at(i, j) = rng.uniform_real(ranges.egress_latency.lo, ranges.egress_latency.hi);
        bandwidth->at(i, j) = rng.uniform_real(ranges.egress_bandwidth.lo, ranges.egress_bandwidth.hi);
        transfer_cost->at(i, j) =
            rng.uniform_real(ranges.egress_transfer_cost.lo, ranges.egress_transfer_cost.hi);
      }
    }
  }
}

CloudCatalog parse_catalog(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("catalog file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1)
      throw config_error("unsupported catalog format_version");

    CloudCatalog cat;
    if (j.contains("boot_time_range_s")) cat.boot_time_range = range_from_json(j["boot_time_range_s"]);
    if (j.contains("boot_seed")) cat.boot_seed = j["boot_seed"].get<std::uint64_t>();

    for (const auto& jc : j.at("clouds")) {
      Cloud c;
      c.id = jc.at("id").get<std::string>();
      for (const auto& jo : jc.at("offers")) {
        VmOffer o;
        o.name = jo.at("name").get<std::string>();
        o.mips = jo.at("mips").get<double>();
        o.price_cents_s = jo.at("price_cents_s").get<double>();
        o.price_interpolated = jo.value("price_interpolated", false);
        o.boot_time_s = jo.value("boot_time_s", std::int64_t{-1});
        c.offers.push_back(std::move(o));
      }
      cat.clouds.push_back(std::move(c));
    }

    // Offers without an explicit boot time draw one from the recorded range.
    {
      check_range(cat.boot_time_range, "boot_time_range_s");
      Rng rng(mix_seed(cat.boot_seed.value_or(0), 0x626f6f74ull));  // "boot"
      for (auto& c : cat.clouds)
        for (auto& o : c.offers)
          if (o.boot_time_s < 0)
            o.boot_time_s = rng.uniform_int(static_cast<std::int64_t>(cat.boot_time_range.lo),
                                            static_cast<std::int64_t>(cat.boot_time_range.hi));
    }

    const int n = static_cast<int>(cat.clouds.size());
    const auto& jn = j.at("network");
    if (jn.contains("ranges")) {
      const auto& jr = jn["ranges"];
      if (jr.contains("ingress_bandwidth_mbps"))
        cat.ranges.ingress_bandwidth = range_from_json(jr["ingress_bandwidth_mbps"]);
      if (jr.contains("ingress_latency_s"))
        cat.ranges.ingress_latency = range_from_json(jr["ingress_latency_s"]);
      if (jr.contains("egress_bandwidth_mbps"))
        cat.ranges.egress_bandwidth = range_from_json(jr["egress_bandwidth_mbps"]);
      if (jr.contains("egress_latency_s"))
        cat.ranges.egress_latency = range_from_json(jr["egress_latency_s"]);
      if (jr.contains("egress_transfer_cost_cents_mb"))
        cat.ranges.egress_transfer_cost = range_from_json(jr["egress_transfer_cost_cents_mb"]);
    }
    if (jn.contains("latency_s")) {
      cat.latency = matrix_from_json(jn.at("latency_s"), n, "latency_s");
      cat.bandwidth = matrix_from_json(jn.at("bandwidth_mbps"), n, "bandwidth_mbps");
      cat.transfer_cost = matrix_from_json(jn.at("transfer_cost_cents_mb"), n, "transfer_cost_cents_mb");
      if (jn.contains("seed")) cat.network_seed = jn["seed"].get<std::uint64_t>();
    } else {
      if (!jn.contains("seed")) throw config_error("network needs either matrices or a seed");
      cat.network_seed = jn["seed"].get<std::uint64_t>();
      sample_network(cat.ranges, *cat.network_seed, n, &cat.latency, &cat.bandwidth,
                     &cat.transfer_cost);
    }

    validate_catalog(cat);
    return cat;
  } catch (const json::exception& e) {
    throw config_error(std::string("catalog schema error: ") + e.what());
  }
}

CloudCatalog load_catalog(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("catalog not found: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_catalog(buf.str());
}

std::string catalog_to_json(const CloudCatalog& cat) {
  json j;
  j["format_version"] = 1;
  j["boot_time_range_s"] = {cat.boot_time_range.lo, cat.boot_time_range.hi};
  if (cat.boot_seed) j["boot_seed"] = *cat.boot_seed;
  j["clouds"] = json::array();
  for (const auto& c : cat.clouds) {
    json jc;
    jc["id"] = c.id;
    jc["offers"] = json::array();
    for (const auto& o : c.offers) {
      json jo;
      jo["name"] = o.name;
      jo["mips"] = o.mips;
      jo["price_cents_s"] = o.price_cents_s;
      jo["boot_time_s"] = o.boot_time_s;
      if (o.price_interpolated) jo["price_interpolated"] = true;
      jc["offers"].push_back(std::move(jo));
    }
    j["clouds"].push_back(std::move(jc));
  }
  json jn;
  jn["ranges"] = {
      {"ingress_bandwidth_mbps", {cat.ranges.ingress_bandwidth.lo, cat.ranges.ingress_bandwidth.hi}},
      {"ingress_latency_s", {cat.ranges.ingress_latency.lo, cat.ranges.ingress_latency.hi}},
      {"egress_bandwidth_mbps", {cat.ranges.egress_bandwidth.lo, cat.ranges.egress_bandwidth.hi}},
      {"egress_latency_s", {cat.ranges.egress_latency.lo, cat.ranges.egress_latency.hi}},
      {"egress_transfer_cost_cents_mb",
       {cat.ranges.egress_transfer_cost.lo, cat.ranges.egress_transfer_cost.hi}},
  };
  if (cat.network_seed) jn["seed"] = *cat.network_seed;
  jn["latency_s"] = matrix_to_json(cat.latency);
  jn["bandwidth_mbps"] = matrix_to_json(cat.bandwidth);
  jn["transfer_cost_cents_mb"] = matrix_to_json(cat.transfer_cost);
  j["network"] = std::move(jn);
  return j.dump(2) + "\n";
}

void save_catalog(const CloudCatalog& cat, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw config_error("cannot write catalog file: " + path);
  f << catalog_to_json(cat);
}

}  // namespace streamflow
