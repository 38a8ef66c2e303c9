#pragma once

#include <string>
#include <vector>

#include "streamflow/catalog.hpp"
#include "streamflow/workflow.hpp"

namespace streamflow::testing {

// Two clouds joined by a link with pinned figures, one configurable offer per
// cloud. Keeps transfer arithmetic by hand checkable.
inline CloudCatalog two_cloud_catalog(double bandwidth = 122.0, double latency = 0.021,
                                      double transfer = 0.013, double mips = 7000.0,
                                      double price = 0.0054) {
  CloudCatalog cat;
  cat.clouds = {Cloud{"west", {VmOffer{"w.1", mips, price, 50, false}}},
                Cloud{"east", {VmOffer{"e.1", mips, price, 50, false}}}};
  cat.latency = Matrix(2);
  cat.bandwidth = Matrix(2, 700.0);
  cat.transfer_cost = Matrix(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (i != j) {
        cat.latency.at(i, j) = latency;
        cat.bandwidth.at(i, j) = bandwidth;
        cat.transfer_cost.at(i, j) = transfer;
      }
  return cat;
}

inline StreamWorkflow two_service_line(std::int64_t source_units, double gamma_a,
                                       double mi = 2000.0) {
  StreamWorkflow wf;
  wf.name = "line2";
  wf.services = {{"a", mi, gamma_a, Mobility::movable, ""},
                 {"b", mi, 0.5, Mobility::movable, ""}};
  wf.external_sources = {{"ex0", source_units, "west"}};
  wf.edges = {{"ex0", "a", 1.0, EdgeMode::replica}, {"a", "b", 1.0, EdgeMode::replica}};
  return wf;
}

}  // namespace streamflow::testing
