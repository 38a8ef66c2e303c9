#pragma once

#include <stdexcept>
#include <string>

namespace streamflow {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input files, schema violations, invalid parameters. CLI exit code 2.
struct config_error : error {
  using error::error;
};

// No feasible provisioning exists for some service. CLI exit code 3.
struct unschedulable_error : error {
  using error::error;
};

}  // namespace streamflow
