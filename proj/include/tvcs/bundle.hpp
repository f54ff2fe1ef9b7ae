#pragma once
// Bundle container for problems, states, and results.
//
// On-disk layout: 8-byte magic "TVCSBNDL", u64 little-endian header length,
// JSON header (format version, endianness, shape, field directory with dtype,
// count, byte offset, and fnv1a-64 checksum, string metadata), then the raw
// little-endian field blocks in directory order.  Loading verifies structure
// and every checksum before returning anything.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tvcs/grid.hpp"
#include "tvcs/mask.hpp"
#include "tvcs/phantom.hpp"

namespace tvcs {

using BundleData = std::variant<std::vector<double>, std::vector<float>,
                                std::vector<std::int64_t>, std::vector<std::complex<double>>>;

struct BundleField {
  std::string name;
  BundleData data;
};

struct Bundle {
  GridShape shape;
  std::vector<BundleField> fields;
  std::map<std::string, std::string> metadata;

  const BundleField* find(const std::string& name) const {
    for (const auto& f : fields)
      if (f.name == name) return &f;
    return nullptr;
  }
};

void save_bundle(const std::string& path, const Bundle& bundle);
Bundle load_bundle(const std::string& path);  // throws io_error, never partial

// Problem packing: truth image (optional), mask index set and measurements,
// generator provenance in metadata.
Bundle make_problem_bundle(const Phantom* truth, const SamplingMask& mask);

struct ProblemInstance {
  GridShape shape;
  std::optional<Image<double>> truth;
  SamplingMask mask;
  std::map<std::string, std::string> metadata;
};

// Validates mask indices against the shape; throws io_error on violations.
ProblemInstance unpack_problem(const Bundle& bundle);

}  // namespace tvcs
