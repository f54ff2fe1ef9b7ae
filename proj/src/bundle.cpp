#include "tvcs/bundle.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "tvcs/util.hpp"

namespace tvcs {

namespace {

using json = nlohmann::ordered_json;

constexpr char kMagic[8] = {'T', 'V', 'C', 'S', 'B', 'N', 'D', 'L'};
constexpr int kFormatVersion = 1;

struct RawView {
  const char* ptr;
  std::size_t bytes;
};

const char* dtype_of(const BundleData& d) {
  switch (d.index()) {
    case 0: return "f64";
    case 1: return "f32";
    case 2: return "i64";
    default: return "c128";
  }
}

std::size_t elem_size(const std::string& dt) {
  if (dt == "f64") return 8;
  if (dt == "f32") return 4;
  if (dt == "i64") return 8;
  if (dt == "c128") return 16;
  throw io_error("bundle: unknown dtype " + dt);
}

RawView raw_view(const BundleData& d) {
  return std::visit(
      [](const auto& v) {
        using T = typename std::decay_t<decltype(v)>::value_type;
        return RawView{reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T)};
      },
      d);
}

std::string hex64(std::uint64_t x) {
  char b[19];
  std::snprintf(b, sizeof b, "0x%016llx", static_cast<unsigned long long>(x));
  return b;
}

std::string fmt_g17(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

}  // namespace

void save_bundle(const std::string& path, const Bundle& bundle) {
  json hdr;
  hdr["format_version"] = kFormatVersion;
  hdr["endianness"] = "little";
  hdr["shape"] = std::vector<int>(bundle.shape.n.begin(), bundle.shape.n.begin() + bundle.shape.d);
  json dir = json::array();
  std::uint64_t offset = 0;
  for (const auto& f : bundle.fields) {
    RawView v = raw_view(f.data);
    json e;
    e["name"] = f.name;
    e["dtype"] = dtype_of(f.data);
    e["count"] = std::visit([](const auto& vec) { return std::uint64_t(vec.size()); }, f.data);
    e["offset"] = offset;
    e["fnv64"] = hex64(fnv1a64(v.ptr, v.bytes));
    dir.push_back(std::move(e));
    offset += v.bytes;
  }
  hdr["fields"] = std::move(dir);
  hdr["metadata"] = bundle.metadata;
  const std::string h = hdr.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("bundle: cannot open for writing: " + path);
  out.write(kMagic, 8);
  unsigned char lb[8];
  for (int i = 0; i < 8; ++i) lb[i] = static_cast<unsigned char>((h.size() >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(lb), 8);
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (const auto& f : bundle.fields) {
    RawView v = raw_view(f.data);
    out.write(v.ptr, static_cast<std::streamsize>(v.bytes));
  }
  out.flush();
  if (!out) throw io_error("bundle: write failed: " + path);
}

Bundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("bundle: cannot open: " + path);
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 16) throw io_error("bundle: truncated file (no header)");
  if (std::memcmp(buf.data(), kMagic, 8) != 0) throw io_error("bundle: bad magic");
  std::uint64_t hlen = 0;
  for (int i = 0; i < 8; ++i)
    hlen |= std::uint64_t(static_cast<unsigned char>(buf[8 + i])) << (8 * i);
  if (16 + hlen > buf.size()) throw io_error("bundle: truncated file (header)");

  json hdr;
  try {
    hdr = json::parse(buf.begin() + 16, buf.begin() + 16 + static_cast<std::ptrdiff_t>(hlen));
  } catch (const json::exception& e) {
    throw io_error(std::string("bundle: malformed header: ") + e.what());
  }
  try {
    if (hdr.at("format_version").get<int>() != kFormatVersion)
      throw io_error("bundle: unsupported format version");
    if (hdr.at("endianness").get<std::string>() != "little")
      throw io_error("bundle: unsupported endianness");

    Bundle bundle;
    std::vector<int> dims = hdr.at("shape").get<std::vector<int>>();
    try {
      bundle.shape = GridShape(dims);
    } catch (const std::invalid_argument& e) {
      throw io_error(std::string("bundle: bad shape: ") + e.what());
    }
    if (hdr.contains("metadata"))
      for (const auto& [k, v] : hdr.at("metadata").items())
        bundle.metadata[k] = v.get<std::string>();

    const char* payload = buf.data() + 16 + hlen;
    const std::size_t payload_bytes = buf.size() - 16 - hlen;
    for (const auto& e : hdr.at("fields")) {
      BundleField f;
      f.name = e.at("name").get<std::string>();
      const std::string dt = e.at("dtype").get<std::string>();
      const std::uint64_t count = e.at("count").get<std::uint64_t>();
      const std::uint64_t offset = e.at("offset").get<std::uint64_t>();
      const std::uint64_t bytes = count * elem_size(dt);
      if (offset + bytes > payload_bytes)
        throw io_error("bundle: truncated file (field " + f.name + ")");
      const std::uint64_t want = std::strtoull(e.at("fnv64").get<std::string>().c_str(), nullptr, 16);
      if (fnv1a64(payload + offset, bytes) != want)
        throw io_error("bundle: checksum mismatch in field " + f.name);
      if (dt == "f64") {
        std::vector<double> v(count);
        std::memcpy(v.data(), payload + offset, bytes);
        f.data = std::move(v);
      } else if (dt == "f32") {
        std::vector<float> v(count);
        std::memcpy(v.data(), payload + offset, bytes);
        f.data = std::move(v);
      } else if (dt == "i64") {
        std::vector<std::int64_t> v(count);
        std::memcpy(v.data(), payload + offset, bytes);
        f.data = std::move(v);
      } else {
        std::vector<std::complex<double>> v(count);
        std::memcpy(v.data(), payload + offset, bytes);
        f.data = std::move(v);
      }
      bundle.fields.push_back(std::move(f));
    }
    return bundle;
  } catch (const json::exception& e) {
    throw io_error(std::string("bundle: malformed header: ") + e.what());
  }
}

Bundle make_problem_bundle(const Phantom* truth, const SamplingMask& mask) {
  Bundle b;
  b.shape = mask.shape;
  if (truth) {
    if (truth->image.shape != mask.shape)
      throw std::invalid_argument("problem bundle: phantom/mask shape mismatch");
    b.fields.push_back({"truth", truth->image.v});
    b.metadata["phantom_name"] = truth->name;
    b.metadata["phantom_variant"] = truth->variant;
  }
  b.fields.push_back({"omega", std::vector<std::int64_t>(mask.omega.begin(), mask.omega.end())});
  b.fields.push_back({"b", mask.b});
  b.metadata["kind"] = "problem";
  b.metadata["fraction"] = fmt_g17(mask.fraction);
  b.metadata["mask_seed"] = std::to_string(mask.seed);
  b.metadata["symmetric"] = mask.symmetric ? "1" : "0";
  return b;
}

ProblemInstance unpack_problem(const Bundle& bundle) {
  ProblemInstance p;
  p.shape = bundle.shape;
  p.metadata = bundle.metadata;
  const index_t nn = p.shape.size();

  const BundleField* fo = bundle.find("omega");
  if (!fo || !std::holds_alternative<std::vector<std::int64_t>>(fo->data))
    throw io_error("bundle: missing omega index field");
  const BundleField* fb = bundle.find("b");
  if (!fb || !std::holds_alternative<std::vector<std::complex<double>>>(fb->data))
    throw io_error("bundle: missing measured data field");
  const auto& om = std::get<std::vector<std::int64_t>>(fo->data);
  const auto& bb = std::get<std::vector<std::complex<double>>>(fb->data);
  if (om.size() != bb.size()) throw io_error("bundle: omega/b size mismatch");
  if (om.empty() || om[0] != 0) throw io_error("bundle: mask must contain the zero frequency");
  for (std::size_t i = 0; i < om.size(); ++i) {
    if (om[i] < 0 || om[i] >= nn) throw io_error("bundle: mask index out of range");
    if (i > 0 && om[i] <= om[i - 1])
      throw io_error("bundle: mask indices must be strictly increasing");
  }
  p.mask.shape = p.shape;
  p.mask.omega.assign(om.begin(), om.end());
  p.mask.b.assign(bb.begin(), bb.end());
  if (auto it = bundle.metadata.find("fraction"); it != bundle.metadata.end())
    p.mask.fraction = std::strtod(it->second.c_str(), nullptr);
  if (auto it = bundle.metadata.find("mask_seed"); it != bundle.metadata.end())
    p.mask.seed = std::strtoull(it->second.c_str(), nullptr, 10);
  if (auto it = bundle.metadata.find("symmetric"); it != bundle.metadata.end())
    p.mask.symmetric = it->second != "0";

  if (const BundleField* ft = bundle.find("truth")) {
    if (!std::holds_alternative<std::vector<double>>(ft->data))
      throw io_error("bundle: truth field must be f64");
    const auto& tv = std::get<std::vector<double>>(ft->data);
    if (tv.size() != static_cast<std::size_t>(nn))
      throw io_error("bundle: truth field size does not match shape");
    Image<double> u(p.shape);
    u.v = tv;
    p.truth = std::move(u);
  }
  return p;
}

}  // namespace tvcs
