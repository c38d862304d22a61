#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>

#include "gqg/errors.hpp"
#include "gqg/harness.hpp"

namespace gqg {

using nlohmann::json;

namespace {

constexpr const char* kElementType = "float64 little-endian";
constexpr const char* kLayout = "row-major [x][y][z]";

template <class T, class Tag>
NamedArray pack(const std::string& name, const Nodal<T, Tag>& f) {
  static_assert(std::is_same_v<T, double>);
  const Shape s = f.shape();
  std::vector<double> d(f.values().begin(), f.values().end());
  if (std::is_same_v<Tag, SurfaceTag>) return {name, {s.n0, s.n1, 1}, std::move(d)};
  if (std::is_same_v<Tag, ColumnTag>) return {name, {1, 1, s.n2}, std::move(d)};
  return {name, {s.n0, s.n1, s.n2}, std::move(d)};
}

template <class Tag>
void pack_complex(std::vector<NamedArray>& out, const std::string& name, const Nodal<cplx, Tag>& f) {
  out.push_back(pack(name + "_re", real_part(f)));
  out.push_back(pack(name + "_im", imag_part(f)));
}

template <class T, class Tag>
void unpack(const Snapshot& s, const std::string& name, Nodal<T, Tag>& f) {
  const NamedArray& a = s.field(name);
  if (a.data.size() != f.size())
    throw DimensionError(name, "snapshot holds " + std::to_string(a.data.size()) + " values, grid expects " +
                                   std::to_string(f.size()));
  std::copy(a.data.begin(), a.data.end(), f.data());
}

template <class Tag>
void unpack_complex(const Snapshot& s, const std::string& name, Nodal<cplx, Tag>& f) {
  Nodal<double, Tag> re(f.shape()), im(f.shape());
  unpack(s, name + "_re", re);
  unpack(s, name + "_im", im);
  f = make_complex(re, im);
}

Snapshot base(const ChannelGrid& g, const char* kind, double t, double eps) {
  Snapshot s;
  s.kind = kind;
  s.grid = {g.nx(), g.ny(), g.nz(), g.h(), g.dealias()};
  s.t = t;
  s.eps = eps;
  return s;
}

void check_grid(const ChannelGrid& g, const Snapshot& s) {
  if (s.grid.nx != g.nx() || s.grid.ny != g.ny() || s.grid.nz != g.nz() || s.grid.h != g.h())
    throw DimensionError("snapshot", "grid " + std::to_string(s.grid.nx) + "x" + std::to_string(s.grid.ny) + "x" +
                                         std::to_string(s.grid.nz) + " does not match the run grid");
}

void put_le(const double* src, std::size_t n, std::string& out) {
  const std::size_t off = out.size();
  out.resize(off + 8 * n);
  char* dst = out.data() + off;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, src, 8 * n);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t u;
      std::memcpy(&u, src + i, 8);
      for (int b = 0; b < 8; ++b) dst[8 * i + b] = static_cast<char>((u >> (8 * b)) & 0xff);
    }
  }
}

void get_le(const char* src, std::size_t n, double* dst) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, src, 8 * n);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t u = 0;
      for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(static_cast<unsigned char>(src[8 * i + b])) << (8 * b);
      std::memcpy(dst + i, &u, 8);
    }
  }
}

std::uint32_t crc_of(const std::string& bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large payloads.
  const char* p = bytes.data();
  std::size_t left = bytes.size();
  while (left > 0) {
    const uInt n = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    c = crc32(c, reinterpret_cast<const Bytef*>(p), n);
    p += n;
    left -= n;
  }
  return static_cast<std::uint32_t>(c);
}

json parse_header_line(std::istream& in, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty snapshot file");
  json h;
  try {
    h = json::parse(line);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": malformed snapshot header: " + e.what());
  }
  if (!h.is_object() || h.value("format", "") != kSnapshotFormat)
    throw IoError(path.string() + ": not a " + std::string(kSnapshotFormat) + " file");
  if (h.value("schema_version", -1) != kSnapshotSchema)
    throw IoError(path.string() + ": unsupported schema version " + h.value("schema_version", json(-1)).dump());
  if (h.value("element_type", "") != kElementType || h.value("layout", "") != kLayout)
    throw IoError(path.string() + ": unsupported element type or layout");
  return h;
}

}  // namespace

const NamedArray& Snapshot::field(const std::string& name) const {
  for (const NamedArray& a : fields)
    if (a.name == name) return a;
  throw IoError("snapshot of kind '" + kind + "' has no field '" + name + "'");
}

Snapshot to_snapshot(const ChannelGrid& g, const PrimitiveState& p) {
  Snapshot s = base(g, "primitive", p.t, p.eps);
  s.fields = {pack("v1", p.v.x1), pack("v2", p.v.x2), pack("w", p.w), pack("theta", p.theta)};
  return s;
}

Snapshot to_snapshot(const ChannelGrid& g, const GPVState& st) {
  Snapshot s = base(g, "gpv", st.t, st.eps);
  s.fields = {pack("Phi", st.Phi), pack("Psi1", st.Psi.x1), pack("Psi2", st.Psi.x2), pack("H0", st.H0),
              pack("Hh", st.Hh),   pack("Z1", st.Z.x1),     pack("Z2", st.Z.x2)};
  return s;
}

Snapshot to_snapshot(const ChannelGrid& g, const LimitState& L) {
  Snapshot s = base(g, "limit", L.t, 0.0);
  s.fields = {pack("Phi_p", L.Phi_p), pack("Hp0", L.Hp0), pack("Hph", L.Hph)};
  pack_complex(s.fields, "psi1", L.psi_p.x1);
  pack_complex(s.fields, "psi2", L.psi_p.x2);
  pack_complex(s.fields, "z1", L.z_p.x1);
  pack_complex(s.fields, "z2", L.z_p.x2);
  return s;
}

Snapshot to_snapshot(const ChannelGrid& g, const FastPair& f, double t, double eps) {
  Snapshot s = base(g, "fast", t, eps);
  pack_complex(s.fields, "Psi_plus1", f.Psi_plus.x1);
  pack_complex(s.fields, "Psi_plus2", f.Psi_plus.x2);
  pack_complex(s.fields, "Z_plus1", f.Z_plus.x1);
  pack_complex(s.fields, "Z_plus2", f.Z_plus.x2);
  return s;
}

PrimitiveState primitive_from_snapshot(const ChannelGrid& g, const Snapshot& s) {
  if (s.kind != "primitive") throw IoError("expected a primitive snapshot, got '" + s.kind + "'");
  check_grid(g, s);
  PrimitiveState p = PrimitiveState::zeros(g, s.eps);
  p.t = s.t;
  unpack(s, "v1", p.v.x1);
  unpack(s, "v2", p.v.x2);
  unpack(s, "w", p.w);
  unpack(s, "theta", p.theta);
  return p;
}

GPVState gpv_from_snapshot(const ChannelGrid& g, const Snapshot& s) {
  if (s.kind != "gpv") throw IoError("expected a gpv snapshot, got '" + s.kind + "'");
  check_grid(g, s);
  GPVState st = GPVState::zeros(g, s.eps);
  st.t = s.t;
  unpack(s, "Phi", st.Phi);
  unpack(s, "Psi1", st.Psi.x1);
  unpack(s, "Psi2", st.Psi.x2);
  unpack(s, "H0", st.H0);
  unpack(s, "Hh", st.Hh);
  unpack(s, "Z1", st.Z.x1);
  unpack(s, "Z2", st.Z.x2);
  return st;
}

LimitState limit_from_snapshot(const ChannelGrid& g, const Snapshot& s) {
  if (s.kind != "limit") throw IoError("expected a limit snapshot, got '" + s.kind + "'");
  check_grid(g, s);
  LimitState L = LimitState::zeros(g);
  L.t = s.t;
  unpack(s, "Phi_p", L.Phi_p);
  unpack(s, "Hp0", L.Hp0);
  unpack(s, "Hph", L.Hph);
  unpack_complex(s, "psi1", L.psi_p.x1);
  unpack_complex(s, "psi2", L.psi_p.x2);
  unpack_complex(s, "z1", L.z_p.x1);
  unpack_complex(s, "z2", L.z_p.x2);
  return L;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  std::string payload;
  json fields = json::array();
  std::size_t offset = 0;
  for (const NamedArray& a : s.fields) {
    const std::size_t n = static_cast<std::size_t>(a.shape[0]) * a.shape[1] * a.shape[2];
    if (n != a.data.size()) throw DimensionError(a.name, "shape does not match the number of values");
    fields.push_back({{"name", a.name}, {"shape", a.shape}, {"offset", offset}, {"count", n}});
    put_le(a.data.data(), n, payload);
    offset += 8 * n;
  }
  json h;
  h["format"] = kSnapshotFormat;
  h["schema_version"] = kSnapshotSchema;
  h["kind"] = s.kind;
  h["grid"] = {{"nx", s.grid.nx}, {"ny", s.grid.ny}, {"nz", s.grid.nz}, {"h", s.grid.h}, {"dealias", s.grid.dealias}};
  h["t"] = s.t;
  h["eps"] = s.eps;
  h["element_type"] = kElementType;
  h["layout"] = kLayout;
  h["fields"] = fields;
  h["payload_bytes"] = payload.size();
  h["crc32"] = crc_of(payload);

  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << h.dump() << '\n';
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::json read_snapshot_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot " + path.string());
  return parse_header_line(in, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot " + path.string());
  const json h = parse_header_line(in, path);
  Snapshot s;
  try {
    s.kind = h.at("kind").get<std::string>();
    const json& g = h.at("grid");
    s.grid = {g.at("nx").get<int>(), g.at("ny").get<int>(), g.at("nz").get<int>(), g.at("h").get<double>(),
              g.at("dealias").get<bool>()};
    s.t = h.at("t").get<double>();
    s.eps = h.at("eps").get<double>();
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": incomplete snapshot header: " + e.what());
  }
  const std::size_t expected = h.value("payload_bytes", std::size_t{0});
  std::string payload(expected, '\0');
  in.read(payload.data(), static_cast<std::streamsize>(expected));
  const std::size_t got = static_cast<std::size_t>(in.gcount());
  if (got != expected)
    throw IoError(path.string() + ": checksum failure: payload truncated (" + std::to_string(got) + " of " +
                  std::to_string(expected) + " bytes)");
  if (in.peek() != std::char_traits<char>::eof()) throw IoError(path.string() + ": trailing bytes after payload");
  if (crc_of(payload) != h.value("crc32", std::uint32_t{0}))
    throw IoError(path.string() + ": checksum failure: CRC32 of payload does not match the header");

  for (const json& f : h.at("fields")) {
    NamedArray a;
    a.name = f.at("name").get<std::string>();
    a.shape = f.at("shape").get<std::array<int, 3>>();
    const std::size_t off = f.at("offset").get<std::size_t>(), n = f.at("count").get<std::size_t>();
    if (off + 8 * n > payload.size()) throw IoError(path.string() + ": field '" + a.name + "' runs past the payload");
    a.data.resize(n);
    get_le(payload.data() + off, n, a.data.data());
    s.fields.push_back(std::move(a));
  }
  return s;
}

}  // namespace gqg
