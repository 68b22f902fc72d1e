#include "ptychodd/io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>

namespace ptychodd {
namespace {

constexpr uint16_t kVersion = 1;
constexpr uint16_t kDtypeF64 = 1;
constexpr uint16_t kDtypeC128 = 2;

void append_u16(std::string& buf, uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>(v >> 8));
}

void append_u64(std::string& buf, uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f64(std::string& buf, double v) {
  static_assert(sizeof(double) == 8);
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  append_u64(buf, bits);
}

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

struct Cursor {
  const std::string& buf;
  uint64_t pos = 0;

  void need(uint64_t n) const {
    if (pos + n > buf.size()) throw FormatError("truncated PTYA file", pos);
  }
  uint16_t u16() {
    need(2);
    const auto* b = reinterpret_cast<const unsigned char*>(buf.data() + pos);
    pos += 2;
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    const auto* b = reinterpret_cast<const unsigned char*>(buf.data() + pos);
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    const uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

std::string ptya_header(uint16_t dtype, const std::vector<uint64_t>& dims) {
  std::string buf = "PTYA";
  append_u16(buf, kVersion);
  append_u16(buf, dtype);
  append_u16(buf, static_cast<uint16_t>(dims.size()));
  for (uint64_t d : dims) append_u64(buf, d);
  return buf;
}

std::vector<uint64_t> parse_header(Cursor& cur, uint16_t want_dtype) {
  cur.need(4);
  if (cur.buf.compare(0, 4, "PTYA") != 0) throw FormatError("bad magic, not a PTYA file", 0);
  cur.pos = 4;
  const uint16_t version = cur.u16();
  if (version != kVersion)
    throw FormatError("unsupported PTYA version " + std::to_string(version), 4);
  const uint64_t dtype_at = cur.pos;
  const uint16_t dtype = cur.u16();
  if (dtype != want_dtype)
    throw FormatError("dtype mismatch: file has code " + std::to_string(dtype) + ", expected " +
                          std::to_string(want_dtype),
                      dtype_at);
  const uint16_t ndim = cur.u16();
  if (ndim < 1 || ndim > 4) throw FormatError("unsupported ndim " + std::to_string(ndim), cur.pos - 2);
  std::vector<uint64_t> dims;
  for (uint16_t i = 0; i < ndim; ++i) {
    const uint64_t at = cur.pos;
    dims.push_back(cur.u64());
    if (dims.back() == 0 || dims.back() > (uint64_t{1} << 32))
      throw FormatError("implausible dimension " + std::to_string(dims.back()), at);
  }
  return dims;
}

void check_fully_consumed(const Cursor& cur) {
  if (cur.pos != cur.buf.size()) throw FormatError("trailing bytes after payload", cur.pos);
}

uint32_t be32(uint32_t v) {
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

void append_png_chunk(std::string& out, const char type[4], const std::string& payload) {
  const uint32_t len = be32(static_cast<uint32_t>(payload.size()));
  out.append(reinterpret_cast<const char*>(&len), 4);
  const size_t crc_start = out.size();
  out.append(type, 4);
  out += payload;
  const uint32_t crc = static_cast<uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(out.data() + crc_start), static_cast<uInt>(out.size() - crc_start)));
  const uint32_t crc_be = be32(crc);
  out.append(reinterpret_cast<const char*>(&crc_be), 4);
}

}  // namespace

void write_array(const std::filesystem::path& path, const RealField2D& field) {
  std::string buf = ptya_header(kDtypeF64, {static_cast<uint64_t>(field.height()),
                                            static_cast<uint64_t>(field.width())});
  buf.reserve(buf.size() + static_cast<size_t>(field.size()) * 8);
  for (double v : field.data()) append_f64(buf, v);
  atomic_write(path, buf);
}

void write_array(const std::filesystem::path& path, const ComplexField2D& field) {
  std::string buf = ptya_header(kDtypeC128, {static_cast<uint64_t>(field.height()),
                                             static_cast<uint64_t>(field.width())});
  buf.reserve(buf.size() + static_cast<size_t>(field.size()) * 16);
  for (const cdouble& v : field.data()) {
    append_f64(buf, v.real());
    append_f64(buf, v.imag());
  }
  atomic_write(path, buf);
}

void write_frames(const std::filesystem::path& path, const std::vector<RealField2D>& frames) {
  if (frames.empty()) throw std::invalid_argument("write_frames: empty stack");
  std::string buf = ptya_header(kDtypeF64, {frames.size(),
                                            static_cast<uint64_t>(frames[0].height()),
                                            static_cast<uint64_t>(frames[0].width())});
  for (const auto& f : frames) {
    if (!f.same_shape(frames[0])) throw std::invalid_argument("write_frames: ragged stack");
    for (double v : f.data()) append_f64(buf, v);
  }
  atomic_write(path, buf);
}

RealField2D read_real_array(const std::filesystem::path& path) {
  const std::string buf = read_file(path);
  Cursor cur{buf};
  const auto dims = parse_header(cur, kDtypeF64);
  if (dims.size() != 2) throw FormatError("expected a 2-D real array", 8);
  RealField2D field(static_cast<int64_t>(dims[0]), static_cast<int64_t>(dims[1]));
  for (int64_t i = 0; i < field.size(); ++i) field[i] = cur.f64();
  check_fully_consumed(cur);
  return field;
}

ComplexField2D read_complex_array(const std::filesystem::path& path) {
  const std::string buf = read_file(path);
  Cursor cur{buf};
  const auto dims = parse_header(cur, kDtypeC128);
  if (dims.size() != 2) throw FormatError("expected a 2-D complex array", 8);
  ComplexField2D field(static_cast<int64_t>(dims[0]), static_cast<int64_t>(dims[1]));
  for (int64_t i = 0; i < field.size(); ++i) {
    const double re = cur.f64();
    const double im = cur.f64();
    field[i] = {re, im};
  }
  check_fully_consumed(cur);
  return field;
}

std::vector<RealField2D> read_frames(const std::filesystem::path& path) {
  const std::string buf = read_file(path);
  Cursor cur{buf};
  const auto dims = parse_header(cur, kDtypeF64);
  if (dims.size() != 3) throw FormatError("expected a 3-D frame stack", 8);
  std::vector<RealField2D> frames;
  frames.reserve(dims[0]);
  for (uint64_t j = 0; j < dims[0]; ++j) {
    RealField2D f(static_cast<int64_t>(dims[1]), static_cast<int64_t>(dims[2]));
    for (int64_t i = 0; i < f.size(); ++i) f[i] = cur.f64();
    frames.push_back(std::move(f));
  }
  check_fully_consumed(cur);
  return frames;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string buf = read_file(path);
  try {
    return nlohmann::json::parse(buf);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("invalid JSON in " + path.string() + ": " + e.what(),
                      static_cast<uint64_t>(e.byte));
  }
}

nlohmann::json geometry_to_json(const ScanGeometry& geometry) {
  nlohmann::json positions = nlohmann::json::array();
  for (const auto& [r, c] : geometry.positions) positions.push_back({r, c});
  return {
      {"frame_side", geometry.frame_side}, {"step", geometry.step},
      {"image_height", geometry.image_height}, {"image_width", geometry.image_width},
      {"grid_rows", geometry.grid_rows}, {"grid_cols", geometry.grid_cols},
      {"positions", std::move(positions)},
  };
}

ScanGeometry geometry_from_json(const nlohmann::json& j) {
  ScanGeometry g;
  try {
    g.frame_side = j.at("frame_side").get<int64_t>();
    g.step = j.at("step").get<int64_t>();
    g.image_height = j.at("image_height").get<int64_t>();
    g.image_width = j.at("image_width").get<int64_t>();
    g.grid_rows = j.at("grid_rows").get<int64_t>();
    g.grid_cols = j.at("grid_cols").get<int64_t>();
    for (const auto& p : j.at("positions"))
      g.positions.emplace_back(p.at(0).get<int64_t>(), p.at(1).get<int64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad geometry record: ") + e.what(), 0);
  }
  g.validate();
  return g;
}

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRecord>& records) {
  if (records.empty()) throw std::invalid_argument("write_convergence_csv: no records");
  const size_t D = records[0].t_sub_ms.size();
  std::ostringstream out;
  out << "iter,rf,re,lagrangian";
  for (size_t d = 0; d < D; ++d) out << ",t_sub_" << d << "_ms";
  out << ",t_virtual_ms,t_actual_ms\n";
  out.precision(17);
  for (const auto& rec : records) {
    out << rec.iteration << ',' << rec.rf << ',' << rec.re << ',';
    if (rec.lagrangian) out << *rec.lagrangian;
    for (double t : rec.t_sub_ms) out << ',' << t;
    out << ',' << rec.t_virtual_ms << ',' << rec.t_actual_ms << '\n';
  }
  atomic_write(path, std::move(out).str());
}

void write_png_gray(const std::filesystem::path& path, const RealField2D& img, double lo,
                    double hi) {
  if (!(hi > lo)) throw std::invalid_argument("write_png_gray: need hi > lo");
  const auto h = static_cast<uint32_t>(img.height());
  const auto w = static_cast<uint32_t>(img.width());

  // Raw scanlines, filter byte 0 per row.
  std::string raw;
  raw.reserve(static_cast<size_t>(h) * (w + 1));
  for (uint32_t r = 0; r < h; ++r) {
    raw.push_back('\0');
    for (uint32_t c = 0; c < w; ++c) {
      const double t = (img.at(r, c) - lo) / (hi - lo);
      raw.push_back(static_cast<char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0)));
    }
  }
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(comp_len, '\0');
  if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &comp_len,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                Z_BEST_SPEED) != Z_OK)
    throw std::runtime_error("write_png_gray: zlib compression failed");
  compressed.resize(comp_len);

  std::string ihdr;
  const uint32_t wb = be32(w), hb = be32(h);
  ihdr.append(reinterpret_cast<const char*>(&wb), 4);
  ihdr.append(reinterpret_cast<const char*>(&hb), 4);
  ihdr += '\x08';  // bit depth
  ihdr += '\x00';  // grayscale
  ihdr.append(3, '\0');  // compression, filter, interlace

  std::string out("\x89PNG\r\n\x1a\n", 8);
  append_png_chunk(out, "IHDR", ihdr);
  append_png_chunk(out, "IDAT", compressed);
  append_png_chunk(out, "IEND", "");
  atomic_write(path, out);
}

}  // namespace ptychodd
