#include "ieim/codec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ieim/errors.hpp"

namespace ieim {

namespace {

constexpr char kMagic[4] = {'I', 'E', 'V', 'T'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_events(const EventStream& stream) {
  auto violations = validate_stream(stream);
  if (!violations.empty()) throw ValidationError(std::move(violations));

  std::vector<std::uint8_t> out;
  out.reserve(kIevtHeaderSize + kIevtRecordSize * stream.events.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u16(out, 1);
  put_u16(out, stream.width);
  put_u16(out, stream.height);
  put_u32(out, stream.tick_ns);
  put_u64(out, stream.events.size());
  out.insert(out.end(), 10, 0);

  for (const Event& e : stream.events) {
    put_u64(out, e.t);
    put_u16(out, e.x);
    put_u16(out, e.y);
    out.push_back(static_cast<std::uint8_t>(e.polarity));
    out.insert(out.end(), 3, 0);
  }
  return out;
}

EventStream decode_events(const std::uint8_t* data, std::size_t size) {
  if (size < kIevtHeaderSize) throw DecodeError(size, "truncated header");
  if (std::memcmp(data, kMagic, 4) != 0) throw DecodeError(0, "bad magic");
  const std::uint16_t version = get_u16(data + 4);
  if (version != 1) throw DecodeError(4, "unsupported version " + std::to_string(version));

  EventStream s;
  s.width = get_u16(data + 6);
  s.height = get_u16(data + 8);
  s.tick_ns = get_u32(data + 10);
  const std::uint64_t count = get_u64(data + 14);
  for (std::size_t i = 22; i < 32; ++i)
    if (data[i] != 0) throw DecodeError(i, "nonzero reserved byte");

  const std::uint64_t have = (size - kIevtHeaderSize) / kIevtRecordSize;
  if (have < count)
    throw DecodeError(kIevtHeaderSize + have * kIevtRecordSize, "truncated");
  if (size != kIevtHeaderSize + count * kIevtRecordSize)
    throw DecodeError(kIevtHeaderSize + count * kIevtRecordSize, "trailing bytes");

  s.events.resize(count);
  const std::uint8_t* p = data + kIevtHeaderSize;
  for (std::uint64_t i = 0; i < count; ++i, p += kIevtRecordSize) {
    const std::size_t off = kIevtHeaderSize + i * kIevtRecordSize;
    Event e;
    e.t = get_u64(p);
    e.x = get_u16(p + 8);
    e.y = get_u16(p + 10);
    const std::int8_t pol = static_cast<std::int8_t>(p[12]);
    if (pol != 1 && pol != -1) throw DecodeError(off + 12, "bad polarity");
    e.polarity = pol;
    if (p[13] || p[14] || p[15]) throw DecodeError(off + 13, "nonzero pad");
    s.events[i] = e;
  }
  return s;
}

EventStream decode_events(const std::vector<std::uint8_t>& bytes) {
  return decode_events(bytes.data(), bytes.size());
}

namespace {

bool parse_i64(std::string_view field, std::int64_t& out) {
  const char* b = field.data();
  const char* e = b + field.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e && b != e;
}

}  // namespace

EventStream read_csv_events(const std::string& text, std::uint16_t width,
                            std::uint16_t height, std::uint32_t tick_ns) {
  EventStream s;
  s.width = width;
  s.height = height;
  s.tick_ns = tick_ns;

  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;

    std::int64_t v[4];
    std::size_t start = 0;
    bool ok = true;
    for (int f = 0; f < 4; ++f) {
      std::size_t comma = line.find(',', start);
      if (f < 3 && comma == std::string_view::npos) {
        ok = false;
        break;
      }
      std::string_view field =
          line.substr(start, (f == 3 ? line.size() : comma) - start);
      if (f == 3 && field.find(',') != std::string_view::npos) ok = false;
      if (ok) ok = parse_i64(field, v[f]);
      if (!ok) break;
      start = comma + 1;
    }

    if (!ok) {
      // An optional header row is tolerated on the first line only.
      if (line_no == 1 &&
          std::any_of(line.begin(), line.end(), [](unsigned char c) { return std::isalpha(c); }))
        continue;
      throw ParseError(line_no, "malformed row");
    }
    if (v[0] < 0) throw ParseError(line_no, "negative timestamp");
    if (v[1] < 0 || v[1] >= width || v[2] < 0 || v[2] >= height)
      throw ParseError(line_no, "coordinate out of bounds");
    if (v[3] != 1 && v[3] != -1) throw ParseError(line_no, "polarity not in {+1,-1}");

    s.events.push_back(Event{static_cast<std::uint64_t>(v[0]),
                             static_cast<std::uint16_t>(v[1]),
                             static_cast<std::uint16_t>(v[2]),
                             static_cast<std::int8_t>(v[3])});
  }
  canonical_sort(s.events);
  return s;
}

std::vector<std::uint8_t> write_pgm(const Grid& grid, int maxval) {
  if (maxval != 255 && maxval != 65535)
    throw std::invalid_argument("write_pgm: maxval must be 255 or 65535");
  if (grid.width <= 0 || grid.height <= 0)
    throw std::invalid_argument("write_pgm: empty grid");
  std::string header = "P5\n" + std::to_string(grid.width) + " " +
                       std::to_string(grid.height) + "\n" + std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + grid.size() * (maxval > 255 ? 2 : 1));
  for (double v : grid.data) {
    if (!(v >= 0.0) || v > maxval)
      throw std::invalid_argument("write_pgm: sample out of [0, maxval]");
    const long s = std::lround(v);
    if (maxval > 255) {
      out.push_back(static_cast<std::uint8_t>((s >> 8) & 0xFF));
      out.push_back(static_cast<std::uint8_t>(s & 0xFF));
    } else {
      out.push_back(static_cast<std::uint8_t>(s & 0xFF));
    }
  }
  return out;
}

namespace {

// PGM header tokens may be separated by whitespace and '#' comments.
bool next_pgm_token(const std::uint8_t* data, std::size_t size, std::size_t& pos,
                    std::string& tok) {
  while (pos < size) {
    if (std::isspace(data[pos])) {
      ++pos;
    } else if (data[pos] == '#') {
      while (pos < size && data[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  tok.clear();
  while (pos < size && !std::isspace(data[pos])) tok.push_back(static_cast<char>(data[pos++]));
  return !tok.empty();
}

}  // namespace

Grid read_pgm(const std::uint8_t* data, std::size_t size, int* maxval_out) {
  if (size < 2 || data[0] != 'P' || data[1] != '5') throw DecodeError(0, "not a P5 PGM");
  std::size_t pos = 2;
  std::string tok;
  long dims[3];
  for (int i = 0; i < 3; ++i) {
    if (!next_pgm_token(data, size, pos, tok)) throw DecodeError(pos, "truncated PGM header");
    try {
      dims[i] = std::stol(tok);
    } catch (const std::exception&) {
      throw DecodeError(pos, "bad PGM header token");
    }
  }
  const long w = dims[0], h = dims[1], maxval = dims[2];
  if (w <= 0 || h <= 0 || w > 65535 || h > 65535) throw DecodeError(pos, "bad PGM dimensions");
  if (maxval != 255 && maxval != 65535) throw DecodeError(pos, "unsupported maxval");
  if (pos >= size || !std::isspace(data[pos])) throw DecodeError(pos, "missing header separator");
  ++pos;

  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  const std::size_t need = static_cast<std::size_t>(w) * h * bytes_per;
  if (size - pos < need) throw DecodeError(size, "short PGM body");

  Grid g(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (bytes_per == 2) {
      g.data[i] = static_cast<double>((data[pos] << 8) | data[pos + 1]);
      pos += 2;
    } else {
      g.data[i] = static_cast<double>(data[pos++]);
    }
  }
  if (maxval_out) *maxval_out = static_cast<int>(maxval);
  return g;
}

Grid read_pgm(const std::vector<std::uint8_t>& bytes, int* maxval_out) {
  return read_pgm(bytes.data(), bytes.size(), maxval_out);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_file(const std::string& path, const std::string& text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

void store_density_pgm(const Grid& grid, const std::string& pgm_path) {
  double maxv = 0;
  for (double v : grid.data) maxv = std::max(maxv, v);
  const double scale = maxv > 0 ? maxv : 1.0;

  Grid scaled(grid.width, grid.height);
  for (std::size_t i = 0; i < grid.size(); ++i)
    scaled.data[i] = grid.data[i] / scale * 65535.0;
  write_file(pgm_path, write_pgm(scaled, 65535));

  nlohmann::json sidecar = {{"scale", scale}, {"offset", 0.0}};
  write_file(pgm_path + ".json", sidecar.dump(2) + "\n");
}

Grid load_density_pgm(const std::string& pgm_path) {
  int maxval = 255;
  Grid g = read_pgm(read_file(pgm_path), &maxval);
  double scale = 1.0, offset = 0.0;
  std::ifstream side(pgm_path + ".json");
  if (side) {
    nlohmann::json j = nlohmann::json::parse(side);
    scale = j.value("scale", 1.0);
    offset = j.value("offset", 0.0);
  }
  for (double& v : g.data) v = offset + scale * (v / maxval);
  return g;
}

}  // namespace ieim
