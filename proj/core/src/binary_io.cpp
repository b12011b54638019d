#include "photostat/binary_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "photostat/error.hpp"

namespace photostat {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace {

namespace fs = std::filesystem;

class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const char*>(&value);
    buffer_.append(p, sizeof(T));
  }
  void put_magic(const char (&magic)[5]) { buffer_.append(magic, 4); }
  void reserve(std::size_t n) { buffer_.reserve(n); }
  const std::string& str() const noexcept { return buffer_; }

 private:
  std::string buffer_;
};

class Reader {
 public:
  Reader(std::string data, fs::path path) : data_(std::move(data)), path_(std::move(path)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  void expect_magic(const char (&magic)[5]) {
    need(4);
    if (std::memcmp(data_.data() + pos_, magic, 4) != 0) {
      fail(ErrorKind::kFormat, path_.string() + ": not a " + std::string(magic, 4) + " file");
    }
    pos_ += 4;
    const auto version = get<std::uint32_t>();
    if (version != kBinaryFormatVersion) {
      fail(ErrorKind::kFormat,
           path_.string() + ": unsupported version " + std::to_string(version));
    }
  }

  void expect_payload(std::uint64_t n, std::size_t item_size) {
    const std::uint64_t remaining = data_.size() - pos_;
    if (n > remaining / item_size || n * item_size != remaining) {
      fail(ErrorKind::kFormat, path_.string() + ": payload length does not match header");
    }
  }

  const char* cursor() const noexcept { return data_.data() + pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail(ErrorKind::kFormat, path_.string() + ": truncated header");
  }

  std::string data_;
  fs::path path_;
  std::size_t pos_ = 0;
};

std::string read_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) fail(ErrorKind::kIo, "read error on " + path.string());
  return std::move(os).str();
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  std::random_device rd;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ostringstream name;
  name << "." << path.filename().string() << ".tmp" << std::hex << rd();
  const fs::path tmp = dir / name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot create " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      fail(ErrorKind::kIo, "write error on " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::kIo, "cannot rename onto " + path.string());
  }
}

std::string read_text_file(const fs::path& path) { return read_binary(path); }

void write_field_trace(const fs::path& path, const FieldTrace& trace) {
  trace.validate();
  Writer w;
  w.reserve(32 + trace.size() * 16);
  w.put_magic("PSFT");
  w.put(kBinaryFormatVersion);
  w.put(trace.dt);
  w.put(trace.flux);
  w.put(static_cast<std::uint64_t>(trace.size()));
  for (const auto& s : trace.samples) {
    w.put(s.real());
    w.put(s.imag());
  }
  write_file_atomic(path, w.str());
}

FieldTrace read_field_trace(const fs::path& path) {
  Reader r(read_binary(path), path);
  r.expect_magic("PSFT");
  FieldTrace trace;
  trace.dt = r.get<double>();
  trace.flux = r.get<double>();
  const auto n = r.get<std::uint64_t>();
  r.expect_payload(n, 16);
  trace.samples.resize(n);
  std::memcpy(trace.samples.data(), r.cursor(), n * 16);
  trace.validate();
  return trace;
}

void write_intensity_trace(const fs::path& path, const IntensityTrace& trace, double flux) {
  require(trace.dt > 0.0 && !trace.samples.empty(), "intensity trace must be non-empty with dt > 0");
  Writer w;
  w.reserve(32 + trace.size() * 8);
  w.put_magic("PSIT");
  w.put(kBinaryFormatVersion);
  w.put(trace.dt);
  w.put(flux);
  w.put(static_cast<std::uint64_t>(trace.size()));
  for (double s : trace.samples) w.put(s);
  write_file_atomic(path, w.str());
}

IntensityTrace read_intensity_trace(const fs::path& path, double* flux) {
  Reader r(read_binary(path), path);
  r.expect_magic("PSIT");
  IntensityTrace trace;
  trace.dt = r.get<double>();
  const double f = r.get<double>();
  if (flux != nullptr) *flux = f;
  const auto n = r.get<std::uint64_t>();
  r.expect_payload(n, 8);
  trace.samples.resize(n);
  std::memcpy(trace.samples.data(), r.cursor(), n * 8);
  return trace;
}

void write_tag_stream(const fs::path& path, const TagStream& stream) {
  stream.validate();
  Writer w;
  w.reserve(32 + stream.size() * 8);
  w.put_magic("PSTG");
  w.put(kBinaryFormatVersion);
  w.put(stream.duration);
  w.put(static_cast<std::uint64_t>(stream.size()));
  w.put(stream.channel);
  for (double t : stream.tags) w.put(t);
  write_file_atomic(path, w.str());
}

TagStream read_tag_stream(const fs::path& path) {
  Reader r(read_binary(path), path);
  r.expect_magic("PSTG");
  TagStream stream;
  stream.duration = r.get<double>();
  const auto n = r.get<std::uint64_t>();
  stream.channel = r.get<std::uint32_t>();
  r.expect_payload(n, 8);
  stream.tags.resize(n);
  std::memcpy(stream.tags.data(), r.cursor(), n * 8);
  stream.validate();
  return stream;
}

void write_field_csv(const fs::path& path, const FieldTrace& trace) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,re,im\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    os << static_cast<double>(i) * trace.dt << ',' << trace.samples[i].real() << ','
       << trace.samples[i].imag() << '\n';
  }
  write_file_atomic(path, os.str());
}

void write_tags_csv(const fs::path& path, const TagStream& stream) {
  std::ostringstream os;
  os << std::setprecision(17) << "channel,t\n";
  for (double t : stream.tags) os << stream.channel << ',' << t << '\n';
  write_file_atomic(path, os.str());
}

}  // namespace photostat
