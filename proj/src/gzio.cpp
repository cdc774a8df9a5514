#include "kgrec/gzio.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "kgrec/error.hpp"

namespace kgrec {

struct LineSource::Impl {
  gzFile f = nullptr;
  std::vector<char> buf;
  std::size_t pos = 0;   // next unread byte in buf
  std::size_t fill = 0;  // valid bytes in buf
  bool eof = false;

  ~Impl() {
    if (f) gzclose(f);
  }
};

LineSource::LineSource(const std::string& path)
    : impl_(new Impl), path_(path) {
  // gzopen reads plain (non-gzip) files transparently as well
  impl_->f = gzopen(path.c_str(), "rb");
  if (!impl_->f) throw IoError("cannot open: " + path);
  gzbuffer(impl_->f, 1 << 17);
  impl_->buf.resize(1 << 16);
}

LineSource::~LineSource() = default;

bool LineSource::next(std::string& line) {
  line.clear();
  Impl& s = *impl_;
  bool got_any = false;
  for (;;) {
    if (s.pos == s.fill) {
      if (s.eof) break;
      int n = gzread(s.f, s.buf.data(), static_cast<unsigned>(s.buf.size()));
      if (n < 0) {
        int errnum = 0;
        const char* msg = gzerror(s.f, &errnum);
        throw IoError("read error in " + path_ + ": " + (msg ? msg : "?"));
      }
      s.pos = 0;
      s.fill = static_cast<std::size_t>(n);
      if (n == 0) {
        s.eof = true;
        break;
      }
    }
    const char* start = s.buf.data() + s.pos;
    const char* nl = static_cast<const char*>(
        std::memchr(start, '\n', s.fill - s.pos));
    if (nl) {
      line.append(start, nl - start);
      s.pos += static_cast<std::size_t>(nl - start) + 1;
      got_any = true;
      break;
    }
    line.append(start, s.fill - s.pos);
    s.pos = s.fill;
    got_any = got_any || !line.empty();
  }
  if (!got_any && line.empty()) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ++line_number_;
  return true;
}

struct LineSink::Impl {
  std::ofstream out;
  std::string path;
  bool gz = false;
  z_stream zs{};
  gz_header header{};
  std::vector<unsigned char> zbuf;
  bool open = false;

  void sink_compressed(int flush) {
    do {
      zs.next_out = zbuf.data();
      zs.avail_out = static_cast<unsigned>(zbuf.size());
      int rc = deflate(&zs, flush);
      if (rc == Z_STREAM_ERROR) throw IoError("deflate failed: " + path);
      std::size_t produced = zbuf.size() - zs.avail_out;
      if (produced)
        out.write(reinterpret_cast<const char*>(zbuf.data()),
                  static_cast<std::streamsize>(produced));
    } while (zs.avail_out == 0);
  }
};

LineSink::LineSink(const std::string& path) : impl_(new Impl) {
  Impl& s = *impl_;
  s.path = path;
  s.out.open(path, std::ios::binary | std::ios::trunc);
  if (!s.out) throw IoError("cannot create: " + path);
  s.gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
  if (s.gz) {
    // windowBits 15+16 selects a gzip wrapper; the explicit header pins
    // mtime/os so reruns produce byte-identical files
    if (deflateInit2(&s.zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK)
      throw IoError("deflateInit2 failed: " + path);
    s.header.time = 0;
    s.header.os = 3;  // unix
    deflateSetHeader(&s.zs, &s.header);
    s.zbuf.resize(1 << 16);
  }
  s.open = true;
}

LineSink::~LineSink() {
  try {
    close();
  } catch (...) {
    // destructor must not throw; close() explicitly to observe errors
  }
}

void LineSink::write(std::string_view line) {
  Impl& s = *impl_;
  if (!s.open) throw IoError("write after close: " + s.path);
  if (s.gz) {
    static const char nl = '\n';
    s.zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(line.data()));
    s.zs.avail_in = static_cast<unsigned>(line.size());
    s.sink_compressed(Z_NO_FLUSH);
    s.zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(&nl));
    s.zs.avail_in = 1;
    s.sink_compressed(Z_NO_FLUSH);
  } else {
    s.out.write(line.data(), static_cast<std::streamsize>(line.size()));
    s.out.put('\n');
  }
  if (!s.out) throw IoError("write failed: " + s.path);
}

void LineSink::close() {
  Impl& s = *impl_;
  if (!s.open) return;
  if (s.gz) {
    s.zs.next_in = nullptr;
    s.zs.avail_in = 0;
    s.sink_compressed(Z_FINISH);
    deflateEnd(&s.zs);
  }
  s.out.flush();
  bool ok = static_cast<bool>(s.out);
  s.out.close();
  s.open = false;
  if (!ok) throw IoError("flush failed: " + s.path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace kgrec
