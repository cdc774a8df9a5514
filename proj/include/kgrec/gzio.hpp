#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace kgrec {

// Line reader that transparently handles gzip-compressed and plain files.
// Strips the trailing newline and any '\r' before it.
class LineSource {
 public:
  explicit LineSource(const std::string& path);  // throws IoError
  ~LineSource();
  LineSource(const LineSource&) = delete;
  LineSource& operator=(const LineSource&) = delete;

  // False at end of input. Lines of any length are supported.
  bool next(std::string& line);
  std::size_t line_number() const { return line_number_; }
  const std::string& path() const { return path_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string path_;
  std::size_t line_number_ = 0;
};

// Line writer. Paths ending in ".gz" are deflate-compressed with a fixed
// gzip header (zero mtime), so identical content produces identical bytes.
class LineSink {
 public:
  explicit LineSink(const std::string& path);  // throws IoError
  ~LineSink();
  LineSink(const LineSink&) = delete;
  LineSink& operator=(const LineSink&) = delete;

  void write(std::string_view line);  // appends '\n'
  void close();                       // flushes; throws IoError on failure

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Whole-file helpers for small artifacts.
std::string read_text_file(const std::string& path);            // throws IoError
void write_text_file(const std::string& path, std::string_view content);

}  // namespace kgrec
