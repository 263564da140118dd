#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

namespace dicke::io {

// 17 significant digits, '.' decimal separator regardless of locale settings of the stream.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt(bool b) { return b ? "1" : "0"; }
inline std::string fmt(int x) { return std::to_string(x); }

inline std::string field(double x) { return fmt(x); }
inline std::string field(int x) { return fmt(x); }
inline std::string field(bool x) { return fmt(x); }
inline std::string field(const char* s) { return s; }
inline std::string field(const std::string& s) { return s; }

template <class... Ts>
std::string csv_row(const Ts&... xs) {
  std::string out;
  bool first = true;
  auto put = [&](const std::string& s) {
    if (!first) out += ',';
    out += s;
    first = false;
  };
  (put(field(xs)), ...);
  out += '\n';
  return out;
}

// Writes through a sibling temporary file and renames it over the target.
inline void write_atomic(const std::filesystem::path& target, const std::string& content) {
  namespace fs = std::filesystem;
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  fs::rename(tmp, target);
}

// Runs fn(i) for i in [0, count) on up to `threads` workers; results must be stored by index.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads > 0 ? threads : 1, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dicke::io
