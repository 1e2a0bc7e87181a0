#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ergo {

using cd = std::complex<double>;

/// Counter-based RNG stream: every (seed, stream) pair yields an independent,
/// platform-stable sequence of doubles in [0,1).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);
  double uniform();
  std::uint64_t next_u64();

 private:
  std::uint64_t state_;
};

/// Shortest text that round-trips the double exactly (17 significant digits).
std::string format_double(double x);

/// Worker-thread cap: ERGO_QCA_THREADS when set (>=1), hardware otherwise.
int worker_threads();

/// Runs fn(begin, end) over chunks of [0, n) on up to worker_threads() threads.
/// Chunk boundaries are deterministic; fn must only write disjoint slots.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

/// Minimal JSON emitter with insertion-ordered keys and 17-digit doubles,
/// so identical inputs serialize to identical bytes.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array(const std::string& key);
  JsonWriter& begin_object(const std::string& key);
  JsonWriter& end_array();
  JsonWriter& field(const std::string& key, const std::string& value);
  JsonWriter& field(const std::string& key, const char* value);
  JsonWriter& field(const std::string& key, double value);
  JsonWriter& field(const std::string& key, long long value);
  JsonWriter& field(const std::string& key, int value);
  JsonWriter& field(const std::string& key, bool value);
  JsonWriter& element(double value);
  JsonWriter& element(long long value);
  JsonWriter& element(const std::string& value);
  std::string str() const { return out_; }

 private:
  void comma();
  void key(const std::string& k);
  std::string out_;
  std::vector<bool> first_;
};

std::string json_escape(const std::string& s);

}  // namespace ergo
