#ifndef HYPERCONV_SCALAR_HPP
#define HYPERCONV_SCALAR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hyperconv {

using int128 = __int128;
using uint128 = unsigned __int128;

// Error taxonomy mirrored by the CLI exit codes.
class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

class overflow_error : public std::runtime_error {
 public:
  explicit overflow_error(const std::string& what) : std::runtime_error(what) {}
};

class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

class verification_error : public std::runtime_error {
 public:
  explicit verification_error(const std::string& what) : std::runtime_error(what) {}
};

int128 checked_add(int128 a, int128 b);
int128 checked_sub(int128 a, int128 b);
int128 checked_mul(int128 a, int128 b);
int128 checked_pow(int128 base, unsigned exp);

std::string to_string(int128 v);
double to_double(int128 v);

// Exact 128-bit integer or a double, with explicit exactness. Exact arithmetic
// is overflow-checked and throws instead of wrapping; mixing an exact value
// with an inexact one demotes the result to inexact.
class ScalarValue {
 public:
  ScalarValue() = default;

  static ScalarValue from_int(int128 v) {
    ScalarValue s;
    s.exact_ = v;
    s.approx_ = to_double(v);
    s.is_exact_ = true;
    return s;
  }

  static ScalarValue from_double(double v) {
    ScalarValue s;
    s.exact_ = 0;
    s.approx_ = v;
    s.is_exact_ = false;
    return s;
  }

  bool is_exact() const { return is_exact_; }

  int128 exact() const {
    if (!is_exact_) throw domain_error("ScalarValue: exact() on inexact value");
    return exact_;
  }

  double approx() const { return approx_; }

  ScalarValue operator+(const ScalarValue& o) const {
    if (is_exact_ && o.is_exact_) return from_int(checked_add(exact_, o.exact_));
    return from_double(approx_ + o.approx_);
  }

  ScalarValue operator-(const ScalarValue& o) const {
    if (is_exact_ && o.is_exact_) return from_int(checked_sub(exact_, o.exact_));
    return from_double(approx_ - o.approx_);
  }

  ScalarValue operator*(const ScalarValue& o) const {
    if (is_exact_ && o.is_exact_) return from_int(checked_mul(exact_, o.exact_));
    return from_double(approx_ * o.approx_);
  }

  ScalarValue& operator+=(const ScalarValue& o) { return *this = *this + o; }
  ScalarValue& operator-=(const ScalarValue& o) { return *this = *this - o; }
  ScalarValue& operator*=(const ScalarValue& o) { return *this = *this * o; }

  bool operator==(const ScalarValue& o) const {
    if (is_exact_ && o.is_exact_) return exact_ == o.exact_;
    return approx_ == o.approx_;
  }

  std::string str() const;

 private:
  int128 exact_ = 0;
  double approx_ = 0.0;
  bool is_exact_ = true;
};

// Compensated accumulator for the float summation paths. Fixed iteration
// order upstream keeps results reproducible across runs.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

// Process-wide cap on sieve-style allocations, in MiB. Settable from code;
// the CLI seeds it from HYPERCONV_MEM_CAP_MB.
void set_memory_cap_mb(uint64_t mb);
uint64_t memory_cap_mb();
void check_allocation(uint64_t bytes, const char* what);

}  // namespace hyperconv

#endif  // HYPERCONV_SCALAR_HPP
