#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace pinnfp::autodiff {

class Tape;

/// Scalar recorded on a Tape. A Var without a tape is a plain constant and records nothing,
/// so the same templated code evaluates either with or without gradient bookkeeping.
class Var {
 public:
  Var() = default;
  Var(double value) : value_(value) {}  // NOLINT: implicit promotion of constants

  double value() const { return value_; }
  bool is_constant() const { return tape_ == nullptr; }
  Tape* tape() const { return tape_; }
  std::uint32_t index() const { return index_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index, double value) : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
  double value_ = 0.0;
};

/// Elementary operations a Tape can record.
enum class Op : std::uint8_t {
  leaf,
  add,
  sub,
  mul,
  div,
  neg,
  add_const,   // a + c
  mul_const,   // a * c
  const_sub,   // c - a
  const_div,   // c / a
  div_const,   // a / c
  pow_const,   // a ^ c
  tanh,
  sigmoid,
  sin,
  cos,
  exp,
};

/// Linear record of elementary operations with their local partials.
///
/// Nodes are appended in evaluation order; reverse accumulation walks them backwards.
/// The op codes are kept so the tape can be replayed with new leaf values.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var variable(double value);
  std::vector<Var> variables(std::span<const double> values);

  std::size_t size() const { return nodes_.size(); }
  void clear();
  void reserve(std::size_t n) { nodes_.reserve(n); }

  /// Reverse sweep seeded with d(output)/d(output) = seed. Adjoints accumulate until reset.
  void backward(const Var& output, double seed = 1.0);
  void reset_adjoints();
  double adjoint(const Var& v) const;

  /// Recompute every node from the current leaf values, returning the value of `output`.
  double replay(const Var& output);
  /// Replace leaf values (in creation order) and replay.
  void set_leaves(std::span<const double> values);
  std::size_t leaf_count() const { return leaves_.size(); }

  // Recording primitives; user code goes through the Var operators below.
  Var record(Op op, const Var& a, const Var& b, double c = 0.0);
  Var record_unary(Op op, const Var& a, double c = 0.0);

 private:
  struct Node {
    Op op;
    std::uint32_t a;
    std::uint32_t b;
    double c;
    double value;
    double da;
    double db;
  };
  void evaluate(Node& n) const;
  void check_finite(const Node& n) const;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> leaves_;
  std::vector<double> adjoints_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

Var tanh(const Var& a);
Var sigmoid(const Var& a);
Var sin(const Var& a);
Var cos(const Var& a);
Var exp(const Var& a);
Var pow(const Var& a, double exponent);

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

inline double value_of(double v) { return v; }
inline double value_of(const Var& v) { return v.value(); }

}  // namespace pinnfp::autodiff
