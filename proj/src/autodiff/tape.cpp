#include "pinnfp/autodiff/tape.hpp"

#include <cmath>
#include <string>

#include "pinnfp/error.hpp"

namespace pinnfp::autodiff {

Var Tape::variable(double value) {
  const auto idx = static_cast<std::uint32_t>(nodes_.size());
  Node n{Op::leaf, idx, idx, 0.0, value, 0.0, 0.0};
  check_finite(n);
  nodes_.push_back(n);
  leaves_.push_back(idx);
  return Var(this, idx, value);
}

std::vector<Var> Tape::variables(std::span<const double> values) {
  std::vector<Var> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(variable(v));
  return out;
}

void Tape::clear() {
  nodes_.clear();
  leaves_.clear();
  adjoints_.clear();
}

void Tape::evaluate(Node& n) const {
  const double va = nodes_[n.a].value;
  const double vb = nodes_[n.b].value;
  switch (n.op) {
    case Op::leaf:
      break;
    case Op::add:
      n.value = va + vb, n.da = 1.0, n.db = 1.0;
      break;
    case Op::sub:
      n.value = va - vb, n.da = 1.0, n.db = -1.0;
      break;
    case Op::mul:
      n.value = va * vb, n.da = vb, n.db = va;
      break;
    case Op::div:
      n.value = va / vb, n.da = 1.0 / vb, n.db = -n.value / vb;
      break;
    case Op::neg:
      n.value = -va, n.da = -1.0;
      break;
    case Op::add_const:
      n.value = va + n.c, n.da = 1.0;
      break;
    case Op::mul_const:
      n.value = va * n.c, n.da = n.c;
      break;
    case Op::const_sub:
      n.value = n.c - va, n.da = -1.0;
      break;
    case Op::const_div:
      n.value = n.c / va, n.da = -n.value / va;
      break;
    case Op::div_const:
      n.value = va / n.c, n.da = 1.0 / n.c;
      break;
    case Op::pow_const:
      n.value = std::pow(va, n.c), n.da = n.c * std::pow(va, n.c - 1.0);
      break;
    case Op::tanh: {
      const double t = std::tanh(va);
      n.value = t, n.da = 1.0 - t * t;
      break;
    }
    case Op::sigmoid: {
      const double s = sigmoid(va);
      n.value = s, n.da = s * (1.0 - s);
      break;
    }
    case Op::sin:
      n.value = std::sin(va), n.da = std::cos(va);
      break;
    case Op::cos:
      n.value = std::cos(va), n.da = -std::sin(va);
      break;
    case Op::exp:
      n.value = std::exp(va), n.da = n.value;
      break;
  }
}

void Tape::check_finite(const Node& n) const {
  if (!std::isfinite(n.value))
    throw NumericalError("non-finite value recorded at tape node " + std::to_string(nodes_.size()));
}

Var Tape::record(Op op, const Var& a, const Var& b, double c) {
  Node n{op, a.index(), b.index(), c, 0.0, 0.0, 0.0};
  evaluate(n);
  check_finite(n);
  const auto idx = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(n);
  return Var(this, idx, n.value);
}

Var Tape::record_unary(Op op, const Var& a, double c) { return record(op, a, a, c); }

void Tape::reset_adjoints() { adjoints_.assign(nodes_.size(), 0.0); }

void Tape::backward(const Var& output, double seed) {
  if (output.is_constant()) return;
  if (output.tape() != this) throw ConfigError("backward called on a Var from another tape");
  if (adjoints_.size() != nodes_.size()) adjoints_.resize(nodes_.size(), 0.0);
  // Accumulate into a scratch pass so repeated backward() calls add up.
  std::vector<double> local(output.index() + 1, 0.0);
  local[output.index()] = seed;
  for (std::size_t i = output.index() + 1; i-- > 0;) {
    const double g = local[i];
    if (g == 0.0) continue;
    adjoints_[i] += g;
    const Node& n = nodes_[i];
    if (n.op == Op::leaf) continue;
    local[n.a] += g * n.da;
    if (n.op == Op::add || n.op == Op::sub || n.op == Op::mul || n.op == Op::div) local[n.b] += g * n.db;
  }
}

double Tape::adjoint(const Var& v) const {
  if (v.is_constant()) return 0.0;
  return v.index() < adjoints_.size() ? adjoints_[v.index()] : 0.0;
}

double Tape::replay(const Var& output) {
  for (auto& n : nodes_) {
    evaluate(n);
    check_finite(n);
  }
  return output.is_constant() ? output.value() : nodes_[output.index()].value;
}

void Tape::set_leaves(std::span<const double> values) {
  if (values.size() != leaves_.size()) throw ConfigError("set_leaves: expected " + std::to_string(leaves_.size()) +
                                                         " values, got " + std::to_string(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) nodes_[leaves_[i]].value = values[i];
  for (auto& n : nodes_) {
    evaluate(n);
    check_finite(n);
  }
}

namespace {

Tape* common_tape(const Var& a, const Var& b) {
  if (a.is_constant()) return b.tape();
  if (!b.is_constant() && a.tape() != b.tape()) throw ConfigError("operands recorded on different tapes");
  return a.tape();
}

}  // namespace

Var operator+(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.value() + b.value());
  Tape* t = common_tape(a, b);
  if (a.is_constant()) return t->record_unary(Op::add_const, b, a.value());
  if (b.is_constant()) return t->record_unary(Op::add_const, a, b.value());
  return t->record(Op::add, a, b);
}

Var operator-(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.value() - b.value());
  Tape* t = common_tape(a, b);
  if (a.is_constant()) return t->record_unary(Op::const_sub, b, a.value());
  if (b.is_constant()) return t->record_unary(Op::add_const, a, -b.value());
  return t->record(Op::sub, a, b);
}

Var operator*(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.value() * b.value());
  Tape* t = common_tape(a, b);
  if (a.is_constant()) return t->record_unary(Op::mul_const, b, a.value());
  if (b.is_constant()) return t->record_unary(Op::mul_const, a, b.value());
  return t->record(Op::mul, a, b);
}

Var operator/(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.value() / b.value());
  Tape* t = common_tape(a, b);
  if (a.is_constant()) return t->record_unary(Op::const_div, b, a.value());
  if (b.is_constant()) return t->record_unary(Op::div_const, a, b.value());
  return t->record(Op::div, a, b);
}

Var operator-(const Var& a) {
  if (a.is_constant()) return Var(-a.value());
  return a.tape()->record_unary(Op::neg, a);
}

Var tanh(const Var& a) {
  if (a.is_constant()) return Var(std::tanh(a.value()));
  return a.tape()->record_unary(Op::tanh, a);
}

Var sigmoid(const Var& a) {
  if (a.is_constant()) return Var(sigmoid(a.value()));
  return a.tape()->record_unary(Op::sigmoid, a);
}

Var sin(const Var& a) {
  if (a.is_constant()) return Var(std::sin(a.value()));
  return a.tape()->record_unary(Op::sin, a);
}

Var cos(const Var& a) {
  if (a.is_constant()) return Var(std::cos(a.value()));
  return a.tape()->record_unary(Op::cos, a);
}

Var exp(const Var& a) {
  if (a.is_constant()) return Var(std::exp(a.value()));
  return a.tape()->record_unary(Op::exp, a);
}

Var pow(const Var& a, double exponent) {
  if (a.is_constant()) return Var(std::pow(a.value(), exponent));
  return a.tape()->record_unary(Op::pow_const, a, exponent);
}

}  // namespace pinnfp::autodiff
