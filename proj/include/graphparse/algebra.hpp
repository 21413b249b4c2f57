#pragma once

// Pluggable representations of uncertainty. An algebra fixes a score domain,
// a combination operator with identity, a total order and optional casts to
// other algebras.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

namespace graphparse {

// A value in some algebra. Scores keep the algebra's internal weight (the
// probabilistic algebra works in log space) and expose the linear value.
class Score {
 public:
  Score() = default;
  Score(std::string algebra, double weight, double value)
      : algebra_(std::move(algebra)), weight_(weight), value_(value) {}

  const std::string& algebra() const { return algebra_; }
  double weight() const { return weight_; }
  double value() const { return value_; }
  friend bool operator==(const Score&, const Score&) = default;

 private:
  std::string algebra_;
  double weight_ = 0.0;
  double value_ = 0.0;
};

class ValuationAlgebra {
 public:
  virtual ~ValuationAlgebra() = default;

  virtual std::string_view id() const = 0;
  virtual double lower() const { return 0.0; }
  virtual double upper() const { return 1.0; }

  // Weight-level interface used in inner loops.
  virtual double encode(double value) const = 0;
  virtual double decode(double weight) const = 0;
  virtual double combine_weights(double a, double b) const = 0;
  virtual double identity_weight() const = 0;
  // Strict preference: true when `a` ranks above `b`.
  virtual bool better_weight(double a, double b) const = 0;

  bool in_domain(double value) const { return value >= lower() && value <= upper(); }

  // Throws AlgebraError when `value` is outside the domain.
  Score make(double value) const;
  Score from_weight(double weight) const;
  Score identity() const;
  // Throws AlgebraError if either operand belongs to another algebra.
  Score combine(const Score& a, const Score& b) const;
  bool better(const Score& a, const Score& b) const;
};

// combine = product, identity = 1; weights are natural logarithms.
class ProbabilisticAlgebra final : public ValuationAlgebra {
 public:
  std::string_view id() const override { return "probabilistic"; }
  double encode(double value) const override;
  double decode(double weight) const override;
  double combine_weights(double a, double b) const override { return a + b; }
  double identity_weight() const override { return 0.0; }
  bool better_weight(double a, double b) const override { return a > b; }
};

// combine = minimum, identity = 1.
class PossibilisticAlgebra final : public ValuationAlgebra {
 public:
  std::string_view id() const override { return "possibilistic"; }
  double encode(double value) const override;
  double decode(double weight) const override { return weight; }
  double combine_weights(double a, double b) const override { return a < b ? a : b; }
  double identity_weight() const override { return 1.0; }
  bool better_weight(double a, double b) const override { return a > b; }
};

using CastFn = std::function<double(double)>;

class AlgebraRegistry {
 public:
  // Probabilistic and possibilistic algebras, with the identity-on-[0,1]
  // cast from probabilistic to possibilistic.
  static AlgebraRegistry with_builtins();

  void add(std::shared_ptr<const ValuationAlgebra> algebra);
  void declare_cast(std::string from, std::string to, CastFn fn);

  const ValuationAlgebra& get(std::string_view id) const;
  bool has(std::string_view id) const;
  const CastFn* cast_fn(std::string_view from, std::string_view to) const;

 private:
  std::map<std::string, std::shared_ptr<const ValuationAlgebra>, std::less<>> algebras_;
  std::map<std::pair<std::string, std::string>, CastFn> casts_;
};

// Translates a score into `target`. Identity when the algebras match;
// throws AlgebraError when no cast is declared.
Score cast(const Score& score, const ValuationAlgebra& target, const AlgebraRegistry& algebras);

}  // namespace graphparse
