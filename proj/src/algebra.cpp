#include "graphparse/algebra.hpp"

#include <cmath>
#include <limits>

#include "graphparse/error.hpp"

namespace graphparse {

Score ValuationAlgebra::make(double value) const {
  if (std::isnan(value) || !in_domain(value)) {
    throw AlgebraError("value " + std::to_string(value) + " is outside the domain of '" +
                       std::string(id()) + "'");
  }
  const double w = encode(value);
  return Score(std::string(id()), w, decode(w));
}

Score ValuationAlgebra::from_weight(double weight) const {
  return Score(std::string(id()), weight, decode(weight));
}

Score ValuationAlgebra::identity() const { return from_weight(identity_weight()); }

Score ValuationAlgebra::combine(const Score& a, const Score& b) const {
  if (a.algebra() != id() || b.algebra() != id()) {
    throw AlgebraError("cannot combine '" + a.algebra() + "' and '" + b.algebra() + "' under '" +
                       std::string(id()) + "'");
  }
  return from_weight(combine_weights(a.weight(), b.weight()));
}

bool ValuationAlgebra::better(const Score& a, const Score& b) const {
  return better_weight(a.weight(), b.weight());
}

double ProbabilisticAlgebra::encode(double value) const {
  if (value <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(value);
}

double ProbabilisticAlgebra::decode(double weight) const { return std::exp(weight); }

double PossibilisticAlgebra::encode(double value) const { return value; }

AlgebraRegistry AlgebraRegistry::with_builtins() {
  AlgebraRegistry r;
  r.add(std::make_shared<ProbabilisticAlgebra>());
  r.add(std::make_shared<PossibilisticAlgebra>());
  r.declare_cast("probabilistic", "possibilistic", [](double v) { return v; });
  return r;
}

void AlgebraRegistry::add(std::shared_ptr<const ValuationAlgebra> algebra) {
  std::string key(algebra->id());
  if (algebras_.contains(key)) throw AlgebraError("algebra '" + key + "' is already registered");
  algebras_.emplace(std::move(key), std::move(algebra));
}

void AlgebraRegistry::declare_cast(std::string from, std::string to, CastFn fn) {
  casts_[{std::move(from), std::move(to)}] = std::move(fn);
}

const ValuationAlgebra& AlgebraRegistry::get(std::string_view id) const {
  auto it = algebras_.find(id);
  if (it == algebras_.end()) throw AlgebraError("unknown algebra '" + std::string(id) + "'");
  return *it->second;
}

bool AlgebraRegistry::has(std::string_view id) const { return algebras_.find(id) != algebras_.end(); }

const CastFn* AlgebraRegistry::cast_fn(std::string_view from, std::string_view to) const {
  auto it = casts_.find({std::string(from), std::string(to)});
  return it == casts_.end() ? nullptr : &it->second;
}

Score cast(const Score& score, const ValuationAlgebra& target, const AlgebraRegistry& algebras) {
  if (score.algebra() == target.id()) return score;
  const CastFn* fn = algebras.cast_fn(score.algebra(), target.id());
  if (fn == nullptr) {
    throw AlgebraError("no cast from '" + score.algebra() + "' to '" + std::string(target.id()) + "'");
  }
  return target.make((*fn)(score.value()));
}

}  // namespace graphparse
