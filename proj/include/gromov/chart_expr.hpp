#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gromov/algebraic.hpp"
#include "gromov/jet.hpp"
#include "gromov/multipoly.hpp"
#include "gromov/rational.hpp"

namespace gromov {

enum class NodeKind { Var, Const, Affine, Poly, Square, Branch, Blend, Compose };

std::string node_kind_name(NodeKind k);

struct ChartNode;
using Expr = std::shared_ptr<const ChartNode>;

/// Immutable expression node. Variables index the environment the node is
/// evaluated in; a Compose node evaluates `outer` in the environment formed
/// by its `args`.
struct ChartNode {
  NodeKind kind = NodeKind::Var;
  std::size_t index = 0;          // Var
  AlgebraicNumber constant;       // Const
  double approx = 0.0;            // Const, cached
  Rational offset;                // Affine: offset + sum coefs[i] x_i
  std::vector<Rational> coefs;    // Affine
  MultiPoly poly;                 // Poly; Branch fiber (var 0 = root, then params)
  Expr fiber;                     // Branch with a non-polynomial fiber
  Rational window_lo, window_hi;  // Branch: root searched in the open window
  unsigned root_index = 1;        // Branch: 1-based
  std::vector<Expr> args;         // Square[1], Branch params, Blend{t,u,v}, Compose inner
  Expr outer;                     // Compose

  std::uint64_t support = 0;      // free-variable bit mask
  unsigned degree = 1;            // implicitization degree surrogate

  std::size_t arity() const;      // highest free variable + 1
};

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a node cannot be evaluated at the requested point.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by the exact path when some value is irrational.
class NotExactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace expr {
Expr var(std::size_t i);
Expr constant(const Rational& c);
Expr constant(const AlgebraicNumber& c);
Expr affine(const Rational& offset, std::vector<Rational> coefs);
Expr poly(const MultiPoly& p);
Expr square(Expr e);
/// k-th real root in (lo, hi) of fiber(z, params...).
Expr branch(const MultiPoly& fiber, std::vector<Expr> params, const Rational& lo,
            const Rational& hi, unsigned k);
/// Unique root in (lo, hi) of a strictly monotone expression fiber(z, params...).
Expr branch(Expr fiber, std::vector<Expr> params, const Rational& lo, const Rational& hi);
Expr blend(Expr t, Expr u, Expr v);
/// outer(args...), folded when everything is polynomial.
Expr compose(Expr outer, std::vector<Expr> args);
/// Unsimplified composition node.
Expr compose_node(Expr outer, std::vector<Expr> args);
/// p(args...).
Expr apply(const MultiPoly& p, std::vector<Expr> args);
}  // namespace expr

/// Exact polynomial form over nvars variables when the node is polynomial.
std::optional<MultiPoly> as_polynomial(const Expr& e, std::size_t nvars);

/// Structural equality (DAG sharing ignored).
bool structurally_equal(const Expr& a, const Expr& b);

/// Jets of a list of expressions at one point.
std::vector<Jet<double>> eval_jets(std::span<const Expr> es, std::span<const double> point,
                                   unsigned order);
/// Exact jets; throws NotExactError if some value is irrational.
std::vector<Jet<Rational>> eval_jets_exact(std::span<const Expr> es,
                                           std::span<const Rational> point, unsigned order);
/// Jets of expressions at a point given by input jets (chain rule through
/// the environment).
std::vector<Jet<double>> eval_jets_in(std::span<const Expr> es, std::span<const Jet<double>> env);

double eval(const Expr& e, std::span<const double> point);
std::vector<double> eval(std::span<const Expr> es, std::span<const double> point);

}  // namespace gromov
