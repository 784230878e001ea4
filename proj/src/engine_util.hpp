#pragma once

#include <functional>
#include <optional>

#include "gromov/engine.hpp"
#include "gromov/upoly.hpp"

namespace gromov::detail {

std::optional<UPoly> as_upoly(const Expr& h);
/// Rational within 2^-90 of an algebraic number.
Rational approx(const AlgebraicNumber& a);
/// k-th derivative of a univariate expression at x.
double derivative_at(const Expr& h, double x, unsigned k);
/// Sign changes of fn on (lo, hi) from `grid` samples, refined by bisection.
std::vector<double> crossings(const std::function<double(double)>& fn, double lo, double hi,
                              unsigned grid);
/// Sorted roots in (0,1) of the k-th derivative (exact for polynomials).
std::vector<Rational> derivative_roots(const Expr& h, unsigned k, unsigned grid);

Expr affine1(const Rational& c, const Rational& slope);
/// Norm at order r of a univariate map; throws EngineError when not converged.
NormReport measure(const Expr& e, unsigned r, const EngineConfig& cfg);
NormReport measure(std::span<const Expr> comps, std::size_t l, const MultiIndex& alpha,
                   const EngineConfig& cfg);
unsigned pieces_for(double K, const EngineConfig& cfg);

FamilyPiece compose_piece(const FamilyPiece& p, const Expr& inner, const std::string& provenance);

}  // namespace gromov::detail

namespace gromov::detail {

/// Replaces e by an equivalent polynomial node when it is one.
Expr fold(const Expr& e, std::size_t nvars);
std::vector<Expr> fold(std::vector<Expr> es, std::size_t nvars);

}  // namespace gromov::detail

namespace gromov::detail {

/// Rational endpoints just inside an open base cell (2^-60 inward).
Rational inner_lo(const AlgebraicNumber& a);
Rational inner_hi(const AlgebraicNumber& a);

/// Fiber coordinate at position p of a cell over the base expression y.
Expr level(const Decomposition& dec, std::size_t cell, std::size_t p, const Expr& y);
/// Cell chart of a slice with exact endpoints.
TriangularChart slice_chart(const Decomposition& dec, const Slice& s);

/// Records a chart with norms of itself and of f o chart for each f.
ChartRecord make_record(const TriangularChart& ch, const std::string& provenance,
                        const MultiIndex& alpha, const std::vector<Expr>& fns,
                        const EngineConfig& cfg);
/// Tiles the chart until chart and composites have derivative norm <= 1.
std::vector<ChartRecord> finalize(const TriangularChart& ch, const std::string& provenance,
                                  const MultiIndex& alpha, const std::vector<Expr>& fns,
                                  const EngineConfig& cfg);
void check_limit(std::size_t n, const EngineConfig& cfg);

}  // namespace gromov::detail
