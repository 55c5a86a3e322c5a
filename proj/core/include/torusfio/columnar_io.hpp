#pragma once

#include <iosfwd>
#include <string>

#include "torusfio/operator_engine.hpp"
#include "torusfio/symbol_calculus.hpp"

namespace torusfio {

/// Columnar text format. One header line
///   # torusfio-symbol n=<dim> N=<points> Xi=<cutoff> name=<name> [lo=a,b hi=c,d]
/// then rows "k xi re im": flat node index, flat box index, value. lo/hi appear
/// when the box is not the symmetric cube. Dense operators use the tag
/// torusfio-dense and rows "row col re im".
void write_symbol_table(std::ostream& out, const LatticeSymbol& a);
LatticeSymbol read_symbol_table(std::istream& in);

void write_dense_operator(std::ostream& out, const DenseOperator& m);
DenseOperator read_dense_operator(std::istream& in);

/// Grid values, tag torusfio-function and rows "k re im".
void write_function(std::ostream& out, const PeriodicFunction& f);
PeriodicFunction read_function(std::istream& in);

/// %.17g
std::string format_real(double v);

}  // namespace torusfio
