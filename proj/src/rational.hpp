#pragma once
// Exact linear algebra over Q used to compute saturated Z_p-lattices.

#include <gmpxx.h>

#include <vector>

#include "iwasawa/modular.hpp"

namespace iwasawa::detail {

using Rat = mpq_class;
using RatRow = std::vector<Rat>;
using RatMatrix = std::vector<RatRow>;

int rat_val(const Rat& x, u64 p); // kInfiniteValuation for 0

// Reduced row echelon form; returns pivot columns. Zero rows are dropped.
std::vector<std::size_t> rref(RatMatrix& m, std::size_t ncols);

// Null space of the linear map x -> x*A where A is d x m (rows indexed by
// the source basis). Returns a basis of {x in Q^d : x A = 0}.
RatMatrix left_null_space(const RatMatrix& a, std::size_t d, std::size_t m);

// Basis of V ∩ Z_(p)^d for V the row span of `rows`: identity on a set of
// pivot columns chosen by minimal valuation, all entries p-integral.
RatMatrix saturate(RatMatrix rows, std::size_t ncols, u64 p);

// Residue of a p-integral rational modulo p^N.
u64 rat_residue(const Rat& x, const Modulus& mod);

} // namespace iwasawa::detail
