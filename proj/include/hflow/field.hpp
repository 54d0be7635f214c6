#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "hflow/lattice.hpp"

namespace hflow {

/// Component layout of a grid tensor field.
///   Scalar   - 1 value
///   Vector   - dim values (one contravariant or covariant slot)
///   Sym2     - symmetric 2-tensor, dim(dim+1)/2 independent components
///   FreeSym2 - one free slot + symmetric pair, dim * nsym components
///              (holds both d_a g_ij and Christoffel Gamma^k_pq)
///   SymSym   - two symmetric pairs, nsym * nsym (holds d_a d_b g_ij)
///   Full4    - dim^4, no symmetry exploited (holds R^l_ijk)
///   Raw      - explicit component count, internal scratch layouts
enum class TensorKind { Scalar, Vector, Sym2, FreeSym2, SymSym, Full4, Raw };

struct TensorShape {
    TensorKind kind = TensorKind::Scalar;
    int dim = 3;
    int raw_ncomp = 0;  // used when kind == Raw

    int nsym() const { return dim * (dim + 1) / 2; }
    int ncomp() const;
    bool operator==(const TensorShape&) const = default;
};

/// Index of the (i,j) pair in the packed symmetric layout (row-major upper
/// triangle: dim 3 -> 00,01,02,11,12,22).
inline int sym_index(int dim, int i, int j) {
    if (i > j) { int t = i; i = j; j = t; }
    // row-major upper triangle offset
    return i * dim - i * (i - 1) / 2 + (j - i);
}

/// Grid tensor field; values stored component-major (each component is a
/// contiguous scalar grid). Immutable sharing is by value copy.
class Field {
public:
    Field(const Lattice& lat, TensorShape shape);

    static Field scalar(const Lattice& lat) { return Field(lat, {TensorKind::Scalar, lat.dim(), 0}); }
    static Field vector(const Lattice& lat) { return Field(lat, {TensorKind::Vector, lat.dim(), 0}); }
    static Field sym2(const Lattice& lat) { return Field(lat, {TensorKind::Sym2, lat.dim(), 0}); }
    static Field free_sym2(const Lattice& lat) { return Field(lat, {TensorKind::FreeSym2, lat.dim(), 0}); }
    static Field sym_sym(const Lattice& lat) { return Field(lat, {TensorKind::SymSym, lat.dim(), 0}); }
    static Field full4(const Lattice& lat) { return Field(lat, {TensorKind::Full4, lat.dim(), 0}); }
    static Field raw(const Lattice& lat, int ncomp) { return Field(lat, {TensorKind::Raw, lat.dim(), ncomp}); }

    const Lattice& lattice() const { return lat_; }
    TensorShape shape() const { return shape_; }
    int ncomp() const { return ncomp_; }
    std::size_t nodes() const { return lat_.nodes(); }

    double* data(int c) { return data_.data() + static_cast<std::size_t>(c) * nodes_; }
    const double* data(int c) const { return data_.data() + static_cast<std::size_t>(c) * nodes_; }
    std::span<double> comp(int c) { return {data(c), nodes_}; }
    std::span<const double> comp(int c) const { return {data(c), nodes_}; }

    double& at(int c, std::size_t node) { return data_[static_cast<std::size_t>(c) * nodes_ + node]; }
    double at(int c, std::size_t node) const { return data_[static_cast<std::size_t>(c) * nodes_ + node]; }

    /// Symmetric 2-tensor accessor by (i,j).
    double& sym_at(int i, int j, std::size_t node) { return at(sym_index(lat_.dim(), i, j), node); }
    double sym_at(int i, int j, std::size_t node) const { return at(sym_index(lat_.dim(), i, j), node); }

    std::vector<double>& raw_values() { return data_; }
    const std::vector<double>& raw_values() const { return data_; }

    void fill(double v);
    bool finite() const;

    /// Field shifted by whole node offsets (periodic); used in equivariance tests.
    Field translated(const std::array<int, 3>& shift) const;

private:
    Lattice lat_;
    TensorShape shape_;
    int ncomp_;
    std::size_t nodes_;
    std::vector<double> data_;
};

/// Constant identity metric (delta_ij) on the lattice.
Field identity_metric(const Lattice& lat);

/// Max over nodes and components of |a - b| (shapes must match).
double max_abs_diff(const Field& a, const Field& b);

/// Max over nodes and components of |a|.
double max_abs(const Field& a);

}  // namespace hflow
