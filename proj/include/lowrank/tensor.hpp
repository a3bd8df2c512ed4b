#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "lowrank/error.hpp"

namespace lowrank {

// Subset t of the mode indices {1..d} with 0 < |t| < d. Modes are 1-based and
// kept sorted; the complement is derived on demand.
class Splitting {
public:
    Splitting(std::vector<int> modes, int order);

    int order() const { return order_; }
    const std::vector<int>& modes() const { return modes_; }
    std::vector<int> complement() const;
    bool contains(int mode) const;

    // Wire encoding used in CSV headers and reports, e.g. "t=1-2".
    std::string label() const;

    // t = {1}, {1,2}, ..., {1..d-1}
    static std::vector<Splitting> tt_family(int order);
    static Splitting tt_prefix(int mu, int order);

private:
    std::vector<int> modes_;
    int order_ = 0;
};

// Dense order-d tensor of doubles in the canonical linearization: row-major
// over modes 1..d (mode d fastest).
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<int> dims);
    static Tensor from_data(std::vector<int> dims, std::vector<double> data);
    static Tensor rank_one(const std::vector<Eigen::VectorXd>& factors);
    // Unit coordinate tensor e_{i1} x ... x e_{id}; indices are 0-based.
    static Tensor basis(std::vector<int> dims, const std::vector<int>& index);

    int order() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    long long size() const { return static_cast<long long>(data_.size()); }
    bool same_dims(const Tensor& other) const { return dims_ == other.dims_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Eigen::Map<Eigen::VectorXd> vec() {
        return {data_.data(), static_cast<Eigen::Index>(data_.size())};
    }
    Eigen::Map<const Eigen::VectorXd> vec() const {
        return {data_.data(), static_cast<Eigen::Index>(data_.size())};
    }

    double norm() const { return vec().norm(); }
    double dot(const Tensor& other) const;

    Tensor& operator+=(const Tensor& other);
    Tensor& operator-=(const Tensor& other);
    Tensor& operator*=(double scale);

    friend Tensor operator+(Tensor a, const Tensor& b) { a += b; return a; }
    friend Tensor operator-(Tensor a, const Tensor& b) { a -= b; return a; }
    friend Tensor operator*(double s, Tensor a) { a *= s; return a; }

private:
    std::vector<int> dims_;
    std::vector<double> data_;
};

long long product_of_dims(const std::vector<int>& dims);
long long splitting_rows(const std::vector<int>& dims, const Splitting& t);
long long splitting_cols(const std::vector<int>& dims, const Splitting& t);
// D^{(t)} = min(rows, cols): the number of singular values of the unfolding.
long long max_splitting_rank(const std::vector<int>& dims, const Splitting& t);

// Matricization: rows indexed row-major by the t-modes (ascending), columns by
// the complement modes. Frobenius norm equals the tensor norm.
Eigen::MatrixXd unfold(const Tensor& u, const Splitting& t);
// Inverse of unfold for matching dims/splitting.
Tensor fold(const Eigen::MatrixXd& m, const std::vector<int>& dims, const Splitting& t);

} // namespace lowrank
