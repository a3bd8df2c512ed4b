#include "lowrank/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace lowrank {

namespace {

constexpr long long kMaxEntries = 1LL << 40;

void check_dims(const std::vector<int>& dims) {
    require(!dims.empty(), errc::dims_mismatch, "tensor order must be at least 1");
    long long total = 1;
    for (int n : dims) {
        require(n >= 1, errc::dims_mismatch, "every mode dimension must be positive");
        total *= n;
        require(total <= kMaxEntries, errc::capacity_exceeded, "tensor would exceed the entry guard");
    }
}

} // namespace

Splitting::Splitting(std::vector<int> modes, int order) : modes_(std::move(modes)), order_(order) {
    require(order_ >= 1, errc::splitting_invalid, "order must be at least 1");
    require(!modes_.empty(), errc::splitting_empty, "t must contain at least one mode");
    std::sort(modes_.begin(), modes_.end());
    require(std::adjacent_find(modes_.begin(), modes_.end()) == modes_.end(),
            errc::splitting_invalid, "t contains a repeated mode");
    require(modes_.front() >= 1 && modes_.back() <= order_,
            errc::splitting_invalid, "t refers to a mode outside 1..d");
    require(static_cast<int>(modes_.size()) < order_, errc::splitting_full,
            "t must be a proper subset of the modes");
}

std::vector<int> Splitting::complement() const {
    std::vector<int> comp;
    comp.reserve(order_ - modes_.size());
    for (int mu = 1; mu <= order_; ++mu)
        if (!contains(mu)) comp.push_back(mu);
    return comp;
}

bool Splitting::contains(int mode) const {
    return std::binary_search(modes_.begin(), modes_.end(), mode);
}

std::string Splitting::label() const {
    std::ostringstream out;
    out << "t=";
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (i) out << '-';
        out << modes_[i];
    }
    return out.str();
}

std::vector<Splitting> Splitting::tt_family(int order) {
    require(order >= 2, errc::splitting_invalid, "TT family needs order >= 2");
    std::vector<Splitting> family;
    family.reserve(order - 1);
    for (int mu = 1; mu < order; ++mu) family.push_back(tt_prefix(mu, order));
    return family;
}

Splitting Splitting::tt_prefix(int mu, int order) {
    std::vector<int> modes(mu);
    std::iota(modes.begin(), modes.end(), 1);
    return Splitting(std::move(modes), order);
}

Tensor Tensor::zeros(std::vector<int> dims) {
    check_dims(dims);
    Tensor u;
    u.dims_ = std::move(dims);
    u.data_.assign(static_cast<std::size_t>(product_of_dims(u.dims_)), 0.0);
    return u;
}

Tensor Tensor::from_data(std::vector<int> dims, std::vector<double> data) {
    check_dims(dims);
    require(static_cast<long long>(data.size()) == product_of_dims(dims),
            errc::dims_mismatch, "data length does not match the mode dimensions");
    Tensor u;
    u.dims_ = std::move(dims);
    u.data_ = std::move(data);
    return u;
}

Tensor Tensor::rank_one(const std::vector<Eigen::VectorXd>& factors) {
    require(!factors.empty(), errc::dims_mismatch, "rank_one needs at least one factor");
    std::vector<int> dims;
    dims.reserve(factors.size());
    for (const auto& f : factors) dims.push_back(static_cast<int>(f.size()));
    Tensor u = zeros(dims);
    const int d = u.order();
    std::vector<int> idx(d, 0);
    for (long long l = 0; l < u.size(); ++l) {
        double v = 1.0;
        for (int mu = 0; mu < d; ++mu) v *= factors[mu][idx[mu]];
        u.data_[static_cast<std::size_t>(l)] = v;
        for (int mu = d - 1; mu >= 0; --mu) {
            if (++idx[mu] < dims[mu]) break;
            idx[mu] = 0;
        }
    }
    return u;
}

Tensor Tensor::basis(std::vector<int> dims, const std::vector<int>& index) {
    Tensor u = zeros(std::move(dims));
    require(static_cast<int>(index.size()) == u.order(), errc::dims_mismatch,
            "index order does not match tensor order");
    long long l = 0;
    for (int mu = 0; mu < u.order(); ++mu) {
        require(index[mu] >= 0 && index[mu] < u.dims()[mu], errc::dims_mismatch,
                "basis index out of range");
        l = l * u.dims()[mu] + index[mu];
    }
    u.data_[static_cast<std::size_t>(l)] = 1.0;
    return u;
}

double Tensor::dot(const Tensor& other) const {
    require(same_dims(other), errc::dims_mismatch, "dot requires equal dims");
    return vec().dot(other.vec());
}

Tensor& Tensor::operator+=(const Tensor& other) {
    require(same_dims(other), errc::dims_mismatch, "sum requires equal dims");
    vec() += other.vec();
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
    require(same_dims(other), errc::dims_mismatch, "difference requires equal dims");
    vec() -= other.vec();
    return *this;
}

Tensor& Tensor::operator*=(double scale) {
    vec() *= scale;
    return *this;
}

long long product_of_dims(const std::vector<int>& dims) {
    long long total = 1;
    for (int n : dims) total *= n;
    return total;
}

long long splitting_rows(const std::vector<int>& dims, const Splitting& t) {
    long long rows = 1;
    for (int mu : t.modes()) rows *= dims[mu - 1];
    return rows;
}

long long splitting_cols(const std::vector<int>& dims, const Splitting& t) {
    long long cols = 1;
    for (int nu : t.complement()) cols *= dims[nu - 1];
    return cols;
}

long long max_splitting_rank(const std::vector<int>& dims, const Splitting& t) {
    return std::min(splitting_rows(dims, t), splitting_cols(dims, t));
}

namespace {

// Row/column strides of each mode under the (t, t^c) matricization. Walking
// the canonical linear index with a last-mode-fastest odometer visits entries
// in storage order, so row/col can be updated incrementally.
struct UnfoldStrides {
    std::vector<long long> row;
    std::vector<long long> col;
};

UnfoldStrides unfold_strides(const std::vector<int>& dims, const Splitting& t) {
    const int d = static_cast<int>(dims.size());
    UnfoldStrides s{std::vector<long long>(d, 0), std::vector<long long>(d, 0)};
    long long acc = 1;
    const auto& tm = t.modes();
    for (auto it = tm.rbegin(); it != tm.rend(); ++it) {
        s.row[*it - 1] = acc;
        acc *= dims[*it - 1];
    }
    acc = 1;
    const auto comp = t.complement();
    for (auto it = comp.rbegin(); it != comp.rend(); ++it) {
        s.col[*it - 1] = acc;
        acc *= dims[*it - 1];
    }
    return s;
}

template <typename Visit>
void walk_unfolding(const std::vector<int>& dims, const Splitting& t, Visit&& visit) {
    const int d = static_cast<int>(dims.size());
    const auto strides = unfold_strides(dims, t);
    std::vector<int> idx(d, 0);
    long long row = 0, col = 0;
    const long long total = product_of_dims(dims);
    for (long long l = 0; l < total; ++l) {
        visit(l, row, col);
        for (int mu = d - 1; mu >= 0; --mu) {
            ++idx[mu];
            row += strides.row[mu];
            col += strides.col[mu];
            if (idx[mu] < dims[mu]) break;
            row -= static_cast<long long>(idx[mu]) * strides.row[mu];
            col -= static_cast<long long>(idx[mu]) * strides.col[mu];
            idx[mu] = 0;
        }
    }
}

} // namespace

Eigen::MatrixXd unfold(const Tensor& u, const Splitting& t) {
    require(t.order() == u.order(), errc::splitting_invalid,
            "splitting order does not match tensor order");
    Eigen::MatrixXd m(splitting_rows(u.dims(), t), splitting_cols(u.dims(), t));
    walk_unfolding(u.dims(), t, [&](long long l, long long row, long long col) {
        m(row, col) = u.data()[l];
    });
    return m;
}

Tensor fold(const Eigen::MatrixXd& m, const std::vector<int>& dims, const Splitting& t) {
    require(t.order() == static_cast<int>(dims.size()), errc::splitting_invalid,
            "splitting order does not match dims");
    require(m.rows() == splitting_rows(dims, t) && m.cols() == splitting_cols(dims, t),
            errc::dims_mismatch, "matrix shape does not match the splitting");
    Tensor u = Tensor::zeros(dims);
    walk_unfolding(dims, t, [&](long long l, long long row, long long col) {
        u.data()[l] = m(row, col);
    });
    return u;
}

} // namespace lowrank
