#pragma once

#include "amortize/diff/tensor.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amortize::diff {

enum class OpKind {
    Leaf,
    MatMul,
    Add,
    Sub,
    Mul,
    Scale,      // multiply by a constant scalar
    AddScalar,  // add a constant scalar
    AddRow,     // broadcast-add a 1 x C row to every row of an R x C matrix
    Concat,     // column-wise concatenation
    Split,      // column slice [begin, end)
    Tanh,
    Softplus,
    Atan,
    Exp,
    Log,
    Square,
    Neg,
    Sum,      // all elements -> 1 x 1
    Mean,     // all elements -> 1 x 1
    SumCols,  // R x C -> R x 1
    MeanPool, // (G*k) x C -> G x C, mean over consecutive blocks of k rows
};

std::string_view op_name(OpKind kind);

/// Extra non-tensor operands of an op.
struct OpArgs {
    double scalar = 0.0;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t groups = 0;
};

class Graph;

/// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
class Var {
public:
    Var() = default;
    Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

    Graph* graph() const noexcept { return graph_; }
    std::size_t id() const noexcept { return id_; }
    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }

private:
    Graph* graph_ = nullptr;
    std::size_t id_ = 0;
};

struct Node {
    OpKind kind = OpKind::Leaf;
    std::vector<std::size_t> inputs;
    Tensor value;
    OpArgs args;
    std::string name;  // non-empty for named parameters
    bool needs_grad = false;
};

/// Define-by-run tape. Nodes are appended in evaluation order, so the node
/// sequence is always a valid topological order.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    /// Registers a trainable leaf. Registering the same name twice returns the first node.
    Var parameter(const std::string& name, const Tensor& value);
    Var constant(Tensor value);

    Var record(OpKind kind, std::vector<std::size_t> inputs, Tensor value, OpArgs args = {});

    const Node& node(std::size_t id) const { return nodes_.at(id); }
    std::size_t size() const noexcept { return nodes_.size(); }
    const std::map<std::string, std::size_t>& parameters() const noexcept { return params_; }

    /// d(loss)/d(parameter) for every registered parameter; parameters not on a
    /// path to the loss get zero tensors.
    std::map<std::string, Tensor> backward(Var loss) const;

private:
    std::vector<Node> nodes_;
    std::map<std::string, std::size_t> params_;
};

/// Applies `kind` to `inputs`, recording the result in the inputs' graph.
Var apply(OpKind kind, std::span<const Var> inputs, OpArgs args = {});

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);
Var add_row(Var a, Var row);
Var concat(std::span<const Var> parts);
Var concat(Var a, Var b);
Var split(Var a, std::size_t begin, std::size_t end);
Var tanh(Var a);
Var softplus(Var a);
Var atan(Var a);
Var exp(Var a);
Var log(Var a);
Var square(Var a);
Var neg(Var a);
Var sum(Var a);
Var mean(Var a);
Var sum_cols(Var a);
Var mean_pool(Var a, std::size_t groups);

/// Numerically stable log(1 + e^x).
double softplus_value(double x) noexcept;

}  // namespace amortize::diff
