#include "amortize/diff/graph.hpp"

#include "amortize/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace amortize::diff {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMatrix>;
using Map = Eigen::Map<RowMatrix>;

MapC view(const Tensor& t) { return MapC(t.data().data(), Eigen::Index(t.rows()), Eigen::Index(t.cols())); }
Map view(Tensor& t) { return Map(t.data().data(), Eigen::Index(t.rows()), Eigen::Index(t.cols())); }
Eigen::Map<const Eigen::ArrayXd> flat(const Tensor& t) { return {t.data().data(), Eigen::Index(t.size())}; }
Eigen::Map<Eigen::ArrayXd> flat(Tensor& t) { return {t.data().data(), Eigen::Index(t.size())}; }

[[noreturn]] void shape_error(OpKind kind, const Tensor& a, const Tensor& b) {
    throw DimensionError(std::string(op_name(kind)) + ": incompatible shapes " + shape_string(a.shape()) +
                         " and " + shape_string(b.shape()));
}

void require_arity(OpKind kind, std::size_t got, std::size_t want) {
    if (got != want) {
        throw ContractError(std::string(op_name(kind)) + " expects " + std::to_string(want) + " inputs, got " +
                            std::to_string(got));
    }
}

template <class F>
Tensor map_unary(const Tensor& a, F f) {
    Tensor out({a.rows(), a.cols()});
    auto src = a.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
    return out;
}

Tensor as_matrix(const Tensor& t) {
    if (t.rank() == 2) return t;
    return Tensor({t.rows(), t.cols()}, std::vector<double>(t.data().begin(), t.data().end()));
}

Tensor compute(OpKind kind, const std::vector<const Tensor*>& in, const OpArgs& args) {
    switch (kind) {
        case OpKind::Leaf:
            throw ContractError("leaf nodes are created with Graph::parameter or Graph::constant");
        case OpKind::MatMul: {
            require_arity(kind, in.size(), 2);
            const Tensor& a = *in[0];
            const Tensor& b = *in[1];
            if (a.cols() != b.rows()) shape_error(kind, a, b);
            Tensor out = Tensor::matrix(a.rows(), b.cols());
            view(out).noalias() = view(a) * view(b);
            return out;
        }
        case OpKind::Add:
        case OpKind::Sub:
        case OpKind::Mul: {
            require_arity(kind, in.size(), 2);
            const Tensor& a = *in[0];
            const Tensor& b = *in[1];
            if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error(kind, a, b);
            Tensor out = as_matrix(a);
            auto o = out.data();
            auto bd = b.data();
            if (kind == OpKind::Add) {
                for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
            } else if (kind == OpKind::Sub) {
                for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bd[i];
            } else {
                for (std::size_t i = 0; i < o.size(); ++i) o[i] *= bd[i];
            }
            return out;
        }
        case OpKind::Scale:
            require_arity(kind, in.size(), 1);
            return map_unary(*in[0], [s = args.scalar](double x) { return s * x; });
        case OpKind::AddScalar:
            require_arity(kind, in.size(), 1);
            return map_unary(*in[0], [s = args.scalar](double x) { return x + s; });
        case OpKind::AddRow: {
            require_arity(kind, in.size(), 2);
            const Tensor& a = *in[0];
            const Tensor& r = *in[1];
            if (r.rows() != 1 || r.cols() != a.cols()) shape_error(kind, a, r);
            Tensor out = as_matrix(a);
            const std::size_t c = a.cols();
            auto o = out.data();
            auto rd = r.data();
            for (std::size_t i = 0; i < o.size(); ++i) o[i] += rd[i % c];
            return out;
        }
        case OpKind::Concat: {
            if (in.empty()) throw ContractError("concat expects at least one input");
            const std::size_t rows = in[0]->rows();
            std::size_t cols = 0;
            for (const Tensor* t : in) {
                if (t->rows() != rows) shape_error(kind, *in[0], *t);
                cols += t->cols();
            }
            Tensor out = Tensor::matrix(rows, cols);
            std::size_t offset = 0;
            for (const Tensor* t : in) {
                view(out).middleCols(Eigen::Index(offset), Eigen::Index(t->cols())) = view(*t);
                offset += t->cols();
            }
            return out;
        }
        case OpKind::Split: {
            require_arity(kind, in.size(), 1);
            const Tensor& a = *in[0];
            if (args.begin >= args.end || args.end > a.cols()) {
                throw DimensionError("split: column range [" + std::to_string(args.begin) + ", " +
                                     std::to_string(args.end) + ") invalid for shape " + shape_string(a.shape()));
            }
            Tensor out = Tensor::matrix(a.rows(), args.end - args.begin);
            view(out) = view(a).middleCols(Eigen::Index(args.begin), Eigen::Index(args.end - args.begin));
            return out;
        }
        case OpKind::Tanh: {
            require_arity(kind, in.size(), 1);
            // 1 - 2 / (e^{2x} + 1) vectorizes through Eigen's exp; absolute error stays at rounding level.
            Tensor out({in[0]->rows(), in[0]->cols()});
            flat(out) = 1.0 - 2.0 / ((2.0 * flat(*in[0])).exp() + 1.0);
            return out;
        }
        case OpKind::Softplus:
            require_arity(kind, in.size(), 1);
            return map_unary(*in[0], softplus_value);
        case OpKind::Atan:
            require_arity(kind, in.size(), 1);
            return map_unary(*in[0], [](double x) { return std::atan(x); });
        case OpKind::Exp: {
            require_arity(kind, in.size(), 1);
            Tensor out({in[0]->rows(), in[0]->cols()});
            flat(out) = flat(*in[0]).exp();
            return out;
        }
        case OpKind::Log:
            require_arity(kind, in.size(), 1);
            return map_unary(*in[0], [](double x) { return std::log(x); });
        case OpKind::Square:
            require_arity(kind, in.size(), 1);
            return map_unary(*in[0], [](double x) { return x * x; });
        case OpKind::Neg:
            require_arity(kind, in.size(), 1);
            return map_unary(*in[0], [](double x) { return -x; });
        case OpKind::Sum:
        case OpKind::Mean: {
            require_arity(kind, in.size(), 1);
            double total = 0.0;
            for (double v : in[0]->data()) total += v;
            if (kind == OpKind::Mean) total /= static_cast<double>(in[0]->size());
            return Tensor::scalar(total);
        }
        case OpKind::SumCols: {
            require_arity(kind, in.size(), 1);
            const Tensor& a = *in[0];
            Tensor out = Tensor::matrix(a.rows(), 1);
            for (std::size_t r = 0; r < a.rows(); ++r) {
                double acc = 0.0;
                for (std::size_t c = 0; c < a.cols(); ++c) acc += a(r, c);
                out[r] = acc;
            }
            return out;
        }
        case OpKind::MeanPool: {
            require_arity(kind, in.size(), 1);
            const Tensor& a = *in[0];
            const std::size_t g = args.groups;
            if (g == 0 || a.rows() % g != 0) {
                throw DimensionError("mean_pool: " + std::to_string(a.rows()) + " rows not divisible into " +
                                     std::to_string(g) + " groups");
            }
            const std::size_t k = a.rows() / g;
            const std::size_t c = a.cols();
            Tensor out = Tensor::matrix(g, c);
            auto src = a.data();
            auto dst = out.data();
            for (std::size_t gi = 0; gi < g; ++gi) {
                double* o = dst.data() + gi * c;
                for (std::size_t r = 0; r < k; ++r) {
                    const double* s = src.data() + (gi * k + r) * c;
                    for (std::size_t j = 0; j < c; ++j) o[j] += s[j];
                }
                const double inv = 1.0 / static_cast<double>(k);
                for (std::size_t j = 0; j < c; ++j) o[j] *= inv;
            }
            return out;
        }
    }
    throw ContractError("unknown op kind");
}

void accumulate(std::vector<Tensor>& grads, std::vector<bool>& has, std::size_t id, const Tensor& g) {
    if (!has[id]) {
        grads[id] = g;
        has[id] = true;
        return;
    }
    auto dst = grads[id].data();
    auto src = g.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

template <class F>
Tensor zip(const Tensor& upstream, const Tensor& x, F f) {
    Tensor out({upstream.rows(), upstream.cols()});
    auto u = upstream.data();
    auto xs = x.data();
    auto o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = u[i] * f(xs[i]);
    return out;
}

}  // namespace

std::string_view op_name(OpKind kind) {
    switch (kind) {
        case OpKind::Leaf: return "leaf";
        case OpKind::MatMul: return "matmul";
        case OpKind::Add: return "add";
        case OpKind::Sub: return "sub";
        case OpKind::Mul: return "mul";
        case OpKind::Scale: return "scale";
        case OpKind::AddScalar: return "add_scalar";
        case OpKind::AddRow: return "broadcast-add-row";
        case OpKind::Concat: return "concat";
        case OpKind::Split: return "split";
        case OpKind::Tanh: return "tanh";
        case OpKind::Softplus: return "softplus";
        case OpKind::Atan: return "atan";
        case OpKind::Exp: return "exp";
        case OpKind::Log: return "log";
        case OpKind::Square: return "square";
        case OpKind::Neg: return "neg";
        case OpKind::Sum: return "sum";
        case OpKind::Mean: return "mean";
        case OpKind::SumCols: return "sum_cols";
        case OpKind::MeanPool: return "mean_pool";
    }
    return "unknown";
}

double softplus_value(double x) noexcept {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

const Tensor& Var::value() const {
    if (!graph_) throw ContractError("use of an unbound Var");
    return graph_->node(id_).value;
}

Var Graph::parameter(const std::string& name, const Tensor& value) {
    if (auto it = params_.find(name); it != params_.end()) return Var(this, it->second);
    Node n;
    n.value = value;
    n.value.set_requires_grad(true);
    n.name = name;
    n.needs_grad = true;
    nodes_.push_back(std::move(n));
    params_.emplace(name, nodes_.size() - 1);
    return Var(this, nodes_.size() - 1);
}

Var Graph::constant(Tensor value) {
    Node n;
    value.set_requires_grad(false);
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

Var Graph::record(OpKind kind, std::vector<std::size_t> inputs, Tensor value, OpArgs args) {
    Node n;
    n.kind = kind;
    for (auto id : inputs) {
        if (id >= nodes_.size()) throw ContractError("op input refers to a node that does not precede it");
        n.needs_grad = n.needs_grad || nodes_[id].needs_grad;
    }
    n.inputs = std::move(inputs);
    n.value = std::move(value);
    n.value.set_requires_grad(n.needs_grad);
    n.args = args;
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

std::map<std::string, Tensor> Graph::backward(Var loss) const {
    if (loss.graph() != this) throw ContractError("backward: loss does not belong to this graph");
    const Tensor& lv = nodes_.at(loss.id()).value;
    if (lv.size() != 1) throw ContractError("backward: loss must be scalar, got shape " + shape_string(lv.shape()));

    std::vector<Tensor> grads(loss.id() + 1);
    std::vector<bool> has(loss.id() + 1, false);
    grads[loss.id()] = Tensor(lv.shape(), 1.0);
    has[loss.id()] = true;

    for (std::size_t id = loss.id() + 1; id-- > 0;) {
        if (!has[id]) continue;
        const Node& n = nodes_[id];
        if (n.kind == OpKind::Leaf || !n.needs_grad) continue;
        const Tensor& up = grads[id];
        auto wants = [&](std::size_t k) { return nodes_[n.inputs[k]].needs_grad; };
        auto in = [&](std::size_t k) -> const Tensor& { return nodes_[n.inputs[k]].value; };
        auto push = [&](std::size_t k, const Tensor& g) { accumulate(grads, has, n.inputs[k], g); };

        switch (n.kind) {
            case OpKind::Leaf: break;
            case OpKind::MatMul: {
                if (wants(0)) {
                    Tensor g = Tensor::matrix(in(0).rows(), in(0).cols());
                    view(g).noalias() = view(up) * view(in(1)).transpose();
                    push(0, g);
                }
                if (wants(1)) {
                    Tensor g = Tensor::matrix(in(1).rows(), in(1).cols());
                    view(g).noalias() = view(in(0)).transpose() * view(up);
                    push(1, g);
                }
                break;
            }
            case OpKind::Add:
                if (wants(0)) push(0, up);
                if (wants(1)) push(1, up);
                break;
            case OpKind::Sub:
                if (wants(0)) push(0, up);
                if (wants(1)) push(1, map_unary(up, [](double x) { return -x; }));
                break;
            case OpKind::Mul:
                if (wants(0)) {
                    Tensor g = up;
                    auto gd = g.data();
                    auto b = in(1).data();
                    for (std::size_t i = 0; i < gd.size(); ++i) gd[i] *= b[i];
                    push(0, g);
                }
                if (wants(1)) {
                    Tensor g = up;
                    auto gd = g.data();
                    auto a = in(0).data();
                    for (std::size_t i = 0; i < gd.size(); ++i) gd[i] *= a[i];
                    push(1, g);
                }
                break;
            case OpKind::Scale:
                push(0, map_unary(up, [s = n.args.scalar](double x) { return s * x; }));
                break;
            case OpKind::AddScalar:
                push(0, up);
                break;
            case OpKind::AddRow: {
                if (wants(0)) push(0, up);
                if (wants(1)) {
                    Tensor g = Tensor::matrix(1, up.cols());
                    view(g) = view(up).colwise().sum();
                    push(1, g);
                }
                break;
            }
            case OpKind::Concat: {
                std::size_t offset = 0;
                for (std::size_t k = 0; k < n.inputs.size(); ++k) {
                    const std::size_t c = in(k).cols();
                    if (wants(k)) {
                        Tensor g = Tensor::matrix(up.rows(), c);
                        view(g) = view(up).middleCols(Eigen::Index(offset), Eigen::Index(c));
                        push(k, g);
                    }
                    offset += c;
                }
                break;
            }
            case OpKind::Split: {
                Tensor g = Tensor::matrix(in(0).rows(), in(0).cols());
                view(g).middleCols(Eigen::Index(n.args.begin), Eigen::Index(n.args.end - n.args.begin)) = view(up);
                push(0, g);
                break;
            }
            case OpKind::Tanh: {
                // d tanh = 1 - y^2, using the stored output
                Tensor g = zip(up, n.value, [](double y) { return 1.0 - y * y; });
                push(0, g);
                break;
            }
            case OpKind::Softplus:
                push(0, zip(up, in(0), [](double x) { return 1.0 / (1.0 + std::exp(-x)); }));
                break;
            case OpKind::Atan:
                push(0, zip(up, in(0), [](double x) { return 1.0 / (1.0 + x * x); }));
                break;
            case OpKind::Exp:
                push(0, zip(up, n.value, [](double y) { return y; }));
                break;
            case OpKind::Log:
                push(0, zip(up, in(0), [](double x) { return 1.0 / x; }));
                break;
            case OpKind::Square:
                push(0, zip(up, in(0), [](double x) { return 2.0 * x; }));
                break;
            case OpKind::Neg:
                push(0, map_unary(up, [](double x) { return -x; }));
                break;
            case OpKind::Sum:
            case OpKind::Mean: {
                double g = up.item();
                if (n.kind == OpKind::Mean) g /= static_cast<double>(in(0).size());
                push(0, Tensor(in(0).shape(), g));
                break;
            }
            case OpKind::SumCols: {
                Tensor g = Tensor::matrix(in(0).rows(), in(0).cols());
                for (std::size_t r = 0; r < g.rows(); ++r)
                    for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) = up[r];
                push(0, g);
                break;
            }
            case OpKind::MeanPool: {
                const std::size_t groups = n.args.groups;
                const std::size_t k = in(0).rows() / groups;
                const std::size_t c = in(0).cols();
                const double inv = 1.0 / static_cast<double>(k);
                Tensor g = Tensor::matrix(in(0).rows(), c);
                auto gd = g.data();
                auto ud = up.data();
                for (std::size_t gi = 0; gi < groups; ++gi)
                    for (std::size_t r = 0; r < k; ++r)
                        for (std::size_t j = 0; j < c; ++j) gd[(gi * k + r) * c + j] = ud[gi * c + j] * inv;
                push(0, g);
                break;
            }
        }
    }

    std::map<std::string, Tensor> out;
    for (const auto& [name, id] : params_) {
        if (id < has.size() && has[id]) {
            out.emplace(name, grads[id]);
        } else {
            out.emplace(name, Tensor(nodes_[id].value.shape(), 0.0));
        }
    }
    return out;
}

Var apply(OpKind kind, std::span<const Var> inputs, OpArgs args) {
    if (inputs.empty()) throw ContractError(std::string(op_name(kind)) + ": no inputs");
    Graph* g = inputs.front().graph();
    if (!g) throw ContractError("use of an unbound Var");
    std::vector<const Tensor*> values;
    std::vector<std::size_t> ids;
    values.reserve(inputs.size());
    ids.reserve(inputs.size());
    for (const Var& v : inputs) {
        if (v.graph() != g) throw ContractError(std::string(op_name(kind)) + ": inputs from different graphs");
        values.push_back(&v.value());
        ids.push_back(v.id());
    }
    Tensor out = compute(kind, values, args);
    return g->record(kind, std::move(ids), std::move(out), args);
}

namespace {
Var unary(OpKind kind, Var a, OpArgs args = {}) {
    const Var in[] = {a};
    return apply(kind, in, args);
}
Var binary(OpKind kind, Var a, Var b) {
    const Var in[] = {a, b};
    return apply(kind, in);
}
}  // namespace

Var matmul(Var a, Var b) { return binary(OpKind::MatMul, a, b); }
Var add(Var a, Var b) { return binary(OpKind::Add, a, b); }
Var sub(Var a, Var b) { return binary(OpKind::Sub, a, b); }
Var mul(Var a, Var b) { return binary(OpKind::Mul, a, b); }
Var scale(Var a, double factor) { return unary(OpKind::Scale, a, {.scalar = factor}); }
Var add_scalar(Var a, double offset) { return unary(OpKind::AddScalar, a, {.scalar = offset}); }
Var add_row(Var a, Var row) { return binary(OpKind::AddRow, a, row); }
Var concat(std::span<const Var> parts) { return apply(OpKind::Concat, parts); }
Var concat(Var a, Var b) { return binary(OpKind::Concat, a, b); }
Var split(Var a, std::size_t begin, std::size_t end) {
    return unary(OpKind::Split, a, {.begin = begin, .end = end});
}
Var tanh(Var a) { return unary(OpKind::Tanh, a); }
Var softplus(Var a) { return unary(OpKind::Softplus, a); }
Var atan(Var a) { return unary(OpKind::Atan, a); }
Var exp(Var a) { return unary(OpKind::Exp, a); }
Var log(Var a) { return unary(OpKind::Log, a); }
Var square(Var a) { return unary(OpKind::Square, a); }
Var neg(Var a) { return unary(OpKind::Neg, a); }
Var sum(Var a) { return unary(OpKind::Sum, a); }
Var mean(Var a) { return unary(OpKind::Mean, a); }
Var sum_cols(Var a) { return unary(OpKind::SumCols, a); }
Var mean_pool(Var a, std::size_t groups) { return unary(OpKind::MeanPool, a, {.groups = groups}); }

}  // namespace amortize::diff
