#include "lupi/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "lupi/errors.hpp"

namespace lupi {

namespace {

void require_same_shape(const char* op, Var a, Var b) {
    if (a.shape() != b.shape())
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                             shape_string(b.shape()));
}

void require_same_tape(Var a, Var b) {
    if (a.tape != b.tape) throw ContractError("operands recorded on different tapes");
}

void accumulate(Tensor* dst, std::span<const double> src, double factor = 1.0) {
    if (!dst) return;
    auto d = dst->data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * src[i];
}

template <typename Fn>
Var unary(Var a, Fn&& f, std::function<double(double x, double y)> dydx) {
    const Tensor& x = a.value();
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
    Tape* tape = a.tape;
    const std::size_t out_id = tape->size();
    return tape->record(std::move(out), {a}, [tape, a, out_id, dydx](const Tensor& g, std::span<Tensor* const> grads) {
        if (!grads[0]) return;
        const Tensor& x = a.value();
        const Tensor& y = tape->value(Var{tape, out_id});
        auto d = grads[0]->data();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * dydx(x[i], y[i]);
    });
}

}  // namespace

const Tensor& Var::value() const {
    if (!tape) throw ContractError("unbound Var");
    return tape->value(*this);
}

Tensor Gradients::operator[](Var v) const {
    if (reached(v)) return *grads_[v.id];
    return Tensor(tape_->value(v).shape(), 0.0);
}

Var Tape::leaf(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, nullptr, true});
    return Var{this, nodes_.size() - 1};
}

Var Tape::constant(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, nullptr, false});
    return Var{this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, std::vector<Var> operands, BackwardRule rule) {
    Node node{std::move(value), {}, std::move(rule), false};
    for (const Var& v : operands) {
        if (v.tape != this) throw ContractError("operand recorded on a different tape");
        node.operands.push_back(v.id);
        node.requires_grad = node.requires_grad || nodes_[v.id].requires_grad;
    }
    nodes_.push_back(std::move(node));
    return Var{this, nodes_.size() - 1};
}

Gradients Tape::backward(Var loss) const {
    if (loss.tape != this) throw ContractError("loss recorded on a different tape");
    if (nodes_.empty()) throw ContractError("backward on an empty tape");
    if (value(loss).size() != 1)
        throw ContractError("backward requires a scalar loss, got shape " + shape_string(value(loss).shape()));

    std::vector<std::optional<Tensor>> grads(nodes_.size());
    grads[loss.id] = Tensor(value(loss).shape(), 1.0);
    std::vector<Tensor*> operand_grads;
    for (std::size_t id = loss.id + 1; id-- > 0;) {
        const Node& node = nodes_[id];
        if (!grads[id] || !node.rule || !node.requires_grad) continue;
        operand_grads.clear();
        for (std::size_t op : node.operands) {
            if (!nodes_[op].requires_grad) {
                operand_grads.push_back(nullptr);
                continue;
            }
            if (!grads[op]) grads[op] = Tensor(nodes_[op].value.shape(), 0.0);
            operand_grads.push_back(&*grads[op]);
        }
        node.rule(*grads[id], operand_grads);
    }
    return Gradients(*this, std::move(grads));
}

Var elementwise(ElementwiseKind kind, Var a, std::optional<Var> b, double constant) {
    const bool binary = kind == ElementwiseKind::Add || kind == ElementwiseKind::Sub || kind == ElementwiseKind::Mul;
    if (binary != b.has_value())
        throw ContractError(binary ? "binary elementwise op needs two operands" : "unary elementwise op takes one operand");
    switch (kind) {
        case ElementwiseKind::Add: return add(a, *b);
        case ElementwiseKind::Sub: return sub(a, *b);
        case ElementwiseKind::Mul: return mul(a, *b);
        case ElementwiseKind::Relu: return relu(a);
        case ElementwiseKind::Sigmoid: return sigmoid(a);
        case ElementwiseKind::Tanh: return tanh(a);
        case ElementwiseKind::Scale: return scale(a, constant);
    }
    throw ContractError("unknown elementwise kind");
}

Var reduce(ReduceKind kind, Var a, std::optional<std::size_t> axis) {
    if (!axis) return kind == ReduceKind::Sum ? sum(a) : mean(a);
    if (kind == ReduceKind::Mean) return mean(a, *axis);
    Var m = mean(a, *axis);
    return scale(m, static_cast<double>(a.value().dim(*axis)));
}

Var add(Var a, Var b) {
    require_same_tape(a, b);
    require_same_shape("add", a, b);
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
    return a.tape->record(std::move(out), {a, b}, [](const Tensor& g, std::span<Tensor* const> grads) {
        accumulate(grads[0], g.data());
        accumulate(grads[1], g.data());
    });
}

Var sub(Var a, Var b) {
    require_same_tape(a, b);
    require_same_shape("sub", a, b);
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
    return a.tape->record(std::move(out), {a, b}, [](const Tensor& g, std::span<Tensor* const> grads) {
        accumulate(grads[0], g.data());
        accumulate(grads[1], g.data(), -1.0);
    });
}

Var mul(Var a, Var b) {
    require_same_tape(a, b);
    require_same_shape("mul", a, b);
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
    return a.tape->record(std::move(out), {a, b}, [a, b](const Tensor& g, std::span<Tensor* const> grads) {
        if (grads[0])
            for (std::size_t i = 0; i < g.size(); ++i) (*grads[0])[i] += g[i] * b.value()[i];
        if (grads[1])
            for (std::size_t i = 0; i < g.size(); ++i) (*grads[1])[i] += g[i] * a.value()[i];
    });
}

Var relu(Var a) {
    return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var a) {
    return unary(
        a, [](double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); },
        [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
    return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var scale(Var a, double c) {
    Tensor out = a.value();
    for (auto& v : out.data()) v *= c;
    return a.tape->record(std::move(out), {a}, [c](const Tensor& g, std::span<Tensor* const> grads) {
        accumulate(grads[0], g.data(), c);
    });
}

Var sum(Var a) {
    double total = 0.0;
    for (double v : a.value().data()) total += v;
    return a.tape->record(Tensor::scalar(total), {a}, [](const Tensor& g, std::span<Tensor* const> grads) {
        if (!grads[0]) return;
        for (auto& d : grads[0]->data()) d += g[0];
    });
}

Var mean(Var a) {
    const double n = static_cast<double>(a.value().size());
    return scale(sum(a), 1.0 / n);
}

Var mean(Var a, std::size_t axis) {
    const Tensor& x = a.value();
    if (x.rank() == 1 && axis == 0) return reshape(mean(a), Shape{1});
    if (x.rank() != 2 || axis > 1)
        throw DimensionError("mean: axis " + std::to_string(axis) + " invalid for shape " + shape_string(x.shape()));
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    const std::size_t n = axis == 0 ? rows : cols;
    Tensor out(Shape{axis == 0 ? cols : rows}, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out[axis == 0 ? c : r] += x.at(r, c);
    for (auto& v : out.data()) v /= static_cast<double>(n);
    return a.tape->record(std::move(out), {a}, [rows, cols, axis, n](const Tensor& g, std::span<Tensor* const> grads) {
        if (!grads[0]) return;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                grads[0]->at(r, c) += g[axis == 0 ? c : r] / static_cast<double>(n);
    });
}

Var matmul(Var a, Var b) {
    require_same_tape(a, b);
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    if (x.rank() < 1 || x.rank() > 2 || y.rank() < 1 || y.rank() > 2)
        throw DimensionError("matmul: operands must be rank 1 or 2, got " + shape_string(x.shape()) + " and " +
                             shape_string(y.shape()));
    const std::size_t m = x.rank() == 2 ? x.dim(0) : 1;
    const std::size_t k = x.rank() == 2 ? x.dim(1) : x.dim(0);
    const std::size_t k2 = y.dim(0);
    const std::size_t n = y.rank() == 2 ? y.dim(1) : 1;
    if (k != k2)
        throw DimensionError("matmul: inner dimensions differ, " + shape_string(x.shape()) + " x " +
                             shape_string(y.shape()));

    Shape out_shape;
    if (x.rank() == 2) out_shape.push_back(m);
    if (y.rank() == 2) out_shape.push_back(n);
    if (out_shape.empty()) out_shape.push_back(1);
    Tensor out(out_shape, 0.0);
    auto o = out.data();
    auto xa = x.data();
    auto yb = y.data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double xv = xa[i * k + p];
            for (std::size_t j = 0; j < n; ++j) o[i * n + j] += xv * yb[p * n + j];
        }
    return a.tape->record(std::move(out), {a, b}, [a, b, m, k, n](const Tensor& g, std::span<Tensor* const> grads) {
        auto xa = a.value().data();
        auto yb = b.value().data();
        if (grads[0]) {
            auto d = grads[0]->data();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * yb[p * n + j];
                    d[i * k + p] += acc;
                }
        }
        if (grads[1]) {
            auto d = grads[1]->data();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    const double xv = xa[i * k + p];
                    for (std::size_t j = 0; j < n; ++j) d[p * n + j] += xv * g[i * n + j];
                }
        }
    });
}

Var reshape(Var a, Shape shape) {
    Tensor out = a.value().reshaped(std::move(shape));
    return a.tape->record(std::move(out), {a}, [](const Tensor& g, std::span<Tensor* const> grads) {
        accumulate(grads[0], g.data());
    });
}

Var stack(std::span<const Var> rows) {
    if (rows.empty()) throw ContractError("stack of an empty sequence");
    const Shape& row_shape = rows.front().shape();
    if (row_shape.size() != 1) throw DimensionError("stack expects vectors, got " + shape_string(row_shape));
    const std::size_t dim = row_shape[0];
    std::vector<double> data;
    data.reserve(rows.size() * dim);
    for (const Var& r : rows) {
        require_same_tape(rows.front(), r);
        if (r.shape() != row_shape)
            throw DimensionError("stack: shape mismatch " + shape_string(row_shape) + " vs " + shape_string(r.shape()));
        auto v = r.value().data();
        data.insert(data.end(), v.begin(), v.end());
    }
    Tensor out(Shape{rows.size(), dim}, std::move(data));
    return rows.front().tape->record(std::move(out), std::vector<Var>(rows.begin(), rows.end()),
                                     [dim](const Tensor& g, std::span<Tensor* const> grads) {
                                         for (std::size_t r = 0; r < grads.size(); ++r)
                                             accumulate(grads[r], g.data().subspan(r * dim, dim));
                                     });
}

Var softmax(Var logits) {
    Tensor out(logits.shape(), softmax(logits.value().data()));
    Tape* tape = logits.tape;
    const std::size_t out_id = tape->size();
    return tape->record(std::move(out), {logits}, [tape, out_id](const Tensor& g, std::span<Tensor* const> grads) {
        if (!grads[0]) return;
        const Tensor& p = tape->value(Var{tape, out_id});
        double dot = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) dot += g[i] * p[i];
        for (std::size_t i = 0; i < p.size(); ++i) (*grads[0])[i] += p[i] * (g[i] - dot);
    });
}

Var softmax_cross_entropy(Var logits, std::size_t label) {
    const Tensor& z = logits.value();
    if (z.rank() != 1) throw DimensionError("softmax_cross_entropy expects a logit vector, got " + shape_string(z.shape()));
    if (z.size() < 2) throw ContractError("softmax_cross_entropy needs at least two classes");
    if (label >= z.size())
        throw IndexError("label " + std::to_string(label) + " out of range for " + std::to_string(z.size()) + " classes");
    Tensor target(z.shape(), 0.0);
    target[label] = 1.0;
    return softmax_cross_entropy(logits, target);
}

Var softmax_cross_entropy(Var logits, const Tensor& target) {
    const Tensor& z = logits.value();
    if (z.shape() != target.shape())
        throw DimensionError("softmax_cross_entropy: logits " + shape_string(z.shape()) + " vs target " +
                             shape_string(target.shape()));
    const double mx = *std::max_element(z.data().begin(), z.data().end());
    double total = 0.0;
    for (double v : z.data()) total += std::exp(v - mx);
    const double log_norm = mx + std::log(total);
    double loss = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (target[i] != 0.0) loss -= target[i] * (z[i] - log_norm);
    return logits.tape->record(Tensor::scalar(loss), {logits},
                               [logits, target](const Tensor& g, std::span<Tensor* const> grads) {
                                   if (!grads[0]) return;
                                   const auto p = softmax(logits.value().data());
                                   double mass = 0.0;
                                   for (double t : target.data()) mass += t;
                                   for (std::size_t i = 0; i < p.size(); ++i)
                                       (*grads[0])[i] += g[0] * (mass * p[i] - target[i]);
                               });
}

Var mse(Var a, Var b) {
    require_same_tape(a, b);
    require_same_shape("mse", a, b);
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    const double n = static_cast<double>(x.size());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) total += (x[i] - y[i]) * (x[i] - y[i]);
    return a.tape->record(Tensor::scalar(total / n), {a, b}, [a, b, n](const Tensor& g, std::span<Tensor* const> grads) {
        const Tensor& x = a.value();
        const Tensor& y = b.value();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = 2.0 * (x[i] - y[i]) / n * g[0];
            if (grads[0]) (*grads[0])[i] += d;
            if (grads[1]) (*grads[1])[i] -= d;
        }
    });
}

Var cosine_distance(Var a, Var b) {
    require_same_tape(a, b);
    require_same_shape("cosine_distance", a, b);
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    if (nx == 0.0 || ny == 0.0) throw ContractError("cosine_distance of a zero vector");
    const double norm_x = std::sqrt(nx), norm_y = std::sqrt(ny);
    const double cos = dot / (norm_x * norm_y);
    return a.tape->record(
        Tensor::scalar(1.0 - cos), {a, b}, [a, b, cos, norm_x, norm_y](const Tensor& g, std::span<Tensor* const> grads) {
            const Tensor& x = a.value();
            const Tensor& y = b.value();
            // d cos / dx = y/(|x||y|) - cos x/|x|^2
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (grads[0]) (*grads[0])[i] -= g[0] * (y[i] / (norm_x * norm_y) - cos * x[i] / (norm_x * norm_x));
                if (grads[1]) (*grads[1])[i] -= g[0] * (x[i] / (norm_x * norm_y) - cos * y[i] / (norm_y * norm_y));
            }
        });
}

}  // namespace lupi
