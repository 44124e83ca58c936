#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lupi/tensor.hpp"

namespace lupi {

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }
};

/// Gradient of one backward pass, indexed by node id. Nodes the loss does not reach read as zeros.
class Gradients {
public:
    Gradients(const Tape& tape, std::vector<std::optional<Tensor>> grads) : tape_(&tape), grads_(std::move(grads)) {}

    Tensor operator[](Var v) const;
    bool reached(Var v) const { return v.id < grads_.size() && grads_[v.id].has_value(); }

private:
    const Tape* tape_;
    std::vector<std::optional<Tensor>> grads_;
};

/// Reverse-mode gradient tape. Nodes are appended in evaluation order, so the
/// record is topologically sorted by construction. One tape per thread.
class Tape {
public:
    /// Receives `grad_out` and accumulates into operand gradients; entries are null for operands
    /// that do not require a gradient.
    using BackwardRule = std::function<void(const Tensor& grad_out, std::span<Tensor* const> operand_grads)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Trainable input; backward() produces a gradient for it.
    Var leaf(Tensor value);
    /// Frozen input (teacher target, data); never differentiated.
    Var constant(Tensor value);

    Var record(Tensor value, std::vector<Var> operands, BackwardRule rule);

    const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
    bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Gradients of a scalar loss with respect to every node. Can be called repeatedly on the same tape.
    Gradients backward(Var loss) const;

private:
    struct Node {
        Tensor value;
        std::vector<std::size_t> operands;
        BackwardRule rule;
        bool requires_grad = false;
    };
    std::vector<Node> nodes_;
};

enum class ElementwiseKind { Add, Sub, Mul, Relu, Sigmoid, Tanh, Scale };
enum class ReduceKind { Sum, Mean };

Var elementwise(ElementwiseKind kind, Var a, std::optional<Var> b = std::nullopt, double constant = 1.0);
Var reduce(ReduceKind kind, Var a, std::optional<std::size_t> axis = std::nullopt);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var relu(Var a);
Var sigmoid(Var a);
Var tanh(Var a);
Var scale(Var a, double c);
Var sum(Var a);
Var mean(Var a);
Var mean(Var a, std::size_t axis);

/// Matrix product of rank-2 operands. A rank-1 right operand is treated as a column and yields a
/// rank-1 result; a rank-1 left operand is treated as a row.
Var matmul(Var a, Var b);

Var reshape(Var a, Shape shape);
/// Stacks equally shaped vectors into a [count x dim] matrix.
Var stack(std::span<const Var> rows);
Var softmax(Var logits);

/// -log softmax(logits)[label], stabilised by max subtraction.
Var softmax_cross_entropy(Var logits, std::size_t label);
/// -sum_c target_c log softmax(logits)_c against a fixed distribution.
Var softmax_cross_entropy(Var logits, const Tensor& target);
/// Mean of squared differences.
Var mse(Var a, Var b);
/// 1 - cos(a, b).
Var cosine_distance(Var a, Var b);

}  // namespace lupi
