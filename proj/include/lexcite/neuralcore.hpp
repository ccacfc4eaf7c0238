#pragma once

#include <cstdint>
#include <vector>

#include "lexcite/rng.hpp"

namespace lexcite::nn {

// Row-major dense array. 32-bit storage; reductions accumulate in double.
struct Array {
    std::vector<int> shape;
    std::vector<float> v;

    Array() = default;
    explicit Array(std::vector<int> shape_, float fill = 0.0f);
    static Array from(std::vector<int> shape_, std::vector<float> values);

    int size() const;
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    int rank() const { return static_cast<int>(shape.size()); }
    float& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    float operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
};

using NodeId = int;

// Eager tape: each call evaluates immediately and records what backward()
// needs for one reverse sweep. Parameter nodes alias caller-owned storage;
// their gradients accumulate across the whole sweep.
class Graph {
  public:
    NodeId value(Array a);
    NodeId param(Array* storage);

    // X[i] = table[rows[i]]; a row index of -1 yields a zero row and routes
    // no gradient (absent-token convention).
    NodeId gather_rows(NodeId table, std::vector<int> rows);

    // ReLU(b + <W, X[i..i+k-1]>) per valid window position; w is k x d,
    // b a single-element array.
    NodeId conv1d_valid(NodeId x, NodeId w, NodeId b);

    // Maximum entry; gradient goes to the first argmax on ties.
    NodeId global_max_pool(NodeId x);

    NodeId concat(const std::vector<NodeId>& parts);

    // Train mode zeroes entries with the given probability and scales
    // survivors by 1/(1-rate); inference mode is the identity.
    NodeId dropout(NodeId x, float rate, bool train, Rng& rng);

    // w x + b with w of shape K x H, x of length H, b of length K.
    NodeId linear(NodeId x, NodeId w, NodeId b);

    // Max-subtracted softmax over a vector.
    NodeId softmax(NodeId x);

    // Rows (equal-length vectors) stacked into an N x K matrix.
    NodeId stack_rows(const std::vector<NodeId>& rows);

    // -(1/N) sum_n alpha[y_n] log max(probs[n, y_n], 1e-12).
    NodeId weighted_cross_entropy(NodeId probs, std::vector<int> labels, Array alpha);

    const Array& value_of(NodeId id) const;
    float item(NodeId id) const;

    // Single reverse sweep from a scalar loss node.
    void backward(NodeId loss);
    const Array& grad_of(NodeId id) const;

  private:
    enum class Op {
        Value,
        Param,
        GatherRows,
        Conv1d,
        MaxPool,
        Concat,
        Dropout,
        Linear,
        Softmax,
        StackRows,
        CrossEntropy,
    };

    struct Node {
        Op op;
        std::vector<NodeId> inputs;
        Array out;
        Array grad;
        std::vector<int> idx;      // gather rows / argmax / labels
        std::vector<float> aux;    // dropout mask scales / alpha / pre-relu sign
        Array* storage = nullptr;  // Param only
    };

    NodeId push(Node node);
    const Node& at(NodeId id) const;
    Node& at(NodeId id);

    std::vector<Node> nodes_;
    bool swept_ = false;
};

struct AdamConfig {
    float step_size = 1e-3f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float epsilon = 1e-8f;
};

struct AdamState {
    Array m;
    Array v;
    std::int64_t t = 0;

    static AdamState for_param(const Array& param);
};

// Bias-corrected Adam update in place; each parameter keeps its own state
// and the step counter advances once per call.
void adam_step(Array& param, const Array& grad, AdamState& state, const AdamConfig& cfg);

}  // namespace lexcite::nn
