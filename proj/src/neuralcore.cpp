#include "lexcite/neuralcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lexcite::nn {

namespace {

constexpr double kLogClamp = 1e-12;

int shape_product(const std::vector<int>& shape) {
    int n = 1;
    for (int d : shape) {
        if (d < 0) throw std::runtime_error("negative array dimension");
        n *= d;
    }
    return n;
}

}  // namespace

Array::Array(std::vector<int> shape_, float fill)
    : shape(std::move(shape_)), v(static_cast<std::size_t>(shape_product(shape)), fill) {}

Array Array::from(std::vector<int> shape_, std::vector<float> values) {
    Array a;
    a.shape = std::move(shape_);
    if (shape_product(a.shape) != static_cast<int>(values.size()))
        throw std::runtime_error("array value count does not match shape");
    a.v = std::move(values);
    return a;
}

int Array::size() const { return static_cast<int>(v.size()); }

NodeId Graph::push(Node node) {
    if (swept_) throw std::runtime_error("graph already swept; build a new graph per step");
    nodes_.push_back(std::move(node));
    return static_cast<NodeId>(nodes_.size()) - 1;
}

const Graph::Node& Graph::at(NodeId id) const {
    if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
        throw std::runtime_error("node id out of range");
    return nodes_[static_cast<std::size_t>(id)];
}

Graph::Node& Graph::at(NodeId id) {
    return const_cast<Node&>(static_cast<const Graph*>(this)->at(id));
}

NodeId Graph::value(Array a) {
    Node n;
    n.op = Op::Value;
    n.out = std::move(a);
    return push(std::move(n));
}

NodeId Graph::param(Array* storage) {
    if (storage == nullptr) throw std::runtime_error("null parameter storage");
    Node n;
    n.op = Op::Param;
    n.out = *storage;
    n.storage = storage;
    return push(std::move(n));
}

NodeId Graph::gather_rows(NodeId table, std::vector<int> rows) {
    const Node& src = at(table);
    if (src.out.rank() != 2) throw std::runtime_error("gather_rows expects a matrix");
    int v = src.out.dim(0);
    int d = src.out.dim(1);
    Node n;
    n.op = Op::GatherRows;
    n.inputs = {table};
    n.out = Array({static_cast<int>(rows.size()), d});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        int r = rows[i];
        if (r >= v) throw std::runtime_error("gather_rows index out of range");
        if (r < 0) continue;
        std::copy_n(src.out.v.begin() + static_cast<std::size_t>(r) * static_cast<std::size_t>(d),
                    static_cast<std::size_t>(d),
                    n.out.v.begin() + i * static_cast<std::size_t>(d));
    }
    n.idx = std::move(rows);
    return push(std::move(n));
}

NodeId Graph::conv1d_valid(NodeId x, NodeId w, NodeId b) {
    const Node& xn = at(x);
    const Node& wn = at(w);
    const Node& bn = at(b);
    if (xn.out.rank() != 2 || wn.out.rank() != 2)
        throw std::runtime_error("conv1d_valid expects matrices for input and kernel");
    int l = xn.out.dim(0);
    int d = xn.out.dim(1);
    int k = wn.out.dim(0);
    if (wn.out.dim(1) != d) throw std::runtime_error("kernel width does not match input width");
    if (bn.out.size() != 1) throw std::runtime_error("conv bias must be a single value");
    if (l < k) throw std::runtime_error("sequence shorter than kernel size");

    int m = l - k + 1;
    Node n;
    n.op = Op::Conv1d;
    n.inputs = {x, w, b};
    n.out = Array({m});
    n.aux.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double s = static_cast<double>(bn.out[0]);
        for (int r = 0; r < k; ++r) {
            const float* xrow = xn.out.v.data() + static_cast<std::size_t>(i + r) * static_cast<std::size_t>(d);
            const float* wrow = wn.out.v.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(d);
            for (int c = 0; c < d; ++c) s += static_cast<double>(xrow[c]) * static_cast<double>(wrow[c]);
        }
        bool active = s > 0.0;
        n.aux[static_cast<std::size_t>(i)] = active ? 1.0f : 0.0f;
        n.out[i] = active ? static_cast<float>(s) : 0.0f;
    }
    return push(std::move(n));
}

NodeId Graph::global_max_pool(NodeId x) {
    const Node& xn = at(x);
    if (xn.out.size() == 0) throw std::runtime_error("max pool over an empty vector");
    int best = 0;
    for (int i = 1; i < xn.out.size(); ++i)
        if (xn.out[i] > xn.out[best]) best = i;
    Node n;
    n.op = Op::MaxPool;
    n.inputs = {x};
    n.out = Array({1});
    n.out[0] = xn.out[best];
    n.idx = {best};
    return push(std::move(n));
}

NodeId Graph::concat(const std::vector<NodeId>& parts) {
    if (parts.empty()) throw std::runtime_error("concat of no parts");
    Node n;
    n.op = Op::Concat;
    n.inputs = parts;
    int total = 0;
    for (NodeId p : parts) total += at(p).out.size();
    n.out = Array({total});
    int pos = 0;
    for (NodeId p : parts) {
        const Array& a = at(p).out;
        std::copy(a.v.begin(), a.v.end(), n.out.v.begin() + pos);
        pos += a.size();
    }
    return push(std::move(n));
}

NodeId Graph::dropout(NodeId x, float rate, bool train, Rng& rng) {
    if (rate < 0.0f || rate >= 1.0f) throw std::runtime_error("dropout rate must be in [0,1)");
    const Node& xn = at(x);
    Node n;
    n.op = Op::Dropout;
    n.inputs = {x};
    n.out = xn.out;
    n.aux.assign(xn.out.v.size(), 1.0f);
    if (train && rate > 0.0f) {
        float scale = 1.0f / (1.0f - rate);
        for (std::size_t i = 0; i < n.out.v.size(); ++i) {
            bool drop = rng.uniform() < static_cast<double>(rate);
            n.aux[i] = drop ? 0.0f : scale;
            n.out.v[i] = xn.out.v[i] * n.aux[i];
        }
    }
    return push(std::move(n));
}

NodeId Graph::linear(NodeId x, NodeId w, NodeId b) {
    const Node& xn = at(x);
    const Node& wn = at(w);
    const Node& bn = at(b);
    if (wn.out.rank() != 2) throw std::runtime_error("linear weight must be a matrix");
    int k = wn.out.dim(0);
    int h = wn.out.dim(1);
    if (xn.out.size() != h) throw std::runtime_error("linear input length does not match weight");
    if (bn.out.size() != k) throw std::runtime_error("linear bias length does not match weight");
    Node n;
    n.op = Op::Linear;
    n.inputs = {x, w, b};
    n.out = Array({k});
    for (int r = 0; r < k; ++r) {
        double s = static_cast<double>(bn.out[r]);
        const float* wrow = wn.out.v.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(h);
        for (int c = 0; c < h; ++c) s += static_cast<double>(wrow[c]) * static_cast<double>(xn.out[c]);
        n.out[r] = static_cast<float>(s);
    }
    return push(std::move(n));
}

NodeId Graph::softmax(NodeId x) {
    const Node& xn = at(x);
    if (xn.out.size() == 0) throw std::runtime_error("softmax over an empty vector");
    Node n;
    n.op = Op::Softmax;
    n.inputs = {x};
    n.out = Array({xn.out.size()});
    float mx = *std::max_element(xn.out.v.begin(), xn.out.v.end());
    double denom = 0.0;
    for (int i = 0; i < xn.out.size(); ++i) denom += std::exp(static_cast<double>(xn.out[i] - mx));
    for (int i = 0; i < xn.out.size(); ++i)
        n.out[i] = static_cast<float>(std::exp(static_cast<double>(xn.out[i] - mx)) / denom);
    return push(std::move(n));
}

NodeId Graph::stack_rows(const std::vector<NodeId>& rows) {
    if (rows.empty()) throw std::runtime_error("stack_rows of no rows");
    int width = at(rows[0]).out.size();
    Node n;
    n.op = Op::StackRows;
    n.inputs = rows;
    n.out = Array({static_cast<int>(rows.size()), width});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Array& a = at(rows[i]).out;
        if (a.size() != width) throw std::runtime_error("stack_rows needs equal-length rows");
        std::copy(a.v.begin(), a.v.end(), n.out.v.begin() + static_cast<std::ptrdiff_t>(i) * width);
    }
    return push(std::move(n));
}

NodeId Graph::weighted_cross_entropy(NodeId probs, std::vector<int> labels, Array alpha) {
    const Node& pn = at(probs);
    if (pn.out.rank() != 2) throw std::runtime_error("cross entropy expects a probability matrix");
    int rows = pn.out.dim(0);
    int k = pn.out.dim(1);
    if (static_cast<int>(labels.size()) != rows)
        throw std::runtime_error("label count does not match probability rows");
    if (alpha.size() != k) throw std::runtime_error("class weight length does not match class count");
    for (float a : alpha.v)
        if (!(a > 0.0f)) throw std::runtime_error("class weights must be strictly positive");
    for (int y : labels)
        if (y < 0 || y >= k) throw std::runtime_error("label index out of range");

    Node n;
    n.op = Op::CrossEntropy;
    n.inputs = {probs};
    double total = 0.0;
    for (int r = 0; r < rows; ++r) {
        double p = static_cast<double>(pn.out[r * k + labels[static_cast<std::size_t>(r)]]);
        total -= static_cast<double>(alpha[labels[static_cast<std::size_t>(r)]]) *
                 std::log(std::max(p, kLogClamp));
    }
    n.out = Array({1});
    n.out[0] = static_cast<float>(total / rows);
    n.idx = std::move(labels);
    n.aux = alpha.v;
    return push(std::move(n));
}

const Array& Graph::value_of(NodeId id) const { return at(id).out; }

float Graph::item(NodeId id) const {
    const Array& a = at(id).out;
    if (a.size() != 1) throw std::runtime_error("item() on a non-scalar node");
    return a[0];
}

const Array& Graph::grad_of(NodeId id) const {
    const Node& n = at(id);
    if (!swept_) throw std::runtime_error("gradients read before backward()");
    return n.grad;
}

void Graph::backward(NodeId loss) {
    Node& ln = at(loss);
    if (ln.out.size() != 1) throw std::runtime_error("backward from a non-scalar node");
    if (swept_) throw std::runtime_error("graph already swept");
    swept_ = true;

    for (Node& n : nodes_) n.grad = Array(n.out.shape);
    ln.grad[0] = 1.0f;

    for (NodeId id = static_cast<NodeId>(nodes_.size()) - 1; id >= 0; --id) {
        Node& n = at(id);
        switch (n.op) {
            case Op::Value:
            case Op::Param:
                break;
            case Op::GatherRows: {
                Node& src = at(n.inputs[0]);
                int d = src.out.dim(1);
                for (std::size_t i = 0; i < n.idx.size(); ++i) {
                    int r = n.idx[i];
                    if (r < 0) continue;
                    float* dst = src.grad.v.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(d);
                    const float* g = n.grad.v.data() + i * static_cast<std::size_t>(d);
                    for (int c = 0; c < d; ++c) dst[c] += g[c];
                }
                break;
            }
            case Op::Conv1d: {
                Node& xn = at(n.inputs[0]);
                Node& wn = at(n.inputs[1]);
                Node& bn = at(n.inputs[2]);
                int d = xn.out.dim(1);
                int k = wn.out.dim(0);
                int m = n.out.size();
                double db = 0.0;
                for (int i = 0; i < m; ++i) {
                    float g = n.grad[i] * n.aux[static_cast<std::size_t>(i)];
                    if (g == 0.0f) continue;
                    db += static_cast<double>(g);
                    for (int r = 0; r < k; ++r) {
                        const float* xrow =
                            xn.out.v.data() + static_cast<std::size_t>(i + r) * static_cast<std::size_t>(d);
                        const float* wrow =
                            wn.out.v.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(d);
                        float* dxrow =
                            xn.grad.v.data() + static_cast<std::size_t>(i + r) * static_cast<std::size_t>(d);
                        float* dwrow =
                            wn.grad.v.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(d);
                        for (int c = 0; c < d; ++c) {
                            dwrow[c] += g * xrow[c];
                            dxrow[c] += g * wrow[c];
                        }
                    }
                }
                bn.grad[0] += static_cast<float>(db);
                break;
            }
            case Op::MaxPool:
                at(n.inputs[0]).grad[n.idx[0]] += n.grad[0];
                break;
            case Op::Concat: {
                int pos = 0;
                for (NodeId p : n.inputs) {
                    Node& pn = at(p);
                    for (int i = 0; i < pn.out.size(); ++i) pn.grad[i] += n.grad[pos + i];
                    pos += pn.out.size();
                }
                break;
            }
            case Op::Dropout: {
                Node& xn = at(n.inputs[0]);
                for (std::size_t i = 0; i < n.aux.size(); ++i)
                    xn.grad.v[i] += n.grad.v[i] * n.aux[i];
                break;
            }
            case Op::Linear: {
                Node& xn = at(n.inputs[0]);
                Node& wn = at(n.inputs[1]);
                Node& bn = at(n.inputs[2]);
                int k = wn.out.dim(0);
                int h = wn.out.dim(1);
                for (int r = 0; r < k; ++r) {
                    float g = n.grad[r];
                    bn.grad[r] += g;
                    if (g == 0.0f) continue;
                    const float* wrow = wn.out.v.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(h);
                    float* dwrow = wn.grad.v.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(h);
                    for (int c = 0; c < h; ++c) {
                        dwrow[c] += g * xn.out[c];
                        xn.grad[c] += g * wrow[c];
                    }
                }
                break;
            }
            case Op::Softmax: {
                Node& xn = at(n.inputs[0]);
                double dot = 0.0;
                for (int i = 0; i < n.out.size(); ++i)
                    dot += static_cast<double>(n.grad[i]) * static_cast<double>(n.out[i]);
                for (int i = 0; i < n.out.size(); ++i)
                    xn.grad[i] += n.out[i] * (n.grad[i] - static_cast<float>(dot));
                break;
            }
            case Op::StackRows: {
                int width = n.out.dim(1);
                for (std::size_t i = 0; i < n.inputs.size(); ++i) {
                    Node& rn = at(n.inputs[i]);
                    for (int c = 0; c < width; ++c)
                        rn.grad[c] += n.grad.v[i * static_cast<std::size_t>(width) + static_cast<std::size_t>(c)];
                }
                break;
            }
            case Op::CrossEntropy: {
                Node& pn = at(n.inputs[0]);
                int rows = pn.out.dim(0);
                int k = pn.out.dim(1);
                float g = n.grad[0];
                for (int r = 0; r < rows; ++r) {
                    int y = n.idx[static_cast<std::size_t>(r)];
                    double p = std::max(static_cast<double>(pn.out[r * k + y]), kLogClamp);
                    pn.grad[r * k + y] += static_cast<float>(
                        -static_cast<double>(g) * static_cast<double>(n.aux[static_cast<std::size_t>(y)]) /
                        (static_cast<double>(rows) * p));
                }
                break;
            }
        }
    }
}

AdamState AdamState::for_param(const Array& param) {
    AdamState st;
    st.m = Array(param.shape);
    st.v = Array(param.shape);
    st.t = 0;
    return st;
}

void adam_step(Array& param, const Array& grad, AdamState& state, const AdamConfig& cfg) {
    if (param.shape != grad.shape || param.shape != state.m.shape)
        throw std::runtime_error("adam shapes do not agree");
    state.t += 1;
    double b1 = static_cast<double>(cfg.beta1);
    double b2 = static_cast<double>(cfg.beta2);
    double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < param.v.size(); ++i) {
        double g = static_cast<double>(grad.v[i]);
        double m = b1 * static_cast<double>(state.m.v[i]) + (1.0 - b1) * g;
        double v = b2 * static_cast<double>(state.v.v[i]) + (1.0 - b2) * g * g;
        state.m.v[i] = static_cast<float>(m);
        state.v.v[i] = static_cast<float>(v);
        double mhat = m / correction1;
        double vhat = v / correction2;
        param.v[i] -= static_cast<float>(static_cast<double>(cfg.step_size) * mhat /
                                         (std::sqrt(vhat) + static_cast<double>(cfg.epsilon)));
    }
}

}  // namespace lexcite::nn
