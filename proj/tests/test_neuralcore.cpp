#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lexcite/neuralcore.hpp"
#include "lexcite/rng.hpp"

using lexcite::Rng;
using namespace lexcite::nn;

namespace {

Array vec(std::vector<float> v) {
    int n = static_cast<int>(v.size());
    return Array::from({n}, std::move(v));
}

Array mat(int r, int c, std::vector<float> v) { return Array::from({r, c}, std::move(v)); }

}  // namespace

TEST_CASE("array construction and element access") {
    Array a({2, 3}, 1.5f);
    CHECK(a.size() == 6);
    CHECK(a.rank() == 2);
    CHECK(a.dim(0) == 2);
    CHECK(a.dim(1) == 3);
    for (int i = 0; i < 6; ++i) CHECK(a[i] == 1.5f);
    a[4] = -2.0f;
    CHECK(a[4] == -2.0f);

    Array b = Array::from({3}, {1.0f, 2.0f, 3.0f});
    CHECK(b.size() == 3);
    CHECK(b[2] == 3.0f);

    CHECK_THROWS_WITH_AS(Array({-1, 2}), doctest::Contains("negative"), std::runtime_error);
    CHECK_THROWS_WITH_AS(Array::from({2, 2}, {1.0f}), doctest::Contains("count"),
                         std::runtime_error);
}

TEST_CASE("rng is deterministic and in range") {
    Rng a(42), b(42), c(43);
    bool same = true, diff = false;
    for (int i = 0; i < 64; ++i) {
        double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        if (u != b.uniform()) same = false;
        if (u != c.uniform()) diff = true;
    }
    CHECK(same);
    CHECK(diff);

    Rng r(7);
    for (int i = 0; i < 200; ++i) {
        double x = r.uniform(-2.0, 5.0);
        CHECK(x >= -2.0);
        CHECK(x < 5.0);
        CHECK(r.below(13) < 13u);
        CHECK(std::isfinite(r.gaussian()));
    }

    Rng g(11);
    double mean = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) mean += g.gaussian();
    mean /= n;
    CHECK(std::abs(mean) < 0.05);

    std::vector<int> order{0, 1, 2, 3, 4, 5, 6, 7};
    Rng s1(3), s2(3);
    auto copy = order;
    lexcite::shuffle(order, s1);
    lexcite::shuffle(copy, s2);
    CHECK(order == copy);
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("convolution with fused rectifier matches hand computation") {
    Graph g;
    Array xs = mat(3, 2, {1, 0, 0, 1, 2, 2});
    Array ws = mat(2, 2, {1, 1, 1, 1});
    Array bs = vec({0});
    NodeId x = g.param(&xs);
    NodeId w = g.param(&ws);
    NodeId b = g.param(&bs);
    NodeId y = g.conv1d_valid(x, w, b);
    const Array& out = g.value_of(y);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(out[1] == doctest::Approx(5.0).epsilon(1e-7));

    NodeId pooled = g.global_max_pool(y);
    CHECK(g.item(pooled) == doctest::Approx(5.0));
    g.backward(pooled);
    const Array& dw = g.grad_of(w);
    // winning window covers rows 1 and 2 of the input
    CHECK(dw[0] == doctest::Approx(0.0));
    CHECK(dw[1] == doctest::Approx(1.0));
    CHECK(dw[2] == doctest::Approx(2.0));
    CHECK(dw[3] == doctest::Approx(2.0));
    CHECK(g.grad_of(b)[0] == doctest::Approx(1.0));
    const Array& dx = g.grad_of(x);
    CHECK(dx[0] == doctest::Approx(0.0));
    CHECK(dx[1] == doctest::Approx(0.0));
    for (int i = 2; i < 6; ++i) CHECK(dx[i] == doctest::Approx(1.0));
}

TEST_CASE("negative pre-activations clamp to zero and block gradients") {
    Graph g;
    Array xs = mat(3, 2, {1, 0, 0, 1, 2, 2});
    Array ws = mat(2, 2, {1, 1, 1, 1});
    Array bs = vec({-10});
    NodeId w = g.param(&ws);
    NodeId y = g.conv1d_valid(g.value(xs), w, g.value(bs));
    const Array& out = g.value_of(y);
    CHECK(out[0] == 0.0f);
    CHECK(out[1] == 0.0f);
    NodeId pooled = g.global_max_pool(y);
    g.backward(pooled);
    const Array& dw = g.grad_of(w);
    for (int i = 0; i < 4; ++i) CHECK(dw[i] == 0.0f);
}

TEST_CASE("max pool ties resolve to the first position") {
    Graph g;
    Array xs = vec({3, 7, 7});
    NodeId x = g.param(&xs);
    NodeId p = g.global_max_pool(x);
    CHECK(g.item(p) == 7.0f);
    g.backward(p);
    const Array& dx = g.grad_of(x);
    CHECK(dx[0] == 0.0f);
    CHECK(dx[1] == 1.0f);
    CHECK(dx[2] == 0.0f);
}

TEST_CASE("gather treats negative ids as absent tokens") {
    Graph g;
    Array table = mat(3, 2, {1, 2, 3, 4, 5, 6});
    NodeId t = g.param(&table);
    NodeId x = g.gather_rows(t, {1, -1, 1});
    const Array& out = g.value_of(x);
    REQUIRE(out.shape == std::vector<int>{3, 2});
    CHECK(out[0] == 3.0f);
    CHECK(out[1] == 4.0f);
    CHECK(out[2] == 0.0f);
    CHECK(out[3] == 0.0f);
    CHECK(out[4] == 3.0f);
    CHECK(out[5] == 4.0f);

    Array ws = mat(1, 2, {1, 1});
    Array bs = vec({0});
    NodeId y = g.conv1d_valid(x, g.value(ws), g.value(bs));
    NodeId p = g.global_max_pool(y);
    // window sums are [7, 0, 7]; the tie goes to the first, so the table row
    // used twice receives gradient exactly once
    CHECK(g.item(p) == doctest::Approx(7.0));
    g.backward(p);
    const Array& dt = g.grad_of(t);
    CHECK(dt[0] == 0.0f);
    CHECK(dt[1] == 0.0f);
    CHECK(dt[2] == doctest::Approx(1.0));
    CHECK(dt[3] == doctest::Approx(1.0));
    CHECK(dt[4] == 0.0f);
    CHECK(dt[5] == 0.0f);
}

TEST_CASE("linear layer matches hand computation and routes gradients") {
    Graph g;
    Array ws = mat(2, 2, {1, 2, 3, 4});
    Array xs = vec({5, 6});
    Array bs = vec({0.5f, -0.5f});
    NodeId w = g.param(&ws);
    NodeId x = g.param(&xs);
    NodeId b = g.param(&bs);
    NodeId y = g.linear(x, w, b);
    const Array& out = g.value_of(y);
    CHECK(out[0] == doctest::Approx(17.5));
    CHECK(out[1] == doctest::Approx(38.5));

    NodeId p = g.global_max_pool(y);
    g.backward(p);
    const Array& dw = g.grad_of(w);
    CHECK(dw[0] == 0.0f);
    CHECK(dw[1] == 0.0f);
    CHECK(dw[2] == doctest::Approx(5.0));
    CHECK(dw[3] == doctest::Approx(6.0));
    const Array& db = g.grad_of(b);
    CHECK(db[0] == 0.0f);
    CHECK(db[1] == doctest::Approx(1.0));
    const Array& dx = g.grad_of(x);
    CHECK(dx[0] == doctest::Approx(3.0));
    CHECK(dx[1] == doctest::Approx(4.0));
}

TEST_CASE("softmax produces the exact pinned distribution") {
    Graph g;
    Array xs = vec({std::log(2.0f), 0.0f});
    NodeId s = g.softmax(g.value(xs));
    const Array& p = g.value_of(s);
    CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

    Graph g2;
    Array big = vec({1000.0f, 1000.0f, 1000.0f});
    const Array& q = g2.value_of(g2.softmax(g2.value(big)));
    for (int i = 0; i < 3; ++i) CHECK(q[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("normalized outputs sum to one across random inputs") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(rng.below(9));
        Array xs({n});
        for (int i = 0; i < n; ++i)
            xs[i] = static_cast<float>(rng.uniform(-30.0, 30.0));
        Graph g;
        const Array& p = g.value_of(g.softmax(g.value(xs)));
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            CHECK(p[i] >= 0.0f);
            total += static_cast<double>(p[i]);
        }
        CHECK(std::abs(total - 1.0) < 1e-6);
    }
}

TEST_CASE("cross entropy pins: uniform distribution, weights, clamping") {
    {
        Graph g;
        Array probs = mat(1, 5, {0.2f, 0.2f, 0.2f, 0.2f, 0.2f});
        NodeId loss = g.weighted_cross_entropy(g.value(probs), {0}, Array({5}, 1.0f));
        CHECK(g.item(loss) == doctest::Approx(std::log(5.0)).epsilon(1e-6));
    }
    {
        Graph g;
        Array probs = mat(2, 2, {0.5f, 0.5f, 0.25f, 0.75f});
        Array alpha = vec({3.0f, 1.0f});
        NodeId loss = g.weighted_cross_entropy(g.value(probs), {0, 1}, alpha);
        double want = (3.0 * std::log(2.0) + 1.0 * std::log(4.0 / 3.0)) / 2.0;
        CHECK(g.item(loss) == doctest::Approx(want).epsilon(1e-6));
    }
    {
        Graph g;
        Array probs = mat(1, 2, {1.0f, 0.0f});
        NodeId loss = g.weighted_cross_entropy(g.value(probs), {1}, Array({2}, 1.0f));
        CHECK(g.item(loss) == doctest::Approx(-std::log(1e-12)).epsilon(1e-4));
    }
}

TEST_CASE("gradient of softmax under cross entropy accumulates across shared uses") {
    // two separate projections of the same parameter feed one distribution,
    // so the parameter gradient must be the sum of both paths
    Graph g;
    Array xs = vec({std::log(2.0f), 0.0f});
    Array w1 = mat(1, 2, {1, 0});
    Array w2 = mat(1, 2, {0, 1});
    Array zb = vec({0});
    NodeId x = g.param(&xs);
    NodeId l1 = g.linear(x, g.value(w1), g.value(zb));
    NodeId l2 = g.linear(x, g.value(w2), g.value(zb));
    NodeId logits = g.concat({l1, l2});
    NodeId probs = g.softmax(logits);
    NodeId stacked = g.stack_rows({probs});
    NodeId loss = g.weighted_cross_entropy(stacked, {0}, Array({2}, 1.0f));
    CHECK(g.item(loss) == doctest::Approx(std::log(1.5)).epsilon(1e-6));
    g.backward(loss);
    const Array& dx = g.grad_of(x);
    CHECK(dx[0] == doctest::Approx(2.0 / 3.0 - 1.0).epsilon(1e-5));
    CHECK(dx[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
}

TEST_CASE("concat and stack preserve order and route gradients to parts") {
    Graph g;
    Array a1 = vec({1, 2});
    Array a2 = vec({3});
    NodeId n1 = g.param(&a1);
    NodeId n2 = g.param(&a2);
    NodeId c = g.concat({n1, n2});
    const Array& out = g.value_of(c);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == 1.0f);
    CHECK(out[1] == 2.0f);
    CHECK(out[2] == 3.0f);
    NodeId p = g.global_max_pool(c);
    g.backward(p);
    CHECK(g.grad_of(n1)[0] == 0.0f);
    CHECK(g.grad_of(n1)[1] == 0.0f);
    CHECK(g.grad_of(n2)[0] == 1.0f);

    Graph g2;
    NodeId r1 = g2.value(vec({1, 2}));
    NodeId r2 = g2.value(vec({3, 4}));
    const Array& m = g2.value_of(g2.stack_rows({r1, r2}));
    CHECK(m.shape == std::vector<int>{2, 2});
    CHECK(m[0] == 1.0f);
    CHECK(m[3] == 4.0f);
    NodeId bad = g2.value(vec({9}));
    CHECK_THROWS_WITH_AS(g2.stack_rows({r1, bad}), doctest::Contains("equal-length"),
                         std::runtime_error);
}

TEST_CASE("dropout masks in training and is the identity at inference") {
    Array xs({64}, 1.0f);
    {
        Rng rng(5);
        Graph g;
        NodeId x = g.param(&xs);
        NodeId d = g.dropout(x, 0.5f, true, rng);
        Array out = g.value_of(d);  // copied: later nodes may reallocate the tape
        int zeros = 0;
        for (int i = 0; i < 64; ++i) {
            bool kept = out[i] == 2.0f;
            bool dropped = out[i] == 0.0f;
            CHECK((kept || dropped));
            zeros += dropped ? 1 : 0;
        }
        CHECK(zeros > 0);
        CHECK(zeros < 64);
        // the gradient equals the applied mask scale elementwise
        Array ws = mat(1, 64, std::vector<float>(64, 1.0f));
        NodeId y = g.linear(d, g.value(ws), g.value(vec({0})));
        g.backward(g.global_max_pool(y));
        const Array& dx = g.grad_of(x);
        for (int i = 0; i < 64; ++i) CHECK(dx[i] == out[i]);
    }
    {
        // same seed reproduces the mask, a different seed changes it
        auto mask_with = [&](std::uint64_t seed) {
            Rng rng(seed);
            Graph g;
            std::vector<bool> kept;
            const Array& out = g.value_of(g.dropout(g.value(xs), 0.5f, true, rng));
            for (int i = 0; i < 64; ++i) kept.push_back(out[i] != 0.0f);
            return kept;
        };
        CHECK(mask_with(5) == mask_with(5));
        CHECK(mask_with(5) != mask_with(6));
    }
    {
        // inference mode must not consume randomness
        Rng rng(9);
        Graph g;
        const Array& out = g.value_of(g.dropout(g.value(xs), 0.5f, false, rng));
        for (int i = 0; i < 64; ++i) CHECK(out[i] == 1.0f);
        CHECK(rng.uniform() == Rng(9).uniform());
    }
    {
        // zero rate in training mode is also a draw-free identity
        Rng rng(9);
        Graph g;
        const Array& out = g.value_of(g.dropout(g.value(xs), 0.0f, true, rng));
        for (int i = 0; i < 64; ++i) CHECK(out[i] == 1.0f);
        CHECK(rng.uniform() == Rng(9).uniform());
    }
    {
        Rng rng(1);
        Graph g;
        NodeId x = g.value(xs);
        CHECK_THROWS_WITH_AS(g.dropout(x, 1.0f, true, rng), doctest::Contains("[0,1)"),
                             std::runtime_error);
        CHECK_THROWS_WITH_AS(g.dropout(x, -0.1f, true, rng), doctest::Contains("[0,1)"),
                             std::runtime_error);
    }
}

TEST_CASE("graph guards reject misuse") {
    Graph g;
    Array xs = vec({1, 2, 3});
    NodeId x = g.param(&xs);
    NodeId p = g.global_max_pool(x);
    CHECK_THROWS_WITH_AS(g.grad_of(x), doctest::Contains("before backward"), std::runtime_error);
    CHECK_THROWS_WITH_AS(g.backward(x), doctest::Contains("non-scalar"), std::runtime_error);
    CHECK_THROWS_WITH_AS(g.item(x), doctest::Contains("non-scalar"), std::runtime_error);
    g.backward(p);
    CHECK_THROWS_WITH_AS(g.backward(p), doctest::Contains("already swept"), std::runtime_error);
    CHECK_THROWS_WITH_AS(g.value(xs), doctest::Contains("already swept"), std::runtime_error);
    CHECK_THROWS_AS(g.value_of(999), std::runtime_error);

    Graph h;
    CHECK_THROWS_WITH_AS(h.param(nullptr), doctest::Contains("null"), std::runtime_error);
    Array table = mat(2, 2, {1, 2, 3, 4});
    NodeId t = h.param(&table);
    CHECK_THROWS_WITH_AS(h.gather_rows(t, {0, 2}), doctest::Contains("out of range"),
                         std::runtime_error);
    NodeId v = h.value(vec({1, 2}));
    CHECK_THROWS_WITH_AS(h.gather_rows(v, {0}), doctest::Contains("matrix"), std::runtime_error);

    Array w32 = mat(3, 2, {1, 1, 1, 1, 1, 1});
    Array w23 = mat(2, 3, {1, 1, 1, 1, 1, 1});
    Array b1 = vec({0});
    Array b2 = vec({0, 0});
    NodeId seq = h.gather_rows(t, {0, 1});
    CHECK_THROWS_WITH_AS(h.conv1d_valid(seq, h.value(w32), h.value(b1)),
                         doctest::Contains("shorter than kernel"), std::runtime_error);
    CHECK_THROWS_WITH_AS(h.conv1d_valid(seq, h.value(w23), h.value(b1)),
                         doctest::Contains("width"), std::runtime_error);
    Array w12 = mat(1, 2, {1, 1});
    CHECK_THROWS_WITH_AS(h.conv1d_valid(seq, h.value(w12), h.value(b2)),
                         doctest::Contains("single value"), std::runtime_error);
    CHECK_THROWS_WITH_AS(h.concat({}), doctest::Contains("no parts"), std::runtime_error);
    CHECK_THROWS_WITH_AS(h.stack_rows({}), doctest::Contains("no rows"), std::runtime_error);
    CHECK_THROWS_WITH_AS(h.linear(v, h.value(w23), h.value(b2)), doctest::Contains("length"),
                         std::runtime_error);

    Graph ce;
    Array probs = mat(1, 3, {0.2f, 0.3f, 0.5f});
    NodeId pr = ce.value(probs);
    CHECK_THROWS_WITH_AS(ce.weighted_cross_entropy(pr, {3}, Array({3}, 1.0f)),
                         doctest::Contains("label index"), std::runtime_error);
    CHECK_THROWS_WITH_AS(ce.weighted_cross_entropy(pr, {0, 1}, Array({3}, 1.0f)),
                         doctest::Contains("label count"), std::runtime_error);
    CHECK_THROWS_WITH_AS(ce.weighted_cross_entropy(pr, {0}, Array({2}, 1.0f)),
                         doctest::Contains("class weight length"), std::runtime_error);
    CHECK_THROWS_WITH_AS(ce.weighted_cross_entropy(pr, {0}, Array::from({3}, {1, 0, 1})),
                         doctest::Contains("strictly positive"), std::runtime_error);
}

TEST_CASE("adam first steps match the pinned trajectory") {
    AdamConfig cfg;
    {
        Array p = vec({1.0f});
        Array grad = vec({0.5f});
        AdamState st = AdamState::for_param(p);
        adam_step(p, grad, st, cfg);
        CHECK(st.t == 1);
        CHECK(p[0] == doctest::Approx(0.999).epsilon(1e-6));
        adam_step(p, grad, st, cfg);
        CHECK(p[0] == doctest::Approx(0.998).epsilon(1e-5));
    }
    {
        // the very first update magnitude is the step size for any gradient scale
        for (float gscale : {1e-4f, 1.0f, 100.0f}) {
            Array p = vec({0.0f});
            Array grad = vec({gscale});
            AdamState st = AdamState::for_param(p);
            adam_step(p, grad, st, cfg);
            CHECK(p[0] == doctest::Approx(-1e-3).epsilon(1e-3));
        }
    }
    {
        Array p = vec({0.25f});
        Array zero = vec({0.0f});
        AdamState st = AdamState::for_param(p);
        adam_step(p, zero, st, cfg);
        CHECK(p[0] == 0.25f);
    }
    {
        Array p = vec({1.0f, 2.0f});
        Array grad = vec({0.5f});
        AdamState st = AdamState::for_param(p);
        CHECK_THROWS_WITH_AS(adam_step(p, grad, st, cfg), doctest::Contains("shapes"),
                             std::runtime_error);
    }
}

namespace {

struct TinyNet {
    Array table = Array({4, 3});
    Array wa = Array({2, 3});
    Array ba = Array({1});
    Array wb = Array({3, 3});
    Array bb = Array({1});
    Array lw = Array({3, 2});
    Array lb = Array({3});

    std::vector<Array*> params() { return {&table, &wa, &ba, &wb, &bb, &lw, &lb}; }

    TinyNet() {
        // increasing row scale keeps every window sum strictly ordered, so
        // pooling picks the final position with a wide, perturbation-proof gap
        const float u[3] = {0.1f, 0.2f, 0.15f};
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 3; ++c) table[r * 3 + c] = static_cast<float>(r + 1) * u[c];
        Rng rng(17);
        for (auto* w : {&wa, &wb})
            for (int i = 0; i < w->size(); ++i)
                (*w)[i] = static_cast<float>(rng.uniform(0.05, 0.3));
        ba[0] = 0.5f;
        bb[0] = 0.5f;
        for (int i = 0; i < lw.size(); ++i) lw[i] = static_cast<float>(rng.uniform(-0.4, 0.4));
        for (int i = 0; i < lb.size(); ++i) lb[i] = static_cast<float>(rng.uniform(-0.1, 0.1));
    }

    NodeId build(Graph& g, std::vector<NodeId>* param_ids = nullptr) {
        std::vector<NodeId> ids;
        for (Array* p : params()) ids.push_back(g.param(p));
        NodeId x = g.gather_rows(ids[0], {0, 1, 2, 3});
        NodeId ha = g.global_max_pool(g.conv1d_valid(x, ids[1], ids[2]));
        NodeId hb = g.global_max_pool(g.conv1d_valid(x, ids[3], ids[4]));
        NodeId h = g.concat({ha, hb});
        NodeId logits = g.linear(h, ids[5], ids[6]);
        NodeId probs = g.softmax(logits);
        NodeId stacked = g.stack_rows({probs});
        if (param_ids) *param_ids = ids;
        return g.weighted_cross_entropy(stacked, {1}, Array::from({3}, {1.0f, 0.5f, 2.0f}));
    }

    double loss() {
        Graph g;
        return static_cast<double>(g.item(build(g)));
    }
};

}  // namespace

TEST_CASE("backward agrees with central differences on a composed network") {
    TinyNet net;
    Graph g;
    std::vector<NodeId> ids;
    NodeId loss = net.build(g, &ids);
    g.backward(loss);
    std::vector<std::vector<float>> analytic;
    for (NodeId id : ids) analytic.push_back(g.grad_of(id).v);

    double worst = 0.0;
    std::vector<Array*> ps = net.params();
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        Array& p = *ps[pi];
        for (int i = 0; i < p.size(); ++i) {
            float keep = p[i];
            p[i] = keep + 1e-3f;
            double up = net.loss();
            double xp = static_cast<double>(p[i]);
            p[i] = keep - 1e-3f;
            double dn = net.loss();
            double xm = static_cast<double>(p[i]);
            p[i] = keep;
            double fd = (up - dn) / (xp - xm);
            double an = static_cast<double>(analytic[pi][static_cast<std::size_t>(i)]);
            double rel = std::abs(an - fd) / std::max({1.0, std::abs(an), std::abs(fd)});
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst < 2e-3);
}
