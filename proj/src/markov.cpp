#include "betamix/markov.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace betamix {

void require_stochastic(const Eigen::MatrixXd& transition) {
    if (transition.rows() == 0 || transition.rows() != transition.cols()) {
        throw std::invalid_argument("transition matrix must be square and non-empty");
    }
    for (Eigen::Index i = 0; i < transition.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < transition.cols(); ++j) {
            const double p = transition(i, j);
            if (!(p >= 0.0) || p > 1.0) {
                throw std::invalid_argument("transition matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                                            ") is not a probability");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::invalid_argument("transition matrix row " + std::to_string(i) + " does not sum to 1");
        }
    }
}

namespace {

// Tarjan's strongly connected components over the support graph of P.
struct Components {
    std::vector<int> id;
    int count = 0;
};

Components strong_components(const Eigen::MatrixXd& P) {
    const int n = static_cast<int>(P.rows());
    Components c;
    c.id.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    int counter = 0;

    struct Frame {
        int v;
        int next;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next < n) {
                const int w = f.next++;
                if (P(f.v, w) <= 0.0) continue;
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const int v = f.v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    c.id[w] = c.count;
                } while (w != v);
                ++c.count;
            }
        }
    }
    return c;
}

int class_period(const Eigen::MatrixXd& P, const std::vector<int>& id, int cls) {
    const int n = static_cast<int>(P.rows());
    int start = 0;
    while (id[start] != cls) ++start;
    std::vector<int> level(n, -1);
    std::vector<int> queue{start};
    level[start] = 0;
    int g = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (int v = 0; v < n; ++v) {
            if (P(u, v) <= 0.0 || id[v] != cls) continue;
            if (level[v] == -1) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
            }
        }
    }
    return g;
}

}  // namespace

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
    require_stochastic(transition);
    const Eigen::Index n = transition.rows();

    const Components comps = strong_components(transition);
    std::vector<bool> closed(comps.count, true);
    for (Eigen::Index u = 0; u < n; ++u) {
        for (Eigen::Index v = 0; v < n; ++v) {
            if (transition(u, v) > 0.0 && comps.id[u] != comps.id[v]) closed[comps.id[u]] = false;
        }
    }
    int closed_class = -1;
    for (int c = 0; c < comps.count; ++c) {
        if (!closed[c]) continue;
        if (closed_class != -1) throw std::domain_error("chain has more than one closed class; stationary law is not unique");
        closed_class = c;
    }
    if (class_period(transition, comps.id, closed_class) != 1) {
        throw std::domain_error("chain is periodic");
    }

    // Iterate pi <- pi Q with Q squared each round, i.e. pi0 P^(2^k - 1).
    Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::MatrixXd Q = transition;
    for (int round = 0; round < 200; ++round) {
        Eigen::RowVectorXd next = pi * Q;
        next /= next.sum();
        const double change = (next - pi).lpNorm<1>();
        pi = next;
        if (change < 1e-14) break;
        Q = Q * Q;
    }
    // A few plain steps to shed rounding picked up by the squarings.
    for (int k = 0; k < 4; ++k) {
        pi = pi * transition;
        pi /= pi.sum();
    }
    return pi.transpose();
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& transition, unsigned long steps) {
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(transition.rows(), transition.cols());
    Eigen::MatrixXd base = transition;
    while (steps > 0) {
        if (steps & 1UL) result = result * base;
        steps >>= 1;
        if (steps > 0) base = base * base;
    }
    return result;
}

}  // namespace betamix
