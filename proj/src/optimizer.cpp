// Copyright 2026 The phaseloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phaseloss/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "phaseloss/config.hpp"
#include "phaseloss/errors.hpp"
#include "phaseloss/parallel.hpp"
#include "phaseloss/probes.hpp"

namespace phaseloss {

namespace {

using Vec = std::vector<double>;

double dot(const Vec &a, const Vec &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double max_abs(const Vec &a) {
    double m = 0.0;
    for (double v : a) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

/// Euclidean projection onto {x >= 0, sum x = 1}.
Vec project_to_simplex(const Vec &v) {
    Vec sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cumulative += sorted[i];
        const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - candidate > 0.0) {
            theta = candidate;
        }
    }
    Vec x(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        x[i] = std::max(v[i] - theta, 0.0);
    }
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (double &xi : x) {
        xi /= total;
    }
    return x;
}

double stationarity(const Vec &x, const Vec &g) {
    Vec shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        shifted[i] = x[i] - g[i];
    }
    const Vec p = project_to_simplex(shifted);
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        m = std::max(m, std::abs(p[i] - x[i]));
    }
    return m;
}

/**
 * Objective on raw simplex weights with the loss kernel cached for one eta.
 * `minimized` is the quantity descent works on: Delta, or -I_phiphi.
 */
class Evaluator {
  public:
    struct Point {
        double minimized = 0.0;
        double reported = 0.0;
        Vec gradient;
        bool infeasible = false;
    };

    Evaluator(int n, double eta, Objective objective, bool quantum_loss)
        : n_(n), eta_(eta), objective_(objective), quantum_loss_(quantum_loss), kernel_(n, eta) {}

    [[nodiscard]] Point evaluate(std::span<const double> x) const {
        const int n = n_;
        const double eta = eta_;
        const double eta_loss = eta * (1.0 - eta);
        const BlockSpread spread = block_spread(x, kernel_);

        double phase = 0.0;
        double loss_classical = 0.0;
        double loss_quantum = 0.0;
        Vec score(static_cast<std::size_t>(n + 1), 0.0);
        for (int l = 0; l <= n; ++l) {
            const double p = spread.probability[static_cast<std::size_t>(l)];
            if (p <= 0.0) {
                continue;
            }
            const double s = spread.mean[static_cast<std::size_t>(l)] / eta -
                             static_cast<double>(l) / eta_loss;
            score[static_cast<std::size_t>(l)] = s;
            phase += 4.0 * p * spread.variance[static_cast<std::size_t>(l)];
            loss_classical += p * s * s;
        }
        for (int k = 0; k <= n; ++k) {
            loss_quantum += x[static_cast<std::size_t>(k)] * static_cast<double>(k) / eta_loss;
        }

        // Partial derivatives in x_k. Empty sectors use their one-sided limits
        // (mean -> k, score -> c_kl), which drop out of the phase term.
        Vec d_phase(static_cast<std::size_t>(n + 1), 0.0);
        Vec d_loss(static_cast<std::size_t>(n + 1), 0.0);
        for (int k = 0; k <= n; ++k) {
            const double kk = static_cast<double>(k);
            double dp = 0.0;
            double dl = 0.0;
            for (int l = 0; l <= k; ++l) {
                const double b = kernel_(k, l);
                if (b == 0.0) {
                    continue;
                }
                const double c = kk / eta - static_cast<double>(l) / eta_loss;
                if (spread.probability[static_cast<std::size_t>(l)] > 0.0) {
                    const double d = kk - spread.mean[static_cast<std::size_t>(l)];
                    const double s = score[static_cast<std::size_t>(l)];
                    dp += b * d * d;
                    dl += b * (2.0 * s * c - s * s);
                } else {
                    dl += b * c * c;
                }
            }
            d_phase[static_cast<std::size_t>(k)] = 4.0 * dp;
            d_loss[static_cast<std::size_t>(k)] =
                quantum_loss_ ? kk / eta_loss : dl;
        }

        Point out;
        out.gradient.assign(static_cast<std::size_t>(n + 1), 0.0);
        if (objective_ == Objective::phase_only) {
            out.reported = phase;
            out.minimized = -phase;
            for (std::size_t k = 0; k < d_phase.size(); ++k) {
                out.gradient[k] = -d_phase[k];
            }
            return out;
        }
        const double loss = quantum_loss_ ? loss_quantum : loss_classical;
        const double delta = std::sqrt(1.0 / phase + 1.0 / loss);
        if (!(phase > 0.0 && loss > 0.0) || !std::isfinite(delta)) {
            out.infeasible = true;
            out.reported = kInfeasibleObjective;
            out.minimized = kInfeasibleObjective;
            return out;
        }
        out.reported = delta;
        out.minimized = delta;
        for (std::size_t k = 0; k < d_phase.size(); ++k) {
            out.gradient[k] =
                -(d_phase[k] / (phase * phase) + d_loss[k] / (loss * loss)) / (2.0 * delta);
        }
        return out;
    }

  private:
    int n_;
    double eta_;
    Objective objective_;
    bool quantum_loss_;
    LossKernel kernel_;
};

struct StartOutcome {
    StartSummary summary;
    Vec x;
    double minimized = kInfeasibleObjective;
};

Vec weights_from_squared(const Vec &y) {
    Vec x(y.size());
    double s = 0.0;
    for (double v : y) {
        s += v * v;
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        x[i] = y[i] * y[i] / s;
    }
    return x;
}

/// Quasi-Newton descent on F(y) = f(y^2 / |y|^2). Zero coordinates stay zero.
Vec squared_lbfgs(const Evaluator &eval, Vec x0, const OptimizerSettings &settings,
                  int &iterations) {
    constexpr std::size_t kMemory = 10;
    Vec y(x0.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = std::sqrt(x0[i]);
    }
    auto value_and_grad = [&](const Vec &yy, double &value, Vec &grad) -> bool {
        const double s = dot(yy, yy);
        const Vec x = weights_from_squared(yy);
        const auto p = eval.evaluate(x);
        value = p.minimized;
        if (p.infeasible) {
            return false;
        }
        const double mean = dot(x, p.gradient);
        grad.resize(yy.size());
        for (std::size_t i = 0; i < yy.size(); ++i) {
            grad[i] = 2.0 * yy[i] / s * (p.gradient[i] - mean);
        }
        return true;
    };

    double f = 0.0;
    Vec g;
    if (!value_and_grad(y, f, g)) {
        return x0;
    }
    std::deque<Vec> s_hist;
    std::deque<Vec> y_hist;
    int stalls = 0;
    for (iterations = 0; iterations < settings.max_iterations; ++iterations) {
        const double gnorm = std::sqrt(dot(g, g));
        if (gnorm <= 1e-15) {
            break;
        }
        // Two-loop recursion.
        Vec d = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            const double rho = 1.0 / dot(y_hist[i], s_hist[i]);
            alpha[i] = rho * dot(s_hist[i], d);
            for (std::size_t j = 0; j < d.size(); ++j) {
                d[j] -= alpha[i] * y_hist[i][j];
            }
        }
        if (!s_hist.empty()) {
            const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (double &v : d) {
                v *= gamma;
            }
        } else {
            for (double &v : d) {
                v /= gnorm;
            }
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double rho = 1.0 / dot(y_hist[i], s_hist[i]);
            const double beta = rho * dot(y_hist[i], d);
            for (std::size_t j = 0; j < d.size(); ++j) {
                d[j] += (alpha[i] - beta) * s_hist[i][j];
            }
        }
        for (double &v : d) {
            v = -v;
        }
        double slope = dot(g, d);
        if (!(slope < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            d = g;
            for (double &v : d) {
                v = -v / gnorm;
            }
            slope = dot(g, d);
        }

        double step = 1.0;
        Vec y_new(y.size());
        Vec g_new;
        double f_new = 0.0;
        bool accepted = false;
        for (int backtrack = 0; backtrack < 60; ++backtrack) {
            for (std::size_t j = 0; j < y.size(); ++j) {
                y_new[j] = y[j] + step * d[j];
            }
            if (value_and_grad(y_new, f_new, g_new) && f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }
        // F is scale invariant; keep |y| = 1 and rescale the gradient to match.
        const double ynorm = std::sqrt(dot(y_new, y_new));
        for (std::size_t j = 0; j < y_new.size(); ++j) {
            y_new[j] /= ynorm;
            g_new[j] *= ynorm;
        }
        Vec s_vec(y.size());
        Vec y_vec(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) {
            s_vec[j] = y_new[j] - y[j];
            y_vec[j] = g_new[j] - g[j];
        }
        if (dot(s_vec, y_vec) > 1e-16 * std::sqrt(dot(s_vec, s_vec) * dot(y_vec, y_vec))) {
            s_hist.push_back(s_vec);
            y_hist.push_back(y_vec);
            if (s_hist.size() > kMemory) {
                s_hist.pop_front();
                y_hist.pop_front();
            }
        }
        const double decrease = f - f_new;
        const double move = std::sqrt(dot(s_vec, s_vec));
        y = std::move(y_new);
        g = std::move(g_new);
        f = f_new;
        if (decrease <= settings.objective_tolerance * std::max(1.0, std::abs(f)) ||
            move <= settings.iterate_tolerance) {
            if (++stalls >= 5) {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    return weights_from_squared(y);
}

/// Spectral projected gradient on the simplex; can re-activate zero weights.
Vec projected_polish(const Evaluator &eval, Vec x, const OptimizerSettings &settings,
                     int &iterations) {
    auto point = eval.evaluate(x);
    if (point.infeasible) {
        return x;
    }
    double lambda = 1.0 / std::max(1e-12, max_abs(point.gradient));
    int stalls = 0;
    for (iterations = 0; iterations < settings.max_iterations; ++iterations) {
        Vec trial(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            trial[i] = x[i] - lambda * point.gradient[i];
        }
        const Vec target = project_to_simplex(trial);
        Vec d(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            d[i] = target[i] - x[i];
        }
        if (max_abs(d) <= settings.iterate_tolerance) {
            break;
        }
        const double slope = dot(point.gradient, d);
        if (!(slope < 0.0)) {
            break;
        }
        double step = 1.0;
        Vec x_new(x.size());
        Evaluator::Point next;
        bool accepted = false;
        for (int backtrack = 0; backtrack < 60; ++backtrack) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                x_new[i] = std::max(0.0, x[i] + step * d[i]);
            }
            const double total = std::accumulate(x_new.begin(), x_new.end(), 0.0);
            for (double &v : x_new) {
                v /= total;
            }
            next = eval.evaluate(x_new);
            if (!next.infeasible && next.minimized <= point.minimized + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }
        Vec s(x.size());
        Vec yv(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            s[i] = x_new[i] - x[i];
            yv[i] = next.gradient[i] - point.gradient[i];
        }
        const double sy = dot(s, yv);
        lambda = sy > 0.0 ? std::clamp(dot(s, s) / sy, 1e-12, 1e12)
                          : std::min(1e12, 10.0 * lambda);
        const double decrease = point.minimized - next.minimized;
        x = std::move(x_new);
        point = std::move(next);
        if (decrease <= settings.objective_tolerance * std::max(1.0, std::abs(point.minimized))) {
            if (++stalls >= 5) {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    return x;
}

struct FaceStep {
    std::vector<std::size_t> face;
    Eigen::VectorXd direction;
    /// g . d; minus twice the decrease a quadratic model predicts.
    double slope = 0.0;
};

/// Modified Newton direction restricted to the face and to sum d = 0.
Eigen::VectorXd face_newton_direction(const Evaluator &eval, const Vec &x,
                                      const Evaluator::Point &point,
                                      const std::vector<std::size_t> &face) {
    const auto m = static_cast<Eigen::Index>(face.size());
    Eigen::VectorXd gf(m);
    double smallest = 1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const std::size_t c = face[static_cast<std::size_t>(i)];
        gf[i] = point.gradient[c];
        if (x[c] > 0.0) {
            smallest = std::min(smallest, x[c]);
        }
    }
    if (m < 2) {
        return Eigen::VectorXd::Zero(m);
    }
    // Curvature scales with the weight itself, so steps are relative.
    Eigen::MatrixXd hess(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const std::size_t c = face[static_cast<std::size_t>(j)];
        const double h = 1e-5 * (x[c] > 0.0 ? x[c] : smallest);
        Vec up = x;
        up[c] += h;
        Vec down = x;
        const bool central = x[c] > 0.0;
        if (central) {
            down[c] -= h;
        }
        const auto gu = eval.evaluate(up);
        const auto gd = central ? eval.evaluate(down) : point;
        const double width = central ? 2.0 * h : h;
        for (Eigen::Index i = 0; i < m; ++i) {
            const std::size_t r = face[static_cast<std::size_t>(i)];
            hess(i, j) = (gu.gradient[r] - gd.gradient[r]) / width;
        }
    }
    hess = 0.5 * (hess + hess.transpose()).eval();

    // Orthonormal basis of the tangent space {d : sum d = 0}.
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::VectorXd::Ones(m)).householderQ();
    const Eigen::MatrixXd z = q.rightCols(m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z.transpose() * hess * z);
    Eigen::VectorXd curv = es.eigenvalues().cwiseAbs();
    curv = curv.cwiseMax(1e-10 * std::max(1e-300, curv.maxCoeff()));
    const Eigen::VectorXd reduced = es.eigenvectors().transpose() * (z.transpose() * gf);
    return -z * (es.eigenvectors() * reduced.cwiseQuotient(curv));
}

/// Support plus the zero weight with the most negative reduced gradient, kept
/// only if Newton wants to raise it.
FaceStep face_step(const Evaluator &eval, const Vec &x, const Evaluator::Point &point) {
    const Vec &g = point.gradient;
    const std::size_t dim = x.size();
    FaceStep out;
    double mu = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        if (x[i] > 0.0) {
            out.face.push_back(i);
            mu += g[i];
        }
    }
    mu /= static_cast<double>(out.face.size());
    std::size_t entering = dim;
    double most = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        if (x[i] == 0.0 && g[i] - mu < most) {
            most = g[i] - mu;
            entering = i;
        }
    }
    if (entering < dim) {
        out.face.insert(std::upper_bound(out.face.begin(), out.face.end(), entering), entering);
    }
    while (true) {
        out.direction = face_newton_direction(eval, x, point, out.face);
        if (entering == dim) {
            break;
        }
        const auto pos = std::find(out.face.begin(), out.face.end(), entering) - out.face.begin();
        if (out.direction[pos] > 0.0) {
            break;
        }
        out.face.erase(out.face.begin() + pos);
        entering = dim;
    }
    out.slope = 0.0;
    for (std::size_t i = 0; i < out.face.size(); ++i) {
        out.slope += g[out.face[i]] * out.direction[static_cast<Eigen::Index>(i)];
    }
    return out;
}

/// Decrease a quadratic model still promises; zero at a strict local optimum.
double newton_decrement(const Evaluator &eval, const Vec &x) {
    const auto point = eval.evaluate(x);
    if (point.infeasible) {
        return std::numeric_limits<double>::infinity();
    }
    return std::max(0.0, -0.5 * face_step(eval, x, point).slope);
}

/// Active-set Newton on the face spanned by the support. Weights that reach
/// zero leave the face.
Vec newton_polish(const Evaluator &eval, Vec x, int &iterations) {
    constexpr int kMaxNewton = 100;
    auto point = eval.evaluate(x);
    if (point.infeasible) {
        return x;
    }
    const std::size_t dim = x.size();
    for (iterations = 0; iterations < kMaxNewton; ++iterations) {
        const FaceStep fs = face_step(eval, x, point);
        const double floor = 1e-17 * std::max(1.0, std::abs(point.minimized));
        if (!(fs.slope < -floor)) {
            break;
        }
        const auto &d = fs.direction;
        double reach = std::numeric_limits<double>::infinity();
        std::size_t blocking = dim;
        for (std::size_t i = 0; i < fs.face.size(); ++i) {
            const std::size_t c = fs.face[i];
            const double di = d[static_cast<Eigen::Index>(i)];
            if (di < 0.0 && -x[c] / di < reach) {
                reach = -x[c] / di;
                blocking = c;
            }
        }
        double step = std::min(1.0, reach);
        bool accepted = false;
        Vec x_new;
        Evaluator::Point next;
        for (int backtrack = 0; backtrack < 60; ++backtrack) {
            x_new = x;
            for (std::size_t i = 0; i < fs.face.size(); ++i) {
                const std::size_t c = fs.face[i];
                x_new[c] = std::max(0.0, x[c] + step * d[static_cast<Eigen::Index>(i)]);
            }
            if (step == reach && blocking < dim) {
                x_new[blocking] = 0.0;
            }
            const double total = std::accumulate(x_new.begin(), x_new.end(), 0.0);
            for (double &v : x_new) {
                v /= total;
            }
            next = eval.evaluate(x_new);
            if (!next.infeasible && next.minimized <= point.minimized + 1e-4 * step * fs.slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }
        x = std::move(x_new);
        point = std::move(next);
    }
    return x;
}

Vec truncate_small(Vec x) {
    for (double &v : x) {
        if (v < kTolerances.weight_truncation) {
            v = 0.0;
        }
    }
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (double &v : x) {
        v /= total;
    }
    return x;
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Flat Dirichlet draw built from raw engine output so it is portable.
Vec dirichlet_start(int n, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    Vec x(static_cast<std::size_t>(n + 1));
    double total = 0.0;
    for (double &v : x) {
        const double u = (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
        v = -std::log(u);
        total += v;
    }
    for (double &v : x) {
        v /= total;
    }
    return x;
}

Vec mix(const Vec &a, const Vec &b, double t) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = (1.0 - t) * a[i] + t * b[i];
    }
    return out;
}

std::vector<std::pair<std::string, Vec>> build_starts(int n, const OptimizerSettings &settings) {
    std::vector<std::pair<std::string, Vec>> warm;
    const Vec noon_x = noon(n).weights();
    const Vec uniform_x = uniform(n).weights();
    const Vec fock_x = fock_probe(n).weights();
    warm.emplace_back("noon", noon_x);
    if (n % 2 == 0) {
        warm.emplace_back("holland_burnett", holland_burnett(n).weights());
    }
    warm.emplace_back("uniform", uniform_x);
    warm.emplace_back("fock_uniform_mix", mix(fock_x, uniform_x, 0.4));
    warm.emplace_back("fock_noon_mix", mix(fock_x, noon_x, 0.5));
    warm.emplace_back("noon_uniform_mix", mix(noon_x, uniform_x, 0.2));

    std::vector<std::pair<std::string, Vec>> starts;
    const std::size_t total = static_cast<std::size_t>(settings.multistart);
    for (std::size_t i = 0; i < warm.size() && starts.size() < total; ++i) {
        starts.push_back(warm[i]);
    }
    for (std::size_t i = 0; starts.size() < total; ++i) {
        starts.emplace_back("random_" + std::to_string(i),
                            dirichlet_start(n, splitmix64(settings.seed + i)));
    }
    return starts;
}

StartOutcome run_start(const Evaluator &eval, const std::string &label, const Vec &x0,
                       const OptimizerSettings &settings) {
    StartOutcome out;
    out.summary.label = label;
    const auto initial = eval.evaluate(x0);
    out.summary.initial_objective = initial.reported;

    int first = 0;
    int second = 0;
    Vec x = initial.infeasible ? x0 : squared_lbfgs(eval, x0, settings, first);
    x = projected_polish(eval, x, settings, second);
    int third = 0;
    x = newton_polish(eval, x, third);
    // Dust below the truncation threshold is dropped only when that costs nothing.
    Vec truncated = truncate_small(x);
    auto final_point = eval.evaluate(truncated);
    const auto kept = eval.evaluate(x);
    if (final_point.infeasible ||
        final_point.minimized > kept.minimized + 1e-15 * std::abs(kept.minimized) ||
        stationarity(truncated, final_point.gradient) >
            std::max(stationarity(x, kept.gradient),
                     1e-12 * std::max(1.0, max_abs(kept.gradient)))) {
        truncated = x;
        final_point = kept;
    }
    out.summary.iterations = first + second + third;
    out.summary.feasible = !final_point.infeasible;
    out.x = std::move(truncated);
    out.minimized = final_point.minimized;
    out.summary.final_objective = final_point.reported;
    if (out.summary.feasible) {
        out.summary.gradient_norm = stationarity(out.x, final_point.gradient);
        out.summary.newton_decrement = newton_decrement(eval, out.x);
        out.summary.converged =
            out.summary.newton_decrement <=
            settings.objective_tolerance * std::max(1.0, std::abs(final_point.minimized));
    }
    return out;
}

}  // namespace

ObjectiveValue objective_and_gradient(std::span<const double> x, int n, double eta,
                                      Objective objective, bool quantum_loss_information) {
    require_open_eta(eta);
    if (static_cast<int>(x.size()) != n + 1) {
        throw DomainError("weight vector length does not match n + 1");
    }
    const Evaluator eval(n, eta, objective, quantum_loss_information);
    const auto p = eval.evaluate(x);
    ObjectiveValue out;
    out.infeasible = p.infeasible;
    out.value = p.reported;
    if (!p.infeasible) {
        out.gradient = p.gradient;
        if (objective == Objective::phase_only) {
            for (double &g : out.gradient) {
                g = -g;
            }
        }
    }
    return out;
}

OptimizationResult optimize(int n, double eta, const OptimizerSettings &settings) {
    require_open_eta(eta);
    if (settings.objective == Objective::joint_delta && n < 2) {
        throw DomainError("joint optimization needs n >= 2");
    }
    if (n < 1) {
        throw DomainError("optimization needs n >= 1");
    }
    if (settings.multistart < 1 || settings.max_iterations < 1 ||
        !(settings.objective_tolerance > 0.0) || !(settings.iterate_tolerance > 0.0)) {
        throw DomainError("optimizer counts must be >= 1 and tolerances > 0");
    }

    const Evaluator eval(n, eta, settings.objective, settings.quantum_loss_information);
    const auto starts = build_starts(n, settings);
    std::vector<StartOutcome> outcomes(starts.size());
    parallel_for(starts.size(), settings.threads, [&](std::size_t i) {
        outcomes[i] = run_start(eval, starts[i].first, starts[i].second, settings);
    });

    OptimizationResult result;
    result.n = n;
    result.eta = eta;
    result.objective = settings.objective;
    const StartOutcome *best = nullptr;
    for (const auto &o : outcomes) {
        result.starts.push_back(o.summary);
        if (!o.summary.feasible) {
            continue;
        }
        if (best == nullptr) {
            best = &o;
            continue;
        }
        // Within the tie band prefer converged starts, then the lexicographically
        // smaller weight vector, so the pick does not depend on start order.
        const double tie = 1e-12 * std::max(1.0, std::abs(best->minimized));
        const bool tied = std::abs(o.minimized - best->minimized) <= tie;
        const bool better_flag = o.summary.converged && !best->summary.converged;
        const bool same_flag = o.summary.converged == best->summary.converged;
        if (o.minimized < best->minimized - tie ||
            (tied && (better_flag ||
                      (same_flag && std::lexicographical_compare(o.x.begin(), o.x.end(),
                                                                 best->x.begin(), best->x.end()))))) {
            best = &o;
        }
    }
    if (best == nullptr) {
        std::string detail;
        for (const auto &s : result.starts) {
            detail += " " + s.label + "(iters=" + std::to_string(s.iterations) + ")";
        }
        throw NumericalQualityError("no optimizer start reached a feasible point at n=" +
                                    std::to_string(n) + ", eta=" + std::to_string(eta) +
                                    ":" + detail);
    }
    result.weights = best->x;
    result.objective_value = best->summary.final_objective;
    result.gradient_norm = best->summary.gradient_norm;
    result.newton_decrement = best->summary.newton_decrement;
    result.converged = best->summary.converged;
    result.best_start = best->summary.label;
    for (std::size_t k = 0; k < result.weights.size(); ++k) {
        if (result.weights[k] == 0.0) {
            result.active_set.push_back(static_cast<int>(k));
        }
    }
    return result;
}

TradeoffRow evaluate_probe_row(const ProbeState &probe, double eta) {
    require_open_eta(eta);
    const auto x = probe.weights();
    const FisherTerms t = fisher_terms(x, LossKernel(probe.photons(), eta));
    TradeoffRow row;
    row.eta = eta;
    row.weights = x;
    row.phase_information = t.phase;
    row.measured_loss_information = t.loss_classical;
    row.quantum_loss_information = t.loss_quantum;
    row.precision = precision_from(t.phase, t.loss_classical);
    row.converged = true;
    return row;
}

std::vector<TradeoffRow> tradeoff_scan(int n, std::span<const double> etas,
                                       const OptimizerSettings &settings) {
    std::vector<double> grid(etas.begin(), etas.end());
    for (double eta : grid) {
        require_open_eta(eta);
    }
    std::sort(grid.begin(), grid.end());
    std::vector<TradeoffRow> rows;
    for (double eta : grid) {
        try {
            const OptimizationResult r = optimize(n, eta, settings);
            TradeoffRow row = evaluate_probe_row(make_probe(r.weights), eta);
            row.converged = r.converged;
            rows.push_back(std::move(row));
        } catch (const NumericalQualityError &e) {
            TradeoffRow row;
            row.eta = eta;
            row.converged = false;
            row.precision = precision_from(0.0, 0.0);
            row.note = e.what();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace phaseloss
