#include "dirflow/dynamics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "dirflow/errors.hpp"
#include "dirflow/gradient.hpp"

namespace dirflow {

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.t);
  return out;
}

std::vector<double> Trajectory::column(double Record::*field) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.*field);
  return out;
}

namespace {

std::vector<int> layer_widths(const ModelSpec& model, const std::vector<int>& widths) {
  if (!widths.empty()) return widths;
  if (!model.widths.empty()) return model.widths;
  return default_widths(2, model.depth);
}

LayerStack unflatten(const Eigen::VectorXd& x, const std::vector<int>& widths) {
  LayerStack s;
  Eigen::Index off = 0;
  for (std::size_t j = 1; j < widths.size(); ++j) {
    const int rows = widths[j], cols = widths[j - 1];
    s.W.push_back(Eigen::Map<const Eigen::MatrixXd>(x.data() + off, rows, cols));
    off += static_cast<Eigen::Index>(rows) * cols;
  }
  return s;
}

Eigen::VectorXd flatten(const LayerStack& s) {
  Eigen::Index total = 0;
  for (const auto& W : s.W) total += W.size();
  Eigen::VectorXd x(total);
  Eigen::Index off = 0;
  for (const auto& W : s.W) {
    Eigen::Map<Eigen::MatrixXd>(x.data() + off, W.rows(), W.cols()) = W;
    off += W.size();
  }
  return x;
}

Eigen::Vector2d head2(const Eigen::VectorXd& x, Eigen::Index at = 0) { return x.segment<2>(at); }

}  // namespace

System make_system(const ModelSpec& model, const Eigen::Vector2d& v, const RadialLaw& law, const QuadratureConfig& quad,
                   bool full_layers, const std::vector<int>& widths) {
  model.validate();
  System sys;
  switch (model.kind) {
    case ModelKind::Linear:
      sys.size = 2;
      sys.velocity = [=, &law](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return -eval_linear(head2(x), v, law, quad).grad;
      };
      sys.weights = [](const Eigen::VectorXd& x) { return std::vector<Eigen::Vector2d>{head2(x)}; };
      return sys;
    case ModelKind::TwoNeuronReLU:
      sys.size = 4;
      sys.velocity = [=, &law](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        const auto e = eval_relu(head2(x), head2(x, 2), v, law, quad);
        Eigen::VectorXd out(4);
        out << -e.grad1, -e.grad2;
        return out;
      };
      sys.weights = [](const Eigen::VectorXd& x) { return std::vector<Eigen::Vector2d>{head2(x), head2(x, 2)}; };
      return sys;
    case ModelKind::DeepLinear:
      break;
  }
  const int N = model.depth;
  if (!full_layers) {
    sys.size = 2;
    sys.velocity = [=, &law](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return grad_deep_effective(head2(x), v, N, law, quad);
    };
    sys.weights = [](const Eigen::VectorXd& x) { return std::vector<Eigen::Vector2d>{head2(x)}; };
    return sys;
  }
  const std::vector<int> w = layer_widths(model, widths);
  if (static_cast<int>(w.size()) != N + 1 || w.front() != 2 || w.back() != 1) {
    throw ConfigError("deep model: layer widths must be [2, ..., 1] with N+1 entries");
  }
  Eigen::Index total = 0;
  for (std::size_t j = 1; j < w.size(); ++j) total += static_cast<Eigen::Index>(w[j]) * w[j - 1];
  sys.size = static_cast<int>(total);
  const Eigen::VectorXd v_amb = v;
  sys.velocity = [=, &law](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    LayerStack grads;
    grads.W = layerwise_gradients(unflatten(x, w), v_amb, law, quad);
    return -flatten(grads);
  };
  sys.weights = [=](const Eigen::VectorXd& x) {
    return std::vector<Eigen::Vector2d>{head2(effective_weight(unflatten(x, w)))};
  };
  sys.balance = [=](const Eigen::VectorXd& x) { return unflatten(x, w).balancedness_residual(); };
  return sys;
}

Eigen::VectorXd initial_state(const ModelSpec& model, const PlaneState& start, bool full_layers,
                              const std::vector<int>& widths, std::optional<std::uint64_t> layer_seed) {
  start.validate();
  if (static_cast<int>(start.weights2.size()) < model.neurons()) {
    throw ConfigError("start state has too few weight vectors for the model");
  }
  if (model.kind == ModelKind::TwoNeuronReLU) {
    Eigen::VectorXd x(4);
    x << start.weights2[0], start.weights2[1];
    return x;
  }
  if (model.kind == ModelKind::DeepLinear && full_layers) {
    const Eigen::VectorXd w0 = start.weights2[0];
    return flatten(balanced_factorization(w0, model.depth, layer_widths(model, widths), layer_seed));
  }
  if (model.kind == ModelKind::DeepLinear && model.depth >= 2 && start.weights2[0].norm() < 1e-12) {
    throw SingularityError("deep induced flow: start at w_e = 0");
  }
  return start.weights2[0];
}

Eigen::VectorXd rk4_step(const System& sys, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd k1 = sys.velocity(x);
  const Eigen::VectorXd k2 = sys.velocity(x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = sys.velocity(x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = sys.velocity(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

Record make_record(double t, const Eigen::VectorXd& x, const System& sys, const ModelSpec& model,
                   const Eigen::Vector2d& v, const RadialLaw& law, const QuadratureConfig& quad, bool diagnostics) {
  Record r;
  r.t = t;
  r.state = x;
  r.w = sys.weights(x);
  r.cos1 = cos_angle(r.w[0], v);
  r.norm1 = r.w[0].norm();
  if (r.w.size() > 1) {
    r.cos2 = cos_angle(r.w[1], v);
    r.norm2 = r.w[1].norm();
  }
  if (diagnostics) {
    if (model.kind == ModelKind::TwoNeuronReLU) {
      const auto e = eval_relu(r.w[0], r.w[1], v, law, quad);
      r.loss = e.loss;
      r.n = e.n;
    } else {
      const auto e = eval_linear(r.w[0], v, law, quad);
      r.loss = e.loss;
      r.n = e.n;
    }
  }
  if (sys.balance) r.balance = sys.balance(x);
  return r;
}

double default_step(const RadialLaw& law) { return 1e-3 / std::max(1.0, law.c0()); }

Eigen::VectorXd integrate_to(const System& sys, Eigen::VectorXd x, double t_end, double h) {
  const long steps = static_cast<long>(std::ceil(t_end / h - 1e-9));
  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    const double dt = std::min(h, t_end - t);
    x = rk4_step(sys, x, dt);
    t = (i + 1 == steps) ? t_end : (i + 1) * h;
  }
  return x;
}

}  // namespace

Trajectory flow(const ModelSpec& model, const PlaneState& start, const RadialLaw& law, const FlowConfig& cfg) {
  if (!(cfg.t_end > 0.0)) throw ConfigError("flow: t_end must be > 0");
  if (!(cfg.record_growth >= 1.0) || !(cfg.max_record_gap > 0.0)) throw ConfigError("flow: bad record stride");
  cfg.quad.validate();
  const bool layers = model.kind == ModelKind::DeepLinear && cfg.full_layers;
  const System sys = make_system(model, start.v2, law, cfg.quad, layers, cfg.widths);
  Eigen::VectorXd x = initial_state(model, start, layers, cfg.widths, cfg.layer_seed);

  Trajectory traj;
  traj.model = model;
  traj.v = start.v2;
  traj.law_label = law.label();
  traj.method = "flow";
  traj.full_layers = layers;
  traj.widths = layers ? layer_widths(model, cfg.widths) : std::vector<int>{};
  traj.step = cfg.step > 0.0 ? cfg.step : default_step(law);
  const double h = traj.step;
  if (model.kind != ModelKind::TwoNeuronReLU) {
    traj.degenerate_ray = std::abs(cos_angle(sys.weights(x)[0], start.v2) + 1.0) < 1e-15;
  }

  const long steps = static_cast<long>(std::ceil(cfg.t_end / h - 1e-9));
  const long max_gap = std::max(1L, static_cast<long>(std::floor(cfg.max_record_gap / h + 1e-9)));
  traj.records.push_back(make_record(0.0, x, sys, model, start.v2, law, cfg.quad, true));
  long next = 1;
  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    const double dt = std::min(h, cfg.t_end - t);
    x = rk4_step(sys, x, dt);
    t = (i + 1 == steps) ? cfg.t_end : (i + 1) * h;
    if (!x.allFinite()) throw NumericalError("flow: state became non-finite", kNaN);
    if (i + 1 == next || i + 1 == steps) {
      traj.records.push_back(make_record(t, x, sys, model, start.v2, law, cfg.quad, true));
      const long grown = static_cast<long>(std::ceil((i + 1) * cfg.record_growth));
      next = std::min(std::max(i + 2, grown), i + 1 + max_gap);
    }
  }

  if (cfg.audit) {
    const Eigen::VectorXd fine = integrate_to(sys, initial_state(model, start, layers, cfg.widths, cfg.layer_seed),
                                              cfg.t_end, 0.5 * h);
    const auto wf = sys.weights(fine);
    const auto& last = traj.records.back();
    double delta = std::abs(cos_angle(wf[0], start.v2) - last.cos1);
    if (wf.size() > 1) delta = std::max(delta, std::abs(cos_angle(wf[1], start.v2) - last.cos2));
    traj.audit_delta = delta;
  }
  return traj;
}

namespace {

// Minibatch estimate of the linear gradient at w from fresh draws.
Eigen::Vector2d sampled_grad_linear(const Eigen::Vector2d& w, const Eigen::Vector2d& v, const RadialLaw& law,
                                    int batch, std::mt19937_64& rng) {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int i = 0; i < batch; ++i) {
    const Eigen::Vector2d x = draw_plane_point(law, rng);
    const double y = v.dot(x) >= 0.0 ? 1.0 : -1.0;
    g += -y * logistic_tail(y * w.dot(x)) * x;
  }
  return g / batch;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> sampled_grad_relu(const Eigen::Vector2d& w1, const Eigen::Vector2d& w2,
                                                              const Eigen::Vector2d& v, const RadialLaw& law,
                                                              int batch, std::mt19937_64& rng) {
  Eigen::Vector2d g1 = Eigen::Vector2d::Zero(), g2 = Eigen::Vector2d::Zero();
  for (int i = 0; i < batch; ++i) {
    const Eigen::Vector2d x = draw_plane_point(law, rng);
    const double y = v.dot(x) >= 0.0 ? 1.0 : -1.0;
    const double a1 = w1.dot(x), a2 = w2.dot(x);
    const double s = logistic_tail(y * (std::max(a1, 0.0) - std::max(a2, 0.0)));
    if (a1 >= 0.0) g1 += -y * s * x;
    if (a2 >= 0.0) g2 += y * s * x;
  }
  return {g1 / batch, g2 / batch};
}

}  // namespace

Trajectory gd(const ModelSpec& model, const PlaneState& start, const RadialLaw& law, const GdConfig& cfg) {
  if (cfg.steps < 1) throw ConfigError("gd: steps must be >= 1");
  if (cfg.record_every < 1) throw ConfigError("gd: record_every must be >= 1");
  if (cfg.minibatch && cfg.batch < 1) throw ConfigError("gd: batch size must be >= 1");
  cfg.schedule.validate();
  cfg.quad.validate();
  model.validate();
  const bool layers = model.kind == ModelKind::DeepLinear;
  const std::vector<int> widths = layers ? layer_widths(model, cfg.widths) : std::vector<int>{};
  const System sys = make_system(model, start.v2, law, cfg.quad, layers, widths);
  Eigen::VectorXd x = initial_state(model, start, layers, widths, cfg.layer_seed);
  const Eigen::Vector2d v = start.v2;

  Trajectory traj;
  traj.model = model;
  traj.v = v;
  traj.law_label = law.label();
  traj.method = "gd";
  traj.full_layers = layers;
  traj.widths = widths;
  if (model.kind != ModelKind::TwoNeuronReLU) {
    traj.degenerate_ray = std::abs(cos_angle(sys.weights(x)[0], v) + 1.0) < 1e-15;
  }

  std::mt19937_64 rng(cfg.seed);
  auto direction = [&](const Eigen::VectorXd& state) -> Eigen::VectorXd {
    if (!cfg.minibatch) return sys.velocity(state);
    switch (model.kind) {
      case ModelKind::Linear:
        return -sampled_grad_linear(head2(state), v, law, cfg.batch, rng);
      case ModelKind::TwoNeuronReLU: {
        const auto [g1, g2] = sampled_grad_relu(head2(state), head2(state, 2), v, law, cfg.batch, rng);
        Eigen::VectorXd out(4);
        out << -g1, -g2;
        return out;
      }
      case ModelKind::DeepLinear: {
        const LayerStack stack = unflatten(state, widths);
        const Eigen::Vector2d we = head2(effective_weight(stack));
        const Eigen::Vector2d g = sampled_grad_linear(we, v, law, cfg.batch, rng);
        // Same chain rule as layerwise_gradients, with the sampled g_e.
        const int N = stack.depth();
        std::vector<Eigen::MatrixXd> below(N), above(N);
        below[0] = Eigen::MatrixXd::Identity(2, 2);
        for (int j = 1; j < N; ++j) below[j] = stack.W[j - 1] * below[j - 1];
        above[N - 1] = Eigen::MatrixXd::Identity(1, 1);
        for (int j = N - 2; j >= 0; --j) above[j] = above[j + 1] * stack.W[j + 1];
        LayerStack grads;
        for (int j = 0; j < N; ++j) grads.W.push_back(above[j].transpose() * g.transpose() * below[j].transpose());
        return -flatten(grads);
      }
    }
    return sys.velocity(state);
  };

  for (long n = 0; n <= cfg.steps; ++n) {
    const bool rec = n % cfg.record_every == 0 || n == cfg.steps;
    if (rec) {
      traj.records.push_back(make_record(static_cast<double>(n), x, sys, model, v, law, cfg.quad, cfg.diagnostics));
      traj.records.back().eta = n < cfg.steps ? cfg.schedule.rate(n) : kNaN;
      if (cfg.stop_when && cfg.stop_when(traj.records.back())) break;
    }
    if (n == cfg.steps) break;
    x += cfg.schedule.rate(n) * direction(x);
    if (!x.allFinite()) throw NumericalError("gd: iterate became non-finite", kNaN);
  }
  return traj;
}

namespace {

double n_of_state(const System& sys, const Eigen::VectorXd& x, const ModelSpec& model, const Eigen::Vector2d& v,
                  const RadialLaw& law, const QuadratureConfig& quad) {
  const auto w = sys.weights(x);
  if (model.kind == ModelKind::TwoNeuronReLU) return eval_relu(w[0], w[1], v, law, quad).n;
  return eval_linear(w[0], v, law, quad).n;
}

PhaseSwitch refine(const System& sys, const ModelSpec& model, const Eigen::Vector2d& v, const RadialLaw& law,
                   const QuadratureConfig& quad, Eigen::VectorXd x, double t0, double t1, double h) {
  PhaseSwitch ps;
  double t = t0;
  while (t < t1 - 1e-15) {
    const double dt = std::min(h, t1 - t);
    const Eigen::VectorXd y = rk4_step(sys, x, dt);
    const double ny = n_of_state(sys, y, model, v, law, quad);
    if (ny >= 0.0) {
      double lo = 0.0, hi = dt;
      Eigen::VectorXd best = y;
      double nbest = ny;
      ps.T = t + dt;
      for (int it = 0; it < 200 && std::abs(nbest) >= 1e-8 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Eigen::VectorXd z = rk4_step(sys, x, mid);
        const double nz = n_of_state(sys, z, model, v, law, quad);
        best = z;
        nbest = nz;
        if (nz >= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
        ps.T = t + mid;
      }
      const auto w = sys.weights(best);
      ps.w_T = w[0];
      ps.theta_T = angle(w[0], v);
      ps.n_at_T = nbest;
      ps.found = true;
      return ps;
    }
    x = y;
    t += dt;
  }
  return ps;
}

}  // namespace

PhaseSwitch find_phase_switch(const Trajectory& traj, const RadialLaw& law, const QuadratureConfig& quad) {
  if (traj.method != "flow") throw ConfigError("find_phase_switch: needs a flow trajectory");
  if (traj.records.empty()) throw ConfigError("find_phase_switch: empty trajectory");
  const System sys = make_system(traj.model, traj.v, law, quad, traj.full_layers, traj.widths);
  const auto& first = traj.records.front();
  const double n0 = n_of_state(sys, first.state, traj.model, traj.v, law, quad);
  if (n0 >= 0.0) {
    PhaseSwitch ps;
    ps.T = first.t;
    ps.w_T = first.w[0];
    ps.theta_T = angle(first.w[0], traj.v);
    ps.n_at_T = n0;
    ps.found = true;
    return ps;
  }
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    if (traj.records[k].n >= 0.0) {
      const auto& a = traj.records[k - 1];
      return refine(sys, traj.model, traj.v, law, quad, a.state, a.t, traj.records[k].t, traj.step);
    }
  }
  return {};
}

PhaseSwitch phase_switch_from(const ModelSpec& model, const Eigen::Vector2d& w0, const Eigen::Vector2d& v,
                              const RadialLaw& law, double t_max, const QuadratureConfig& quad) {
  if (model.kind == ModelKind::TwoNeuronReLU) throw ConfigError("phase_switch_from: single-vector models only");
  const System sys = make_system(model, v, law, quad, false, {});
  const Eigen::VectorXd x = w0;
  const double n0 = n_of_state(sys, x, model, v, law, quad);
  if (n0 >= 0.0) {
    PhaseSwitch ps;
    ps.w_T = w0;
    ps.theta_T = angle(w0, v);
    ps.n_at_T = n0;
    ps.found = true;
    return ps;
  }
  return refine(sys, model, v, law, quad, x, 0.0, t_max, default_step(law));
}

}  // namespace dirflow
